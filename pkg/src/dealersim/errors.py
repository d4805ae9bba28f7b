"""Exception types shared across the package."""


class DealerSimError(Exception):
    """Base class for every error this package raises on purpose."""


class ConfigError(DealerSimError, ValueError):
    """Invalid parameter value or inconsistent parameter combination."""


class DataError(DealerSimError, ValueError):
    """Input series too short, empty, or otherwise unusable for an estimator."""


class NumericsError(DealerSimError, ArithmeticError):
    """A numerical routine failed to converge or has no solution in range."""


class BubbleRegimeError(NumericsError):
    """Trend feedback at or past the point where the diffusion formula diverges."""


class PositivityError(DealerSimError, RuntimeError):
    """The simulated market price dropped to zero or below; the run is halted."""

    def __init__(self, tick: int, price: float):
        self.tick = tick
        self.price = price
        super().__init__(f"market price {price:g} at tick {tick} is not positive")


class StalledError(DealerSimError, RuntimeError):
    """No transaction happened within the per-tick step budget."""

    def __init__(self, tick: int, max_steps: int):
        self.tick = tick
        self.max_steps = max_steps
        super().__init__(
            f"tick {tick} saw no transaction within {max_steps} steps; "
            "raise max_steps_per_tick or check the parameters"
        )
