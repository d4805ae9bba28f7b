"""Simulation parameters and their validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigError

# dt must equal dp*dp up to rounding; literal float equality would reject
# pairs like dp=0.1, dt=0.01 where the product rounds one ulp away.
_DT_RULE_RTOL = 1e-9


@dataclass(frozen=True)
class SimParams:
    """Full parameterization of the two-dealer market models.

    The noise amplitude is the constant ``c`` unless ``self_modulation`` is
    set, in which case it is recomputed at every transaction from the recent
    interval history (window ``tau``, window mean clamped to
    [``clamp_lo``, ``clamp_hi``], neutral bootstrap before the first
    transaction). The trend term adds ``d_eff * <dP>_M * dt`` to both dealer
    prices every step, where d_eff is ``d_plus`` when the weighted moving
    average of the last ``M`` price changes is >= 0 and ``d_minus``
    otherwise; both default to ``d``. Setting self-modulation and a nonzero
    trend together combines the two mechanisms (modulated noise, unscaled
    trend).
    """

    L: float = 0.01
    c: float = 0.01
    dp: float = 0.01
    dt: float | None = None
    d: float = 0.0
    d_plus: float | None = None
    d_minus: float | None = None
    M: int = 1
    tau: float = 150.0
    clamp_lo: float = 3.0
    clamp_hi: float = 50.0
    self_modulation: bool = False
    p0: float = 100.0
    seed: int = 1
    n_ticks: int = 10_000
    allow_custom_dt: bool = False
    max_steps_per_tick: int = 100_000_000
    interval_bootstrap: float | None = None

    def __post_init__(self):
        for name in ("L", "c", "dp", "p0", "tau"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"{name} must be positive (got {value!r})")
            object.__setattr__(self, name, float(value))
        if self.dt is None:
            object.__setattr__(self, "dt", self.dp * self.dp)
        if not isinstance(self.dt, (int, float)) or not self.dt > 0:
            raise ConfigError(f"dt must be positive (got {self.dt!r})")
        object.__setattr__(self, "dt", float(self.dt))
        square = self.dp * self.dp
        if not self.allow_custom_dt and abs(self.dt - square) > _DT_RULE_RTOL * square:
            raise ConfigError(
                f"dt must equal dp*dp (dt={self.dt!r}, dp*dp={square!r}); "
                "set allow_custom_dt to override"
            )
        if not isinstance(self.M, int) or isinstance(self.M, bool) or self.M < 1:
            raise ConfigError(f"M must be an integer >= 1 (got {self.M!r})")
        for name in ("clamp_lo", "clamp_hi"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(f"{name} must be positive (got {value!r})")
            object.__setattr__(self, name, float(value))
        if not self.clamp_lo < self.clamp_hi:
            raise ConfigError(
                f"clamp_lo must be below clamp_hi (got {self.clamp_lo!r}, {self.clamp_hi!r})"
            )
        object.__setattr__(self, "d", float(self.d))
        for name in ("d_plus", "d_minus"):
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, float(value))
        if (
            not isinstance(self.seed, int)
            or isinstance(self.seed, bool)
            or not 0 <= self.seed < 2**64
        ):
            raise ConfigError(f"seed must be an integer in [0, 2^64) (got {self.seed!r})")
        if not isinstance(self.n_ticks, int) or isinstance(self.n_ticks, bool) or self.n_ticks < 1:
            raise ConfigError(f"n_ticks must be a positive integer (got {self.n_ticks!r})")
        if (
            not isinstance(self.max_steps_per_tick, int)
            or isinstance(self.max_steps_per_tick, bool)
            or self.max_steps_per_tick < 1
        ):
            raise ConfigError(
                f"max_steps_per_tick must be a positive integer (got {self.max_steps_per_tick!r})"
            )
        if self.interval_bootstrap is not None:
            if not isinstance(self.interval_bootstrap, (int, float)) or not self.interval_bootstrap > 0:
                raise ConfigError(
                    f"interval_bootstrap must be positive (got {self.interval_bootstrap!r})"
                )
            object.__setattr__(self, "interval_bootstrap", float(self.interval_bootstrap))

    @property
    def effective_d_plus(self) -> float:
        return self.d if self.d_plus is None else self.d_plus

    @property
    def effective_d_minus(self) -> float:
        return self.d if self.d_minus is None else self.d_minus

    @property
    def trend_enabled(self) -> bool:
        return self.effective_d_plus != 0.0 or self.effective_d_minus != 0.0

    @property
    def bootstrap_interval(self) -> float:
        """Window-mean stand-in used before the first transaction."""
        if self.interval_bootstrap is not None:
            return self.interval_bootstrap
        return math.sqrt(self.clamp_lo * self.clamp_hi)

    def with_ticks(self, n_ticks: int) -> "SimParams":
        return replace(self, n_ticks=n_ticks)


_MODEL_NAMES = ("1", "2", "3", "2+3")


def params_for_model(model: str, **overrides) -> SimParams:
    """Build SimParams for a named model, rejecting inconsistent overrides.

    Model 1 is pure noise, model 2 adds self-modulated noise amplitude,
    model 3 adds the trend term, and 2+3 combines the last two.
    """
    model = str(model)
    if model not in _MODEL_NAMES:
        raise ConfigError(f"model must be one of {', '.join(_MODEL_NAMES)} (got {model!r})")
    if "self_modulation" in overrides:
        raise ConfigError("self_modulation is implied by the model choice; drop the key")
    params = SimParams(self_modulation=model in ("2", "2+3"), **overrides)
    if model in ("1", "2") and params.trend_enabled:
        raise ConfigError(f"model {model} has no trend term; drop d/d_plus/d_minus")
    return params
