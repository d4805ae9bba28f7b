"""Solvable dealer-model market simulator.

Two dealers quote prices that diffuse on a lattice until their quotes
cross a threshold and a transaction prints. The package pairs a fast
exact simulator of that market (with self-modulated noise amplitude and
a trend term as optional ingredients) with closed-form expressions for
its statistical laws and estimators that recover those laws, plus a
small experiment harness with checked presets.
"""

from .closedform import (ClosedFormLaw, PuckParams, TailRates, density_u,
                         diffusion_ratio, dirichlet_beta, euler_number,
                         fractional_interval_moment, moment, puck_b_mean, q1,
                         q2, solve_tail_exponent, solve_trend_coefficient,
                         tail_rates, variance)
from .engine import (SimState, TickRecord, TickSeries, modulated_c,
                     new_simulation, run, run_schedule, step,
                     trailing_interval_mean, weighted_ma)
from .errors import (BubbleRegimeError, ConfigError, DataError,
                     DealerSimError, NumericsError, PositivityError,
                     StalledError)
from .params import SimParams, params_for_model
from .presets import (ExperimentPreset, ExperimentReport, Expectation,
                      get_preset, preset_names, run_experiment, summarize)
from .stats import (EmpiricalCcdf, Histogram, HillTailFit, PotentialFit,
                    TrendRegression, diffusion_sigma, e_series,
                    empirical_ccdf, fit_exponential_rate, hill_tail_exponent,
                    potential_curve, puck_slope)

__version__ = "0.1.0"

__all__ = [
    "BubbleRegimeError", "ClosedFormLaw", "ConfigError", "DataError",
    "DealerSimError", "EmpiricalCcdf", "Expectation", "ExperimentPreset",
    "ExperimentReport", "Histogram", "HillTailFit", "NumericsError",
    "PositivityError", "PotentialFit", "PuckParams", "SimParams", "SimState",
    "StalledError", "TailRates", "TickRecord", "TickSeries",
    "TrendRegression", "density_u", "diffusion_ratio", "diffusion_sigma",
    "dirichlet_beta", "e_series", "empirical_ccdf", "euler_number",
    "fit_exponential_rate", "fractional_interval_moment", "get_preset",
    "hill_tail_exponent", "modulated_c", "moment", "new_simulation",
    "params_for_model", "potential_curve", "preset_names", "puck_b_mean",
    "puck_slope", "q1", "q2", "run", "run_experiment", "run_schedule",
    "solve_tail_exponent", "solve_trend_coefficient", "step", "summarize",
    "tail_rates", "trailing_interval_mean", "variance", "weighted_ma",
    "__version__",
]
