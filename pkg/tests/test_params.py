"""Parameter validation: every constraint names itself in the error, the
time-step rule binds dt to dp*dp, and the model presets map onto the
self-modulation and trend switches consistently.
"""

import math

import pytest

from dealersim import ConfigError, SimParams, params_for_model


def test_defaults_are_valid_and_dt_follows_dp():
    p = SimParams()
    assert p.L == p.c == p.dp == 0.01
    assert p.dt == pytest.approx(0.01 * 0.01, rel=1e-12)
    assert p.M == 1 and p.n_ticks == 10_000


def test_dt_rule_rejects_mismatch_and_names_the_rule():
    with pytest.raises(ConfigError, match=r"dp\*dp"):
        SimParams(dt=0.5, dp=0.01)


def test_dt_rule_accepts_rounded_product():
    # 0.1 * 0.1 is one ulp away from 0.01; the rule must still accept it
    p = SimParams(dp=0.1, dt=0.01, L=0.1, c=0.1)
    assert p.dt == 0.01


def test_custom_dt_requires_explicit_override():
    with pytest.raises(ConfigError):
        SimParams(dt=2e-4)
    p = SimParams(dt=2e-4, allow_custom_dt=True)
    assert p.dt == 2e-4


@pytest.mark.parametrize("kwargs,fragment", [
    (dict(L=0.0), "L"),
    (dict(L=-1.0), "L"),
    (dict(c=0.0), "c"),
    (dict(dp=-0.01), "dp"),
    (dict(tau=0.0), "tau"),
    (dict(clamp_lo=0.0), "clamp_lo"),
    (dict(clamp_lo=60.0), "clamp"),
    (dict(M=0), "M"),
    (dict(n_ticks=0), "n_ticks"),
    (dict(p0=0.0), "p0"),
    (dict(seed=-1), "seed"),
    (dict(max_steps_per_tick=0), "max_steps_per_tick"),
    (dict(interval_bootstrap=-1.0), "bootstrap"),
])
def test_invalid_values_raise_config_errors_naming_the_field(kwargs, fragment):
    with pytest.raises(ConfigError, match=fragment):
        SimParams(**kwargs)


def test_effective_trend_coefficients_default_to_d():
    p = SimParams(d=2.0, d_minus=-1.0)
    assert p.effective_d_plus == 2.0
    assert p.effective_d_minus == -1.0
    assert p.trend_enabled


def test_bootstrap_interval_defaults_to_geometric_midpoint():
    p = SimParams()
    assert p.bootstrap_interval == pytest.approx(math.sqrt(3.0 * 50.0))
    q = SimParams(interval_bootstrap=7.5)
    assert q.bootstrap_interval == 7.5


def test_with_ticks_rebuilds_only_the_count():
    p = SimParams(seed=9)
    q = p.with_ticks(123)
    assert q.n_ticks == 123 and q.seed == 9 and q.L == p.L


def test_model_1_is_plain_noise():
    p = params_for_model("1")
    assert not p.self_modulation and not p.trend_enabled


def test_model_1_rejects_trend():
    with pytest.raises(ConfigError, match="trend"):
        params_for_model("1", d=1.0)


def test_model_2_enables_self_modulation_and_rejects_trend():
    p = params_for_model("2")
    assert p.self_modulation
    with pytest.raises(ConfigError, match="trend"):
        params_for_model("2", d_plus=0.5)


def test_model_3_accepts_zero_trend():
    # zero trend makes model 3 coincide with model 1 by construction
    p = params_for_model("3", d=0.0)
    assert not p.self_modulation and not p.trend_enabled


def test_model_2_plus_3_sets_both_switches():
    p = params_for_model("2+3", d=0.01)
    assert p.self_modulation and p.trend_enabled


def test_self_modulation_key_is_rejected():
    with pytest.raises(ConfigError, match="self_modulation"):
        params_for_model("2", self_modulation=True)


def test_unknown_model_is_rejected():
    with pytest.raises(ConfigError, match="model"):
        params_for_model("4")


def test_params_are_immutable():
    p = SimParams()
    with pytest.raises(Exception):
        p.L = 0.02
