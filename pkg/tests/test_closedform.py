"""Exact-law checks against independent oracles.

The frozen reference numbers in this module were computed with 40-digit
mpmath evaluations of the defining series and integrals before the
implementation existed; the quadrature, finite-difference, and symbolic
checks recompute everything on the fly through unrelated routes.
"""

import math

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from dealersim import (BubbleRegimeError, ClosedFormLaw, ConfigError,
                       NumericsError, closedform, density_u, diffusion_ratio,
                       dirichlet_beta, euler_number,
                       fractional_interval_moment, moment, puck_b_mean, q1,
                       q2, solve_tail_exponent, solve_trend_coefficient,
                       tail_rates, variance)
from dealersim.closedform import PuckParams

LAW = ClosedFormLaw(L=0.01, c=0.01)
LAW2 = ClosedFormLaw(L=0.02, c=0.005)

# frozen mpmath values, interval pdf/ccdf at L = c = 0.01
Q1_PDF = {
    0.01: 7.83543326550866765e-9,
    0.05: 0.340014664100813668,
    0.1: 1.46449824713698105,
    0.2: 1.80697778316464896,
    0.3: 1.48651690000586347,
    0.5: 0.914730451267839865,
    0.7: 0.558526128318148568,
    1.0: 0.26642267636486352,
    2.0: 0.0225939679161388186,
}
Q1_CCDF = {
    0.05: 0.996869195483994901,
    0.1: 0.949305362684470364,
    0.25: 0.68544576689035199,
    0.5: 0.370777429799523905,
    1.0: 0.107977044444109013,
    2.0: 0.00915699028976075575,
}
# frozen mpmath values, |price change| pdf/ccdf at L = 0.01
Q2_VALUES = {
    0.0: (200.0, 1.0),
    0.002: (166.116807666141703, 0.623986440883591159),
    0.005: (79.7073630676773361, 0.260963772854312702),
    0.01: (17.2533476668108829, 0.0549874580021489736),
    0.03: (0.032279806817902434, 1.02749816788512172e-4),
}
BETA_VALUES = {
    0.25: 0.59072305644249473187,
    0.5: 0.66769145718960917666,
    1.0: 0.78539816339744830962,
    1.5: 0.86450265346120204036,
    2.0: 0.91596559417721901505,
    3.0: 0.96894614625936938048,
    4.0: 0.98894455174110533611,
    7.0: 0.9995545078905399095,
    9.0: 0.99994968418722008982,
}
DENSITY_VALUES = {
    (0.0, 0.01, 0.5): 2323.66321422511104,
    (0.005, 0.005, 0.1): 694.566104919390936,
    (0.02, 0.015, 1.0): 6.19659988405423555,
}


class TestIntervalLaw:
    @pytest.mark.parametrize("I,expected", sorted(Q1_PDF.items()))
    def test_pdf_matches_frozen_series_values(self, I, expected):
        assert q1(I, LAW, which="pdf") == pytest.approx(expected, rel=1e-12, abs=1e-20)

    @pytest.mark.parametrize("I,expected", sorted(Q1_CCDF.items()))
    def test_ccdf_matches_frozen_series_values(self, I, expected):
        assert q1(I, LAW, which="ccdf") == pytest.approx(expected, rel=1e-12)

    def test_pdf_is_continuous_at_the_series_switch(self):
        u_switch = 2.0 / math.pi
        I_switch = u_switch * LAW.L**2 / LAW.c**2
        below = q1(I_switch * (1 - 1e-9), LAW, which="pdf")
        above = q1(I_switch * (1 + 1e-9), LAW, which="pdf")
        assert below == pytest.approx(above, rel=1e-6)

    def test_ccdf_is_continuous_at_the_series_switch(self):
        u_switch = 2.0 / math.pi
        I_switch = u_switch * LAW.L**2 / LAW.c**2
        below = q1(I_switch * (1 - 1e-9), LAW, which="ccdf")
        above = q1(I_switch * (1 + 1e-9), LAW, which="ccdf")
        assert below == pytest.approx(above, rel=1e-9)

    def test_pdf_integrates_to_one(self):
        total, err = integrate.quad(lambda x: q1(x, LAW, which="pdf"),
                                    0, 60, limit=300)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_pdf_integral_matches_ccdf(self):
        for I in (0.1, 0.5, 1.0):
            mass, _ = integrate.quad(lambda x: q1(x, LAW, which="pdf"),
                                     I, 80, limit=300)
            assert mass == pytest.approx(q1(I, LAW, which="ccdf"), rel=1e-8)

    def test_boundary_values(self):
        assert q1(0.0, LAW, which="pdf") == 0.0
        assert q1(0.0, LAW, which="ccdf") == 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ConfigError):
            q1(-0.1, LAW)
        with pytest.raises(ConfigError):
            q1(0.5, LAW, which="cdf")

    @given(st.floats(min_value=1e-4, max_value=20.0))
    def test_pdf_nonnegative_and_ccdf_in_unit_range(self, I):
        assert q1(I, LAW, which="pdf") >= 0.0
        assert 0.0 <= q1(I, LAW, which="ccdf") <= 1.0

    @given(st.floats(min_value=1e-3, max_value=10.0),
           st.floats(min_value=1.001, max_value=3.0))
    def test_ccdf_is_decreasing(self, I, factor):
        assert q1(I * factor, LAW, which="ccdf") <= q1(I, LAW, which="ccdf") + 1e-15


class TestPriceChangeLaw:
    @pytest.mark.parametrize("x,expected", sorted(Q2_VALUES.items()))
    def test_values_match_frozen_resummations(self, x, expected):
        pdf_want, ccdf_want = expected
        assert q2(x, LAW, which="pdf") == pytest.approx(pdf_want, rel=1e-12)
        assert q2(x, LAW, which="ccdf") == pytest.approx(ccdf_want, rel=1e-12)

    def test_pdf_at_origin_is_two_over_threshold(self):
        assert q2(0.0, LAW, which="pdf") == pytest.approx(2.0 / LAW.L, rel=1e-14)
        assert q2(0.0, LAW2, which="pdf") == pytest.approx(2.0 / LAW2.L, rel=1e-14)

    def test_pdf_integrates_to_one(self):
        total, _ = integrate.quad(lambda x: q2(x, LAW, which="pdf"),
                                  0, 0.2, limit=200)
        assert total == pytest.approx(1.0, abs=1e-10)

    def test_pdf_integral_matches_ccdf(self):
        for x in (0.001, 0.005, 0.02):
            mass, _ = integrate.quad(lambda y: q2(y, LAW, which="pdf"),
                                     x, 0.3, limit=200)
            assert mass == pytest.approx(q2(x, LAW, which="ccdf"), rel=1e-9)

    @given(st.floats(min_value=0.0, max_value=0.1))
    def test_pdf_nonnegative_ccdf_in_unit_range(self, x):
        assert q2(x, LAW, which="pdf") >= 0.0
        assert 0.0 <= q2(x, LAW, which="ccdf") <= 1.0


class TestSpecialFunctions:
    def test_euler_numbers_match_symbolic_values(self):
        for k in range(0, 21):
            assert euler_number(k) == abs(int(sympy.euler(2 * k)))

    def test_euler_number_rejects_bad_index(self):
        with pytest.raises(ConfigError):
            euler_number(-1)
        with pytest.raises(ConfigError):
            euler_number(1000)

    @pytest.mark.parametrize("s,expected", sorted(BETA_VALUES.items()))
    def test_beta_matches_frozen_values(self, s, expected):
        assert dirichlet_beta(s) == pytest.approx(expected, rel=1e-14)

    def test_beta_matches_hurwitz_zeta_route(self):
        for s in (0.7, 1.3, 2.5, 5.0, 8.5):
            want = float((mpmath.zeta(s, mpmath.mpf(1) / 4)
                          - mpmath.zeta(s, mpmath.mpf(3) / 4)) / 4**s)
            assert dirichlet_beta(s) == pytest.approx(want, rel=1e-13)

    def test_beta_special_points(self):
        assert dirichlet_beta(1.0) == pytest.approx(math.pi / 4, rel=1e-15)
        assert dirichlet_beta(2.0) == pytest.approx(float(mpmath.catalan), rel=1e-15)


class TestMoments:
    def test_interval_moments_match_closed_ratios(self):
        for law in (LAW, LAW2):
            scale = (law.L / law.c) ** 2
            assert moment("interval", 1, law) == pytest.approx(scale / 2, rel=1e-12)
            assert variance("interval", law) == pytest.approx(scale**2 / 6, rel=1e-12)

    def test_price_change_moments_match_special_function_route(self):
        for law in (LAW, LAW2):
            for k in (1, 2, 3):
                want = (4.0 * law.L**k * math.factorial(k)
                        * dirichlet_beta(k + 1) / math.pi ** (k + 1))
                assert moment("abs_dprice", k, law) == pytest.approx(want, rel=1e-12)

    def test_quadrature_reproduces_interval_moments(self):
        for k in range(1, 5):
            num, _ = integrate.quad(lambda x: x**k * q1(x, LAW, which="pdf"),
                                    0, 100, limit=400)
            assert num == pytest.approx(moment("interval", k, LAW), rel=1e-6)

    def test_quadrature_reproduces_price_change_moments(self):
        for k in range(1, 5):
            num, _ = integrate.quad(lambda x: x**k * q2(x, LAW, which="pdf"),
                                    0, 0.5, limit=400)
            assert num == pytest.approx(moment("abs_dprice", k, LAW), rel=1e-6)

    def test_fractional_moment_agrees_with_integer_moment(self):
        for k in (1, 2, 3):
            assert fractional_interval_moment(float(k), LAW) == pytest.approx(
                moment("interval", k, LAW), rel=1e-12)

    def test_fractional_moment_matches_frozen_and_quadrature(self):
        frozen = {0.5: 0.65798250009581994, 2.5: 0.441891416244595037}
        for beta, want in frozen.items():
            got = fractional_interval_moment(beta, LAW)
            assert got == pytest.approx(want, rel=1e-12)
            num, _ = integrate.quad(lambda x: x**beta * q1(x, LAW, which="pdf"),
                                    0, 100, limit=400)
            assert num == pytest.approx(got, rel=1e-6)

    def test_moment_argument_validation(self):
        with pytest.raises(ConfigError):
            moment("interval", 0, LAW)
        with pytest.raises(ConfigError):
            moment("interval", 65, LAW)
        with pytest.raises(ConfigError):
            moment("prices", 1, LAW)
        with pytest.raises(ConfigError):
            fractional_interval_moment(-0.5, LAW)


class TestTailRates:
    def test_rates_match_direct_formulas(self):
        for law in (LAW, LAW2):
            rates = tail_rates(law)
            assert rates.interval_rate == pytest.approx(
                (law.c * math.pi / (2 * law.L)) ** 2, rel=1e-14)
            assert rates.dprice_rate == pytest.approx(math.pi / law.L, rel=1e-14)

    def test_frozen_values(self):
        rates = tail_rates(LAW2)
        assert rates.interval_rate == pytest.approx(0.154212568767021228, rel=1e-14)
        assert rates.dprice_rate == pytest.approx(157.079632679489662, rel=1e-14)

    def test_rates_govern_the_asymptotic_tails(self):
        # log-ccdf slope far in the tail approaches the quoted rate
        rates = tail_rates(LAW)
        for which, rate, points in (
            ("interval", rates.interval_rate, (4.0, 5.0)),
            (None, rates.dprice_rate, (0.03, 0.04)),
        ):
            if which == "interval":
                f = lambda v: q1(v, LAW, which="ccdf")
            else:
                f = lambda v: q2(v, LAW, which="ccdf")
            a, b = points
            slope = (math.log(f(a)) - math.log(f(b))) / (b - a)
            assert slope == pytest.approx(rate, rel=1e-3)


class TestSolvers:
    def test_trend_coefficient_for_cubic_tail(self):
        d = solve_trend_coefficient(3.0, LAW)
        assert d == pytest.approx(1.2529982670466240661, rel=1e-12)

    def test_tail_exponent_for_calibrated_trend(self):
        assert solve_tail_exponent(1.25, LAW) == pytest.approx(
            3.01241722353529616, abs=1e-9)

    def test_solvers_round_trip(self):
        for beta in (1.5, 3.0, 5.0):
            d = solve_trend_coefficient(beta, LAW)
            assert solve_tail_exponent(d, LAW) == pytest.approx(beta, abs=1e-8)

    def test_tail_exponent_defining_identity(self):
        # |d|^beta <I^beta> = 1 at the returned exponent
        d = 1.25
        beta = solve_tail_exponent(d, LAW)
        assert d**beta * fractional_interval_moment(beta, LAW) == pytest.approx(
            1.0, rel=1e-9)

    def test_no_exponent_when_trend_is_too_strong(self):
        with pytest.raises(NumericsError, match="tail exponent"):
            solve_tail_exponent(3.0, LAW)

    def test_no_exponent_when_trend_is_too_weak(self):
        with pytest.raises(NumericsError, match="tail exponent"):
            solve_tail_exponent(0.01, LAW)

    def test_trend_coefficient_rejects_bad_target(self):
        with pytest.raises(ConfigError):
            solve_trend_coefficient(0.0, LAW)


class TestPuckQuantities:
    def test_mean_potential_coefficient(self):
        assert puck_b_mean(1.25, LAW) == pytest.approx(-1.25, rel=1e-14)
        assert puck_b_mean(-1.0, LAW2) == pytest.approx(16.0, rel=1e-12)

    def test_puck_params_from_trend_keeps_the_invariant(self):
        pp = PuckParams.from_trend(0.5, LAW2, M=3)
        assert pp.d == 0.5 and pp.M == 3
        assert pp.b_mean == pytest.approx(-0.5 * (LAW2.L / LAW2.c) ** 2, rel=1e-14)

    def test_diffusion_ratio_reference_points(self):
        assert diffusion_ratio(0.0, LAW) == pytest.approx(1.0, rel=1e-15)
        assert diffusion_ratio(-1.0, LAW) == pytest.approx(2.0 / 3.0, rel=1e-14)
        assert diffusion_ratio(1.0, LAW) == pytest.approx(2.0, rel=1e-14)

    def test_diffusion_ratio_rejects_bubble_regime(self):
        with pytest.raises(BubbleRegimeError):
            diffusion_ratio(2.0, LAW)
        with pytest.raises(BubbleRegimeError):
            diffusion_ratio(2.5, LAW)
        # threshold scales with (c/L)^2
        assert diffusion_ratio(2.0, ClosedFormLaw(L=0.01, c=0.02)) > 0


class TestOccupationDensity:
    @pytest.mark.parametrize("point,expected", sorted(DENSITY_VALUES.items()))
    def test_frozen_values(self, point, expected):
        x, y, t = point
        assert density_u(x, y, t, LAW) == pytest.approx(expected, rel=1e-9)

    def test_vanishes_on_the_absorbing_walls(self):
        assert density_u(0.0, 0.0, 0.5, LAW) == 0.0
        assert density_u(0.01, 2 * LAW.L, 0.5, LAW) == 0.0

    def test_even_in_the_price_coordinate(self):
        for x in (0.003, 0.01):
            assert density_u(x, 0.012, 0.4, LAW) == pytest.approx(
                density_u(-x, 0.012, 0.4, LAW), rel=1e-14)

    def test_total_mass_equals_interval_ccdf(self):
        for t in (0.2, 0.7):
            mass, _ = integrate.dblquad(
                lambda y, x: density_u(x, y, t, LAW),
                -0.2, 0.2, 0.0, 2 * LAW.L, epsabs=1e-10)
            assert mass == pytest.approx(q1(t, LAW, which="ccdf"), rel=1e-6)

    def test_mass_decay_rate_equals_interval_pdf(self):
        # -d/dt of the surviving mass is the first-passage density
        t0, h = 0.5, 1e-4

        def mass(t):
            val, _ = integrate.dblquad(
                lambda y, x: density_u(x, y, t, LAW),
                -0.25, 0.25, 0.0, 2 * LAW.L, epsabs=1e-11)
            return val

        deriv = (mass(t0 - h) - mass(t0 + h)) / (2 * h)
        assert deriv == pytest.approx(q1(t0, LAW, which="pdf"), rel=1e-4)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ConfigError):
            density_u(0.0, 0.01, 0.0, LAW)
        with pytest.raises(ConfigError):
            density_u(0.0, 0.03, 0.5, LAW)


class TestLawValidation:
    def test_law_rejects_nonpositive_scales(self):
        with pytest.raises(ConfigError):
            ClosedFormLaw(L=0.0)
        with pytest.raises(ConfigError):
            ClosedFormLaw(c=-1.0)

    def test_law_rejects_bad_series_controls(self):
        with pytest.raises(ConfigError):
            ClosedFormLaw(series_terms=4)
        with pytest.raises(ConfigError):
            ClosedFormLaw(tolerance=0.0)
        with pytest.raises(ConfigError):
            ClosedFormLaw(tolerance=1e-3)

    def test_interval_scale(self):
        assert LAW2.interval_scale == pytest.approx(16.0, rel=1e-14)


def test_package_oracle_matches_independent_mpmath_interval_pdf():
    """Recompute the interval pdf through mpmath's incomplete sums."""
    mpmath.mp.dps = 30
    L, c = mpmath.mpf("0.01"), mpmath.mpf("0.01")

    def pdf(I):
        base = (mpmath.pi * c / (2 * L)) ** 2
        total = mpmath.mpf(0)
        for n in range(1, 400, 2):
            total += (-1) ** ((n - 1) // 2) * n * mpmath.exp(-base * n**2 * I)
        return float(base * total)

    for I in (0.7, 1.0, 1.5, 2.0):
        assert q1(I, LAW, which="pdf") == pytest.approx(pdf(I), rel=1e-12)
