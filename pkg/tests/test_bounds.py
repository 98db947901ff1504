"""Formula evaluators and deterministic checkers for the tail and
expectation machinery.  Frozen values were recomputed by hand from the
displayed formulas at high precision."""

import math

import numpy as np
import pytest

from capsmooth import bounds
from capsmooth.distributions import AdversarialLaw, Cap
from capsmooth.volumes import cap_integral


def e0(n):
    v = np.zeros(n + 1)
    v[0] = 1.0
    return v


class TestThresholds:
    def test_t0(self):
        assert bounds.t0(3, 1, 0.5) == 18.0
        assert bounds.t0(10, 2, 1.0) == 50.0

    def test_t0_log(self):
        assert np.isclose(bounds.t0_log(3, 1, 0.5),
                          2.8903717578961645, rtol=1e-15)
        assert np.isclose(bounds.t0_log(3, 1, 0.5), math.log(18.0),
                          rtol=1e-15)

    def test_linear_exceeds_log_form(self):
        # the two thresholds parameterize different tails (C vs ln C)
        for n in (2, 5, 20):
            for d in (1, 3):
                assert bounds.t0(n, d, 0.5) > bounds.t0_log(n, d, 0.5)

    def test_domain(self):
        with pytest.raises(ValueError):
            bounds.t0(0, 1, 0.5)
        with pytest.raises(ValueError):
            bounds.t0(3, 0, 0.5)
        with pytest.raises(ValueError):
            bounds.t0(3, 1, 1.5)


class TestUniformTail:
    def test_value(self):
        assert np.isclose(bounds.uniform_tail_bound(3, 1, 0.5, 18.0),
                          13.0 / 3.0, rtol=1e-15)

    def test_below_threshold_raises(self):
        with pytest.raises(ValueError):
            bounds.uniform_tail_bound(3, 1, 0.5, 17.9)

    def test_log_form(self):
        t = 5.0
        assert np.isclose(bounds.uniform_log_tail_bound(3, 1, 0.5, t),
                          78.0 * math.exp(-t), rtol=1e-14)
        with pytest.raises(ValueError):
            bounds.uniform_log_tail_bound(3, 1, 0.5, 2.0)

    def test_decreasing_in_t(self):
        vals = [bounds.uniform_tail_bound(3, 1, 0.5, t)
                for t in np.linspace(18, 100, 10)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


class TestUniformExpectation:
    def test_frozen(self):
        assert np.isclose(bounds.uniform_expectation_bound(3, 1, 0.5),
                          8.583518938456109, rtol=1e-14)

    def test_formula(self):
        n, d, s = 7, 3, 0.25
        expected = (2 * math.log(n) + 2 * math.log(d)
                    + 2 * math.log(1 / s) + 5)
        assert np.isclose(bounds.uniform_expectation_bound(n, d, s),
                          expected, rtol=1e-15)


class TestSmoothness:
    def test_alpha(self):
        assert bounds.smoothness_alpha(4, 0.0) == 1.0
        assert bounds.smoothness_alpha(4, 2.0) == 0.5
        assert np.isclose(bounds.smoothness_alpha(10, 5.0), 0.5)
        with pytest.raises(ValueError):
            bounds.smoothness_alpha(4, 4.0)

    @pytest.mark.parametrize("n,beta", [(4, 0.0), (4, 2.0), (10, 5.0)])
    def test_ratio_limit(self, n, beta):
        law = AdversarialLaw(Cap(e0(n), 0.5), beta)
        ratio = bounds.smoothness_ratio(law, 1e-6)
        assert abs(ratio - (1.0 - beta / n)) <= 0.02

    def test_ratio_domain(self):
        law = AdversarialLaw(Cap(e0(3), 0.5), 1.0)
        with pytest.raises(ValueError):
            bounds.smoothness_ratio(law, 0.5)
        with pytest.raises(ValueError):
            bounds.smoothness_ratio(law, 0.0)


class TestRhoEps:
    def test_frozen(self):
        assert np.isclose(bounds.rho_eps(4, 0.0, 1.0, 1.0, 0.5),
                          0.6191585686462326, rtol=1e-13)

    def test_proportional_in_sigma(self):
        full = bounds.rho_eps(4, 1.0, 1.0, 2.0, 0.25)
        half = bounds.rho_eps(4, 1.0, 0.5, 2.0, 0.25)
        assert np.isclose(half, 0.5 * full, rtol=1e-15)

    def test_vanishes_for_huge_H(self):
        assert bounds.rho_eps(4, 0.0, 1.0, 1e12, 0.5) < 1e-6

    def test_inside_cap(self):
        for p in bounds.default_grid():
            r = p.rho()
            assert 0.0 < r < p.sigma

    def test_eps_domain(self):
        with pytest.raises(ValueError):
            bounds.rho_eps(4, 2.0, 1.0, 1.0, 0.5)  # eps = alpha
        with pytest.raises(ValueError):
            bounds.rho_eps(4, 2.0, 1.0, 1.0, 0.0)


class TestDeltaTEps:
    def test_delta_is_mass_ratio(self):
        n, beta, sigma, H, eps = 4, 1.0, 0.8, 2.0, 0.3
        rho = bounds.rho_eps(n, beta, sigma, H, eps)
        expected = cap_integral(n, rho) / cap_integral(n, sigma)
        assert np.isclose(bounds.delta_eps(n, beta, sigma, H, eps),
                          expected, rtol=1e-12)

    def test_delta_decreasing_in_H(self):
        ds = [bounds.delta_eps(4, 1.0, 1.0, H, 0.25) for H in (1, 2, 10)]
        assert ds[0] > ds[1] > ds[2]

    def test_t_eps_frozen(self):
        assert np.isclose(bounds.t_eps(3, 1, 0.5, 0.01),
                          math.log(7800.0), rtol=1e-14)

    def test_t_eps_degree_shift(self):
        gap = bounds.t_eps(3, 2, 0.5, 0.01) - bounds.t_eps(3, 1, 0.5, 0.01)
        assert np.isclose(gap, math.log(2.0), rtol=1e-13)

    def test_t_eps_inversion(self):
        # delta = (13 d n / sigma) e^{-1} makes the threshold exactly 1
        n, d, sigma = 2, 1, 0.9
        delta = 13.0 * d * n / sigma * math.exp(-4.0)
        assert np.isclose(bounds.t_eps(n, d, sigma, delta), 4.0, rtol=1e-13)

    def test_t_eps_domain(self):
        with pytest.raises(ValueError):
            bounds.t_eps(3, 1, 0.5, 0.0)
        with pytest.raises(ValueError):
            bounds.t_eps(3, 1, 0.5, 1.0)


class TestBoostedTail:
    def test_frozen(self):
        val = bounds.boosted_tail_bound(3, 1, 0.5, 1.5, 12.0)
        assert np.isclose(val, (78.0 * math.exp(-12.0)) ** 0.25,
                          rtol=1e-14)

    def test_beta_zero_is_sqrt_of_uniform(self):
        t = 9.0
        b = bounds.boosted_tail_bound(3, 1, 0.5, 0.0, t)
        u = bounds.uniform_log_tail_bound(3, 1, 0.5, t)
        assert np.isclose(b, math.sqrt(u), rtol=1e-14)

    def test_vanishes_at_infinity(self):
        assert bounds.boosted_tail_bound(3, 1, 0.5, 1.5, 500.0) < 1e-20

    def test_below_threshold_raises(self):
        with pytest.raises(ValueError):
            bounds.boosted_tail_bound(3, 1, 0.5, 1.5, 3.0)


class TestAdversarialExpectation:
    def test_frozen(self):
        assert np.isclose(
            bounds.adversarial_expectation_bound(4, 2, 1.0, 0.0, 1.0),
            8.953098369968448, rtol=1e-13)
        assert np.isclose(
            bounds.adversarial_expectation_bound(3, 1, 0.5, 1.5, 1.0),
            10.613661307959376, rtol=1e-13)

    def test_monotone_in_beta(self):
        vals = [bounds.adversarial_expectation_bound(8, 1, 0.5, b, 2.0)
                for b in (0.0, 2.0, 4.0, 6.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_monotone_in_H(self):
        vals = [bounds.adversarial_expectation_bound(8, 1, 0.5, 2.0, H)
                for H in (1.0, 2.0, 10.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_gap_function_is_difference(self):
        g = bounds.expectation_bound_gap(5, 2, 0.5)
        expected = (bounds.adversarial_expectation_bound(5, 2, 0.5, 0.0, 1.0)
                    - bounds.uniform_expectation_bound(5, 2, 0.5))
        assert np.isclose(g, expected, rtol=1e-14)

    def test_proof_chain_variant_finite(self):
        for p in bounds.default_grid()[::37]:
            a = bounds.adversarial_expectation_bound(p.n, 1, p.sigma,
                                                     p.beta, p.H)
            b = bounds.adversarial_expectation_bound_proof_chain(
                p.n, 1, p.sigma, p.beta, p.H)
            assert math.isfinite(a) and math.isfinite(b)


class TestBoostingCheck:
    def test_trivial_beta_zero_H_one(self):
        # reduces to X <= X^{1-eps} for X <= 1
        rmax = bounds.rho_eps(5, 0.0, 0.7, 1.0, 0.3)
        for rho in np.geomspace(rmax * 1e-6, rmax, 25):
            assert bounds.boosting_check(5, 0.0, 0.7, 1.0, 0.3, rho)

    def test_endpoint(self):
        eps = 0.25 * (1.0 - 1.0 / 4.0)
        rho = bounds.rho_eps(4, 1.0, 1.0, 1.0, eps)
        assert bounds.boosting_check(4, 1.0, 1.0, 1.0, eps, rho)

    def test_rho_above_rho_eps_raises(self):
        rmax = bounds.rho_eps(4, 1.0, 1.0, 1.0, 0.25)
        with pytest.raises(ValueError):
            bounds.boosting_check(4, 1.0, 1.0, 1.0, 0.25, 1.5 * rmax)
        with pytest.raises(ValueError):
            bounds.boosting_check(4, 1.0, 1.0, 1.0, 0.25, 0.0)


class TestSmallCalc:
    def test_examples(self):
        assert bounds.small_calc_check(1)
        assert bounds.small_calc_check(100)

    def test_spot_grid(self):
        for n in (1, 2, 7, 50, 1000, 10 ** 6):
            assert bounds.small_calc_check(n)


class TestDeltaSandwich:
    def test_holds_at_small_sigma(self):
        for n, beta, H in ((2, 0.0, 1.0), (4, 2.0, 2.0), (8, 6.0, 10.0)):
            row = bounds.delta_eps_sandwich(n, beta, 0.5, H)
            assert row.lower_ok and row.upper_ok

    def test_upper_holds_on_grid(self):
        for p in bounds.default_grid()[::11]:
            row = bounds.delta_eps_sandwich(p.n, p.beta, p.sigma, p.H)
            assert row.upper_ok

    def test_known_lower_failure_at_sigma_one(self):
        # the closed-form lower bound relies on an upper sandwich branch
        # that is invalid at sigma = 1; the discrepancy is real, not a
        # numerical artifact (see the acceptance suite)
        row = bounds.delta_eps_sandwich(2, 0.0, 1.0, 1.0)
        assert np.isclose(row.value, 0.1315989966403572, rtol=1e-12)
        assert np.isclose(row.lower, 0.13872276405862413, rtol=1e-12)
        assert not row.lower_ok
        assert row.upper_ok

    def test_t_eps_exceeds_t0(self):
        for p in bounds.default_grid()[::23]:
            for d in (1, 2, 5):
                assert bounds.t_eps_exceeds_t0(p.n, d, p.sigma, p.beta, p.H)


class TestGridAndParams:
    def test_default_grid_size(self):
        grid = bounds.default_grid()
        assert len(grid) == 6 * 4 * 3 * 3 * 3

    def test_params_validate(self):
        with pytest.raises(ValueError):
            bounds.BoostParams(n=4, beta=4.0, sigma=0.5, H=1.0, eps=0.1)
        with pytest.raises(ValueError):
            bounds.BoostParams(n=4, beta=1.0, sigma=0.5, H=0.5, eps=0.1)
        p = bounds.BoostParams(n=4, beta=1.0, sigma=0.5, H=2.0, eps=0.25)
        assert p.alpha == 0.75
        assert np.isclose(p.delta(),
                          bounds.delta_eps(4, 1.0, 0.5, 2.0, 0.25),
                          rtol=1e-15)


class TestBallMaximizer:
    def law(self, n, beta, sigma=0.8):
        return AdversarialLaw(Cap(e0(n), sigma), beta)

    def test_centered_ball_equality(self):
        assert bounds.ball_maximizer_check(self.law(4, 2.0),
                                           [(0.0, 0.3)])

    def test_uniform_any_shells(self):
        shells = [(0.1, 0.2), (0.4, 0.5), (0.7, 0.8)]
        assert bounds.ball_maximizer_check(self.law(3, 0.0), shells)

    def test_outer_annulus_strictly_dominated(self):
        assert bounds.ball_maximizer_check(self.law(4, 2.0),
                                           [(0.6, 0.8)])

    def test_overlapping_rejected(self):
        with pytest.raises(ValueError):
            bounds.ball_maximizer_check(self.law(3, 1.0),
                                        [(0.1, 0.4), (0.3, 0.5)])

    def test_outside_cap_rejected(self):
        with pytest.raises(ValueError):
            bounds.ball_maximizer_check(self.law(3, 1.0), [(0.5, 0.9)])
