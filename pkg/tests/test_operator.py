import math

import numpy as np
import pytest
from scipy.special import gammaln

from loglap.operator import (
    QuadratureSpec,
    ToleranceNotMet,
    bump,
    derivative_consistency,
    eval_frac_plap,
    eval_log_plap,
    eval_log_plap_zero,
    gaussian,
    odd_gaussian,
    rescale_argument,
    small_s_limit_study,
    translate,
    zero_function,
)
from loglap.specfun import EULER_GAMMA

# p = 2 Fourier-side oracle for the unit Gaussian at the origin (valid only
# for p = 2): the operator of order s evaluates to 2^s Gamma(s + N/2)/Gamma(N/2).
def gaussian_frac_oracle(s, N=1):
    return 2.0**s * math.exp(gammaln(s + N / 2.0) - gammaln(N / 2.0))


def gaussian_log_oracle(s):
    """s-derivative of the N = 1 oracle: F(s) (ln 2 + psi(s + 1/2))."""
    from scipy.special import digamma as scipy_psi

    return gaussian_frac_oracle(s) * (math.log(2.0) + scipy_psi(s + 0.5))


LOG_ZERO_ORACLE = -EULER_GAMMA - math.log(2.0)  # -1.2703628454614782
Q3 = QuadratureSpec(radial_nodes_per_level=64, target_tol=1e-4)


class TestTestFunctions:
    @pytest.mark.parametrize("factory,ndim", [(gaussian, 1), (gaussian, 2), (bump, 1),
                                              (bump, 2), (odd_gaussian, 1)])
    def test_gradient_consistent_with_values(self, factory, ndim):
        u = factory(ndim)
        rng = np.random.default_rng(3)
        h = 1e-6
        for _ in range(10):
            x = rng.uniform(-0.8, 0.8, size=ndim)
            g = u.gradient(x)
            for k in range(ndim):
                e = np.zeros(ndim)
                e[k] = h
                fd = (u.value((x + e)[None, :])[0] - u.value((x - e)[None, :])[0]) / (2 * h)
                assert g[k] == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("factory,ndim", [(gaussian, 1), (bump, 2), (odd_gaussian, 1)])
    def test_hessian_consistent_with_gradient(self, factory, ndim):
        u = factory(ndim)
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(5):
            x = rng.uniform(-0.7, 0.7, size=ndim)
            H = u.hessian(x)
            for k in range(ndim):
                e = np.zeros(ndim)
                e[k] = h
                fd = (u.gradient(x + e) - u.gradient(x - e)) / (2 * h)
                assert np.allclose(H[:, k], fd, atol=1e-5)

    def test_compact_support_vanishes(self):
        u = bump(1)
        assert u.value(np.array([[1.5], [2.0], [-1.01]])).tolist() == [0.0, 0.0, 0.0]


class TestFracPLap:
    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_gaussian_oracle(self, s):
        res = eval_frac_plap(gaussian(1), 0.0, s, 2.0)
        assert abs(res.value - gaussian_frac_oracle(s)) <= max(1e-4, 10.0 * res.error)

    def test_small_order_approaches_value(self):
        res = eval_frac_plap(gaussian(1), 0.0, 0.02, 2.0)
        assert abs(res.value - 1.0) <= 2.5 * 0.02
        assert res.value == pytest.approx(gaussian_frac_oracle(0.02), abs=2e-4)

    def test_odd_function_at_origin(self):
        res = eval_frac_plap(odd_gaussian(1), 0.0, 0.5, 2.0)
        assert abs(res.value) <= 1e-12

    def test_dimension_two_oracle(self):
        res = eval_frac_plap(gaussian(2), np.zeros(2), 0.5, 2.0)
        assert res.value == pytest.approx(gaussian_frac_oracle(0.5, N=2), abs=1e-4)

    def test_oracle_agreement_at_five_order_point_pairs(self):
        # Fourier-side oracle away from the origin:
        # (2/pi)^{1/2}/2 * integral of |xi|^{2s} e^{-xi^2/2} cos(x xi) d xi
        from scipy.integrate import quad

        def oracle(s, x):
            val, _ = quad(
                lambda xi: xi ** (2 * s) * math.exp(-0.5 * xi * xi) * math.cos(x * xi),
                0.0, 40.0, limit=400,
            )
            return 2.0 * val / math.sqrt(2.0 * math.pi)

        for s, x in ((0.25, 0.0), (0.5, 0.0), (0.75, 0.0), (0.5, 0.7), (0.35, 1.2)):
            res = eval_frac_plap(gaussian(1), x, s, 2.0)
            assert abs(res.value - oracle(s, x)) <= max(1e-4, 10.0 * res.error)

    def test_invalid_order_and_dimension(self):
        with pytest.raises(ValueError):
            eval_frac_plap(gaussian(1), 0.0, 1.2, 2.0)
        with pytest.raises(ValueError):
            eval_frac_plap(gaussian(4), np.zeros(4), 0.5, 2.0)

    def test_tolerance_error_carries_estimate(self):
        with pytest.raises(ToleranceNotMet) as err:
            eval_frac_plap(gaussian(1), 0.0, 0.75, 2.0, QuadratureSpec(target_tol=1e-15))
        assert err.value.estimate > 1e-15
        assert err.value.value == pytest.approx(gaussian_frac_oracle(0.75), abs=1e-6)


class TestLogPLap:
    def test_gaussian_oracle_at_half(self):
        res = eval_log_plap(gaussian(1), 0.0, 0.5, 2.0)
        assert res.value == pytest.approx(gaussian_log_oracle(0.5), abs=2e-4)

    def test_zero_function(self):
        res = eval_log_plap(zero_function(1), 0.0, 0.5, 2.0)
        assert res.value == 0.0

    def test_matches_central_difference_in_order(self):
        h = 1e-3
        hi = eval_frac_plap(gaussian(1), 0.0, 0.5 + h, 2.0)
        lo = eval_frac_plap(gaussian(1), 0.0, 0.5 - h, 2.0)
        fd = (hi.value - lo.value) / (2.0 * h)
        direct = eval_log_plap(gaussian(1), 0.0, 0.5, 2.0)
        assert fd == pytest.approx(direct.value, abs=5.0 * h**2)


class TestLogPLapZero:
    def test_gaussian_oracle(self):
        res = eval_log_plap_zero(gaussian(1), 0.0, 2.0)
        assert res.value == pytest.approx(LOG_ZERO_ORACLE, abs=1e-4)

    def test_zero_function(self):
        assert eval_log_plap_zero(zero_function(1), 0.0, 2.0).value == 0.0

    def test_small_order_limit_toward_zero_operator(self):
        # the gap shrinks as s decreases; at s = 0.02 it equals the exact
        # Fourier-oracle gap (about 0.124), checked to quadrature accuracy
        base = eval_log_plap_zero(gaussian(1), 0.0, 2.0).value
        gaps = []
        for s in (0.1, 0.05, 0.02):
            val = eval_log_plap(gaussian(1), 0.0, s, 2.0).value
            gaps.append(abs(val - base))
        assert gaps[0] > gaps[1] > gaps[2]
        s_small = eval_log_plap(gaussian(1), 0.0, 0.02, 2.0).value
        assert s_small == pytest.approx(gaussian_log_oracle(0.02), abs=2e-4)


class TestDerivativeConsistency:
    def test_gaussian_p2_slope(self):
        study = derivative_consistency(gaussian(1), 0.0, 0.5, [1e-2, 5e-3, 2.5e-3], 2.0)
        assert 1.7 <= study.slope <= 2.3
        errs = [r.abs_err for r in study.rows]
        assert all(a >= b for a, b in zip(errs, errs[1:]))
        assert study.reliable

    def test_bump_p3_direct_agreement(self):
        hi = eval_frac_plap(bump(1), 0.3, 0.4 + 1e-3, 3.0, Q3)
        lo = eval_frac_plap(bump(1), 0.3, 0.4 - 1e-3, 3.0, Q3)
        fd = (hi.value - lo.value) / 2e-3
        direct = eval_log_plap(bump(1), 0.3, 0.4, 3.0, Q3)
        assert fd == pytest.approx(direct.value, abs=1e-4)

    def test_bump_p3_slope(self):
        study = derivative_consistency(bump(1), 0.3, 0.4, [1e-2, 5e-3, 2.5e-3], 3.0, Q3)
        assert 1.7 <= study.slope <= 2.3

    def test_rejects_nonmonotone_steps(self):
        with pytest.raises(ValueError):
            derivative_consistency(gaussian(1), 0.0, 0.5, [1e-3, 1e-2], 2.0)


class TestSmallSLimit:
    def test_gaussian_p2_decreasing(self):
        pts = [np.array([0.0]), np.array([0.5]), np.array([1.0])]
        table = small_s_limit_study(gaussian(1), pts, [0.2, 0.1, 0.05, 0.02], 2.0)
        sups = [e for _, e in table]
        assert all(a > b for a, b in zip(sups, sups[1:]))

    def test_bump_p3_decreasing(self):
        pts = [np.array([0.0]), np.array([0.3])]
        table = small_s_limit_study(bump(1), pts, [0.2, 0.1, 0.05, 0.02], 3.0, Q3)
        sups = [e for _, e in table]
        assert all(a > b for a, b in zip(sups, sups[1:]))

    def test_zero_function_identically_zero(self):
        pts = [np.array([0.0]), np.array([0.4])]
        table = small_s_limit_study(zero_function(1), pts, [0.2, 0.1], 2.0)
        assert all(e == 0.0 for _, e in table)

    def test_rejects_large_orders(self):
        with pytest.raises(ValueError):
            small_s_limit_study(gaussian(1), [np.array([0.0])], [0.5, 0.1], 2.0)


class TestInvariances:
    def test_translation_equivariance(self):
        rng = np.random.default_rng(9)
        for _ in range(3):
            c = float(rng.uniform(-1.0, 1.0))
            base = eval_frac_plap(gaussian(1), 0.2, 0.5, 2.0)
            moved = eval_frac_plap(translate(gaussian(1), [c]), 0.2 + c, 0.5, 2.0)
            assert moved.value == pytest.approx(base.value, abs=10 * max(base.error, 1e-12))

    def test_fractional_scaling_homogeneity(self):
        lam, s, p = 2.0, 0.5, 2.0
        v = rescale_argument(gaussian(1), lam)
        lhs = eval_frac_plap(v, lam * 0.3, s, p).value
        rhs = lam ** (-s * p) * eval_frac_plap(gaussian(1), 0.3, s, p).value
        assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_node_refinement_within_error_estimate(self):
        for s in (0.5, 0.75):
            base = eval_frac_plap(gaussian(1), 0.0, s, 2.0)
            fine = eval_frac_plap(
                gaussian(1), 0.0, s, 2.0, QuadratureSpec(radial_nodes_per_level=64)
            )
            assert abs(fine.value - base.value) <= base.error
