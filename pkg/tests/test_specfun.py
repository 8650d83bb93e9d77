import math

import mpmath as mp
import numpy as np
import pytest

from loglap.specfun import (
    EULER_GAMMA,
    Params,
    b_sign_threshold,
    classical_const,
    digamma,
    ln_gamma,
    log_norm_const,
    norm_const,
    sphere_measure,
)

mp.mp.dps = 30

# frozen from the mpmath oracle (30 digits)
LN_SQRT_PI = 0.5723649429247001
LN_24 = 3.1780538303479458
PSI_HALF = -1.9635100260214235


def classical_norm_const(N, s):
    """p = 2 constant s 2^{2s} Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s))."""
    return float(
        s * mp.mpf(2) ** (2 * s) * mp.gamma((N + 2 * s) / mp.mpf(2))
        / (mp.pi ** (mp.mpf(N) / 2) * mp.gamma(1 - mp.mpf(s)))
    )


class TestLnGamma:
    def test_at_one(self):
        assert ln_gamma(1.0) == pytest.approx(0.0, abs=1e-14)

    def test_half_is_log_sqrt_pi(self):
        assert ln_gamma(0.5) == pytest.approx(LN_SQRT_PI, rel=1e-13)

    def test_five_is_log_24(self):
        assert ln_gamma(5.0) == pytest.approx(LN_24, rel=1e-13)
        assert ln_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-13)

    def test_relative_error_against_mpmath(self):
        for x in np.logspace(-3, 3, 120):
            ref = float(mp.loggamma(mp.mpf(float(x))))
            if ref == 0.0:
                assert abs(ln_gamma(float(x))) < 1e-13
            else:
                assert abs(ln_gamma(float(x)) - ref) / abs(ref) < 1e-13

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
    def test_domain_errors(self, bad):
        with pytest.raises(ValueError):
            ln_gamma(bad)


class TestDigamma:
    def test_at_one_is_minus_gamma(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-12)

    def test_at_half(self):
        assert digamma(0.5) == pytest.approx(PSI_HALF, abs=1e-12)
        assert digamma(0.5) == pytest.approx(-EULER_GAMMA - 2.0 * math.log(2.0), abs=1e-12)

    def test_recurrence_psi4_minus_psi3(self):
        assert digamma(4.0) - digamma(3.0) == pytest.approx(1.0 / 3.0, abs=1e-13)

    def test_recurrence_random(self):
        rng = np.random.default_rng(42)
        for x in rng.uniform(0.01, 100.0, size=1000):
            assert digamma(x + 1.0) - digamma(x) == pytest.approx(1.0 / x, abs=1e-12)

    def test_reflection(self):
        rng = np.random.default_rng(7)
        for x in rng.uniform(0.01, 0.99, size=200):
            lhs = digamma(1.0 - x) - digamma(x)
            assert lhs == pytest.approx(math.pi / math.tan(math.pi * x), abs=1e-10)

    def test_absolute_error_against_mpmath(self):
        for x in np.logspace(-3, 3, 120):
            assert digamma(float(x)) == pytest.approx(
                float(mp.digamma(mp.mpf(float(x)))), abs=1e-12
            )

    def test_domain_error(self):
        with pytest.raises(ValueError):
            digamma(-0.5)


class TestSphereMeasure:
    def test_dimensions(self):
        assert sphere_measure(1) == pytest.approx(2.0, rel=1e-14)
        assert sphere_measure(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert sphere_measure(3) == pytest.approx(4.0 * math.pi, rel=1e-14)

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            sphere_measure(0)


class TestNormConst:
    def test_reference_point_is_inv_pi(self):
        assert norm_const(1, 0.5, 2.0) == pytest.approx(1.0 / math.pi, rel=1e-12)

    def test_low_branch_reduces_to_classical(self):
        assert norm_const(2, 0.3, 2.0) == pytest.approx(classical_norm_const(2, 0.3), rel=1e-12)

    def test_high_branch_reduces_to_classical(self):
        assert norm_const(1, 0.75, 2.0) == pytest.approx(classical_norm_const(1, 0.75), rel=1e-12)

    def test_branch_reduction_on_s_grid(self):
        for N in (1, 2, 3):
            for s in np.linspace(0.05, 0.95, 10):
                assert norm_const(N, float(s), 2.0) == pytest.approx(
                    classical_norm_const(N, float(s)), rel=1e-12
                )

    def test_invalid_arguments(self):
        for bad in ((1, 0.0, 2.0), (1, 1.0, 2.0), (1, 0.5, 1.0), (0, 0.5, 2.0)):
            with pytest.raises(ValueError):
                norm_const(*bad)


class TestLogNormConst:
    def test_reference_point(self):
        assert log_norm_const(1, 0.5, 2.0) == pytest.approx(2.0 - 2.0 * EULER_GAMMA, abs=1e-12)

    def test_is_log_derivative_of_norm_const(self):
        h = 1e-5
        fd = (math.log(norm_const(2, 0.3 + h, 3.0)) - math.log(norm_const(2, 0.3 - h, 3.0))) / (
            2.0 * h
        )
        assert fd == pytest.approx(log_norm_const(2, 0.3, 3.0), abs=1e-6)

    def test_log_derivative_on_sample_grid(self):
        h = 1e-5
        pts = [
            (N, s, p)
            for N in (1, 2)
            for s in (0.1, 0.2, 0.3, 0.41, 0.62, 0.7, 0.8, 0.85, 0.9, 0.95)
            for p in (1.5, 3.0)
            if abs(s - 0.5) > 2 * h
        ][:20]
        assert len(pts) == 20
        for N, s, p in pts:
            fd = (math.log(norm_const(N, s + h, p)) - math.log(norm_const(N, s - h, p))) / (2 * h)
            assert fd == pytest.approx(log_norm_const(N, s, p), abs=1e-6)

    def test_strictly_decreasing_in_s(self):
        assert log_norm_const(1, 0.2, 2.0) > log_norm_const(1, 0.8, 2.0)
        for N, p in ((1, 2.0), (2, 3.0), (3, 1.5)):
            vals = [log_norm_const(N, float(s), p) for s in np.linspace(0.02, 0.98, 25)]
            assert all(a > b for a, b in zip(vals, vals[1:]))


class TestClassicalConst:
    def test_c_value_dimension_one(self):
        c, _ = classical_const(1, 2.0)
        assert c == pytest.approx(1.0, rel=1e-13)

    def test_rho_dimension_two(self):
        # 2 ln 2 - 2 gamma, evaluated at 30 digits
        _, rho = classical_const(2, 2.0)
        assert rho == pytest.approx(0.2318630313168249, abs=1e-12)

    def test_rho_dimension_one(self):
        _, rho = classical_const(1, 2.0)
        assert rho == pytest.approx(-2.0 * EULER_GAMMA, abs=1e-12)
        assert rho == pytest.approx(-1.1544313298030657, abs=1e-12)


class TestBSignThreshold:
    def test_root_inside_interval(self):
        s0 = b_sign_threshold(1, 2.0)
        assert 0.5 < s0 < 1.0

    def test_root_brackets_sign_change(self):
        for N, p in ((1, 2.0), (2, 3.0), (3, 1.5)):
            s0 = b_sign_threshold(N, p)
            assert log_norm_const(N, s0 - 0.01, p) > 0.0
            assert log_norm_const(N, s0 + 0.01, p) < 0.0
            assert abs(log_norm_const(N, s0, p)) < 1e-12

    def test_b_nonnegative_below_threshold(self):
        s0 = b_sign_threshold(1, 2.0)
        for s in np.linspace(0.01, s0, 20):
            assert log_norm_const(1, float(s), 2.0) >= 0.0


class TestParams:
    def test_derived_quantities(self):
        prm = Params(1, 0.5, 2.0)
        assert prm.C == pytest.approx(1.0 / math.pi, rel=1e-12)
        assert prm.B == pytest.approx(2.0 - 2.0 * EULER_GAMMA, abs=1e-12)
        assert prm.omega == pytest.approx(2.0, rel=1e-14)
        assert prm.sp == 1.0
        assert prm.positivity_threshold == pytest.approx(math.exp(-1.0), rel=1e-14)

    def test_p_star(self):
        prm = Params(2, 0.4, 2.0)
        assert prm.p_star == pytest.approx(10.0 / 3.0, rel=1e-13)
        with pytest.raises(ValueError):
            Params(1, 0.5, 2.0).p_star

    @pytest.mark.parametrize(
        "N,s,p", [(0, 0.5, 2.0), (1, 0.0, 2.0), (1, 1.0, 2.0), (1, 0.5, 1.0), (1, -0.1, 2.0)]
    )
    def test_construction_fails(self, N, s, p):
        with pytest.raises(ValueError):
            Params(N, s, p)
