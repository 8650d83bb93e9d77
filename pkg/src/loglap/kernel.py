"""Radial kernel of the fractional logarithmic p-Laplacian.

The full kernel is K(r) = C (B - p ln r) / r^{N+sp} with C = C(N,s,p) and
B = B(N,s,p).  It splits into a pure fractional piece and the positive and
negative logarithmic parts

    K(r) = B C r^{-N-sp} + p k_plus(r) - p k_minus(r),
    k_plus(r)  = C (-ln r)_+ / r^{N+sp},
    k_minus(r) = C (-ln r)_- / r^{N+sp},

changes sign at r* = e^{B/p}, and obeys the scale-breaking commutator
identity r K'(r) + (N+sp) K(r) = -p C r^{-N-sp}.

The closed-form radial antiderivatives

    F_pow(r) = -r^{-sp}/(sp),            d/dr F_pow = r^{-1-sp},
    F_log(r) = -r^{-sp}(ln r/(sp) + 1/(sp)^2),   d/dr F_log = r^{-1-sp} ln r,

give exact annulus integrals of every kernel part; they are used as
quadrature tails, killing-measure radial factors and test oracles throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import Params

__all__ = [
    "KernelSpec",
    "kernel_full",
    "kernel_parts",
    "sign_change_radius",
    "commutator_residual",
    "annulus_integral",
    "radial_power_integral",
    "radial_log_integral",
    "radial_part_integral",
]

# Below this radius the power factor is evaluated in log space to dodge
# overflow of r^{-N-sp}.
_LOG_SPACE_RADIUS = 1e-3


@dataclass(frozen=True)
class KernelSpec:
    """Immutable kernel evaluator for one (N, s, p) triple.

    Caches C and B and exposes the two geometric thresholds: the kernel's
    sign-change radius r* = e^{B/p} and the domain-diameter threshold
    e^{-1/(sp)} below which K > 0 on all pair distances.
    """

    params: Params
    C: float = field(init=False)
    B: float = field(init=False)
    r_star: float = field(init=False)
    e_inv: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "C", self.params.C)
        object.__setattr__(self, "B", self.params.B)
        object.__setattr__(self, "r_star", math.exp(self.B / self.params.p))
        object.__setattr__(self, "e_inv", math.exp(-1.0 / self.params.sp))


def _check_radius(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
        raise ValueError("radius must be finite and positive")
    return r


def _power_factor(r: np.ndarray, exponent: float) -> np.ndarray:
    """r**(-exponent), via exp(-exponent*ln r) for very small r."""
    out = np.empty_like(r)
    small = r < _LOG_SPACE_RADIUS
    out[~small] = r[~small] ** (-exponent)
    if np.any(small):
        out[small] = np.exp(-exponent * np.log(r[small]))
    return out


def kernel_full(spec: KernelSpec, r) -> np.ndarray | float:
    """Full kernel C (B - p ln r) r^{-N-sp}; scalar in, scalar out."""
    rr = _check_radius(r)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    prm = spec.params
    numer = spec.B - prm.p * np.log(rr)
    out = spec.C * numer * _power_factor(rr, prm.N + prm.sp)
    return float(out[0]) if scalar else out


def kernel_parts(spec: KernelSpec, r) -> tuple:
    """Positive/negative logarithmic parts (k_plus, k_minus); at most one of
    the two is nonzero at any radius and both are >= 0."""
    rr = _check_radius(r)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    prm = spec.params
    neg_log = -np.log(rr)
    power = _power_factor(rr, prm.N + prm.sp)
    k_plus = spec.C * np.maximum(neg_log, 0.0) * power
    k_minus = spec.C * np.maximum(-neg_log, 0.0) * power
    if scalar:
        return float(k_plus[0]), float(k_minus[0])
    return k_plus, k_minus


def sign_change_radius(spec: KernelSpec) -> float:
    """Radius e^{B/p} where the kernel numerator B - p ln r vanishes."""
    return spec.r_star


def commutator_residual(spec: KernelSpec, r) -> np.ndarray | float:
    """Residual of r K'(r) + (N+sp) K(r) + p C r^{-N-sp}, relative to the
    scale p C r^{-N-sp}.

    K'(r) is the analytic derivative -(N+sp) K(r)/r - p C r^{-N-sp-1}; the
    residual must vanish up to floating-point cancellation at every radius.
    """
    rr = _check_radius(r)
    scalar = rr.ndim == 0
    rr = np.atleast_1d(rr)
    prm = spec.params
    nsp = prm.N + prm.sp
    k = np.atleast_1d(kernel_full(spec, rr))
    scale = prm.p * spec.C * _power_factor(rr, nsp)
    k_prime = -nsp * k / rr - scale / rr
    resid = (rr * k_prime + nsp * k + scale) / scale
    return float(resid[0]) if scalar else resid


def radial_power_integral(theta_p: float, a: float, b: float) -> float:
    """Exact integral of r^{-1-theta_p} over [a, b], 0 < a < b <= inf."""
    if not (0.0 < a < b):
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    upper = 0.0 if math.isinf(b) else -b ** (-theta_p) / theta_p
    return upper + a ** (-theta_p) / theta_p


def radial_log_integral(theta_p: float, a: float, b: float) -> float:
    """Exact integral of r^{-1-theta_p} ln r over [a, b], 0 < a < b <= inf."""
    if not (0.0 < a < b):
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")

    def prim(r: float) -> float:
        return -r ** (-theta_p) * (math.log(r) / theta_p + 1.0 / theta_p**2)

    upper = 0.0 if math.isinf(b) else prim(b)
    return upper - prim(a)


def annulus_integral(spec: KernelSpec, R1: float, R2: float, mode: str) -> float:
    """omega_N * integral over [R1, R2] of r^{-1-sp} (mode "pow") or
    r^{-1-sp} ln r (mode "log").

    These are the radial annulus integrals of the pure fractional and
    logarithmic kernel factors; R2 may be +inf.  R1 = 0 is rejected: the
    integrand is non-integrable at the origin for every sp > 0.
    """
    if mode not in ("pow", "log"):
        raise ValueError(f"mode must be 'pow' or 'log', got {mode!r}")
    if not (R1 >= 0.0 and R2 > R1):
        raise ValueError(f"need 0 <= R1 < R2, got R1={R1}, R2={R2}")
    if R1 == 0.0:
        raise ValueError(
            "annulus integral from radius 0 diverges: the radial integrand "
            "r^{-1-sp} (optionally times ln r) is non-integrable at 0"
        )
    prm = spec.params
    if mode == "pow":
        return prm.omega * radial_power_integral(prm.sp, R1, R2)
    return prm.omega * radial_log_integral(prm.sp, R1, R2)


def radial_part_integral(params: Params, part: str, a: float, b: float) -> float:
    """Exact integral over [a, b] of r^{N-1} * kernel_part(r), i.e. the radial
    factor left after integrating a kernel part over a spherical shell.

    Parts: "frac" is the pure power r^{-N-sp} (no constant), "plus"/"minus"
    the signed logarithmic parts (with C), "full" the complete kernel.
    Supports b = +inf; requires a > 0.
    """
    if not (0.0 < a < b):
        raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
    sp = params.sp
    if part == "frac":
        return radial_power_integral(sp, a, b)
    C = params.C
    if part == "plus":
        hi = min(b, 1.0)
        if a >= 1.0:
            return 0.0
        return -C * radial_log_integral(sp, a, hi)
    if part == "minus":
        lo = max(a, 1.0)
        if b <= 1.0:
            return 0.0
        return C * radial_log_integral(sp, lo, b)
    if part == "full":
        return C * (
            params.B * radial_power_integral(sp, a, b)
            - params.p * radial_log_integral(sp, a, b)
        )
    raise ValueError(f"unknown kernel part {part!r}")
