"""Pointwise principal-value evaluation of the fractional p-Laplacian, the
fractional logarithmic p-Laplacian and the order-zero logarithmic
p-Laplacian on smooth rapidly-decaying test functions.

All three operators are integrals of Phi_p(u(x) - u(y)) against a radial
kernel.  The principal value is handled by antipodal symmetrization: with
z = y - x, the average

    S(z) = (Phi_p(u(x) - u(x+z)) + Phi_p(u(x) - u(x-z))) / 2

is even in z and integrable against every kernel used here, for all p > 1.
The quadrature splits the radius into three zones:

  * (0, eps]              geometric levels eps 2^{-k}, summed innermost
                          first; S is evaluated from a second-order Taylor
                          expansion (gradient + Hessian at x), whose odd
                          third-order term cancels under symmetrization, so
                          the zone error is O(r^{p+2}) pointwise.  Direct
                          differences are useless here: below r ~ 1e-8 the
                          subtraction u(x) - u(x+z) is pure rounding noise
                          amplified by the kernel singularity.
  * [eps, R_out]          geometrically growing panels, direct differences,
                          Gauss-Legendre nodes per panel.
  * (R_out, inf)          closed-form constant tail Phi_p(u(x)) * kernel
                          annulus integral, exact where u vanishes.

The reported error estimate sums per-panel Gauss-Legendre differences at
two node counts, the Taylor/direct mismatch on the outermost inner level,
the truncated innermost remainder, and a bound on the neglected tail of u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .kernel import radial_log_integral, radial_power_integral
from .specfun import classical_const, log_norm_const, norm_const, sphere_measure

__all__ = [
    "TestFunction",
    "QuadratureSpec",
    "OperatorValue",
    "ToleranceNotMet",
    "eval_frac_plap",
    "eval_log_plap",
    "eval_log_plap_zero",
    "derivative_consistency",
    "small_s_limit_study",
    "gaussian",
    "bump",
    "odd_gaussian",
    "zero_function",
    "translate",
    "rescale_argument",
    "phi_p",
]


class ToleranceNotMet(RuntimeError):
    """Quadrature finished but its error estimate exceeds the target."""

    def __init__(self, value: float, estimate: float, target: float):
        super().__init__(
            f"quadrature error estimate {estimate:.3e} exceeds target {target:.3e}"
        )
        self.value = value
        self.estimate = estimate
        self.target = target


class OperatorValue(NamedTuple):
    value: float
    error: float


def phi_p(a, p: float):
    """Odd power Phi_p(a) = |a|^{p-2} a, with the removable value 0 at a = 0."""
    a = np.asarray(a, dtype=float)
    return np.sign(a) * np.abs(a) ** (p - 1.0)


@dataclass(frozen=True)
class TestFunction:
    """Analytic test function with consistent value/gradient/Hessian.

    ``value`` accepts arrays of points with shape (..., N); ``gradient`` and
    ``hessian`` are only ever called at single points.  ``support_radius`` is
    a radius about the origin outside which |u| < 1e-300 (finite even for
    Schwartz-class functions); ``smoothness_tag`` is "C2_compact" or
    "schwartz".
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    smoothness_tag: str
    ndim: int


@dataclass(frozen=True)
class QuadratureSpec:
    """Radial/angular quadrature controls.

    ``levels`` geometric levels grade the radius from ``inner_cutoff`` toward
    zero; the outer zone grows by octaves up to ``outer_radius`` (None means
    choose from the test function's support).  ``angular_nodes`` is the
    uniform circle count for N = 2 and the azimuthal count for N = 3 (must be
    even so the rule is antipodally symmetric); ``polar_nodes`` is the
    Gauss-Legendre count in the polar cosine for N = 3.
    """

    inner_cutoff: float = 1e-4
    outer_radius: float | None = None
    radial_nodes_per_level: int = 32
    levels: int = 40
    angular_nodes: int = 64
    polar_nodes: int = 16
    target_tol: float = 1e-6

    def __post_init__(self):
        if not (self.inner_cutoff > 0.0):
            raise ValueError("inner_cutoff must be positive")
        if self.outer_radius is not None and not (self.outer_radius > self.inner_cutoff):
            raise ValueError("outer_radius must exceed inner_cutoff")
        for name in ("radial_nodes_per_level", "levels", "angular_nodes", "polar_nodes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.angular_nodes % 2:
            raise ValueError("angular_nodes must be even (antipodal symmetry)")
        if not (self.target_tol > 0.0):
            raise ValueError("target_tol must be positive")


def _angular_rule(N: int, q: QuadratureSpec):
    """Directions (K, N), weights (K,) summing to omega_N, and the index map
    sending each direction to its antipode."""
    if N == 1:
        dirs = np.array([[1.0], [-1.0]])
        w = np.array([1.0, 1.0])
        anti = np.array([1, 0])
    elif N == 2:
        M = q.angular_nodes
        theta = 2.0 * np.pi * (np.arange(M) + 0.5) / M
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        w = np.full(M, 2.0 * np.pi / M)
        anti = (np.arange(M) + M // 2) % M
    elif N == 3:
        Mt, Mp = q.polar_nodes, q.angular_nodes
        t, wt = leggauss(Mt)
        phi = 2.0 * np.pi * (np.arange(Mp) + 0.5) / Mp
        sin_t = np.sqrt(1.0 - t**2)
        dirs = np.empty((Mt * Mp, 3))
        w = np.empty(Mt * Mp)
        anti = np.empty(Mt * Mp, dtype=int)
        for i in range(Mt):
            for j in range(Mp):
                k = i * Mp + j
                dirs[k] = (sin_t[i] * np.cos(phi[j]), sin_t[i] * np.sin(phi[j]), t[i])
                w[k] = wt[i] * 2.0 * np.pi / Mp
                anti[k] = (Mt - 1 - i) * Mp + (j + Mp // 2) % Mp
    else:
        raise ValueError(f"pointwise evaluation supports N in {{1, 2, 3}}, got {N}")
    return dirs, w, anti


def _stable_symmetric_pair(G: np.ndarray, Q: np.ndarray, p: float) -> np.ndarray:
    """(Phi_p(G - Q) - Phi_p(G + Q)) / 2 without catastrophic cancellation.

    G is the odd (gradient) part of the pairwise difference, Q the even
    (Hessian) part.  For |Q| << |G| both Phi terms nearly cancel; the expm1 /
    log1p route keeps full relative accuracy there.
    """
    if p == 2.0:
        return -np.asarray(Q, dtype=float)
    G = np.asarray(G, dtype=float)
    Q = np.asarray(Q, dtype=float)
    out = np.zeros(np.broadcast(G, Q).shape)
    absG = np.abs(G)
    absQ = np.abs(Q)
    delicate = (absQ * 2.0 < absG) & (absQ > 0.0)
    direct = ~delicate & (absQ > 0.0)
    if np.any(delicate):
        g = G[delicate]
        w = Q[delicate] / g
        pm1 = p - 1.0
        diff = np.expm1(pm1 * np.log1p(-w)) - np.expm1(pm1 * np.log1p(w))
        out[delicate] = 0.5 * np.sign(g) * np.abs(g) ** pm1 * diff
    if np.any(direct):
        a = G[direct] - Q[direct]
        b = G[direct] + Q[direct]
        out[direct] = 0.5 * (phi_p(a, p) - phi_p(b, p))
    return out


def _phi_perturbation_bound(base: float, m: float, p: float) -> float:
    """Upper bound for |Phi_p(base - e) - Phi_p(base)| over |e| <= m."""
    if m == 0.0:
        return 0.0
    if p >= 2.0:
        return (p - 1.0) * (abs(base) + m) ** (p - 2.0) * m
    return 2.0 ** (2.0 - p) * m ** (p - 1.0)


def _panel_edges(inner: Sequence[tuple], outer: Sequence[tuple]):
    return list(inner) + list(outer)


class _Quadrature:
    """Shared machinery: zones, node sets, symmetrized integrand evaluation."""

    def __init__(self, u: TestFunction, x: np.ndarray, p: float, q: QuadratureSpec):
        if u.ndim != x.size:
            raise ValueError(f"test function has ndim={u.ndim} but point has size {x.size}")
        self.u = u
        self.x = x
        self.N = x.size
        self.p = p
        self.q = q
        self.dirs, self.w_ang, self.anti = _angular_rule(self.N, q)
        self.ux = float(np.asarray(u.value(x[None, :])).reshape(()))
        self.grad = np.asarray(u.gradient(x), dtype=float).reshape(self.N)
        hess = np.asarray(u.hessian(x), dtype=float).reshape(self.N, self.N)
        self.g_dot = self.dirs @ self.grad
        self.h_quad = np.einsum("ki,ij,kj->k", self.dirs, hess, self.dirs)
        n = q.radial_nodes_per_level
        self.nodes_hi = leggauss(n)
        self.nodes_lo = leggauss(max(n // 2, 2))
        self.outer_radius = q.outer_radius if q.outer_radius is not None else self._default_outer()

    def _default_outer(self) -> float:
        reach = float(np.linalg.norm(self.x))
        supp = self.u.support_radius
        if self.u.smoothness_tag == "schwartz":
            supp = min(supp, 12.0)
        return supp + reach

    # -- integrand values ---------------------------------------------------

    def _sym_direct(self, r: np.ndarray) -> np.ndarray:
        """Symmetrized Phi_p differences at radii r (n,) for all directions:
        returns (n, K)."""
        pts = self.x[None, None, :] + r[:, None, None] * self.dirs[None, :, :]
        vals = np.asarray(self.u.value(pts), dtype=float)
        delta = self.ux - vals
        ph = phi_p(delta, self.p)
        return 0.5 * (ph + ph[:, self.anti])

    def _sym_taylor(self, r: np.ndarray) -> np.ndarray:
        G = r[:, None] * self.g_dot[None, :]
        Q = 0.5 * r[:, None] ** 2 * self.h_quad[None, :]
        return _stable_symmetric_pair(G, Q, self.p)

    def _panel(self, a: float, b: float, radial_weight, use_taylor: bool,
               shift_from: float | None) -> tuple:
        """Integrate one radial panel with the high and low node counts.

        ``shift_from``: if set, subtract Phi_p(u(x)) from the angular average
        for radii >= shift_from (the far-field renormalization of the
        order-zero operator).
        """
        out = []
        for xs, ws in (self.nodes_hi, self.nodes_lo):
            r = 0.5 * (b - a) * xs + 0.5 * (b + a)
            wr = 0.5 * (b - a) * ws
            S = self._sym_taylor(r) if use_taylor else self._sym_direct(r)
            ang = S @ self.w_ang
            if shift_from is not None:
                mask = r >= shift_from
                if np.any(mask):
                    ang = ang - np.where(mask, phi_p(self.ux, self.p) * self.w_ang.sum(), 0.0)
            contrib = wr * (r ** (self.N - 1)) * radial_weight(r) * ang
            out.append(float(np.sum(contrib)))
        return out[0], out[1]

    def integrate(self, radial_weight, tail_value: float, tail_kernel_mass: float,
                  shift_from: float | None = None) -> OperatorValue:
        """Run all zones.  ``radial_weight(r)`` is the kernel without the
        r^{N-1} surface factor; ``tail_value`` the closed-form constant tail;
        ``tail_kernel_mass`` = integral of |kernel| r^{N-1} omega_N over
        (R_out, inf), used to bound the error from treating u as zero there.
        """
        q = self.q
        eps = q.inner_cutoff
        err = 0.0

        # inner zone, innermost level first
        inner_edges = [(eps * 2.0 ** -(k + 1), eps * 2.0**-k) for k in range(q.levels)]
        inner_edges.reverse()
        inner_contribs = []
        for a, b in inner_edges:
            hi, lo = self._panel(a, b, radial_weight, use_taylor=True, shift_from=shift_from)
            inner_contribs.append(hi)
            err += abs(hi - lo)
        inner_sum = math.fsum(inner_contribs)

        # truncated remainder below the innermost level, estimated from the
        # geometric decay of the two deepest levels
        if len(inner_contribs) >= 2:
            last, prev = abs(inner_contribs[0]), abs(inner_contribs[1])
            ratio = last / prev if prev > 0 else 0.0
            err += last * (ratio / (1.0 - ratio) if ratio < 0.95 else 20.0)
        elif inner_contribs:
            err += abs(inner_contribs[0])

        # Taylor-vs-direct mismatch, dominated by the outermost inner level
        a, b = inner_edges[-1]
        hi_t, _ = self._panel(a, b, radial_weight, use_taylor=True, shift_from=shift_from)
        hi_d, _ = self._panel(a, b, radial_weight, use_taylor=False, shift_from=shift_from)
        err += 2.0 * abs(hi_t - hi_d)

        # outer zone: octave panels with forced breakpoints
        breaks = {eps, self.outer_radius}
        if shift_from is not None and eps < shift_from < self.outer_radius:
            breaks.add(shift_from)
        r = eps
        while r * 2.0 < self.outer_radius:
            r *= 2.0
            breaks.add(r)
        edges = sorted(breaks)
        outer_sum = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            hi, lo = self._panel(a, b, radial_weight, use_taylor=False, shift_from=shift_from)
            outer_sum += hi
            err += abs(hi - lo)

        # neglected-u tail bound: sample |u| on a few spheres beyond R_out
        m = 0.0
        for fac in (1.0, 1.5, 2.0, 4.0):
            pts = self.x[None, :] + fac * self.outer_radius * self.dirs
            m = max(m, float(np.max(np.abs(self.u.value(pts)))))
        err += _phi_perturbation_bound(self.ux, m, self.p) * abs(tail_kernel_mass)

        total = inner_sum + outer_sum + tail_value
        # safety factor: the panel differences track but slightly trail the
        # true Gauss-Legendre error
        return OperatorValue(total, 2.0 * err + 1e-16 * abs(total))


def _prepare(u: TestFunction, x, p: float, q: QuadratureSpec | None) -> tuple:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1:
        raise ValueError("evaluation point must be a flat coordinate array")
    if not (p > 1.0):
        raise ValueError(f"exponent p must exceed 1, got {p!r}")
    return x, q if q is not None else QuadratureSpec()


def eval_frac_plap(u: TestFunction, x, t: float, p: float,
                   q: QuadratureSpec | None = None) -> OperatorValue:
    """Fractional p-Laplacian of order t at x:
    C(N,t,p) P.V. integral of Phi_p(u(x)-u(y)) |x-y|^{-N-tp} dy."""
    x, q = _prepare(u, x, p, q)
    if not (0.0 < t < 1.0):
        raise ValueError(f"order t must lie in (0, 1), got {t!r}")
    N = x.size
    C = norm_const(N, t, p)
    tp = t * p
    omega = sphere_measure(N)
    work = _Quadrature(u, x, p, q)
    R = work.outer_radius
    tail_mass = C * omega * radial_power_integral(tp, R, math.inf)
    tail = float(phi_p(work.ux, p)) * tail_mass
    result = work.integrate(lambda r: C * r ** (-N - tp), tail, tail_mass)
    if result.error > q.target_tol:
        raise ToleranceNotMet(result.value, result.error, q.target_tol)
    return result


def eval_log_plap(u: TestFunction, x, s: float, p: float,
                  q: QuadratureSpec | None = None) -> OperatorValue:
    """Fractional logarithmic p-Laplacian at order s: the integral of
    Phi_p(u(x)-u(y)) against the full kernel C (B - p ln r) r^{-N-sp}."""
    x, q = _prepare(u, x, p, q)
    if not (0.0 < s < 1.0):
        raise ValueError(f"order s must lie in (0, 1), got {s!r}")
    N = x.size
    C = norm_const(N, s, p)
    B = log_norm_const(N, s, p)
    sp = s * p
    omega = sphere_measure(N)
    work = _Quadrature(u, x, p, q)
    R = work.outer_radius
    tail_mass = C * omega * (
        B * radial_power_integral(sp, R, math.inf)
        - p * radial_log_integral(sp, R, math.inf)
    )
    abs_tail_mass = C * omega * (
        abs(B) * radial_power_integral(sp, R, math.inf)
        + p * abs(radial_log_integral(sp, R, math.inf))
    )
    tail = float(phi_p(work.ux, p)) * tail_mass

    def radial_weight(r):
        return C * (B - p * np.log(r)) * r ** (-N - sp)

    result = work.integrate(radial_weight, tail, abs_tail_mass)
    if result.error > q.target_tol:
        raise ToleranceNotMet(result.value, result.error, q.target_tol)
    return result


def eval_log_plap_zero(u: TestFunction, x, p: float,
                       q: QuadratureSpec | None = None) -> OperatorValue:
    """Order-zero logarithmic p-Laplacian: principal value of Phi_p over the
    unit ball, the renormalized difference Phi_p(u(x)-u(y)) - Phi_p(u(x))
    outside it (both against C(N,p)|x-y|^{-N}), plus rho(N,p) Phi_p(u(x))."""
    x, q = _prepare(u, x, p, q)
    N = x.size
    Cnp, rho = classical_const(N, p)
    work = _Quadrature(u, x, p, q)
    if work.outer_radius <= 1.0:
        work.outer_radius = 2.0  # the far-field split needs R_out > 1
    R = work.outer_radius
    # beyond R_out the renormalized integrand vanishes where u does; bound the
    # leftover with the same perturbation machinery over one extra octave
    tail_kernel_mass = Cnp * sphere_measure(N) * math.log(2.0)
    result = work.integrate(
        lambda r: Cnp * r ** (-float(N)),
        0.0,
        tail_kernel_mass,
        shift_from=1.0,
    )
    value = result.value + rho * float(phi_p(work.ux, p))
    if result.error > q.target_tol:
        raise ToleranceNotMet(value, result.error, q.target_tol)
    return OperatorValue(value, result.error)


@dataclass(frozen=True)
class DerivativeRow:
    h: float
    fd_value: float
    direct_value: float
    abs_err: float


@dataclass(frozen=True)
class DerivativeStudy:
    rows: tuple
    slope: float
    reliable: bool

    def as_dict(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "slope": self.slope,
            "reliable": self.reliable,
        }


def derivative_consistency(u: TestFunction, x, s: float, h_list: Sequence[float],
                           p: float, q: QuadratureSpec | None = None) -> DerivativeStudy:
    """Central differences of the fractional p-Laplacian in its order versus
    the direct logarithmic operator, over a decreasing step list.

    The least-squares slope of log(error) against log(h) sits near 2 when the
    quadrature error is below the finite-difference floor; ``reliable`` is
    False when it is not.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h_list = list(h_list)
    if any(h2 >= h1 for h1, h2 in zip(h_list, h_list[1:])):
        raise ValueError("h_list must be strictly decreasing")
    if any(not (0.0 < s - h and s + h < 1.0) for h in h_list):
        raise ValueError("every s +/- h must stay inside (0, 1)")
    direct = eval_log_plap(u, x, s, p, q)
    rows = []
    for h in h_list:
        hi = eval_frac_plap(u, x, s + h, p, q)
        lo = eval_frac_plap(u, x, s - h, p, q)
        fd = (hi.value - lo.value) / (2.0 * h)
        rows.append(DerivativeRow(h, fd, direct.value, abs(fd - direct.value)))
    errs = np.array([r.abs_err for r in rows])
    hs = np.array(h_list)
    ok = errs > 0
    if ok.sum() >= 2:
        slope = float(np.polyfit(np.log(hs[ok]), np.log(errs[ok]), 1)[0])
    else:
        slope = float("nan")
    # the quadrature grid is shared across orders, so its error is smooth in
    # the order and mostly cancels in the central difference; the measured
    # |fd - direct| bottoms out at the direct value's own error
    reliable = bool(np.all(errs > 3.0 * direct.error))
    return DerivativeStudy(tuple(rows), slope, reliable)


def small_s_limit_study(u: TestFunction, points: Sequence, s_list: Sequence[float],
                        p: float, q: QuadratureSpec | None = None) -> list:
    """Sup over the given points of |log-plap at order s - order-zero limit|,
    tabulated over a decreasing list of small orders."""
    s_list = list(s_list)
    if any(not (0.0 < s <= 0.2) for s in s_list):
        raise ValueError("orders must lie in (0, 0.2]")
    if any(s2 >= s1 for s1, s2 in zip(s_list, s_list[1:])):
        raise ValueError("s_list must be strictly decreasing")
    base = [eval_log_plap_zero(u, pt, p, q).value for pt in points]
    table = []
    for s in s_list:
        sup_err = 0.0
        for pt, b in zip(points, base):
            val = eval_log_plap(u, pt, s, p, q).value
            sup_err = max(sup_err, abs(val - b))
        table.append((s, sup_err))
    return table


# -- test function factories -------------------------------------------------


def gaussian(ndim: int = 1, sigma: float = 1.0, center=None) -> TestFunction:
    """exp(-|x - c|^2 / (2 sigma^2)); Schwartz class."""
    c = np.zeros(ndim) if center is None else np.asarray(center, dtype=float)
    s2 = sigma * sigma

    def value(pts):
        pts = np.asarray(pts, dtype=float)
        d = pts - c
        return np.exp(-0.5 * np.sum(d * d, axis=-1) / s2)

    def grad(x):
        x = np.asarray(x, dtype=float)
        return -(x - c) / s2 * value(x[None, :])[0]

    def hess(x):
        x = np.asarray(x, dtype=float)
        d = (x - c) / s2
        return (np.outer(d, d) - np.eye(ndim) / s2) * value(x[None, :])[0]

    radius = 37.2 * sigma + float(np.linalg.norm(c))
    return TestFunction(value, grad, hess, radius, "schwartz", ndim)


def bump(ndim: int = 1, radius: float = 1.0, center=None) -> TestFunction:
    """(1 - |y|^2)^3 on |y| < 1 with y = (x - c)/radius; C^2 with compact support."""
    c = np.zeros(ndim) if center is None else np.asarray(center, dtype=float)
    R = float(radius)

    def value(pts):
        pts = np.asarray(pts, dtype=float)
        y2 = np.sum((pts - c) ** 2, axis=-1) / (R * R)
        w = np.maximum(1.0 - y2, 0.0)
        return w**3

    def grad(x):
        y = (np.asarray(x, dtype=float) - c) / R
        w = 1.0 - float(y @ y)
        if w <= 0.0:
            return np.zeros(ndim)
        return -6.0 * y * w * w / R

    def hess(x):
        y = (np.asarray(x, dtype=float) - c) / R
        w = 1.0 - float(y @ y)
        if w <= 0.0:
            return np.zeros((ndim, ndim))
        return (24.0 * np.outer(y, y) * w - 6.0 * np.eye(ndim) * w * w) / (R * R)

    return TestFunction(value, grad, hess, R + float(np.linalg.norm(c)), "C2_compact", ndim)


def odd_gaussian(ndim: int = 1) -> TestFunction:
    """x_1 exp(-|x|^2); odd in x_1, Schwartz class."""

    def value(pts):
        pts = np.asarray(pts, dtype=float)
        return pts[..., 0] * np.exp(-np.sum(pts * pts, axis=-1))

    def grad(x):
        x = np.asarray(x, dtype=float)
        g = np.exp(-float(x @ x))
        e1 = np.zeros(ndim)
        e1[0] = 1.0
        return g * (e1 - 2.0 * x * x[0])

    def hess(x):
        x = np.asarray(x, dtype=float)
        g = np.exp(-float(x @ x))
        e1 = np.zeros(ndim)
        e1[0] = 1.0
        h = 4.0 * np.outer(x, x) * x[0] - 2.0 * (np.outer(e1, x) + np.outer(x, e1))
        h -= 2.0 * np.eye(ndim) * x[0]
        return g * h

    return TestFunction(value, grad, hess, 27.5, "schwartz", ndim)


def zero_function(ndim: int = 1) -> TestFunction:
    def value(pts):
        pts = np.asarray(pts, dtype=float)
        return np.zeros(pts.shape[:-1])

    return TestFunction(
        value,
        lambda x: np.zeros(ndim),
        lambda x: np.zeros((ndim, ndim)),
        1.0,
        "C2_compact",
        ndim,
    )


def translate(u: TestFunction, shift) -> TestFunction:
    """u(. - shift)."""
    shift = np.asarray(shift, dtype=float)

    return TestFunction(
        lambda pts: u.value(np.asarray(pts, dtype=float) - shift),
        lambda x: u.gradient(np.asarray(x, dtype=float) - shift),
        lambda x: u.hessian(np.asarray(x, dtype=float) - shift),
        u.support_radius + float(np.linalg.norm(shift)),
        u.smoothness_tag,
        u.ndim,
    )


def rescale_argument(u: TestFunction, lam: float) -> TestFunction:
    """v(x) = u(x / lam)."""
    lam = float(lam)

    return TestFunction(
        lambda pts: u.value(np.asarray(pts, dtype=float) / lam),
        lambda x: u.gradient(np.asarray(x, dtype=float) / lam) / lam,
        lambda x: u.hessian(np.asarray(x, dtype=float) / lam) / (lam * lam),
        u.support_radius * lam,
        u.smoothness_tag,
        u.ndim,
    )
