"""Self-contained special functions (log-Gamma, digamma) and the constants
built from them: the fractional normalization constant C(N, s, p), its
logarithmic s-derivative B(N, s, p), the classical s -> 0 pair
(C(N, p), rho(N, p)), the unit-sphere surface measure, and the sign-change
threshold of B.

Everything here is a pure function of its arguments; nothing is cached or
mutated, so concurrent use needs no coordination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "EULER_GAMMA",
    "Params",
    "ln_gamma",
    "digamma",
    "sphere_measure",
    "norm_const",
    "log_norm_const",
    "classical_const",
    "b_sign_threshold",
]

# Euler-Mascheroni constant, 20 digits.
EULER_GAMMA = 0.57721566490153286061

# Lanczos approximation, g = 7, 9 terms.  Gives ~15 significant digits of
# ln Gamma on the positive real axis.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Asymptotic digamma series: psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^2n).
# Coefficients are B_2n/(2n) for 2n = 2..14.
_DIGAMMA_ASYMP = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)

_DIGAMMA_SHIFT = 8.0


def _check_positive(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be a finite positive real, got {x!r}")
    return x


def ln_gamma(x: float) -> float:
    """Natural log of the Gamma function for x > 0.

    Lanczos approximation for x >= 0.5; for smaller arguments the recurrence
    ln Gamma(x) = ln Gamma(x+1) - ln x keeps full accuracy near 0.
    """
    x = _check_positive(x, "x")
    if x < 0.5:
        return ln_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    series = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2.0 * math.pi) + (z + 0.5) * math.log(t) - t + math.log(series)


def digamma(x: float) -> float:
    """Digamma psi(x) = d/dx ln Gamma(x) for x > 0.

    Upward recurrence shifts the argument above 8, then the Bernoulli
    asymptotic series applies (absolute error well below 1e-14 there).
    """
    x = _check_positive(x, "x")
    acc = 0.0
    while x < _DIGAMMA_SHIFT:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = 0.0
    power = inv2
    for c in _DIGAMMA_ASYMP:
        tail += c * power
        power *= inv2
    return acc + math.log(x) - 0.5 / x - tail


def sphere_measure(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2)."""
    if int(N) != N or N < 1:
        raise ValueError(f"dimension must be a positive integer, got {N!r}")
    N = int(N)
    return 2.0 * math.pi ** (N / 2.0) / math.exp(ln_gamma(N / 2.0))


def norm_const(N: int, s: float, p: float) -> float:
    """Normalization constant C(N, s, p) of the fractional p-Laplacian.

    Two-branch form: for s > 1/2,
        s p 2^{2(s-1)} Gamma((N+sp)/2) / (pi^{(N-1)/2} Gamma(1-s) Gamma((p+1)/2)),
    for s <= 1/2,
        s p 2^{2s-1} Gamma((N+sp)/2) / (pi^{N/2} Gamma(1-s)).
    Both branches reduce to the classical p = 2 constant
    s 2^{2s} Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)).
    """
    _validate_nsp(N, s, p)
    half = (N + s * p) / 2.0
    if s > 0.5:
        ln_val = (
            math.log(s * p)
            + 2.0 * (s - 1.0) * math.log(2.0)
            + ln_gamma(half)
            - 0.5 * (N - 1) * math.log(math.pi)
            - ln_gamma(1.0 - s)
            - ln_gamma((p + 1.0) / 2.0)
        )
    else:
        ln_val = (
            math.log(s * p)
            + (2.0 * s - 1.0) * math.log(2.0)
            + ln_gamma(half)
            - 0.5 * N * math.log(math.pi)
            - ln_gamma(1.0 - s)
        )
    return math.exp(ln_val)


def log_norm_const(N: int, s: float, p: float) -> float:
    """B(N, s, p) = d/ds ln C(N, s, p) = 2 ln 2 + 1/s + (p/2) psi((N+sp)/2) + psi(1-s).

    Strictly decreasing in s, +inf at s -> 0+ and -inf at s -> 1-.
    """
    _validate_nsp(N, s, p)
    return 2.0 * math.log(2.0) + 1.0 / s + 0.5 * p * digamma((N + s * p) / 2.0) + digamma(1.0 - s)


def classical_const(N: int, p: float) -> tuple[float, float]:
    """The s -> 0 limit pair (C(N, p), rho(N, p)) of the logarithmic p-Laplacian.

    C(N, p) = p Gamma(N/2) / (2 pi^{N/2}),  rho(N, p) = 2 ln 2 + (p/2) psi(N/2) - gamma.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"dimension must be a positive integer, got {N!r}")
    if not (p > 1.0):
        raise ValueError(f"exponent p must exceed 1, got {p!r}")
    N = int(N)
    c = p * math.exp(ln_gamma(N / 2.0)) / (2.0 * math.pi ** (N / 2.0))
    rho = 2.0 * math.log(2.0) + 0.5 * p * digamma(N / 2.0) - EULER_GAMMA
    return c, rho


def b_sign_threshold(N: int, p: float, tol: float = 1e-12, max_iter: int = 80) -> float:
    """Root s0 of B(N, s, p) in (1/2, 1), located by bisection.

    B is positive at s = 1/2 and tends to -inf at s -> 1-, so a sign change
    must exist on the bracket; failure to find one signals a constants bug.
    """
    lo, hi = 0.5, 1.0 - 1e-9
    f_lo = log_norm_const(N, lo, p)
    f_hi = log_norm_const(N, hi, p)
    if f_lo <= 0.0 or f_hi >= 0.0:
        raise ArithmeticError(
            f"B(N={N}, s, p={p}) does not change sign on [{lo}, {hi}]: "
            f"B({lo})={f_lo:.3e}, B({hi})={f_hi:.3e}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = log_norm_const(N, mid, p)
        if abs(f_mid) < tol:
            return mid
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
    raise ArithmeticError(
        f"bisection for the sign threshold of B(N={N}, ., p={p}) did not reach "
        f"|B| < {tol} within {max_iter} iterations"
    )


def _validate_nsp(N, s, p) -> None:
    if int(N) != N or N < 1:
        raise ValueError(f"dimension must be a positive integer, got {N!r}")
    if not (isinstance(s, (int, float)) and 0.0 < s < 1.0):
        raise ValueError(f"order s must lie in (0, 1), got {s!r}")
    if not (isinstance(p, (int, float)) and p > 1.0):
        raise ValueError(f"exponent p must exceed 1, got {p!r}")


@dataclass(frozen=True)
class Params:
    """Dimension/order/exponent triple (N, s, p); single source of truth for
    every derived constant.

    Derived accessors are plain properties so a Params can be passed around
    freely and interrogated anywhere without recomputation worries (each is a
    handful of special-function calls).
    """

    N: int
    s: float
    p: float

    def __post_init__(self):
        _validate_nsp(self.N, self.s, self.p)

    @property
    def sp(self) -> float:
        return self.s * self.p

    @property
    def C(self) -> float:
        return norm_const(self.N, self.s, self.p)

    @property
    def B(self) -> float:
        return log_norm_const(self.N, self.s, self.p)

    @property
    def omega(self) -> float:
        return sphere_measure(self.N)

    @property
    def p_star(self) -> float:
        """Critical exponent N p / (N - s p); only defined when N > s p."""
        if self.N <= self.sp:
            raise ValueError(
                f"critical exponent requires N > s*p (N={self.N}, s*p={self.sp})"
            )
        return self.N * self.p / (self.N - self.sp)

    @property
    def positivity_threshold(self) -> float:
        """Domain-diameter threshold e^{-1/(sp)} under which the full kernel is
        positive on the domain and the energy is nonnegative definite."""
        return math.exp(-1.0 / self.sp)

    @property
    def sign_change_radius(self) -> float:
        """Radius e^{B/p} at which the full kernel changes sign."""
        return math.exp(self.B / self.p)
