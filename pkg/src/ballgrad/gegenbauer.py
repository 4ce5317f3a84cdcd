"""Gegenbauer (ultraspherical), Legendre, and associated Legendre polynomials.

Evaluation is recurrence-based by default; the explicit finite sum is kept as
an independent cross-check. Gamma-ratio constants are computed through
log-Gamma so they stay finite for large arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "GegenbauerIndex",
    "DimensionParams",
    "SeriesConvergenceError",
    "pochhammer",
    "gamma_ratio",
    "eval_explicit",
    "eval_recurrence",
    "eval_sequence",
    "derivative",
    "legendre",
    "assoc_legendre",
    "series_cutoff",
]

# slack for arguments that should lie in [-1, 1] but carry rounding noise
# (e.g. cos*cos + sin*sin*cos combinations)
_ARG_TOL = 1e-12


class SeriesConvergenceError(RuntimeError):
    """A power series failed to meet its tail tolerance within the term cap."""

    def __init__(self, message: str, terms: int, tail_estimate: float):
        super().__init__(message)
        self.terms = terms
        self.tail_estimate = tail_estimate


@dataclass(frozen=True)
class GegenbauerIndex:
    """Index pair (lam, degree) of the ultraspherical polynomial C_degree^lam."""

    lam: float
    degree: int

    def __post_init__(self):
        if not self.lam > -0.5:
            raise ValueError(f"lam must exceed -1/2, got {self.lam}")
        if self.degree < 0:
            raise ValueError(f"degree must be nonnegative, got {self.degree}")


@dataclass(frozen=True)
class DimensionParams:
    """Ambient dimension n >= 3 with the polynomial orders and normalization it induces."""

    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"dimension must be at least 3, got {self.n}")

    @property
    def lambda_low(self) -> float:
        return (self.n - 2) / 2.0

    @property
    def lambda_mid(self) -> float:
        return self.n / 2.0

    @property
    def lambda_high(self) -> float:
        return (self.n + 2) / 2.0

    @property
    def c_n(self) -> float:
        """Normalization 2*Gamma((n+2)/2) / (Gamma(1/2)*Gamma((n-1)/2))."""
        n = self.n
        return 2.0 * gamma_ratio(((n + 2) / 2.0,), (0.5, (n - 1) / 2.0))


def pochhammer(lam: float, k: int) -> float:
    """Shifted factorial (lam)_k = lam*(lam+1)*...*(lam+k-1), with (lam)_0 = 1."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    out = 1.0
    for j in range(k):
        out *= lam + j
    if math.isinf(out):
        raise OverflowError(f"pochhammer({lam}, {k}) exceeds the double range")
    return out


def gamma_ratio(numer, denom) -> float:
    """prod Gamma(numer) / prod Gamma(denom) via log-Gamma; arguments must be positive."""
    s = sum(math.lgamma(a) for a in numer) - sum(math.lgamma(b) for b in denom)
    return math.exp(s)


def _clipped(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + _ARG_TOL):
        raise ValueError("polynomial argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _recurrence(lam: float, k: int, x):
    """C_k^lam(x) by the three-term recurrence; x scalar or ndarray, no lam guard."""
    x = np.asarray(x, dtype=float)
    c_prev = np.ones_like(x)
    if k == 0:
        return c_prev
    c_cur = 2.0 * lam * x
    for m in range(2, k + 1):
        c_prev, c_cur = c_cur, (
            2.0 * (m + lam - 1.0) * x * c_cur - (m + 2.0 * lam - 2.0) * c_prev
        ) / m
    return c_cur


def eval_explicit(idx: GegenbauerIndex, x: float) -> float:
    """Finite-sum form of C_k^lam(x), as an independent oracle for the recurrence.

    The alternating sum cancels catastrophically in floating point for large
    degree near |x| = 1, so it is accumulated in exact rational arithmetic and
    rounded once at the end.
    """
    lam, k = idx.lam, idx.degree
    xv = float(_clipped(x))
    lam_q = Fraction(lam)
    two_x = 2 * Fraction(xv)
    total = Fraction(0)
    for j in range(k // 2 + 1):
        poch = Fraction(1)
        for i in range(k - j):
            poch *= lam_q + i
        term = poch * two_x ** (k - 2 * j) / (math.factorial(j) * math.factorial(k - 2 * j))
        total += -term if j % 2 else term
    return float(total)


def eval_recurrence(idx: GegenbauerIndex, x: float) -> float:
    """C_k^lam(x) by the numerically stable three-term recurrence."""
    return float(_recurrence(idx.lam, idx.degree, _clipped(x)))


def eval_sequence(lam: float, K: int, x) -> np.ndarray:
    """All of C_0^lam(x), ..., C_K^lam(x) in one recurrence pass.

    x may be a scalar or ndarray; the leading axis of the result indexes the degree.
    """
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    xa = _clipped(x)
    out = np.empty((K + 1,) + xa.shape)
    out[0] = 1.0
    if K >= 1:
        out[1] = 2.0 * lam * xa
    for m in range(2, K + 1):
        out[m] = (2.0 * (m + lam - 1.0) * xa * out[m - 1]
                  - (m + 2.0 * lam - 2.0) * out[m - 2]) / m
    return out


def derivative(idx: GegenbauerIndex, order: int, x: float) -> float:
    """m-th derivative of C_k^lam at x: 2^m (lam)_m C_{k-m}^{lam+m}(x); 0 for m > k."""
    if order < 0:
        raise ValueError(f"derivative order must be nonnegative, got {order}")
    if order > idx.degree:
        return 0.0
    if order == 0:
        return eval_recurrence(idx, x)
    lam, k = idx.lam, idx.degree
    scale = (2.0 ** order) * pochhammer(lam, order)
    return scale * float(_recurrence(lam + order, k - order, _clipped(x)))


def legendre(k: int, x: float) -> float:
    """Legendre polynomial P_k(x) = C_k^{1/2}(x)."""
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    return float(_recurrence(0.5, k, _clipped(x)))


def assoc_legendre(k: int, j: int, x: float) -> float:
    """Associated Legendre function (-1)^j (1-x^2)^{j/2} d^j/dx^j P_k(x)."""
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got j={j}, k={k}")
    if j == 0:
        return legendre(k, x)
    xv = float(_clipped(x))
    dj = derivative(GegenbauerIndex(0.5, k), j, xv)
    return ((-1.0) ** j) * (1.0 - xv * xv) ** (j / 2.0) * dj


def series_cutoff(rho: float, lam: float, control) -> int:
    """Truncation index for series with terms bounded by C_k^lam(1)-type growth.

    Since |C_k^lam| <= C_k^lam(1) ~ k^(2*lam-1), the tail of a rho-power series
    is controlled once rho^K (K+1)^max(2*lam-1, 0) drops below the tail
    tolerance; returns the first such K >= 8. `control` needs attributes
    max_terms and tail_tol.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    if rho == 0.0:
        return 0
    p = max(2.0 * lam - 1.0, 0.0)
    K = 8
    power = rho ** K
    while power * (K + 1.0) ** p >= control.tail_tol:
        K += 1
        power *= rho
        if K > control.max_terms:
            raise SeriesConvergenceError(
                f"series tail still above {control.tail_tol:g} after "
                f"{control.max_terms} terms (rho={rho}, lam={lam})",
                terms=K,
                tail_estimate=power * (K + 1.0) ** p,
            )
    return K
