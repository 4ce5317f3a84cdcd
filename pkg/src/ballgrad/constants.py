"""Sharp directional-derivative constants for bounded harmonic functions on
the unit ball.

The directional constant C(rho*e1, l_alpha) is computed by three independent
routes that cross-validate each other:

* constant_direct   -- the double-integral representation, by nested
                       Gauss-Legendre quadrature after trigonometric
                       substitution;
* constant_series   -- the ultraspherical-expansion representation: two kink
                       integrals plus a rho-power series;
* constant_radial   -- the closed one-dimensional formula for the radial
                       direction (alpha = 0).

On top of these sit the convexity profile in t = cos(alpha), its second
derivative by a series route and by an integral-kernel route, the pointwise
nonnegative kernel density behind the convexity proof, and the two
certification sweeps (convexity of the profile, maximality of the radial
direction).

Every integrand is integrated in angle variables (x = cos(theta)), which
keeps all weight factors analytic; integrals with a (1 - 2*rho*z + rho^2)
denominator additionally get geometrically graded panels toward the
endpoints once rho >= 0.8, where that factor develops a boundary peak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gegenbauer import DimensionParams, gamma_ratio, series_cutoff
from .quadrature import QuadratureRule, composite_nodes, gauss_legendre

__all__ = [
    "SeriesControl",
    "ConstantQuery",
    "KernelPoint",
    "ConvexityReport",
    "RadialMaxReport",
    "DEFAULT_QUAD_ORDER",
    "inner_integral",
    "inner_integral_series",
    "constant_direct",
    "constant_series",
    "constant_radial",
    "profile_parts",
    "profile_curvature_series",
    "profile_curvature_kernel",
    "curvature_density",
    "curvature_density_grid",
    "certify_convexity",
    "certify_radial_max",
]

DEFAULT_QUAD_ORDER = 128
CONVEXITY_FLOOR = -1e-12
TIE_TOLERANCE = 1e-12
RADIAL_MATCH_TOL = 1e-8


def _default_rule(rule: QuadratureRule | None) -> QuadratureRule:
    return rule if rule is not None else gauss_legendre(DEFAULT_QUAD_ORDER)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the rho-power series.

    The default term cap accommodates rho up to 0.99 at the default tail
    tolerance (roughly 6.7e3 terms are needed there).
    """

    max_terms: int = 8192
    tail_tol: float = 1e-14

    def __post_init__(self):
        if self.max_terms < 8:
            raise ValueError(f"max_terms must be at least 8, got {self.max_terms}")
        if not self.tail_tol > 0:
            raise ValueError(f"tail_tol must be positive, got {self.tail_tol}")


_DEFAULT_CONTROL = SeriesControl()


def _default_control(ctl: SeriesControl | None) -> SeriesControl:
    return ctl if ctl is not None else _DEFAULT_CONTROL


@dataclass(frozen=True)
class ConstantQuery:
    """Evaluation point: dimension, radius rho in [0, 1), direction angle alpha."""

    dim: DimensionParams
    rho: float
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError(f"rho must lie in [0, 1), got {self.rho}")
        if not 0.0 <= self.alpha <= math.pi:
            raise ValueError(f"alpha must lie in [0, pi], got {self.alpha}")

    @property
    def delta(self) -> float:
        """Shrunk radius ((n-2)/n) * rho, the kink location of the outer integrals."""
        return (self.dim.n - 2) / self.dim.n * self.rho

    @property
    def t(self) -> float:
        return math.cos(self.alpha)


@dataclass(frozen=True)
class KernelPoint:
    """Point (t, z) with its membership in the positivity region of the kernel."""

    t: float
    z: float
    delta: float
    in_omega: bool = field(init=False)

    def __post_init__(self):
        if not (-1.0 < self.t < 1.0 and -1.0 < self.z < 1.0):
            raise ValueError("t and z must lie in (-1, 1)")
        disc = (1.0 - self.delta ** 2 * self.t ** 2 - self.t ** 2 - self.z ** 2
                + 2.0 * self.delta * self.t ** 2 * self.z)
        object.__setattr__(self, "in_omega", bool(disc > 0.0))


def _graded_breakpoints(rho: float):
    """Panel edges resolving the (1 - 2*rho*cos(theta) + rho^2) boundary peak."""
    if rho < 0.8:
        return ()
    h = 1.0 - rho
    pts = []
    for m in (1.0, 4.0, 16.0, 64.0):
        s = m * h
        if s < math.pi / 2:
            pts.append(s)
            pts.append(math.pi - s)
    return tuple(sorted(pts))


# -- inner integral of the double-integral route ----------------------------


def _inner_smooth(dim: DimensionParams, rho: float, alpha: float, x, rule: QuadratureRule):
    """Angular form of the inner integral with its (1-x^2) power factored out.

    Returns the integral over psi in [0, pi] of
    (sin psi)^(n-3) / (1 - 2 rho (x cos(alpha) + sqrt(1-x^2) sin(alpha) cos(psi)) + rho^2)^(n/2-1)
    for every entry of x at once.
    """
    n = dim.n
    nodes, wts = composite_nodes(0.0, math.pi, rule, _graded_breakpoints(rho))
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    a = xa * math.cos(alpha)
    b = np.sqrt(np.maximum(1.0 - xa * xa, 0.0)) * math.sin(alpha)
    denom = 1.0 - 2.0 * rho * (a[:, None] + b[:, None] * np.cos(nodes)[None, :]) + rho * rho
    vals = np.sin(nodes)[None, :] ** (n - 3) * denom ** (-(n / 2.0 - 1.0))
    return vals @ wts


def inner_integral(q: ConstantQuery, x: float, rule: QuadratureRule | None = None) -> float:
    """Inner integral of the double-integral route at abscissa x, by quadrature.

    Evaluated after the substitution y = sqrt(1-x^2) cos(psi), which removes
    the endpoint singularity present for n = 3.
    """
    if not -1.0 < x < 1.0:
        raise ValueError(f"x must lie in (-1, 1), got {x}")
    rule = _default_rule(rule)
    smooth = float(_inner_smooth(q.dim, q.rho, q.alpha, x, rule)[0])
    return (1.0 - x * x) ** ((q.dim.n - 3) / 2.0) * smooth


def _pair_sum_scalar(lam: float, x1: float, x2: float, rho: float, K: int) -> float:
    """sum_{k<=K} (k!/(2 lam)_k) C_k^lam(x1) C_k^lam(x2) rho^k for scalars."""
    total = 1.0
    if K == 0:
        return total
    c1p, c2p = 1.0, 1.0
    c1, c2 = 2.0 * lam * x1, 2.0 * lam * x2
    b = 1.0 / (2.0 * lam)
    r = rho
    total += b * c1 * c2 * r
    for m in range(2, K + 1):
        c1p, c1 = c1, (2.0 * (m + lam - 1.0) * x1 * c1 - (m + 2.0 * lam - 2.0) * c1p) / m
        c2p, c2 = c2, (2.0 * (m + lam - 1.0) * x2 * c2 - (m + 2.0 * lam - 2.0) * c2p) / m
        b *= m / (2.0 * lam + m - 1.0)
        r *= rho
        total += b * c1 * c2 * r
    return total


def _pair_sum_grid(lam: float, x1: np.ndarray, x2: np.ndarray, rho: float, K: int) -> np.ndarray:
    """Vector version of _pair_sum_scalar over matching abscissa arrays."""
    total = np.ones_like(x1)
    if K == 0:
        return total
    c1p = np.ones_like(x1)
    c2p = np.ones_like(x2)
    c1 = 2.0 * lam * x1
    c2 = 2.0 * lam * x2
    b = 1.0 / (2.0 * lam)
    r = rho
    total = total + b * r * c1 * c2
    for m in range(2, K + 1):
        c1p, c1 = c1, (2.0 * (m + lam - 1.0) * x1 * c1 - (m + 2.0 * lam - 2.0) * c1p) / m
        c2p, c2 = c2, (2.0 * (m + lam - 1.0) * x2 * c2 - (m + 2.0 * lam - 2.0) * c2p) / m
        b *= m / (2.0 * lam + m - 1.0)
        r *= rho
        total = total + (b * r) * c1 * c2
    return total


def inner_integral_series(q: ConstantQuery, x: float,
                          ctl: SeriesControl | None = None) -> float:
    """Series expansion of the inner integral; cross-validates inner_integral."""
    if not -1.0 < x < 1.0:
        raise ValueError(f"x must lie in (-1, 1), got {x}")
    ctl = _default_control(ctl)
    n = q.dim.n
    lam = q.dim.lambda_low
    pref = gamma_ratio((0.5, (n - 2) / 2.0), ((n - 1) / 2.0,)) \
        * (1.0 - x * x) ** ((n - 3) / 2.0)
    if q.rho == 0.0:
        return pref
    K = series_cutoff(q.rho, lam, ctl)
    return pref * _pair_sum_scalar(lam, x, q.t, q.rho, K)


# -- the three constant routes ----------------------------------------------


def constant_direct(q: ConstantQuery, rule: QuadratureRule | None = None) -> float:
    """Directional constant via the double-integral representation.

    Both integrals run in angle variables; the outer one is split at the kink
    located at arccos(delta * t).
    """
    rule = _default_rule(rule)
    n, rho = q.dim.n, q.rho
    dt = q.delta * q.t
    kink = math.acos(dt)
    bps = sorted((*_graded_breakpoints(rho), kink))
    nodes, wts = composite_nodes(0.0, math.pi, rule, bps)
    x = np.cos(nodes)
    inner = _inner_smooth(q.dim, rho, q.alpha, x, rule)
    outer_vals = np.abs(dt - x) * np.sin(nodes) ** (n - 2) * inner
    total = float(wts @ outer_vals)
    return n * (n - 2) / (2.0 * math.pi) / (1.0 - rho * rho) * total


def _kink_integrals(t, dim: DimensionParams, rho: float, rule: QuadratureRule):
    """The two kink integrals of the profile, for scalar or vector t."""
    n = dim.n
    delta = (n - 2) / n * rho
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    plain = np.empty_like(ta)
    weighted = np.empty_like(ta)
    for i, ti in enumerate(ta):
        dt = delta * ti
        nodes, wts = composite_nodes(0.0, math.pi, rule, (math.acos(dt),))
        c = np.cos(nodes)
        base = np.abs(dt - c) * np.sin(nodes) ** (n - 2)
        plain[i] = wts @ base
        weighted[i] = (n - 2) * rho * ti * (wts @ (base * c))
    return plain, weighted


def _tail_series(t, dim: DimensionParams, rho: float, ctl: SeriesControl):
    """Series part of the profile, for scalar or vector t."""
    n = dim.n
    delta = (n - 2) / n * rho
    ta = np.atleast_1d(np.asarray(t, dtype=float))
    if rho == 0.0:
        return np.zeros_like(ta)
    lam_h, lam_l = dim.lambda_high, dim.lambda_low
    K = series_cutoff(rho, lam_l, ctl)
    x1 = delta * ta
    # lagged recurrence: term k couples degree k-2 at lam_high with degree k at lam_low
    h_prev = np.ones_like(ta)          # degree k-2 == 0 at lam_high
    h_cur = 2.0 * lam_h * x1           # degree k-2 == 1 at lam_high
    l_pp = np.ones_like(ta)            # degree 0 at lam_low
    l_p = 2.0 * lam_l * ta             # degree 1 at lam_low
    coeff = 1.0                        # m!/(n+2)_m at m = k-2 = 0
    r = rho * rho
    total = np.zeros_like(ta)
    for k in range(2, K + 1):
        l_pp, l_p = l_p, (2.0 * (k + lam_l - 1.0) * ta * l_p - (k + 2.0 * lam_l - 2.0) * l_pp) / k
        m = k - 2
        if m == 0:
            h_val = h_prev
        elif m == 1:
            h_val = h_cur
            coeff = 1.0 / (n + 2.0)
        else:
            h_prev, h_cur = h_cur, (
                2.0 * (m + lam_h - 1.0) * x1 * h_cur - (m + 2.0 * lam_h - 2.0) * h_prev
            ) / m
            h_val = h_cur
            coeff *= m / (n + m + 1.0)
        total = total + (coeff * r) * h_val * l_p
        r *= rho
    pref = (2.0 / (n * n - 1.0)) * (1.0 - (delta * ta) ** 2) ** ((n + 1) / 2.0)
    return pref * total


def profile_parts(t, dim: DimensionParams, rho: float,
                  ctl: SeriesControl | None = None,
                  rule: QuadratureRule | None = None):
    """The three additive parts of the normalized constant profile at t = cos(alpha).

    Returns (plain kink integral, weighted kink integral, series part); each
    entry is a float for scalar t and an ndarray for vector t.
    """
    ta = np.asarray(t, dtype=float)
    if np.any(np.abs(ta) > 1.0):
        raise ValueError("t must lie in [-1, 1]")
    rule = _default_rule(rule)
    ctl = _default_control(ctl)
    plain, weighted = _kink_integrals(ta, dim, rho, rule)
    tail = _tail_series(ta, dim, rho, ctl)
    if ta.ndim == 0:
        return float(plain[0]), float(weighted[0]), float(tail[0])
    return plain, weighted, tail


def constant_series(q: ConstantQuery, ctl: SeriesControl | None = None,
                    rule: QuadratureRule | None = None) -> float:
    """Directional constant via the ultraspherical-expansion representation."""
    plain, weighted, tail = profile_parts(q.t, q.dim, q.rho, ctl, rule)
    return q.dim.c_n / (1.0 - q.rho ** 2) * (plain + weighted + tail)


def constant_radial(n, rho: float, rule: QuadratureRule | None = None) -> float:
    """Sharp constant in the radial direction, by the closed 1-D formula."""
    dim = n if isinstance(n, DimensionParams) else DimensionParams(n)
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    rule = _default_rule(rule)
    delta = (dim.n - 2) / dim.n * rho
    bps = sorted((*_graded_breakpoints(rho), math.acos(delta)))
    nodes, wts = composite_nodes(0.0, math.pi, rule, bps)
    c = np.cos(nodes)
    denom = (1.0 - 2.0 * rho * c + rho * rho) ** ((dim.n - 2) / 2.0)
    vals = np.abs(c - delta) * np.sin(nodes) ** (dim.n - 2) / denom
    return dim.c_n / (1.0 - rho * rho) * float(wts @ vals)


# -- second derivative of the profile ---------------------------------------


def profile_curvature_series(t, dim: DimensionParams, rho: float,
                             ctl: SeriesControl | None = None):
    """Second derivative of the profile by its three-series representation."""
    ta = np.asarray(t, dtype=float)
    if np.any(np.abs(ta) >= 1.0):
        raise ValueError("t must lie in (-1, 1)")
    if rho == 0.0:
        return 0.0 if ta.ndim == 0 else np.zeros_like(ta)
    ctl = _default_control(ctl)
    n = dim.n
    delta = (n - 2) / n * rho
    tv = np.atleast_1d(ta)
    x1 = delta * tv
    g = 1.0 - x1 * x1

    lam_l, lam_m, lam_h = dim.lambda_low, dim.lambda_mid, dim.lambda_high
    s_low = _pair_sum_grid(lam_l, x1, tv, rho, series_cutoff(rho, lam_l, ctl))
    s_mid = _pair_sum_grid(lam_m, x1, tv, rho, series_cutoff(rho, lam_m, ctl))
    s_high = _pair_sum_grid(lam_h, x1, tv, rho, series_cutoff(rho, lam_h, ctl))

    d2 = delta * delta
    out = (2.0 * d2 * g ** ((n - 3) / 2.0) * s_low
           - 4.0 * n * d2 / (n - 1.0) * g ** ((n - 1) / 2.0) * s_mid
           + 2.0 * n ** 3 * d2 / ((n + 1.0) * (n - 1.0) * (n - 2.0))
           * g ** ((n + 1) / 2.0) * s_high)
    return float(out[0]) if ta.ndim == 0 else out


def profile_curvature_kernel(t: float, dim: DimensionParams, rho: float,
                             rule: QuadratureRule | None = None) -> float:
    """Second derivative of the profile as an integral of the kernel density.

    The integral over the kernel support is taken through the substitution
    z = delta*t^2 + w*cos(theta), w = sqrt((1 - delta^2 t^2)(1 - t^2)), under
    which all (1-t^2) denominator powers of the density cancel exactly and
    the integrand is analytic up to the (1 - 2 rho z + rho^2) boundary peak.
    """
    if not -1.0 < t < 1.0:
        raise ValueError(f"t must lie in (-1, 1), got {t}")
    if rho == 0.0:
        return 0.0
    rule = _default_rule(rule)
    n = dim.n
    delta = (n - 2) / n * rho
    g = 1.0 - (delta * t) ** 2
    w = math.sqrt(g * (1.0 - t * t))
    center = delta * t * t
    eta = n / (n - 2.0)
    nodes, wts = composite_nodes(0.0, math.pi, rule, _graded_breakpoints(rho))
    z = center + w * np.cos(nodes)
    p = 1.0 - 2.0 * rho * z + rho * rho
    s = np.sin(nodes)
    vals = s ** (n - 3) * (p - eta * g * s * s) ** 2 * p ** (-(n + 2) / 2.0)
    pref = 2.0 * gamma_ratio(((n - 1) / 2.0,), ((n - 2) / 2.0, 0.5))
    return pref * delta * delta * g ** ((n - 3) / 2.0) * float(wts @ vals)


def curvature_density_grid(t, z, n: int, rho: float):
    """Pointwise kernel density behind the convexity certificate, vectorized.

    Zero off the positivity region; inside it the value is a Gamma-ratio
    prefactor times disc^((n-4)/2) * (A - n*B/(n-2))^2 over the denominator
    powers, with A = (1 - 2 rho z + rho^2)(1 - t^2) and B = disc.
    """
    dim = n if isinstance(n, DimensionParams) else DimensionParams(n)
    n = dim.n
    delta = (n - 2) / n * rho
    ta = np.asarray(t, dtype=float)
    za = np.asarray(z, dtype=float)
    disc = 1.0 - (delta * ta) ** 2 - ta * ta - za * za + 2.0 * delta * ta * ta * za
    p = 1.0 - 2.0 * rho * za + rho * rho
    a = p * (1.0 - ta * ta)
    quad = (a - n / (n - 2.0) * disc) ** 2
    pref = 2.0 * gamma_ratio(((n - 1) / 2.0,), ((n - 2) / 2.0, 0.5))
    safe = np.where(disc > 0.0, disc, 1.0)
    dens = pref * safe ** ((n - 4) / 2.0) * quad / (
        p ** ((n + 2) / 2.0) * (1.0 - ta * ta) ** ((n + 1) / 2.0)
    )
    out = np.where(disc > 0.0, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def curvature_density(point: KernelPoint, n: int, rho: float) -> float:
    """Kernel density at a typed point; validates the point's shrunk radius."""
    dim = n if isinstance(n, DimensionParams) else DimensionParams(n)
    expected = (dim.n - 2) / dim.n * rho
    if abs(point.delta - expected) > 1e-12:
        raise ValueError(
            f"point.delta={point.delta} inconsistent with (n={dim.n}, rho={rho})"
        )
    if not point.in_omega:
        return 0.0
    return float(curvature_density_grid(point.t, point.z, dim, rho))


# -- certification sweeps ----------------------------------------------------


@dataclass(frozen=True)
class ConvexityReport:
    """Grid certificate that the constant profile has nonnegative curvature."""

    n: int
    rho: float
    grid_size: int
    min_curvature: float
    argmin_t: float
    passed: bool
    max_route_gap: float
    series_terms: tuple
    quad_order: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["series_terms"] = list(self.series_terms)
        return d


@dataclass(frozen=True)
class RadialMaxReport:
    """Grid certificate that the constant is maximized in the radial direction."""

    n: int
    rho: float
    grid_points: int
    argmax_alphas: tuple
    value_at_zero: float
    max_value: float
    interior_gap: float
    radial_value: float
    radial_residual: float
    passed: bool
    series_terms: int
    quad_order: int

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["argmax_alphas"] = list(self.argmax_alphas)
        return d


def _series_orders(dim: DimensionParams, rho: float, ctl: SeriesControl):
    if rho == 0.0:
        return (0, 0, 0)
    return tuple(series_cutoff(rho, lam, ctl)
                 for lam in (dim.lambda_low, dim.lambda_mid, dim.lambda_high))


def certify_convexity(n: int, rho: float, grid_size: int = 201,
                      ctl: SeriesControl | None = None,
                      rule: QuadratureRule | None = None,
                      threshold: float = CONVEXITY_FLOOR) -> ConvexityReport:
    """Scan the profile curvature on a uniform open t-grid and certify its sign.

    Also reports the largest discrepancy between the series and kernel
    curvature routes over the grid.
    """
    if grid_size < 3:
        raise ValueError(f"grid_size must be at least 3, got {grid_size}")
    dim = DimensionParams(n)
    ctl = _default_control(ctl)
    rule = _default_rule(rule)
    grid = np.linspace(-0.999, 0.999, grid_size)
    curv = np.atleast_1d(profile_curvature_series(grid, dim, rho, ctl))
    gap = 0.0
    for i, ti in enumerate(grid):
        gap = max(gap, abs(curv[i] - profile_curvature_kernel(float(ti), dim, rho, rule)))
    imin = int(np.argmin(curv))
    return ConvexityReport(
        n=dim.n,
        rho=rho,
        grid_size=grid_size,
        min_curvature=float(curv[imin]),
        argmin_t=float(grid[imin]),
        passed=bool(curv[imin] >= threshold),
        max_route_gap=gap,
        series_terms=_series_orders(dim, rho, ctl),
        quad_order=rule.order,
    )


def certify_radial_max(n: int, rho: float, alpha_grid=None,
                       ctl: SeriesControl | None = None,
                       rule: QuadratureRule | None = None,
                       tie_tol: float = TIE_TOLERANCE) -> RadialMaxReport:
    """Scan the directional constant over an alpha grid covering [0, pi].

    Certifies that alpha = 0 attains the grid maximum (a tie at alpha = pi is
    expected from the endpoint equality) and that the maximum reproduces the
    closed radial formula.
    """
    dim = DimensionParams(n)
    ctl = _default_control(ctl)
    rule = _default_rule(rule)
    alphas = np.linspace(0.0, math.pi, 181) if alpha_grid is None \
        else np.asarray(alpha_grid, dtype=float)
    if alphas[0] > 1e-12 or math.pi - alphas[-1] > 1e-12:
        raise ValueError("alpha grid must cover [0, pi]")
    t = np.cos(alphas)
    plain, weighted, tail = profile_parts(t, dim, rho, ctl, rule)
    values = dim.c_n / (1.0 - rho * rho) * (plain + weighted + tail)
    max_value = float(values.max())
    scale = max(1.0, abs(max_value))
    ties = np.nonzero(values >= max_value - tie_tol * scale)[0]
    value_at_zero = float(values[0])
    radial = constant_radial(dim, rho, rule)
    radial_residual = abs(value_at_zero - radial) / scale
    passed = bool(
        value_at_zero >= max_value - tie_tol * scale
        and radial_residual <= RADIAL_MATCH_TOL
    )
    if rho == 0.0:
        terms = 0
    else:
        terms = series_cutoff(rho, dim.lambda_low, ctl)
    return RadialMaxReport(
        n=dim.n,
        rho=rho,
        grid_points=len(alphas),
        argmax_alphas=tuple(float(alphas[i]) for i in ties),
        value_at_zero=value_at_zero,
        max_value=max_value,
        interior_gap=value_at_zero - max_value,
        radial_value=radial,
        radial_residual=radial_residual,
        passed=passed,
        series_terms=terms,
        quad_order=rule.order,
    )
