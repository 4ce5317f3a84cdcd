"""Numerical checks of the classical ultraspherical identities: orthogonality,
the addition and product theorems, the product-formula kernel, the weighted
derivative identity, and the kink integral with its closed form.

All weighted integrals on [-1, 1] are evaluated after the substitution
x = cos(theta): the weight (1-x^2)^(lam-1/2) turns into (sin theta)^(2*lam),
which is analytic for every half-integer lam and never endpoint-singular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gegenbauer import (
    GegenbauerIndex,
    _recurrence,
    assoc_legendre,
    eval_recurrence,
    gamma_ratio,
    legendre,
    pochhammer,
)
from .quadrature import QuadratureRule, gauss_legendre, integrate, integrate_split

__all__ = [
    "KernelParams",
    "AdditionCoefficient",
    "addition_coefficient",
    "orthogonality_integral",
    "orthogonality_closed_form",
    "addition_theorem_rhs",
    "legendre_addition_rhs",
    "product_formula_check",
    "kernel_support",
    "kernel_K",
    "kernel_product_check",
    "weighted_derivative_check",
    "kink_integral_closed",
    "kink_integral_brute",
    "run_suite",
    "SUITE_TOLERANCES",
]

_FD_STEP = 1e-5  # central-difference step for all derivative oracles


@dataclass(frozen=True)
class KernelParams:
    """Arguments (lam, x, y) of the product-formula kernel; lam > 0 required."""

    lam: float
    x: float
    y: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if not (-1.0 < self.x < 1.0 and -1.0 < self.y < 1.0):
            raise ValueError("x and y must lie in (-1, 1)")


def addition_coefficient(lam: float, k: int, j: int) -> float:
    """Weight of the j-th term in the ultraspherical addition theorem (lam > 1/2)."""
    if not lam > 0.5:
        raise ValueError(f"addition coefficients need lam > 1/2, got {lam}")
    if not 0 <= j <= k:
        raise ValueError(f"need 0 <= j <= k, got j={j}, k={k}")
    log_val = (
        math.lgamma(2.0 * lam - 1.0)
        - 2.0 * math.lgamma(lam)
        + 2.0 * j * math.log(2.0)
        + math.lgamma(k - j + 1.0)
        + 2.0 * math.lgamma(lam + j)
        - math.lgamma(k + 2.0 * lam + j)
    )
    return (2.0 * lam + 2.0 * j - 1.0) * math.exp(log_val)


@dataclass(frozen=True)
class AdditionCoefficient:
    lam: float
    k: int
    j: int
    value: float

    @classmethod
    def compute(cls, lam: float, k: int, j: int) -> "AdditionCoefficient":
        return cls(lam, k, j, addition_coefficient(lam, k, j))


def orthogonality_closed_form(lam: float, k: int) -> float:
    """Diagonal value of the weighted L2 inner product of C_k^lam with itself."""
    return gamma_ratio((0.5, lam + 0.5), (lam,)) * pochhammer(2.0 * lam, k) / (
        (k + lam) * math.factorial(k)
    )


def orthogonality_integral(lam: float, k: int, l: int, rule: QuadratureRule) -> float:
    """Weighted inner product of C_k^lam and C_l^lam on [-1, 1] by quadrature.

    Vanishes for k != l; equals orthogonality_closed_form(lam, k) on the diagonal.
    """
    if not lam > -0.5 or lam == 0.0:
        raise ValueError(f"lam must exceed -1/2 and be nonzero, got {lam}")

    def integrand(theta):
        c = np.cos(theta)
        return (np.sin(theta) ** (2.0 * lam)) * _recurrence(lam, k, c) * _recurrence(lam, l, c)

    return integrate(integrand, 0.0, math.pi, rule)


def addition_theorem_rhs(lam: float, k: int, theta: float, phi: float, psi: float) -> float:
    """Right side of the addition theorem; equals C_k^lam applied to the
    combined argument cos(theta)cos(phi) + sin(theta)sin(phi)cos(psi).

    Only valid for lam > 1/2; use legendre_addition_rhs at lam = 1/2.
    """
    if not lam > 0.5:
        raise ValueError(
            f"addition theorem needs lam > 1/2 (got {lam}); "
            "use legendre_addition_rhs for the lam = 1/2 case"
        )
    for angle in (theta, phi, psi):
        if not 0.0 <= angle <= math.pi:
            raise ValueError(f"angles must lie in [0, pi], got {angle}")
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    cpsi = math.cos(psi)
    total = 0.0
    for j in range(k + 1):
        term = addition_coefficient(lam, k, j)
        term *= (st * sp) ** j
        term *= float(_recurrence(lam + j, k - j, ct))
        term *= float(_recurrence(lam + j, k - j, cp))
        term *= float(_recurrence(lam - 0.5, j, cpsi))
        total += term
    return total


def legendre_addition_rhs(k: int, theta: float, phi: float, psi: float) -> float:
    """Right side of the Legendre addition theorem (the lam = 1/2 route)."""
    for angle in (theta, phi, psi):
        if not 0.0 <= angle <= math.pi:
            raise ValueError(f"angles must lie in [0, pi], got {angle}")
    ct, cp = math.cos(theta), math.cos(phi)
    total = legendre(k, ct) * legendre(k, cp)
    for j in range(1, k + 1):
        ratio = math.exp(math.lgamma(k - j + 1.0) - math.lgamma(k + j + 1.0))
        total += 2.0 * ratio * assoc_legendre(k, j, ct) * assoc_legendre(k, j, cp) * math.cos(j * psi)
    return total


def product_formula_check(lam: float, k: int, phi: float, psi: float,
                          rule: QuadratureRule) -> tuple[float, float]:
    """(LHS, RHS) of the classical product formula for C_k^lam (lam > 0)."""
    if not lam > 0:
        raise ValueError(f"product formula needs lam > 0, got {lam}")
    lhs = float(_recurrence(lam, k, math.cos(phi))) * float(_recurrence(lam, k, math.cos(psi)))
    a = math.cos(phi) * math.cos(psi)
    b = math.sin(phi) * math.sin(psi)

    def integrand(theta):
        arg = np.clip(a + b * np.cos(theta), -1.0, 1.0)
        return _recurrence(lam, k, arg) * np.sin(theta) ** (2.0 * lam - 1.0)

    pref = gamma_ratio((lam + 0.5,), (0.5, lam)) * pochhammer(2.0 * lam, k) / math.factorial(k)
    rhs = pref * integrate(integrand, 0.0, math.pi, rule)
    return lhs, rhs


def kernel_support(x: float, y: float) -> tuple[float, float]:
    """Interval of z where 1 - x^2 - y^2 - z^2 + 2xyz > 0.

    The discriminant is a downward parabola in z with roots
    x*y -/+ sqrt((1-x^2)(1-y^2)).
    """
    w = math.sqrt((1.0 - x * x) * (1.0 - y * y))
    return x * y - w, x * y + w


def kernel_K(params: KernelParams, z):
    """Product-formula kernel density; zero outside its support.

    Accepts a scalar or ndarray z and returns matching shape.
    """
    lam, x, y = params.lam, params.x, params.y
    za = np.asarray(z, dtype=float)
    disc = 1.0 - x * x - y * y - za * za + 2.0 * x * y * za
    pref = gamma_ratio((lam + 0.5,), (lam, 0.5))
    denom = ((1.0 - x * x) * (1.0 - y * y)) ** (lam - 0.5)
    safe = np.where(disc > 0.0, disc, 1.0)
    val = np.where(disc > 0.0, pref * safe ** (lam - 1.0) / denom, 0.0)
    return float(val) if val.ndim == 0 else val


def kernel_product_check(params: KernelParams, k: int,
                         rule: QuadratureRule) -> tuple[float, float]:
    """(C_k(x)C_k(y), ((2 lam)_k/k!) * integral of C_k(z) K(x,y,z) dz).

    The z-integral runs over the analytic support interval through the
    substitution z = xy + sqrt((1-x^2)(1-y^2)) cos(theta), whose Jacobian
    tames the (lam-1)-power endpoint behavior of the kernel for every lam.
    """
    lam, x, y = params.lam, params.x, params.y
    lhs = float(_recurrence(lam, k, x)) * float(_recurrence(lam, k, y))
    w = math.sqrt((1.0 - x * x) * (1.0 - y * y))
    center = x * y

    def integrand(theta):
        z = center + w * np.cos(theta)
        return _recurrence(lam, k, np.clip(z, -1.0, 1.0)) * kernel_K(params, z) * w * np.sin(theta)

    rhs = pochhammer(2.0 * lam, k) / math.factorial(k) * integrate(integrand, 0.0, math.pi, rule)
    return lhs, rhs


def weighted_derivative_check(lam: float, k: int, x: float) -> tuple[float, float]:
    """(finite-difference derivative of (1-x^2)^(lam-1/2) C_k^lam, closed form).

    The closed form is -((k+1)(k+2 lam-1)/(2(lam-1))) (1-x^2)^(lam-3/2)
    C_{k+1}^{lam-1}(x); lam = 1 is excluded by the identity itself. The
    difference stencil is 5-point central so truncation stays below the
    1e-6 agreement contract even at the largest sampled degrees.
    """
    if lam == 1.0:
        raise ValueError("the weighted derivative identity excludes lam = 1")
    if not abs(x) < 1.0 - 3.0 * _FD_STEP:
        raise ValueError(f"x must lie safely inside (-1, 1), got {x}")

    def weighted(u):
        return (1.0 - u * u) ** (lam - 0.5) * float(_recurrence(lam, k, u))

    h = _FD_STEP
    lhs = (-weighted(x + 2 * h) + 8.0 * weighted(x + h)
           - 8.0 * weighted(x - h) + weighted(x - 2 * h)) / (12.0 * h)
    rhs = (
        -((k + 1.0) * (k + 2.0 * lam - 1.0) / (2.0 * (lam - 1.0)))
        * (1.0 - x * x) ** (lam - 1.5)
        * float(_recurrence(lam - 1.0, k + 1, x))
    )
    return lhs, rhs


def kink_integral_closed(lam: float, k: int, s: float) -> float:
    """Closed form of the kink integral of |x-s| against the C_k^lam weight (k >= 2)."""
    if k < 2:
        raise ValueError(f"closed form holds for k >= 2, got {k}")
    if not -1.0 < s < 1.0:
        raise ValueError(f"s must lie in (-1, 1), got {s}")
    pref = 8.0 * lam * (lam + 1.0) / (k * (k - 1.0) * (k + 2.0 * lam) * (k + 2.0 * lam + 1.0))
    return pref * (1.0 - s * s) ** (lam + 1.5) * float(_recurrence(lam + 2.0, k - 2, s))


def kink_integral_brute(lam: float, k: int, s: float, rule: QuadratureRule) -> float:
    """Quadrature value of the kink integral, split at the kink x = s."""
    if not -1.0 < s < 1.0:
        raise ValueError(f"s must lie in (-1, 1), got {s}")

    def integrand(theta):
        c = np.cos(theta)
        return np.abs(c - s) * np.sin(theta) ** (2.0 * lam) * _recurrence(lam, k, c)

    return integrate_split(integrand, 0.0, math.pi, [math.acos(s)], rule)


# -- residual suite ---------------------------------------------------------

SUITE_TOLERANCES = {
    "orthogonality-offdiag": 1e-12,
    "orthogonality-diag": 1e-10,
    "addition": 1e-9,
    "legendre-addition": 1e-9,
    "product": 1e-9,
    "kernel-product": 1e-9,
    "kernel-mass": 1e-10,
    "kink": 1e-9,
    "weighted-derivative": 1e-6,
}

DEFAULT_SUITE_LAMBDAS = (0.5, 1.0, 1.5, 2.5, 3.0)


def _residual(a: float, b: float) -> float:
    # relative residual with a 1e-12 absolute floor at the 1e-9 scale
    return abs(a - b) / max(abs(a), abs(b), 1e-3)


def run_suite(lambdas=DEFAULT_SUITE_LAMBDAS, max_degree: int = 12, samples: int = 20,
              rule: QuadratureRule | None = None, seed: int = 0,
              checks=None) -> dict[str, dict]:
    """Max residual of every identity over a sampled (lam, degree, point) grid.

    Returns {check name: {"max_residual", "tolerance", "passed", "cases"}}.
    Checks whose hypotheses exclude a lam value skip it: the addition theorem
    runs the Legendre route at lam <= 1/2, and the weighted derivative
    identity skips lam in (0.9, 1.1).
    """
    rule = rule or gauss_legendre(128)
    rng = np.random.default_rng(seed)
    wanted = set(checks) if checks is not None else set(SUITE_TOLERANCES)
    unknown = wanted - set(SUITE_TOLERANCES)
    if unknown:
        raise ValueError(f"unknown identity checks: {sorted(unknown)}")
    worst = {name: (0.0, 0) for name in wanted}

    def record(name, res):
        cur, cnt = worst[name]
        worst[name] = (max(cur, res), cnt + 1)

    degrees = range(max_degree + 1)

    if {"orthogonality-offdiag", "orthogonality-diag"} & wanted:
        for lam in lambdas:
            for k in range(0, max_degree + 1, 2):
                for l in range(k, max_degree + 1, 3):
                    val = orthogonality_integral(lam, k, l, rule)
                    if k == l and "orthogonality-diag" in wanted:
                        record("orthogonality-diag",
                               _residual(val, orthogonality_closed_form(lam, k)))
                    elif k != l and "orthogonality-offdiag" in wanted:
                        record("orthogonality-offdiag", abs(val))

    if {"addition", "legendre-addition"} & wanted:
        for lam in lambdas:
            legendre_route = lam <= 0.5
            name = "legendre-addition" if legendre_route else "addition"
            if name not in wanted:
                continue
            for k in degrees:
                angles = rng.uniform(0.05, math.pi - 0.05, size=(samples, 3))
                for theta, phi, psi in angles:
                    arg = math.cos(theta) * math.cos(phi) + math.sin(theta) * math.sin(phi) * math.cos(psi)
                    if legendre_route:
                        lhs = legendre(k, arg)
                        rhs = legendre_addition_rhs(k, theta, phi, psi)
                    else:
                        lhs = eval_recurrence(GegenbauerIndex(lam, k), arg)
                        rhs = addition_theorem_rhs(lam, k, theta, phi, psi)
                    record(name, _residual(lhs, rhs))

    if "product" in wanted:
        for lam in lambdas:
            for k in degrees:
                angles = rng.uniform(0.05, math.pi - 0.05, size=(samples, 2))
                for phi, psi in angles:
                    lhs, rhs = product_formula_check(lam, k, phi, psi, rule)
                    record("product", _residual(lhs, rhs))

    if {"kernel-product", "kernel-mass"} & wanted:
        for lam in lambdas:
            points = rng.uniform(-0.95, 0.95, size=(samples, 2))
            for x, y in points:
                params = KernelParams(lam, x, y)
                if "kernel-mass" in wanted:
                    _, mass = kernel_product_check(params, 0, rule)
                    record("kernel-mass", abs(mass - 1.0))
                if "kernel-product" in wanted:
                    for k in range(1, max_degree + 1, 3):
                        lhs, rhs = kernel_product_check(params, k, rule)
                        record("kernel-product", _residual(lhs, rhs))

    if "kink" in wanted:
        for lam in lambdas:
            for k in range(2, max_degree + 1):
                for s in rng.uniform(-0.9, 0.9, size=samples):
                    closed = kink_integral_closed(lam, k, s)
                    brute = kink_integral_brute(lam, k, s, rule)
                    record("kink", _residual(closed, brute))

    if "weighted-derivative" in wanted:
        for lam in lambdas:
            if 0.9 < lam < 1.1:
                continue
            for k in degrees:
                for x in rng.uniform(-0.95, 0.95, size=samples):
                    lhs, rhs = weighted_derivative_check(lam, k, x)
                    record("weighted-derivative", abs(lhs - rhs))

    report = {}
    for name, (res, cases) in sorted(worst.items()):
        tol = SUITE_TOLERANCES[name]
        report[name] = {
            "max_residual": res,
            "tolerance": tol,
            "passed": bool(res <= tol and cases > 0),
            "cases": cases,
        }
    return report
