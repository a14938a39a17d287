"""
Weighted total curvature of the grim hyperplane.

In arc-length coordinates the grim hyperplane is isometric to flat
``R x R^(n-1)``, geodesic balls are Euclidean balls, and the integrand
``|A|^2 e^{-f}`` equals ``sech r``.  Integrating first along ``r`` gives
the slab identity ``int_{-L}^{L} sech = pi - 2 eta(L)``; integrating the
remaining ``R^(n-1)`` factor in polar form yields

    int_{B_R} |A|^2 e^{-f} = R^(n-1) |B^(n-1)| [pi - 2 (n-1) F(n, R)],
    F(n, R) = int_0^{pi/2} eta(R cos th) sin^(n-2) th cos th dth.

:func:`weighted_curvature_reduced` evaluates the right-hand side and
:func:`weighted_curvature_bruteforce` the left-hand side (as a nested 2-d
quadrature over ``|y|`` and ``r``), so the two act as oracles for one
another.
"""

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .catalog import grim_eta, sech
from .errors import BudgetError, InputError

__all__ = [
    "QuadratureResult",
    "BallSpec",
    "adaptive_quad",
    "unit_ball_volume",
    "sphere_area",
    "slab_integral",
    "slab_integral_quadrature",
    "F",
    "F_result",
    "weighted_curvature_reduced",
    "weighted_curvature_bruteforce",
    "limit_constant",
    "growth_fit",
    "quadratic_bound_holds",
    "sweep_rows",
]

# Gauss-Kronrod 7/15 pair (nodes on [0, 1], symmetric)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
# Gauss nodes are the odd-indexed Kronrod nodes
_GAUSS_W = np.zeros(15)
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[7] = _WG[3]
_GAUSS_W[[9, 11, 13]] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class BallSpec:
    """Geodesic ball of radius ``R`` about the origin of the ``(r, y)`` chart."""

    n: int
    R: float

    def __post_init__(self):
        if self.n < 2:
            raise InputError("n must be >= 2")
        if not self.R >= 0:
            raise InputError("ball radius must be nonnegative")

    def contains(self, r, y):
        return r * r + float(np.dot(y, y)) <= self.R * self.R


def _gk15(func, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(func(mid + half * _NODES), dtype=float)
    k = half * float(fx @ _KRONROD_W)
    g = half * float(fx @ _GAUSS_W)
    return k, abs(k - g)


def adaptive_quad(func, a, b, abs_tol=1e-10, rel_tol=0.0, max_evals=1_000_000):
    """Globally adaptive Gauss-Kronrod (7/15) quadrature.

    ``func`` must accept a 1-d array of abscissae.  The interval with the
    largest error estimate is bisected until the summed estimate drops below
    ``max(abs_tol, rel_tol * |value|)``.

    Raises
    ------
    BudgetError
        The evaluation budget ran out before the tolerance was met.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    if b < a:
        res = adaptive_quad(func, b, a, abs_tol, rel_tol, max_evals)
        return QuadratureResult(-res.value, res.abs_error_estimate, res.evaluations)
    val, err = _gk15(func, a, b)
    evals = 15
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    while total_err > max(abs_tol, rel_tol * abs(total)):
        if evals + 30 > max_evals:
            raise BudgetError(f"quadrature budget of {max_evals} evaluations exhausted (error {total_err:.3g})")
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            # interval can no longer be split in floating point
            heapq.heappush(heap, (0.0, lo, hi, v))
            total_err = sum(-e for e, *_ in heap)
            break
        v1, e1 = _gk15(func, lo, mid)
        v2, e2 = _gk15(func, mid, hi)
        evals += 30
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
    # final resummation removes the rounding drift of the running totals
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(-item[0] for item in heap)
    return QuadratureResult(float(total), float(total_err), evals)


_BALL_VOLUMES = {
    0: 1.0,
    1: 2.0,
    2: math.pi,
    3: 4.0 * math.pi / 3.0,
    4: math.pi**2 / 2.0,
    5: 8.0 * math.pi**2 / 15.0,
    6: math.pi**3 / 6.0,
    7: 16.0 * math.pi**3 / 105.0,
    8: math.pi**4 / 24.0,
    9: 32.0 * math.pi**4 / 945.0,
    10: math.pi**5 / 120.0,
}


def unit_ball_volume(k):
    """Volume of the unit ball in ``R^k``: ``pi^(k/2) / Gamma(k/2 + 1)``."""
    if k < 0:
        raise InputError("dimension must be nonnegative")
    if k in _BALL_VOLUMES:
        return _BALL_VOLUMES[k]
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def sphere_area(k):
    """Area of the unit sphere ``S^k`` in ``R^(k+1)`` (``S^0`` is two points)."""
    if k < 0:
        raise InputError("dimension must be nonnegative")
    return 2.0 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def slab_integral(L):
    """``int_{-L}^{L} sin(eta(r)) dr = pi - 2 eta(L)``, closed form."""
    if not L >= 0:
        raise InputError("slab half-width must be nonnegative")
    return math.pi - 2.0 * grim_eta(L)


def slab_integral_quadrature(L, abs_tol=1e-12):
    """The same slab integral by adaptive quadrature of ``sech``."""
    if not L >= 0:
        raise InputError("slab half-width must be nonnegative")
    return adaptive_quad(sech, -L, L, abs_tol=abs_tol)


def _check_nR(n, R):
    if int(n) != n or n < 2:
        raise InputError(f"dimension n must be an integer >= 2, got {n!r}")
    if not R >= 0:
        raise InputError(f"radius must be nonnegative, got {R!r}")


@lru_cache(maxsize=4096)
def F_result(n, R, abs_tol=1e-10):
    """Quadrature of ``F(n, R)`` with its error estimate."""
    _check_nR(n, R)
    m = n - 2

    def integrand(th):
        return grim_eta(R * np.cos(th)) * np.sin(th) ** m * np.cos(th)

    return adaptive_quad(integrand, 0.0, 0.5 * math.pi, abs_tol=abs_tol)


def F(n, R):
    """``int_0^{pi/2} eta(R cos th) sin^(n-2) th cos th dth``.

    Equals ``(pi/2)/(n-1)`` at ``R = 0`` and decreases to ``0`` as ``R`` grows.
    """
    return F_result(int(n), float(R)).value


def limit_constant(n):
    """``|B^(n-1)(1)| * pi``, the limit of the normalized weighted curvature."""
    return unit_ball_volume(n - 1) * math.pi


def weighted_curvature_reduced(n, R):
    """``int_{B_R} |A|^2 e^{-f}`` on the grim hyperplane via the one-dimensional reduction."""
    _check_nR(n, R)
    if R == 0:
        return 0.0
    bracket = math.pi - 2.0 * (n - 1) * F(n, R)
    return R ** (n - 1) * unit_ball_volume(n - 1) * bracket


def _grim_curvature_density(r):
    # |A|^2 e^{-f} on the arc-length chart: sech^2(r) * cosh(r)
    return sech(r) ** 2 * np.cosh(r)


def weighted_curvature_bruteforce(n, R, epsrel=1e-12, max_evals=2_000_000):
    """``int_{B_R} |A|^2 e^{-f}`` by nested quadrature over the Euclidean ball.

    The ``R^(n-1)`` factor is taken in polar form (``|y| = rho``) and the
    ``r``-integral over ``|r| <= sqrt(R^2 - rho^2)`` is done numerically, so
    the computation is two-dimensional and never uses the slab identity.

    Raises
    ------
    BudgetError
        ``n`` outside ``{2, 3, 4}``, ``R > 20``, or too many evaluations.
    """
    _check_nR(n, R)
    if n not in (2, 3, 4) or R > 20:
        raise BudgetError(f"brute-force ball quadrature limited to n in {{2,3,4}} and R <= 20 (got n={n}, R={R})")
    if R == 0:
        return QuadratureResult(0.0, 0.0, 0)
    evals = 0

    def inner(rho):
        nonlocal evals
        half = math.sqrt(max(R * R - rho * rho, 0.0))
        val, _, info = integrate.quad(_grim_curvature_density, -half, half, epsabs=1e-14, epsrel=epsrel, full_output=1)
        evals += info["neval"]
        if evals > max_evals:
            raise BudgetError("brute-force quadrature exceeded its evaluation budget")
        return val * rho ** (n - 2)

    val, err = integrate.quad(inner, 0.0, R, epsabs=1e-13, epsrel=epsrel, limit=200)
    scale = sphere_area(n - 2)
    return QuadratureResult(scale * val, scale * err, evals)


def growth_fit(n, R_grid):
    """Least-squares slope of ``log int_{B_R}`` against ``log R``.

    Raises
    ------
    InputError
        Fewer than four radii, radii not increasing, or a radius below 10.
    """
    R = np.asarray(R_grid, dtype=float)
    if R.ndim != 1 or R.size < 4:
        raise InputError("growth fit needs at least 4 radii")
    if np.any(np.diff(R) <= 0):
        raise InputError("radii must be strictly increasing")
    if R[0] < 10:
        raise InputError("growth fit radii must all be >= 10")
    values = np.array([weighted_curvature_reduced(n, r) for r in R])
    slope, _ = np.polyfit(np.log(R), np.log(values), 1)
    return float(slope)


def quadratic_bound_holds(n, R, C=None):
    """Whether ``int_{B_R} |A|^2 e^{-f} <= C R^2`` with ``C = |B^(n-1)| pi + 1`` by default."""
    C = limit_constant(n) + 1.0 if C is None else C
    return weighted_curvature_reduced(n, R) <= C * R * R


def sweep_rows(n, R_grid):
    """Rows ``(n, R, value, value/R^(n-1), F, error_estimate)`` for CSV emission."""
    rows = []
    for R in R_grid:
        R = float(R)
        if R == 0:
            F0 = F(n, 0.0)
            rows.append((n, R, 0.0, 0.0, F0, 0.0))
            continue
        res = F_result(int(n), R)
        scale = unit_ball_volume(n - 1) * 2.0 * (n - 1)
        value = weighted_curvature_reduced(n, R)
        rows.append((n, R, value, value / R ** (n - 1), res.value, scale * R ** (n - 1) * res.abs_error_estimate))
    return rows
