"""
Growth functions and logarithmic cutoffs for Liouville-type comparison arguments.

A growth function ``kappa`` controls the weighted L^2 growth of a solution on
geodesic balls.  From it we build

    beta(t) = int_0^t tau / kappa(tau) dtau,      xi = beta^{-1},

and the cutoff

    psi_R(r) = 1                 for r <= xi(R),
             = 2 - beta(r) / R   for xi(R) < r < xi(2R),
             = 0                 for r >= xi(2R),

whose gradient on the annulus is ``r / (R kappa(r))``.

``kappa`` is arbitrary user code, so :func:`validate_kappa` certifies the
hypotheses on finite grids rather than proving them.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import InputError, KappaRejected, RangeError
from .quadrature import adaptive_quad

__all__ = [
    "GrowthFunction",
    "CutoffProfile",
    "validate_kappa",
    "beta",
    "xi",
    "cutoff_eval",
    "cutoff_table",
    "SHIPPED_KAPPAS",
    "shipped_kappa",
]

DEFAULT_T_MAX = 1e15
_GRID_PER_DECADE = 40


def _quad(t):
    return 1.0 + t * t


def _quadlog(t):
    return (1.0 + t * t) * np.log1p(t) + 1.0


def _quadloglog(t):
    return (1.0 + t * t) * np.log1p(t) * np.log(np.log(3.0 + t)) + 1.0


#: the regularized family ``C t^2``, ``C t^2 log(1+t)``, ``C t^2 log(1+t) log log(3+t)``
SHIPPED_KAPPAS = {
    "quad": _quad,
    "quadlog": _quadlog,
    "quadloglog": _quadloglog,
}

# comparison integrands for certifying that int^inf t/kappa diverges
_COMPARATORS = (
    ("1/t", lambda t: 1.0 / t),
    ("1/(t log t)", lambda t: 1.0 / (t * np.log(t))),
    ("1/(t log t loglog t)", lambda t: 1.0 / (t * np.log(t) * np.log(np.log(t)))),
)


def _grid(t_max):
    decades = math.log10(t_max) + 6
    return np.concatenate([[0.0], np.geomspace(1e-6, t_max, int(decades * _GRID_PER_DECADE) + 1)])


def _vectorized(kappa):
    try:
        np.asarray(kappa(np.array([0.5, 1.5])), dtype=float).reshape(2)
        return kappa
    except Exception:
        return np.vectorize(kappa, otypes=[float])


def _nondecaying(values, frac=0.5):
    """A sampled tail is treated as bounded below if it keeps at least ``frac`` of its peak."""
    return values[-1] >= frac * np.max(values)


@dataclass(frozen=True)
class GrowthFunction:
    """A certified growth function plus the memo table for ``beta``.

    ``breaks`` and ``cumulative`` hold ``beta`` at a geometric grid of
    breakpoints; evaluating ``beta(t)`` adds one local quadrature to the
    tabulated value at the nearest breakpoint below ``t``.
    """

    kappa: callable
    t0: float
    kappa_min: float
    quadratic_constant: float
    t_max: float
    certificates: dict
    name: str = "kappa"
    breaks: np.ndarray = field(default=None, repr=False)
    cumulative: np.ndarray = field(default=None, repr=False)

    def beta_prime(self, t):
        return t / self.kappa(t)

    def beta(self, t):
        return beta(self, t)

    def xi(self, R):
        return xi(self, R)


def validate_kappa(kappa, t0=None, t_max=DEFAULT_T_MAX, name="kappa"):
    """Certify a candidate growth function and build its ``beta`` table.

    Checks, in order:

    Positivity
        ``kappa > 0`` on the grid, including ``t = 0``.
    QuadraticLowerBound
        ``kappa(t) >= c (1 + t^2)`` with ``c`` the grid minimum of the ratio,
        and the ratio does not decay along the tail.
    Monotonicity
        ``t / kappa(t)`` nonincreasing on ``[t0, t_max]``.  With ``t0=None``
        the smallest grid point with this property is detected.
    Divergence
        ``t / kappa(t)`` dominates one of ``1/t``, ``1/(t log t)``,
        ``1/(t log t loglog t)`` on the tail, so ``beta`` is unbounded.

    Raises
    ------
    KappaRejected
        With ``clause`` naming the first failed check.
    """
    kappa = _vectorized(kappa)
    grid = _grid(t_max)
    with np.errstate(all="ignore"):
        vals = np.asarray(kappa(grid), dtype=float) * np.ones_like(grid)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        bad = grid[~(np.isfinite(vals) & (vals > 0))][0]
        raise KappaRejected(
            "Positivity",
            f"kappa({bad:g}) = {float(kappa(bad))!r} is not positive; beta's integrand t/kappa "
            "must stay integrable at 0 (shift kappa(t) = C t^2 to C (1 + t^2))",
        )

    ratio = vals / (1.0 + grid**2)
    c = float(np.min(ratio))
    tail = grid >= 1e3
    if not _nondecaying(ratio[tail]):
        raise KappaRejected("QuadraticLowerBound", f"kappa/(1+t^2) decays along the tail (min {c:.3g})")

    slope = grid / vals
    nonincreasing = slope[1:] <= slope[:-1] * (1.0 + 1e-12)
    if t0 is None:
        # last index where monotonicity breaks; everything after it is fine
        bad = np.nonzero(~nonincreasing)[0]
        start = 0 if bad.size == 0 else int(bad[-1]) + 1
        if start >= grid.size - 2:
            raise KappaRejected("Monotonicity", "t/kappa(t) never becomes nonincreasing on the grid")
        t0 = float(grid[start])
    else:
        t0 = float(t0)
        if t0 < 0:
            raise InputError("t0 must be nonnegative")
        sel = grid[:-1] >= t0
        if not np.all(nonincreasing[sel]):
            where = grid[:-1][sel][~nonincreasing[sel]][0]
            raise KappaRejected("Monotonicity", f"t/kappa(t) increases after t = {where:g} >= t0 = {t0:g}")

    certificate = None
    tail_t = grid[grid >= 1e4]
    for label, comp in _COMPARATORS:
        r = slope[grid >= 1e4] / comp(tail_t)
        if _nondecaying(r, 0.9):
            certificate = (label, float(np.min(r)))
            break
    if certificate is None:
        raise KappaRejected("Divergence", "t/kappa(t) decays faster than every shipped comparison integrand")

    head = grid <= max(t0, 1.0)
    kappa_min = float(np.min(vals[head]))
    s2 = grid**2 / vals
    after = grid >= t0
    certificates = {
        "quadratic_constant": c,
        "monotone_from": t0,
        "divergence_comparator": certificate[0],
        "divergence_constant": certificate[1],
        # bounded by 1/c since kappa >= c(1+t^2)
        "s2_over_kappa_sup": float(np.max(s2[after])),
        "s2_over_kappa_bound": 1.0 / c,
    }

    breaks = grid
    pieces = [0.0]
    for a, b in zip(breaks[:-1], breaks[1:]):
        pieces.append(adaptive_quad(lambda t: t / kappa(t), a, b, abs_tol=1e-15, rel_tol=1e-14).value)
    cumulative = np.cumsum(pieces)

    return GrowthFunction(
        kappa=kappa,
        t0=t0,
        kappa_min=kappa_min,
        quadratic_constant=c,
        t_max=float(t_max),
        certificates=certificates,
        name=name,
        breaks=breaks,
        cumulative=cumulative,
    )


@lru_cache(maxsize=None)
def shipped_kappa(kappa_id):
    """Validated growth function for one of the ids in :data:`SHIPPED_KAPPAS` (cached)."""
    try:
        func = SHIPPED_KAPPAS[kappa_id]
    except KeyError:
        raise InputError(f"unknown kappa id {kappa_id!r}; choose from {sorted(SHIPPED_KAPPAS)}") from None
    return validate_kappa(func, name=kappa_id)


def beta(gf, t):
    """``int_0^t tau / kappa(tau) dtau`` from the memo table plus one local quadrature."""
    t = float(t)
    if t < 0:
        raise InputError("beta is defined for t >= 0")
    k = int(np.searchsorted(gf.breaks, t, side="right")) - 1
    k = min(k, gf.breaks.size - 1)
    a = gf.breaks[k]
    if t == a:
        return float(gf.cumulative[k])
    local = adaptive_quad(lambda s: s / gf.kappa(s), a, t, abs_tol=1e-15, rel_tol=1e-14).value
    return float(gf.cumulative[k] + local)


def xi(gf, R):
    """Inverse of ``beta``: safeguarded Newton inside a tabulated bracket.

    Converges to ``|beta(xi) - R| <= 1e-12 max(1, R)``.

    Raises
    ------
    RangeError
        ``R`` exceeds ``beta(t_max)``.
    """
    R = float(R)
    if R < 0:
        raise InputError("xi is defined for R >= 0")
    if R == 0:
        return 0.0
    if R > gf.cumulative[-1]:
        raise RangeError(f"beta stays below {R} up to t_max = {gf.t_max:g}")
    k = int(np.searchsorted(gf.cumulative, R, side="left"))
    lo, hi = float(gf.breaks[k - 1]), float(gf.breaks[k])
    tol = 1e-12 * max(1.0, R)
    t = 0.5 * (lo + hi)
    for _ in range(200):
        resid = beta(gf, t) - R
        if resid > 0:
            hi = t
        else:
            lo = t
        if abs(resid) <= tol * 1e-2 or hi - lo <= 4e-16 * hi:
            break
        d = gf.beta_prime(t)
        step = t - resid / d if d > 0 else None
        t = step if step is not None and lo < step < hi else 0.5 * (lo + hi)
    if abs(beta(gf, t) - R) > tol:
        raise RangeError(f"xi({R}) did not converge (residual {beta(gf, t) - R:.3g})")
    return t


@dataclass(frozen=True)
class CutoffProfile:
    """Cutoff ``psi_R`` with its two breakpoints ``xi(R)`` and ``xi(2R)`` cached."""

    gf: GrowthFunction
    R: float
    xi_R: float
    xi_2R: float

    @classmethod
    def build(cls, gf, R):
        if not R > 0:
            raise InputError("cutoff radius must be positive")
        return cls(gf, float(R), xi(gf, R), xi(gf, 2 * R))

    def __call__(self, r):
        if r < 0:
            raise InputError("distance must be nonnegative")
        if r <= self.xi_R:
            return 1.0, 0.0
        if r >= self.xi_2R:
            return 0.0, 0.0
        return 2.0 - beta(self.gf, r) / self.R, r / (self.R * self.gf.kappa(r))


def cutoff_eval(gf, R, r):
    """``(psi_R(r), |grad psi_R|(r))`` for distance ``r`` from the centre."""
    return CutoffProfile.build(gf, R)(r)


def cutoff_table(gf, R, r_values, fh=None):
    """CSV columns ``r, psi, grad``; returns the text when ``fh`` is None."""
    profile = CutoffProfile.build(gf, R)
    sink = io.StringIO() if fh is None else fh
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["r", "psi", "grad"])
    for r in r_values:
        psi, grad = profile(float(r))
        writer.writerow([repr(float(r)), repr(psi), repr(grad)])
    return sink.getvalue() if fh is None else None
