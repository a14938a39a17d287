"""
Exact and ODE-generated translating solitons (translation direction ``e_{n+1}``).

* vertical and horizontal hyperplanes,
* the grim hyperplane in graph coordinates ``(t, y)`` or arc-length
  coordinates ``(r, y)``,
* the rotationally symmetric bowl, from its radial ODE
  ``u''/(1 + u'^2) + (n-1) u'/rho = 1``.

All catalog members carry closed-form jets (the bowl's come from a
smooth Hermite interpolant of the integrated profile), so they can serve
as references for the finite-difference pipeline.
"""

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .errors import DomainError, InputError, IntegrationError
from .geometry import Jet, ParamSurface

__all__ = [
    "sech",
    "grim_eta",
    "grim_arclength",
    "grim_t",
    "GrimSurface",
    "grim_surface",
    "VerticalPlane",
    "HorizontalPlane",
    "BowlProfile",
    "BowlSurface",
    "bowl_solve",
    "bowl_series",
    "translation_direction",
]

HALF_PI = 0.5 * math.pi


def translation_direction(n):
    """The unit vector ``e_{n+1}`` in ``R^(n+1)``."""
    w = np.zeros(n + 1)
    w[-1] = 1.0
    return w


def sech(r):
    """Overflow-free hyperbolic secant."""
    a = np.exp(-np.abs(r))
    return 2.0 * a / (1.0 + a * a)


def _log_cosh(r):
    a = np.abs(r)
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


def grim_eta(r):
    """``eta(r) = 2 arctan(e^{-r})``, decreasing from ``pi`` to ``0``.

    For negative ``r`` the reflection ``eta(-r) = pi - eta(r)`` avoids
    overflowing ``exp``.
    """
    r = np.asarray(r, dtype=float)
    out = np.where(r >= 0, 2.0 * np.arctan(np.exp(-np.abs(r))), math.pi - 2.0 * np.arctan(np.exp(-np.abs(r))))
    return float(out) if out.ndim == 0 else out


def grim_arclength(t):
    """Signed arc length along the grim reaper from ``t = 0``.

    Equals ``-ln tan((pi/2 - t)/2)``; evaluated as ``asinh(tan t)``, which is
    the same function without the cancellation near ``t = 0``.
    """
    t = float(t)
    if not -HALF_PI < t < HALF_PI:
        raise DomainError(f"grim graph coordinate t={t!r} outside (-pi/2, pi/2)")
    return math.asinh(math.tan(t))


def grim_t(r):
    """Inverse of :func:`grim_arclength` (the Gudermannian ``pi/2 - eta(r)``)."""
    return math.atan(math.sinh(r)) if abs(r) < 700 else math.copysign(HALF_PI, r)


class GrimSurface(ParamSurface):
    """Grim hyperplane ``(t, y) -> (t, y, -ln cos t)``.

    ``mode="graph"`` uses ``(t, y_1, ..., y_{n-1})`` with ``|t| < pi/2``;
    ``mode="arclength"`` uses ``(r, y_1, ..., y_{n-1})`` in which the induced
    metric is the identity.  Orientation is fixed so that the normal is
    ``(sin t, 0, ..., 0, -cos t)`` and ``H = cos t > 0``.
    """

    orientation = -1

    def __init__(self, n, mode="graph"):
        if n < 2:
            raise InputError("grim hyperplane needs n >= 2")
        if mode not in ("graph", "arclength"):
            raise InputError(f"unknown grim chart mode {mode!r}")
        self.n = int(n)
        self.mode = mode

    def __repr__(self):
        return f"GrimSurface(n={self.n}, mode={self.mode!r})"

    def contains(self, p):
        if self.mode == "graph":
            return -HALF_PI < p[0] < HALF_PI
        return True

    def point(self, p):
        p = np.asarray(p, dtype=float)
        x = np.empty(self.n + 1)
        x[1:-1] = p[1:]
        if self.mode == "graph":
            x[0] = p[0]
            x[-1] = -math.log(math.cos(p[0]))
        else:
            x[0] = grim_t(p[0])
            x[-1] = float(_log_cosh(p[0]))
        return x

    def jet(self, p):
        p = np.asarray(p, dtype=float)
        n = self.n
        d1 = np.zeros((n, n + 1))
        d2 = np.zeros((n, n, n + 1))
        for k in range(1, n):
            d1[k, k] = 1.0
        s = p[0]
        if self.mode == "graph":
            c = math.cos(s)
            d1[0, 0] = 1.0
            d1[0, -1] = math.tan(s)
            d2[0, 0, -1] = 1.0 / (c * c)
        else:
            sh, th = float(sech(s)), math.tanh(s)
            d1[0, 0] = sh
            d1[0, -1] = th
            d2[0, 0, 0] = -sh * th
            d2[0, 0, -1] = sh * sh
        return Jet(self.point(p), d1, d2)

    # closed forms, used as references in tests and reports

    def mean_curvature(self, p):
        return math.cos(p[0]) if self.mode == "graph" else float(sech(p[0]))

    def weight_exponent(self, p):
        """``f = -x_{n+1}`` restricted to the surface."""
        return math.log(math.cos(p[0])) if self.mode == "graph" else -float(_log_cosh(p[0]))


def grim_surface(n, mode="graph"):
    return GrimSurface(n, mode)


class VerticalPlane(ParamSurface):
    """``y -> (0, y_1, ..., y_n)``: a hyperplane containing the translation direction."""

    def __init__(self, n, orientation=1):
        if n < 2:
            raise InputError("hyperplane needs n >= 2")
        self.n = int(n)
        self.orientation = orientation

    def __repr__(self):
        return f"VerticalPlane(n={self.n})"

    def point(self, p):
        return np.concatenate([[0.0], np.asarray(p, dtype=float)])

    def jet(self, p):
        n = self.n
        d1 = np.zeros((n, n + 1))
        d1[:, 1:] = np.eye(n)
        return Jet(self.point(p), d1, np.zeros((n, n, n + 1)))


class HorizontalPlane(ParamSurface):
    """``y -> (y_1, ..., y_n, height)``: orthogonal to the translation direction."""

    def __init__(self, n, height=0.0, orientation=1):
        if n < 2:
            raise InputError("hyperplane needs n >= 2")
        self.n = int(n)
        self.height = float(height)
        self.orientation = orientation

    def __repr__(self):
        return f"HorizontalPlane(n={self.n}, height={self.height})"

    def point(self, p):
        return np.concatenate([np.asarray(p, dtype=float), [self.height]])

    def jet(self, p):
        n = self.n
        d1 = np.zeros((n, n + 1))
        d1[:, :-1] = np.eye(n)
        return Jet(self.point(p), d1, np.zeros((n, n, n + 1)))


def bowl_series(n, terms=4):
    """Taylor coefficients ``a_k`` with ``u'(rho)/rho = sum_k a_k rho^(2k)``.

    Substituting the series into ``u'' = (1 + u'^2)(1 - (n-1) u'/rho)`` and
    matching powers of ``s = rho^2`` gives ``(2k + n) a_k = [RHS]_k`` where the
    right side only involves ``a_0 .. a_{k-1}``.
    """
    a = np.zeros(terms)
    P = np.polynomial.polynomial
    for k in range(terms):
        q = a[:k]
        if k == 0:
            rhs_k = 1.0
        else:
            q2 = P.polymul(q, q)
            lhs = P.polyadd([1.0], P.polymulx(q2))
            rhs = P.polymul(lhs, P.polysub([1.0], (n - 1) * q))
            rhs_k = rhs[k] if k < len(rhs) else 0.0
        a[k] = rhs_k / (2 * k + n)
    return a


@dataclass(frozen=True)
class BowlProfile:
    """Radial profile ``u(rho)`` of the bowl soliton in ``R^(n+1)``.

    Knots hold ``u, u', u'', u'''`` (the higher derivatives from the ODE);
    between knots the profile is the degree-7 Hermite interpolant, which is
    C^3 so that curvature fields built from it can be differentiated twice.
    """

    n: int
    rho: np.ndarray
    u: np.ndarray
    up: np.ndarray
    upp: np.ndarray
    uppp: np.ndarray
    rho_max: float
    rho0: float
    tol: float
    series: np.ndarray
    interpolation_error: float
    _poly: BPoly = field(repr=False, compare=False)

    def evaluate(self, rho):
        """Return ``(u, u', u'', u'/rho, (u'' - u'/rho)/rho^2)`` at one radius."""
        rho = float(rho)
        if rho < 0 or rho > self.rho_max * (1 + 1e-12):
            raise DomainError(f"radius {rho!r} outside [0, {self.rho_max}]")
        if rho <= self.rho0:
            a = self.series
            s = rho * rho
            k = np.arange(a.size)
            q = float(np.sum(a * s**k))
            u = float(np.sum(a * rho ** (2 * k + 2) / (2 * k + 2)))
            upp = float(np.sum((2 * k + 1) * a * s**k))
            hess = float(np.sum((2 * k[1:]) * a[1:] * s ** (k[1:] - 1)))
            return u, q * rho, upp, q, hess
        u, up, upp = (float(self._poly(rho, nu=m)) for m in range(3))
        q = up / rho
        return u, up, upp, q, (upp - q) / (rho * rho)

    def third_derivative(self, rho):
        return float(self._poly(rho, nu=3))

    def to_csv(self, fh=None):
        """Write ``rho, u, u'`` columns; return the text when ``fh`` is None."""
        sink = io.StringIO() if fh is None else fh
        writer = csv.writer(sink, lineterminator="\n")
        writer.writerow(["rho", "u", "du"])
        for r, u, up in zip(self.rho, self.u, self.up):
            writer.writerow([repr(float(r)), repr(float(u)), repr(float(up))])
        return sink.getvalue() if fh is None else None


def _bowl_rhs(n):
    def rhs(rho, y):
        u, p = y
        return [p, (1.0 + p * p) * (1.0 - (n - 1) * p / rho)]

    return rhs


def _third(n, rho, p, pp):
    q = p / rho
    return 2.0 * p * pp * (1.0 - (n - 1) * q) - (1.0 + p * p) * (n - 1) * (pp - q) / rho


def bowl_solve(n, rho_max, tol=1e-12, rho0=1e-3, max_step=0.02):
    """Integrate the bowl profile out to ``rho_max``.

    The four-term series is used on ``[0, rho0]``; from ``rho0`` an adaptive
    Runge-Kutta 4(5) pair carries ``(u, u')`` outward with local error
    controlled by ``tol``.

    Raises
    ------
    IntegrationError
        The integrator failed (e.g. step size underflow).
    """
    if n < 2:
        raise InputError("bowl soliton needs n >= 2")
    if not rho_max > rho0:
        raise InputError(f"rho_max must exceed the series radius {rho0}")
    if not tol > 0:
        raise InputError("tol must be positive")
    a = bowl_series(n)
    k = np.arange(a.size)
    u0 = float(np.sum(a * rho0 ** (2 * k + 2) / (2 * k + 2)))
    p0 = float(np.sum(a * rho0 ** (2 * k + 1)))
    sol = solve_ivp(
        _bowl_rhs(n),
        (rho0, rho_max),
        [u0, p0],
        method="RK45",
        rtol=tol,
        atol=tol * 1e-2,
        max_step=max_step,
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationError(f"bowl profile integration failed: {sol.message}")

    # series knots inside [0, rho0)
    rs = np.linspace(0.0, rho0, 4)[:-1]
    s = rs[:, None] ** 2
    us = np.sum(a * rs[:, None] ** (2 * k + 2) / (2 * k + 2), axis=1)
    ps = np.sum(a * rs[:, None] ** (2 * k + 1), axis=1)
    pps = np.sum((2 * k + 1) * a * s**k, axis=1)
    ppps = np.sum((2 * k[1:] + 1) * (2 * k[1:]) * a[1:] * rs[:, None] ** (2 * k[1:] - 1), axis=1)

    rho_o = sol.t
    u_o, p_o = sol.y
    pp_o = (1.0 + p_o * p_o) * (1.0 - (n - 1) * p_o / rho_o)
    ppp_o = _third(n, rho_o, p_o, pp_o)

    rho = np.concatenate([rs, rho_o])
    u = np.concatenate([us, u_o])
    up = np.concatenate([ps, p_o])
    upp = np.concatenate([pps, pp_o])
    uppp = np.concatenate([ppps, ppp_o])
    poly = BPoly.from_derivatives(rho, np.column_stack([u, up, upp, uppp]))

    mids = 0.5 * (rho_o[1:] + rho_o[:-1])
    dense = sol.sol(mids)
    interp_err = float(max(np.max(np.abs(poly(mids) - dense[0])), np.max(np.abs(poly(mids, nu=1) - dense[1]))))

    return BowlProfile(
        n=int(n),
        rho=rho,
        u=u,
        up=up,
        upp=upp,
        uppp=uppp,
        rho_max=float(rho_max),
        rho0=float(rho0),
        tol=float(tol),
        series=a,
        interpolation_error=interp_err,
        _poly=poly,
    )


class BowlSurface(ParamSurface):
    """The bowl as an entire graph ``x -> (x, u(|x|))`` over ``|x| <= rho_max``.

    The normal points downward (orientation ``-1``), which makes ``H > 0``.
    """

    orientation = -1

    def __init__(self, profile):
        self.profile = profile
        self.n = profile.n

    def __repr__(self):
        return f"BowlSurface(n={self.n}, rho_max={self.profile.rho_max})"

    def contains(self, p):
        return float(np.linalg.norm(p)) <= self.profile.rho_max

    def point(self, p):
        p = np.asarray(p, dtype=float)
        u = self.profile.evaluate(np.linalg.norm(p))[0]
        return np.concatenate([p, [u]])

    def jet(self, p):
        p = np.asarray(p, dtype=float)
        n = self.n
        u, _, _, q, hess = self.profile.evaluate(np.linalg.norm(p))
        d1 = np.zeros((n, n + 1))
        d1[:, :-1] = np.eye(n)
        d1[:, -1] = q * p
        d2 = np.zeros((n, n, n + 1))
        d2[:, :, -1] = q * np.eye(n) + hess * np.outer(p, p)
        return Jet(np.concatenate([p, [u]]), d1, d2)
