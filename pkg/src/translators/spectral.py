"""
Stability operator checks on translating solitons.

For a translator with weight ``f = -<x, w>`` the stability operator is
``L_f = Delta_f + |A|^2`` with ``Delta_f = Delta - <grad f, grad .>``.
This module evaluates, by finite differences,

* the Jacobi equation ``Delta_f H + |A|^2 H = 0``,
* the scalar Simons quantity ``Delta_f |A| + |A|^3`` (nonnegative where
  ``|A| > 0``),
* the ratio ``|A|^2 / H^2``, constant exactly on grim hyperplanes,

and computes the first Dirichlet eigenvalue of ``-(Delta_f + |A|^2)`` on
coordinate rectangles of the grim plane's arc-length chart.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .catalog import sech
from .errors import DomainError, InputError, SolverError, VanishingCurvature
from .geometry import curvature_frame, shape_scalars, unit_vector

__all__ = [
    "drift_laplacian_residual",
    "surface_drift_laplacian",
    "jacobi_residual",
    "simons_gap",
    "FieldSample",
    "sample_field",
    "Verdict",
    "ratio_classifier",
    "EigenSolve",
    "dirichlet_lambda1",
    "check_report",
]

# default step for the 4th-order stencils below; balances h^4 truncation
# against rounding amplified by 1/h^2
FIELD_STEP = 5e-3
# the bowl's fields vary on an O(1) radial scale but carry interpolation noise
# at the ODE tolerance, so the radial stencil uses a wider step
RADIAL_STEP = 2e-2

# integer weights; the common factor 1/12 is applied once so constants cancel exactly
_D1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))
_D2 = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))


def _derivatives(func, p, h, contains=None):
    """Gradient and Hessian of a scalar function by 4th-order central differences."""
    p = np.asarray(p, dtype=float)
    n = p.size
    cache = {}

    def at(offset):
        key = tuple(offset)
        if key not in cache:
            q = p + h * np.asarray(offset, dtype=float)
            if contains is not None and not contains(q):
                raise DomainError(f"finite-difference stencil leaves the domain at {q.tolist()}")
            cache[key] = func(q)
        return cache[key]

    grad = np.zeros(n)
    hess = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n, dtype=int)
        e[i] = 1
        grad[i] = sum(c * at(k * e) for k, c in _D1) / (12 * h)
        hess[i, i] = sum(c * at(k * e) for k, c in _D2) / (12 * h**2)
        for j in range(i):
            ej = np.zeros(n, dtype=int)
            ej[j] = 1
            mixed = sum(ca * cb * at(a * e + b * ej) for a, ca in _D1 for b, cb in _D1) / (144 * h**2)
            hess[i, j] = hess[j, i] = mixed
    return grad, hess


def drift_laplacian_residual(phi, point, h=FIELD_STEP, domain=None):
    """``Delta phi - <grad f, grad phi>`` on the grim plane's arc-length chart.

    The chart ``(r, y_1, ..., y_{n-1})`` is flat and ``f = ln sech r``, so
    the operator is ``sum_i phi_ii + tanh(r) phi_r``.

    Parameters
    ----------
    phi : callable
        Scalar function of the chart coordinates.
    point : array_like
    h : float
        Finite-difference step.
    domain : sequence of (lo, hi) pairs, optional
        Coordinate box the stencil must stay inside.

    Raises
    ------
    DomainError
        Stencil leaves ``domain``.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    contains = None
    if domain is not None:
        box = np.asarray(domain, dtype=float)

        def contains(q):
            return bool(np.all(q >= box[:, 0]) and np.all(q <= box[:, 1]))

        if not contains(point):
            raise DomainError(f"point {point.tolist()} outside the chart box")
    grad, hess = _derivatives(phi, point, h, contains)
    return float(np.trace(hess) + math.tanh(point[0]) * grad[0])


def surface_drift_laplacian(field, surface, p, w, h=FIELD_STEP):
    """``Delta_f`` of a scalar field on a parametrized hypersurface, in coordinates.

    Uses ``Delta u = g^{ij} (u_ij - Gamma^k_ij u_k)`` with Christoffel symbols
    ``Gamma^k_ij = g^{kl} <Phi_ij, Phi_l>`` read off the jet, and
    ``<grad f, grad u> = g^{ij} f_i u_j`` with ``f_i = -<Phi_i, w>``.
    """
    p = surface.check_point(p)
    w = unit_vector(w)
    jet = surface.jet(p)
    g = jet.d1 @ jet.d1.T
    g_inv = np.linalg.inv(g)
    gamma = np.einsum("kl,ijl->kij", g_inv, np.einsum("ijm,lm->ijl", jet.d2, jet.d1))
    grad, hess = _derivatives(field, p, h, surface.contains)
    lap = float(np.sum(g_inv * (hess - np.einsum("kij,k->ij", gamma, grad))))
    df = -jet.d1 @ w
    return lap - float(df @ g_inv @ grad)


def _radial_drift_laplacian(field, profile, rho, h):
    # rotationally symmetric graph: g = W^2 drho^2 + rho^2 g_sphere, f = -u(rho)
    if rho - 2 * h < 0 or rho + 2 * h > profile.rho_max:
        raise DomainError(f"radial stencil around rho={rho} leaves [0, {profile.rho_max}]")
    n = profile.n
    _, up, upp, _, _ = profile.evaluate(rho)
    W2 = 1.0 + up * up
    vals = {k: field(rho + k * h) for k in (-2, -1, 0, 1, 2)}
    d1 = sum(c * vals[k] for k, c in _D1) / (12 * h)
    d2 = sum(c * vals[k] for k, c in _D2) / (12 * h**2)
    return d2 / W2 + d1 * ((n - 1) / (rho * W2) - up * upp / W2**2 + up / W2)


def _radial_point(n, rho):
    p = np.zeros(n)
    p[0] = rho
    return p


def _scalar_field(surface, which):
    def field(q):
        H, normA2 = shape_scalars(surface, q)
        return H if which == "H" else math.sqrt(max(normA2, 0.0))

    return field


def _radial_field(surface, which):
    flat = _scalar_field(surface, which)
    return lambda rho: flat(_radial_point(surface.n, rho))


def _drift_laplacian_of(surface, which, p, w, h):
    profile = getattr(surface, "profile", None)
    if profile is not None:
        rho = float(np.linalg.norm(p))
        h_rad = RADIAL_STEP if h is None else h
        if rho > 2 * h_rad:
            return _radial_drift_laplacian(_radial_field(surface, which), profile, rho, h_rad)
    return surface_drift_laplacian(_scalar_field(surface, which), surface, p, w, FIELD_STEP if h is None else h)


def jacobi_residual(surface, p, w, h=None):
    """``Delta_f H + |A|^2 H`` at ``p``.

    Rotationally symmetric surfaces (those exposing a radial ``profile``)
    use the one-dimensional radial form of ``Delta_f`` away from the axis;
    everything else goes through :func:`surface_drift_laplacian`.  ``h``
    defaults to :data:`RADIAL_STEP` or :data:`FIELD_STEP` accordingly.
    """
    p = surface.check_point(p)
    H, normA2 = shape_scalars(surface, p)
    return _drift_laplacian_of(surface, "H", p, w, h) + normA2 * H


def simons_gap(surface, p, w, h=None, tol_zero=1e-8):
    """``Delta_f |A| + |A|^3`` at ``p``.

    Raises
    ------
    VanishingCurvature
        ``|A| <= tol_zero`` at ``p``.
    """
    p = surface.check_point(p)
    _, normA2 = shape_scalars(surface, p)
    normA = math.sqrt(max(normA2, 0.0))
    if normA <= tol_zero:
        raise VanishingCurvature(f"|A| = {normA:.3g} at {p.tolist()}; the scalar Simons form divides by |A|")
    return _drift_laplacian_of(surface, "A", p, w, h) + normA2 * normA


@dataclass(frozen=True)
class FieldSample:
    """Per-point curvature scalars over a grid of parameter points.

    ``ratio`` is ``|A|^2/H^2`` and is NaN where ``|H|`` is below ``tol_zero``;
    ``simons`` is NaN where ``|A|`` is.
    """

    surface: object
    points: np.ndarray
    H: np.ndarray
    normA: np.ndarray
    ratio: np.ndarray
    jacobi: np.ndarray
    simons: np.ndarray
    tol_zero: float


def sample_field(surface, points, w, h=None, tol_zero=1e-8, derivatives=True):
    """Evaluate :class:`FieldSample` scalars at each point of ``points``."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise InputError("empty sample grid")
    frames = [curvature_frame(surface, q, w) for q in points]
    H = np.array([fr.H for fr in frames])
    normA = np.array([fr.normA for fr in frames])
    zero = tol_zero * max(1.0, float(np.max(normA)))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(H) > zero, normA**2 / H**2, np.nan)
    jac = np.full(len(points), np.nan)
    sim = np.full(len(points), np.nan)
    if derivatives:
        for k, q in enumerate(points):
            jac[k] = jacobi_residual(surface, q, w, h)
            if normA[k] > zero:
                sim[k] = simons_gap(surface, q, w, h, tol_zero=zero)
    return FieldSample(surface, points, H, normA, ratio, jac, sim, zero)


class Verdict(enum.Enum):
    GRIM_LIKE = "GrimLike"
    NON_CONSTANT_RATIO = "NonConstantRatio"
    MEAN_CURVATURE_VANISHES = "MeanCurvatureVanishes"


def ratio_classifier(surface, grid, w, tol=1e-8, tol_zero=1e-8):
    """Classify a translator by the spread of ``|A|^2 / H^2`` over ``grid``.

    Returns ``(verdict, sample)``; the ratio depends on ``H^2`` only, so the
    result does not depend on orientation.
    """
    sample = sample_field(surface, grid, w, tol_zero=tol_zero, derivatives=False)
    if np.any(np.isnan(sample.ratio)):
        return Verdict.MEAN_CURVATURE_VANISHES, sample
    spread = float(np.max(sample.ratio) - np.min(sample.ratio))
    verdict = Verdict.GRIM_LIKE if spread <= tol else Verdict.NON_CONSTANT_RATIO
    return verdict, sample


@dataclass(frozen=True)
class EigenSolve:
    """First Dirichlet eigenpair of ``-(Delta_f + |A|^2)`` on a grim-chart rectangle.

    ``eigvec`` lives on the interior nodes of the symmetrized problem
    (``e^{-f/2}`` times the eigenfunction), reshaped to ``(N_r - 1, N_y - 1)``.
    """

    rect: tuple
    grid: tuple
    lambda1: float
    residual_norm: float
    iterations: int
    positive_interior: bool
    history: list = field(default_factory=list)
    eigvec: np.ndarray = field(default=None, repr=False)


def _symmetrized_potential(r):
    # |A|^2 + (1/2) Delta f - (1/4)|grad f|^2 with f = ln sech r
    s2 = sech(r) ** 2
    return s2 - 0.5 * s2 - 0.25 * np.tanh(r) ** 2


def _solve_once(rect, nr, ny, tol, max_iter):
    r1, r2, y1, y2 = rect
    hr = (r2 - r1) / nr
    hy = (y2 - y1) / ny
    r = r1 + hr * np.arange(1, nr)
    y = y1 + hy * np.arange(1, ny)
    # fast index is the shorter axis so the bandwidth is as small as possible
    swap = ny > nr
    fast_h, slow_h = (hr, hy) if swap else (hy, hr)
    m_fast = (nr if swap else ny) - 1
    m_slow = (ny if swap else nr) - 1
    R, _ = np.meshgrid(r, y, indexing="ij")
    V = _symmetrized_potential(R)
    if swap:
        V = V.T
    V = V.ravel()
    size = V.size

    diag = 2.0 / hr**2 + 2.0 / hy**2 - V
    off_fast = np.full(size, -1.0 / fast_h**2)
    off_fast[np.arange(size) % m_fast == 0] = 0.0  # no coupling across rows
    off_slow = np.full(size, -1.0 / slow_h**2)

    def matvec(x):
        out = diag * x
        out[1:] += off_fast[1:] * x[:-1]
        out[:-1] += off_fast[1:] * x[1:]
        out[m_fast:] += off_slow[m_fast:] * x[:-m_fast]
        out[:-m_fast] += off_slow[m_fast:] * x[m_fast:]
        return out

    # exact bottom of the discrete Dirichlet Laplacian; V is bounded above, so
    # this shift sits strictly below lambda_1 and M - shift is positive definite
    lap_min = (4.0 / hr**2) * math.sin(math.pi / (2 * nr)) ** 2 + (4.0 / hy**2) * math.sin(math.pi / (2 * ny)) ** 2
    shift = lap_min - float(np.max(V)) - 1e-3

    ab = np.zeros((m_fast + 1, size))
    ab[m_fast] = diag - shift
    ab[m_fast - 1, 1:] = off_fast[1:]
    ab[0, m_fast:] = off_slow[m_fast:]
    chol = scipy.linalg.cholesky_banded(ab)

    i_s, i_f = np.meshgrid(np.arange(1, m_slow + 1), np.arange(1, m_fast + 1), indexing="ij")
    x = (np.sin(math.pi * i_s / (m_slow + 1)) * np.sin(math.pi * i_f / (m_fast + 1))).ravel()
    x /= np.linalg.norm(x)
    lam = float(x @ matvec(x))
    for it in range(1, max_iter + 1):
        x = scipy.linalg.cho_solve_banded((chol, False), x)
        x /= np.linalg.norm(x)
        new = float(x @ matvec(x))
        converged = abs(new - lam) <= tol * max(1.0, abs(new))
        lam = new
        if converged:
            break
    else:
        raise SolverError(f"inverse iteration did not converge in {max_iter} steps")
    resid = float(np.linalg.norm(matvec(x) - lam * x))
    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    vec = x.reshape(m_slow, m_fast)
    if swap:
        vec = vec.T
    positive = bool(np.all(x > 0))
    return lam, resid, it, positive, vec


def dirichlet_lambda1(rect, grid, refine=False, tol=1e-13, max_iter=5000):
    """First Dirichlet eigenvalue of ``-(Delta_f + |A|^2)`` on a rectangle.

    Parameters
    ----------
    rect : (r1, r2, y1, y2)
        Rectangle in the arc-length chart of the grim plane (``n = 2``).
    grid : int or (int, int)
        Number of intervals along ``r`` and ``y`` (at least 16 each).
    refine : bool
        Also solve on the doubled grid and record it in ``history``.

    The operator is conjugated by ``e^{-f/2}`` into
    ``Delta + |A|^2 + Delta f / 2 - |grad f|^2 / 4``, discretized with the
    5-point Laplacian (a symmetric banded matrix), and solved by shifted
    inverse iteration with a banded Cholesky factorization.
    """
    r1, r2, y1, y2 = (float(v) for v in rect)
    if not (r2 > r1 and y2 > y1):
        raise InputError(f"degenerate rectangle {rect!r}")
    nr, ny = (grid, grid) if np.isscalar(grid) else grid
    nr, ny = int(nr), int(ny)
    if nr < 16 or ny < 16:
        raise InputError("grid must have at least 16 intervals per side")
    lam, resid, its, positive, vec = _solve_once((r1, r2, y1, y2), nr, ny, tol, max_iter)
    history = [((nr, ny), lam)]
    if refine:
        history.append(((2 * nr, 2 * ny), _solve_once((r1, r2, y1, y2), 2 * nr, 2 * ny, tol, max_iter)[0]))
    return EigenSolve(
        rect=(r1, r2, y1, y2),
        grid=(nr, ny),
        lambda1=lam,
        residual_norm=resid,
        iterations=its,
        positive_interior=positive,
        history=history,
        eigvec=vec,
    )


def check_report(check, surface, grid, statistic, passed):
    """JSON-ready summary of one check."""
    return {
        "check": check,
        "surface": surface,
        "grid": grid,
        "statistic": statistic,
        "pass": bool(passed),
    }
