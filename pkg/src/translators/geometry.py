"""
Extrinsic geometry of parametrized hypersurfaces in Euclidean space.

A hypersurface is described by a map ``Phi: U ⊂ R^n -> R^(n+1)`` whose
*jet* (value, first and second partial derivatives) is either supplied in
closed form or estimated by finite differences.  From the jet we build a
:class:`CurvatureFrame` holding the first and second fundamental forms,
the unit normal, principal curvatures, mean curvature ``H``, ``|A|^2``
and the scalar curvature ``S = H^2 - |A|^2``.

Sign conventions
----------------
The second fundamental form is ``A_ij = <d nu/dp_i, dPhi/dp_j>
= -<d^2 Phi/dp_i dp_j, nu>``, i.e. the shape operator is the derivative of
the normal.  With this choice the grim reaper with downward-pointing normal
``(sin t, 0, ..., 0, -cos t)`` has ``H = cos t > 0`` and the translator
equation reads ``H + <nu, w> = 0``.

The normal is the unit vector orthogonal to the tangent space for which
``det[dPhi/dp_1, ..., dPhi/dp_n, nu]`` has the sign of the surface's
``orientation`` flag.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, ImmersionFailure, InputError

__all__ = [
    "Jet",
    "ParamSurface",
    "FunctionSurface",
    "CurvatureFrame",
    "curvature_frame",
    "shape_scalars",
    "soliton_residual",
    "weighted_density",
    "finite_difference_jet",
    "unit_vector",
]

# 5-point central stencil for the first derivative, offsets -2..2 (centre omitted)
_D1_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_D1_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
# 5-point central stencil for the second derivative, offsets -2..2
_D2_OFFSETS = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
_D2_WEIGHTS = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


@dataclass(frozen=True)
class Jet:
    """Second-order jet of a parametrization at one parameter point.

    Attributes
    ----------
    value : ndarray, shape (n+1,)
    d1 : ndarray, shape (n, n+1)
        ``d1[i]`` is the partial derivative along ``p_i``.
    d2 : ndarray, shape (n, n, n+1)
        ``d2[i, j]`` is the mixed second partial; symmetric in ``i, j``.
    """

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def unit_vector(w, atol=1e-12):
    """Return ``w`` as a float array, checking that it has unit length."""
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or w.size < 3:
        raise InputError(f"ambient vector must be 1-d with length >= 3, got shape {w.shape}")
    if abs(np.linalg.norm(w) - 1.0) > atol:
        raise InputError(f"translation direction must be a unit vector, |w| = {np.linalg.norm(w)!r}")
    return w


class ParamSurface:
    """A parametrized hypersurface ``Phi: U ⊂ R^n -> R^(n+1)``.

    Subclasses implement :meth:`point` and may override :meth:`jet` with
    closed forms; the default jet uses :func:`finite_difference_jet`.
    """

    #: intrinsic dimension
    n = None
    #: sign of det[d1, nu]; see module docstring
    orientation = 1
    #: base step for finite-difference jets
    fd_step = 1e-4

    def contains(self, p):
        """Whether ``p`` lies in the parameter domain."""
        return True

    def point(self, p):
        raise NotImplementedError

    def jet(self, p):
        return finite_difference_jet(self.point, p, self.fd_step)

    def check_point(self, p):
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if p.shape != (self.n,):
            raise InputError(f"expected {self.n} parameters, got shape {p.shape}")
        if not self.contains(p):
            raise DomainError(f"parameter point {p.tolist()} outside the domain of {self!r}")
        return p

    def flipped(self):
        """The same map with the opposite orientation."""
        return _Flipped(self)


class _Flipped(ParamSurface):
    def __init__(self, base):
        self.base = base
        self.n = base.n
        self.orientation = -base.orientation
        self.fd_step = base.fd_step

    def contains(self, p):
        return self.base.contains(p)

    def point(self, p):
        return self.base.point(p)

    def jet(self, p):
        return self.base.jet(p)

    def __getattr__(self, name):
        return getattr(self.base, name)

    def __repr__(self):
        return f"{self.base!r}.flipped()"


class FunctionSurface(ParamSurface):
    """Wrap a plain callable ``phi(p) -> R^(n+1)``; jets by finite differences.

    Parameters
    ----------
    phi : callable
    n : int
        Number of parameters.
    domain : callable, optional
        Predicate ``domain(p) -> bool``.
    orientation : {1, -1}
    fd_step : float
    """

    def __init__(self, phi, n, domain=None, orientation=1, fd_step=1e-4):
        if n < 2:
            raise InputError("hypersurfaces need n >= 2")
        if orientation not in (1, -1):
            raise InputError("orientation must be +1 or -1")
        self.phi = phi
        self.n = int(n)
        self.domain = domain
        self.orientation = orientation
        self.fd_step = fd_step

    def contains(self, p):
        return True if self.domain is None else bool(self.domain(p))

    def point(self, p):
        return np.asarray(self.phi(np.asarray(p, dtype=float)), dtype=float)

    def __repr__(self):
        return f"FunctionSurface(n={self.n}, orientation={self.orientation})"


def _stencil_d1(func, p, i, h):
    e = np.zeros_like(p)
    e[i] = h
    return sum(wt * func(p + o * e) for o, wt in zip(_D1_OFFSETS, _D1_WEIGHTS)) / h


def _stencil_d2(func, p, i, h):
    e = np.zeros_like(p)
    e[i] = h
    return sum(wt * func(p + o * e) for o, wt in zip(_D2_OFFSETS, _D2_WEIGHTS)) / h**2


def _stencil_mixed(func, p, i, j, hi, hj):
    ei = np.zeros_like(p)
    ej = np.zeros_like(p)
    ei[i] = hi
    ej[j] = hj
    acc = 0.0
    for oa, wa in zip(_D1_OFFSETS, _D1_WEIGHTS):
        for ob, wb in zip(_D1_OFFSETS, _D1_WEIGHTS):
            acc = acc + wa * wb * func(p + oa * ei + ob * ej)
    return acc / (hi * hj)


def finite_difference_jet(func, p, h=1e-4):
    """Estimate the jet of ``func`` at ``p``.

    Five-point central differences at steps ``h`` and ``2h`` combined by one
    Richardson step (the stencils are fourth order, so the combination is
    ``(16 D(h) - D(2h)) / 15``).  Steps scale with ``max(1, |p_i|)``.
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    steps = h * np.maximum(1.0, np.abs(p))
    value = np.asarray(func(p), dtype=float)

    def rich(fine, coarse):
        return (16.0 * fine - coarse) / 15.0

    d1 = np.empty((n, value.size))
    d2 = np.empty((n, n, value.size))
    for i in range(n):
        d1[i] = rich(_stencil_d1(func, p, i, steps[i]), _stencil_d1(func, p, i, 2 * steps[i]))
        d2[i, i] = rich(_stencil_d2(func, p, i, steps[i]), _stencil_d2(func, p, i, 2 * steps[i]))
        for j in range(i):
            mixed = rich(
                _stencil_mixed(func, p, i, j, steps[i], steps[j]),
                _stencil_mixed(func, p, i, j, 2 * steps[i], 2 * steps[j]),
            )
            d2[i, j] = d2[j, i] = mixed
    return Jet(value, d1, d2)


@dataclass(frozen=True)
class CurvatureFrame:
    """Pointwise extrinsic data of a hypersurface.

    ``principal`` are the eigenvalues of ``g^{-1} A`` in ascending order;
    ``df`` is the coordinate differential of ``f = -<Phi, w>`` and
    ``grad_f2`` the squared length of its tangential gradient.
    """

    point: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    nu: np.ndarray
    A: np.ndarray
    principal: np.ndarray
    H: float
    normA2: float
    S: float
    f: float
    df: np.ndarray
    grad_f2: float

    @property
    def normA(self):
        return float(np.sqrt(self.normA2))


def _normal(d1, orientation):
    # the left singular vector for the zero singular value spans the normal line
    u, s, _ = np.linalg.svd(d1.T, full_matrices=True)
    if s[-1] <= 1e-12 * s[0]:
        raise ImmersionFailure(f"tangent vectors are degenerate (singular values {s.tolist()})")
    nu = u[:, -1]
    if np.sign(np.linalg.det(np.vstack([d1, nu]))) != orientation:
        nu = -nu
    return nu


def _fundamental_forms(jet, orientation):
    d1, d2 = jet.d1, jet.d2
    g = d1 @ d1.T
    nu = _normal(d1, orientation)
    A = -np.einsum("ijk,k->ij", d2, nu)
    A = 0.5 * (A + A.T)
    return g, nu, A


def shape_scalars(surface, p, w=None):
    """Return ``(H, |A|^2)`` at ``p`` without the eigen-decomposition.

    This is the lightweight path used inside finite-difference stencils.
    """
    p = surface.check_point(p)
    g, _, A = _fundamental_forms(surface.jet(p), surface.orientation)
    shape = np.linalg.solve(g, A)
    return float(np.trace(shape)), float(np.sum(shape * shape.T))


def curvature_frame(surface, p, w):
    """Compute the :class:`CurvatureFrame` of ``surface`` at ``p``.

    Parameters
    ----------
    surface : ParamSurface
    p : array_like, shape (n,)
    w : array_like, shape (n+1,)
        Unit translation direction; enters only through ``f = -<Phi, w>``.

    Raises
    ------
    DomainError
        ``p`` is outside the parameter domain.
    ImmersionFailure
        The tangent vectors are linearly dependent at ``p``.
    """
    p = surface.check_point(p)
    w = unit_vector(w)
    jet = surface.jet(p)
    if jet.value.shape != w.shape:
        raise InputError(f"w has length {w.size}, surface lives in R^{jet.value.size}")
    g, nu, A = _fundamental_forms(jet, surface.orientation)
    g_inv = np.linalg.inv(g)
    shape = g_inv @ A
    H = float(np.trace(shape))
    normA2 = float(np.sum(shape * shape.T))
    # symmetric pencil (A, g): real eigenvalues even under rounding
    principal = scipy.linalg.eigh(A, g, eigvals_only=True)
    df = -jet.d1 @ w
    return CurvatureFrame(
        point=jet.value,
        g=g,
        g_inv=g_inv,
        nu=nu,
        A=A,
        principal=principal,
        H=H,
        normA2=normA2,
        S=H * H - normA2,
        f=float(-jet.value @ w),
        df=df,
        grad_f2=float(df @ g_inv @ df),
    )


def soliton_residual(surface, p, w):
    """``H + <nu, w>`` at ``p``; zero exactly where the translator equation holds."""
    frame = curvature_frame(surface, p, w)
    return frame.H + float(frame.nu @ unit_vector(w))


def weighted_density(surface, p, w):
    """The weight ``e^{-f}`` with ``f = -<Phi(p), w>``."""
    p = surface.check_point(p)
    w = unit_vector(w)
    return float(np.exp(surface.point(p) @ w))
