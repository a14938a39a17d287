"""
Numerical toolkit for translating solitons of mean curvature flow.

Submodules
----------
geometry
    Parametrized hypersurfaces, finite-difference jets and curvature frames.
catalog
    Closed-form translators (grim hyperplane, planes) and the bowl profile.
quadrature
    Weighted curvature integrals of the grim hyperplane and growth fits.
comparison
    Growth functions, ``beta``/``xi`` and logarithmic cutoffs.
spectral
    Drift Laplacian checks, the curvature ratio classifier and the
    Dirichlet stability eigenvalue.
cli
    The ``translators`` command.
"""

from .catalog import (
    BowlProfile,
    BowlSurface,
    GrimSurface,
    HorizontalPlane,
    VerticalPlane,
    bowl_solve,
    grim_surface,
    translation_direction,
)
from .comparison import (
    CutoffProfile,
    GrowthFunction,
    beta,
    cutoff_eval,
    shipped_kappa,
    validate_kappa,
    xi,
)
from .errors import (
    BudgetError,
    DomainError,
    ImmersionFailure,
    InputError,
    IntegrationError,
    KappaRejected,
    RangeError,
    SolverError,
    TranslatorError,
    VanishingCurvature,
)
from .geometry import (
    CurvatureFrame,
    FunctionSurface,
    ParamSurface,
    curvature_frame,
    soliton_residual,
    weighted_density,
)
from .quadrature import (
    F,
    growth_fit,
    limit_constant,
    weighted_curvature_bruteforce,
    weighted_curvature_reduced,
)
from .spectral import (
    Verdict,
    dirichlet_lambda1,
    jacobi_residual,
    ratio_classifier,
    simons_gap,
)

__version__ = "0.1.0"
