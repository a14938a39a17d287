"""Exception types raised across the package."""


class TranslatorError(Exception):
    """Base class for every error raised by this package."""


class InputError(TranslatorError, ValueError):
    """Arguments violate a documented precondition."""


class DomainError(TranslatorError, ValueError):
    """A parameter point lies outside the chart or a stencil leaves it."""


class ImmersionFailure(TranslatorError, ArithmeticError):
    """Tangent vectors are (numerically) linearly dependent."""


class IntegrationError(TranslatorError, RuntimeError):
    """An ODE integration did not complete."""


class BudgetError(TranslatorError, RuntimeError):
    """A computation would exceed its cost guard."""


class RangeError(TranslatorError, ValueError):
    """A monotone inversion could not bracket its target."""


class SolverError(TranslatorError, RuntimeError):
    """An iterative eigen-solver failed to converge."""


class VanishingCurvature(TranslatorError, ArithmeticError):
    """|A| is too small for a quantity that divides by it."""


class KappaRejected(TranslatorError, ValueError):
    """A candidate growth function failed one of its hypotheses.

    ``clause`` names the violated hypothesis: ``"Positivity"``,
    ``"QuadraticLowerBound"``, ``"Monotonicity"`` or ``"Divergence"``.
    """

    def __init__(self, clause, message):
        super().__init__(f"{clause}: {message}")
        self.clause = clause
