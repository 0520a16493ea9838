"""Exception types shared across the package."""


class FocussError(Exception):
    """Base class for library-specific failures."""


class NotSymmetricError(FocussError):
    """A symmetric solve was handed a matrix that is not symmetric."""


class SingularMatrixError(FocussError):
    """Factorization failed and the ridge policy forbids regularization."""


class SingularGramError(FocussError):
    """The weighted Gram matrix A diag(w) A^T could not be factored."""


class ZeroAnchorError(FocussError):
    """The auxiliary function is undefined at a zero anchor."""


class DegenerateReferenceError(FocussError):
    """The rate reference coincides exactly with an early iterate."""


class ZeroComponentError(FocussError):
    """An operation requiring entrywise-nonzero s received a zero entry."""


class PEqualsOneError(FocussError):
    """The exact-Hessian formulas degenerate at p = 1."""


class InfeasibleDimensionsError(FocussError):
    """Generator dimensions violate a feasibility bound."""


class DegenerateNullVectorError(FocussError):
    """No usable null-space combination found within the resample budget."""


class AssumptionFailureError(FocussError):
    """A generator exhausted its resample budget without a valid dataset."""


class TooLargeError(FocussError):
    """The instance exceeds the exhaustive-search size limit."""


class NoExactSolutionError(FocussError):
    """No support of size <= m admits an exact solution of A s = x."""
