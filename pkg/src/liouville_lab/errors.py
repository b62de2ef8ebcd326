"""Exception taxonomy.

Hypothesis/contract violations (a caller fed us inputs that break a
documented precondition) are distinguished from internal numerical
failures so sweep drivers can filter rather than abort.  The CLI maps
the former to exit code 2 and the latter to exit code 1.
"""


class LiouvilleError(Exception):
    """Base class for all package errors."""


class ContractError(LiouvilleError):
    """An operation's documented precondition was violated."""


class HypothesisError(ContractError):
    """A mathematical hypothesis (monotonicity, sign condition, PDE
    residual bound) required by the operation does not hold."""


class ParameterError(ContractError):
    """A scalar parameter is outside its admissible range."""


class DomainError(ContractError):
    """A radius or coordinate lies outside the profile's domain."""


class PoleError(DomainError):
    """Stereographic projection evaluated at the projection pole."""


class SingularityError(DomainError):
    """Kelvin transform evaluated at the origin."""


class InfeasibleError(ContractError):
    """Rearrangement target mass exceeds the bubble's total mass."""


class DegeneratePairError(ParameterError):
    """Bubble pair construction hit the double root lambda = sqrt(8)/R."""


class ComplexRootError(ParameterError):
    """Boundary weight exceeds the discriminant bound, roots complex."""


class ResolutionError(ContractError):
    """Discretization too coarse for the requested computation."""


class DivergenceError(LiouvilleError):
    """ODE integration blew up before reaching the target radius."""

    def __init__(self, message, last_radius=None):
        super().__init__(message)
        self.last_radius = last_radius


class InconsistencyError(LiouvilleError):
    """A re-derived contract could not be verified numerically."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
