"""
Exception hierarchy shared by the solvers and the CLI.
"""


class DiracShellError(Exception):
    """Base class for every failure raised by dirac_shell"""


class DomainError(DiracShellError, ValueError):
    """Argument outside the domain of an operation"""


class CriticalityError(DomainError):
    """Coupling pair violates eta^2 - tau^2 = 4"""


class NoRootError(DiracShellError):
    """Sign scan found no bracket for an eigenvalue"""


class NonConvergenceError(DiracShellError):
    """Iterative refinement did not reach its tolerance"""


class StiffnessFailure(DiracShellError):
    """ODE integrator step size collapsed"""


class NearSingularDenominator(DiracShellError):
    """Matching constant denominator vanished"""


class NonPositiveNormArgument(DiracShellError):
    """Closed-form normalization bracket is not positive"""


class QuadratureError(DiracShellError):
    """Quadrature error estimate exceeded the requested tolerance"""

    def __init__(self, message: str, estimate: float = float("nan")):
        super().__init__(message)
        self.estimate = estimate


class SweepIncomplete(DiracShellError):
    """Some fibers failed; partial results were written"""


class VerificationFailure(DiracShellError):
    """At least one verification check failed"""
