"""Exception types shared across the package."""


class SphpendError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SphpendError):
    """Argument outside the mathematical domain of a special function."""


class DegenerateInput(SphpendError):
    """Input too degenerate to project onto the phase space."""


class ChartDomainError(SphpendError):
    """Point outside the domain of the requested coordinate chart."""


class StratumError(SphpendError):
    """Operation requires a different stratum of the momentum-map image."""


class InvalidPotential(SphpendError):
    """Potential fails the admissibility requirements."""


class OutsideFiber(SphpendError):
    """Coordinate outside the classically allowed band of the fiber."""


class BranchExhausted(SphpendError):
    """Requested time passes beyond the current monotone branch."""


class NearSingularFiber(SphpendError):
    """Fiber too close to a singular stratum for reliable evaluation."""


class QuadratureFailure(SphpendError):
    """Adaptive quadrature did not reach the requested accuracy."""


class SectionMissed(SphpendError):
    """Trajectory failed to return to the Poincare section."""


class StepFailure(SphpendError):
    """ODE integrator could not meet its tolerances."""
