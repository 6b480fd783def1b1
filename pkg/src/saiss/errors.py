"""Exception types raised by the saiss package."""


class SaissError(Exception):
    """Base class for all saiss errors."""


class DomainError(SaissError):
    """A query point or particle lies outside the computational domain."""


class SingularGradientError(SaissError):
    """The level-set gradient vanishes where a normal direction is needed."""


class ProjectionError(SaissError):
    """Closest-point projection failed to converge.

    Carries residual diagnostics for the worst offending point.
    """

    def __init__(self, message, residual=None, point=None):
        super().__init__(message)
        self.residual = residual
        self.point = point


class TopologyError(SaissError):
    """Mesh is not closed (boundary or non-manifold edge found)."""


class MeshValidationError(SaissError):
    """Mesh fails basic validity checks (bad indices, degenerate triangles)."""


class FitError(SaissError):
    """Local polynomial fit is underdetermined or rank-deficient."""


class NeighborQueryError(SaissError):
    """Neighbor query radius exceeds what the cell index supports."""


class IsolatedParticleError(SaissError):
    """A particle has no neighbor where the operation requires one."""


class HullError(SaissError):
    """Convex hull construction failed (degenerate input)."""


class ConfigError(SaissError):
    """Run configuration is missing fields or fails validation."""


class NonConvergenceError(SaissError):
    """The optimizer exceeded its iteration caps.

    The partially optimized state and full traces are attached so the run
    can be inspected.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state
