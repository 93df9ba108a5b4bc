"""Exception types shared across the package."""


class QannealError(Exception):
    """Base class for all package-specific failures."""


class GraphGenerationError(QannealError):
    """Stub pairing failed to produce a simple regular graph within the attempt cap."""


class EigensolverError(QannealError):
    """Iterative eigensolver did not converge to the requested residual."""


class ConvergenceError(QannealError):
    """Time propagation could not meet its per-step tolerance or drifted off norm."""


class DegenerateGroundStateError(QannealError):
    """Ground state is numerically degenerate where a unique one is required."""
