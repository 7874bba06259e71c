"""Exception hierarchy shared across the solvers and the CLI."""


class PseudoPTError(Exception):
    """Base class for all package-specific failures."""


class SchemaError(PseudoPTError):
    """Config file violates the documented schema.

    The message carries ``file:line`` anchors where the offending node is known.
    """


class SolverError(PseudoPTError):
    """A solve could not be completed or failed its internal checks."""


class ConvergenceError(SolverError):
    """Grid refinement or iteration did not converge within its budget."""


class RealityToleranceError(SolverError):
    """An eigenvalue expected to be real (unbroken symmetry) has excessive
    imaginary part, or the relativistic reality condition lambda + M^2 > 0
    is violated."""


class NormalizationUnderflowError(SolverError):
    """A normalization integral underflowed (tiny eigenfunction magnitude)."""


class NoPeriodicSolutionError(SolverError):
    """No single-valued periodic solution exists for the requested sector."""


class ExclusionZoneError(SolverError):
    """Too much of a grid falls inside a division exclusion zone."""


class BoundStateError(SolverError):
    """Requested bound states are absent or the radial box is too small."""
