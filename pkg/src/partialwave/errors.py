"""Exception types shared by the numerical modules.

ValueError is reserved for violated call preconditions (bad arguments);
the classes below flag conditions discovered *during* a computation, so
callers (in particular the CLI) can map them to a numerical-failure exit
code distinct from configuration errors.
"""


class PartialWaveError(Exception):
    """Base class for runtime numerical/domain failures."""


class GridResolutionError(PartialWaveError):
    """The radial or energy grid is too coarse for the requested feature."""


class MatchingError(PartialWaveError):
    """Asymptotic matching failed (ill-conditioned or out of range)."""


class StructureNotFoundError(PartialWaveError):
    """Expected structure (resonance, sign change, barrier) is absent."""


class NormalizationError(PartialWaveError):
    """Continuum or bound-state normalization could not be established."""


class ConvergenceError(PartialWaveError):
    """An iterative procedure exhausted its iteration budget."""
