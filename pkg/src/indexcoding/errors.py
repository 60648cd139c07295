"""Exception types shared across the package."""


class IndexCodingError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(IndexCodingError, ValueError):
    """Malformed or non-finite input at an API boundary."""


class RankDeficiencyError(IndexCodingError):
    """A factor or Gram matrix is numerically rank-deficient."""


class RetractionFailureError(IndexCodingError):
    """Additive factor update produced a rank-deficient point."""


class NumericalFailureError(IndexCodingError):
    """A solver encountered non-finite values or exceeded safety guards."""


class InfeasibleRowError(IndexCodingError):
    """A row subproblem has no feasible point (zero anchor row)."""


class PipelineError(IndexCodingError):
    """All restarts of a pipeline stage failed."""
