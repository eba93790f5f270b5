"""Exception types shared across the package."""


class EnvalgError(Exception):
    """Base class for all package-specific failures."""


class NumericalRankError(EnvalgError):
    """A rank, eigenvalue-cluster or integrality decision could not be made
    reliably at the requested tolerance."""


class CrossCheckError(EnvalgError):
    """Two independent computations of the same object disagree beyond
    tolerance; signals a fault in one of the pipelines."""


class ConstructionError(EnvalgError):
    """A constructive routine produced an object that fails its own
    verification; carries per-block diagnostics when available."""

    def __init__(self, message, block_reports=None):
        super().__init__(message)
        self.block_reports = block_reports or []


class OperatorFileError(EnvalgError):
    """An input file is malformed or fails semantic validation."""
