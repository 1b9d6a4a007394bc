"""Exception types shared across the package."""


class BowtieError(Exception):
    """Base class for all errors raised by this package."""


class GraphInputError(BowtieError):
    """Malformed input data (bad CSV row, unknown label, negative value).

    Carries the 1-based line number of the offending row when the error
    originates from a file, else ``line is None``.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(BowtieError):
    """A graph failed validation and a downstream operation refused to run.

    The offending :class:`~bowtie_centrality.graph.ValidationReport` is
    attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SolverError(BowtieError):
    """A linear solve or iteration failed to meet its convergence contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PathExplosionError(BowtieError):
    """Exhaustive path enumeration would exceed the configured budget."""


class InfluenceTimeoutError(BowtieError):
    """Influence-index traversal exceeded the configured wall-clock budget."""
