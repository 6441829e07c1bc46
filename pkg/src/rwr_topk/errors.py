"""Exception types shared across the package."""


class RwrError(Exception):
    """Base class for all package errors."""


class EdgeListParseError(RwrError):
    """Malformed edge-list input; carries the 1-based line number."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class GraphValidationError(RwrError):
    """Graph content violates an invariant (e.g. non-positive weight)."""


class ParameterError(RwrError):
    """Out-of-range parameter such as the restart probability or K."""


class FactorizationError(RwrError):
    """Numerically broken pivot during LU; signals upstream corruption."""


class UnknownNodeError(RwrError):
    """Query node label or id not present in the graph/index."""


class VisitOrderError(RwrError):
    """Incremental estimator fed nodes outside (layer, id) order."""


class IndexFormatError(RwrError):
    """On-disk index is truncated, corrupted, or has the wrong version."""
