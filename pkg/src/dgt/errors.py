"""Exception types shared across the package."""


class DgtError(Exception):
    """Base class for all package errors."""


class FormatError(DgtError, ValueError):
    """Malformed input data (edge lists, node lists, ground-truth files)."""


class ConfigError(DgtError, ValueError):
    """Invalid configuration or incompatible option combination."""


class PreconditionError(DgtError, ValueError):
    """An operation was called with arguments violating its contract."""


class EmptyGraphError(DgtError, ValueError):
    """A snapshot with no edges reached a computation that divides by m."""


class AuditError(DgtError, RuntimeError):
    """A community structure failed its internal consistency audit."""


class MetricsError(DgtError, ValueError):
    """Metric inputs are incompatible (mismatched node sets, lengths)."""
