"""Exception hierarchy shared across the package."""


class LdpidsError(Exception):
    """Base class for all package errors."""


class InvalidBudget(LdpidsError, ValueError):
    pass


class InvalidFrequency(LdpidsError, ValueError):
    pass


class IndexOutOfRange(LdpidsError, IndexError):
    pass


class EmptyCohort(LdpidsError, ValueError):
    """Raised when an estimate is requested from zero reports."""


class LengthMismatch(LdpidsError, ValueError):
    pass


class InvalidParams(LdpidsError, ValueError):
    pass


class OutOfOrderTimestamp(LdpidsError, ValueError):
    pass


class PoolExhausted(LdpidsError, RuntimeError):
    """The user pool cannot supply a cohort.

    Correct window accounting makes this unreachable, so it always signals a bug.
    """


class DegenerateSeries(LdpidsError, ValueError):
    pass


class DatasetLoadError(LdpidsError, ValueError):
    pass


class MalformedRow(DatasetLoadError):
    pass


class UnknownLabel(DatasetLoadError):
    pass


class EmptyFile(DatasetLoadError):
    pass


class ConfigError(LdpidsError, ValueError):
    pass


class MissingMetadata(LdpidsError, FileNotFoundError):
    pass
