"""Exception hierarchy for the gpz toolkit.

Every error raised by the library is a subclass of GpzError, so callers can
catch one type at the pipeline boundary. The CLI maps these to exit code 1.
"""


class GpzError(Exception):
    """Base class for all gpz errors."""


class ConfigError(GpzError):
    """Invalid configuration: bad option values, empty pools, out-of-range knobs."""


class FormatError(GpzError):
    """Container is not a gpz file or uses an unsupported version."""


class IntegrityError(GpzError):
    """Data failed verification: CRC/length mismatch or corrupt gzip member."""


class MalformedStreamError(GpzError):
    """Rank or token stream violates its encoding: bad varint, id out of range."""


class ContractViolationError(GpzError):
    """A predictor was driven outside its contract (token out of range,
    protocol violation by an external predictor process)."""


class UndefinedMetricError(GpzError):
    """A benchmark metric is undefined for the given inputs (division by zero)."""
