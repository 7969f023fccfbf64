"""Exception types shared across the package."""


class GaplabError(Exception):
    """Base class for all package errors."""


class ParameterError(GaplabError, ValueError):
    """An argument is outside its admissible range."""


class ResourceLimitError(GaplabError):
    """A dense-matrix operation would exceed the configured size limit."""


class NumericError(GaplabError):
    """A numerical routine failed or produced an inconsistent result."""


class DataError(GaplabError, ValueError):
    """Input data is malformed or internally inconsistent."""


class GapSearchError(GaplabError):
    """Peak search exhausted the maximum window without a local maximum."""
