"""Exception hierarchy shared by the library and the command line."""


class CurabeamError(Exception):
    """Base class for all package errors."""


class DomainError(CurabeamError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidGeometryError(CurabeamError, ValueError):
    """Array geometry parameters are inconsistent or out of range."""


class CodebookSizeError(DomainError):
    """A requested codebook would exceed the configured size guard."""


class ConfigError(CurabeamError, ValueError):
    """A run configuration could not be parsed or validated."""
