"""Exception hierarchy shared by every ggvol module."""


class GGVolError(Exception):
    """Base class for all ggvol errors."""


class StructuralError(GGVolError):
    """Malformed data: unknown generator, dangling edge, disconnected graph."""


class ResourceError(GGVolError):
    """A configured cap was exceeded.

    ``cap_name`` and ``cap_value`` identify the cap so the CLI can report it.
    """

    def __init__(self, message, cap_name=None, cap_value=None):
        super().__init__(message)
        self.cap_name = cap_name
        self.cap_value = cap_value


class InvalidMarkingError(GGVolError):
    """Marking words are inconsistent inside some finite quotient."""


class UnsupportedConfigurationError(GGVolError):
    """A kind combination for which no sound rule is implemented."""


class PreconditionError(GGVolError):
    """An operation was called outside its documented domain."""


class ConfigurationError(GGVolError):
    """Bad run configuration (missing phi rule, unknown table, bad caps)."""


class Inapplicable(GGVolError):
    """A check whose hypotheses do not hold for the given input.

    Distinct from a failed check: callers report it as skipped.
    """


class ParseError(GGVolError):
    """Input document violates the declarative format."""

    def __init__(self, message, location=None):
        if location:
            message = f"{location}: {message}"
        super().__init__(message)
        self.location = location
