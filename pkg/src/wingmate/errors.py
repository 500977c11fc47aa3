"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates a documented precondition."""


class SizeLimitError(ValueError):
    """The input is larger (or smaller) than an exhaustive routine supports."""


class InstanceParseError(ValueError):
    """An instance or solution file could not be parsed.

    ``line`` and ``field`` point at the offending location when known.
    """

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.field = field


class InstanceValidationError(ValueError):
    """A parsed instance violates an Instance invariant."""


class ConfigError(ValueError):
    """A benchmark configuration is unusable."""
