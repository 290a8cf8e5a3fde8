"""Exception types shared across the package."""


class XebLabError(Exception):
    """Base class for all xeblab errors."""


class ConfigError(XebLabError, ValueError):
    """Invalid experiment configuration (topology dimensions, bad flag combinations)."""


class ParseError(XebLabError, ValueError):
    """Malformed text input; carries the offending 1-based line number."""

    def __init__(self, line_number: int, reason: str):
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"line {line_number}: {reason}")


class ResourceLimitError(XebLabError, RuntimeError):
    """Request exceeds the configured qubit/memory budget."""


class DomainError(XebLabError, ValueError):
    """Numeric argument outside the mathematical domain of an operation."""
