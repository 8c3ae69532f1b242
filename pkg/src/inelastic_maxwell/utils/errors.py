from typing import Optional


class InelasticMaxwellError(Exception):
    """Base class for errors raised by this package."""


class ArgumentError(InelasticMaxwellError, ValueError):
    """A function received arguments outside its domain."""


class ConfigurationError(InelasticMaxwellError, ValueError):
    """A model, cross-section or experiment file is invalid.

    Args:
        message (str): Human readable diagnostic
        key (str, optional): Offending configuration key
        line (int, optional): Line of the key in the source file
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = ""
        if key is not None:
            location = f"'{key}'"
            if line is not None:
                location += f" (line {line})"
            location += ": "
        super().__init__(f"{location}{message}")


class InternalError(InelasticMaxwellError, RuntimeError):
    """A state that valid inputs cannot produce."""
