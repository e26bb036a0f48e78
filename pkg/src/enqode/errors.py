"""Exception types shared across the toolkit."""


class EnqodeError(ValueError):
    """Base class for all toolkit errors."""


class CapacityError(EnqodeError):
    """Requested register or state size exceeds the simulator cap."""


class CircuitError(EnqodeError):
    """Malformed circuit or qubit-count mismatch between circuit and state."""


class EncodingError(EnqodeError):
    """Data violates the domain of the requested encoding."""


class DecodeError(EnqodeError):
    """State is not representable in the encoding offered for decoding."""


class NotDeterministicError(EnqodeError):
    """A single-shot readout was requested on a superposed register."""


class CompatibilityError(EnqodeError):
    """A function oracle is not compatible with the domain mapping in use."""


class PipelineSyntaxError(EnqodeError):
    """Pipeline source text failed to parse.

    Carries 1-based ``line`` and ``column`` of the offending token.
    """

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
