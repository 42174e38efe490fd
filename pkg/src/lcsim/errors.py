"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so the service layer
can map failures onto structured JSON without string matching.
"""
from __future__ import annotations


class LcsimError(Exception):
    """Base class for all package errors."""

    code = "error"


class SizeLimitError(LcsimError):
    """A register would exceed the configured dense-vector qubit limit."""

    code = "size_limit"

    def __init__(self, requested: int, limit: int):
        self.requested = requested
        self.limit = limit
        super().__init__(
            f"register of {requested} qubits exceeds the dense-vector limit of {limit}"
        )


class UnknownLabelError(LcsimError, LookupError):
    """A qubit label is not present in the register or chain."""

    code = "unknown_label"

    def __init__(self, label: int):
        self.label = label
        super().__init__(f"unknown qubit label {label}")


class ImpossibleOutcomeError(LcsimError):
    """Projection onto an outcome whose probability is numerically zero."""

    code = "impossible_outcome"


class UnsupportedCompositionError(LcsimError):
    """The symbolic rule set is not closed for this target.

    Raised when measuring inside a segment that carries a correlated splice
    bond; the dense statevector path remains available (hybrid fallback).
    """

    code = "unsupported_composition"


class UnsupportedBasisError(LcsimError):
    """A basis outside the supported rule set for this target class."""

    code = "unsupported_basis"


class RingStateError(LcsimError):
    """Surgery was requested on a ring that is no longer present."""

    code = "ring_state"


class ScriptError(LcsimError):
    """Measurement-script syntax error with source location."""

    code = "script_error"

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
