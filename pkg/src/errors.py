"""Exception hierarchy shared by every mqsynth module."""

from typing import Optional


class MqSynthError(Exception):
    """Base class for all errors raised by mqsynth."""


class LayoutError(MqSynthError, ValueError):
    """Invalid qubit count, basis index or subspace index."""


class OperatorError(MqSynthError, ValueError):
    """Dimension mismatch, non-Hermitian input or malformed product term."""


class CircuitError(MqSynthError, ValueError):
    """Invalid gate definition or qubit index outside the register."""


class CircuitParseError(CircuitError):
    """Malformed circuit file; ``offset`` is the byte offset of the problem."""

    def __init__(self, reason: str, offset: Optional[int] = None):
        self.reason = reason
        self.offset = offset
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"Circuit parse error{where}: {reason}")


class SynthesisError(MqSynthError, ValueError):
    """A synthesis routine was asked for something it cannot build."""


class TransferError(MqSynthError, ValueError):
    """Invalid subspace transfer request or input state."""


class ConfigError(MqSynthError, ValueError):
    """Invalid sweep configuration or infeasible claim request."""
