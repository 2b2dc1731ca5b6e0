"""
Circuit IR over the gate set {single-spin rotation, ZZ coupling, selective rotation}.

Gate lists are stored in temporal order: the first gate acts first on a state,
so the dense form of a circuit is the gate product with later gates on the left.
"""

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Tuple, Union

import numpy as np

try:
    from .errors import CircuitError, CircuitParseError
    from .operators import AXES, DenseOperator
except ImportError:
    from errors import CircuitError, CircuitParseError
    from operators import AXES, DenseOperator

logger = logging.getLogger(__name__)

MAX_DENSE_QUBITS = 12
ORDERINGS = ("binary", "weightlex")

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _check_qubit(q: Any) -> int:
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or q < 1:
        raise CircuitError(f"Qubit indices start at 1, got {q!r}")
    return int(q)


@dataclass(frozen=True)
class SingleSpin:
    """exp(-i*angle*I_{qubit,axis})"""

    qubit: int
    axis: str
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "qubit", _check_qubit(self.qubit))
        if self.axis not in AXES:
            raise CircuitError(f"Unknown rotation axis {self.axis!r}")
        object.__setattr__(self, "angle", float(self.angle))

    @property
    def qubits(self) -> Tuple[int, ...]:
        return (self.qubit,)

    def inverse(self) -> "SingleSpin":
        return SingleSpin(self.qubit, self.axis, -self.angle)

    def matrix(self) -> np.ndarray:
        half = self.angle / 2
        return np.cos(half) * np.eye(2, dtype=complex) - 1j * np.sin(half) * _PAULI[self.axis]


@dataclass(frozen=True)
class Coupling:
    """exp(-i*angle*2*I_kz*I_lz) for qubits k < l."""

    qubits: Tuple[int, int]
    angle: float

    def __post_init__(self):
        pair = tuple(sorted(_check_qubit(q) for q in self.qubits))
        if len(pair) != 2 or pair[0] == pair[1]:
            raise CircuitError(f"Coupling needs two distinct qubits, got {self.qubits}")
        object.__setattr__(self, "qubits", pair)
        object.__setattr__(self, "angle", float(self.angle))

    def inverse(self) -> "Coupling":
        return Coupling(self.qubits, -self.angle)


@dataclass(frozen=True)
class Selective:
    """exp(-i*angle*D) with D projecting the listed qubits onto |labels> (label 0 = spin up)."""

    qubits: Tuple[int, ...]
    labels: Tuple[int, ...]
    angle: float

    def __post_init__(self):
        qubits = [_check_qubit(q) for q in self.qubits]
        labels = [int(a) for a in self.labels]
        if not qubits:
            raise CircuitError("Selective rotation needs at least one qubit")
        if len(qubits) != len(labels):
            raise CircuitError("Selective rotation needs one label per qubit")
        if any(a not in (0, 1) for a in labels):
            raise CircuitError(f"Selective labels must be 0 or 1, got {labels}")
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"Selective qubits must be distinct, got {qubits}")
        order = sorted(range(len(qubits)), key=lambda i: qubits[i])
        object.__setattr__(self, "qubits", tuple(qubits[i] for i in order))
        object.__setattr__(self, "labels", tuple(labels[i] for i in order))
        object.__setattr__(self, "angle", float(self.angle))

    @property
    def size(self) -> int:
        return len(self.qubits)

    def inverse(self) -> "Selective":
        return Selective(self.qubits, self.labels, -self.angle)


Gate = Union[SingleSpin, Coupling, Selective]


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: Tuple[Gate, ...] = ()
    provenance: str = ""
    global_phase: float = 0.0
    basic_ops: int = 0
    ordering: str = "binary"

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise CircuitError(f"Circuit register size must be positive, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "global_phase", float(self.global_phase))
        if self.ordering not in ORDERINGS:
            raise CircuitError(f"Unknown circuit ordering {self.ordering!r}")
        for gate in self.gates:
            if not isinstance(gate, (SingleSpin, Coupling, Selective)):
                raise CircuitError(f"Not a gate: {gate!r}")
            if max(gate.qubits) > self.n:
                raise CircuitError(
                    f"Gate {gate} addresses a qubit outside 1..{self.n}"
                )

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, *others: Union["Circuit", Gate]) -> "Circuit":
        """This circuit followed (in time) by ``others``."""
        return compose(
            self.n,
            (self,) + others,
            provenance=self.provenance,
            ordering=self.ordering,
        )

    def inverse(self) -> "Circuit":
        return replace(
            self,
            gates=tuple(g.inverse() for g in reversed(self.gates)),
            global_phase=-self.global_phase,
        )

    def with_meta(self, **changes: Any) -> "Circuit":
        return replace(self, **changes)


def compose(
    n: int,
    parts: Iterable[Union[Circuit, Gate]],
    provenance: str = "",
    ordering: str = "binary",
    basic_ops: int = None,
) -> Circuit:
    """Concatenate circuits and bare gates in temporal order.

    Global phases and basic-operation tallies of sub-circuits add up unless
    ``basic_ops`` is given explicitly.
    """
    gates: List[Gate] = []
    phase = 0.0
    ops = 0
    for part in parts:
        if isinstance(part, Circuit):
            if part.n != n:
                raise CircuitError(f"Cannot splice a {part.n}-qubit circuit into {n} qubits")
            gates.extend(part.gates)
            phase += part.global_phase
            ops += part.basic_ops
        else:
            gates.append(part)
    return Circuit(
        n=n,
        gates=tuple(gates),
        provenance=provenance,
        global_phase=phase,
        basic_ops=ops if basic_ops is None else basic_ops,
        ordering=ordering,
    )


@dataclass
class GateCountReport:
    single: int = 0
    coupling: int = 0
    selective: int = 0
    selective_by_size: Dict[int, int] = field(default_factory=dict)
    total: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "single": self.single,
            "coupling": self.coupling,
            "selective": self.selective,
            "selective_by_size": {str(k): v for k, v in sorted(self.selective_by_size.items())},
            "total": self.total,
        }


def count(c: Circuit) -> GateCountReport:
    by_size: Counter = Counter()
    report = GateCountReport()
    for gate in c.gates:
        if isinstance(gate, SingleSpin):
            report.single += 1
        elif isinstance(gate, Coupling):
            report.coupling += 1
        else:
            report.selective += 1
            by_size[gate.size] += 1
    report.selective_by_size = dict(sorted(by_size.items()))
    report.total = len(c.gates)
    return report


def _bits(n: int, qubit: int) -> np.ndarray:
    return (np.arange(2**n) >> (n - qubit)) & 1


def _diagonal(gate: Gate, n: int) -> np.ndarray:
    if isinstance(gate, Coupling):
        k, l = gate.qubits
        zz = (1 - 2 * _bits(n, k)) * (1 - 2 * _bits(n, l))
        return np.exp(-0.5j * gate.angle * zz)
    mask = np.ones(2**n, dtype=bool)
    for q, a in zip(gate.qubits, gate.labels):
        mask &= _bits(n, q) == a
    return np.where(mask, np.exp(-1j * gate.angle), 1.0 + 0j)


def _apply_gate(block: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one gate to a vector (N,) or to the columns of an (N, c) array."""
    if isinstance(gate, SingleSpin):
        cols = block.reshape(2 ** (gate.qubit - 1), 2, 2 ** (n - gate.qubit), -1)
        out = np.einsum("ab,xbyc->xayc", gate.matrix(), cols)
        return out.reshape(block.shape)
    diag = _diagonal(gate, n)
    return diag * block if block.ndim == 1 else diag[:, None] * block


def _check_dense(n: int) -> None:
    if n > MAX_DENSE_QUBITS:
        raise CircuitError(f"Dense evaluation is limited to n <= {MAX_DENSE_QUBITS}, got {n}")


def gate_to_dense(g: Gate, n: int) -> DenseOperator:
    _check_dense(n)
    if max(g.qubits) > n:
        raise CircuitError(f"Gate {g} addresses a qubit outside 1..{n}")
    return _apply_gate(np.eye(2**n, dtype=complex), g, n)


def circuit_to_dense(c: Circuit) -> DenseOperator:
    _check_dense(c.n)
    U = np.eye(2**c.n, dtype=complex)
    for gate in c.gates:
        U = _apply_gate(U, gate, c.n)
    return np.exp(1j * c.global_phase) * U


def apply_to_state(c: Circuit, v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (2**c.n,):
        raise CircuitError(f"State has shape {v.shape}, expected ({2**c.n},)")
    out = v.copy()
    for gate in c.gates:
        out = _apply_gate(out, gate, c.n)
    return np.exp(1j * c.global_phase) * out


### SERIALIZATION ###


def _gate_to_dict(gate: Gate) -> Dict[str, Any]:
    if isinstance(gate, SingleSpin):
        return {"gate": "single", "qubit": gate.qubit, "axis": gate.axis, "angle": gate.angle}
    if isinstance(gate, Coupling):
        return {"gate": "zz", "qubits": list(gate.qubits), "angle": gate.angle}
    return {
        "gate": "sel",
        "qubits": list(gate.qubits),
        "labels": list(gate.labels),
        "angle": gate.angle,
    }


def serialize(c: Circuit) -> bytes:
    """JSON encoding; floats use the shortest repr that round-trips exactly."""
    doc = {
        "n": c.n,
        "provenance": c.provenance,
        "ordering": c.ordering,
        "global_phase": c.global_phase,
        "basic_ops": c.basic_ops,
        "gates": [_gate_to_dict(g) for g in c.gates],
    }
    return (json.dumps(doc, indent=2, allow_nan=False) + "\n").encode("utf-8")


def _byte_offset(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


def _locate(text: str, needle: str, start: int = 0) -> int:
    pos = text.find(needle, start)
    return _byte_offset(text, pos) if pos >= 0 else None


def _angle(obj: Dict[str, Any]) -> float:
    angle = obj.get("angle")
    if isinstance(angle, bool) or not isinstance(angle, (int, float)):
        raise ValueError(f"angle must be a number, got {angle!r}")
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    return float(angle)


def _gate_from_dict(obj: Any) -> Gate:
    if not isinstance(obj, dict):
        raise ValueError(f"gate entry must be an object, got {type(obj).__name__}")
    kind = obj.get("gate")
    if kind == "single":
        return SingleSpin(obj["qubit"], obj["axis"], _angle(obj))
    if kind == "zz":
        return Coupling(tuple(obj["qubits"]), _angle(obj))
    if kind == "sel":
        return Selective(tuple(obj["qubits"]), tuple(obj["labels"]), _angle(obj))
    raise ValueError(f"unknown gate {kind!r}")


def deserialize(data: Union[bytes, str]) -> Circuit:
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CircuitParseError(f"invalid UTF-8: {e.reason}", e.start) from e
    else:
        text = data

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitParseError(e.msg, _byte_offset(text, e.pos)) from e

    if not isinstance(doc, dict):
        raise CircuitParseError("top level must be an object", 0)
    for key in ("n", "gates"):
        if key not in doc:
            raise CircuitParseError(f"missing key {key!r}", 0)
    if not isinstance(doc["gates"], list):
        raise CircuitParseError("'gates' must be a list", _locate(text, '"gates"'))
    phase = doc.get("global_phase", 0.0)
    if isinstance(phase, bool) or not isinstance(phase, (int, float)) or not math.isfinite(phase):
        raise CircuitParseError(
            f"global_phase must be a finite number, got {phase!r}", _locate(text, '"global_phase"')
        )

    gates: List[Gate] = []
    search_from = text.find('"gates"')
    for i, obj in enumerate(doc["gates"]):
        # offsets point at the i-th gate object's "gate" key
        pos = text.find('"gate"', search_from + 1)
        if pos >= 0:
            search_from = pos
        try:
            gates.append(_gate_from_dict(obj))
        except (KeyError, TypeError, ValueError) as e:
            reason = f"missing field {e}" if isinstance(e, KeyError) else str(e)
            raise CircuitParseError(
                f"gate #{i}: {reason}", _byte_offset(text, pos) if pos >= 0 else None
            ) from e

    try:
        return Circuit(
            n=doc["n"],
            gates=tuple(gates),
            provenance=str(doc.get("provenance", "")),
            global_phase=float(phase),
            basic_ops=int(doc.get("basic_ops", 0)),
            ordering=str(doc.get("ordering", "binary")),
        )
    except (CircuitError, TypeError, ValueError) as e:
        raise CircuitParseError(str(e), 0) from e
