"""
Elementary propagators compiled into the gate set.

Covers the multi-body ZZ recursion, zero-quantum swaps, relabeling of
selective rotations onto qubits 1..m, and the three classes of basic unitary
exp(-i*theta*Q) for a single product term Q.
"""

import logging
from dataclasses import dataclass
from math import pi
from typing import Dict, List, Sequence, Tuple

try:
    from .circuit import Circuit, Coupling, Gate, Selective, SingleSpin, compose
    from .errors import SynthesisError
    from .operators import ProductTerm, SpinFactor
except ImportError:
    from circuit import Circuit, Coupling, Gate, Selective, SingleSpin, compose
    from errors import SynthesisError
    from operators import ProductTerm, SpinFactor

logger = logging.getLogger(__name__)

# R with R I_z R^+ = I_axis, as (rotation axis, angle)
_TO_AXIS: Dict[str, Tuple[str, float]] = {
    "x": ("y", pi / 2),
    "y": ("x", -pi / 2),
}


def _rotation(qubit: int, axis: str) -> SingleSpin:
    about, angle = _TO_AXIS[axis]
    return SingleSpin(qubit, about, angle)


def _check_indices(indices: Sequence[int], n: int) -> List[int]:
    ks = sorted(int(k) for k in indices)
    if len(set(ks)) != len(ks):
        raise SynthesisError(f"Duplicate qubit indices: {list(indices)}")
    if not ks:
        raise SynthesisError("At least one qubit index is required")
    if ks[0] < 1 or ks[-1] > n:
        raise SynthesisError(f"Qubit indices {ks} outside 1..{n}")
    return ks


def _ladder_step(a: int, b: int) -> List[Gate]:
    """A with A I_az A^+ = 2 I_az I_bz, temporal order."""
    return [SingleSpin(a, "y", pi / 2), Coupling((a, b), pi / 2), SingleSpin(a, "x", pi / 2)]


def _ladder_step_inverse(a: int, b: int) -> List[Gate]:
    return [g.inverse() for g in reversed(_ladder_step(a, b))]


def _multibody_gates(ks: List[int], theta: float) -> List[Gate]:
    if len(ks) == 1:
        return [SingleSpin(ks[0], "z", theta)]
    if len(ks) == 2:
        return [Coupling((ks[0], ks[1]), theta)]
    a, b = ks[-2], ks[-1]
    return _ladder_step_inverse(a, b) + _multibody_gates(ks[:-1], theta) + _ladder_step(a, b)


def synth_multibody_zz(indices: Sequence[int], theta: float, n: int) -> Circuit:
    """exp(-i*theta*2^(m-1)*I_k1z*...*I_kmz) with 6(m-2)+1 gates for m > 2."""
    ks = _check_indices(indices, n)
    gates = _multibody_gates(ks, float(theta))
    logger.debug(f"multibody ZZ on {ks}: {len(gates)} gates")
    return Circuit(n=n, gates=tuple(gates), provenance="multibody_zz", basic_ops=1)


@dataclass(frozen=True)
class ZeroQuantumSwap:
    """V_kl(theta) = exp(-i*theta*I_kx*I_ly) * exp(i*theta*I_ky*I_lx)."""

    k: int
    l: int
    angle: float

    def __post_init__(self):
        if self.k == self.l:
            raise SynthesisError(f"Zero-quantum swap needs distinct qubits, got {self.k}")

    def gates(self) -> List[Gate]:
        if self.angle == 0.0:
            return []
        k, l, half = self.k, self.l, self.angle / 2
        # exp(i*theta*I_ky*I_lx): rotate z->y on k and z->x on l around a ZZ coupling
        yx = [
            SingleSpin(k, "x", pi / 2),
            SingleSpin(l, "y", -pi / 2),
            Coupling((k, l), -half),
            SingleSpin(k, "x", -pi / 2),
            SingleSpin(l, "y", pi / 2),
        ]
        # exp(-i*theta*I_kx*I_ly)
        xy = [
            SingleSpin(k, "y", -pi / 2),
            SingleSpin(l, "x", pi / 2),
            Coupling((k, l), half),
            SingleSpin(k, "y", pi / 2),
            SingleSpin(l, "x", -pi / 2),
        ]
        return yx + xy


def synth_zero_quantum(k: int, l: int, theta: float, n: int) -> Circuit:
    _check_indices([k, l], n)
    swap = ZeroQuantumSwap(int(k), int(l), float(theta))
    return Circuit(n=n, gates=tuple(swap.gates()), provenance="zero_quantum")


def normalize_selective(
    subset: Sequence[int], labels: Sequence[int], n: int, theta: float = 0.0
) -> Tuple[Circuit, Selective, Circuit]:
    """Relabel a selective rotation onto qubits 1..m with all-zero labels.

    Returns (pre, canonical, post) such that running pre, then canonical, then
    post equals Selective(subset, labels, theta). Label-1 qubits are flipped
    with x pi pulses; qubits outside 1..m are moved in with V(pi) swaps.
    """
    ks = _check_indices(subset, n)
    if len(labels) != len(ks):
        raise SynthesisError("Selective relabeling needs one label per qubit")
    label_of = dict(zip((int(q) for q in subset), (int(a) for a in labels)))
    m = len(ks)

    pre: List[Gate] = [SingleSpin(q, "x", pi) for q in ks if label_of[q] == 1]
    missing = [t for t in range(1, m + 1) if t not in label_of]
    outside = [s for s in ks if s > m]
    for t, s in zip(missing, outside):
        # V(t,s,pi)^+ carries I_sz onto I_tz
        pre.extend(ZeroQuantumSwap(t, s, -pi).gates())

    pre_circuit = Circuit(n=n, gates=tuple(pre), provenance="selective_relabel")
    canonical = Selective(tuple(range(1, m + 1)), (0,) * m, float(theta))
    return pre_circuit, canonical, pre_circuit.inverse()


def synth_selective(
    subset: Sequence[int], labels: Sequence[int], theta: float, n: int
) -> Circuit:
    pre, canonical, post = normalize_selective(subset, labels, n, theta)
    return compose(n, (pre, canonical, post), provenance="selective")


def classify_term(term: ProductTerm) -> str:
    """Structural class of a product term: Q_a, Q_b, Q_c, or identity."""
    has_transverse = any(f.is_transverse for f in term.factors)
    has_projector = any(f.is_projector for f in term.factors)
    if has_transverse and has_projector:
        return "Q_c"
    if has_transverse:
        return "Q_a"
    if has_projector:
        return "Q_b"
    return "identity"


def synth_basic_unitary(term: ProductTerm, theta: float, n: int) -> Circuit:
    """exp(-i*theta*term) for one Hermitian product term.

    Single-spin rotations take every x/y factor to z, then the z-frame core is
    a multibody ZZ rotation, a selective rotation, or (for mixed terms) a
    selective pair sandwiched by the ZZ ladder.
    """
    if term.n != n:
        raise SynthesisError(f"Term acts on {term.n} qubits, register has {n}")
    if not term.is_hermitian:
        raise SynthesisError(f"Term coefficient {term.coefficient} is not real")
    c = term.coefficient.real
    kind = classify_term(term)
    angle = c * float(theta)

    if kind == "identity":
        return Circuit(n=n, provenance="basic_unitary", global_phase=-angle, basic_ops=1)

    transverse: List[int] = []
    projectors: List[int] = []
    labels: List[int] = []
    rotated: List[Tuple[int, SpinFactor]] = []
    for q, f in enumerate(term.factors, start=1):
        if f.is_identity:
            continue
        if f.axis != "z":
            rotated.append((q, f))
        if f.is_transverse:
            transverse.append(q)
        else:
            projectors.append(q)
            labels.append(0 if f.sign == 1 else 1)

    if kind == "Q_a" and len(transverse) == 1:
        q = transverse[0]
        gate = SingleSpin(q, term.factors[q - 1].axis, angle)
        return Circuit(n=n, gates=(gate,), provenance="basic_unitary", basic_ops=1)

    to_z = [_rotation(q, f.axis).inverse() for q, f in rotated]
    from_z = [_rotation(q, f.axis) for q, f in rotated]

    m = len(transverse)
    if kind == "Q_a":
        core = synth_multibody_zz(transverse, angle / 2 ** (m - 1), n)
    elif kind == "Q_b":
        core = synth_selective(projectors, labels, angle, n)
    else:
        # c*I_t1z*...*D_P = c'*M (I_t1z (x) D_P) M^+ with M the ZZ ladder,
        # and I_t1z (x) D_P = D_{t1 u P} - D_P/2
        scaled = angle / 2 ** (m - 1)
        ladder_in: List[Gate] = []
        ladder_out: List[Gate] = []
        for j in range(m - 1, 0, -1):
            ladder_in.extend(_ladder_step_inverse(transverse[j - 1], transverse[j]))
        for j in range(1, m):
            ladder_out.extend(_ladder_step(transverse[j - 1], transverse[j]))
        joint = sorted([(transverse[0], 0)] + list(zip(projectors, labels)))
        core = compose(
            n,
            [
                *ladder_in,
                synth_selective([q for q, _ in joint], [a for _, a in joint], scaled, n),
                synth_selective(projectors, labels, -scaled / 2, n),
                *ladder_out,
            ],
        )

    logger.debug(f"basic unitary {term!r}: class {kind}, {len(rotated)} axis rotations")
    return compose(
        n, [*to_z, core, *from_z], provenance="basic_unitary", basic_ops=1
    )
