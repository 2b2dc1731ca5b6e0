"""
Tests for the circuit IR: gates, composition, dense evaluation and JSON files.
"""

import itertools
import json

import pytest
import numpy as np
from scipy.linalg import expm

from src.circuit import (
    Circuit,
    Coupling,
    Selective,
    SingleSpin,
    apply_to_state,
    circuit_to_dense,
    compose,
    count,
    deserialize,
    gate_to_dense,
    serialize,
)
from src.elementary import synth_multibody_zz
from src.errors import CircuitError, CircuitParseError
from src.operators import IX, IY, IZ, E, ProductTerm, lower, max_distance


def _single_qubit_generator(axis_factor, qubit, n):
    return lower(ProductTerm(1, tuple(axis_factor if q == qubit else E for q in range(1, n + 1))))


class TestGates:
    """Gate validation and dense forms."""

    @pytest.mark.parametrize("axis,factor", [("x", IX), ("y", IY), ("z", IZ)])
    def test_single_spin_matches_expm(self, axis, factor):
        """SingleSpin is exp(-i*theta*I_axis) on its qubit."""
        theta = 0.83
        U = gate_to_dense(SingleSpin(2, axis, theta), 3)
        assert max_distance(U, expm(-1j * theta * _single_qubit_generator(factor, 2, 3))) < 1e-12

    def test_coupling_phases(self):
        """Coupling{1,2} is diag(e^{-i t/2}, e^{i t/2}, e^{i t/2}, e^{-i t/2})."""
        theta = 0.6
        U = gate_to_dense(Coupling((1, 2), theta), 2)
        expected = np.exp(-0.5j * theta * np.array([1, -1, -1, 1]))
        assert np.allclose(U, np.diag(expected))

    def test_selective_on_ground_state(self):
        """Selective on all qubits with zero labels phases |00> only."""
        theta = 1.1
        U = gate_to_dense(Selective((1, 2), (0, 0), theta), 2)
        assert np.allclose(U, np.diag([np.exp(-1j * theta), 1, 1, 1]))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_selective_labels_are_distinct(self, n):
        """Every (qubits, labels) choice gives its own matrix."""
        seen = []
        for size in range(1, n + 1):
            for qubits in itertools.combinations(range(1, n + 1), size):
                for labels in itertools.product((0, 1), repeat=size):
                    seen.append(gate_to_dense(Selective(qubits, labels, 0.9), n))
        for i, A in enumerate(seen):
            for B in seen[i + 1 :]:
                assert max_distance(A, B) > 0.1

    def test_selective_sorts_qubits(self):
        """Qubits are stored ascending with their labels carried along."""
        gate = Selective((3, 1), (1, 0), 0.2)
        assert gate.qubits == (1, 3)
        assert gate.labels == (0, 1)

    @pytest.mark.parametrize(
        "build",
        [
            lambda: SingleSpin(0, "x", 1.0),
            lambda: SingleSpin(1, "w", 1.0),
            lambda: Coupling((2, 2), 1.0),
            lambda: Selective((), (), 1.0),
            lambda: Selective((1, 2), (0,), 1.0),
            lambda: Selective((1,), (2,), 1.0),
            lambda: Selective((1, 1), (0, 0), 1.0),
        ],
    )
    def test_invalid_gates(self, build):
        """Malformed gates raise CircuitError."""
        with pytest.raises(CircuitError):
            build()

    def test_gate_outside_register(self):
        """A circuit refuses gates beyond its qubit count."""
        with pytest.raises(CircuitError):
            Circuit(n=2, gates=(SingleSpin(3, "x", 1.0),))

    def test_bad_ordering(self):
        """Only binary and weightlex frames exist."""
        with pytest.raises(CircuitError):
            Circuit(n=1, ordering="gray")


class TestComposition:
    """Temporal order, inverses and metadata."""

    def test_empty_circuit_is_identity(self):
        """No gates, no phase -> identity."""
        assert np.allclose(circuit_to_dense(Circuit(n=2)), np.eye(4))

    def test_later_gates_multiply_on_the_left(self):
        """Dense form of [A, B] is B @ A."""
        a, b = SingleSpin(1, "x", 0.3), SingleSpin(1, "y", 0.5)
        U = circuit_to_dense(Circuit(n=1, gates=(a, b)))
        assert np.allclose(U, gate_to_dense(b, 1) @ gate_to_dense(a, 1))

    def test_inverse(self):
        """A circuit followed by its inverse is the identity, phase included."""
        c = Circuit(
            n=2,
            gates=(SingleSpin(1, "x", 0.3), Coupling((1, 2), 0.9), Selective((2,), (1,), 0.4)),
            global_phase=0.25,
        )
        assert np.allclose(circuit_to_dense(c.then(c.inverse())), np.eye(4))

    def test_compose_sums_metadata(self):
        """Phases and basic-operation tallies add up."""
        a = Circuit(n=2, gates=(SingleSpin(1, "z", 0.1),), global_phase=0.5, basic_ops=2)
        b = Circuit(n=2, global_phase=-0.2, basic_ops=3)
        c = compose(2, [a, Coupling((1, 2), 0.3), b], provenance="test")
        assert len(c) == 2
        assert c.global_phase == pytest.approx(0.3)
        assert c.basic_ops == 5
        assert c.provenance == "test"

    def test_compose_rejects_other_register(self):
        """Sub-circuits must share the register."""
        with pytest.raises(CircuitError):
            compose(3, [Circuit(n=2)])

    def test_global_phase_in_dense(self):
        """The dense form carries e^{i*global_phase}."""
        c = Circuit(n=1, global_phase=np.pi / 2)
        assert np.allclose(circuit_to_dense(c), 1j * np.eye(2))

    def test_apply_matches_dense(self, rng):
        """State application equals dense matrix times vector."""
        circuit = synth_multibody_zz([1, 2, 3], 0.7, 3).then(SingleSpin(2, "y", 0.4))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert np.allclose(apply_to_state(circuit, v), circuit_to_dense(circuit) @ v)

    def test_apply_preserves_norm(self, rng):
        """Gate application is unitary on states."""
        circuit = synth_multibody_zz([1, 3], 1.3, 3).then(Selective((1, 2), (1, 0), 0.9))
        circuit = circuit.then(SingleSpin(3, "x", 2.2))
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        v /= np.linalg.norm(v)
        assert np.linalg.norm(apply_to_state(circuit, v)) == pytest.approx(1.0)

    def test_apply_shape_check(self):
        """State length must be 2^n."""
        with pytest.raises(CircuitError):
            apply_to_state(Circuit(n=2), np.ones(3))

    def test_dense_limit(self):
        """Dense evaluation stops at 12 qubits."""
        with pytest.raises(CircuitError):
            circuit_to_dense(Circuit(n=13))


class TestCount:
    """Gate counts by kind."""

    def test_empty(self):
        """Empty circuit counts zero everywhere."""
        report = count(Circuit(n=1))
        assert report.total == 0
        assert report.to_dict()["selective_by_size"] == {}

    @pytest.mark.parametrize("m,total", [(3, 7), (4, 13)])
    def test_multibody_counts(self, m, total):
        """Multibody ZZ uses 6(m-2)+1 gates."""
        assert count(synth_multibody_zz(range(1, m + 1), 0.5, m)).total == total

    def test_selective_sizes(self):
        """Selective gates are binned by size."""
        c = Circuit(
            n=3,
            gates=(Selective((1,), (0,), 1), Selective((1, 2), (0, 1), 1), Selective((2, 3), (0, 0), 1)),
        )
        report = count(c)
        assert report.selective == 3
        assert report.selective_by_size == {1: 1, 2: 2}


class TestSerialization:
    """JSON encoding and decoding."""

    def test_single_gate_schema(self):
        """A SingleSpin gate becomes a 'single' object."""
        doc = json.loads(serialize(Circuit(n=1, gates=(SingleSpin(1, "x", 0.5),))))
        assert doc["gates"] == [{"gate": "single", "qubit": 1, "axis": "x", "angle": 0.5}]
        assert doc["ordering"] == "binary"

    def test_round_trip_is_byte_identical(self):
        """Decoding then encoding reproduces the same bytes."""
        c = synth_multibody_zz([1, 3, 4], 0.123456789, 4).with_meta(global_phase=-0.3)
        c = c.then(Selective((1, 2), (1, 0), np.pi / 7))
        data = serialize(c)
        again = deserialize(data)
        assert again == c
        assert serialize(again) == data

    def test_defaults_for_missing_metadata(self):
        """Only n and gates are required."""
        c = deserialize('{"n": 2, "gates": [{"gate": "zz", "qubits": [2, 1], "angle": 1}]}')
        assert c.gates == (Coupling((1, 2), 1.0),)
        assert c.global_phase == 0.0
        assert c.ordering == "binary"

    def test_unknown_gate(self):
        """Unknown gate kinds raise a parse error pointing at the gate."""
        text = '{"n": 1, "gates": [{"gate": "swap", "angle": 1}]}'
        with pytest.raises(CircuitParseError) as exc_info:
            deserialize(text)
        assert exc_info.value.offset == text.index('"gate"')
        assert "unknown gate" in exc_info.value.reason

    def test_malformed_json_offset(self):
        """JSON syntax errors carry the byte offset."""
        with pytest.raises(CircuitParseError) as exc_info:
            deserialize(b'{"n": 1, "gates": [}')
        assert exc_info.value.offset == 19

    def test_invalid_utf8(self):
        """Undecodable bytes are reported at their offset."""
        with pytest.raises(CircuitParseError) as exc_info:
            deserialize(b'{"n": 1, \xff}')
        assert exc_info.value.offset == 9

    @pytest.mark.parametrize(
        "text",
        [
            "[]",
            '{"gates": []}',
            '{"n": 1, "gates": {}}',
            '{"n": 0, "gates": []}',
            '{"n": 1, "gates": [{"gate": "single", "qubit": 1, "axis": "x", "angle": "pi"}]}',
            '{"n": 1, "gates": [{"gate": "single", "qubit": 1, "axis": "x"}]}',
            '{"n": 1, "gates": [{"gate": "single", "qubit": 1, "axis": "x", "angle": NaN}]}',
            '{"n": 2, "gates": [{"gate": "zz", "qubits": [1, 2], "angle": -Infinity}]}',
            '{"n": 1, "global_phase": Infinity, "gates": []}',
            '{"n": 1, "global_phase": "0", "gates": []}',
        ],
    )
    def test_schema_errors(self, text):
        """Structural problems raise CircuitParseError."""
        with pytest.raises(CircuitParseError):
            deserialize(text)

    def test_non_finite_angle_offset(self):
        """A NaN angle is reported at its gate, never decoded."""
        text = '{"n": 1, "gates": [{"gate": "single", "qubit": 1, "axis": "x", "angle": NaN}]}'
        with pytest.raises(CircuitParseError) as exc_info:
            deserialize(text.encode("utf-8"))
        assert exc_info.value.offset == text.index('"gate"')
        assert "finite" in exc_info.value.reason

    def test_non_finite_angles_rejected(self):
        """NaN angles cannot be written."""
        with pytest.raises(ValueError):
            serialize(Circuit(n=1, gates=(SingleSpin(1, "x", float("nan")),)))
