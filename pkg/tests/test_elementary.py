"""
Tests for elementary propagators: multibody ZZ, zero-quantum swaps,
selective relabeling and basic unitaries of single product terms.
"""

import pytest
import numpy as np
from scipy.linalg import expm

from src.circuit import Selective, SingleSpin, circuit_to_dense, count, gate_to_dense
from src.elementary import (
    ZeroQuantumSwap,
    classify_term,
    normalize_selective,
    synth_basic_unitary,
    synth_multibody_zz,
    synth_selective,
    synth_zero_quantum,
)
from src.errors import SynthesisError
from src.operators import IX, IY, IZ, E, P, ProductTerm, lower, max_distance


def _on(n, placed):
    """ProductTerm factors with ``placed`` {qubit: factor} and E elsewhere."""
    return tuple(placed.get(q, E) for q in range(1, n + 1))


def _oracle(term, theta):
    return expm(-1j * theta * lower(term))


class TestMultibodyZZ:
    """Recursive ZZ ladder."""

    def test_single_qubit(self):
        """m=1 is one z rotation."""
        c = synth_multibody_zz([2], 0.4, 3)
        assert c.gates == (SingleSpin(2, "z", 0.4),)

    @pytest.mark.parametrize("qubits,n,total", [([1, 2, 3], 3, 7), ([1, 2, 3, 4], 4, 13), ([4, 1, 3], 5, 7)])
    def test_dense_match(self, qubits, n, total):
        """exp(-i*theta*2^(m-1)*prod I_z) with 6(m-2)+1 gates."""
        theta = 0.77
        c = synth_multibody_zz(qubits, theta, n)
        term = ProductTerm(2 ** (len(qubits) - 1), _on(n, {q: IZ for q in qubits}))
        assert count(c).total == total
        assert max_distance(circuit_to_dense(c), _oracle(term, theta)) < 1e-10
        assert c.basic_ops == 1

    @pytest.mark.parametrize("qubits", [[1, 1], [], [0, 2], [1, 4]])
    def test_invalid_indices(self, qubits):
        """Duplicate, empty and out-of-range indices raise."""
        with pytest.raises(SynthesisError):
            synth_multibody_zz(qubits, 0.1, 3)


class TestZeroQuantumSwap:
    """V_kl(theta) sandwiches."""

    def test_zero_angle_is_empty(self):
        """theta=0 emits nothing."""
        assert synth_zero_quantum(1, 2, 0.0, 2).gates == ()

    @pytest.mark.parametrize("k,l", [(1, 2), (3, 1)])
    def test_dense_match(self, k, l):
        """Dense form is exp(-i t I_kx I_ly) exp(i t I_ky I_lx)."""
        theta, n = 1.3, 3
        c = synth_zero_quantum(k, l, theta, n)
        xy = lower(ProductTerm(1, _on(n, {k: IX, l: IY})))
        yx = lower(ProductTerm(1, _on(n, {k: IY, l: IX})))
        expected = expm(-1j * theta * xy) @ expm(1j * theta * yx)
        assert len(c) <= 10
        assert max_distance(circuit_to_dense(c), expected) < 1e-10

    def test_pi_swaps_z_magnetization(self):
        """V_kl(pi) carries I_kz onto I_lz."""
        V = circuit_to_dense(synth_zero_quantum(1, 3, np.pi, 3))
        Ik = lower(ProductTerm(1, _on(3, {1: IZ})))
        Il = lower(ProductTerm(1, _on(3, {3: IZ})))
        assert max_distance(V @ Ik @ V.conj().T, Il) < 1e-10

    def test_same_qubit(self):
        """k and l must differ."""
        with pytest.raises(SynthesisError):
            ZeroQuantumSwap(2, 2, 1.0)


class TestNormalizeSelective:
    """Relabeling selective rotations onto qubits 1..m."""

    def test_canonical_subset_needs_nothing(self):
        """Qubits 1..m with zero labels give empty pre and post."""
        pre, canonical, post = normalize_selective([1, 2], [0, 0], 3, theta=0.5)
        assert pre.gates == () and post.gates == ()
        assert canonical == Selective((1, 2), (0, 0), 0.5)

    def test_label_flip(self):
        """A label-1 qubit is handled by one x pi pulse each side."""
        pre, canonical, post = normalize_selective([1, 2], [1, 0], 2, theta=0.9)
        assert pre.gates == (SingleSpin(1, "x", np.pi),)
        assert post.gates == (SingleSpin(1, "x", -np.pi),)
        dense = circuit_to_dense(post) @ gate_to_dense(canonical, 2) @ circuit_to_dense(pre)
        assert max_distance(dense, gate_to_dense(Selective((1, 2), (1, 0), 0.9), 2)) < 1e-10

    def test_relabel_outside_qubit(self):
        """Subset {2,3} on three qubits moves qubit 3 onto qubit 1 with one swap."""
        pre, canonical, post = normalize_selective([2, 3], [0, 0], 3, theta=0.6)
        assert canonical.qubits == (1, 2)
        assert len(pre) == 10
        dense = circuit_to_dense(post) @ gate_to_dense(canonical, 3) @ circuit_to_dense(pre)
        assert max_distance(dense, gate_to_dense(Selective((2, 3), (0, 0), 0.6), 3)) < 1e-10

    @pytest.mark.parametrize(
        "subset,labels,n",
        [([3], [1], 3), ([2, 4], [1, 0], 4), ([1, 3, 4], [0, 1, 1], 4), ([2, 3, 4], [1, 1, 1], 5)],
    )
    def test_synth_selective_dense(self, subset, labels, n):
        """Composed circuit equals the original selective rotation exactly."""
        theta = 1.7
        c = synth_selective(subset, labels, theta, n)
        expected = gate_to_dense(Selective(tuple(subset), tuple(labels), theta), n)
        assert max_distance(circuit_to_dense(c), expected) < 1e-10

    def test_diagonal_multiplicity(self):
        """An m-qubit selective phases 2^(n-m) basis states."""
        c = synth_selective([2, 3], [0, 1], 0.5, 4)
        diag = np.diag(circuit_to_dense(c))
        assert np.count_nonzero(np.abs(diag - np.exp(-0.5j)) < 1e-10) == 4
        assert np.allclose(np.abs(diag), 1)

    def test_label_count_mismatch(self):
        """One label per qubit."""
        with pytest.raises(SynthesisError):
            normalize_selective([1, 2], [0], 2)


class TestBasicUnitary:
    """exp(-i*theta*Q) for one product term."""

    @pytest.mark.parametrize(
        "factors,kind",
        [
            ((IX, IZ), "Q_a"),
            ((P(+1), P(-1, "x")), "Q_b"),
            ((IY, P(-1)), "Q_c"),
            ((E, E), "identity"),
        ],
    )
    def test_classify(self, factors, kind):
        """Structural class from transverse and projector factors."""
        assert classify_term(ProductTerm(1, factors)) == kind

    def test_single_iz(self):
        """I_z on one qubit is one SingleSpin gate."""
        c = synth_basic_unitary(ProductTerm(1, _on(3, {2: IZ})), 0.8, 3)
        assert c.gates == (SingleSpin(2, "z", 0.8),)

    def test_identity_term_is_global_phase(self):
        """c*E...E becomes the phase -c*theta."""
        c = synth_basic_unitary(ProductTerm(2, (E, E)), 0.3, 2)
        assert c.gates == ()
        assert c.global_phase == pytest.approx(-0.6)
        assert np.allclose(circuit_to_dense(c), np.exp(-0.6j) * np.eye(4))

    @pytest.mark.parametrize(
        "coefficient,placed,n",
        [
            (2, {1: IX, 3: IY}, 3),
            (4, {1: IY, 2: IZ, 3: IX}, 3),
            (1, {2: P(-1), 3: P(+1, "x")}, 3),
            (1, {1: P(+1, "y")}, 2),
            (2, {1: IX, 2: P(-1)}, 2),
            (4, {1: IX, 2: P(+1), 3: IY, 4: IZ}, 4),
            (-3, {2: IY, 3: P(-1, "x"), 4: IX}, 4),
            (2, {1: IX, 3: P(+1, "x"), 4: IZ, 5: P(-1)}, 5),
        ],
    )
    def test_dense_match(self, coefficient, placed, n):
        """Every term class matches the expm oracle, phase included."""
        theta = 0.91
        term = ProductTerm(coefficient, _on(n, placed))
        c = synth_basic_unitary(term, theta, n)
        assert c.basic_ops == 1
        assert max_distance(circuit_to_dense(c), _oracle(term, theta)) < 1e-9

    def test_five_qubit_mixed_term(self):
        """2 I_x E P(+1,x) I_z P(-1) is Q_c and matches the oracle."""
        term = ProductTerm(2, (IX, E, P(+1, "x"), IZ, P(-1)))
        assert classify_term(term) == "Q_c"
        c = synth_basic_unitary(term, np.pi / 3, 5)
        assert max_distance(circuit_to_dense(c), _oracle(term, np.pi / 3)) < 1e-9

    def test_rejects_complex_coefficient(self):
        """Non-Hermitian terms are refused."""
        with pytest.raises(SynthesisError):
            synth_basic_unitary(ProductTerm(1j, (IZ,)), 1.0, 1)

    def test_rejects_register_mismatch(self):
        """Term width must equal n."""
        with pytest.raises(SynthesisError):
            synth_basic_unitary(ProductTerm(1, (IZ,)), 1.0, 2)
