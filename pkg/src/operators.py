"""
Product-operator algebra over single-spin factors and its dense lowering.

Qubit 1 is the most significant bit of the binary basis index, so |0...0>
is index 0 and the all-(E/2 + I_z) product is Diag(1, 0, ..., 0).
Dense operators are plain complex128 numpy arrays.
"""

import logging
from dataclasses import dataclass
from functools import reduce
from typing import Dict, Iterable, Sequence, Tuple, Union

import numpy as np

try:
    from .errors import OperatorError
except ImportError:
    from errors import OperatorError

logger = logging.getLogger(__name__)

# Equality tolerance for exact algebraic identities
EXACT_TOL = 1e-10
HERMITIAN_TOL = 1e-12

AXES = ("x", "y", "z")

DenseOperator = np.ndarray


@dataclass(frozen=True, slots=True)
class SpinFactor:
    """One single-spin factor: E, I_mu, or the projector P(a, mu) = E/2 + a*I_mu."""

    kind: str
    axis: str = "z"
    sign: int = 1

    def __post_init__(self):
        if self.kind not in ("E", "I", "P"):
            raise OperatorError(f"Unknown spin factor kind: {self.kind!r}")
        if self.axis not in AXES:
            raise OperatorError(f"Unknown axis: {self.axis!r}")
        if self.sign not in (1, -1):
            raise OperatorError(f"Projector sign must be +1 or -1, got {self.sign}")

    @property
    def is_identity(self) -> bool:
        return self.kind == "E"

    @property
    def is_transverse(self) -> bool:
        return self.kind == "I"

    @property
    def is_projector(self) -> bool:
        return self.kind == "P"

    def __repr__(self) -> str:
        if self.kind == "E":
            return "E"
        if self.kind == "I":
            return f"I{self.axis}"
        return f"P({self.sign:+d},{self.axis})"


E = SpinFactor("E")
IX = SpinFactor("I", "x")
IY = SpinFactor("I", "y")
IZ = SpinFactor("I", "z")


def P(sign: int, axis: str = "z") -> SpinFactor:
    """Projector factor E/2 + sign*I_axis."""
    return SpinFactor("P", axis, sign)


_HALF_PAULI: Dict[str, np.ndarray] = {
    "x": np.array([[0, 0.5], [0.5, 0]], dtype=complex),
    "y": np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    "z": np.array([[0.5, 0], [0, -0.5]], dtype=complex),
}
_IDENTITY_2 = np.eye(2, dtype=complex)


def factor_matrix(f: SpinFactor) -> DenseOperator:
    """Return the fixed 2x2 matrix of a spin factor."""
    if f.kind == "E":
        return _IDENTITY_2.copy()
    if f.kind == "I":
        return _HALF_PAULI[f.axis].copy()
    return 0.5 * _IDENTITY_2 + f.sign * _HALF_PAULI[f.axis]


@dataclass(frozen=True)
class ProductTerm:
    """coefficient * (factor_1 (x) factor_2 (x) ... (x) factor_n), qubit 1 first."""

    coefficient: complex
    factors: Tuple[SpinFactor, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def is_hermitian(self) -> bool:
        # every factor kind is Hermitian, so only the coefficient matters
        return abs(self.coefficient.imag) <= HERMITIAN_TOL

    def scaled(self, factor: complex) -> "ProductTerm":
        return ProductTerm(self.coefficient * factor, self.factors)

    def tensor(self, other: "ProductTerm") -> "ProductTerm":
        """Place ``other`` on qubits after this term's qubits."""
        return ProductTerm(
            self.coefficient * other.coefficient, self.factors + other.factors
        )

    def padded(
        self, before: Sequence[SpinFactor] = (), after: Sequence[SpinFactor] = ()
    ) -> "ProductTerm":
        return ProductTerm(
            self.coefficient, tuple(before) + self.factors + tuple(after)
        )

    def __repr__(self) -> str:
        body = "⊗".join(repr(f) for f in self.factors) or "1"
        return f"{self.coefficient:g}·{body}"


@dataclass(frozen=True)
class OperatorSum:
    """Sum of product terms over a fixed register of n qubits."""

    n: int
    terms: Tuple[ProductTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for term in self.terms:
            if term.n != self.n:
                raise OperatorError(
                    f"Term on {term.n} qubits does not fit a {self.n}-qubit sum"
                )

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def lower(obj: Union[ProductTerm, OperatorSum], n: int = None) -> DenseOperator:
    """Exact tensor-product lowering to a 2^n x 2^n complex matrix."""
    if isinstance(obj, OperatorSum):
        if n is not None and n != obj.n:
            raise OperatorError(f"Sum is on {obj.n} qubits, expected {n}")
        dim = 2**obj.n
        total = np.zeros((dim, dim), dtype=complex)
        for term in obj.terms:
            total += lower(term, obj.n)
        return total

    if n is not None and obj.n != n:
        raise OperatorError(
            f"Term has {obj.n} factors but the register has {n} qubits"
        )
    mats = [factor_matrix(f) for f in obj.factors]
    return obj.coefficient * reduce(np.kron, mats, np.ones((1, 1), dtype=complex))


def as_operator(A: np.ndarray) -> DenseOperator:
    """Validate and return a square, power-of-two dimensioned complex matrix."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise OperatorError(f"Expected a square matrix, got shape {A.shape}")
    dim = A.shape[0]
    if dim < 1 or dim & (dim - 1):
        raise OperatorError(f"Matrix dimension {dim} is not a power of two")
    return A


def qubit_count(A: DenseOperator) -> int:
    return int(as_operator(A).shape[0]).bit_length() - 1


def is_hermitian(A: DenseOperator, tol: float = HERMITIAN_TOL) -> bool:
    A = np.asarray(A)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) < tol)


def _check_same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if np.shape(A) != np.shape(B):
        raise OperatorError(
            f"Dimension mismatch: {np.shape(A)} versus {np.shape(B)}"
        )


def expm_hermitian(A: DenseOperator, theta: float) -> DenseOperator:
    """exp(-i*theta*A) through the spectral decomposition of a Hermitian A."""
    A = as_operator(A)
    if not is_hermitian(A, EXACT_TOL):
        raise OperatorError("expm_hermitian requires a Hermitian generator")
    # symmetrize so eigh sees an exactly Hermitian input
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    return (V * np.exp(-1j * theta * w)) @ V.conj().T


def anticommutator(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    _check_same_shape(A, B)
    return A @ B + B @ A


def commutator(A: DenseOperator, B: DenseOperator) -> DenseOperator:
    _check_same_shape(A, B)
    return A @ B - B @ A


def phase_aligned_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Max entry magnitude of A - e^{i*phi}*B, with phi aligning the largest entry pair."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    _check_same_shape(A, B)
    if A.size == 0:
        return 0.0
    idx = np.unravel_index(np.argmax(np.abs(A) + np.abs(B)), A.shape)
    a, b = A[idx], B[idx]
    phase = 1.0 + 0j
    if abs(a) > 1e-14 and abs(b) > 1e-14:
        phase = (a / abs(a)) / (b / abs(b))
    return float(np.max(np.abs(A - phase * B)))


def max_distance(A: np.ndarray, B: np.ndarray) -> float:
    """Plain max entry difference, no phase alignment."""
    _check_same_shape(A, B)
    return float(np.max(np.abs(np.asarray(A) - np.asarray(B)), initial=0.0))


def spectral_norm(A: DenseOperator) -> float:
    return float(np.linalg.norm(np.asarray(A), 2))


def pairwise_commute(terms: Iterable[ProductTerm], n: int, tol: float = 1e-12) -> bool:
    """True when every pair of lowered terms commutes to ``tol``."""
    mats = [lower(t, n) for t in terms]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.max(np.abs(commutator(mats[i], mats[j]))) >= tol:
                return False
    return True


def basis_projector(positions: Iterable[int], dim: int) -> DenseOperator:
    """Diagonal 0/1 matrix with ones at the given positions."""
    diag = np.zeros(dim, dtype=complex)
    diag[list(positions)] = 1.0
    return np.diag(diag)
