"""
Subspace decomposition of the n-qubit Hilbert space by weight (number of |1> spins).

Two basis orderings are used: Binary (the computational index) and WeightLex
(sorted by weight, then by binary index). Subspace m occupies the contiguous
positions l_m..L_m only in WeightLex order.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple, Union

import numpy as np

try:
    from .errors import LayoutError, TransferError
    from .operators import DenseOperator
except ImportError:
    from errors import LayoutError, TransferError
    from operators import DenseOperator

logger = logging.getLogger(__name__)

MAX_QUBITS = 20
MAX_DENSE_QUBITS = 12
NORM_TOL = 1e-8


class BasisOrdering(str, Enum):
    BINARY = "binary"
    WEIGHTLEX = "weightlex"

    @classmethod
    def parse(cls, value: Union[str, "BasisOrdering"]) -> "BasisOrdering":
        try:
            return cls(value)
        except ValueError:
            raise LayoutError(
                f"Unknown basis ordering {value!r} (expected 'binary' or 'weightlex')"
            ) from None


@dataclass(frozen=True)
class SubspaceLayout:
    n: int
    d: Tuple[int, ...]
    l: Tuple[int, ...]
    L: Tuple[int, ...]

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def peaks(self) -> Tuple[int, ...]:
        """Indices of the largest subspaces: (n/2,) or ((n-1)/2, (n+1)/2)."""
        if self.n % 2 == 0:
            return (self.n // 2,)
        return ((self.n - 1) // 2, (self.n + 1) // 2)

    def check_subspace(self, m: int) -> None:
        if not 0 <= m <= self.n:
            raise LayoutError(f"Subspace index {m} outside 0..{self.n}")

    def positions(self, m: int) -> range:
        """WeightLex positions of subspace m."""
        self.check_subspace(m)
        return range(self.l[m], self.L[m] + 1)

    def subspace_of_position(self, position: int) -> int:
        for m in range(self.n + 1):
            if self.l[m] <= position <= self.L[m]:
                return m
        raise LayoutError(f"Position {position} outside 0..{self.N - 1}")

    def to_dict(self) -> Dict[str, object]:
        return {"n": self.n, "d": list(self.d), "l": list(self.l), "L": list(self.L)}


@dataclass(frozen=True)
class BasisPermutation:
    """forward[position] = binary index; inverse[binary index] = position."""

    n: int
    forward: Tuple[int, ...]
    inverse: Tuple[int, ...]


def _check_n(n: int, limit: int = MAX_QUBITS) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= limit:
        raise LayoutError(f"Qubit count must be in 1..{limit}, got {n}")


@lru_cache(maxsize=None)
def build_layout(n: int) -> SubspaceLayout:
    _check_n(n)
    d = tuple(comb(n, m) for m in range(n + 1))
    lower = [0]
    for m in range(n):
        lower.append(lower[-1] + d[m])
    upper = tuple(lower[m] + d[m] - 1 for m in range(n + 1))
    return SubspaceLayout(n=n, d=d, l=tuple(lower), L=upper)


def weight_of(binary_index: int, n: int) -> int:
    return bin(int(binary_index)).count("1")


@lru_cache(maxsize=None)
def build_permutation(n: int) -> BasisPermutation:
    _check_n(n)
    forward = tuple(sorted(range(2**n), key=lambda i: (weight_of(i, n), i)))
    inverse = [0] * len(forward)
    for position, index in enumerate(forward):
        inverse[index] = position
    return BasisPermutation(n=n, forward=forward, inverse=tuple(inverse))


def weight_rank(binary_index: int, layout: SubspaceLayout) -> int:
    """WeightLex position of a binary basis index."""
    if not 0 <= binary_index < layout.N:
        raise LayoutError(f"Index {binary_index} outside 0..{layout.N - 1}")
    return build_permutation(layout.n).inverse[binary_index]


def weight_class(layout: SubspaceLayout, m: int) -> List[int]:
    """Binary indices of weight m, ascending."""
    layout.check_subspace(m)
    forward = build_permutation(layout.n).forward
    return list(forward[layout.l[m] : layout.L[m] + 1])


def subspace_indices(
    layout: SubspaceLayout, m: int, ordering: Union[str, BasisOrdering]
) -> List[int]:
    """Matrix indices occupied by subspace m under the given ordering."""
    if BasisOrdering.parse(ordering) is BasisOrdering.WEIGHTLEX:
        return list(layout.positions(m))
    return weight_class(layout, m)


def permutation_dense(layout: SubspaceLayout) -> DenseOperator:
    """P with P[position, binary] = 1, so P A P^T is the WeightLex form of A."""
    _check_n(layout.n, MAX_DENSE_QUBITS)
    forward = build_permutation(layout.n).forward
    P = np.zeros((layout.N, layout.N), dtype=complex)
    P[np.arange(layout.N), list(forward)] = 1.0
    return P


def to_weight_frame(A: np.ndarray, layout: SubspaceLayout) -> np.ndarray:
    """Reorder a binary-ordered operator (or vector) into WeightLex order."""
    forward = list(build_permutation(layout.n).forward)
    A = np.asarray(A)
    if A.ndim == 1:
        return A[forward]
    return A[np.ix_(forward, forward)]


def to_binary_frame(A: np.ndarray, layout: SubspaceLayout) -> np.ndarray:
    """Reorder a WeightLex-ordered operator (or vector) into binary order."""
    inverse = list(build_permutation(layout.n).inverse)
    A = np.asarray(A)
    if A.ndim == 1:
        return A[inverse]
    return A[np.ix_(inverse, inverse)]


def subspace_support(
    state: np.ndarray,
    layout: SubspaceLayout,
    ordering: Union[str, BasisOrdering] = BasisOrdering.WEIGHTLEX,
    floor: float = 1e-12,
) -> Dict[int, float]:
    """Probability mass per subspace; masses at or below ``floor`` are omitted."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (layout.N,):
        raise TransferError(
            f"State has shape {state.shape}, expected ({layout.N},)"
        )
    probabilities = np.abs(state) ** 2
    if abs(probabilities.sum() - 1.0) > NORM_TOL:
        raise TransferError(
            f"State is not normalized (norm^2 = {probabilities.sum():.12f})"
        )
    support = {}
    for m in range(layout.n + 1):
        mass = float(probabilities[subspace_indices(layout, m, ordering)].sum())
        if mass > floor:
            support[m] = mass
    return support


def random_subspace_state(
    layout: SubspaceLayout, m: int, rng: np.random.Generator
) -> np.ndarray:
    """Complex-Gaussian unit state supported on WeightLex positions of subspace m."""
    positions = list(layout.positions(m))
    amplitudes = rng.normal(size=len(positions)) + 1j * rng.normal(size=len(positions))
    state = np.zeros(layout.N, dtype=complex)
    state[positions] = amplitudes / np.linalg.norm(amplitudes)
    return state
