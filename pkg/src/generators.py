"""
Diagonal-block and anti-diagonal generator families and their synthesis.

Diagonal blocks Diag(0..0, 1_l..1_L, 0..0) are reduced to selective rotations
by peeling boundary entries and halving. Anti-diagonal operators b_k (ones on
row + col = 2^n - 1 - k) expand into commuting product terms; indices whose
expansion is exponentially long go through the U_k conjugation of a centered
b_1 line and a product formula.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import pi
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

try:
    from .circuit import Circuit, Gate, Selective, SingleSpin, compose
    from .elementary import synth_basic_unitary
    from .errors import SynthesisError
    from .layout import BasisOrdering, SubspaceLayout, subspace_indices
    from .operators import E, IX, DenseOperator, OperatorSum, P, ProductTerm, SpinFactor
except ImportError:
    from circuit import Circuit, Gate, Selective, SingleSpin, compose
    from elementary import synth_basic_unitary
    from errors import SynthesisError
    from layout import BasisOrdering, SubspaceLayout, subspace_indices
    from operators import E, IX, DenseOperator, OperatorSum, P, ProductTerm, SpinFactor

logger = logging.getLogger(__name__)

BK_PATHS = ("auto", "exact", "general")
MAX_DENSE_QUBITS = 12


### DIAGONAL BLOCKS ###


@dataclass(frozen=True)
class DiagonalBlockSpec:
    """Diag with ones at binary indices l..L (inclusive) on n qubits."""

    n: int
    l: int
    L: int

    def __post_init__(self):
        if not 0 <= self.l <= self.L < 2**self.n:
            raise SynthesisError(
                f"Block {self.l}..{self.L} does not fit {self.n} qubits"
            )


@dataclass(frozen=True)
class GmSpec:
    """g_m: the projector onto subspace m."""

    layout: SubspaceLayout
    m: int

    def __post_init__(self):
        self.layout.check_subspace(self.m)


def build_diag(
    spec: Union[DiagonalBlockSpec, GmSpec],
    ordering: Union[str, BasisOrdering] = BasisOrdering.BINARY,
) -> DenseOperator:
    """Dense 0/1 diagonal; ``ordering`` only matters for g_m."""
    if isinstance(spec, GmSpec):
        dim = spec.layout.N
        ones = subspace_indices(spec.layout, spec.m, ordering)
    else:
        dim = 2**spec.n
        ones = range(spec.l, spec.L + 1)
    diag = np.zeros(dim, dtype=complex)
    diag[list(ones)] = 1.0
    return np.diag(diag)


def _block_steps(l: int, L: int, r: int) -> Iterator[Tuple[str, int, int]]:
    """Reduction of the block l..L on r qubits.

    Yields ("sel", index, width) for a full-width selective rotation on the
    first ``width`` qubits, or ("full", 0, width) when the remaining block
    covers every index of the first ``width`` qubits.
    """
    while l <= L:
        if l == 0 and L == 2**r - 1:
            yield ("full", 0, r)
            return
        if l == L:
            yield ("sel", l, r)
            return
        if l % 2 == 0 and L % 2 == 1:
            # Diag(l..L) = Diag(l/2..(L-1)/2) (x) E_r
            l, L, r = l // 2, (L - 1) // 2, r - 1
            continue
        if l % 2 == 1:
            yield ("sel", l, r)
            l += 1
        if L % 2 == 0:
            yield ("sel", L, r)
            L -= 1


def _bits(index: int, width: int) -> Tuple[int, ...]:
    return tuple((index >> (width - 1 - i)) & 1 for i in range(width))


def block_circuit(
    l: int,
    L: int,
    width: int,
    theta: float,
    n: int,
    offset: int = 0,
    context: Sequence[Tuple[int, int]] = (),
    ordering: str = "binary",
) -> Circuit:
    """exp(-i*theta*D_ctx (x) Diag(l..L) (x) E) with the block on qubits offset+1..offset+width.

    ``context`` lists (qubit, label) pairs of projector factors that every
    emitted selective rotation also conditions on.
    """
    gates: List[Gate] = []
    phase = 0.0
    for kind, index, r in _block_steps(l, L, width):
        qubits = [q for q, _ in context]
        labels = [a for _, a in context]
        if kind == "full":
            # identity on the remaining block qubits
            if not qubits:
                phase -= theta
                logger.debug("block reduction: full register, global phase")
                continue
        else:
            qubits += list(range(offset + 1, offset + r + 1))
            labels += list(_bits(index, r))
        logger.debug(f"block reduction: {kind} on {r} of {width} block qubits")
        gates.append(Selective(tuple(qubits), tuple(labels), theta))
    return Circuit(
        n=n,
        gates=tuple(gates),
        provenance="block_diagonal",
        global_phase=phase,
        basic_ops=len(gates),
        ordering=ordering,
    )


def synth_block_diagonal(spec: DiagonalBlockSpec, theta: float) -> Circuit:
    return block_circuit(spec.l, spec.L, spec.n, float(theta), spec.n)


def count_block_diagonal(l: int, L: int, n: int) -> int:
    """Selective rotations emitted for the block l..L on n qubits."""
    if not 0 <= l <= L < 2**n:
        raise SynthesisError(f"Block {l}..{L} does not fit {n} qubits")
    return sum(1 for kind, _, _ in _block_steps(l, L, n) if kind == "sel")


def naive_Gm(
    spec: GmSpec,
    theta: float,
    ordering: Union[str, BasisOrdering] = BasisOrdering.BINARY,
) -> Circuit:
    """One full-register selective rotation per basis state of subspace m."""
    layout = spec.layout
    ordering = BasisOrdering.parse(ordering)
    qubits = tuple(range(1, layout.n + 1))
    gates = tuple(
        Selective(qubits, _bits(index, layout.n), float(theta))
        for index in subspace_indices(layout, spec.m, ordering)
    )
    return Circuit(
        n=layout.n,
        gates=gates,
        provenance="naive_gm",
        basic_ops=len(gates),
        ordering=ordering.value,
    )


def synth_Gm(spec: GmSpec, theta: float, method: str = "naive") -> Circuit:
    """exp(-i*theta*g_m) in the WeightLex frame, gate by gate or by block reduction."""
    if method == "naive":
        return naive_Gm(spec, theta, BasisOrdering.WEIGHTLEX)
    if method == "block":
        layout = spec.layout
        return block_circuit(
            layout.l[spec.m],
            layout.L[spec.m],
            layout.n,
            float(theta),
            layout.n,
            ordering=BasisOrdering.WEIGHTLEX.value,
        )
    raise SynthesisError(f"Unknown g_m method {method!r} (expected 'naive' or 'block')")


### ANTI-DIAGONAL OPERATORS ###


@dataclass(frozen=True)
class AntiDiagonalSpec:
    n: int
    k: int

    def __post_init__(self):
        _check_k(self.k, self.n)


@dataclass(frozen=True)
class BbarSpec:
    """Centered b_1 line with (k-1)/2 zeros trimmed at each end, and its g-bar partner."""

    n: int
    k: int

    def __post_init__(self):
        if self.k % 2 == 0 or not 1 <= self.k < 2**self.n - 1:
            raise SynthesisError(
                f"Centered line needs odd 1 <= k < {2**self.n - 1}, got {self.k}"
            )


def _check_k(k: int, n: int) -> None:
    if n < 1 or abs(k) > 2**n - 2:
        raise SynthesisError(f"Anti-diagonal index {k} outside |k| <= {2**n - 2} for n={n}")


def _line_sum(n: int, k: int) -> int:
    # row + col for the ones of b_k
    return 2**n - 1 - k


def build_b(spec: AntiDiagonalSpec) -> DenseOperator:
    N = 2**spec.n
    if spec.n > MAX_DENSE_QUBITS:
        raise SynthesisError(f"Dense b_k is limited to n <= {MAX_DENSE_QUBITS}")
    total = _line_sum(spec.n, spec.k)
    rows = np.arange(max(0, total - N + 1), min(N - 1, total) + 1)
    b = np.zeros((N, N), dtype=complex)
    b[rows, total - rows] = 1.0
    return b


def build_bbar(spec: BbarSpec) -> Tuple[DenseOperator, DenseOperator]:
    N = 2**spec.n
    trim = (spec.k - 1) // 2
    rows = np.arange(trim, N - 1 - trim)
    bbar = np.zeros((N, N), dtype=complex)
    bbar[rows, N - 2 - rows] = 1.0
    gdiag = np.zeros(N, dtype=complex)
    gdiag[trim : N // 2 - 1] = 1.0
    return bbar, np.diag(gdiag)


@lru_cache(maxsize=None)
def _expand(k: int, t: int) -> Tuple[ProductTerm, ...]:
    if k == 0:
        return (ProductTerm(2**t, (IX,) * t),)
    half = 2 ** (t - 1)
    if abs(k) >= half:
        # both row and col sit in one half of the register
        if k > 0:
            return tuple(term.padded(before=(P(+1),)) for term in _expand(k - half, t - 1))
        return tuple(term.padded(before=(P(-1),)) for term in _expand(k + half, t - 1))
    if k % 2 == 0:
        return tuple(
            term.padded(after=(IX,)).scaled(2) for term in _expand(k // 2, t - 1)
        )
    if k > 0:
        up, down = (k - 1) // 2, (k + 1) // 2
    else:
        up, down = -(abs(k) + 1) // 2, -(abs(k) - 1) // 2
    return tuple(term.padded(after=(P(+1),)) for term in _expand(up, t - 1)) + tuple(
        term.padded(after=(P(-1),)) for term in _expand(down, t - 1)
    )


def expand_b(spec: AntiDiagonalSpec) -> OperatorSum:
    """b_k as a sum of pairwise commuting product terms."""
    return OperatorSum(spec.n, _expand(spec.k, spec.n))


@lru_cache(maxsize=None)
def _expansion_size(k: int, t: int) -> int:
    if k == 0:
        return 1
    half = 2 ** (t - 1)
    if abs(k) >= half:
        return _expansion_size(k - half if k > 0 else k + half, t - 1)
    if k % 2 == 0:
        return _expansion_size(k // 2, t - 1)
    if k > 0:
        return _expansion_size((k - 1) // 2, t - 1) + _expansion_size((k + 1) // 2, t - 1)
    return _expansion_size(-(abs(k) + 1) // 2, t - 1) + _expansion_size(
        -(abs(k) - 1) // 2, t - 1
    )


def count_expansion(k: int, n: int) -> int:
    """Term count of expand_b without building the terms."""
    _check_k(k, n)
    return _expansion_size(k, n)


@dataclass(frozen=True)
class IndexReduction:
    """b_k = prefix (x) b_core on t qubits (x) (2 I_x)^s."""

    prefix: Tuple[SpinFactor, ...]
    core: int
    t: int
    s: int

    @property
    def offset(self) -> int:
        return len(self.prefix)

    def context(self) -> List[Tuple[int, int]]:
        """(qubit, label) pairs of the prefix projectors."""
        return [(q, 0 if f.sign == 1 else 1) for q, f in enumerate(self.prefix, start=1)]


def reduce_index(k: int, n: int) -> IndexReduction:
    """High-index peel followed by even reductions."""
    _check_k(k, n)
    prefix: List[SpinFactor] = []
    t = n
    while k != 0 and abs(k) >= 2 ** (t - 1):
        if k > 0:
            prefix.append(P(+1))
            k -= 2 ** (t - 1)
        else:
            prefix.append(P(-1))
            k += 2 ** (t - 1)
        t -= 1
    s = 0
    while k != 0 and k % 2 == 0:
        k //= 2
        t -= 1
        s += 1
    return IndexReduction(prefix=tuple(prefix), core=k, t=t, s=s)


def has_compact_expansion(core: int) -> bool:
    """Cores 0, 2^r + 1 and 2^r - 1 expand into polynomially many terms."""
    core = abs(core)
    return core == 0 or bin(core).count("1") <= 2 or (core + 1) & core == 0


def exp_commuting(terms: Sequence[ProductTerm], theta: float, n: int, provenance: str = "") -> Circuit:
    """exp(-i*theta*sum(terms)) for pairwise commuting terms, one basic unitary each."""
    return compose(
        n, [synth_basic_unitary(term, theta, n) for term in terms], provenance=provenance
    )


def all_spin_flip(n: int) -> Circuit:
    """prod_k exp(-i*pi*I_kx); conjugation maps b_k to b_{-k}."""
    gates = tuple(SingleSpin(q, "x", pi) for q in range(1, n + 1))
    return Circuit(n=n, gates=gates, provenance="symmetric_flip", basic_ops=n)


### U_k AND B_k ###


def uk_indices(k: int) -> List[int]:
    """Signed b indices of the U_k factors, leftmost factor first.

    For k = 2^e1 + ... + 2^e_{l-1} + 1 (e descending) the factors are
    exp(i*pi/2*b_{+j1}), exp(i*pi/2*b_{-j2}), ... with j_s = 2^(e_s - 1), closed
    by exp(i*pi/2*b_0) when l-1 is odd.
    """
    if k < 1 or k % 2 == 0:
        raise SynthesisError(f"U_k needs a positive odd index, got {k}")
    exponents = [e for e in range((k - 1).bit_length() - 1, 0, -1) if (k - 1) >> e & 1]
    indices = [(1 if s % 2 == 0 else -1) * 2 ** (e - 1) for s, e in enumerate(exponents)]
    if len(exponents) % 2 == 1:
        indices.append(0)
    return indices


def _pad(terms: Sequence[ProductTerm], before: Sequence[SpinFactor], after_width: int) -> List[ProductTerm]:
    return [term.padded(before=before, after=(E,) * after_width) for term in terms]


def _uk_circuit(k: int, t: int, n: int, offset: int) -> Circuit:
    factors = []
    for j in uk_indices(k):
        terms = _pad(_expand(j, t), (E,) * offset, n - offset - t)
        factors.append(exp_commuting(terms, -pi / 2, n))
    # U = F_1 F_2 ... F_last, so F_last acts first
    return compose(n, reversed(factors), provenance="uk")


def synth_Uk(k: int, n: int) -> Circuit:
    """U_k with U_k bbar_{k1} U_k^+ = b_k, built from exp(i*pi/2*b_j) factors."""
    if k % 2 == 0 or k < 1 or k > max(1, 2**n - 3):
        raise SynthesisError(f"U_k needs odd 1 <= k <= {2**n - 3}, got {k}")
    circuit = _uk_circuit(k, n, n, 0)
    logger.debug(f"U_{k} on {n} qubits: {circuit.basic_ops} basic operations")
    return circuit


def count_Uk(k: int, n: int) -> int:
    return sum(_expansion_size(j, n) for j in uk_indices(k))


def _choose_general(reduction: IndexReduction, path: str) -> bool:
    if path not in BK_PATHS:
        raise SynthesisError(f"Unknown b_k path {path!r} (expected one of {BK_PATHS})")
    if reduction.core == 0:
        return False
    if path == "general":
        return True
    return path == "auto" and not has_compact_expansion(reduction.core)


def _general_bk(red: IndexReduction, theta: float, trotter_L: int, n: int) -> Circuit:
    a, t, s, core = red.offset, red.t, red.s, red.core
    suffix = (IX,) * s
    scale = 2**s

    U = _uk_circuit(core, t, n, a)
    gbar = block_circuit(
        (core - 1) // 2, 2 ** (t - 1) - 2, t, pi, n, offset=a, context=red.context()
    )
    b1 = [term.padded(before=red.prefix, after=suffix).scaled(scale) for term in _expand(1, t)]
    alpha = theta / (2 * trotter_L)
    step = [gbar, exp_commuting(b1, -alpha, n), gbar, exp_commuting(b1, alpha, n)]
    center = ProductTerm(scale, red.prefix + (P(+1),) + (P(-1),) * (t - 1) + suffix)

    logger.debug(
        f"general b_k path: core {core} on {t} qubits, prefix {a}, suffix {s}, L={trotter_L}"
    )
    return compose(
        n,
        [U.inverse(), *(step * trotter_L), synth_basic_unitary(center, theta, n), U],
        provenance="bk_general",
    )


def synth_Bk(k: int, theta: float, trotter_L: int, n: int, path: str = "auto") -> Circuit:
    """exp(-i*theta*b_k), exact for compact expansions, product formula otherwise."""
    _check_k(k, n)
    if trotter_L < 1:
        raise SynthesisError(f"Trotter depth must be >= 1, got {trotter_L}")
    theta = float(theta)
    red = reduce_index(abs(k), n)
    if not _choose_general(red, path):
        logger.debug(f"exact b_k path for k={k} on {n} qubits")
        terms = _expand(k, n)
        return exp_commuting(terms, theta, n, provenance="bk_exact")
    if k < 0:
        flip = all_spin_flip(n)
        return compose(
            n,
            [flip.inverse(), _general_bk(red, theta, trotter_L, n), flip],
            provenance="bk_general",
        )
    return _general_bk(red, theta, trotter_L, n)


def count_Bk(k: int, trotter_L: int, n: int, path: str = "auto") -> int:
    """basic_ops of synth_Bk without building gates."""
    _check_k(k, n)
    red = reduce_index(abs(k), n)
    if not _choose_general(red, path):
        return _expansion_size(k, n)
    gbar = count_block_diagonal((red.core - 1) // 2, 2 ** (red.t - 1) - 2, red.t)
    total = 2 * count_Uk(red.core, red.t) + 1 + trotter_L * (2 * red.t + 2 * gbar)
    if k < 0:
        total += 2 * n
    return total


def bk_bound(n: int, trotter_L: int) -> int:
    return 2 * n * n + 6 * trotter_L * n


def general_index_example(n: int) -> Optional[int]:
    """Smallest positive k whose reduced core has no compact expansion, if any."""
    for k in range(1, 2**n - 1):
        if not has_compact_expansion(reduce_index(k, n).core):
            return k
    return None
