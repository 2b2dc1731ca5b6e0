"""
Subspace-selective multiple-quantum transfers.

All index arithmetic here lives in WeightLex positions. Q_pm = 1/2 {g_m, b_k}
pairs each source position p of subspace m with target position N-1-k-p.
"""

import logging
from dataclasses import dataclass, field
from math import floor, log2, pi, sqrt
from typing import List, Optional, Tuple

import numpy as np

try:
    from .circuit import Circuit, apply_to_state, compose
    from .errors import TransferError
    from .generators import (
        AntiDiagonalSpec,
        GmSpec,
        all_spin_flip,
        build_b,
        count_Bk,
        count_block_diagonal,
        synth_Bk,
        synth_Gm,
    )
    from .layout import NORM_TOL, SubspaceLayout, subspace_support
    from .operators import (
        EXACT_TOL,
        DenseOperator,
        anticommutator,
        basis_projector,
        expm_hermitian,
        max_distance,
    )
except ImportError:
    from circuit import Circuit, apply_to_state, compose
    from errors import TransferError
    from generators import (
        AntiDiagonalSpec,
        GmSpec,
        all_spin_flip,
        build_b,
        count_Bk,
        count_block_diagonal,
        synth_Bk,
        synth_Gm,
    )
    from layout import NORM_TOL, SubspaceLayout, subspace_support
    from operators import (
        EXACT_TOL,
        DenseOperator,
        anticommutator,
        basis_projector,
        expm_hermitian,
        max_distance,
    )

logger = logging.getLogger(__name__)


def default_target(layout: SubspaceLayout, m: int) -> int:
    """Nearest largest subspace: from below for the lower half, from above otherwise."""
    layout.check_subspace(m)
    n = layout.n
    low, high = n // 2, (n + 1) // 2
    if m < low:
        return low
    if m > high:
        return high
    if low != high:
        return high if m == low else low
    raise TransferError(f"Subspace {m} is already the largest subspace for n={n}")


@dataclass(frozen=True)
class TransferSpec:
    """A fully resolved transfer request; target and k are filled in on construction."""

    layout: SubspaceLayout
    m: int
    target: Optional[int] = None
    theta: float = pi
    trotter_L: int = 8
    k: Optional[int] = None
    gm_method: str = "naive"

    def __post_init__(self):
        self.layout.check_subspace(self.m)
        if self.target is None:
            object.__setattr__(self, "target", default_target(self.layout, self.m))
        self.layout.check_subspace(self.target)
        if self.target == self.m:
            raise TransferError(f"Source and target subspace are both {self.m}")
        if self.layout.d[self.target] < self.layout.d[self.m]:
            raise TransferError(
                f"Target subspace {self.target} (d={self.layout.d[self.target]}) is smaller "
                f"than source {self.m} (d={self.layout.d[self.m]})"
            )
        if self.trotter_L < 1:
            raise TransferError(f"Trotter depth must be >= 1, got {self.trotter_L}")
        if self.k is None:
            object.__setattr__(self, "k", choose_k(self.layout, self.m, self.target))

    def resolved_k(self) -> int:
        return self.k


@dataclass(frozen=True)
class IndexWindow:
    k_min: int
    k_max: int

    @property
    def width(self) -> int:
        return self.k_max - self.k_min

    def __contains__(self, k: int) -> bool:
        return self.k_min <= k <= self.k_max

    def values(self) -> range:
        return range(self.k_min, self.k_max + 1)


@dataclass
class QpmOperator:
    matrix: DenseOperator
    pairs: List[Tuple[int, int]] = field(default_factory=list)
    m: int = 0
    target: int = 0
    k: int = 0


### STATE-SELECTIVE OPERATORS ###


def _check_pair(source_pos: int, target_pos: int, N: int) -> None:
    if source_pos == target_pos:
        raise TransferError(f"Source and target position are both {source_pos}")
    for pos in (source_pos, target_pos):
        if not 0 <= pos < N:
            raise TransferError(f"Position {pos} outside 0..{N - 1}")


def build_Qpsk(source_pos: int, target_pos: int, n: int) -> DenseOperator:
    """1/2 (|s><t| + |t><s|)"""
    N = 2**n
    _check_pair(source_pos, target_pos, N)
    Q = np.zeros((N, N), dtype=complex)
    Q[source_pos, target_pos] = Q[target_pos, source_pos] = 0.5
    return Q


def build_Upsk_closed(source_pos: int, target_pos: int, theta: float, n: int) -> DenseOperator:
    """exp(-i*theta*Q_psk) = E + (cos(theta/2) - 1)(|s><s| + |t><t|) - 2i*sin(theta/2)*Q_psk."""
    U = np.eye(2**n, dtype=complex)
    Q = build_Qpsk(source_pos, target_pos, n)
    for pos in (source_pos, target_pos):
        U[pos, pos] += np.cos(theta / 2) - 1
    return U - 2j * np.sin(theta / 2) * Q


### INDEX WINDOWS ###


def _target_positions(layout: SubspaceLayout, m: int, k: int) -> np.ndarray:
    return layout.N - 1 - k - np.arange(layout.l[m], layout.L[m] + 1)


def solve_index_window(layout: SubspaceLayout, m: int, m_target: int) -> IndexWindow:
    """Every signed k whose pairing sends all of subspace m into subspace m_target."""
    layout.check_subspace(m)
    layout.check_subspace(m_target)
    if m == m_target:
        raise TransferError(f"Source and target subspace are both {m}")
    ks = np.arange(-(layout.N - 2), layout.N - 1)
    sources = np.arange(layout.l[m], layout.L[m] + 1)
    targets = layout.N - 1 - ks[:, None] - sources[None, :]
    ok = np.all(
        (targets >= layout.l[m_target]) & (targets <= layout.L[m_target]), axis=1
    )
    admissible = ks[ok]
    if admissible.size == 0:
        raise TransferError(
            f"No anti-diagonal index maps subspace {m} into {m_target} for n={layout.n}"
        )
    return IndexWindow(int(admissible.min()), int(admissible.max()))


def closed_form_window(layout: SubspaceLayout, m: int) -> IndexWindow:
    """Window towards the default target from sums of subspace dimensions."""
    n = layout.n
    if m > (n + 1) // 2 or (n % 2 == 1 and m == (n + 1) // 2):
        mirrored = closed_form_window(layout, n - m)
        return IndexWindow(-mirrored.k_max, -mirrored.k_min)
    target = default_target(layout, m)
    if target < m:
        raise TransferError(f"No closed-form window from subspace {m} for n={n}")
    T = (n + 1) // 2
    if target == T and n % 2 == 1:
        # odd n, source (n-1)/2 towards (n+1)/2
        lower = sum(layout.d[m : T - 1])
        upper = sum(layout.d[m + 1 : T])
        return IndexWindow(lower, upper)
    lower = sum(layout.d[m:T])
    upper = sum(layout.d[m + 1 : T + 1])
    return IndexWindow(lower, upper)


def _stirling_exponents(n: int) -> Tuple[int, int]:
    """(n_0, k_0) of the regime-B binary form of k."""
    if n % 2 == 0:
        n0 = floor(log2(0.5 * n * sqrt(n) * sqrt(pi / 2) * (1 + 2 / n)))
    else:
        n0 = floor(
            log2(
                sqrt(pi / 2)
                * (n + 3)
                / 4
                * (1 + n)
                * sqrt(n - 1)
                / n
                * sqrt((1 + 1 / n) ** n)
                / sqrt((1 + 1 / (n - 1)) ** (n - 1))
            )
        )
    k0 = floor(log2(sqrt(n) * sqrt(pi / 2) / (1 + 2 / n)))
    return n0, k0


def regime_a_limit(layout: SubspaceLayout, m_target: int) -> int:
    """Largest m with l_{m+1} <= d(target)/2, or -1 when none qualifies."""
    m0 = -1
    for m in range(m_target):
        if layout.l[m + 1] <= layout.d[m_target] / 2:
            m0 = m
    return m0


def _closed_form_candidate(layout: SubspaceLayout, m: int, m_target: int, window: IndexWindow) -> Optional[int]:
    n = layout.n
    if m <= regime_a_limit(layout, m_target):
        return 2 ** (n - 1)
    if n < 2:
        return None
    n0, k0 = _stirling_exponents(n)
    if not (0 <= n0 <= n - 1 and 0 <= k0 <= n - 1):
        return None
    base = 2 ** (n - k0 - 1)
    step = 2 ** (n - n0 - 1)
    # first grid point strictly above k_min
    return base + (floor((window.k_min - base) / step) + 1) * step


def _sparsest(window: IndexWindow, near: Optional[int]) -> int:
    anchor = window.k_min if near is None else near
    return min(
        window.values(),
        key=lambda k: (bin(abs(k)).count("1"), abs(k - anchor), k),
    )


def choose_k(layout: SubspaceLayout, m: int, m_target: Optional[int] = None) -> int:
    if m_target is None:
        m_target = default_target(layout, m)
    if m > m_target:
        # mirror image of the lower-half transfer
        return -choose_k(layout, layout.n - m, layout.n - m_target)

    window = solve_index_window(layout, m, m_target)
    candidate = _closed_form_candidate(layout, m, m_target, window)
    if candidate is not None and candidate in window:
        logger.debug(f"choose_k n={layout.n} m={m}->{m_target}: closed form k={candidate}")
        return candidate

    k = _sparsest(window, candidate)
    logger.warning(
        f"Closed-form k={candidate} outside window {window.k_min}..{window.k_max} "
        f"for n={layout.n}, m={m}->{m_target}; using k={k}"
    )
    return k


### SUBSPACE-SELECTIVE OPERATORS ###


def qpm_pairs(layout: SubspaceLayout, m: int, k: int) -> List[Tuple[int, int]]:
    return [(int(p), int(layout.N - 1 - k - p)) for p in layout.positions(m)]


def _check_pairing(layout: SubspaceLayout, m: int, k: int) -> int:
    """Target subspace of the pairing, or TransferError."""
    layout.check_subspace(m)
    if abs(k) > layout.N - 2:
        raise TransferError(f"Anti-diagonal index {k} outside |k| <= {layout.N - 2}")
    targets = _target_positions(layout, m, k)
    if targets.min() < 0 or targets.max() >= layout.N:
        raise TransferError(f"k={k} sends subspace {m} outside the register")
    target = layout.subspace_of_position(int(targets[0]))
    if target == m:
        raise TransferError(f"k={k} pairs subspace {m} with itself")
    if not np.all((targets >= layout.l[target]) & (targets <= layout.L[target])):
        raise TransferError(f"k={k} splits subspace {m} over several target subspaces")
    return target


def build_Qpm(layout: SubspaceLayout, m: int, k: int) -> QpmOperator:
    target = _check_pairing(layout, m, k)
    g = basis_projector(layout.positions(m), layout.N)
    b = build_b(AntiDiagonalSpec(layout.n, k))
    return QpmOperator(
        matrix=0.5 * anticommutator(g, b),
        pairs=qpm_pairs(layout, m, k),
        m=m,
        target=target,
        k=k,
    )


def check_eq40(layout: SubspaceLayout, m: int, k: int, tol: float = EXACT_TOL) -> bool:
    """Whether G_m(pi) b_k G_m(pi)^-1 = b_k - 2{b_k, g_m} holds dense."""
    g = basis_projector(layout.positions(m), layout.N)
    b = build_b(AntiDiagonalSpec(layout.n, k))
    G = np.eye(layout.N, dtype=complex) - 2 * g
    return max_distance(G @ b @ G, b - 2 * anticommutator(b, g)) < tol


def upm_from_pairs(layout: SubspaceLayout, m: int, k: int, theta: float) -> DenseOperator:
    """Product of the commuting state-selective factors over all pairs."""
    _check_pairing(layout, m, k)
    U = np.eye(layout.N, dtype=complex)
    for source, target in qpm_pairs(layout, m, k):
        U = build_Upsk_closed(source, target, theta, layout.n) @ U
    return U


def synth_Upm(spec: TransferSpec) -> Circuit:
    """[exp(-i(theta/4L) b_k) G_m(pi) exp(i(theta/4L) b_k) G_m(pi)^-1]^L in the WeightLex frame."""
    layout, L = spec.layout, spec.trotter_L
    k = spec.resolved_k()
    _check_pairing(layout, spec.m, k)
    n = layout.n
    gm = GmSpec(layout, spec.m)
    g_fwd = synth_Gm(gm, pi, spec.gm_method)
    g_back = synth_Gm(gm, -pi, spec.gm_method)
    angle = spec.theta / (4 * L)
    step = [g_back, synth_Bk(k, -angle, L, n), g_fwd, synth_Bk(k, angle, L, n)]
    logger.debug(
        f"U_pm n={n} m={spec.m}->{spec.target} k={k} L={L}: "
        f"{sum(c.basic_ops for c in step) * L} basic operations"
    )
    return compose(n, step * L, provenance="upm", ordering="weightlex")


def count_Upm(layout: SubspaceLayout, m: int, k: int, trotter_L: int, gm_method: str = "naive") -> int:
    if gm_method == "block":
        gm_ops = count_block_diagonal(layout.l[m], layout.L[m], layout.n)
    else:
        gm_ops = layout.d[m]
    return trotter_L * (2 * gm_ops + 2 * count_Bk(k, trotter_L, layout.n))


def symmetric_flip(n: int) -> Circuit:
    """prod_k exp(-i*pi*I_kx): subspace m <-> subspace n-m."""
    return all_spin_flip(n)


def transfer_state(state: np.ndarray, spec: TransferSpec, use_exact: bool = True) -> np.ndarray:
    """Transfer a WeightLex-ordered state out of subspace spec.m."""
    layout = spec.layout
    support = subspace_support(state, layout)
    stray = sum(mass for sub, mass in support.items() if sub != spec.m)
    if stray > NORM_TOL:
        raise TransferError(
            f"State has weight {stray:.3e} outside source subspace {spec.m}"
        )
    k = spec.resolved_k()
    if use_exact:
        Q = build_Qpm(layout, spec.m, k).matrix
        return expm_hermitian(Q, spec.theta) @ np.asarray(state, dtype=complex)
    return apply_to_state(synth_Upm(spec), state)
