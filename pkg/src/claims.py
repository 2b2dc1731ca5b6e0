"""
Claims verification engine.

Each claim id expands into independent jobs over (n, m, k, L, ...) points. Jobs
run on a bounded thread pool; results are sorted by (claim, params) so two runs
with the same config produce identical reports.
"""

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from math import pi
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

try:
    from .circuit import apply_to_state, circuit_to_dense, count, deserialize, serialize
    from .elementary import synth_multibody_zz, synth_zero_quantum
    from .errors import ConfigError, MqSynthError
    from .generators import (
        AntiDiagonalSpec,
        BbarSpec,
        DiagonalBlockSpec,
        bk_bound,
        build_b,
        build_bbar,
        count_Bk,
        count_block_diagonal,
        count_expansion,
        count_Uk,
        expand_b,
        general_index_example,
        synth_Bk,
        synth_block_diagonal,
        synth_Uk,
    )
    from .layout import build_layout, random_subspace_state, subspace_support
    from .operators import (
        IZ,
        E,
        ProductTerm,
        basis_projector,
        commutator,
        expm_hermitian,
        lower,
        max_distance,
        phase_aligned_distance,
        spectral_norm,
    )
    from .transfer import (
        TransferSpec,
        build_Qpm,
        build_Qpsk,
        build_Upsk_closed,
        check_eq40,
        choose_k,
        closed_form_window,
        default_target,
        regime_a_limit,
        solve_index_window,
        synth_Upm,
        transfer_state,
        upm_from_pairs,
    )
    from .utils import seeded_rng
except ImportError:
    from circuit import apply_to_state, circuit_to_dense, count, deserialize, serialize
    from elementary import synth_multibody_zz, synth_zero_quantum
    from errors import ConfigError, MqSynthError
    from generators import (
        AntiDiagonalSpec,
        BbarSpec,
        DiagonalBlockSpec,
        bk_bound,
        build_b,
        build_bbar,
        count_Bk,
        count_block_diagonal,
        count_expansion,
        count_Uk,
        expand_b,
        general_index_example,
        synth_Bk,
        synth_block_diagonal,
        synth_Uk,
    )
    from layout import build_layout, random_subspace_state, subspace_support
    from operators import (
        IZ,
        E,
        ProductTerm,
        basis_projector,
        commutator,
        expm_hermitian,
        lower,
        max_distance,
        phase_aligned_distance,
        spectral_norm,
    )
    from transfer import (
        TransferSpec,
        build_Qpm,
        build_Qpsk,
        build_Upsk_closed,
        check_eq40,
        choose_k,
        closed_form_window,
        default_target,
        regime_a_limit,
        solve_index_window,
        synth_Upm,
        transfer_state,
        upm_from_pairs,
    )
    from utils import seeded_rng

logger = logging.getLogger(__name__)

PASS, FAIL, MEASURED = "pass", "fail", "measured"

MAX_DENSE_N = 12
MAX_COUNT_N = 20
FLOOR_NOISE = 1e-12
K_POLICIES = ("closed-form", "exhaustive-window")

DEFAULT_TOLERANCES: Dict[str, float] = {
    "EQ6_CLOSED_FORM": 1e-12,
    "EQ7_PHASE": 1e-10,
    "EQ8_TRANSFER": 1e-10,
    "EQ5_FACTORIZATION": 1e-10,
    "EXPANSION_EXACT": 1e-12,
    "EXPANSION_COUNTS": 0.0,
    "EQ10_RECURSION": 1e-9,
    "EQ13_SWAP": 1e-10,
    "BLOCK_REDUCTION": 1e-10,
    "COUNT_GM_2N": 0.0,
    "INDEX_WINDOW": 0.0,
    "REGIME_A": 0.0,
    "EQ40_IDENTITY": 1e-10,
    "EQ38_EXPANSION": 1e-10,
    "EQ24_CONJ": 1e-9,
    "TROTTER_ORDER": 0.2,
    "COMPLEXITY_UK": 0.0,
    "COMPLEXITY_BK": 0.0,
    "NORMS": 1e-10,
    "SERIALIZE_ROUNDTRIP": 0.0,
}
CLAIM_IDS: Tuple[str, ...] = tuple(DEFAULT_TOLERANCES)
TRANSFER_CLAIMS = {"EQ8_TRANSFER", "EQ5_FACTORIZATION", "NORMS", "TROTTER_ORDER"}


@dataclass
class ClaimResult:
    claim: str
    params: Dict[str, Any]
    status: str
    metric: Optional[float]
    tolerance: Optional[float]
    note: str = ""

    def sort_key(self) -> Tuple[str, str]:
        return self.claim, json.dumps(self.params, sort_keys=True)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass
class SweepConfig:
    n_min: int = 2
    n_max: int = 6
    count_n_max: int = 12
    m_values: Optional[List[int]] = None
    k_policy: str = "closed-form"
    trotter_L: List[int] = field(default_factory=lambda: [4, 8, 16, 32])
    seed: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    claims: Optional[List[str]] = None
    workers: int = 4
    random_states: int = 10
    block_samples: int = 200
    pair_samples: int = 100

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "SweepConfig":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"Unknown config fields: {', '.join(unknown)}")
        values = dict(raw)
        if "workers" not in values and os.getenv("MQSYNTH_WORKERS"):
            values["workers"] = os.getenv("MQSYNTH_WORKERS")
        try:
            config = cls(**values)
            config.workers = int(config.workers)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid config: {e}") from e
        config.validate()
        return config

    def validate(self) -> None:
        if not isinstance(self.n_min, int) or not isinstance(self.n_max, int):
            raise ConfigError("n_min and n_max must be integers")
        if not 1 <= self.n_min <= self.n_max:
            raise ConfigError(f"Need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if self.n_max > MAX_DENSE_N:
            raise ConfigError(f"Dense claims need n_max <= {MAX_DENSE_N}, got {self.n_max}")
        if not isinstance(self.count_n_max, int) or not self.n_min <= self.count_n_max <= MAX_COUNT_N:
            raise ConfigError(
                f"count_n_max must lie in {self.n_min}..{MAX_COUNT_N}, got {self.count_n_max}"
            )
        if self.k_policy not in K_POLICIES:
            raise ConfigError(f"k_policy must be one of {K_POLICIES}, got {self.k_policy!r}")
        if not self.trotter_L or any(not isinstance(L, int) or L < 1 for L in self.trotter_L):
            raise ConfigError(f"trotter_L must be a list of positive integers, got {self.trotter_L}")
        unknown = sorted(set(self.claims or ()) - set(CLAIM_IDS))
        if unknown:
            raise ConfigError(f"Unknown claim ids: {', '.join(unknown)}")
        bad_tols = sorted(set(self.tolerances) - set(CLAIM_IDS))
        if bad_tols:
            raise ConfigError(f"Tolerances given for unknown claims: {', '.join(bad_tols)}")
        if "TROTTER_ORDER" in self.selected_claims() and len(set(self.trotter_L)) < 3:
            raise ConfigError("TROTTER_ORDER needs at least 3 distinct trotter_L values")
        for name in ("workers", "random_states", "block_samples", "pair_samples"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")

    def selected_claims(self) -> List[str]:
        return list(self.claims) if self.claims else list(CLAIM_IDS)

    def tolerance(self, claim: str) -> float:
        return float(self.tolerances.get(claim, DEFAULT_TOLERANCES[claim]))

    def dense_range(self, lo: int = 1, hi: int = MAX_DENSE_N) -> List[int]:
        return list(range(max(self.n_min, lo), min(self.n_max, hi) + 1))

    def count_range(self, lo: int = 1, hi: int = MAX_COUNT_N) -> List[int]:
        return list(range(max(self.n_min, lo), min(self.count_n_max, hi) + 1))


### STANDALONE OPERATIONS ###


def eq38_expansion(A: np.ndarray, angles: Mapping[int, float]) -> np.ndarray:
    """U_o A U_o^-1 for U_o = prod_k C_k(theta_k), through the four-term expansion.

    ``angles`` maps basis positions k to rotation angles theta_k.
    """
    A = np.asarray(A, dtype=complex)
    dim = A.shape[0]
    positions = sorted(angles)
    a = {k: 1 - np.cos(angles[k]) for k in positions}
    s = {k: np.sin(angles[k]) for k in positions}
    D = {k: basis_projector([k], dim) for k in positions}

    first = sum((a[k] * D[k] for k in positions), np.zeros_like(A))
    sines = sum((s[k] * D[k] for k in positions), np.zeros_like(A))
    out = A - (A @ first + first @ A) + 1j * (A @ sines - sines @ A)
    for k in positions:
        for l in positions:
            out = out + (a[k] * a[l] + s[k] * s[l]) * (D[k] @ A @ D[l])
    for i, k in enumerate(positions):
        for l in positions[i + 1 :]:
            weight = 1j * (s[k] * a[l] - s[l] * a[k])
            out = out + weight * (D[k] @ A @ D[l] - D[l] @ A @ D[k])
    return out


@dataclass
class TrotterFit:
    slope: Optional[float]
    intercept: Optional[float]
    distances: Dict[int, float]
    exact: bool


def fit_convergence(L_values: Sequence[int], distances: Sequence[float]) -> TrotterFit:
    """Least-squares fit of log(distance) against log(L), floor noise excluded."""
    if len(set(L_values)) < 3:
        raise ConfigError(f"Convergence fit needs at least 3 distinct L values, got {list(L_values)}")
    table = {int(L): float(d) for L, d in zip(L_values, distances)}
    kept = [(L, d) for L, d in sorted(table.items()) if d >= FLOOR_NOISE]
    if len(kept) < 2:
        return TrotterFit(slope=None, intercept=None, distances=table, exact=True)
    fit = stats.linregress(np.log([L for L, _ in kept]), np.log([d for _, d in kept]))
    return TrotterFit(
        slope=float(fit.slope), intercept=float(fit.intercept), distances=table, exact=False
    )


def trotter_convergence(spec: TransferSpec, L_values: Sequence[int]) -> TrotterFit:
    """Distance of synth_Upm to exp(-i*theta*Q_pm) as the Trotter depth grows."""
    if len(set(L_values)) < 3:
        raise ConfigError(f"Convergence fit needs at least 3 distinct L values, got {list(L_values)}")
    k = spec.resolved_k()
    exact = expm_hermitian(build_Qpm(spec.layout, spec.m, k).matrix, spec.theta)
    distances = [
        phase_aligned_distance(circuit_to_dense(synth_Upm(replace(spec, trotter_L=L))), exact)
        for L in L_values
    ]
    return fit_convergence(L_values, distances)


def bk_convergence(k: int, theta: float, n: int, L_values: Sequence[int]) -> TrotterFit:
    """Same measurement for the general b_k path."""
    exact = expm_hermitian(build_b(AntiDiagonalSpec(n, k)), theta)
    distances = [
        phase_aligned_distance(circuit_to_dense(synth_Bk(k, theta, L, n, path="general")), exact)
        for L in L_values
    ]
    return fit_convergence(L_values, distances)


### SUITE ###

Job = Tuple[str, Dict[str, Any], Callable[[], List[ClaimResult]]]


class ClaimsSuite:
    def __init__(self, config: SweepConfig):
        self.config = config
        self.logger = logging.getLogger(__name__)

    # helpers

    def _result(
        self, claim: str, params: Dict[str, Any], metric: Optional[float], ok: bool, note: str = ""
    ) -> ClaimResult:
        return ClaimResult(
            claim=claim,
            params=params,
            status=PASS if ok else FAIL,
            metric=None if metric is None else float(metric),
            tolerance=self.config.tolerance(claim),
            note=note,
        )

    def _rng(self, claim: str, params: Dict[str, Any]) -> np.random.Generator:
        return seeded_rng(self.config.seed, claim, params)

    def _sources(self, n: int) -> List[int]:
        """Source subspaces with a default transfer target."""
        layout = build_layout(n)
        candidates = self.config.m_values if self.config.m_values is not None else range(n + 1)
        sources = []
        for m in candidates:
            if not 0 <= m <= n:
                continue
            try:
                target = default_target(layout, m)
            except MqSynthError:
                continue
            if layout.d[target] >= layout.d[m]:
                sources.append(m)
        return sources

    def _ks(self, n: int, m: int) -> List[int]:
        layout = build_layout(n)
        target = default_target(layout, m)
        if self.config.k_policy == "exhaustive-window":
            return list(solve_index_window(layout, m, target).values())
        return [choose_k(layout, m, target)]

    # claims

    def _eq6_closed_form(self, n: int) -> List[ClaimResult]:
        params = {"n": n, "samples": self.config.pair_samples, "seed": self.config.seed}
        rng = self._rng("EQ6_CLOSED_FORM", params)
        N = 2**n
        worst = 0.0
        for _ in range(self.config.pair_samples):
            source, target = rng.choice(N, size=2, replace=False)
            theta = rng.uniform(0, 4 * pi)
            closed = build_Upsk_closed(int(source), int(target), theta, n)
            direct = expm_hermitian(build_Qpsk(int(source), int(target), n), theta)
            worst = max(worst, max_distance(closed, direct))
        tol = self.config.tolerance("EQ6_CLOSED_FORM")
        return [self._result("EQ6_CLOSED_FORM", params, worst, worst < tol)]

    def _eq7_phase(self, n: int) -> List[ClaimResult]:
        N = 2**n
        pairs = [(s, t) for s in range(N) for t in range(N) if s != t]
        params: Dict[str, Any] = {"n": n}
        if n > 6:
            rng = self._rng("EQ7_PHASE", {"n": n, "seed": self.config.seed})
            picks = rng.choice(len(pairs), size=min(len(pairs), self.config.block_samples), replace=False)
            pairs = [pairs[i] for i in sorted(picks)]
            params["samples"] = len(pairs)
        worst = 0.0
        for s, t in pairs:
            U = build_Upsk_closed(s, t, pi, n)
            expected = np.eye(N, dtype=complex)
            expected[:, [s, t]] = 0
            expected[t, s] = expected[s, t] = -1j
            worst = max(worst, max_distance(U, expected))
        tol = self.config.tolerance("EQ7_PHASE")
        return [self._result("EQ7_PHASE", params, worst, worst < tol)]

    def _eq8_transfer(self, n: int, m: int, k: int) -> List[ClaimResult]:
        layout = build_layout(n)
        spec = TransferSpec(layout, m, k=k)
        params = {"n": n, "m": m, "k": k, "target": spec.target, "seed": self.config.seed}
        rng = self._rng("EQ8_TRANSFER", params)
        worst = 0.0
        for _ in range(self.config.random_states):
            state = random_subspace_state(layout, m, rng)
            out = transfer_state(state, spec, use_exact=True)
            mapped = np.zeros_like(state)
            for source, target in build_Qpm(layout, m, k).pairs:
                mapped[target] = state[source]
            mass = subspace_support(out, layout).get(spec.target, 0.0)
            worst = max(worst, abs(1 - mass), max_distance(out, -1j * mapped))
        tol = self.config.tolerance("EQ8_TRANSFER")
        return [self._result("EQ8_TRANSFER", params, worst, worst < tol)]

    def _eq5_factorization(self, n: int, m: int, k: int) -> List[ClaimResult]:
        layout = build_layout(n)
        params = {"n": n, "m": m, "k": k, "seed": self.config.seed}
        theta = float(self._rng("EQ5_FACTORIZATION", params).uniform(0, 2 * pi))
        product = upm_from_pairs(layout, m, k, theta)
        direct = expm_hermitian(build_Qpm(layout, m, k).matrix, theta)
        metric = max_distance(product, direct)
        tol = self.config.tolerance("EQ5_FACTORIZATION")
        return [self._result("EQ5_FACTORIZATION", dict(params, theta=theta), metric, metric < tol)]

    def _expansion_exact(self, n: int) -> List[ClaimResult]:
        worst = 0.0
        for k in range(-(2**n - 2), 2**n - 1):
            spec = AntiDiagonalSpec(n, k)
            worst = max(worst, max_distance(lower(expand_b(spec)), build_b(spec)))
        tol = self.config.tolerance("EXPANSION_EXACT")
        return [self._result("EXPANSION_EXACT", {"n": n}, worst, worst < tol)]

    def _expansion_counts(self, n: int) -> List[ClaimResult]:
        expected: Dict[int, int] = {1: n}
        for l in range(1, n):
            expected[2**l] = n - l
        for r in range(1, n + 1):
            for m in range(r):
                plus, minus = 2**r + 2**m, 2**r - 2**m
                if plus <= 2**n - 2 and plus & (plus - 1):
                    expected[plus] = (r - m + 1) * (n - r) - 1
                if 1 <= minus <= 2**n - 2 and minus & (minus - 1):
                    expected[minus] = (r - m) * (n - r) + 1
        mismatches = [
            k
            for k, want in sorted(expected.items())
            for signed in (k, -k)
            if count_expansion(signed, n) != want
        ]
        note = f"mismatch at k={mismatches[:5]}" if mismatches else f"{2 * len(expected)} indices"
        return [self._result("EXPANSION_COUNTS", {"n": n}, len(mismatches), not mismatches, note)]

    def _eq10_recursion(self, n: int, m: int) -> List[ClaimResult]:
        params = {"n": n, "m": m, "seed": self.config.seed}
        rng = self._rng("EQ10_RECURSION", params)
        worst = 0.0
        gate_ok = True
        for _ in range(5):
            qubits = sorted(int(q) for q in rng.choice(np.arange(1, n + 1), size=m, replace=False))
            theta = float(rng.uniform(0, 2 * pi))
            circuit = synth_multibody_zz(qubits, theta, n)
            factors = tuple(IZ if q in qubits else E for q in range(1, n + 1))
            oracle = expm_hermitian(lower(ProductTerm(2 ** (m - 1), factors)), theta)
            worst = max(worst, max_distance(circuit_to_dense(circuit), oracle))
            gate_ok &= count(circuit).total == 6 * (m - 2) + 1
        tol = self.config.tolerance("EQ10_RECURSION")
        note = "" if gate_ok else "gate count differs from 6(m-2)+1"
        return [self._result("EQ10_RECURSION", params, worst, worst < tol and gate_ok, note)]

    def _eq13_swap(self, n: int) -> List[ClaimResult]:
        worst = 0.0
        for k in range(1, n + 1):
            for l in range(1, n + 1):
                if k == l:
                    continue
                V = circuit_to_dense(synth_zero_quantum(k, l, pi, n))
                Ik = lower(ProductTerm(1, tuple(IZ if q == k else E for q in range(1, n + 1))))
                Il = lower(ProductTerm(1, tuple(IZ if q == l else E for q in range(1, n + 1))))
                worst = max(worst, max_distance(V @ Ik @ V.conj().T, Il))
        tol = self.config.tolerance("EQ13_SWAP")
        return [self._result("EQ13_SWAP", {"n": n}, worst, worst < tol)]

    def _block_reduction(self, n: int) -> List[ClaimResult]:
        params: Dict[str, Any] = {"n": n, "seed": self.config.seed}
        rng = self._rng("BLOCK_REDUCTION", params)
        N = 2**n
        if n <= 6:
            blocks = [(l, L) for l in range(N) for L in range(l, N)]
        else:
            blocks = [tuple(sorted(int(x) for x in rng.integers(0, N, size=2))) for _ in range(self.config.block_samples)]
            params["samples"] = len(blocks)
        theta = float(rng.uniform(0, 2 * pi))
        worst, most = 0.0, 0
        ones = np.ones(N, dtype=complex)
        for l, L in blocks:
            circuit = synth_block_diagonal(DiagonalBlockSpec(n, l, L), theta)
            expected = np.ones(N, dtype=complex)
            expected[l : L + 1] = np.exp(-1j * theta)
            # every gate is diagonal, so U applied to all-ones is diag(U)
            worst = max(worst, float(np.max(np.abs(apply_to_state(circuit, ones) - expected))))
            most = max(most, count(circuit).selective)
        tol = self.config.tolerance("BLOCK_REDUCTION")
        note = f"max selective count {most}"
        return [self._result("BLOCK_REDUCTION", dict(params, theta=theta), worst, worst < tol and most < 2 * n, note)]

    def _count_gm(self, n: int) -> List[ClaimResult]:
        layout = build_layout(n)
        most = max(count_block_diagonal(layout.l[m], layout.L[m], n) for m in range(n + 1))
        return [self._result("COUNT_GM_2N", {"n": n}, most, most < 2 * n, f"bound {2 * n}")]

    def _index_window(self, n: int) -> List[ClaimResult]:
        layout = build_layout(n)
        mismatches = []
        for m in range(n + 1):
            try:
                target = default_target(layout, m)
            except MqSynthError:
                continue
            if solve_index_window(layout, m, target) != closed_form_window(layout, m):
                mismatches.append(m)
        note = f"mismatch at m={mismatches}" if mismatches else ""
        return [self._result("INDEX_WINDOW", {"n": n}, len(mismatches), not mismatches, note)]

    def _regime_a(self, n: int) -> List[ClaimResult]:
        layout = build_layout(n)
        target = n // 2
        m0 = regime_a_limit(layout, target)
        violations = [
            m for m in range(m0 + 1) if 2 ** (n - 1) not in solve_index_window(layout, m, target)
        ]
        note = f"m_0={m0}" + (f", outside window at m={violations}" if violations else "")
        return [self._result("REGIME_A", {"n": n}, len(violations), not violations, note)]

    def _eq40_identity(self, n: int) -> List[ClaimResult]:
        layout = build_layout(n)
        checked, failures = 0, []
        for m in range(n + 1):
            for k in range(-(layout.N - 2), layout.N - 1):
                try:
                    build_Qpm(layout, m, k)
                except MqSynthError:
                    continue
                checked += 1
                if not check_eq40(layout, m, k, self.config.tolerance("EQ40_IDENTITY")):
                    failures.append((m, k))
        results = [
            self._result(
                "EQ40_IDENTITY",
                {"n": n},
                len(failures),
                not failures,
                f"{checked} (m, k) points" + (f", failing {failures[:5]}" if failures else ""),
            )
        ]
        if n == 2:
            holds = check_eq40(layout, 1, 0)
            results.append(
                self._result(
                    "EQ40_IDENTITY",
                    {"n": 2, "m": 1, "k": 0, "counterexample": True},
                    float(holds),
                    not holds,
                    "identity must fail when N-1-k <= 2L_m",
                )
            )
        return results

    def _eq38_expansion(self, n: int) -> List[ClaimResult]:
        params = {"n": n, "seed": self.config.seed}
        rng = self._rng("EQ38_EXPANSION", params)
        N = 2**n
        worst = 0.0
        for _ in range(self.config.random_states):
            X = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
            A = X + X.conj().T
            positions = rng.choice(N, size=int(rng.integers(1, N + 1)), replace=False)
            angles = {int(p): float(rng.uniform(0, 2 * pi)) for p in positions}
            diag = np.ones(N, dtype=complex)
            for p, theta in angles.items():
                diag[p] = np.exp(-1j * theta)
            direct = (diag[:, None] * A) * diag.conj()[None, :]
            worst = max(worst, max_distance(eq38_expansion(A, angles), direct))
        tol = self.config.tolerance("EQ38_EXPANSION")
        return [self._result("EQ38_EXPANSION", params, worst, worst < tol)]

    def _eq24_conj(self, n: int) -> List[ClaimResult]:
        tol = self.config.tolerance("EQ24_CONJ")
        results = []
        for k in range(1, 2**n - 2, 2):
            U = circuit_to_dense(synth_Uk(k, n))
            bbar, _ = build_bbar(BbarSpec(n, k))
            metric = max_distance(U @ bbar @ U.conj().T, build_b(AntiDiagonalSpec(n, k)))
            results.append(
                ClaimResult(
                    claim="EQ24_CONJ",
                    params={"n": n, "k": k},
                    status=MEASURED,
                    metric=metric,
                    tolerance=tol,
                    note="holds" if metric < tol else "violated",
                )
            )
        return results

    def _trotter_upm(self, n: int, m: int, k: int) -> List[ClaimResult]:
        spec = TransferSpec(build_layout(n), m, k=k)
        fit = trotter_convergence(spec, self.config.trotter_L)
        return [self._trotter_result({"n": n, "m": m, "k": k, "kind": "upm"}, fit)]

    def _trotter_bk(self, n: int, k: int) -> List[ClaimResult]:
        fit = bk_convergence(k, pi, n, self.config.trotter_L)
        return [self._trotter_result({"n": n, "k": k, "kind": "bk_general"}, fit)]

    def _trotter_result(self, params: Dict[str, Any], fit: TrotterFit) -> ClaimResult:
        params = dict(params, L=sorted(fit.distances))
        if fit.exact:
            note = "exact: all distances below floor noise"
        else:
            note = f"intercept {fit.intercept:.6g}"
        return ClaimResult(
            claim="TROTTER_ORDER",
            params=params,
            status=MEASURED,
            metric=fit.slope,
            tolerance=self.config.tolerance("TROTTER_ORDER"),
            note=note,
        )

    def _complexity_uk(self, n: int) -> List[ClaimResult]:
        params: Dict[str, Any] = {"n": n}
        ks = list(range(1, 2**n - 2, 2))
        if len(ks) > self.config.block_samples:
            rng = self._rng("COMPLEXITY_UK", {"n": n, "seed": self.config.seed})
            ks = sorted(int(k) for k in rng.choice(ks, size=self.config.block_samples, replace=False))
            params["samples"] = len(ks)
        most = max(count_Uk(k, n) for k in ks)
        return [self._result("COMPLEXITY_UK", params, most, most < n * n, f"bound {n * n}")]

    def _complexity_bk(self, n: int) -> List[ClaimResult]:
        params: Dict[str, Any] = {"n": n}
        ks = list(range(1, 2**n - 1))
        if len(ks) > self.config.block_samples:
            rng = self._rng("COMPLEXITY_BK", {"n": n, "seed": self.config.seed})
            ks = sorted(int(k) for k in rng.choice(ks, size=self.config.block_samples, replace=False))
            params["samples"] = len(ks)
        results = []
        for L in sorted(set(self.config.trotter_L)):
            most = max(count_Bk(k, L, n, path="general") for k in ks)
            bound = bk_bound(n, L)
            results.append(
                self._result("COMPLEXITY_BK", dict(params, L=L), most, most <= bound, f"bound {bound}")
            )
        return results

    def _norms(self, n: int, m: int, k: int) -> List[ClaimResult]:
        layout = build_layout(n)
        b = build_b(AntiDiagonalSpec(n, k))
        g = basis_projector(layout.positions(m), layout.N)
        metric = max(abs(spectral_norm(X) - 1) for X in (b, g, commutator(b, g)))
        tol = self.config.tolerance("NORMS")
        return [self._result("NORMS", {"n": n, "m": m, "k": k}, metric, metric < tol)]

    def _serialize_roundtrip(self, n: int) -> List[ClaimResult]:
        layout = build_layout(n)
        circuits = [
            synth_multibody_zz(range(1, n + 1), 0.3, n),
            synth_block_diagonal(DiagonalBlockSpec(n, 1, 2**n - 2), pi / 3),
        ]
        if n >= 2:
            circuits.append(synth_Bk(1, pi / 5, 2, n))
        if n >= 3:
            circuits.append(synth_Uk(3, n))
        for m in self._sources(n)[:1]:
            circuits.append(synth_Upm(TransferSpec(layout, m, trotter_L=2)))
        mismatches = 0
        for circuit in circuits:
            data = serialize(circuit)
            again = deserialize(data)
            if again != circuit or serialize(again) != data:
                mismatches += 1
        return [
            self._result(
                "SERIALIZE_ROUNDTRIP", {"n": n}, mismatches, mismatches == 0, f"{len(circuits)} circuits"
            )
        ]

    # job planning

    def plan(self) -> List[Job]:
        cfg = self.config
        jobs: List[Job] = []

        def add(claim: str, params: Dict[str, Any], fn: Callable[[], List[ClaimResult]]):
            jobs.append((claim, params, fn))

        selected = set(cfg.selected_claims())
        for n in cfg.dense_range(lo=2):
            transfer_points = []
            if selected & TRANSFER_CLAIMS:
                transfer_points = [(m, k) for m in self._sources(n) for k in self._ks(n, m)]
            if "EQ6_CLOSED_FORM" in selected:
                add("EQ6_CLOSED_FORM", {"n": n}, lambda n=n: self._eq6_closed_form(n))
            if "EQ7_PHASE" in selected:
                add("EQ7_PHASE", {"n": n}, lambda n=n: self._eq7_phase(n))
            for m, k in transfer_points:
                point = {"n": n, "m": m, "k": k}
                if "EQ8_TRANSFER" in selected:
                    add("EQ8_TRANSFER", point, lambda n=n, m=m, k=k: self._eq8_transfer(n, m, k))
                if "EQ5_FACTORIZATION" in selected:
                    add("EQ5_FACTORIZATION", point, lambda n=n, m=m, k=k: self._eq5_factorization(n, m, k))
                if "NORMS" in selected:
                    add("NORMS", point, lambda n=n, m=m, k=k: self._norms(n, m, k))
            if "EXPANSION_EXACT" in selected and n <= 8:
                add("EXPANSION_EXACT", {"n": n}, lambda n=n: self._expansion_exact(n))
            if "EQ10_RECURSION" in selected and n <= 6:
                for m in range(3, n + 1):
                    add("EQ10_RECURSION", {"n": n, "m": m}, lambda n=n, m=m: self._eq10_recursion(n, m))
            if "EQ13_SWAP" in selected and n <= 5:
                add("EQ13_SWAP", {"n": n}, lambda n=n: self._eq13_swap(n))
            if "BLOCK_REDUCTION" in selected and n <= 10:
                add("BLOCK_REDUCTION", {"n": n}, lambda n=n: self._block_reduction(n))
            if "EQ40_IDENTITY" in selected and n <= 6:
                add("EQ40_IDENTITY", {"n": n}, lambda n=n: self._eq40_identity(n))
            if "EQ38_EXPANSION" in selected and n <= 6:
                add("EQ38_EXPANSION", {"n": n}, lambda n=n: self._eq38_expansion(n))
            if "EQ24_CONJ" in selected and 3 <= n <= 5:
                add("EQ24_CONJ", {"n": n}, lambda n=n: self._eq24_conj(n))
            if "TROTTER_ORDER" in selected and n in (3, 4):
                for m, k in transfer_points:
                    add("TROTTER_ORDER", {"n": n, "m": m, "k": k},
                        lambda n=n, m=m, k=k: self._trotter_upm(n, m, k))
            if "TROTTER_ORDER" in selected and 5 <= n <= 6:
                k = general_index_example(n)
                if k is not None:
                    add("TROTTER_ORDER", {"n": n, "k": k}, lambda n=n, k=k: self._trotter_bk(n, k))
            if "SERIALIZE_ROUNDTRIP" in selected:
                add("SERIALIZE_ROUNDTRIP", {"n": n}, lambda n=n: self._serialize_roundtrip(n))

        for n in cfg.count_range(lo=2):
            if "EXPANSION_COUNTS" in selected:
                add("EXPANSION_COUNTS", {"n": n}, lambda n=n: self._expansion_counts(n))
            if "COUNT_GM_2N" in selected:
                add("COUNT_GM_2N", {"n": n}, lambda n=n: self._count_gm(n))
            if "INDEX_WINDOW" in selected and n <= MAX_DENSE_N:
                add("INDEX_WINDOW", {"n": n}, lambda n=n: self._index_window(n))
            if "REGIME_A" in selected and n <= MAX_DENSE_N:
                add("REGIME_A", {"n": n}, lambda n=n: self._regime_a(n))
            if "COMPLEXITY_UK" in selected and n >= 3:
                add("COMPLEXITY_UK", {"n": n}, lambda n=n: self._complexity_uk(n))
            if "COMPLEXITY_BK" in selected and n >= 3:
                add("COMPLEXITY_BK", {"n": n}, lambda n=n: self._complexity_bk(n))
        return jobs

    def _run_job(self, job: Job) -> List[ClaimResult]:
        claim, params, fn = job
        started = time.perf_counter()
        try:
            results = fn()
        except MqSynthError as e:
            self.logger.error(f"❌ {claim} {params}: {e}")
            results = [
                ClaimResult(claim, params, FAIL, None, self.config.tolerance(claim), f"error: {e}")
            ]
        except Exception as e:
            self.logger.error(f"💥 {claim} {params}: unexpected {type(e).__name__}: {e}")
            results = [
                ClaimResult(
                    claim, params, FAIL, None, self.config.tolerance(claim), f"error: {type(e).__name__}: {e}"
                )
            ]
        self.logger.debug(f"{claim} {params} done in {time.perf_counter() - started:.2f}s")
        return results

    def run(self) -> List[ClaimResult]:
        jobs = self.plan()
        self.logger.info(f"🧪 Running {len(jobs)} claim jobs on {self.config.workers} workers")
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            batches = list(pool.map(self._run_job, jobs))
        results = [result for batch in batches for result in batch]
        return sorted(results, key=ClaimResult.sort_key)


def run_claims_suite(config: SweepConfig) -> List[ClaimResult]:
    return ClaimsSuite(config).run()


def summarize(results: Sequence[ClaimResult]) -> Dict[str, Dict[str, int]]:
    """Status counts per claim id."""
    summary: Dict[str, Dict[str, int]] = {}
    for result in results:
        counts = summary.setdefault(result.claim, {PASS: 0, FAIL: 0, MEASURED: 0})
        counts[result.status] += 1
    return summary


def write_report(results: Sequence[ClaimResult]) -> str:
    """JSON lines, one ClaimResult per line."""
    return "".join(result.to_json() + "\n" for result in results)
