#!/usr/bin/env python3

import os
import sys
import json
import time
import logging
import argparse
from math import pi
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

# Add the src directory to Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# Handle both relative and absolute imports
try:
    from .circuit import Circuit, serialize
    from .claims import (
        CLAIM_IDS,
        DEFAULT_TOLERANCES,
        FAIL,
        MEASURED,
        PASS,
        SweepConfig,
        run_claims_suite,
        summarize,
        write_report,
    )
    from .elementary import synth_multibody_zz
    from .errors import ConfigError, MqSynthError
    from .generators import BK_PATHS, GmSpec, naive_Gm, synth_Bk, synth_Gm
    from .layout import (
        BasisOrdering,
        build_layout,
        random_subspace_state,
        subspace_indices,
        subspace_support,
        to_binary_frame,
    )
    from .operators import max_distance
    from .transfer import TransferSpec, synth_Upm, transfer_state
    from .utils import ensure_directory, load_config_file, seeded_rng, setup_logging
except ImportError:
    from circuit import Circuit, serialize
    from claims import (
        CLAIM_IDS,
        DEFAULT_TOLERANCES,
        FAIL,
        MEASURED,
        PASS,
        SweepConfig,
        run_claims_suite,
        summarize,
        write_report,
    )
    from elementary import synth_multibody_zz
    from errors import ConfigError, MqSynthError
    from generators import BK_PATHS, GmSpec, naive_Gm, synth_Bk, synth_Gm
    from layout import (
        BasisOrdering,
        build_layout,
        random_subspace_state,
        subspace_indices,
        subspace_support,
        to_binary_frame,
    )
    from operators import max_distance
    from transfer import TransferSpec, synth_Upm, transfer_state
    from utils import ensure_directory, load_config_file, seeded_rng, setup_logging

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COUNT_CLAIMS = [
    "EXPANSION_COUNTS",
    "COUNT_GM_2N",
    "INDEX_WINDOW",
    "REGIME_A",
    "COMPLEXITY_UK",
    "COMPLEXITY_BK",
]
DEFAULT_TRANSFER_TOL = 1e-8
MAX_LISTED_QUBITS = 12


def parse_k(value: str) -> Optional[int]:
    """'auto' -> None, otherwise a signed integer."""
    if value == "auto":
        return None
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--k must be 'auto' or an integer, got {value!r}")


def parse_qubits(value: str) -> List[int]:
    try:
        return [int(q) for q in value.split(",") if q.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--qubits must look like 1,2,3, got {value!r}")


class SuiteRunner:
    def __init__(self, config_path: Optional[str] = None):
        self.config_path = Path(config_path) if config_path else None
        self.logger = logging.getLogger(__name__)

    ### CONFIG ###

    def validate_sweep_config(self, raw: Dict[str, Any]) -> bool:
        """Check field types before building a SweepConfig; log every violation."""
        valid = True
        for field in ("n_min", "n_max", "count_n_max", "seed", "workers"):
            if field in raw and (not isinstance(raw[field], int) or isinstance(raw[field], bool)):
                self.logger.error(f"'{field}' must be an integer, got {raw[field]!r}")
                valid = False
        if "trotter_L" in raw and not isinstance(raw["trotter_L"], list):
            self.logger.error("'trotter_L' must be a list of integers")
            valid = False
        if "tolerances" in raw and not isinstance(raw["tolerances"], dict):
            self.logger.error("'tolerances' must map claim ids to numbers")
            valid = False
        if "claims" in raw and raw["claims"] is not None:
            if not isinstance(raw["claims"], list):
                self.logger.error("'claims' must be a list of claim ids")
                valid = False
            else:
                for claim in raw["claims"]:
                    if claim not in CLAIM_IDS:
                        self.logger.error(f"Unknown claim id in config: {claim}")
                        valid = False
        if "m_values" in raw and raw["m_values"] is not None and not isinstance(raw["m_values"], list):
            self.logger.error("'m_values' must be a list of subspace indices")
            valid = False
        return valid

    def load_and_validate_config(
        self, overrides: Optional[Dict[str, Any]] = None
    ) -> Optional[SweepConfig]:
        """Load the suite config file, apply CLI overrides, and validate it."""
        raw: Dict[str, Any] = {}
        if self.config_path is not None:
            if not self.config_path.exists():
                self.logger.error(f"Configuration file not found: {self.config_path}")
                return None
            raw = load_config_file(self.config_path)
            if not raw:
                self.logger.error(f"Configuration file is empty or unreadable: {self.config_path}")
                return None
        overrides = dict(overrides or {})
        if isinstance(raw.get("tolerances"), dict) and "tolerances" in overrides:
            overrides["tolerances"] = {**raw["tolerances"], **overrides["tolerances"]}
        raw.update(overrides)

        if not self.validate_sweep_config(raw):
            return None
        try:
            config = SweepConfig.from_dict(raw)
        except ConfigError as e:
            self.logger.error(f"Invalid suite configuration: {e}")
            return None
        self.logger.info(
            f"Loaded suite config: n {config.n_min}..{config.n_max}, "
            f"count n up to {config.count_n_max}, {len(config.selected_claims())} claim(s)"
        )
        return config

    ### SUITE ###

    def log_summary(self, results: Sequence, elapsed: float) -> None:
        for claim, counts in sorted(summarize(results).items()):
            marker = "❌" if counts[FAIL] else "✅"
            self.logger.info(
                f"   {marker} {claim}: {counts[PASS]} passed, {counts[FAIL]} failed, "
                f"{counts[MEASURED]} measured"
            )
        totals = {PASS: 0, FAIL: 0, MEASURED: 0}
        for result in results:
            totals[result.status] += 1
        self.logger.info("=" * 50)
        self.logger.info(
            f"🏁 {totals[PASS]} passed, {totals[FAIL]} failed, "
            f"{totals[MEASURED]} measured in {elapsed:.1f}s"
        )

    def run_suite(self, config: SweepConfig, out: Optional[str] = None) -> int:
        self.logger.info("🚀 Starting claims verification")
        self.logger.info("=" * 50)
        started = time.time()
        try:
            results = run_claims_suite(config)
        except MqSynthError as e:
            self.logger.error(f"💥 Suite aborted: {e}")
            return EXIT_USAGE
        report = write_report(results)
        if out:
            ensure_directory(Path(out).parent)
            Path(out).write_text(report, encoding="utf-8")
            self.logger.info(f"📝 Report written to {out}")
        else:
            sys.stdout.write(report)
        self.log_summary(results, time.time() - started)
        return EXIT_FAIL if any(r.status == FAIL for r in results) else EXIT_OK

    def run_verify(self, args: argparse.Namespace) -> int:
        overrides: Dict[str, Any] = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.tol is not None:
            overrides["tolerances"] = {
                claim: args.tol
                for claim, default in DEFAULT_TOLERANCES.items()
                if default > 0 and claim != "TROTTER_ORDER"
            }
        config = self.load_and_validate_config(overrides)
        if config is None:
            return EXIT_USAGE
        return self.run_suite(config, args.out)

    def run_sweep(self, args: argparse.Namespace) -> int:
        if not args.counts:
            self.logger.error("sweep only supports --counts")
            return EXIT_USAGE
        overrides: Dict[str, Any] = {
            "n_min": 2,
            "n_max": min(args.n_max, 12),
            "count_n_max": args.n_max,
            "claims": COUNT_CLAIMS,
        }
        if args.seed is not None:
            overrides["seed"] = args.seed
        config = self.load_and_validate_config(overrides)
        if config is None:
            return EXIT_USAGE
        return self.run_suite(config, args.out)

    ### SINGLE OBJECTS ###

    def run_layout(self, args: argparse.Namespace) -> int:
        layout = build_layout(args.n)
        ordering = BasisOrdering.parse(args.ordering or "weightlex")
        data = layout.to_dict()
        data["ordering"] = ordering.value
        if layout.n <= MAX_LISTED_QUBITS:
            data["indices"] = [list(subspace_indices(layout, m, ordering)) for m in range(layout.n + 1)]
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    def build_circuit(self, args: argparse.Namespace) -> Circuit:
        kind = args.kind
        if kind == "zz":
            n = args.n or max(args.qubits, default=1)
            circuit = synth_multibody_zz(args.qubits, args.theta, n)
            return circuit.with_meta(ordering=args.ordering or "binary")
        if kind == "bk":
            if args.k is None:
                raise ConfigError("synth bk needs an explicit --k")
            circuit = synth_Bk(args.k, args.theta, args.L, args.n, path=args.path)
            return circuit.with_meta(ordering=args.ordering or "binary")

        layout = build_layout(args.n)
        ordering = BasisOrdering.parse(args.ordering or "weightlex")
        if kind == "gm":
            spec = GmSpec(layout, args.m)
            if ordering is BasisOrdering.BINARY:
                if args.method != "naive":
                    raise ConfigError("Block reduction of g_m needs the weightlex ordering")
                return naive_Gm(spec, args.theta, ordering)
            return synth_Gm(spec, args.theta, args.method)
        if ordering is not BasisOrdering.WEIGHTLEX:
            raise ConfigError("U_pm is synthesized in the weightlex ordering only")
        spec = TransferSpec(
            layout,
            args.m,
            target=args.target,
            theta=args.theta,
            trotter_L=args.L,
            k=args.k,
            gm_method=args.method,
        )
        return synth_Upm(spec)

    def run_synth(self, args: argparse.Namespace) -> int:
        circuit = self.build_circuit(args)
        data = serialize(circuit)
        if args.out:
            ensure_directory(Path(args.out).parent)
            Path(args.out).write_bytes(data)
            self.logger.info(
                f"📝 {circuit.provenance}: {len(circuit)} gates, "
                f"{circuit.basic_ops} basic operations -> {args.out}"
            )
        else:
            sys.stdout.write(data.decode("utf-8"))
        return EXIT_OK

    def run_transfer(self, args: argparse.Namespace) -> int:
        layout = build_layout(args.n)
        spec = TransferSpec(
            layout, args.m, target=args.target, theta=args.theta, trotter_L=args.L, k=args.k
        )
        seed = args.seed if args.seed is not None else 0
        state = random_subspace_state(layout, args.m, seeded_rng(seed, "transfer", args.n, args.m))
        exact = transfer_state(state, spec, use_exact=True)
        synthesized = transfer_state(state, spec, use_exact=False)
        deviation = max_distance(synthesized, exact)

        ordering = BasisOrdering.parse(args.ordering or "weightlex")

        def support(vector: np.ndarray) -> Dict[str, float]:
            if ordering is BasisOrdering.BINARY:
                vector = to_binary_frame(vector, layout)
            masses = subspace_support(vector, layout, ordering)
            return {str(m): mass for m, mass in sorted(masses.items())}

        data = {
            "n": args.n,
            "m": args.m,
            "target": spec.target,
            "k": spec.k,
            "theta": args.theta,
            "L": args.L,
            "seed": seed,
            "before": support(state),
            "after": support(synthesized),
            "after_exact": support(exact),
            "deviation": deviation,
        }
        sys.stdout.write(json.dumps(data, indent=2, sort_keys=True) + "\n")
        tol = args.tol if args.tol is not None else DEFAULT_TRANSFER_TOL
        if deviation > tol:
            self.logger.error(f"❌ Synthesized transfer deviates by {deviation:.3e} (tol {tol:.1e})")
            return EXIT_FAIL
        self.logger.info(f"✅ Transfer {args.m} -> {spec.target} with k={spec.k}")
        return EXIT_OK

    def run(self, args: argparse.Namespace) -> int:
        handlers = {
            "layout": self.run_layout,
            "synth": self.run_synth,
            "verify": self.run_verify,
            "sweep": self.run_sweep,
            "transfer": self.run_transfer,
        }
        try:
            return handlers[args.command](args)
        except MqSynthError as e:
            self.logger.error(f"💥 {e}")
            return EXIT_USAGE
        except KeyboardInterrupt:
            self.logger.info("🛑 Interrupted by user")
            return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ordering", choices=["binary", "weightlex"], default=None)
    common.add_argument("--tol", type=float, default=None, help="Tolerance override")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--k", type=parse_k, default=None, help="'auto' or a signed integer")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="mqsynth",
        description="Circuit synthesis and claim verification for multiple-quantum transfers",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    layout = commands.add_parser("layout", parents=[common], help="Print the subspace layout")
    layout.add_argument("n", type=int)

    synth = commands.add_parser("synth", help="Synthesize a circuit and write it as JSON")
    kinds = synth.add_subparsers(dest="kind", required=True)
    zz = kinds.add_parser("zz", parents=[common])
    zz.add_argument("--qubits", type=parse_qubits, required=True)
    zz.add_argument("--theta", type=float, default=pi / 2)
    zz.add_argument("--n", type=int, default=None)
    gm = kinds.add_parser("gm", parents=[common])
    gm.add_argument("--n", type=int, required=True)
    gm.add_argument("--m", type=int, required=True)
    gm.add_argument("--theta", type=float, default=pi)
    gm.add_argument("--method", choices=["naive", "block"], default="naive")
    bk = kinds.add_parser("bk", parents=[common])
    bk.add_argument("--n", type=int, required=True)
    bk.add_argument("--theta", type=float, default=pi)
    bk.add_argument("--L", type=int, default=8)
    bk.add_argument("--path", choices=list(BK_PATHS), default="auto")
    upm = kinds.add_parser("upm", parents=[common])
    upm.add_argument("--n", type=int, required=True)
    upm.add_argument("--m", type=int, required=True)
    upm.add_argument("--target", type=int, default=None)
    upm.add_argument("--theta", type=float, default=pi)
    upm.add_argument("--L", type=int, default=8)
    upm.add_argument("--method", choices=["naive", "block"], default="naive")
    for sub in (zz, gm, bk, upm):
        sub.add_argument("--out", default=None, help="Write to this file instead of stdout")

    verify = commands.add_parser("verify", parents=[common], help="Run the claims suite")
    verify.add_argument("--suite", required=True, help="Suite config (JSON or YAML)")
    verify.add_argument("--out", default=None, help="Write the report to this file")

    sweep = commands.add_parser("sweep", parents=[common], help="Count-only complexity sweep")
    sweep.add_argument("--counts", action="store_true")
    sweep.add_argument("--n-max", type=int, default=20)
    sweep.add_argument("--out", default=None)

    transfer = commands.add_parser("transfer", parents=[common], help="Transfer a random state")
    transfer.add_argument("--n", type=int, required=True)
    transfer.add_argument("--m", type=int, required=True)
    transfer.add_argument("--target", type=int, default=None)
    transfer.add_argument("--theta", type=float, default=pi)
    transfer.add_argument("--L", type=int, default=8)
    return parser


def main(argv: Optional[Sequence[str]] = None):
    """Main entry point"""
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO)

    runner = SuiteRunner(getattr(args, "suite", None))
    sys.exit(runner.run(args))


if __name__ == "__main__":
    main()
