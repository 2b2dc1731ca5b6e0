"""
Tests for the claims verification engine.
"""

import json

import pytest
import numpy as np

from src.claims import (
    CLAIM_IDS,
    DEFAULT_TOLERANCES,
    FAIL,
    MEASURED,
    PASS,
    ClaimResult,
    ClaimsSuite,
    SweepConfig,
    bk_convergence,
    eq38_expansion,
    fit_convergence,
    run_claims_suite,
    summarize,
    trotter_convergence,
    write_report,
)
from src.errors import ConfigError, SynthesisError
from src.layout import build_layout
from src.operators import max_distance
from src.transfer import TransferSpec


@pytest.fixture
def small_config():
    """Every claim on two and three qubits, counts up to four."""
    return SweepConfig.from_dict(
        {
            "n_min": 2,
            "n_max": 3,
            "count_n_max": 4,
            "workers": 2,
            "random_states": 3,
            "pair_samples": 10,
            "block_samples": 20,
        }
    )


def _conjugate_by_phases(A, angles):
    diag = np.ones(A.shape[0], dtype=complex)
    for p, theta in angles.items():
        diag[p] = np.exp(-1j * theta)
    return (diag[:, None] * A) * diag.conj()[None, :]


class TestSweepConfig:
    """Suite configuration validation."""

    def test_defaults(self):
        """An empty mapping gives the documented defaults."""
        config = SweepConfig.from_dict({})
        assert (config.n_min, config.n_max, config.count_n_max) == (2, 6, 12)
        assert config.trotter_L == [4, 8, 16, 32]
        assert config.selected_claims() == list(CLAIM_IDS)

    @pytest.mark.parametrize(
        "raw",
        [
            {"bogus": 1},
            {"n_max": 13},
            {"n_min": 4, "n_max": 3},
            {"count_n_max": 21},
            {"k_policy": "magic"},
            {"trotter_L": [4, 8]},
            {"trotter_L": [4, 0, 8]},
            {"claims": ["NOPE"]},
            {"tolerances": {"NOPE": 1e-3}},
            {"workers": 0},
            {"workers": "many"},
        ],
    )
    def test_invalid(self, raw):
        """Bad fields raise ConfigError."""
        with pytest.raises(ConfigError):
            SweepConfig.from_dict(raw)

    def test_two_depths_without_trotter(self):
        """Two depths are fine when TROTTER_ORDER is not selected."""
        config = SweepConfig.from_dict({"trotter_L": [4, 8], "claims": ["EQ6_CLOSED_FORM"]})
        assert config.selected_claims() == ["EQ6_CLOSED_FORM"]

    def test_workers_from_environment(self, monkeypatch):
        """MQSYNTH_WORKERS fills in a missing worker count."""
        monkeypatch.setenv("MQSYNTH_WORKERS", "7")
        assert SweepConfig.from_dict({}).workers == 7
        assert SweepConfig.from_dict({"workers": 3}).workers == 3

    def test_tolerance_lookup(self):
        """Overrides win over defaults."""
        config = SweepConfig.from_dict({"tolerances": {"EQ7_PHASE": 1e-6}})
        assert config.tolerance("EQ7_PHASE") == 1e-6
        assert config.tolerance("EQ6_CLOSED_FORM") == DEFAULT_TOLERANCES["EQ6_CLOSED_FORM"]

    def test_ranges(self):
        """Dense and count ranges clip to the requested bounds."""
        config = SweepConfig.from_dict({"n_min": 1, "n_max": 8, "count_n_max": 14})
        assert config.dense_range(lo=2, hi=5) == [2, 3, 4, 5]
        assert config.count_range(lo=2)[-1] == 14


class TestPhaseExpansion:
    """Four-term expansion of diagonal phase conjugation."""

    def test_no_angles(self, random_hermitian):
        """An empty rotation set leaves A unchanged."""
        A = random_hermitian(4)
        assert np.allclose(eq38_expansion(A, {}), A)

    def test_diagonal_operator_is_invariant(self):
        """Diagonal A commutes with every phase rotation."""
        A = np.diag([1.0, -2.0, 0.5, 3.0]).astype(complex)
        assert np.allclose(eq38_expansion(A, {0: 0.3, 2: 1.9}), A)

    @pytest.mark.parametrize("angles", [{0: np.pi, 3: np.pi / 2}, {1: 0.7}, {0: 0.1, 1: 2.0, 2: 4.0, 3: 5.5}])
    def test_matches_direct_conjugation(self, random_hermitian, angles):
        """The expansion equals U A U^-1 computed directly."""
        A = random_hermitian(4)
        assert max_distance(eq38_expansion(A, angles), _conjugate_by_phases(A, angles)) < 1e-10


class TestConvergenceFit:
    """Log-log fits of Trotter distances."""

    @pytest.mark.parametrize("L_values", [[4], [4, 8, 8]])
    def test_needs_three_depths(self, L_values):
        """Fewer than three distinct depths is a config error."""
        with pytest.raises(ConfigError):
            fit_convergence(L_values, [1e-3] * len(L_values))

    def test_second_order_slope(self):
        """d = 3/L^2 fits slope -2."""
        L_values = [4, 8, 16, 32]
        fit = fit_convergence(L_values, [3.0 / L**2 for L in L_values])
        assert not fit.exact
        assert fit.slope == pytest.approx(-2.0)
        assert fit.intercept == pytest.approx(np.log(3.0))

    def test_floor_noise_excluded(self):
        """Distances below 1e-12 do not enter the fit."""
        fit = fit_convergence([4, 8, 16], [1e-3, 2.5e-4, 1e-14])
        assert fit.slope == pytest.approx(-2.0)
        assert fit.distances[16] == 1e-14

    def test_exact_product_formula(self):
        """All distances at floor noise report an exact formula."""
        fit = fit_convergence([4, 8, 16], [1e-15, 0.0, 3e-16])
        assert fit.exact
        assert fit.slope is None

    def test_transfer_convergence(self):
        """U_pm product formulas reach the exact transfer at every depth."""
        fit = trotter_convergence(TransferSpec(build_layout(3), 0), [1, 2, 4])
        assert sorted(fit.distances) == [1, 2, 4]
        assert max(fit.distances.values()) < 1e-9

    def test_general_bk_convergence(self):
        """The centered-line product formula for b_3 at n=3 reaches the exponential."""
        fit = bk_convergence(3, np.pi, 3, [1, 2, 4])
        assert max(fit.distances.values()) < 1e-8


class TestClaimsSuite:
    """Job planning and execution."""

    def test_plan_respects_selection(self):
        """Only selected claims are planned, one job per n."""
        config = SweepConfig.from_dict({"n_min": 2, "n_max": 4, "claims": ["EQ6_CLOSED_FORM"]})
        jobs = ClaimsSuite(config).plan()
        assert [(claim, params) for claim, params, _ in jobs] == [
            ("EQ6_CLOSED_FORM", {"n": 2}),
            ("EQ6_CLOSED_FORM", {"n": 3}),
            ("EQ6_CLOSED_FORM", {"n": 4}),
        ]

    def test_job_errors_become_failures(self, small_config):
        """A raising job yields one failed result instead of aborting the run."""

        def broken():
            raise SynthesisError("boom")

        results = ClaimsSuite(small_config)._run_job(("EQ6_CLOSED_FORM", {"n": 2}, broken))
        assert len(results) == 1
        assert results[0].status == FAIL
        assert results[0].note == "error: boom"

    def test_unexpected_errors_become_failures(self, small_config):
        """A numpy failure inside one job is recorded with its parameters."""

        def singular():
            raise np.linalg.LinAlgError("Singular matrix")

        results = ClaimsSuite(small_config)._run_job(("NORMS", {"n": 3}, singular))
        assert [(r.claim, r.params, r.status) for r in results] == [("NORMS", {"n": 3}, FAIL)]
        assert results[0].note == "error: LinAlgError: Singular matrix"

    def test_small_suite_passes(self, small_config):
        """Every claim is reported and none fails on small registers."""
        results = run_claims_suite(small_config)
        assert {r.claim for r in results} == set(CLAIM_IDS)
        failed = [(r.claim, r.params, r.note) for r in results if r.status == FAIL]
        assert failed == []
        assert {r.status for r in results if r.claim in ("EQ24_CONJ", "TROTTER_ORDER")} == {MEASURED}

    def test_report_is_deterministic(self, small_config):
        """Two runs with the same config produce identical sorted reports."""
        first = run_claims_suite(small_config)
        second = run_claims_suite(small_config)
        assert write_report(first) == write_report(second)
        assert [r.sort_key() for r in first] == sorted(r.sort_key() for r in first)

    def test_sampled_blocks_up_to_ten_qubits(self):
        """200 sampled blocks per n stay exact and below 2n selectives for n=7..10."""
        config = SweepConfig.from_dict(
            {"n_min": 7, "n_max": 10, "claims": ["BLOCK_REDUCTION"], "block_samples": 200}
        )
        results = run_claims_suite(config)
        assert sorted(r.params["n"] for r in results) == [7, 8, 9, 10]
        assert all(r.status == PASS for r in results)
        assert all(r.params["samples"] == 200 for r in results)

    def test_count_claims_at_larger_n(self):
        """Count-only claims stay cheap and hold up to n=14."""
        config = SweepConfig.from_dict(
            {
                "n_min": 2,
                "n_max": 2,
                "count_n_max": 14,
                "claims": ["EXPANSION_COUNTS", "COUNT_GM_2N", "COMPLEXITY_UK", "COMPLEXITY_BK"],
                "block_samples": 50,
            }
        )
        results = run_claims_suite(config)
        assert results
        assert all(r.status == PASS for r in results)
        assert max(r.params["n"] for r in results) == 14


class TestReporting:
    """Summaries and JSON lines."""

    @pytest.fixture
    def results(self):
        return [
            ClaimResult("EQ6_CLOSED_FORM", {"n": 2}, PASS, 1e-15, 1e-12),
            ClaimResult("EQ6_CLOSED_FORM", {"n": 3}, FAIL, 1e-3, 1e-12, "too far"),
            ClaimResult("TROTTER_ORDER", {"n": 3, "L": [4, 8, 16]}, MEASURED, None, 0.2),
        ]

    def test_summarize(self, results):
        """Counts per claim and status."""
        summary = summarize(results)
        assert summary["EQ6_CLOSED_FORM"] == {PASS: 1, FAIL: 1, MEASURED: 0}
        assert summary["TROTTER_ORDER"][MEASURED] == 1

    def test_write_report(self, results):
        """One sorted-key JSON object per line."""
        lines = write_report(results).splitlines()
        assert len(lines) == 3
        first = json.loads(lines[0])
        assert first == {
            "claim": "EQ6_CLOSED_FORM",
            "params": {"n": 2},
            "status": "pass",
            "metric": 1e-15,
            "tolerance": 1e-12,
            "note": "",
        }
        assert lines[0] == json.dumps(first, sort_keys=True)
        assert json.loads(lines[2])["metric"] is None
