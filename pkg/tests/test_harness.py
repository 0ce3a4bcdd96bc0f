import csv
import io
import json
import math

import numpy as np
import pytest
from scipy import stats

from gatemeasure.branched import JointDistribution
from gatemeasure.errors import ConfigError
from gatemeasure.harness import (
    ExperimentConfig,
    emit_report,
    frequency_report,
    render,
    rho_trajectory,
    run_trials,
    s_grid,
    sample_counts,
    to_json,
    trajectory_ok,
    uniforms,
    z_score,
)
from gatemeasure.models import Preparation1Q, joint_distribution_10

R = 1 / math.sqrt(2)


class TestUniforms:
    @pytest.mark.parametrize("start, stop", [(0, 10), (1, 9), (4, 37), (5, 6), (13, 100), (99, 100)])
    def test_any_block_matches_the_full_stream(self, start, stop):
        full = uniforms(123, 0, 100)
        assert np.array_equal(uniforms(123, start, stop), full[start:stop])

    def test_range_and_seed_dependence(self):
        u = uniforms(0, 0, 10_000)
        assert u.min() >= 0 and u.max() < 1
        assert not np.array_equal(u, uniforms(1, 0, 10_000))

    def test_looks_uniform(self):
        u = uniforms(2024, 0, 100_000)
        assert stats.kstest(u, "uniform").pvalue > 1e-4

    def test_full_64_bit_seed(self):
        u = uniforms(2**64 - 1, 0, 5)
        assert u.shape == (5,)


class TestZScore:
    def test_formula(self):
        # (0.51 - 0.5) / sqrt(0.25 / 10000) = 0.01 / 0.005
        assert z_score(0.5, 0.51, 10_000) == pytest.approx(2.0, rel=1e-12)

    def test_degenerate_expectations(self):
        assert z_score(1.0, 1.0, 10) == 0.0
        assert z_score(0.0, 0.0, 10) == 0.0
        assert z_score(0.0, 0.1, 10) == math.inf
        assert z_score(1.0, 0.9, 10) == -math.inf


class TestRunTrials:
    def test_point_mass(self):
        rep = run_trials(ExperimentConfig("one-qubit", alpha=0, beta=1, trials=1000, seed=9))
        assert rep.row("1").observed_count == 1000
        assert rep.row("0").observed_count == 0
        assert rep.passed

    def test_singlet_phi_zero_never_same(self):
        rep = run_trials(ExperimentConfig("singlet", phi=0.0, trials=100_000, seed=17))
        assert rep.row("00").observed_count == 0
        assert rep.row("11").observed_count == 0
        assert rep.passed

    def test_equal_superposition_within_four_sigma(self):
        rep = run_trials(ExperimentConfig("one-qubit", alpha=R, beta=R, trials=100_000, seed=12345))
        bound = 4 * math.sqrt(0.25 / 100_000)
        assert bound == pytest.approx(0.0063, abs=1e-4)
        assert abs(rep.row("1").observed_freq - 0.5) <= bound
        assert rep.passed

    def test_counts_and_frequencies_sum(self):
        rep = run_trials(ExperimentConfig("singlet", phi=0.6, trials=12_345, seed=3))
        assert sum(r.observed_count for r in rep.rows) == 12_345
        assert sum(r.observed_freq for r in rep.rows) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("workers", [2, 3, 7])
    def test_independent_of_worker_count(self, workers):
        base = ExperimentConfig("singlet", phi=0.9, trials=50_001, seed=77)
        split = ExperimentConfig("singlet", phi=0.9, trials=50_001, seed=77, workers=workers)
        assert render(run_trials(base)) == render(run_trials(split))

    def test_byte_deterministic(self):
        cfg = ExperimentConfig("one-qubit", alpha=0.6, beta=0.8j, trials=20_000, seed=2**63 + 5)
        assert render(run_trials(cfg)) == render(run_trials(cfg))
        assert render(run_trials(cfg), "json") == render(run_trials(cfg), "json")

    def test_pass_rate_over_seeds(self):
        passes = 0
        for seed in range(50):
            passes += run_trials(ExperimentConfig("singlet", phi=0.5, trials=100_000, seed=seed)).passed
        assert passes >= 48

    def test_chi_square_matches_scipy(self):
        cfg = ExperimentConfig("singlet", phi=0.4, trials=40_000, seed=8)
        rep = run_trials(cfg)
        obs = [r.observed_count for r in rep.rows]
        exp = [r.expected * cfg.trials for r in rep.rows]
        ref = stats.chisquare(obs, exp)
        assert rep.chi_square == pytest.approx(ref.statistic, rel=1e-10)
        assert rep.p_value == pytest.approx(ref.pvalue, rel=1e-8)

    def test_chi_square_skips_zero_probability(self):
        rep = run_trials(ExperimentConfig("singlet", phi=0.0, trials=10_000, seed=1))
        obs = [rep.row(a).observed_count for a in ("01", "10")]
        ref = stats.chisquare(obs, [5_000, 5_000])
        assert rep.dof == 1
        assert rep.chi_square == pytest.approx(ref.statistic, rel=1e-10)

    def test_biased_counts_fail(self):
        dist = JointDistribution(("gamma",), {(0,): 0.5, (1,): 0.5})
        rep = frequency_report(dist, [51_000, 49_000], scenario="one-qubit", seed=0)
        assert not rep.passed

    def test_impossible_outcome_flagged(self):
        dist = joint_distribution_10(0.0)
        rep = frequency_report(dist, [1, 500, 499, 0], scenario="singlet", seed=0)
        assert rep.impossible == ("00",)
        assert not rep.passed

    def test_sample_counts_respects_zero_probabilities(self):
        dist = JointDistribution(("g1", "g2"), {(0, 1): 0.25, (1, 1): 0.75})
        counts = sample_counts(dist, 10_000, seed=4)
        assert counts[0] == 0 and counts[2] == 0
        assert counts.sum() == 10_000


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(scenario="triplet"),
            dict(scenario="one-qubit", trials=0),
            dict(scenario="one-qubit", seed=-1),
            dict(scenario="one-qubit", seed=2**64),
            dict(scenario="one-qubit", alpha=1, beta=1),
            dict(scenario="singlet", tolerance_sigmas=0),
            dict(scenario="singlet", workers=0),
            dict(scenario="singlet", phi=math.nan),
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            ExperimentConfig(**kwargs)


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestEmit:
    def test_frequency_csv(self):
        rep = run_trials(ExperimentConfig("singlet", phi=math.pi / 4, trials=1000, seed=0))
        text = render(rep, "csv")
        assert text.splitlines()[0] == "assignment,expected,observed_count,observed_freq,z"
        rows = _rows(text)
        assert [r["assignment"] for r in rows] == ["00", "01", "10", "11"]
        assert text.endswith("\n")

    def test_seventeen_digits(self):
        rep = run_trials(ExperimentConfig("one-qubit", alpha=R, beta=R, trials=999, seed=0))
        row = _rows(render(rep, "csv"))[0]
        assert row["expected"] == format(R * R, ".17g")
        assert float(row["observed_freq"]) == rep.rows[0].observed_freq

    def test_trajectory_rows(self):
        points = rho_trajectory(Preparation1Q(0.6, 0.8j), s_grid(11))
        rows = _rows(render(points, "csv"))
        assert len(rows) == 22
        assert list(rows[0]) == ["s", "gamma", "rho00_re", "rho01_re", "rho01_im", "rho11_re"]
        last = rows[-1]
        assert float(last["s"]) == pytest.approx(math.pi / 2) and last["gamma"] == "1"
        assert abs(float(last["rho11_re"]) - 1) <= 1e-12
        for key in ("rho00_re", "rho01_re", "rho01_im"):
            assert abs(float(last[key])) <= 1e-12
        assert trajectory_ok(points)

    def test_json_is_valid_and_complete(self):
        rep = run_trials(ExperimentConfig("singlet", phi=0.3, trials=5000, seed=2))
        data = json.loads(render(rep, "json"))
        assert data["trials"] == 5000 and data["passed"] is True
        assert len(data["rows"]) == 4
        assert data["vars"] == ["gamma1", "gamma2"]

    def test_json_floats(self):
        text = to_json({"x": 0.1, "y": [1.0, math.inf], "z": "t", "w": True})
        assert json.loads(text) == {"x": 0.1, "y": [1.0, None], "z": "t", "w": True}
        assert "0.10000000000000001" in text

    def test_emit_to_path(self, tmp_path):
        rep = run_trials(ExperimentConfig("one-qubit", trials=10, seed=0))
        out = tmp_path / "r.csv"
        text = emit_report(rep, "csv", out)
        assert out.read_text() == text

    def test_emit_to_stream(self):
        buf = io.StringIO()
        emit_report({"a": 1}, "json", stream=buf)
        assert json.loads(buf.getvalue()) == {"a": 1}

    def test_render_errors(self):
        with pytest.raises(ConfigError):
            render({"a": 1}, "csv")
        with pytest.raises(ConfigError):
            render([], "xml")

    def test_grid_needs_two_points(self):
        with pytest.raises(ConfigError):
            s_grid(1)
