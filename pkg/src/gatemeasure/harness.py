"""Monte Carlo sampling of outcome variables and report emission.

Trial ``i`` of a run seeded with ``seed`` always consumes the ``i``-th 64-bit
word of a Philox stream keyed by ``seed``. Philox is counter based, so any
block of trials can be generated independently; results do not depend on
how trials are split across workers.
"""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from .branched import JointDistribution, assignment_bits, assignment_indices
from .errors import ConfigError
from .models import (
    Preparation1Q,
    joint_distribution_10,
    rho_q_t,
    rho_q_traced,
)
from .state import ATOL, PSD_ATOL

SCENARIOS = ("one-qubit", "singlet", "continuous")
_UINT64_MAX = 2**64 - 1
# Philox emits four 64-bit words per counter increment.
_WORDS_PER_BLOCK = 4


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    alpha: complex = 1.0
    beta: complex = 0.0
    phi: float = 0.0
    trials: int = 100_000
    seed: int = 0
    s_grid: tuple[float, ...] = ()
    tolerance_sigmas: float = 4.0
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}")
        if int(self.trials) < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= int(self.seed) <= _UINT64_MAX:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.tolerance_sigmas > 0:
            raise ConfigError(f"tolerance_sigmas must be positive, got {self.tolerance_sigmas}")
        if int(self.workers) < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if not math.isfinite(self.phi):
            raise ConfigError(f"phi must be finite, got {self.phi}")
        if self.scenario in ("one-qubit", "continuous"):
            norm2 = abs(complex(self.alpha)) ** 2 + abs(complex(self.beta)) ** 2
            if abs(norm2 - 1.0) > ATOL:
                raise ConfigError(f"|alpha|^2 + |beta|^2 = {norm2!r}, expected 1")

    def preparation(self) -> Preparation1Q:
        return Preparation1Q(self.alpha, self.beta)

    def distribution(self) -> JointDistribution:
        if self.scenario == "singlet":
            return joint_distribution_10(self.phi)
        return self.preparation().gamma_distribution()


@dataclass(frozen=True)
class OutcomeRow:
    assignment: str
    expected: float
    observed_count: int
    observed_freq: float
    z: float


@dataclass(frozen=True)
class FrequencyReport:
    scenario: str
    vars: tuple[str, ...]
    trials: int
    seed: int
    tolerance_sigmas: float
    rows: tuple[OutcomeRow, ...]
    chi_square: float
    dof: int
    p_value: float
    impossible: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.impossible and all(abs(r.z) <= self.tolerance_sigmas for r in self.rows)

    def row(self, assignment: str) -> OutcomeRow:
        return next(r for r in self.rows if r.assignment == assignment)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["vars"] = list(self.vars)
        d["rows"] = [asdict(r) for r in self.rows]
        d["impossible"] = list(self.impossible)
        d["passed"] = self.passed
        return d


def uniforms(seed: int, start: int, stop: int) -> np.ndarray:
    """Uniforms in [0, 1) for trials ``start .. stop-1`` of stream ``seed``."""
    bg = np.random.Philox(key=int(seed))
    block, offset = divmod(start, _WORDS_PER_BLOCK)
    if block:
        bg.advance(block)
    raw = bg.random_raw(stop - start + offset)[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _chunks(trials: int, workers: int) -> list[tuple[int, int]]:
    edges = np.linspace(0, trials, workers + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def sample_counts(
    dist: JointDistribution, trials: int, seed: int, workers: int = 1
) -> np.ndarray:
    """Outcome counts, indexed like ``dist.assignments()``."""
    k = len(dist.assignments())

    def count(span):
        idx = assignment_indices(dist, uniforms(seed, *span))
        return np.bincount(idx, minlength=k)

    spans = _chunks(trials, workers)
    if workers == 1:
        parts = [count(s) for s in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(count, spans))
    return np.sum(parts, axis=0).astype(np.int64)


def z_score(expected: float, freq: float, trials: int) -> float:
    if 0.0 < expected < 1.0:
        return (freq - expected) / math.sqrt(expected * (1.0 - expected) / trials)
    if freq == expected:
        return 0.0
    return math.copysign(math.inf, freq - expected)


def frequency_report(
    dist: JointDistribution,
    counts: Sequence[int],
    *,
    scenario: str,
    seed: int,
    tolerance_sigmas: float = 4.0,
) -> FrequencyReport:
    counts = np.asarray(counts, dtype=np.int64)
    trials = int(counts.sum())
    rows, impossible = [], []
    chi2 = 0.0
    positive = 0
    for a, n in zip(dist.assignments(), counts.tolist()):
        exp = dist.prob(a)
        freq = n / trials
        rows.append(OutcomeRow(assignment_bits(a), exp, n, freq, z_score(exp, freq, trials)))
        if exp > 0:
            positive += 1
            chi2 += (n - trials * exp) ** 2 / (trials * exp)
        elif n > 0:
            impossible.append(assignment_bits(a))
    dof = max(positive - 1, 0)
    p_value = float(stats.chi2.sf(chi2, dof)) if dof else 1.0
    return FrequencyReport(
        scenario=scenario,
        vars=dist.vars,
        trials=trials,
        seed=seed,
        tolerance_sigmas=tolerance_sigmas,
        rows=tuple(rows),
        chi_square=chi2,
        dof=dof,
        p_value=p_value,
        impossible=tuple(impossible),
    )


def run_trials(cfg: ExperimentConfig) -> FrequencyReport:
    """Sample ``cfg.trials`` assignments and compare frequencies with the prediction."""
    dist = cfg.distribution()
    counts = sample_counts(dist, int(cfg.trials), int(cfg.seed), int(cfg.workers))
    return frequency_report(
        dist,
        counts,
        scenario=cfg.scenario,
        seed=int(cfg.seed),
        tolerance_sigmas=cfg.tolerance_sigmas,
    )


@dataclass(frozen=True)
class TrajectoryPoint:
    s: float
    gamma: int
    rho: np.ndarray
    # max entrywise gap between the closed form and the traced branch ket
    deviation: float


def s_grid(steps: int) -> tuple[float, ...]:
    if steps < 2:
        raise ConfigError(f"need at least 2 grid points, got {steps}")
    return tuple(np.linspace(0.0, math.pi / 2, steps).tolist())


def rho_trajectory(prep: Preparation1Q, grid: Sequence[float]) -> list[TrajectoryPoint]:
    points = []
    for s in grid:
        for gamma in (0, 1):
            closed = rho_q_t(prep, s, gamma)
            traced = rho_q_traced(prep, s, gamma)
            dev = float(np.max(np.abs(closed.matrix - traced.matrix)))
            points.append(TrajectoryPoint(float(s), gamma, closed.matrix, dev))
    return points


def trajectory_ok(points: Sequence[TrajectoryPoint], atol: float = ATOL) -> bool:
    for p in points:
        if p.deviation > atol:
            return False
        if abs(np.trace(p.rho) - 1.0) > atol or np.linalg.eigvalsh(p.rho).min() < -PSD_ATOL:
            return False
    return True


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def frequency_csv(report: FrequencyReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["assignment", "expected", "observed_count", "observed_freq", "z"])
    for r in report.rows:
        w.writerow([r.assignment, fmt(r.expected), r.observed_count, fmt(r.observed_freq), fmt(r.z)])
    return buf.getvalue()


def trajectory_csv(points: Sequence[TrajectoryPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "gamma", "rho00_re", "rho01_re", "rho01_im", "rho11_re"])
    for p in points:
        w.writerow(
            [
                fmt(p.s),
                p.gamma,
                fmt(p.rho[0, 0].real),
                fmt(p.rho[0, 1].real),
                fmt(p.rho[0, 1].imag),
                fmt(p.rho[1, 1].real),
            ]
        )
    return buf.getvalue()


def trajectory_to_dict(points: Sequence[TrajectoryPoint]) -> list[dict]:
    return [
        {
            "s": p.s,
            "gamma": p.gamma,
            "rho": [[[float(v.real), float(v.imag)] for v in row] for row in p.rho],
            "deviation": p.deviation,
        }
        for p in points
    ]


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        # Non-finite values have no JSON spelling.
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj, indent, 0) + "\n"


def render(obj, format: str = "csv") -> str:
    """Text form of a frequency report, a trajectory, or (JSON only) a plain dict."""
    if format not in ("csv", "json"):
        raise ConfigError(f"unknown format {format!r}")
    if isinstance(obj, FrequencyReport):
        return frequency_csv(obj) if format == "csv" else to_json(obj.to_dict())
    if isinstance(obj, (list, tuple)) and all(isinstance(p, TrajectoryPoint) for p in obj):
        return trajectory_csv(obj) if format == "csv" else to_json(trajectory_to_dict(obj))
    if isinstance(obj, dict) and format == "json":
        return to_json(obj)
    raise ConfigError(f"cannot render {type(obj).__name__} as {format}")


def emit_report(obj, format: str = "csv", path: str | Path | None = None, stream=None) -> str:
    """Render ``obj`` and write it to ``path``, or to ``stream`` (stdout) without one."""
    text = obj if isinstance(obj, str) else render(obj, format)
    if not text.endswith("\n"):
        text += "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    else:
        (stream or sys.stdout).write(text)
    return text
