"""Command-line front end.

Exit codes: 0 all checks pass, 1 statistical or numerical check failed,
2 invalid configuration, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import GateMeasureError
from .gates import COMPLETIONS, format_word, measurement_gate
from .models import scenario_to_dict, transition_4, transition_11

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _common(p: argparse.ArgumentParser, formats=("csv", "json"), default="csv") -> None:
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def _prep_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-re", type=float, default=1.0)
    p.add_argument("--alpha-im", type=float, default=0.0)
    p.add_argument("--beta-re", type=float, default=0.0)
    p.add_argument("--beta-im", type=float, default=0.0)


def _trial_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance-sigmas", type=float, default=4.0)
    p.add_argument("--workers", type=int, default=1, help="threads; output does not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gatemeasure",
        description="Simulate the gate model of measurement and check its outcome statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("one-qubit", help="sample the outcome of a single-qubit preparation")
    _prep_args(p)
    _trial_args(p)
    _common(p)

    p = sub.add_parser("singlet", help="sample both outcomes of the rotated singlet")
    p.add_argument("--phi", type=float, default=0.0, help="reference rotation in radians")
    _trial_args(p)
    _common(p)

    p = sub.add_parser("continuous", help="reduced state of q along the continuous model")
    _prep_args(p)
    p.add_argument("--s-steps", type=int, default=11, help="points on [0, pi/2]")
    p.add_argument("--tolerance-sigmas", type=float, default=4.0, help="accepted for symmetry; this check is exact")
    _common(p)

    p = sub.add_parser("gate-dump", help="print the completed measurement truth table")
    p.add_argument("--completion", choices=COMPLETIONS, default="e-block")
    _common(p, formats=("text", "json"), default="text")
    return parser


def _one_qubit(args) -> tuple[str, bool]:
    cfg = harness.ExperimentConfig(
        scenario="one-qubit",
        alpha=complex(args.alpha_re, args.alpha_im),
        beta=complex(args.beta_re, args.beta_im),
        trials=args.trials,
        seed=args.seed,
        tolerance_sigmas=args.tolerance_sigmas,
        workers=args.workers,
    )
    report = harness.run_trials(cfg)
    if args.format == "csv":
        return harness.render(report, "csv"), report.passed
    data = {
        "report": report.to_dict(),
        "scenario": scenario_to_dict(transition_4(cfg.preparation()), reduce_to=("q",)),
    }
    return harness.render(data, "json"), report.passed


def _singlet(args) -> tuple[str, bool]:
    cfg = harness.ExperimentConfig(
        scenario="singlet",
        phi=args.phi,
        trials=args.trials,
        seed=args.seed,
        tolerance_sigmas=args.tolerance_sigmas,
        workers=args.workers,
    )
    report = harness.run_trials(cfg)
    if args.format == "csv":
        return harness.render(report, "csv"), report.passed
    data = {
        "report": report.to_dict(),
        "scenario": scenario_to_dict(transition_11(args.phi), reduce_to=("p1", "p2")),
    }
    return harness.render(data, "json"), report.passed


def _continuous(args) -> tuple[str, bool]:
    cfg = harness.ExperimentConfig(
        scenario="continuous",
        alpha=complex(args.alpha_re, args.alpha_im),
        beta=complex(args.beta_re, args.beta_im),
        s_grid=harness.s_grid(args.s_steps),
        trials=1,
    )
    points = harness.rho_trajectory(cfg.preparation(), cfg.s_grid)
    return harness.render(points, args.format), harness.trajectory_ok(points)


def _gate_dump(args) -> tuple[str, bool]:
    table = measurement_gate(args.completion).to_table()
    if args.format == "text":
        return table.to_text(), True
    data = {
        "width": table.width,
        "completion": args.completion,
        "rows": {format_word(k, table.width): format_word(v, table.width) for k, v in table.rows.items()},
    }
    return harness.render(data, "json"), True


_COMMANDS = {
    "one-qubit": _one_qubit,
    "singlet": _singlet,
    "continuous": _continuous,
    "gate-dump": _gate_dump,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, ok = _COMMANDS[args.command](args)
    except (GateMeasureError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        harness.emit_report(text, path=args.out)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if not ok:
        print("check failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
