"""Command-line surface: ``epr`` with one subcommand per computation.

Every invocation writes exactly one JSON document (default) or one CSV
table to standard output; diagnostics go to stderr. JSON output is a
single object with "command", "inputs" and "result" keys; matrices are
row-major nested arrays, complex numbers are {"re": ..., "im": ...},
and every float is rounded to 12 significant digits so regression diffs
stay meaningful. Exit status is 0 on success, 2 on bad usage or bad
values, and 1 when the no-signaling sweep finds a deviation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bell import ChshSettings, OPTIMAL_SETTINGS, violation_report
from .branchstats import deviation_weight, sample_records
from .epr import NO_SIGNALING_TOL, joint_probability, k_matrix, marginal, no_signaling_sweep
from .errors import EprError
from .branching import identity_basis
from .spin import rotation_overlap, singlet, singlet_joint_probability


@dataclass
class CommandOutput:
    command: str
    inputs: dict
    result: dict
    csv_header: list
    csv_rows: list
    exit_code: int = 0


def _sig12(value):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.12g}")
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _sig12(value.real), "im": _sig12(value.imag)}
    if isinstance(value, dict):
        return {key: _sig12(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig12(v) for v in value]
    if isinstance(value, np.ndarray):
        return _sig12(value.tolist())
    return value


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _emit(out: CommandOutput, fmt: str) -> int:
    if fmt == "json":
        doc = {
            "command": out.command,
            "inputs": _sig12(out.inputs),
            "result": _sig12(out.result),
        }
        json.dump(doc, sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow([_cell(v) for v in out.csv_header])
        for row in out.csv_rows:
            writer.writerow([_cell(v) for v in row])
    return out.exit_code


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"pair must be 'i,j', got {text!r}")
    return int(parts[0]), int(parts[1])


def cmd_probs(args) -> CommandOutput:
    dist = singlet_joint_probability(args.theta)
    p = dist.matrix
    m1 = marginal(dist, 1)
    m2 = marginal(dist, 2)
    result = {
        "row_label": "sz_index",
        "column_label": "sz_prime_index",
        "p": p,
        "marginal_1": m1,
        "marginal_2": m2,
    }
    header = ["sz_index\\sz_prime_index", 0, 1, "marginal_1"]
    rows = [
        [0, p[0, 0], p[0, 1], m1[0]],
        [1, p[1, 0], p[1, 1], m1[1]],
        ["marginal_2", m2[0], m2[1], float(p.sum())],
    ]
    return CommandOutput("probs", {"theta": args.theta}, result, header, rows)


def cmd_kmatrix(args) -> CommandOutput:
    k = k_matrix(singlet(), identity_basis(2), rotation_overlap(args.theta)).matrix
    result = {
        "row_label": "sz_index",
        "column_label": "sz_prime_index",
        "k": [[k[i, j] for j in range(2)] for i in range(2)],
    }
    header = ["sz_index", "sz_prime_index", "re", "im"]
    rows = [
        [i, j, k[i, j].real, k[i, j].imag] for i in range(2) for j in range(2)
    ]
    return CommandOutput("kmatrix", {"theta": args.theta}, result, header, rows)


def cmd_chsh(args) -> CommandOutput:
    if args.optimal:
        settings = OPTIMAL_SETTINGS
    else:
        missing = [
            flag
            for flag, value in (
                ("--a", args.a),
                ("--ap", args.ap),
                ("--b", args.b),
                ("--bp", args.bp),
            )
            if value is None
        ]
        if missing:
            raise ValueError(
                f"chsh needs {', '.join(missing)} unless --optimal is given"
            )
        settings = ChshSettings(args.a, args.ap, args.b, args.bp)
    report = violation_report(settings)
    inputs = {
        "a": settings.a,
        "ap": settings.a_prime,
        "b": settings.b,
        "bp": settings.b_prime,
    }
    result = {
        "quantum_score": report.quantum_score,
        "classical_bound": report.classical_bound,
        "violated": report.violated,
        "margin": report.margin,
    }
    header = ["quantity", "value"]
    rows = [[key, value] for key, value in result.items()]
    return CommandOutput("chsh", inputs, result, header, rows)


def cmd_branches(args) -> CommandOutput:
    if args.n < 1:
        raise ValueError("--n must be at least 1")
    pair = _parse_pair(args.pair)
    dist = singlet_joint_probability(args.theta)
    points = sorted({max(1, args.n // 100), max(1, args.n // 10), args.n})
    table = [
        {"n_pairs": n, "deviation_weight": deviation_weight(dist, n, pair, args.epsilon)}
        for n in points
    ]
    inputs = {
        "n": args.n,
        "theta": args.theta,
        "epsilon": args.epsilon,
        "pair": list(pair),
    }
    result = {
        "pair_probability": float(dist.matrix[pair]),
        "rows": table,
    }
    header = ["n_pairs", "deviation_weight"]
    rows = [[row["n_pairs"], row["deviation_weight"]] for row in table]
    return CommandOutput("branches", inputs, result, header, rows)


def cmd_nosignal(args) -> CommandOutput:
    if not 2 <= args.dim <= 8:
        raise ValueError(f"--dim must be in [2, 8], got {args.dim}")
    sweep = no_signaling_sweep(args.trials, args.dim, args.seed)
    inputs = {"trials": args.trials, "seed": args.seed, "dim": args.dim}
    result = {
        "tol": sweep.tol,
        "max_deviation": sweep.max_deviation,
        "passed": sweep.passed,
    }
    header = ["quantity", "value"]
    rows = [[key, value] for key, value in result.items()]
    return CommandOutput(
        "nosignal", inputs, result, header, rows, exit_code=0 if sweep.passed else 1
    )


def cmd_sample(args) -> CommandOutput:
    dist = singlet_joint_probability(args.theta)
    tables = sample_records(dist, args.n, args.trials, args.seed)
    inputs = {
        "n": args.n,
        "trials": args.trials,
        "seed": args.seed,
        "theta": args.theta,
    }
    result = {
        "shape": [2, 2],
        "trials": [
            {"trial": t, "counts": tables[t]} for t in range(tables.shape[0])
        ],
    }
    header = ["trial", "count_0_0", "count_0_1", "count_1_0", "count_1_1"]
    rows = [
        [t, tables[t, 0, 0], tables[t, 0, 1], tables[t, 1, 0], tables[t, 1, 1]]
        for t in range(tables.shape[0])
    ]
    return CommandOutput("sample", inputs, result, header, rows)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--format",
        choices=("json", "csv"),
        default="json",
        help="output format (default json)",
    )

    parser = argparse.ArgumentParser(
        prog="epr",
        description="Entangled-pair measurement tables, CHSH scores, and "
        "branch statistics with machine-readable output.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "probs", parents=[shared], help="singlet joint record probabilities"
    )
    p.add_argument("--theta", type=float, required=True, help="relative angle, degrees")
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser(
        "kmatrix", parents=[shared], help="singlet record-pair amplitudes"
    )
    p.add_argument("--theta", type=float, required=True, help="relative angle, degrees")
    p.set_defaults(func=cmd_kmatrix)

    p = sub.add_parser("chsh", parents=[shared], help="CHSH score vs local bound")
    p.add_argument("--a", type=float, help="first analyzer setting a, degrees")
    p.add_argument("--ap", type=float, help="first analyzer setting a', degrees")
    p.add_argument("--b", type=float, help="second analyzer setting b, degrees")
    p.add_argument("--bp", type=float, help="second analyzer setting b', degrees")
    p.add_argument(
        "--optimal",
        action="store_true",
        help="use the maximally violating settings (0, 90, 45, 135)",
    )
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser(
        "branches", parents=[shared], help="weight of frequency-deviant branches"
    )
    p.add_argument("--n", type=int, required=True, help="pair count (table runs n/100, n/10, n)")
    p.add_argument("--theta", type=float, required=True, help="relative angle, degrees")
    p.add_argument("--epsilon", type=float, required=True, help="frequency tolerance")
    p.add_argument("--pair", required=True, help="record pair as 'i,j'")
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser(
        "nosignal", parents=[shared], help="far-basis independence sweep"
    )
    p.add_argument("--trials", type=int, required=True, help="random preparations to test")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--dim", type=int, required=True, help="particle dimension, 2..8")
    p.set_defaults(func=cmd_nosignal)

    p = sub.add_parser(
        "sample", parents=[shared], help="sampled record counts per trial"
    )
    p.add_argument("--n", type=int, required=True, help="records per trial")
    p.add_argument("--trials", type=int, required=True, help="number of trials")
    p.add_argument("--seed", type=int, required=True, help="RNG seed")
    p.add_argument("--theta", type=float, required=True, help="relative angle, degrees")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.func(args)
    except (EprError, ValueError, IndexError) as exc:
        print(f"epr {args.subcommand}: {exc}", file=sys.stderr)
        return 2
    return _emit(out, args.format)


if __name__ == "__main__":
    raise SystemExit(main())
