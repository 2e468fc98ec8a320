"""Command-line surface: runs, sweeps, presets, and analysis queries.

Flags mirror the library config strings verbatim, so manifests and CLI
invocations are interconvertible. Config errors exit nonzero with a single
diagnostic line before any computation starts; partial sweep failures exit
nonzero listing the failed cells.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__
from .algorithms import parse_algo
from .analysis import (
    ANALYSIS_CSV_COLUMNS,
    analysis_csv_rows,
    drift,
    expected_noisy_leadingones,
)
from .estimation import parse_policy
from .harness import (
    PRESET_IDS,
    ExperimentSpec,
    build_sweep,
    preset,
    run_sweep,
)
from .noise import model_name, noise_spectrum, parse_model
from .problems import Problem
from .streams import spawn_rng


def _int_range(text: str) -> list[int]:
    """Parse 1..9 (inclusive) or a comma list like 1,2,5."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",") if part]


def _split_list(text: str) -> list[str]:
    return [part for part in text.split(",") if part]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisy-evo",
        description="Noisy evolutionary optimization experiments and exact analysis",
    )
    parser.add_argument("--version", action="version", version=f"noisy-evo {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, listy=False):
        # sweep fields take comma-separated lists; scalars elsewhere
        num = str if listy else int
        p.add_argument("--problem", default="onemax", help="onemax | leadingones")
        p.add_argument("--n", type=num, required=True, help="problem size")
        p.add_argument("--noise", required=True,
                       help="onebit:p=<float> | symmetric | reverse | segmented")
        p.add_argument("--algo", default="1+1",
                       help="1+1 | mu+1:mu=<int>[,rule=replace|add-delete] | 1+lambda:lambda=<int>")
        p.add_argument("--policy", default="single",
                       help="single | fixed:m=<int> | adaptive[:tlow=..,thigh=..,mesc=..]")
        p.add_argument("--budget", type=num, required=True, help="max noisy evaluations per trial")
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=None, help="worker threads (results invariant)")
        p.add_argument("--out", default=None, help="output directory")

    run_p = sub.add_parser("run", help="run one experiment configuration")
    common(run_p)

    sweep_p = sub.add_parser("sweep", help="run a grid over one or two config fields")
    common(sweep_p, listy=True)

    preset_p = sub.add_parser("preset", help="run a canned experiment group")
    preset_p.add_argument("id", choices=PRESET_IDS)
    preset_p.add_argument("--n", type=int, default=None)
    preset_p.add_argument("--trials", type=int, default=None)
    preset_p.add_argument("--budget", type=int, default=None)
    preset_p.add_argument("--seed", type=int, default=0)
    preset_p.add_argument("--jobs", type=int, default=None)
    preset_p.add_argument("--out", default=None)

    drift_p = sub.add_parser("drift", help="drift decomposition per zeros-count state")
    drift_p.add_argument("--noise", required=True)
    drift_p.add_argument("--n", type=int, required=True)
    drift_p.add_argument("--m", type=int, default=1, help="sample size of the Fixed policy")
    drift_p.add_argument("--i", required=True, help="states, e.g. 1..9 or 1,2,5")
    drift_p.add_argument("--method", choices=["exact", "monte-carlo"], default=None)
    drift_p.add_argument("--mc-reps", type=int, default=10**6)
    drift_p.add_argument("--seed", type=int, default=0)
    drift_p.add_argument("--out", default=None)

    spec_p = sub.add_parser("spectrum", help="exact noisy-fitness distribution of a class")
    spec_p.add_argument("--problem", default="onemax")
    spec_p.add_argument("--noise", required=True)
    spec_p.add_argument("--n", type=int, required=True)
    spec_p.add_argument("--i", type=int, required=True,
                        help="zeros-count (OneMax) or gap position k (LeadingOnes)")

    exp_p = sub.add_parser("expected", help="closed-form expected noisy LeadingOnes fitness")
    exp_p.add_argument("--noise", default="onebit", help="must be onebit")
    exp_p.add_argument("--p", type=float, default=1.0)
    exp_p.add_argument("--problem", default="leadingones", help="must be leadingones")
    exp_p.add_argument("--n", type=int, required=True)
    exp_p.add_argument("--k", type=int, required=True)

    return parser


def _cmd_run(args) -> int:
    problem = Problem(args.problem, args.n)
    spec = ExperimentSpec(
        problem=problem,
        model=parse_model(args.noise, args.n),
        algo=parse_algo(args.algo),
        policy=parse_policy(args.policy, args.n),
        budget=args.budget,
        trials=args.trials,
        base_seed=args.seed,
        out_dir=args.out,
    )
    result = run_sweep([spec], jobs=args.jobs, out_dir=args.out)
    return _report(result)


def _cmd_sweep(args) -> int:
    grid = {}
    for field, raw in (("policy", args.policy), ("algo", args.algo),
                       ("model", args.noise), ("n", str(args.n)),
                       ("budget", str(args.budget))):
        values = _split_list(raw)
        if len(values) > 1:
            grid[field] = values
    if len(grid) > 2:
        raise ValueError("sweeps cover at most two fields; got "
                         f"{sorted(grid)}")
    first_n = int(_split_list(str(args.n))[0])
    base = ExperimentSpec(
        problem=Problem(args.problem, first_n),
        model=parse_model(_split_list(args.noise)[0], first_n),
        algo=parse_algo(_split_list(args.algo)[0]),
        policy=parse_policy(_split_list(args.policy)[0], first_n),
        budget=int(_split_list(str(args.budget))[0]),
        trials=args.trials,
        base_seed=args.seed,
        out_dir=args.out,
    )
    cells = build_sweep(base, grid) if grid else [base]
    result = run_sweep(cells, jobs=args.jobs, out_dir=args.out)
    return _report(result)


def _cmd_preset(args) -> int:
    plan = preset(args.id, n=args.n, trials=args.trials, budget=args.budget,
                  base_seed=args.seed, out_dir=args.out)
    result = run_sweep(plan.specs, jobs=args.jobs, out_dir=args.out,
                       preset_id=plan.preset_id, notes=plan.notes)
    return _report(result)


def _report(result) -> int:
    for s in result.summaries:
        print(f"{s.experiment_id}: success {s.successes}/{s.trials} "
              f"(rate {s.success_rate:.3f}, wilson [{s.wilson_low:.3f}, {s.wilson_high:.3f}])")
    for cell, err in result.failures:
        print(f"failed cell {cell}: {err}", file=sys.stderr)
    return 1 if result.failures else 0


def _cmd_drift(args) -> int:
    model = parse_model(args.noise, args.n)
    states = _int_range(args.i)
    rng = spawn_rng(args.seed, 0, "drift")
    records = []
    for i in states:
        rec = drift(args.n, i, model, args.m, method=args.method,
                    rng=rng, mc_reps=args.mc_reps)
        records.append(rec)
        print(f"i={rec.i}: E+={rec.e_plus:.6f} E-={rec.e_minus:.6f} "
              f"drift={rec.drift:.6f} ({rec.method}"
              + (f", ci +-{rec.ci_halfwidth:.2g})" if rec.method == "monte-carlo" else ")"))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        rows = analysis_csv_rows(records, model, args.n, args.m)
        path = os.path.join(args.out, "drift.csv")
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=ANALYSIS_CSV_COLUMNS)
            w.writeheader()
            w.writerows(rows)
        manifest = {
            "tool": "noisy-evo", "version": __version__, "verb": "drift",
            "model": model_name(model), "n": args.n, "m": args.m,
            "states": states, "seed": args.seed,
        }
        with open(os.path.join(args.out, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_spectrum(args) -> int:
    problem = Problem(args.problem, args.n)
    model = parse_model(args.noise, args.n)
    spec = noise_spectrum(problem, model, args.i)
    for value, prob in spec.atoms:
        print(f"{value:.12g}\t{prob:.12g}")
    if spec.continuous is not None:
        low, high, mass = spec.continuous
        print(f"uniform[{low:.12g}, {high:.12g}]\t{mass:.12g}")
    return 0


def _cmd_expected(args) -> int:
    if args.problem != "leadingones" or not args.noise.startswith("onebit"):
        raise ValueError("closed-form expectations cover LeadingOnes under one-bit noise")
    print(f"{expected_noisy_leadingones(args.n, args.k, args.p):g}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "preset": _cmd_preset,
    "drift": _cmd_drift,
    "spectrum": _cmd_spectrum,
    "expected": _cmd_expected,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
