"""Turn noisy-evo harness CSVs into report figures.

Three figure kinds, consuming exactly the harness output schemas:

* success-vs-m: success rate against the sample size m (log axis) with
  Wilson error bars, from a summary CSV whose policies are fixed:m=<int>
* drift-profile: drift against the zeros-count state with a zero reference
  line, from an analysis CSV (n, i, j, model, m, value, ci, method)
* scaling: success rate against the problem size n with Wilson error bars,
  from a summary CSV, one series per (algorithm, policy)

Rendering is a pure function of the CSV contents; schema mismatches abort
before anything is written.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

SUMMARY_COLUMNS = [
    "experiment_id", "n", "problem", "model", "algorithm", "policy", "budget",
    "trials", "successes", "success_rate", "wilson_low", "wilson_high",
    "hit_evals_mean", "hit_evals_median", "hit_evals_q25", "hit_evals_q75",
    "censored",
]

ANALYSIS_COLUMNS = ["n", "i", "j", "model", "m", "value", "ci", "method"]

KINDS = ("success-vs-m", "drift-profile", "scaling")


class SchemaError(ValueError):
    """Input CSV does not match the expected harness schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input_csv: str
    output_image: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind: {self.kind!r} (choose from {KINDS})")


@dataclass(frozen=True)
class Series:
    """Plotted data of one figure, returned for inspection and testing."""

    label: str
    x: tuple
    y: tuple
    y_low: tuple = ()
    y_high: tuple = ()


def _read_rows(path: str, required: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing} (header {header})")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _fixed_m(policy: str) -> int | None:
    if policy.startswith("fixed:m="):
        return int(policy.split("=", 1)[1])
    if policy == "single":
        return 1
    return None


def _success_vs_m(rows: list[dict]) -> list[Series]:
    points = []
    for row in rows:
        m = _fixed_m(row["policy"])
        if m is None:
            raise SchemaError(
                f"success-vs-m needs fixed-sampling rows, got policy {row['policy']!r}"
            )
        points.append((m, float(row["success_rate"]),
                       float(row["wilson_low"]), float(row["wilson_high"])))
    points.sort()
    m, rate, low, high = zip(*points)
    return [Series(label="success rate", x=m, y=rate, y_low=low, y_high=high)]


def _drift_profile(rows: list[dict]) -> list[Series]:
    points = sorted((int(row["i"]), float(row["value"])) for row in rows)
    i, value = zip(*points)
    return [Series(label="drift", x=i, y=value)]


def _scaling(rows: list[dict]) -> list[Series]:
    groups: dict[str, list] = {}
    for row in rows:
        label = f"{row['algorithm']} {row['policy']}"
        groups.setdefault(label, []).append(
            (int(row["n"]), float(row["success_rate"]),
             float(row["wilson_low"]), float(row["wilson_high"]))
        )
    series = []
    for label in sorted(groups):
        pts = sorted(groups[label])
        n, rate, low, high = zip(*pts)
        series.append(Series(label=label, x=n, y=rate, y_low=low, y_high=high))
    return series


def render(spec: FigureSpec) -> list[Series]:
    """Render one figure; returns the plotted series."""
    if spec.kind == "drift-profile":
        rows = _read_rows(spec.input_csv, ANALYSIS_COLUMNS)
        series = _drift_profile(rows)
    elif spec.kind == "success-vs-m":
        rows = _read_rows(spec.input_csv, SUMMARY_COLUMNS)
        series = _success_vs_m(rows)
    else:
        rows = _read_rows(spec.input_csv, SUMMARY_COLUMNS)
        series = _scaling(rows)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if spec.kind == "success-vs-m":
        s = series[0]
        yerr = [[y - lo for y, lo in zip(s.y, s.y_low)],
                [hi - y for y, hi in zip(s.y, s.y_high)]]
        ax.errorbar(s.x, s.y, yerr=yerr, fmt="o-", capsize=4)
        ax.set_xscale("log")
        ax.set_xlabel("sample size m")
        ax.set_ylabel("success rate")
        ax.set_ylim(-0.05, 1.05)
    elif spec.kind == "drift-profile":
        s = series[0]
        ax.plot(s.x, s.y, "o-")
        ax.axhline(0.0, color="grey", linewidth=1)
        ax.set_xlabel("zeros count i")
        ax.set_ylabel("drift E+ - E-")
    else:
        for s in series:
            yerr = [[y - lo for y, lo in zip(s.y, s.y_low)],
                    [hi - y for y, hi in zip(s.y, s.y_high)]]
            ax.errorbar(s.x, s.y, yerr=yerr, fmt="o-", capsize=4, label=s.label)
        ax.set_xlabel("problem size n")
        ax.set_ylabel("success rate")
        ax.set_ylim(-0.05, 1.05)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.output_image)
    plt.close(fig)
    return series


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figures",
        description="Render a noisy-evo harness CSV into a figure",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input_csv")
    parser.add_argument("output_image")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(args.kind, args.input_csv, args.output_image))
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
