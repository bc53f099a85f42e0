#!/usr/bin/env python3
"""Recovery curves with error bars from a benchmark curves.csv.

Input columns: estimator, n, mean_rho, std_rho. One errorbar line per
estimator, mean correlation against sample size (higher is better).
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figspec import FigureSpec, PlotInputError, read_csv_columns


def render(spec: FigureSpec):
    cols = read_csv_columns(spec.source, ("estimator", "n", "mean_rho", "std_rho"))
    fig, ax = plt.subplots(figsize=(6, 4))
    seen = []
    for name in cols["estimator"]:
        if name not in seen:
            seen.append(name)
    for name in seen:
        idx = [k for k, e in enumerate(cols["estimator"]) if e == name]
        ax.errorbar(
            [cols["n"][k] for k in idx],
            [cols["mean_rho"][k] for k in idx],
            yerr=[cols["std_rho"][k] for k in idx],
            marker="o", capsize=3, label=name,
        )
    ax.set_xlabel(spec.labels.get("x", "training samples"))
    ax.set_ylabel(spec.labels.get("y", "correlation with true weights"))
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="lower right")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.out)
    return fig


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--in", dest="source", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(kind="recovery_curves", source=args.source, out=args.out,
                          title=args.title))
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
