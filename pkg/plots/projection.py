#!/usr/bin/env python3
"""Projection scatter with its smoothed overlay from a profile.csv.

Input columns: score, target, smooth (scores sorted ascending). Scatter of
(score, target) plus the smoothing curve drawn over it.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figspec import FigureSpec, PlotInputError, read_csv_columns


def render(spec: FigureSpec):
    cols = read_csv_columns(spec.source, ("score", "target", "smooth"))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(cols["score"], cols["target"], s=12, alpha=0.5, label="samples")
    ax.plot(cols["score"], cols["smooth"], color="crimson", lw=2, label="smooth")
    ax.set_xlabel(spec.labels.get("x", "projection onto fitted weights"))
    ax.set_ylabel(spec.labels.get("y", "target"))
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(loc="best")
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
        render(FigureSpec(kind="projection", source=args.source, out=args.out,
                          title=args.title))
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
