#!/usr/bin/env python3
"""Per-region score bars from a scores.csv.

Input columns: region, inversion_score (extra columns ignored). One bar
per region; lower inversion means better ranking.
"""

from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from figspec import FigureSpec, PlotInputError, read_csv_columns


def render(spec: FigureSpec):
    cols = read_csv_columns(spec.source, ("region", "inversion_score"))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(cols["region"])), cols["inversion_score"], color="steelblue")
    ax.set_xticks(range(len(cols["region"])))
    ax.set_xticklabels([str(r) for r in cols["region"]], rotation=30, ha="right")
    ax.set_ylabel(spec.labels.get("y", "inversion score (lower is better)"))
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, axis="y", alpha=0.3)
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
        render(FigureSpec(kind="score_bars", source=args.source, out=args.out,
                          title=args.title))
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
