#!/usr/bin/env python3
"""Dispatcher over the figure scripts: --kind picks the renderer.

    python plots/render.py --kind recovery_curves --in curves.csv --out fig1.png
    python plots/render.py --kind projection      --in profile.csv --out fig4.png
    python plots/render.py --kind score_bars      --in scores.csv  --out fig3.png
"""

from __future__ import annotations

import argparse
import sys

import projection
import recovery_curves
import score_bars
from figspec import KINDS, FigureSpec, PlotInputError

RENDERERS = {
    "recovery_curves": recovery_curves.render,
    "projection": projection.render,
    "score_bars": score_bars.render,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kind", required=True, choices=KINDS)
    parser.add_argument("--in", dest="source", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--title", default="")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(kind=args.kind, source=args.source, out=args.out,
                          title=args.title)
        RENDERERS[args.kind](spec)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
