#!/usr/bin/env python3
"""Reproduce the recovery-vs-sample-size benchmark (both grid sizes).

Writes curves.csv / curves.json for the 5^3 and 7^3 volumes under
results/fig1_{5,7}cube. Figures render from these with
plots/render.py --kind recovery_curves.
"""

import sys
from pathlib import Path

from rankrecover.cli import main

OUT = Path("results")


if __name__ == "__main__":
    jobs = sys.argv[1] if len(sys.argv) > 1 else "1"
    for preset in ("fig1-5cube", "fig1-7cube"):
        out = OUT / preset.replace("-", "_")
        code = main(["benchmark", "--preset", preset, "--seed", "101",
                     "--jobs", jobs, "--out", str(out)])
        if code != 0:
            sys.exit(code)
    print(f"wrote {OUT}/fig1_5cube and {OUT}/fig1_7cube", file=sys.stderr)
