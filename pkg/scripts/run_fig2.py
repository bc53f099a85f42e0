#!/usr/bin/env python3
"""Reproduce the noise-robustness benchmark (weighted vs unweighted pairs).

Writes curves.csv / curves.json under results/fig2.
"""

import sys

from rankrecover.cli import main

if __name__ == "__main__":
    jobs = sys.argv[1] if len(sys.argv) > 1 else "1"
    code = main(["benchmark", "--preset", "fig2", "--seed", "101",
                 "--jobs", jobs, "--out", "results/fig2"])
    sys.exit(code)
