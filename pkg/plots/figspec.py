"""Shared input contract for the figure scripts.

Each script reads one documented CSV format produced by the rankrecover
CLI, draws it without resampling (the plotted arrays are exactly the
parsed columns), and writes the image to the requested path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path


class PlotInputError(ValueError):
    """Input file missing, empty, or not in the documented format."""


KINDS = ("recovery_curves", "projection", "score_bars")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    source: Path
    out: Path
    title: str = ""
    labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotInputError(f"unknown figure kind {self.kind!r}")
        object.__setattr__(self, "source", Path(self.source))
        object.__setattr__(self, "out", Path(self.out))
        if not self.source.exists():
            raise PlotInputError(f"input {self.source} does not exist")


def read_csv_columns(path: Path, required: tuple[str, ...]) -> dict[str, list]:
    """Parse the CSV into column lists; numeric cells become floats."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise PlotInputError(f"{path} is empty") from None
            rows = list(reader)
    except OSError as exc:
        raise PlotInputError(f"cannot read {path}: {exc}") from exc
    missing = [c for c in required if c not in header]
    if missing:
        raise PlotInputError(f"{path} lacks column(s) {missing}")
    if not rows:
        raise PlotInputError(f"{path} has no data rows")
    columns: dict[str, list] = {name: [] for name in header}
    for r, row in enumerate(rows):
        if len(row) != len(header):
            raise PlotInputError(f"{path} row {r + 2} is ragged")
        for name, cell in zip(header, row):
            try:
                columns[name].append(float(cell))
            except ValueError:
                columns[name].append(cell)
    return columns
