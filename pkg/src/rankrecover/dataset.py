"""In-memory data model and CSV (+ JSON sidecar) serialization.

On-disk layout: one CSV with header ``f0..f{p-1},target[,subject][,session]``,
UTF-8, '.' decimals. An optional sidecar ``<stem>.json`` next to the CSV
carries the voxel grid shape and generator provenance; it is read when
present and never required.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import (
    EmptyDatasetError,
    MissingTargetColumnError,
    NonFiniteValueError,
    NonNumericCellError,
    RaggedRowsError,
    SplitInfeasibleError,
    ValidationError,
)
from .util import fmt_number, rng_from, write_json


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """Immutable bundle of samples, ordinal targets and group labels.

    features: (n, p) float matrix. targets: (n,) float vector. subject and
    session are optional integer group labels of length n. feature_shape,
    when present, is the 3-d voxel grid whose flattening gives the feature
    order (prod == p).
    """

    features: np.ndarray
    targets: np.ndarray
    subject: Optional[np.ndarray] = None
    session: Optional[np.ndarray] = None
    feature_shape: Optional[tuple[int, int, int]] = None
    provenance: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=float))
        y = np.asarray(self.targets, dtype=float)
        if X.ndim != 2:
            raise ValidationError(f"features must be 2-d, got ndim={X.ndim}")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise ValidationError(
                f"targets length {y.shape} does not match {X.shape[0]} feature rows"
            )
        if not np.all(np.isfinite(X)):
            raise NonFiniteValueError("non-finite value in features")
        if not np.all(np.isfinite(y)):
            raise NonFiniteValueError("non-finite value in targets")
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "targets", _frozen(y))
        for name in ("subject", "session"):
            g = getattr(self, name)
            if g is not None:
                g = np.asarray(g, dtype=np.int64)
                if g.shape != (X.shape[0],):
                    raise ValidationError(f"{name} length {g.shape} != n={X.shape[0]}")
                object.__setattr__(self, name, _frozen(g))
        if self.feature_shape is not None:
            shape = tuple(int(d) for d in self.feature_shape)
            if len(shape) != 3 or any(d <= 0 for d in shape):
                raise ValidationError(f"feature_shape must be 3 positive dims, got {shape}")
            if math.prod(shape) != X.shape[1]:
                raise ValidationError(
                    f"feature_shape {shape} product != p={X.shape[1]}"
                )
            object.__setattr__(self, "feature_shape", shape)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """Known weight pattern used as the recovery oracle."""

    weights: np.ndarray
    support: frozenset[int] = None  # derived when omitted

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1:
            raise ValidationError("ground-truth weights must be a vector")
        nz = frozenset(int(i) for i in np.flatnonzero(w))
        if self.support is None:
            object.__setattr__(self, "support", nz)
        elif frozenset(int(i) for i in self.support) != nz:
            raise ValidationError("support does not equal the nonzero index set")
        object.__setattr__(self, "weights", _frozen(w))


@dataclass(frozen=True)
class Split:
    """Disjoint train / parameter-selection / validation index lists."""

    train_idx: np.ndarray
    select_idx: np.ndarray
    valid_idx: np.ndarray

    def __post_init__(self):
        parts = []
        for name in ("train_idx", "select_idx", "valid_idx"):
            idx = np.asarray(getattr(self, name), dtype=np.int64)
            if idx.size == 0:
                raise SplitInfeasibleError(f"{name} is empty")
            parts.append(idx)
            object.__setattr__(self, name, _frozen(idx))
        allidx = np.concatenate(parts)
        if len(np.unique(allidx)) != allidx.size:
            raise ValidationError("split parts are not disjoint")


_TARGET = "target"
_GROUPS = ("subject", "session")


def load_dataset(path, format: str = "csv") -> Dataset:
    """Read a dataset CSV (and its sidecar, if any) into memory.

    Feature order follows the column order of the ``f``-prefixed header
    names. Raises a distinct error for each malformation: missing target
    column, ragged rows, non-numeric cells, non-finite values.
    """
    if format != "csv":
        raise ValidationError(f"unknown dataset format {format!r}")
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path} is empty")
        rows = list(reader)
    if _TARGET not in header:
        raise MissingTargetColumnError(f"{path} lacks a '{_TARGET}' column")
    feat_cols = [i for i, name in enumerate(header) if name.startswith("f") and name[1:].isdigit()]
    if not feat_cols:
        raise ValidationError(f"{path} has no feature columns (f0..fN)")
    col_of = {name: i for i, name in enumerate(header)}
    if not rows:
        raise EmptyDatasetError(f"{path} has a header but no rows")

    width = len(header)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise RaggedRowsError(f"{path} row {r + 2}: {len(row)} cells, expected {width}")

    def parse(r: int, c: int, cell: str, as_int: bool = False):
        try:
            return int(cell) if as_int else float(cell)
        except ValueError:
            raise NonNumericCellError(
                f"{path} row {r + 2} column '{header[c]}': non-numeric cell {cell!r}"
            ) from None

    n = len(rows)
    X = np.empty((n, len(feat_cols)))
    y = np.empty(n)
    for r, row in enumerate(rows):
        for k, c in enumerate(feat_cols):
            X[r, k] = parse(r, c, row[c])
        y[r] = parse(r, col_of[_TARGET], row[col_of[_TARGET]])
    groups = {}
    for gname in _GROUPS:
        if gname in col_of:
            c = col_of[gname]
            groups[gname] = np.array(
                [parse(r, c, row[c], as_int=True) for r, row in enumerate(rows)], dtype=np.int64
            )

    feature_shape = None
    provenance = None
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        with open(sidecar, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("feature_shape") is not None:
            feature_shape = tuple(meta["feature_shape"])
        provenance = meta.get("generator")

    return Dataset(
        features=X,
        targets=y,
        subject=groups.get("subject"),
        session=groups.get("session"),
        feature_shape=feature_shape,
        provenance=provenance,
    )


def save_dataset(ds: Dataset, path) -> None:
    """Write CSV plus sidecar; load_dataset(save_dataset(ds)) == ds exactly."""
    if ds.n == 0:
        raise EmptyDatasetError("empty dataset")
    path = Path(path)
    header = [f"f{j}" for j in range(ds.p)] + [_TARGET]
    for gname in _GROUPS:
        if getattr(ds, gname) is not None:
            header.append(gname)
    lines = [",".join(header)]
    for r in range(ds.n):
        cells = [fmt_number(v) for v in ds.features[r]]
        cells.append(fmt_number(ds.targets[r]))
        for gname in _GROUPS:
            g = getattr(ds, gname)
            if g is not None:
                cells.append(str(int(g[r])))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    meta = {
        "feature_shape": list(ds.feature_shape) if ds.feature_shape else None,
        "generator": ds.provenance,
    }
    write_json(path.with_suffix(".json"), meta)


def stratified_split(
    ds: Dataset, fractions: Sequence[float] = (0.6, 0.2, 0.2), seed: int = 0
) -> Split:
    """Three-way split preserving per-target-level proportions.

    Without subject labels, samples of each target level are dealt greedily
    to the part with the largest running deficit (per-level counts stay
    within +-1 of the level's ideal share). With subject labels, whole
    subjects are dealt to parts by the same deficit rule on shuffled
    subject order, so no subject straddles parts.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise ValidationError(f"need 3 positive fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions {fractions} do not sum to 1")
    if ds.n < 5:
        raise ValidationError(f"need at least 5 samples to split, got {ds.n}")
    rng = rng_from(seed)
    parts: list[list[int]] = [[], [], []]

    if ds.subject is not None:
        subjects = np.unique(ds.subject)
        order = rng.permutation(len(subjects))
        assigned = 0
        counts = np.zeros(3)
        for s in subjects[order]:
            members = np.flatnonzero(ds.subject == s)
            assigned += members.size
            deficit = np.asarray(fractions) * assigned - counts
            part = int(np.argmax(deficit))
            parts[part].extend(members.tolist())
            counts[part] += members.size
        if any(len(p) == 0 for p in parts):
            raise SplitInfeasibleError(
                "too few subjects to populate every split part"
            )
    else:
        levels = np.unique(ds.targets)
        counts = np.zeros(3)
        assigned = 0
        for lv in levels:
            members = np.flatnonzero(ds.targets == lv)
            members = members[rng.permutation(members.size)]
            cap = np.ceil(members.size * np.asarray(fractions))
            taken = np.zeros(3)
            for idx in members:
                assigned += 1
                deficit = np.asarray(fractions) * assigned - counts
                deficit[taken >= cap] = -np.inf
                part = int(np.argmax(deficit))
                parts[part].append(int(idx))
                counts[part] += 1
                taken[part] += 1
        if any(len(p) == 0 for p in parts):
            raise SplitInfeasibleError("a target level is too thin to reach every part")

    return Split(*(np.sort(np.asarray(p, dtype=np.int64)) for p in parts))
