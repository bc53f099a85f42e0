"""Oriented, weighted sample pairs for ranking losses.

Every emitted pair (i, j) satisfies target[i] > target[j]; equal-target
pairs never appear, and zero-weight pairs are dropped rather than stored.
Three policies:

* all_unit        - every unequal-target pair, weight 1
* threshold       - drop pairs with |y_i - y_j| < threshold (strict),
                    guarding against label switching under noise
* adjacent_subject- keep only same-subject pairs with |y_i - y_j|
                    strictly above the adjacency gap (default 1)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MissingSubjectLabelsError, ValidationError


@dataclass(frozen=True)
class PairPolicy:
    kind: str = "all_unit"
    threshold: Optional[float] = None
    adjacency_gap: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("all_unit", "threshold", "adjacent_subject"):
            raise ValidationError(f"unknown pair policy {self.kind!r}")
        if (self.kind == "threshold") != (self.threshold is not None):
            raise ValidationError("threshold must be set iff kind == 'threshold'")
        if self.kind == "adjacent_subject" and self.adjacency_gap is None:
            object.__setattr__(self, "adjacency_gap", 1.0)
        if self.kind != "adjacent_subject" and self.adjacency_gap is not None:
            raise ValidationError("adjacency_gap only applies to 'adjacent_subject'")


@dataclass(frozen=True)
class PairSet:
    """Index pairs (i, j) with positive weights, oriented target[i] > target[j]."""

    i: np.ndarray
    j: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.int64)
        j = np.asarray(self.j, dtype=np.int64)
        w = np.asarray(self.weights, dtype=float)
        if not (i.shape == j.shape == w.shape) or i.ndim != 1:
            raise ValidationError("pair arrays must be 1-d and equally long")
        if np.any(w <= 0):
            raise ValidationError("zero/negative pair weights must be omitted, not stored")
        for name, arr in (("i", i), ("j", j), ("weights", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.i.size)

    def validate_orientation(self, targets: np.ndarray) -> None:
        targets = np.asarray(targets, dtype=float)
        if len(self) and not np.all(targets[self.i] > targets[self.j]):
            raise ValidationError("pair orientation violated: target[i] <= target[j]")


def build_pairs(
    targets: np.ndarray,
    subject: Optional[np.ndarray] = None,
    policy: PairPolicy = PairPolicy(),
) -> PairSet:
    """Materialize the policy's pair set (eager, O(n^2))."""
    y = np.asarray(targets, dtype=float)
    if y.ndim != 1:
        raise ValidationError("targets must be a vector")
    if not np.all(np.isfinite(y)):
        raise ValidationError("targets must be finite")
    if policy.kind == "adjacent_subject" and subject is None:
        raise MissingSubjectLabelsError(
            "adjacent_subject pair policy requires subject labels"
        )

    a, b = np.triu_indices(y.size, k=1)
    hi_first = y[a] > y[b]
    i = np.where(hi_first, a, b)
    j = np.where(hi_first, b, a)
    gap = y[i] - y[j]
    keep = gap > 0  # equal targets never pair
    if policy.kind == "threshold":
        keep &= ~(gap < policy.threshold)
    elif policy.kind == "adjacent_subject":
        subject = np.asarray(subject)
        keep &= (subject[i] == subject[j]) & (gap > policy.adjacency_gap)
    return PairSet(i=i[keep], j=j[keep], weights=np.ones(int(keep.sum())))


def pair_count(n_levels: int, per_level: int, policy: PairPolicy) -> int:
    """Pairs build_pairs yields on a balanced single-subject design with
    integer levels 1..n_levels, per_level samples each."""
    if n_levels <= 0 or per_level <= 0:
        raise ValidationError("counts must be positive")
    total = 0
    for gap in range(1, n_levels):
        if policy.kind == "threshold" and gap < policy.threshold:
            continue
        if policy.kind == "adjacent_subject" and not gap > policy.adjacency_gap:
            continue
        total += (n_levels - gap) * per_level * per_level
    return total


def dump_pairs_csv(path, ps: PairSet, targets: np.ndarray) -> None:
    """Audit dump: i, j, weight, y_i, y_j per pair."""
    from .util import write_csv

    y = np.asarray(targets, dtype=float)
    rows = [
        (int(ps.i[k]), int(ps.j[k]), ps.weights[k], y[ps.i[k]], y[ps.j[k]])
        for k in range(len(ps))
    ]
    write_csv(path, ("i", "j", "weight", "y_i", "y_j"), rows)
