"""Shared plumbing: seeded RNG streams and reproducible file emission.

All randomness in the package flows through `rng_from`, which builds a
Philox (counter-based) generator from an integer seed plus an optional
stream key. Equal (seed, key) pairs reproduce bit-identical draws on any
platform, and disjoint keys give independent streams, so parallel workers
can own their own generators without coordination.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np


def rng_from(seed: int, *key: int) -> np.random.Generator:
    """Deterministic Philox generator for (seed, key...) stream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, key...) into a single integer sub-seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def fmt_number(x) -> str:
    """Shortest decimal string that round-trips the value exactly."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows with canonical number formatting and '\\n' newlines.

    Byte-reproducible for equal inputs; no locale, no trailing spaces.
    """
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_number(v) if not isinstance(v, str) else v for v in row))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    """Write JSON with fixed key order (insertion order) and '\\n' at EOF."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")


def as_float_array(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    return arr


def jsonable(obj):
    """Recursively convert numpy scalars/arrays for json.dump."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj
