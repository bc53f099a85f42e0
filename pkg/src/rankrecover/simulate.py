"""Synthetic volumetric benchmarks with known ground-truth patterns.

Two generators:

* a recovery benchmark: rows of Gaussian white noise over a 3-d grid,
  smoothed separably with a truncated Gaussian kernel, a blocky +-1 weight
  pattern on four cubic regions, and targets that are a (possibly
  sigmoid-warped) linear score plus uniform noise calibrated to an exact
  signal-to-noise ratio;

* a parametric-design set standing in for ordered-stimulus studies:
  integer complexity levels 1..L, per-subject repeats, and region
  responses that follow a chosen monotone shape of the level.

All draws go through Philox streams keyed on the config seed, so equal
configs reproduce bit-identical datasets.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .dataset import Dataset, GroundTruth
from .errors import (
    DegenerateGroundTruthError,
    NoiseCalibrationError,
    RoiLayoutError,
    ValidationError,
)
from .util import rng_from

Dims = tuple[int, int, int]


@dataclass(frozen=True)
class SimConfig:
    """Recovery-benchmark knobs: 2-voxel smoothing, four 2x2x2 regions
    valued {1, 1, -1, -1}, 5% uniform label noise."""

    grid: Dims = (5, 5, 5)
    smooth_sigma: float = 2.0
    roi_size: Dims = (2, 2, 2)
    roi_values: tuple[float, ...] = (1.0, 1.0, -1.0, -1.0)
    n_samples: int = 100
    snr: float = 0.05
    warp: str = "identity"
    seed: int = 0

    def __post_init__(self):
        if len(self.grid) != 3 or any(d <= 0 for d in self.grid):
            raise ValidationError(f"grid must be 3 positive dims, got {self.grid}")
        if self.smooth_sigma < 0:
            raise ValidationError("smooth_sigma must be >= 0")
        if any(r > g for r, g in zip(self.roi_size, self.grid)):
            raise ValidationError(f"roi_size {self.roi_size} exceeds grid {self.grid}")
        if self.n_samples <= 0:
            raise ValidationError("n_samples must be positive")
        if not 0.0 <= self.snr <= 1.0:
            raise ValidationError(f"snr must lie in [0, 1], got {self.snr}")
        if self.warp not in ("identity", "sigmoid"):
            raise ValidationError(f"unknown warp {self.warp!r}")
        # placement is validated eagerly so a bad config fails at build time
        make_ground_truth(self.grid, self.roi_size, self.roi_values,
                          default_roi_origins(self.grid, self.roi_size, len(self.roi_values)))


@dataclass(frozen=True)
class ParamDesignConfig:
    """Ordered-stimulus stand-in: region responses embedded as 2x2x2 blocks
    of a 5x5x5 grid, one monotone shape per region."""

    n_subjects: int = 10
    levels: int = 5
    samples_per_level_per_subject: int = 4
    region_response: tuple[str, ...] = ("linear", "sigmoid", "saturating_log", "saturating_log")
    noise_sigma: float = 1.0
    seed: int = 0
    grid: Dims = (5, 5, 5)
    roi_size: Dims = (2, 2, 2)

    def __post_init__(self):
        if self.levels < 2:
            raise ValidationError("need at least 2 levels")
        if min(self.n_subjects, self.samples_per_level_per_subject) <= 0:
            raise ValidationError("all counts must be positive")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be >= 0")
        unknown = set(self.region_response) - set(_RESPONSES)
        if unknown:
            raise ValidationError(f"unknown region response(s) {sorted(unknown)}")


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Unit-sum Gaussian taps truncated at 4*sigma (identity for sigma=0)."""
    if sigma < 0:
        raise ValidationError("sigma must be >= 0")
    if sigma == 0:
        return np.ones(1)
    radius = int(round(4.0 * sigma))
    if radius == 0:
        return np.ones(1)
    t = np.arange(-radius, radius + 1, dtype=float)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def smooth_volumes(rows: np.ndarray, grid: Dims, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing of flattened volumes (n, prod(grid)).

    Boundaries use edge-repeating reflection, which together with the
    unit-sum kernel makes the smoothing operator doubly stochastic: every
    volume keeps its mean to machine precision.
    """
    rows = np.asarray(rows, dtype=float)
    n, p = rows.shape
    if p != math.prod(grid):
        raise ValidationError(f"rows have {p} columns, grid {grid} needs {math.prod(grid)}")
    k = gaussian_kernel(sigma)
    radius = (len(k) - 1) // 2
    if radius == 0:
        return rows.copy()
    vol = rows.reshape((n,) + tuple(grid))
    for axis in (1, 2, 3):
        pad = [(0, 0)] * 4
        pad[axis] = (radius, radius)
        padded = np.pad(vol, pad, mode="symmetric")
        acc = np.zeros_like(vol)
        span = vol.shape[axis]
        index = [slice(None)] * 4
        for t in range(len(k)):
            index[axis] = slice(t, t + span)
            acc += k[t] * padded[tuple(index)]
        vol = acc
    return vol.reshape(n, p)


def gen_smooth_noise_volumes(n: int, grid: Dims, sigma: float, seed: int) -> np.ndarray:
    """n rows of white noise over grid, smoothed; deterministic in seed."""
    if n <= 0:
        raise ValidationError("n must be positive")
    rng = rng_from(seed, 0)
    raw = rng.standard_normal((n, math.prod(grid)))
    return smooth_volumes(raw, grid, sigma)


def default_roi_origins(grid: Dims, roi_size: Dims, count: int = 4) -> list[Dims]:
    """Up to four maximally separated corner origins."""
    gx, gy, gz = grid
    sx, sy, sz = roi_size
    corners = [
        (0, 0, 0),
        (0, gy - sy, gz - sz),
        (gx - sx, 0, gz - sz),
        (gx - sx, gy - sy, 0),
    ]
    if count > len(corners):
        raise ValidationError(
            f"no default placement for {count} ROIs; pass roi_origins explicitly"
        )
    return corners[:count]


def make_ground_truth(
    grid: Dims,
    roi_size: Dims,
    roi_values: Sequence[float],
    roi_origins: Sequence[Dims],
) -> GroundTruth:
    """Blocky weight pattern: each ROI cube filled with its value."""
    if len(roi_values) != len(roi_origins):
        raise ValidationError("roi_values and roi_origins lengths differ")
    w = np.zeros(tuple(grid))
    occupied = np.zeros(tuple(grid), dtype=bool)
    for value, origin in zip(roi_values, roi_origins):
        block = tuple(slice(o, o + s) for o, s in zip(origin, roi_size))
        if any(o < 0 or o + s > g for o, s, g in zip(origin, roi_size, grid)):
            raise RoiLayoutError(f"ROI at {tuple(origin)} exceeds grid {tuple(grid)}")
        if occupied[block].any():
            raise RoiLayoutError(f"ROI at {tuple(origin)} overlaps another ROI")
        occupied[block] = True
        w[block] = value
    flat = w.ravel()
    if not np.any(flat):
        raise DegenerateGroundTruthError("degenerate ground truth: empty support")
    return GroundTruth(weights=flat)


def _linear_target_with_scale(
    X: np.ndarray, truth: GroundTruth, snr: float, seed: int
) -> tuple[np.ndarray, float]:
    """Targets plus the realized uniform-noise width sigma (eps in
    [-sigma/2, sigma/2]); the width is what the close-pair threshold uses."""
    X = np.asarray(X, dtype=float)
    w = truth.weights
    if X.shape[1] != w.shape[0]:
        raise ValidationError(f"X has {X.shape[1]} columns, weights {w.shape[0]}")
    if snr < 0:
        raise ValidationError("snr must be >= 0")
    signal = X @ w
    if snr == 0:
        return signal, 0.0
    norm_signal = float(np.linalg.norm(signal))
    if norm_signal == 0.0:
        raise NoiseCalibrationError("signal Xw is zero, cannot calibrate noise")
    rng = rng_from(seed, 1)
    unit = rng.uniform(-0.5, 0.5, size=X.shape[0])
    scale = snr * norm_signal / float(np.linalg.norm(unit))
    return signal + scale * unit, scale


def linear_target(X: np.ndarray, truth: GroundTruth, snr: float, seed: int) -> np.ndarray:
    """y = Xw + eps with eps ~ uniform, rescaled so ||eps||/||Xw|| == snr
    exactly (snr = 0 is the noiseless limit y = Xw)."""
    y, _ = _linear_target_with_scale(X, truth, snr, seed)
    return y


def sigmoid_warp(y: np.ndarray) -> np.ndarray:
    """Elementwise 1/(1+exp(-y)), overflow-free, strictly increasing."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValidationError("sigmoid_warp requires finite input")
    out = np.empty_like(y)
    pos = y >= 0
    t = np.exp(-np.abs(y))
    out[pos] = 1.0 / (1.0 + t[pos])
    out[~pos] = t[~pos] / (1.0 + t[~pos])
    return out


def _generate_recovery(cfg: SimConfig) -> tuple[Dataset, GroundTruth, float]:
    origins = default_roi_origins(cfg.grid, cfg.roi_size, len(cfg.roi_values))
    truth = make_ground_truth(cfg.grid, cfg.roi_size, cfg.roi_values, origins)
    X = gen_smooth_noise_volumes(cfg.n_samples, cfg.grid, cfg.smooth_sigma, cfg.seed)
    y, noise_scale = _linear_target_with_scale(X, truth, cfg.snr, cfg.seed)
    if cfg.warp == "sigmoid":
        y = sigmoid_warp(y)
    provenance = {
        "kind": "recovery",
        "config": asdict(cfg),
        "roi_origins": [list(o) for o in origins],
        "noise_scale": noise_scale,
        "ground_truth": truth.weights.tolist(),
    }
    ds = Dataset(features=X, targets=y, feature_shape=cfg.grid, provenance=provenance)
    return ds, truth, noise_scale


def gen_recovery_dataset(cfg: SimConfig) -> tuple[Dataset, GroundTruth]:
    """Volumetric benchmark; ground truth rides along for evaluation and is
    recorded in the dataset provenance (hence the sidecar on save)."""
    ds, truth, _ = _generate_recovery(cfg)
    return ds, truth


def calibrated_noise_scale(cfg: SimConfig) -> float:
    """Realized uniform-noise width for cfg (threshold policies use this)."""
    _, _, scale = _generate_recovery(cfg)
    return scale


_RESPONSES = {
    "linear": lambda t: t,
    "sigmoid": lambda t: 1.0 / (1.0 + np.exp(-8.0 * (t - 0.5))),
    "saturating_log": lambda t: np.log1p(4.0 * t) / math.log(5.0),
}


def response_curve(shape: str, levels: int) -> np.ndarray:
    """Mean region response at levels 1..L, normalized level in [0, 1]."""
    t = (np.arange(1, levels + 1) - 1.0) / (levels - 1.0)
    return _RESPONSES[shape](t)


def gen_param_design(cfg: ParamDesignConfig) -> Dataset:
    """Ordered-level dataset with per-subject repeats.

    Rows are ordered (subject, level, repeat); features are Gaussian noise
    of sd noise_sigma everywhere, plus the region's response value added
    uniformly over its block. Targets are the integer levels.
    """
    origins = default_roi_origins(cfg.grid, cfg.roi_size, len(cfg.region_response))
    p = math.prod(cfg.grid)
    n = cfg.n_subjects * cfg.levels * cfg.samples_per_level_per_subject
    rng = rng_from(cfg.seed, 2)
    X = cfg.noise_sigma * rng.standard_normal((n, p))
    targets = np.empty(n)
    subject = np.empty(n, dtype=np.int64)

    region_idx = []
    for origin in origins:
        block = np.zeros(tuple(cfg.grid), dtype=bool)
        block[tuple(slice(o, o + s) for o, s in zip(origin, cfg.roi_size))] = True
        region_idx.append(np.flatnonzero(block.ravel()))
    curves = [response_curve(shape, cfg.levels) for shape in cfg.region_response]

    row = 0
    for s in range(cfg.n_subjects):
        for level in range(1, cfg.levels + 1):
            for _ in range(cfg.samples_per_level_per_subject):
                for idx, curve in zip(region_idx, curves):
                    X[row, idx] += curve[level - 1]
                targets[row] = level
                subject[row] = s + 1
                row += 1

    provenance = {
        "kind": "param_design",
        "config": asdict(cfg),
        "roi_origins": [list(o) for o in origins],
        "region_response": list(cfg.region_response),
    }
    return Dataset(
        features=X,
        targets=targets,
        subject=subject,
        feature_shape=cfg.grid,
        provenance=provenance,
    )
