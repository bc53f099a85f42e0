"""Recovery metrics, cross-validation, and the benchmark harnesses.

The two experiment drivers reproduce the simulation protocols: repeat the
generator with per-repetition seeds, pick lambda by cross-validation for
every (estimator, sample size), fit, and record the correlation between
the fitted and true weight patterns. Correlation against ground truth is
reporting-only; model selection uses observable scores (inversion for
pairwise losses, squared error for mse).

Repetitions are independent work items keyed by derived seeds, so the
harness may fan them out over processes; outputs are aggregated in input
order and are bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .dataset import GroundTruth
from .errors import (
    DataContractError,
    DimensionMismatchError,
    EmptyPairSetError,
    ValidationError,
    ZeroVectorError,
)
from .estimators import FitSpec, decision_values, fit
from .pairs import PairPolicy, build_pairs
from .simulate import SimConfig, _generate_recovery
from .util import derive_seed, rng_from

METRICS = ("rho_vs_truth", "inversion", "mse")
_HIGHER_IS_BETTER = {"rho_vs_truth": True, "inversion": False, "mse": False}

# cross-validation inside the experiment harnesses only ranks lambdas, so
# those fits run on a reduced budget; final fits use the caller's spec.
_CV_TOL = 1e-5
_CV_MAX_ITER = 200


@dataclass(frozen=True)
class RecoveryCurve:
    estimator: str
    sample_sizes: tuple[int, ...]
    mean_rho: tuple[float, ...]
    std_rho: tuple[float, ...]
    n_repetitions: int

    def __post_init__(self):
        if not (len(self.sample_sizes) == len(self.mean_rho) == len(self.std_rho)):
            raise ValidationError("curve lists must share length")
        if any(s < 0 for s in self.std_rho):
            raise ValidationError("std values must be >= 0")


@dataclass(frozen=True)
class CVResult:
    lambda_grid: tuple[float, ...]
    score_per_lambda: tuple[float, ...]
    best_lambda: float


def correlation(w: np.ndarray, w_hat: np.ndarray) -> float:
    """cos(w, w_hat) = <w, w_hat> / (||w|| ||w_hat||), in [-1, 1]."""
    w = np.asarray(w, dtype=float)
    w_hat = np.asarray(w_hat, dtype=float)
    if w.shape != w_hat.shape or w.ndim != 1:
        raise DimensionMismatchError("weight vectors must share length")
    nw = float(np.linalg.norm(w))
    nh = float(np.linalg.norm(w_hat))
    if nw == 0.0 or nh == 0.0:
        raise ZeroVectorError("correlation undefined for a zero vector")
    return float(np.clip(w @ w_hat / (nw * nh), -1.0, 1.0))


def inversion_score(
    X_val: np.ndarray,
    y_val: np.ndarray,
    w_hat: np.ndarray,
    policy: PairPolicy = PairPolicy(),
    subject: Optional[np.ndarray] = None,
) -> float:
    """Weighted fraction of policy pairs whose predicted order contradicts
    the label order; score ties count as inversions. 0 is perfect, 0.5 is
    chance."""
    ps = build_pairs(y_val, subject, policy)
    if len(ps) == 0:
        raise EmptyPairSetError("no validation pairs under this policy")
    s = decision_values(X_val, w_hat)
    inverted = (s[ps.i] - s[ps.j]) <= 0.0
    return float(ps.weights @ inverted / ps.weights.sum())


def _metric_score(
    metric: str,
    X_val: np.ndarray,
    y_val: np.ndarray,
    w_hat: np.ndarray,
    policy: PairPolicy,
    subject: Optional[np.ndarray],
    truth: Optional[GroundTruth],
) -> float:
    if metric == "inversion":
        return inversion_score(X_val, y_val, w_hat, policy, subject)
    if metric == "mse":
        r = X_val @ w_hat - y_val
        return float(r @ r) / len(y_val)
    if metric == "rho_vs_truth":
        if truth is None:
            raise ValidationError("rho_vs_truth needs the ground truth")
        return correlation(truth.weights, w_hat)
    raise ValidationError(f"unknown metric {metric!r}")


def make_folds(
    n: int, k: int, seed: int, subject: Optional[np.ndarray] = None
) -> list[np.ndarray]:
    """k validation-index folds; whole subjects stay in one fold."""
    if k < 2:
        raise ValidationError("need k >= 2 folds")
    rng = rng_from(seed, 3)
    if subject is None:
        perm = rng.permutation(n)
        return [np.sort(chunk) for chunk in np.array_split(perm, k)]
    subjects = np.unique(subject)
    if subjects.size < k:
        raise DataContractError(f"{subjects.size} subjects cannot fill {k} folds")
    order = rng.permutation(subjects.size)
    folds = [[] for _ in range(k)]
    for pos, s in enumerate(subjects[order]):
        folds[pos % k].extend(np.flatnonzero(subject == s).tolist())
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def _pick_best(grid: Sequence[float], scores: Sequence[float], higher: bool) -> float:
    best = None
    for lam, score in zip(grid, scores):
        if best is None:
            best = (score, lam)
            continue
        better = score > best[0] if higher else score < best[0]
        if better or (score == best[0] and lam > best[1]):
            best = (score, lam)
    return best[1]


def cross_validate(
    X: np.ndarray,
    y: np.ndarray,
    policy: PairPolicy,
    spec_template: FitSpec,
    lambda_grid: Sequence[float],
    k: int = 5,
    metric: str = "inversion",
    subject: Optional[np.ndarray] = None,
    truth: Optional[GroundTruth] = None,
) -> CVResult:
    """Mean k-fold score per lambda; ties break toward the larger lambda.

    Fold assignment is seeded by spec_template.seed, so equal inputs give
    equal folds and scores. For pairwise losses, train pairs are built per
    fold under `policy`; a fold whose train or validation part yields no
    pairs is a data-contract error.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if metric not in METRICS:
        raise ValidationError(f"unknown metric {metric!r}")
    grid = [float(l) for l in lambda_grid]
    if not grid:
        raise ValidationError("empty lambda grid")
    folds = make_folds(len(y), k, spec_template.seed, subject)
    # duplicate grid entries share one fit; the path is solved once per
    # fold from the largest lambda down, warm-starting each step
    path = sorted(set(grid), reverse=True)
    scores = np.zeros((len(path), k))
    for f, val_idx in enumerate(folds):
        mask = np.ones(len(y), dtype=bool)
        mask[val_idx] = False
        tr_idx = np.flatnonzero(mask)
        if tr_idx.size == 0 or val_idx.size == 0:
            raise DataContractError("degenerate fold")
        X_tr, y_tr = X[tr_idx], y[tr_idx]
        X_va, y_va = X[val_idx], y[val_idx]
        subj_tr = subject[tr_idx] if subject is not None else None
        subj_va = subject[val_idx] if subject is not None else None
        ps_tr = None
        if spec_template.pairwise:
            ps_tr = build_pairs(y_tr, subj_tr, policy)
            if len(ps_tr) == 0:
                raise EmptyPairSetError(f"fold {f}: no training pairs under policy")
        w_start = None
        for li, lam in enumerate(path):
            res = fit(X_tr, y_tr, ps_tr, replace(spec_template, lam=lam), w0=w_start)
            w_start = res.weights
            scores[li, f] = _metric_score(
                metric, X_va, y_va, res.weights, policy, subj_va, truth
            )
    path_mean = dict(zip(path, scores.mean(axis=1)))
    mean_scores = np.asarray([path_mean[lam] for lam in grid])
    best = _pick_best(grid, mean_scores.tolist(), _HIGHER_IS_BETTER[metric])
    return CVResult(
        lambda_grid=tuple(grid),
        score_per_lambda=tuple(float(s) for s in mean_scores),
        best_lambda=float(best),
    )


@dataclass(frozen=True)
class EstimatorVariant:
    """One curve of a benchmark: a loss spec plus its pair policy.

    policy None means no pairs (mse); calibrated_threshold swaps in a
    threshold policy set to the realized noise width of each repetition.
    """

    name: str
    spec: FitSpec
    policy: Optional[PairPolicy] = None
    calibrated_threshold: bool = False


def _default_variants(estimators: Sequence[FitSpec]) -> list[EstimatorVariant]:
    variants = []
    for spec in estimators:
        policy = PairPolicy() if spec.pairwise else None
        variants.append(EstimatorVariant(name=spec.loss, spec=spec, policy=policy))
    return variants


def _cv_metric_for(spec: FitSpec) -> str:
    return "inversion" if spec.pairwise else "mse"


def _run_repetition(args) -> list[list[float]]:
    """One repetition of a benchmark: rho per (variant, sample size)."""
    cfg, variants, sizes, lambda_grid, cv_folds, rep = args
    cfg_rep = replace(cfg, seed=derive_seed(cfg.seed, rep), n_samples=max(sizes))
    ds, truth, noise_scale = _generate_recovery(cfg_rep)
    out = [[np.nan] * len(sizes) for _ in variants]
    for si, n_sub in enumerate(sizes):
        X = ds.features[:n_sub]
        y = ds.targets[:n_sub]
        cv_seed = derive_seed(cfg.seed, rep, si)
        for vi, variant in enumerate(variants):
            policy = variant.policy
            if variant.calibrated_threshold:
                policy = PairPolicy(kind="threshold", threshold=noise_scale)
            if variant.spec.pairwise:
                # ranking quality stabilizes long before full convergence,
                # so lambda selection runs on a reduced budget
                cv_spec = replace(
                    variant.spec,
                    seed=cv_seed,
                    tol=max(variant.spec.tol, _CV_TOL),
                    max_iter=min(variant.spec.max_iter, _CV_MAX_ITER),
                )
            else:
                # mse fits are cheap and their prediction score is budget-
                # sensitive (early stopping mimics ridge); select at the
                # same budget the final fit will use
                cv_spec = replace(variant.spec, seed=cv_seed)
            cv = cross_validate(
                X, y,
                policy if policy is not None else PairPolicy(),
                cv_spec,
                lambda_grid,
                k=cv_folds,
                metric=_cv_metric_for(variant.spec),
            )
            ps = build_pairs(y, None, policy) if variant.spec.pairwise else None
            res = fit(X, y, ps, replace(variant.spec, lam=cv.best_lambda))
            out[vi][si] = correlation(truth.weights, res.weights)
    return out


def _run_variants(
    cfg: SimConfig,
    variants: Sequence[EstimatorVariant],
    sample_sizes: Sequence[int],
    n_reps: int,
    lambda_grid: Sequence[float],
    cv_folds: int,
    jobs: int,
) -> list[RecoveryCurve]:
    sizes = [int(n) for n in sample_sizes]
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValidationError("sample_sizes must be strictly increasing")
    if n_reps < 1:
        raise ValidationError("n_reps must be >= 1")
    work = [
        (cfg, tuple(variants), tuple(sizes), tuple(float(l) for l in lambda_grid),
         cv_folds, rep)
        for rep in range(n_reps)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_repetition, work))
    else:
        results = [_run_repetition(item) for item in work]
    rho = np.asarray(results)  # (reps, variants, sizes)
    curves = []
    for vi, variant in enumerate(variants):
        block = rho[:, vi, :]
        std = block.std(axis=0, ddof=1) if n_reps > 1 else np.zeros(len(sizes))
        curves.append(
            RecoveryCurve(
                estimator=variant.name,
                sample_sizes=tuple(sizes),
                mean_rho=tuple(float(v) for v in block.mean(axis=0)),
                std_rho=tuple(float(v) for v in std),
                n_repetitions=n_reps,
            )
        )
    return curves


def recovery_experiment(
    cfg: SimConfig,
    estimators: Sequence[FitSpec],
    sample_sizes: Sequence[int],
    n_reps: int = 10,
    lambda_grid: Sequence[float] = tuple(np.logspace(-4, 4, 9)),
    cv_folds: int = 5,
    jobs: int = 1,
) -> list[RecoveryCurve]:
    """Recovery-vs-sample-size curves, one per estimator, unit pair weights."""
    return _run_variants(
        cfg, _default_variants(estimators), sample_sizes, n_reps, lambda_grid, cv_folds, jobs
    )


def noise_robustness_experiment(
    cfg: SimConfig,
    sample_sizes: Sequence[int],
    n_reps: int = 10,
    lambda_grid: Sequence[float] = tuple(np.logspace(-4, 4, 9)),
    cv_folds: int = 5,
    jobs: int = 1,
    spec_template: FitSpec = FitSpec(loss="pairwise_logistic", lam=1.0),
) -> list[RecoveryCurve]:
    """Weighted vs unweighted pairwise logistic vs mse on the noisy linear
    target; the weighted variant zeroes pairs closer than the realized
    noise width of each repetition."""
    if cfg.warp != "identity":
        raise ValidationError("noise robustness uses the linear (unwarped) target")
    if cfg.snr <= 0:
        raise ValidationError("noise robustness needs snr > 0")
    logistic = replace(spec_template, loss="pairwise_logistic")
    variants = [
        EstimatorVariant(name="mse", spec=replace(spec_template, loss="mse")),
        EstimatorVariant(
            name="pairwise_logistic_unweighted", spec=logistic, policy=PairPolicy()
        ),
        EstimatorVariant(
            name="pairwise_logistic_weighted", spec=logistic, calibrated_threshold=True
        ),
    ]
    return _run_variants(cfg, variants, sample_sizes, n_reps, lambda_grid, cv_folds, jobs)


def curves_to_rows(curves: Sequence[RecoveryCurve]) -> list[tuple]:
    """Flatten curves to (estimator, n, mean_rho, std_rho) rows."""
    rows = []
    for curve in curves:
        for n, m, s in zip(curve.sample_sizes, curve.mean_rho, curve.std_rho):
            rows.append((curve.estimator, n, m, s))
    return rows
