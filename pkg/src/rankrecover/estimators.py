"""Regularized estimation of the linear weight pattern.

Minimizes loss(w) + lambda * ||w||^2 for three losses:

* mse               ||y - Xw||^2                       (ridge regression)
* pairwise_hinge    sum_ij a_ij [1 - w.(x_i - x_j)]_+
* pairwise_logistic sum_ij a_ij log(1 + exp(-w.(x_i - x_j)))

Pairs arrive canonically oriented (target_i > target_j), so both pairwise
losses reward positive margins w.(x_i - x_j). Pairwise objectives touch
the targets only through the pair set: any strictly increasing relabeling
that preserves the pairs leaves the fit bit-identical.

All margins are computed through per-sample scores s = Xw, which keeps an
objective/gradient evaluation at O(n p + #pairs) instead of O(#pairs * p).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, EmptyPairSetError, ValidationError
from .optimize import minimize_lbfgs
from .pairs import PairSet

LOSSES = ("mse", "pairwise_hinge", "pairwise_logistic")
_HINGE_STAGNATION_WINDOW = 10


@dataclass(frozen=True)
class FitSpec:
    loss: str
    lam: float
    max_iter: int = 1000
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValidationError(f"unknown loss {self.loss!r}; expected one of {LOSSES}")
        if self.lam < 0:
            raise ValidationError("lambda must be >= 0")
        if self.tol <= 0:
            raise ValidationError("tol must be > 0")
        if self.max_iter <= 0:
            raise ValidationError("max_iter must be > 0")

    @property
    def pairwise(self) -> bool:
        return self.loss != "mse"


@dataclass(frozen=True)
class FitResult:
    weights: np.ndarray
    objective: float
    n_iter: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "weights": [float(v) for v in self.weights],
            "objective": float(self.objective),
            "n_iter": int(self.n_iter),
            "converged": bool(self.converged),
        }


def _check_w(X: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    w = np.asarray(w, dtype=float)
    if X.ndim != 2 or w.ndim != 1 or X.shape[1] != w.shape[0]:
        raise DimensionMismatchError(
            f"X {X.shape} incompatible with weight vector of length {w.shape}"
        )
    return X, w


_EXP_CAP = 60.0  # exp(-60) ~ 9e-27: below double resolution of the terms using it


def _margins(X: np.ndarray, ps: PairSet, w: np.ndarray) -> np.ndarray:
    s = X @ w
    return s[ps.i] - s[ps.j]


def _pair_terms(loss: str, m: np.ndarray, a: np.ndarray) -> tuple[float, np.ndarray]:
    """Loss term and per-pair coefficients c at margins m.

    The gradient of the loss term is -X^T q with q scattered from c over
    the pair indices. exp arguments are capped to dodge subnormals; the
    discarded mass is below 1 ulp of every consumer.
    """
    if loss == "pairwise_hinge":
        active = m < 1.0
        f = float(a @ (np.maximum(0.0, 1.0 - m)))
        return f, a * active
    # pairwise_logistic: softplus(-m) = max(-m, 0) + log1p(exp(-|m|))
    t = np.exp(-np.minimum(np.abs(m), _EXP_CAP))
    f = float(a @ (np.maximum(-m, 0.0) + np.log1p(t)))
    u = 1.0 / (1.0 + t)
    sig_neg = np.where(m >= 0, 1.0 - u, u)  # sigmoid(-m)
    return f, a * sig_neg


def objective(
    loss: str,
    X: np.ndarray,
    y: Optional[np.ndarray],
    ps: Optional[PairSet],
    w: np.ndarray,
    lam: float,
) -> float:
    """Penalized loss at w; ps is required for pairwise losses, y for mse."""
    X, w = _check_w(X, w)
    penalty = lam * float(w @ w)
    if loss == "mse":
        y = np.asarray(y, dtype=float)
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatchError("y length does not match X rows")
        r = X @ w - y
        return float(r @ r) + penalty
    if loss not in LOSSES:
        raise ValidationError(f"unknown loss {loss!r}")
    _require_pairs(ps, X.shape[0])
    f, _ = _pair_terms(loss, _margins(X, ps, w), ps.weights)
    return f + penalty


def gradient(
    loss: str,
    X: np.ndarray,
    y: Optional[np.ndarray],
    ps: Optional[PairSet],
    w: np.ndarray,
    lam: float,
) -> np.ndarray:
    """Exact (sub)gradient of `objective` at w."""
    X, w = _check_w(X, w)
    if loss == "mse":
        y = np.asarray(y, dtype=float)
        if y.shape[0] != X.shape[0]:
            raise DimensionMismatchError("y length does not match X rows")
        return 2.0 * (X.T @ (X @ w - y)) + 2.0 * lam * w
    if loss not in LOSSES:
        raise ValidationError(f"unknown loss {loss!r}")
    _require_pairs(ps, X.shape[0])
    _, c = _pair_terms(loss, _margins(X, ps, w), ps.weights)
    n = X.shape[0]
    q = np.bincount(ps.i, weights=c, minlength=n) - np.bincount(ps.j, weights=c, minlength=n)
    return -(X.T @ q) + 2.0 * lam * w


def _require_pairs(ps: Optional[PairSet], n: int) -> None:
    if ps is None or len(ps) == 0:
        raise EmptyPairSetError("pairwise loss needs a nonempty pair set")
    if int(ps.i.max()) >= n or int(ps.j.max()) >= n:
        raise DimensionMismatchError("pair indices exceed the number of rows")


def fit(
    X: np.ndarray,
    y: Optional[np.ndarray],
    ps: Optional[PairSet],
    spec: FitSpec,
    w0: Optional[np.ndarray] = None,
) -> FitResult:
    """Minimize the penalized loss from w = 0.

    Pairwise losses require lam > 0 (the unpenalized problem can be
    unbounded on separable data and is ill-conditioned regardless). The fit
    touches only rows referenced by some pair, so rows outside the pair set
    cannot perturb the solution, numerically or otherwise.

    w0 warm-starts the solver (used by cross-validation lambda paths);
    leave it None for the contractual zero initialization.
    """
    X = np.ascontiguousarray(np.asarray(X, dtype=float))
    n, p = X.shape
    if spec.pairwise:
        if spec.lam <= 0:
            raise ValidationError("pairwise losses require lambda > 0")
        _require_pairs(ps, n)
        used = np.unique(np.concatenate([ps.i, ps.j]))
        Xu = X[used]
        remap = np.empty(n, dtype=np.int64)
        remap[used] = np.arange(used.size)
        I = remap[ps.i]
        J = remap[ps.j]
        a = ps.weights

        def fg(w):
            s = Xu @ w
            m = s[I] - s[J]
            f, c = _pair_terms(spec.loss, m, a)
            f += spec.lam * float(w @ w)
            q = np.bincount(I, weights=c, minlength=used.size) - np.bincount(
                J, weights=c, minlength=used.size
            )
            g = -(Xu.T @ q) + 2.0 * spec.lam * w
            return f, g

        window = _HINGE_STAGNATION_WINDOW if spec.loss == "pairwise_hinge" else 0
    else:
        y = np.asarray(y, dtype=float)
        if y.shape[0] != n:
            raise DimensionMismatchError("y length does not match X rows")

        def fg(w):
            r = X @ w - y
            f = float(r @ r) + spec.lam * float(w @ w)
            g = 2.0 * (X.T @ r) + 2.0 * spec.lam * w
            return f, g

        window = 0

    start = np.zeros(p) if w0 is None else np.asarray(w0, dtype=float)
    if start.shape != (p,):
        raise DimensionMismatchError("w0 length does not match feature count")
    res = minimize_lbfgs(
        fg, start, tol=spec.tol, max_iter=spec.max_iter, stagnation_window=window
    )
    final = objective(spec.loss, X, y, ps, res.x, spec.lam)
    return FitResult(weights=res.x, objective=final, n_iter=res.n_iter, converged=res.converged)


def decision_values(X: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Linear scores Xw; downstream of any monotone link."""
    X, w = _check_w(X, w)
    return X @ w
