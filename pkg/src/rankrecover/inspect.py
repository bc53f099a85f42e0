"""Characterize the link between linear scores and targets.

Project samples onto a fitted weight vector, smooth the (score, target)
scatter with classical LOWESS (tricube-weighted local linear fits, optional
bisquare robustifying passes), and test whether a quadratic polynomial
explains the scatter significantly better than a line.

The F upper tail is evaluated through an in-repo regularized incomplete
beta function (continued fraction, 1e-12 tolerance) so the package carries
no statistics dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    RankDeficientDesignError,
    ValidationError,
    ZeroBandwidthError,
)
from .estimators import decision_values


@dataclass(frozen=True)
class ProjectionProfile:
    scores: np.ndarray    # Xw sorted ascending
    targets: np.ndarray   # co-sorted with scores
    smooth: np.ndarray    # LOWESS fit at each score

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        if np.any(np.diff(s) < 0):
            raise ValidationError("scores must be sorted ascending")
        if not (len(self.scores) == len(self.targets) == len(self.smooth)):
            raise ValidationError("profile vectors must share length")


@dataclass(frozen=True)
class FTestReport:
    rss_linear: float
    rss_quadratic: float
    f_stat: float
    p_value: float
    df: tuple[int, int]
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "rss_linear": self.rss_linear,
            "rss_quadratic": self.rss_quadratic,
            "f_stat": self.f_stat,
            "p_value": self.p_value,
            "df": list(self.df),
            "degenerate": self.degenerate,
        }


def lowess(x: np.ndarray, y: np.ndarray, frac: float = 2.0 / 3.0, iters: int = 3) -> np.ndarray:
    """Fitted values of locally weighted linear regression at each x.

    Window: the ceil(frac*n) nearest neighbors of each point, tricube
    weights on distance scaled by the window radius. iters > 1 adds
    robustifying passes that downweight large residuals with the bisquare
    function. Ties in x are zero-distance neighbors and share weight 1.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DimensionMismatchError("x and y must be equal-length vectors")
    n = x.size
    if n < 3:
        raise ValidationError("lowess needs at least 3 points")
    if not np.all(np.isfinite(x)):
        raise ValidationError("x must be finite")
    if not 0.0 < frac <= 1.0:
        raise ValidationError("frac must lie in (0, 1]")
    if iters < 1:
        raise ValidationError("iters must be >= 1")
    if np.ptp(x) == 0.0:
        raise ZeroBandwidthError("zero bandwidth: all x values identical")

    window = min(n, int(math.ceil(frac * n)))
    dist = np.abs(x[:, None] - x[None, :])
    # radius = distance to the window-th nearest neighbor (self included)
    radius = np.sort(dist, axis=1)[:, window - 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(radius[:, None] > 0, dist / radius[:, None], np.where(dist > 0, np.inf, 0.0))
    u = np.clip(u, 0.0, 1.0)
    tricube = (1.0 - u**3) ** 3
    tricube[u >= 1.0] = 0.0
    # keep the zero-distance column alive even when the radius collapses
    tricube[dist == 0.0] = 1.0

    robust = np.ones(n)
    fitted = np.empty(n)
    for pass_no in range(iters):
        for k in range(n):
            wk = tricube[k] * robust
            sw = wk.sum()
            swx = wk @ x
            swy = wk @ y
            swxx = wk @ (x * x)
            swxy = wk @ (x * y)
            denom = sw * swxx - swx * swx
            if denom <= 1e-12 * max(sw * swxx, 1e-300):
                fitted[k] = swy / sw  # x-degenerate window: weighted mean
            else:
                slope = (sw * swxy - swx * swy) / denom
                intercept = (swy - slope * swx) / sw
                fitted[k] = intercept + slope * x[k]
        if pass_no == iters - 1:
            break
        resid = y - fitted
        scale = np.median(np.abs(resid))
        if scale <= 0:
            break
        robust = np.clip(resid / (6.0 * scale), -1.0, 1.0)
        robust = (1.0 - robust**2) ** 2
    return fitted


def project_profile(
    X: np.ndarray,
    y: np.ndarray,
    w_hat: np.ndarray,
    frac: float = 2.0 / 3.0,
    iters: int = 3,
) -> ProjectionProfile:
    """Sort samples by score Xw and smooth the target scatter along it."""
    scores = decision_values(X, w_hat)
    y = np.asarray(y, dtype=float)
    if y.shape[0] != scores.shape[0]:
        raise DimensionMismatchError("y length does not match X rows")
    order = np.argsort(scores, kind="stable")
    s_sorted = scores[order]
    y_sorted = y[order]
    smooth = lowess(s_sorted, y_sorted, frac=frac, iters=iters)
    return ProjectionProfile(scores=s_sorted, targets=y_sorted, smooth=smooth)


def regularized_incomplete_beta(a: float, b: float, x: float, tol: float = 1e-12) -> float:
    """I_x(a, b) by the symmetric continued fraction (modified Lentz)."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0, 1], got {x}")
    if a <= 0 or b <= 0:
        raise ValidationError("a and b must be positive")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(ln_front) * _beta_cf(a, b, x, tol) / a
    return 1.0 - math.exp(ln_front) * _beta_cf(b, a, 1.0 - x, tol) / b


def _beta_cf(a: float, b: float, x: float, tol: float, max_iter: int = 500) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        # even step
        num = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        # odd step
        num = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + num * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + num / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ValidationError("incomplete beta continued fraction did not converge")


def f_upper_tail(f_stat: float, df_num: int, df_den: int) -> float:
    """P(F(df_num, df_den) > f_stat)."""
    if f_stat <= 0:
        return 1.0
    x = df_den / (df_den + df_num * f_stat)
    return regularized_incomplete_beta(df_den / 2.0, df_num / 2.0, x)


def _polyfit_rss(x: np.ndarray, y: np.ndarray, degree: int) -> float:
    # center/scale x for conditioning; RSS is invariant to that reparam
    xs = (x - x.mean()) / max(np.ptp(x), 1.0)
    design = np.vander(xs, degree + 1, increasing=True)
    coef, residuals, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < degree + 1:
        raise RankDeficientDesignError(f"degree-{degree} design is rank deficient")
    r = y - design @ coef
    return float(r @ r)


def f_test_quadratic(x: np.ndarray, y: np.ndarray) -> FTestReport:
    """Nested F-test: does a quadratic beat a straight line on (x, y)?

    F = (RSS1 - RSS2) / (RSS2 / (n - 3)), p = upper tail of F(1, n-3).
    A perfect linear fit reports F = 0, p = 1; a perfect quadratic over an
    imperfect line reports p = 0 with the degenerate flag set.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionMismatchError("x and y must be equal-length vectors")
    n = x.size
    if np.unique(x).size < 4:
        raise ValidationError("need at least 4 distinct x values")
    rss1 = _polyfit_rss(x, y, 1)
    rss2 = _polyfit_rss(x, y, 2)
    rss2 = min(rss2, rss1)  # nesting can only help; clip fp noise
    df = (1, n - 3)
    y_centered = y - y.mean()
    scale = max(float(y_centered @ y_centered), 1e-300)
    if rss1 <= 1e-14 * scale:
        # the line is already an exact fit; no quadratic gain possible
        return FTestReport(rss1, rss2, 0.0, 1.0, df)
    if rss2 <= 1e-14 * scale:
        return FTestReport(rss1, rss2, math.inf, 0.0, df, degenerate=True)
    f_stat = (rss1 - rss2) / (rss2 / (n - 3))
    return FTestReport(rss1, rss2, float(f_stat), f_upper_tail(f_stat, *df), df)
