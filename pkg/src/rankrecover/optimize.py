"""Deterministic limited-memory quasi-Newton minimizer.

Full-batch L-BFGS (two-loop recursion, curvature-scaled initial Hessian)
with Armijo backtracking. No randomness anywhere: identical inputs give
bit-identical iterates. Works on nonsmooth objectives too when handed a
subgradient; for those, callers certify convergence by objective
stagnation instead of the gradient norm (see `stagnation_window`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

FG = Callable[[np.ndarray], tuple[float, np.ndarray]]

_ARMIJO_C1 = 1e-4
_MAX_BACKTRACKS = 60
_CURVATURE_EPS = 1e-12


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    fun: float
    n_iter: int
    converged: bool
    reason: str


def minimize_lbfgs(
    fg: FG,
    x0: np.ndarray,
    tol: float,
    max_iter: int,
    memory: int = 10,
    stagnation_window: int = 0,
) -> MinimizeResult:
    """Minimize f from x0.

    Convergence certificates, checked in order:
      * gradient:   ||g||_inf <= tol * (1 + ||g(x0)||_inf)
      * stagnation: relative objective decrease below tol for
                    `stagnation_window` consecutive iterations (only when
                    the window is > 0; used for nonsmooth objectives).
    Anything else (iteration budget, dead line search) returns the best
    iterate with converged=False.
    """
    x = np.array(x0, dtype=float)
    f, g = fg(x)
    g0_norm = float(np.max(np.abs(g))) if g.size else 0.0
    gtol = tol * (1.0 + g0_norm)

    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []
    stagnant = 0

    if float(np.max(np.abs(g))) <= gtol:
        return MinimizeResult(x, f, 0, True, "gradient")

    for it in range(1, max_iter + 1):
        d = _direction(g, s_hist, y_hist, rho_hist)
        slope = float(d @ g)
        if slope >= 0:  # curvature info unusable; restart from steepest descent
            s_hist.clear(); y_hist.clear(); rho_hist.clear()
            d = -g
            slope = float(d @ g)

        step = 1.0 if s_hist else min(1.0, 1.0 / max(float(np.sum(np.abs(g))), 1e-12))
        f_new = g_new = x_new = None
        for _ in range(_MAX_BACKTRACKS):
            x_try = x + step * d
            f_try, g_try = fg(x_try)
            if f_try <= f + _ARMIJO_C1 * step * slope:
                x_new, f_new, g_new = x_try, f_try, g_try
                break
            step *= 0.5
        if x_new is None:
            return MinimizeResult(x, f, it - 1, False, "line_search_failed")

        s = x_new - x
        yv = g_new - g
        sy = float(s @ yv)
        if sy > _CURVATURE_EPS * float(np.linalg.norm(s)) * float(np.linalg.norm(yv)):
            s_hist.append(s); y_hist.append(yv); rho_hist.append(1.0 / sy)
            if len(s_hist) > memory:
                s_hist.pop(0); y_hist.pop(0); rho_hist.pop(0)

        decrease = f - f_new
        x, f, g = x_new, f_new, g_new

        if float(np.max(np.abs(g))) <= gtol:
            return MinimizeResult(x, f, it, True, "gradient")
        if stagnation_window > 0:
            stagnant = stagnant + 1 if decrease <= tol * (1.0 + abs(f)) else 0
            if stagnant >= stagnation_window:
                return MinimizeResult(x, f, it, True, "stagnation")

    return MinimizeResult(x, f, max_iter, False, "max_iter")


def _direction(g, s_hist, y_hist, rho_hist) -> np.ndarray:
    """Two-loop recursion; H0 = (s.y / y.y) I from the newest pair."""
    q = -g.copy()
    if not s_hist:
        return q
    alphas = []
    for s, y, r in zip(reversed(s_hist), reversed(y_hist), reversed(rho_hist)):
        a = r * float(s @ q)
        alphas.append(a)
        q -= a * y
    gamma = (1.0 / rho_hist[-1]) / float(y_hist[-1] @ y_hist[-1])
    q *= gamma
    for (s, y, r), a in zip(zip(s_hist, y_hist, rho_hist), reversed(alphas)):
        b = r * float(y @ q)
        q += (a - b) * s
    return q
