"""Sinc-quadrature grid for rational approximation of the inverse square root.

The grid discretizes an integral representation of ``x**-0.5`` into a sum of
simple poles ``c_j/(x + alpha_j)`` on geometrically spaced shifts.  With the
step, truncation, and coefficient choices coded in :func:`build_grid`, the
resulting rational function ``r(x)`` satisfies

    |sqrt(x) * r(x) - 1| <= eta            uniformly on [1, kappa],
    |x * sum_j c_j^2 / (x+alpha_j)^2 - L_h| <= 2*eta   on the same interval,

which is everything the downstream samplers rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

__all__ = [
    "C0",
    "SincGrid",
    "build_grid",
    "eval_r",
    "eval_sq_sum",
    "sup_error_E1",
    "sup_error_E2",
]

# Kept as an expression, never a decimal literal, so the stored constant is
# bit-identical to the defining formula.
C0 = 12.0 / (1.0 - math.exp(-1.0))


@dataclass(frozen=True)
class SincGrid:
    """Immutable bundle of quadrature constants.

    ``alphas`` and ``coeffs`` are indexed j = -M..N in increasing order;
    ``alphas`` is strictly increasing and both arrays are positive.
    ``query_budget`` (= M + N + 1) is the number of pole terms, which equals
    the number of oracle calls a one-point rational sampler spends.
    """

    eta: float
    kappa: float
    h: float
    M: int
    N: int
    alphas: np.ndarray
    coeffs: np.ndarray
    L_h: float

    @property
    def query_budget(self) -> int:
        return self.M + self.N + 1


def build_grid(eta: float, kappa: float) -> SincGrid:
    """Construct the quadrature grid for accuracy ``eta`` on [1, kappa].

    Parameters
    ----------
    eta : float
        Target uniform accuracy, must lie strictly inside (0, 1/2).
    kappa : float
        Right endpoint of the approximation interval, must be >= 1.
        ``kappa == 1`` is allowed; the interval degenerates to {1}.
    """
    eta = float(eta)
    kappa = float(kappa)
    if not (0.0 < eta < 0.5):
        raise ParameterError(f"eta must lie in (0, 1/2), got {eta}")
    if not kappa >= 1.0:
        raise ParameterError(f"kappa must be >= 1, got {kappa}")

    log_ratio = math.log(C0 / eta)
    h = math.pi**2 / log_ratio
    M = math.ceil(log_ratio / h)
    N = math.ceil((0.5 * math.log(kappa) + log_ratio) / h)

    j = np.arange(-M, N + 1, dtype=np.float64)
    alphas = np.exp(2.0 * j * h)
    coeffs = (2.0 * h / math.pi) * np.exp(j * h)
    L_h = 2.0 * h / math.pi**2

    return SincGrid(eta=eta, kappa=kappa, h=h, M=M, N=N,
                    alphas=alphas, coeffs=coeffs, L_h=L_h)


def eval_r(grid: SincGrid, x):
    """Evaluate r(x) = sum_j c_j / (x + alpha_j) for x > 0.

    Accepts scalars or arrays; strictly positive and strictly decreasing.
    """
    xs = np.asarray(x, dtype=np.float64)
    if np.any(xs <= 0.0):
        raise ParameterError("eval_r requires x > 0")
    out = np.sum(grid.coeffs / (xs[..., None] + grid.alphas), axis=-1)
    return float(out) if np.isscalar(x) or xs.ndim == 0 else out


def eval_sq_sum(grid: SincGrid, x):
    """Evaluate sum_j c_j^2 / (x + alpha_j)^2 for x > 0 (scalar or array)."""
    xs = np.asarray(x, dtype=np.float64)
    if np.any(xs <= 0.0):
        raise ParameterError("eval_sq_sum requires x > 0")
    out = np.sum((grid.coeffs / (xs[..., None] + grid.alphas)) ** 2, axis=-1)
    return float(out) if np.isscalar(x) or xs.ndim == 0 else out


def _eval_points(kappa: float, n_points: int) -> np.ndarray:
    # Dyadically refined log grid: the point set for n is contained in the
    # point set for 2n, so refining n_points can never shrink the maximum.
    if n_points < 2:
        raise ParameterError(f"n_points must be >= 2, got {n_points}")
    if kappa == 1.0:
        return np.ones(1)
    level = max(1, math.ceil(math.log2(n_points - 1)))
    return np.geomspace(1.0, kappa, 2**level + 1)


def sup_error_E1(grid: SincGrid, n_points: int = 4000) -> float:
    """Estimate sup_{x in [1, kappa]} |sqrt(x) r(x) - 1| on a log grid.

    The grid holds at least ``n_points`` points (rounded up to the next
    dyadic refinement level); the estimate is a lower bound on the true sup.
    """
    xs = _eval_points(grid.kappa, n_points)
    return float(np.max(np.abs(np.sqrt(xs) * eval_r(grid, xs) - 1.0)))


def sup_error_E2(grid: SincGrid, n_points: int = 4000) -> float:
    """Estimate sup_{x in [1, kappa]} |x * sum_j c_j^2/(x+alpha_j)^2 - L_h|."""
    xs = _eval_points(grid.kappa, n_points)
    return float(np.max(np.abs(xs * eval_sq_sum(grid, xs) - grid.L_h)))
