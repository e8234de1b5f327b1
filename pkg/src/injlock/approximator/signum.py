"""One-dimensional sum-of-signum approximation.

A function on ``[-L, L]`` is approximated by the staircase::

    phi(x) = sum_{k=-N}^{N} b_k sgn(x - k a) + c,      a = L / N

The construction reads ``f`` at cell midpoints: with ``m_k = f(k a + a/2)``
(evaluation points clipped to ``[-L, L]``) the jump weights are
``b_k = (m_k - m_{k-1}) / 2`` and ``c = (f(L) + f(-L)) / 2``, which makes
``phi`` equal ``f`` at every cell midpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from ..errors import UsageError

__all__ = ["SignumApprox1D", "fit_signum_1d", "eval_signum_1d"]

#: Samples used to find the best constant when ``N = 0``.
_CONSTANT_SAMPLES = 4097


@dataclass(frozen=True, eq=False)
class SignumApprox1D:
    """Staircase approximation ``sum_k b_k sgn(x - k a_step) + c``.

    Attributes
    ----------
    a_step : float
        Grid spacing (``L/N``; ``L`` when ``N = 0``).
    N : int
        Half-width: jumps sit at ``k * a_step`` for ``k = -N..N``.
    b : ndarray, shape (2N+1,)
    c : float
    L : float
        Validity radius.
    """

    a_step: float
    N: int
    b: np.ndarray
    c: float
    L: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if b.size != 2 * int(self.N) + 1:
            raise UsageError(f"expected {2 * self.N + 1} weights, got {b.size}")
        if self.a_step <= 0 or self.L <= 0:
            raise UsageError("a_step and L must be positive")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "N", int(self.N))

    @property
    def centers(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1) * self.a_step


Sampled = Union[Callable[[np.ndarray], np.ndarray], tuple]


def _as_callable(f: Sampled, L: float) -> Callable[[np.ndarray], np.ndarray]:
    if callable(f):
        return lambda x: np.asarray(f(np.asarray(x, dtype=float)), dtype=float)
    xs, ys = (np.asarray(v, dtype=float) for v in f)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    if xs[0] > -L or xs[-1] < L:
        raise UsageError("samples must cover [-L, L]")
    return lambda x: np.interp(x, xs, ys)


def fit_signum_1d(f: Sampled, L: float, N: int) -> SignumApprox1D:
    """Fit a staircase to ``f`` on ``[-L, L]``.

    Parameters
    ----------
    f : callable or (x, y) tuple
        Vectorized real function, or samples that are linearly interpolated.
    L : float
        Half-width of the interval.
    N : int
        Number of cells per half interval; ``N = 0`` returns the best
        constant ``(max f + min f) / 2`` on a dense grid.

    Examples
    --------
    >>> ap = fit_signum_1d(np.sign, 1.0, 4)
    >>> ap.b.tolist(), ap.c
    ([0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0], 0.0)
    """
    if L <= 0:
        raise UsageError("L must be positive")
    if N < 0 or int(N) != N:
        raise UsageError("N must be a nonnegative integer")
    N = int(N)
    fn = _as_callable(f, L)
    if N == 0:
        y = fn(np.linspace(-L, L, _CONSTANT_SAMPLES))
        return SignumApprox1D(L, 0, [0.0], float((y.max() + y.min()) / 2), L)
    a = L / N
    k = np.arange(-N, N + 1)
    mid = fn(np.clip(k * a + a / 2, -L, L))
    left = np.concatenate([fn(np.array([-L])), mid[:-1]])
    b = (mid - left) / 2
    c = float((fn(np.array([L]))[0] + fn(np.array([-L]))[0]) / 2)
    return SignumApprox1D(a, N, b, c, L)


def eval_signum_1d(approx: SignumApprox1D, x):
    """Evaluate the staircase (``sgn(0) = 0`` at exact jump points)."""
    xx = np.asarray(x, dtype=float)
    out = approx.c + np.sign(xx[..., None] - approx.centers).dot(approx.b)
    return float(out) if np.ndim(x) == 0 else out
