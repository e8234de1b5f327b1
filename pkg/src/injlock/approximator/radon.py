"""Ridge decomposition of functions on the plane via Radon-transform inversion.

For ``f`` supported in the disc of radius ``R`` the two-dimensional inversion
formula reads::

    f(x) = integral over the unit circle of G(omega, x . omega) d omega
    G(omega, s) = (1 / (4 pi)) * H[d/ds Rf(omega, .)](s)

with ``Rf`` the Radon transform and ``H`` the Hilbert transform.  The
integrand is even under ``omega -> -omega``, so ``K`` uniform angles on the
half circle with weights ``V = 2 pi / K`` give ``f(x) ~ sum_k V g_k(x . omega_k)``
with ``g_k = G(omega_k, .)``.  Each profile is written as a staircase of
smoothed steps::

    g_k(s) ~ g_k(-L h) + sum_l c_kl * (1 + sign_a(s - l h)) / 2,
    c_kl = g_k(l h) - g_k((l - 1) h),      l = -L+1 .. L

so that ``f(x) ~ C + sum_{k,l} (V/2) c_kl sign_a(x . omega_k - l h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ShapeError, UnderResolvedError, UsageError
from ..field_math import sign_a

__all__ = [
    "RidgeApprox",
    "radon_transform",
    "hilbert_transform",
    "ridge_decompose",
    "eval_ridge",
    "ridge_profiles",
    "INVERSION_CONSTANT",
]

#: Constant of the two-dimensional inversion formula, ``1/(4 pi)``.
INVERSION_CONSTANT = 1.0 / (4.0 * math.pi)


def _gauss_nodes(n_nodes: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [-1, 1]."""
    per = max(1, n_nodes // panels)
    x, w = np.polynomial.legendre.leggauss(per)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    return (mid[:, None] + half[:, None] * x[None, :]).ravel(), (half[:, None] * w[None, :]).ravel()


def _unit(omega) -> np.ndarray:
    if np.ndim(omega) == 0:
        th = float(omega)
        return np.array([math.cos(th), math.sin(th)])
    om = np.asarray(omega, dtype=float).reshape(-1)
    if om.shape != (2,):
        raise ShapeError("direction must be an angle or a 2-vector")
    nrm = float(np.hypot(*om))
    if abs(nrm - 1.0) > 1e-9:
        raise UsageError(f"direction must be a unit vector (norm {nrm})")
    return om / nrm


def radon_transform(f: Callable[[np.ndarray], np.ndarray], omega, s, R: float = 1.0, *,
                    n_nodes: int = 256, panels: int = 16):
    """Line integrals of ``f`` over ``{x : x . omega = s}``.

    Parameters
    ----------
    f : callable
        Vectorized function of complex points ``x1 + i x2``, supported in
        ``|x| <= R``.
    omega : float or array_like
        Direction angle, or unit 2-vector.
    s : float or array_like
        Signed distances; the transform is 0 for ``|s| >= R``.
    n_nodes, panels : int
        Composite Gauss-Legendre rule along the chord.

    Examples
    --------
    >>> round(radon_transform(lambda z: np.ones(z.shape), 0.0, 0.0), 12)
    2.0
    """
    om = _unit(omega)
    ss = np.asarray(s, dtype=float)
    out = _radon_many(f, om[None, :], ss.reshape(-1), R, n_nodes, panels)[0]
    return float(out[0]) if ss.ndim == 0 else out.reshape(ss.shape)


def _radon_many(f, omegas: np.ndarray, s: np.ndarray, R: float, n_nodes: int, panels: int) -> np.ndarray:
    x, w = _gauss_nodes(n_nodes, panels)
    half = np.sqrt(np.clip(R * R - s * s, 0.0, None))
    out = np.empty((omegas.shape[0], s.size))
    for k, (c, sn) in enumerate(omegas):
        base = s * complex(c, sn)
        perp = complex(-sn, c)
        pts = base[:, None] + (half[:, None] * x[None, :]) * perp
        vals = np.asarray(f(pts), dtype=float)
        out[k] = (vals * w[None, :]).sum(axis=1) * half
    return out


def hilbert_transform(w, pad: int = 4, axis: int = -1) -> np.ndarray:
    """Discrete Hilbert transform ``F^-1[-i sgn(xi) F w]`` with zero padding.

    ``pad`` is the length multiple used for the FFT (4 by default; 1 gives
    the periodic transform, for which ``H(H(w)) = -w`` holds exactly on
    zero-mean signals without a Nyquist component).
    """
    w = np.asarray(w, dtype=float)
    n = w.shape[axis]
    N = int(pad) * n
    if N < n:
        raise UsageError("pad must be >= 1")
    W = np.fft.fft(w, N, axis=axis)
    xi = np.fft.fftfreq(N)
    shape = [1] * w.ndim
    shape[axis] = N
    out = np.fft.ifft(-1j * np.sign(xi).reshape(shape) * W, axis=axis).real
    return np.take(out, np.arange(n), axis=axis)


@dataclass(frozen=True, eq=False)
class RidgeApprox:
    """``C + sum_{k,l} (V_k/2) c_kl sign_a(x . omega_k - l h)``.

    Attributes
    ----------
    thetas : ndarray, shape (K,)
        Direction angles; ``omega_k = (cos, sin)``.
    V : ndarray, shape (K,)
        Quadrature weights.
    h : float
        Step spacing.
    L : int
        Half-width; steps sit at ``l h`` for ``l = -L+1 .. L``.
    coeffs : ndarray, shape (K, 2L)
        ``c_kl``.
    C : float
        Constant term.
    a : float
        Step smoothing.
    R : float
        Support radius of the decomposed function.
    """

    thetas: np.ndarray
    V: np.ndarray
    h: float
    L: int
    coeffs: np.ndarray
    C: float
    a: float = 0.0
    R: float = 1.0

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float).reshape(-1)
        V = np.asarray(self.V, dtype=float).reshape(-1)
        c = np.asarray(self.coeffs, dtype=float).reshape(th.size, -1)
        if V.shape != th.shape or c.shape[1] != 2 * int(self.L):
            raise ShapeError("inconsistent ridge array shapes")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "L", int(self.L))

    @property
    def directions(self) -> np.ndarray:
        return np.stack([np.cos(self.thetas), np.sin(self.thetas)], axis=-1)

    @property
    def ells(self) -> np.ndarray:
        return np.arange(-self.L + 1, self.L + 1)

    @property
    def K(self) -> int:
        return self.thetas.size


def ridge_profiles(f, K: int, h: float, L: int, R: float = 1.0, *, n_nodes: int = 256,
                   panels: int = 16, pad: int = 4):
    """Sampled profiles ``g_k(l h)`` for ``l = -L .. L`` (shape ``(K, 2L+1)``)."""
    thetas = np.arange(K) * math.pi / K
    M = max(int(L), int(math.ceil(R / h)))
    m = np.arange(-M - 8, M + 9)
    Rf = _radon_many(f, np.stack([np.cos(thetas), np.sin(thetas)], -1), m * h, R, n_nodes, panels)
    G = hilbert_transform(INVERSION_CONSTANT * np.gradient(Rf, h, axis=1), pad=pad)
    ell = np.arange(-L, L + 1)
    return thetas, G[:, ell - m[0]]


def ridge_decompose(f: Callable[[np.ndarray], np.ndarray], K: int = 64, h: float | None = None,
                    L: int | None = None, R: float = 1.0, a: float | None = None, *,
                    n_nodes: int = 256, panels: int = 16, pad: int = 4) -> RidgeApprox:
    """Ridge decomposition of a planar function.

    Parameters
    ----------
    f : callable
        Vectorized function of complex points, supported in ``|x| <= R``.
    K : int
        Number of directions on the half circle (at least 8).
    h : float, optional
        Step spacing, default ``R/64``.
    L : int, optional
        Half-width, default ``ceil(R/h)``.
    a : float, optional
        Step smoothing, default ``h``.

    Raises
    ------
    UnderResolvedError
        If ``K < 8``.
    """
    if K < 8:
        raise UnderResolvedError(f"at least 8 directions are required, got K = {K}")
    h = R / 64 if h is None else float(h)
    if h <= 0:
        raise UsageError("h must be positive")
    L = int(math.ceil(R / h - 1e-9)) if L is None else int(L)
    if L < 1:
        raise UsageError("L must be >= 1")
    a = h if a is None else float(a)
    thetas, g = ridge_profiles(f, K, h, L, R, n_nodes=n_nodes, panels=panels, pad=pad)
    c = g[:, 1:] - g[:, :-1]
    V = np.full(K, 2 * math.pi / K)
    C = float(np.sum(V * (g[:, 0] + 0.5 * c.sum(axis=1))))
    return RidgeApprox(thetas, V, h, L, c, C, a, R)


def eval_ridge(approx: RidgeApprox, z) -> np.ndarray:
    """Evaluate the ridge sum at complex points ``z = x1 + i x2``."""
    zz = np.asarray(z, dtype=complex)
    flat = zz.reshape(-1)
    out = np.full(flat.size, approx.C, dtype=float)
    shifts = approx.ells * approx.h
    for k in range(approx.K):
        proj = flat.real * math.cos(approx.thetas[k]) + flat.imag * math.sin(approx.thetas[k])
        steps = sign_a(proj[:, None] - shifts[None, :], approx.a).real
        out += steps @ (0.5 * approx.V[k] * approx.coeffs[k])
    return out.reshape(zz.shape) if zz.ndim else float(out[0])
