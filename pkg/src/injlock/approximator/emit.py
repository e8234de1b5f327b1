"""Flattening approximations into laser networks.

Every approximation is a constant plus a weighted sum of ``sign_a`` terms of
affine functions of the input, which is exactly the three-layer laser model:
one laser per term, ``A`` holding the input weights, ``E_ext`` the offsets and
``C`` the output weights.  A constant is produced by a laser whose only
injection is a unit bias; its output weight is divided by ``sign_a(1, a)`` so
the constant is exact for any smoothing.

Input encodings
---------------
* :class:`SignumApprox1D` -- one real input amplitude ``x`` (phase 0 or pi).
* :class:`SignAExpansion` -- one complex input ``u``.
* :class:`RidgeApprox` -- the planar point ``(x1, x2)`` as two real input
  amplitudes, so each laser sees the real projection ``x . omega_k - l h``
  and ``sign_a`` of it is exactly the ridge step.

:func:`compose_ridge_expansion` builds the alternative single-complex-input
network in which each ridge step is itself replaced by a fitted
:class:`SignAExpansion` of ``u -> sign_a(Re u)``.
"""

from __future__ import annotations

import numpy as np

from ..errors import UsageError
from ..field_math import sign_a
from ..network import LayeredModel
from .radon import RidgeApprox
from .signum import SignumApprox1D
from .tikhonov import SignAExpansion, eval_expansion

__all__ = ["emit_network", "compose_ridge_expansion", "eval_composed", "ridge_inputs"]


def _with_constant(A: np.ndarray, E: np.ndarray, C: np.ndarray, const: float | complex,
                   a: float) -> LayeredModel:
    j0 = A.shape[1]
    A = np.vstack([A, np.zeros((1, j0))])
    E = np.concatenate([E, [1.0]])
    C = np.concatenate([C, [complex(const) / complex(sign_a(1.0, a))]])
    return LayeredModel(A, C[None, :], E, a=a, c0=1.0)


def emit_network(approx) -> LayeredModel:
    """Build a :class:`LayeredModel` reproducing ``approx``.

    The last laser of the returned model carries the constant term; a model
    with no other terms therefore outputs that constant for every input.

    Examples
    --------
    >>> from injlock.approximator.signum import SignumApprox1D
    >>> m = emit_network(SignumApprox1D(1.0, 0, [2.0], 0.5, 1.0))
    >>> m.shape
    (1, 2, 1)
    """
    if isinstance(approx, SignumApprox1D):
        k = np.arange(-approx.N, approx.N + 1)
        A = np.ones((k.size, 1))
        return _with_constant(A, -k * approx.a_step, approx.b.astype(complex), approx.c, 0.0)
    if isinstance(approx, SignAExpansion):
        n = approx.centers.size
        A = np.ones((n, 1))
        return _with_constant(A, -approx.centers, approx.weights, 0.0, approx.a)
    if isinstance(approx, RidgeApprox):
        K, nl = approx.coeffs.shape
        dirs = np.repeat(approx.directions, nl, axis=0)
        E = -np.tile(approx.ells * approx.h, K).astype(float)
        C = (0.5 * approx.V[:, None] * approx.coeffs).ravel()
        return _with_constant(dirs, E, C, approx.C, approx.a)
    raise UsageError(f"cannot emit a network for {type(approx).__name__}")


def ridge_inputs(z) -> np.ndarray:
    """Map complex points ``x1 + i x2`` to the two real input amplitudes."""
    zz = np.asarray(z, dtype=complex).reshape(-1)
    return np.stack([zz.real, zz.imag], axis=-1).astype(complex)


def compose_ridge_expansion(ridge: RidgeApprox, inner: SignAExpansion) -> LayeredModel:
    """Single-complex-input network from a ridge sum and an inner expansion.

    With ``w_k = cos(theta_k) - i sin(theta_k)`` one has
    ``Re(w_k z) = x . omega_k``, so each ridge step
    ``sign_a(x . omega_k - l h)`` is replaced by
    ``Re sum_i b_i sign_a(w_k z - l h - z_i)`` where ``inner`` approximates
    ``u -> sign_a(Re u)``.  The output's real part approximates the function.
    """
    w = np.exp(-1j * ridge.thetas)
    K, nl = ridge.coeffs.shape
    n = inner.centers.size
    A = np.repeat(w, nl * n)[:, None]
    E = (-(ridge.ells * ridge.h)[None, :, None] - inner.centers[None, None, :])
    E = np.broadcast_to(E, (K, nl, n)).ravel()
    C = (0.5 * ridge.V[:, None, None] * ridge.coeffs[:, :, None] * inner.weights[None, None, :]).ravel()
    return _with_constant(A, E, C, ridge.C, inner.a)


def eval_composed(ridge: RidgeApprox, inner: SignAExpansion, z) -> np.ndarray:
    """Direct nested evaluation matching :func:`compose_ridge_expansion`."""
    zz = np.asarray(z, dtype=complex).reshape(-1)
    out = np.full(zz.size, complex(ridge.C))
    for k in range(ridge.K):
        u = np.exp(-1j * ridge.thetas[k]) * zz
        for j, ell in enumerate(ridge.ells):
            out += 0.5 * ridge.V[k] * ridge.coeffs[k, j] * eval_expansion(inner, u - ell * ridge.h)
    return out
