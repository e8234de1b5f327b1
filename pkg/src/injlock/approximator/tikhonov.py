"""Tikhonov-regularized fits by shifted sign_a functions on a disc.

Given a target ``g`` on the disc ``|u| <= r0`` and centers ``z_i``, the basis
``psi_i(u) = sign_a(u - z_i)`` is fitted in the Sobolev norm ``H^2`` by
minimizing::

    || (1 - Laplacian)(sum_i b_i psi_i - g) ||^2 + gamma ||b||^2

The normal equations are ``(A + gamma I) b = w`` with
``A_ij = <(1-Laplacian) psi_j, (1-Laplacian) psi_i>`` (Hermitian) and
``w_i = <(1-Laplacian) g, (1-Laplacian) psi_i>``.

Discretization: a uniform midpoint grid of spacing ``q`` masked to the disc,
the 5-point Laplacian with one-sided second differences where a centred
stencil would leave the mask, and midpoint-rule integrals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..errors import ConditioningError, UsageError
from ..field_math import sign_a

__all__ = [
    "SignAExpansion",
    "FitReport",
    "tikhonov_fit",
    "eval_expansion",
    "center_grid",
    "disc_grid",
    "laplacian",
    "h2_norm",
]

#: Condition number above which a fit is rejected.
COND_MAX = 1e14


@dataclass(frozen=True)
class FitReport:
    """Diagnostics of a Tikhonov fit.

    ``residual_h2`` is the discrete H^2 norm of the fit residual,
    ``residual_sup`` its maximum modulus at the quadrature nodes and
    ``condition`` the 2-norm condition number of ``A + gamma I``.
    """

    gamma: float
    residual_h2: float
    residual_sup: float
    condition: float
    n_centers: int
    n_nodes: int


@dataclass(frozen=True, eq=False)
class SignAExpansion:
    """``sum_i b_i sign_a(u - z_i)`` on the disc of radius ``r0``."""

    centers: np.ndarray
    weights: np.ndarray
    a: float
    r0: float
    report: FitReport | None = field(default=None, compare=False)

    def __post_init__(self):
        z = np.asarray(self.centers, dtype=complex).reshape(-1)
        b = np.asarray(self.weights, dtype=complex).reshape(-1)
        if z.shape != b.shape:
            raise UsageError("centers and weights differ in length")
        if self.a < 0 or self.r0 <= 0:
            raise UsageError("need a >= 0 and r0 > 0")
        object.__setattr__(self, "centers", z)
        object.__setattr__(self, "weights", b)


def center_grid(r: float, spacing: float) -> np.ndarray:
    """Square-lattice centers ``spacing*(i + 1j*j)`` inside ``|z| <= r``.

    Grids with spacings ``d`` and ``d/2`` are nested.
    """
    m = int(np.floor(r / spacing + 1e-9))
    k = np.arange(-m, m + 1) * spacing
    Z = (k[None, :] + 1j * k[:, None]).ravel()
    return Z[np.abs(Z) <= r * (1 + 1e-12)]


def disc_grid(r0: float, q: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint grid of spacing ``q``: returns ``(points, mask)``.

    ``mask`` is the 2-D boolean disc mask; ``points`` the complex nodes in
    row-major order of the mask.
    """
    xs = np.arange(-r0 + q / 2, r0, q)
    Z = xs[None, :] + 1j * xs[:, None]
    mask = np.abs(Z) <= r0
    return Z[mask], mask


def laplacian(mask: np.ndarray, q: float) -> sp.csr_matrix:
    """5-point Laplacian on the masked grid, one-sided at the boundary.

    Along each axis a node uses the centred stencil when both neighbors are
    inside the mask, otherwise a forward or backward three-point second
    difference; a node with no admissible stencil contributes nothing along
    that axis.
    """
    ny, nx = mask.shape
    idx = -np.ones(mask.shape, dtype=np.int64)
    idx[mask] = np.arange(int(mask.sum()))
    pad = np.pad(mask, 2)
    ipad = np.pad(idx, 2, constant_values=-1)
    I, J = np.nonzero(mask)
    rows, cols, vals = [], [], []
    for di, dj in ((1, 0), (0, 1)):
        def inside(s):
            return pad[I + 2 + s * di, J + 2 + s * dj]

        def col(s):
            return ipad[I + 2 + s * di, J + 2 + s * dj]

        central = inside(-1) & inside(1)
        forward = ~central & inside(1) & inside(2)
        backward = ~central & ~forward & inside(-1) & inside(-2)
        r = idx[I, J]
        for sel, offs in ((central, (-1, 0, 1)), (forward, (0, 1, 2)), (backward, (0, -1, -2))):
            for o, w in zip(offs, (1.0, -2.0, 1.0)):
                rows.append(r[sel])
                cols.append(col(o)[sel])
                vals.append(np.full(int(sel.sum()), w / (q * q)))
    n = int(mask.sum())
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                         shape=(n, n))


def _operator(mask, q):
    return sp.identity(int(mask.sum()), format="csr") - laplacian(mask, q)


def h2_norm(values: np.ndarray, mask: np.ndarray, q: float) -> float:
    """Discrete ``||(1 - Laplacian) v||_{L^2}`` of node values on the disc grid."""
    return float(q * np.linalg.norm(_operator(mask, q) @ values))


def tikhonov_fit(g: Callable[[np.ndarray], np.ndarray], r0: float, centers, gamma: float | None = None,
                 a: float = 0.2, *, q: float | None = None, chunk: int = 4000,
                 cond_max: float = COND_MAX) -> SignAExpansion:
    """Fit ``g`` by shifted ``sign_a`` functions in the ``H^2`` norm.

    Parameters
    ----------
    g : callable
        Vectorized target on complex points.
    r0 : float
        Disc radius.
    centers : array_like of complex
        Basis centers ``z_i``.
    gamma : float, optional
        Regularization; default ``1e-6 * trace(A) / i0``.
    a : float
        Smoothing of the basis functions.
    q : float, optional
        Quadrature spacing; default ``min(a/4, r0/24)``.

    Returns
    -------
    SignAExpansion
        With a :class:`FitReport` attached as ``report``.

    Raises
    ------
    ConditioningError
        If ``cond(A + gamma I)`` exceeds ``cond_max``.
    """
    z = np.asarray(centers, dtype=complex).reshape(-1)
    if z.size == 0:
        raise UsageError("center grid must be nonempty")
    if a < 0:
        raise UsageError("a must be nonnegative")
    if gamma is not None and gamma <= 0:
        raise UsageError("gamma must be positive")
    if q is None:
        q = min(a / 4 if a > 0 else r0 / 24, r0 / 24)
    pts, mask = disc_grid(r0, q)
    M = _operator(mask, q)
    Phi = np.empty((pts.size, z.size), dtype=complex)
    for s in range(0, z.size, chunk):
        block = z[s:s + chunk]
        Phi[:, s:s + block.size] = M @ sign_a(pts[:, None] - block[None, :], a)
    gv = np.asarray(g(pts), dtype=complex)
    Mg = M @ gv
    A = q * q * (Phi.conj().T @ Phi)
    w = q * q * (Phi.conj().T @ Mg)
    if gamma is None:
        gamma = 1e-6 * float(np.trace(A).real) / z.size
    K = A + gamma * np.eye(z.size)
    cond = float(np.linalg.cond(K))
    if not np.isfinite(cond) or cond > cond_max:
        raise ConditioningError(f"Tikhonov system condition number {cond:.3e} exceeds {cond_max:.1e}; "
                                "increase gamma or coarsen the center grid", cond)
    b = sla.cho_solve(sla.cho_factor(K, lower=False), w)
    resid = Phi @ b - Mg
    fit = SignAExpansion(z, b, float(a), float(r0))
    sup = float(np.abs(eval_expansion(fit, pts) - gv).max())
    rep = FitReport(float(gamma), float(q * np.linalg.norm(resid)), sup, cond, z.size, pts.size)
    return SignAExpansion(z, b, float(a), float(r0), rep)


def eval_expansion(exp: SignAExpansion, u, chunk: int = 2000) -> np.ndarray:
    """Evaluate ``sum_i b_i sign_a(u - z_i)`` at complex points ``u``."""
    uu = np.asarray(u, dtype=complex)
    flat = uu.reshape(-1)
    out = np.empty(flat.size, dtype=complex)
    for s in range(0, flat.size, chunk):
        out[s:s + chunk] = sign_a(flat[s:s + chunk, None] - exp.centers[None, :], exp.a) @ exp.weights
    return out.reshape(uu.shape) if uu.ndim else complex(out[0])
