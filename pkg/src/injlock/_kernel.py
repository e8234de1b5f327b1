"""Compiled fixed-step RK4 kernel for the spin-flip rate equations.

Everything here works in dimensionless time ``tau = gamma_c * t`` with the
rates ``g = gamma/gamma_c`` and ``gs = gamma_s/gamma_c``; injections are in
units of ``gamma_c`` times field units.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def rhs(ex, ey, N, n, mu, alpha, g, gs, ux, uy):
    c = 1.0 + 1j * alpha
    dex = -ex - 1j * alpha * ex + c * (N * ex + 1j * n * ey) + ux
    dey = -ey - 1j * alpha * ey + c * (N * ey - 1j * n * ex) + uy
    cross = ey * np.conj(ex) - ex * np.conj(ey)
    p = ex.real * ex.real + ex.imag * ex.imag + ey.real * ey.real + ey.imag * ey.imag
    dN = -g * (N * (1.0 + p) - mu + (1j * n * cross).real)
    dn = -gs * n - g * (n * p + (1j * N * cross).real)
    return dex, dey, dN, dn


@njit(cache=True)
def rk4_step(ex, ey, N, n, mu, alpha, g, gs, u0x, u0y, umx, umy, u1x, u1y, h):
    """One RK4 step; ``u0``, ``um``, ``u1`` are the injections at t, t+h/2, t+h."""
    k1 = rhs(ex, ey, N, n, mu, alpha, g, gs, u0x, u0y)
    k2 = rhs(ex + 0.5 * h * k1[0], ey + 0.5 * h * k1[1], N + 0.5 * h * k1[2], n + 0.5 * h * k1[3],
             mu, alpha, g, gs, umx, umy)
    k3 = rhs(ex + 0.5 * h * k2[0], ey + 0.5 * h * k2[1], N + 0.5 * h * k2[2], n + 0.5 * h * k2[3],
             mu, alpha, g, gs, umx, umy)
    k4 = rhs(ex + h * k3[0], ey + h * k3[1], N + h * k3[2], n + h * k3[3],
             mu, alpha, g, gs, u1x, u1y)
    ex = ex + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    ey = ey + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    N = N + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    n = n + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])
    return ex, ey, N, n


@njit(cache=True)
def _segment(sched_t, j, t):
    m = sched_t.shape[0]
    while j + 1 < m and sched_t[j + 1] <= t:
        j += 1
    return j


@njit(cache=True)
def integrate_schedule(ex, ey, N, n, mu, alpha, g, gs, sched_t, sched_u, h, steps, every,
                       out_ex, out_ey, out_N, out_n):
    """Integrate under a piecewise-constant injection schedule.

    ``sched_t`` holds segment start times (first entry 0) and ``sched_u`` the
    ``(M, 2)`` complex injection per segment.  Samples are written every
    ``every`` steps starting with the initial state.  Returns the index of the
    step at which the state became non-finite, or -1 on success.
    """
    j = 0
    out_ex[0] = ex
    out_ey[0] = ey
    out_N[0] = N
    out_n[0] = n
    k = 1
    for i in range(steps):
        t = i * h
        j0 = _segment(sched_t, j, t)
        jm = _segment(sched_t, j0, t + 0.5 * h)
        j1 = _segment(sched_t, jm, t + h)
        j = j0
        ex, ey, N, n = rk4_step(ex, ey, N, n, mu, alpha, g, gs,
                                sched_u[j0, 0], sched_u[j0, 1], sched_u[jm, 0], sched_u[jm, 1],
                                sched_u[j1, 0], sched_u[j1, 1], h)
        if (i + 1) % every == 0:
            if not (np.isfinite(ex.real) and np.isfinite(ex.imag) and np.isfinite(ey.real)
                    and np.isfinite(ey.imag) and np.isfinite(N) and np.isfinite(n)):
                return i + 1
            out_ex[k] = ex
            out_ey[k] = ey
            out_N[k] = N
            out_n[k] = n
            k += 1
    if not (np.isfinite(ex.real) and np.isfinite(ex.imag) and np.isfinite(ey.real)
            and np.isfinite(ey.imag) and np.isfinite(N) and np.isfinite(n)):
        return steps
    if steps % every != 0:
        out_ex[k] = ex
        out_ey[k] = ey
        out_N[k] = N
        out_n[k] = n
    return -1
