"""Injection-locked laser dynamics.

The slave laser is described by the spin-flip rate equations for the two
linear field components ``E_x``, ``E_y``, the total
population difference ``N`` and the spin imbalance ``n``.  In dimensionless
time ``tau = gamma_c * t``::

    dE_x/dtau = -(1 + i alpha) E_x + (1 + i alpha)(N E_x + i n E_y) + u_x
    dE_y/dtau = -(1 + i alpha) E_y + (1 + i alpha)(N E_y - i n E_x) + u_y
    dN/dtau   = -g  [N (1 + |E|^2) - mu + Re(i n (E_y E_x* - E_x E_y*))]
    dn/dtau   = -gs n - g [n |E|^2 + Re(i N (E_y E_x* - E_x E_y*))]

with ``g = gamma/gamma_c`` and ``gs = gamma_s/gamma_c``.

Injection units
---------------
Injections ``u`` are given in *normalized* units: the physical term added to
``dE/dt`` is ``gamma_c * u``.  A normalized injection ``u`` therefore locks the
laser at rate ``Re(beta) ~ gamma_c * |u| / sqrt(mu - 1)``.  The coupling
between an external field ``E_in`` and ``u`` is a model parameter (see
``injection_scale`` in :mod:`injlock.network`).

Locked steady state
-------------------
For weak injection the laser performs an amplified normalization::

    E_ss = u/|u| * exp(i theta) * sqrt(mu - 1),    theta = -Arg(1 + i alpha)

and the transient decays as ``exp(-beta t)`` with
``beta = -(1 + i alpha) gamma_c xi`` and
``xi = -|u| / (sqrt(1 + alpha^2) sqrt(mu - 1))``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from . import _kernel
from .errors import DivergenceError, NoLockingError, UsageError
from .field_math import JonesField

__all__ = [
    "LaserParams",
    "LaserState",
    "SteadySolution",
    "InjectionSchedule",
    "Trajectory",
    "WeakCouplingWarning",
    "derivatives",
    "integrate",
    "settle",
    "lock",
    "steady_state_field",
    "steady_state_exact",
    "convergence_rate",
    "write_trajectory_csv",
    "DEFAULT_DT",
]

#: Default step in units of 1/gamma_c.
DEFAULT_DT = 0.005
#: Largest admissible step in units of 1/gamma_c.
MAX_DT = 0.01


class WeakCouplingWarning(UserWarning):
    """Injection too strong for the first-order steady-state formula."""


@dataclass(frozen=True)
class LaserParams:
    """Physical constants of one laser.

    Defaults are the Game-of-Life simulation values: ``mu = 2``, ``alpha = 0``,
    ``gamma_c = 1e12``, ``gamma = 1e9``, ``gamma_s = 50e9`` (all rates in 1/s).
    The anisotropies ``gamma_p`` and ``gamma_a`` are carried for completeness
    but do not enter the dynamics.
    """

    mu: float = 2.0
    alpha: float = 0.0
    gamma_c: float = 1e12
    gamma: float = 1e9
    gamma_s: float = 50e9
    gamma_p: float = 0.0
    gamma_a: float = 0.0

    def __post_init__(self):
        for name in ("mu", "alpha", "gamma_c", "gamma", "gamma_s", "gamma_p", "gamma_a"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise UsageError(f"LaserParams.{name} must be finite, got {val}")
            object.__setattr__(self, name, val)
        if self.mu <= 1.0:
            raise UsageError(f"pumping rate mu must exceed the threshold 1, got {self.mu}")
        for name in ("gamma_c", "gamma", "gamma_s"):
            if getattr(self, name) <= 0:
                raise UsageError(f"LaserParams.{name} must be positive")

    @property
    def amplitude(self) -> float:
        """Free-running / locked field magnitude ``sqrt(mu - 1)``."""
        return math.sqrt(self.mu - 1.0)

    @property
    def theta(self) -> float:
        """Fixed output phase offset ``-Arg(1 + i alpha)``."""
        return -math.atan(self.alpha)

    @property
    def regime(self) -> str:
        """``"near-threshold"`` for ``mu < 1.2`` else ``"above-threshold"``."""
        return "near-threshold" if self.mu < 1.2 else "above-threshold"

    def replace(self, **kw) -> "LaserParams":
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d.update(kw)
        return LaserParams(**d)

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class LaserState:
    """Instantaneous state ``(E_x, E_y, N, n)``; also used for rates."""

    E_x: complex = 0j
    E_y: complex = 0j
    N: float = 0.0
    n: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "E_x", complex(self.E_x))
        object.__setattr__(self, "E_y", complex(self.E_y))
        object.__setattr__(self, "N", float(np.real(self.N)))
        object.__setattr__(self, "n", float(np.real(self.n)))

    @property
    def field(self) -> JonesField:
        return JonesField(self.E_x, self.E_y)

    @classmethod
    def free_running(cls, params: LaserParams, phase: float = 0.0,
                     direction: JonesField | None = None) -> "LaserState":
        """Free-running steady state ``|E| = sqrt(mu-1)``, ``N = 1``, ``n = 0``.

        Parameters
        ----------
        phase : float
            Optical phase of the emitted field.
        direction : JonesField, optional
            Polarization direction (normalized internally); vertical if omitted.
        """
        amp = params.amplitude * complex(math.cos(phase), math.sin(phase))
        if direction is None or direction.power == 0:
            return cls(amp, 0j, 1.0, 0.0)
        d = direction * (1.0 / direction.norm)
        return cls(amp * d.v, amp * d.h, 1.0, 0.0)

    def is_finite(self) -> bool:
        return all(math.isfinite(x) for x in (self.E_x.real, self.E_x.imag, self.E_y.real,
                                               self.E_y.imag, self.N, self.n))


@dataclass(frozen=True)
class SteadySolution:
    """Closed-form locked state.

    Attributes
    ----------
    field : JonesField
        Locked output field.
    xi : float
        Population offset ``N - 1`` of the first-order solution (negative).
    beta : complex
        Convergence rate in 1/s; ``Re(beta) > 0``.
    theta : float
        Output phase offset ``-Arg(1 + i alpha)``.
    """

    field: JonesField
    xi: float
    beta: complex
    theta: float


@dataclass(frozen=True)
class InjectionSchedule:
    """Piecewise-constant injection.

    Parameters
    ----------
    times : sequence of float
        Segment start times in seconds; must start at 0 and increase.
    fields : sequence of JonesField
        Normalized injection during each segment.
    """

    times: tuple
    fields: tuple

    def __init__(self, times: Sequence[float], fields: Sequence[JonesField]):
        times = tuple(float(t) for t in times)
        fields = tuple(f if isinstance(f, JonesField) else JonesField(f) for f in fields)
        if len(times) != len(fields) or not times:
            raise UsageError("schedule needs matching, nonempty times and fields")
        if times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise UsageError("schedule times must start at 0 and strictly increase")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "fields", fields)

    def at(self, t: float) -> JonesField:
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.fields[max(idx, 0)]


Injection = Union[JonesField, InjectionSchedule, Callable[[float], JonesField]]


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the rate equations.

    ``t`` is in seconds unless the trajectory was produced in dimensionless
    mode, in which case it is ``tau = gamma_c t``.
    """

    t: np.ndarray
    E_x: np.ndarray
    E_y: np.ndarray
    N: np.ndarray
    n: np.ndarray
    dimensionless: bool = False

    def __len__(self) -> int:
        return len(self.t)

    @property
    def final(self) -> LaserState:
        return LaserState(self.E_x[-1], self.E_y[-1], self.N[-1], self.n[-1])

    def state(self, i: int) -> LaserState:
        return LaserState(self.E_x[i], self.E_y[i], self.N[i], self.n[i])

    @property
    def magnitude(self) -> np.ndarray:
        return np.sqrt(np.abs(self.E_x) ** 2 + np.abs(self.E_y) ** 2)


def derivatives(state: LaserState, params: LaserParams, injection: JonesField) -> LaserState:
    """Right-hand side of the rate equations in physical units (1/s).

    The injection is normalized: the field equations receive
    ``gamma_c * injection``.
    """
    g = params.gamma / params.gamma_c
    gs = params.gamma_s / params.gamma_c
    dex, dey, dN, dn = _kernel.rhs(state.E_x, state.E_y, state.N, state.n, params.mu,
                                   params.alpha, g, gs, injection.v, injection.h)
    gc = params.gamma_c
    return LaserState(gc * dex, gc * dey, gc * dN, gc * dn)


def _check_dt(dt_tau: float):
    if not (0 < dt_tau <= MAX_DT * (1 + 1e-12)):
        raise UsageError(f"step must satisfy 0 < dt <= {MAX_DT}/gamma_c, got {dt_tau}/gamma_c")


def integrate(state: LaserState, params: LaserParams, injection: Injection,
              t_end: float, dt: float | None = None, *, sample_every: int = 1,
              dimensionless: bool = False) -> Trajectory:
    """Integrate the rate equations with fixed-step fourth-order Runge-Kutta.

    Parameters
    ----------
    state : LaserState
        Initial state.
    params : LaserParams
    injection : JonesField, InjectionSchedule or callable
        Normalized injection; a callable receives the time (same units as
        ``t_end``) and returns a :class:`JonesField`.
    t_end : float
        Final time (seconds, or ``tau`` units when ``dimensionless``).
    dt : float, optional
        Step; defaults to ``0.005/gamma_c``.  Must not exceed ``0.01/gamma_c``.
    sample_every : int
        Store one sample every this many steps (the final state is always
        stored).
    dimensionless : bool
        Interpret ``t_end``, ``dt``, schedule times and the returned time axis
        in units of ``1/gamma_c``.

    Raises
    ------
    DivergenceError
        If the state becomes non-finite.
    """
    gc = params.gamma_c
    scale = 1.0 if dimensionless else gc
    h = DEFAULT_DT if dt is None else dt * scale
    _check_dt(h)
    if t_end < 0:
        raise UsageError("t_end must be nonnegative")
    if sample_every < 1:
        raise UsageError("sample_every must be >= 1")
    tau_end = t_end * scale
    steps = int(round(tau_end / h))
    g = params.gamma / gc
    gs = params.gamma_s / gc
    n_samples = steps // sample_every + 1 + (1 if steps % sample_every else 0)
    out_ex = np.empty(n_samples, complex)
    out_ey = np.empty(n_samples, complex)
    out_N = np.empty(n_samples)
    out_n = np.empty(n_samples)
    idx = np.minimum(np.arange(n_samples) * sample_every, steps)

    if callable(injection) and not isinstance(injection, (JonesField, InjectionSchedule)):
        fail = _integrate_callable(state, params, injection, h, steps, sample_every, scale,
                                   out_ex, out_ey, out_N, out_n)
    else:
        if isinstance(injection, InjectionSchedule):
            st = np.array(injection.times) * scale
            su = np.array([[f.v, f.h] for f in injection.fields], dtype=complex)
        else:
            st = np.zeros(1)
            su = np.array([[injection.v, injection.h]], dtype=complex)
        fail = _kernel.integrate_schedule(state.E_x, state.E_y, state.N, state.n, params.mu,
                                          params.alpha, g, gs, st, su, h, steps, sample_every,
                                          out_ex, out_ey, out_N, out_n)
    if fail >= 0:
        t_fail = fail * h / scale
        raise DivergenceError(f"non-finite laser state at t = {t_fail:.6g}"
                              f"{' (tau units)' if dimensionless else ' s'}", t_fail)
    return Trajectory(idx * h / scale, out_ex, out_ey, out_N, out_n, dimensionless)


def _integrate_callable(state, params, fn, h, steps, every, scale, out_ex, out_ey, out_N, out_n):
    g = params.gamma / params.gamma_c
    gs = params.gamma_s / params.gamma_c
    ex, ey, N, n = state.E_x, state.E_y, state.N, state.n
    out_ex[0], out_ey[0], out_N[0], out_n[0] = ex, ey, N, n
    k = 1
    for i in range(steps):
        t = i * h
        u0, um, u1 = fn(t / scale), fn((t + 0.5 * h) / scale), fn((t + h) / scale)
        ex, ey, N, n = _kernel.rk4_step(ex, ey, N, n, params.mu, params.alpha, g, gs,
                                        u0.v, u0.h, um.v, um.h, u1.v, u1.h, h)
        if (i + 1) % every == 0 or i + 1 == steps:
            if not LaserState(ex, ey, N, n).is_finite():
                return i + 1
            out_ex[k], out_ey[k], out_N[k], out_n[k] = ex, ey, N, n
            k += 1
    return -1


def settle(state: LaserState, params: LaserParams, injection: Injection, t_end: float,
           dt: float | None = None, *, dimensionless: bool = False) -> LaserState:
    """Integrate and return only the final state."""
    scale = 1.0 if dimensionless else params.gamma_c
    h = DEFAULT_DT if dt is None else dt * scale
    steps = max(1, int(round(t_end * scale / h)))
    return integrate(state, params, injection, t_end, dt, sample_every=steps,
                     dimensionless=dimensionless).final


def lock(injection: JonesField, params: LaserParams, *, settle_factor: float = 100.0,
         t_settle: float | None = None, initial: LaserState | None = None,
         dt: float | None = None) -> LaserState:
    """Run a laser under constant injection until it has locked.

    The default initial condition is the free-running state in quadrature
    (phase offset ``pi/2``) with the injected polarization.  For ``alpha = 0``
    the real axis is invariant, so a start exactly anti-phase to the
    injection would stay at the unstable fixed point; quadrature avoids it.

    Parameters
    ----------
    settle_factor : float
        Settling time in units of ``1/Re(beta)`` when ``t_settle`` is omitted.
    t_settle : float, optional
        Explicit settling time in seconds.
    """
    if injection.power == 0:
        raise NoLockingError("zero injection: the slave laser has no locked state")
    if t_settle is None:
        t_settle = settle_factor / convergence_rate(injection, params).real
    if initial is None:
        ref = injection.v if abs(injection.v) >= abs(injection.h) else injection.h
        initial = LaserState.free_running(params, float(np.angle(ref)) + math.pi / 2, injection)
    return settle(initial, params, injection, t_settle, dt)


def _check_injection(injection: JonesField) -> float:
    p = injection.norm
    if p == 0:
        raise NoLockingError("zero injection: the slave laser has no locked state")
    return p


def steady_state_field(injection: JonesField, params: LaserParams, *,
                       warn: bool = True) -> SteadySolution:
    """First-order locked state (amplified normalization).

    Warns with :class:`WeakCouplingWarning` when ``|u| > 0.1*sqrt(mu-1)``.

    Examples
    --------
    >>> s = steady_state_field(JonesField(2.0), LaserParams(mu=2.0), warn=False)
    >>> round(s.field.v.real, 12), s.theta
    (1.0, -0.0)
    """
    p = _check_injection(injection)
    amp = params.amplitude
    if warn and p > 0.1 * amp:
        warnings.warn(f"injection |u| = {p:.3g} exceeds 0.1*sqrt(mu-1); the first-order "
                      "steady state is inaccurate", WeakCouplingWarning, stacklevel=2)
    theta = params.theta
    out = injection * (amp / p * complex(math.cos(theta), math.sin(theta)))
    xi = -p / (math.sqrt(1.0 + params.alpha**2) * amp)
    beta = -(1 + 1j * params.alpha) * params.gamma_c * xi
    return SteadySolution(out, xi, complex(beta), theta)


def steady_state_exact(injection: JonesField, params: LaserParams) -> SteadySolution:
    """Exact locked state for zero detuning from the steady-state cubic.

    With ``xi = N - 1`` and ``q = |u|^2/(1+alpha^2)`` the fixed point satisfies
    ``xi^3 + (1-mu) xi^2 + q xi + q = 0``; the locked branch is the unique
    negative root and ``E = -u / ((1 + i alpha) xi)``.  The reported ``beta``
    uses the same formula as the first-order solution evaluated at this root.
    """
    p = _check_injection(injection)
    q = p * p / (1.0 + params.alpha**2)
    roots = np.roots([1.0, 1.0 - params.mu, q, q])
    real = roots[np.abs(roots.imag) <= 1e-9 * max(1.0, np.abs(roots).max())].real
    xi = float(real[real < 0].max())
    e = injection * (-1.0 / ((1 + 1j * params.alpha) * xi))
    beta = -(1 + 1j * params.alpha) * params.gamma_c * xi
    return SteadySolution(e, xi, complex(beta), params.theta)


def convergence_rate(injection: JonesField, params: LaserParams) -> complex:
    """Locking rate ``beta = -(1 + i alpha) gamma_c xi`` in 1/s (``Re > 0``)."""
    return steady_state_field(injection, params, warn=False).beta


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write ``t, Re E_x, Im E_x, Re E_y, Im E_y, N, n`` with full precision."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "re_Ex", "im_Ex", "re_Ey", "im_Ey", "N", "n"])
        for row in zip(traj.t, traj.E_x.real, traj.E_x.imag, traj.E_y.real, traj.E_y.imag,
                       traj.N, traj.n):
            w.writerow([repr(float(x)) for x in row])
