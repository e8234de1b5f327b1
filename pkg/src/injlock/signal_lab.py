"""Desk-scale reproduction of the gate experiment's signal chain.

Three bit streams ``A``, ``B``, ``X`` are summed coherently into a four-level
phase/amplitude signal (fields -3, -1, +1, +3).  The extinction ratio (ER) of
the two magnitude levels is swept, the signal is optionally passed through a
slave laser that quenches the amplitude modulation, and the result is read by
a one-bit delay-line interferometer (DLI)::

    I_k = |z_k + z_{k-1}|**2 / 4

Without quenching, unequal magnitudes make the interference intensities of
same-phase and opposite-phase pairs overlap (at ER = 9.54 dB the pair
(+3, -1) and the pair (+1, +1) both give intensity 1), so no threshold
recovers the XNOR of consecutive phase bits.  After quenching every symbol
has the same magnitude and the two classes are perfectly separated.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError, UndefinedInputError, UsageError
from .field_math import JonesField
from .laser import InjectionSchedule, LaserParams, LaserState, integrate

__all__ = [
    "SymbolStream",
    "ErSweepPoint",
    "generate_bits",
    "encode_three_input",
    "extinction_ratio_db",
    "scale_to_er",
    "quench",
    "dli_intensities",
    "dli_demodulate",
    "expected_dli_bits",
    "best_threshold",
    "count_errors",
    "er_sweep",
    "sweep_csv",
    "stream_csv",
    "DEFAULT_ER_GRID",
]

DEFAULT_ER_GRID = (0.0, 2.0, 4.0, 6.0, 8.0, 10 * math.log10(9.0))
#: Relative tolerance used to merge numerically equal intensity levels.
LEVEL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SymbolStream:
    """One complex field per bit slot.

    Parameters
    ----------
    symbols : array_like of complex
    symbol_duration : float
        Slot length in seconds (1 ns for 1 Gbit/s).
    """

    symbols: np.ndarray
    symbol_duration: float = 1e-9

    def __post_init__(self):
        s = np.asarray(self.symbols, dtype=complex).reshape(-1)
        if s.size == 0:
            raise UsageError("a symbol stream must not be empty")
        if not np.all(np.isfinite(s)):
            raise UsageError("symbol stream contains non-finite values")
        if self.symbol_duration <= 0:
            raise UsageError("symbol_duration must be positive")
        object.__setattr__(self, "symbols", s)

    def __len__(self) -> int:
        return self.symbols.size

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.symbols) ** 2

    @property
    def phase(self) -> np.ndarray:
        return np.angle(self.symbols)


@dataclass(frozen=True)
class ErSweepPoint:
    er_db: float
    errors_without_laser: int
    errors_with_laser: int
    total_bits: int
    best_threshold: float


def generate_bits(length: int, seed: int) -> np.ndarray:
    """Reproducible pseudo-random bits from numpy's PCG64 ``default_rng(seed)``."""
    if length < 1:
        raise UsageError("length must be >= 1")
    return np.random.default_rng(seed).integers(0, 2, size=int(length), dtype=np.uint8)


def encode_three_input(A, B, X, symbol_duration: float = 1e-9) -> SymbolStream:
    """Coherent sum ``(2A-1) + (2B-1) + (2X-1)`` per slot."""
    A, B, X = (np.asarray(v, dtype=int).reshape(-1) for v in (A, B, X))
    if not (A.size == B.size == X.size):
        raise ShapeError(f"bit sources differ in length: {A.size}, {B.size}, {X.size}")
    return SymbolStream((2 * A - 1) + (2 * B - 1) + (2 * X - 1), symbol_duration)


def _levels(values: np.ndarray) -> np.ndarray:
    """Distinct values after merging those equal within ``LEVEL_RTOL``."""
    v = np.sort(np.asarray(values, dtype=float))
    scale = max(float(np.max(np.abs(v))), 1e-300) if v.size else 1.0
    out = [v[0]]
    for x in v[1:]:
        if x - out[-1] > LEVEL_RTOL * scale:
            out.append(x)
    return np.array(out)


def extinction_ratio_db(stream: SymbolStream) -> float:
    """``10 log10(P_high / P_low)`` of a stream with two magnitude levels."""
    lv = _levels(stream.power)
    if lv.size == 1:
        return 0.0
    if lv.size != 2:
        raise UsageError(f"stream has {lv.size} power levels; expected two")
    if lv[0] == 0:
        return math.inf
    return 10 * math.log10(lv[1] / lv[0])


def scale_to_er(stream: SymbolStream, er_db: float) -> SymbolStream:
    """Rescale the low level so the stream has the requested ER.

    Phases and the high level are preserved.

    Raises
    ------
    UsageError
        If the stream does not have exactly two magnitude levels.
    """
    if er_db < 0:
        raise UsageError("er_db must be nonnegative")
    lv = _levels(stream.power)
    if lv.size == 1 and er_db == 0:
        return stream
    if lv.size != 2:
        raise UsageError(f"scale_to_er needs exactly two magnitude levels, found {lv.size}")
    hi = math.sqrt(lv[1])
    lo_new = hi * 10 ** (-er_db / 20)
    mag = np.abs(stream.symbols)
    is_hi = np.abs(mag**2 - lv[1]) <= LEVEL_RTOL * lv[1]
    new_mag = np.where(is_hi, hi, lo_new)
    return SymbolStream(new_mag * np.exp(1j * np.angle(stream.symbols)), stream.symbol_duration)


def quench(stream: SymbolStream, params: LaserParams | None = None, mode: str = "ideal", *,
           injection_scale: float = 0.002, dt: float | None = None) -> SymbolStream:
    """Pass the stream through a slave laser.

    Parameters
    ----------
    mode : {"ideal", "dynamical"}
        ``ideal`` maps each symbol ``z`` to ``sign(z) sqrt(mu-1) e^{i theta}``.
        ``dynamical`` integrates the rate equations with the stream as a
        piecewise-constant injection (``injection_scale * z``) and samples
        ``E_x`` at the end of each slot.
    injection_scale : float
        Coupling from symbol field to normalized injection (dynamical mode).
    """
    params = params or LaserParams()
    z = stream.symbols
    if mode == "ideal":
        if np.any(z == 0):
            raise UndefinedInputError("ideal quench of a zero-magnitude symbol is undefined")
        rot = params.amplitude * np.exp(1j * params.theta)
        return SymbolStream(z / np.abs(z) * rot, stream.symbol_duration)
    if mode != "dynamical":
        raise UsageError(f"mode must be 'ideal' or 'dynamical', got {mode!r}")
    T = stream.symbol_duration
    sched = InjectionSchedule([k * T for k in range(len(z))],
                              [JonesField(injection_scale * s) for s in z])
    h = (dt * params.gamma_c) if dt else 0.005
    steps_per_slot = int(round(T * params.gamma_c / h))
    if abs(steps_per_slot * h - T * params.gamma_c) > 1e-9 * T * params.gamma_c:
        raise UsageError("symbol_duration must be a whole number of integration steps")
    ref = z[0] if z[0] != 0 else 1.0
    start = LaserState.free_running(params, float(np.angle(ref)) + math.pi / 2)
    traj = integrate(start, params, sched, len(z) * T, dt, sample_every=steps_per_slot)
    return SymbolStream(traj.E_x[1:], T)


def dli_intensities(stream: SymbolStream) -> np.ndarray:
    """Constructive-port DLI output ``|z_k + z_{k-1}|**2 / 4`` for k >= 1."""
    z = stream.symbols
    if z.size < 2:
        raise UsageError("DLI demodulation needs at least two symbols")
    return np.abs(z[1:] + z[:-1]) ** 2 / 4.0


def dli_demodulate(stream: SymbolStream, threshold: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """DLI bits and intensities.

    A bit is 1 when the intensity exceeds ``threshold``; the default is half
    the mean symbol power, the decision level of an equal-amplitude stream.

    Examples
    --------
    >>> bits, inten = dli_demodulate(SymbolStream([1, 1, -1]))
    >>> bits.tolist(), inten.tolist()
    ([1, 0], [1.0, 0.0])
    """
    inten = dli_intensities(stream)
    if threshold is None:
        threshold = 0.5 * float(np.mean(stream.power))
    return (inten > threshold).astype(np.uint8), inten


def expected_dli_bits(stream: SymbolStream) -> np.ndarray:
    """XNOR of consecutive phase bits (1 when neighbors share their phase)."""
    ph = (stream.symbols.real > 0).astype(int)
    return (ph[1:] == ph[:-1]).astype(np.uint8)


def count_errors(intensities: np.ndarray, expected: np.ndarray, threshold: float) -> int:
    return int(np.count_nonzero((intensities > threshold).astype(np.uint8) != expected))


def best_threshold(intensities, expected) -> tuple[float, int]:
    """Most favourable single threshold.

    Candidates are the midpoints between consecutive distinct intensity
    levels plus one point below and one above all levels.  Returns
    ``(threshold, errors)``; ties resolve to the lowest threshold.
    """
    inten = np.asarray(intensities, dtype=float)
    expected = np.asarray(expected, dtype=np.uint8)
    lv = _levels(inten)
    span = max(lv[-1] - lv[0], 1.0)
    cands = np.concatenate([[lv[0] - 0.5 * span], (lv[1:] + lv[:-1]) / 2, [lv[-1] + 0.5 * span]])
    best = None
    for thr in cands:
        err = count_errors(inten, expected, thr)
        if best is None or err < best[1]:
            best = (float(thr), err)
    return best


def er_sweep(A, B, X, er_values: Iterable[float] = DEFAULT_ER_GRID, params: LaserParams | None = None,
             quench_mode: str = "ideal", *, symbol_duration: float = 1e-9,
             **quench_kw) -> list[ErSweepPoint]:
    """Error counts with and without the quenching laser for each ER.

    ``best_threshold`` in the result is the optimal threshold of the
    unquenched signal.  ``quench_kw`` is passed on to :func:`quench`.
    """
    er_values = list(er_values)
    if not er_values:
        raise UsageError("ER range must be nonempty")
    base = encode_three_input(A, B, X, symbol_duration)
    expected = expected_dli_bits(base)
    out = []
    for er in er_values:
        s = scale_to_er(base, er)
        thr, e_without = best_threshold(dli_intensities(s), expected)
        q = quench(s, params, quench_mode, **quench_kw)
        _, e_with = best_threshold(dli_intensities(q), expected)
        out.append(ErSweepPoint(float(er), e_without, e_with, int(expected.size), thr))
    return out


def sweep_csv(points: Sequence[ErSweepPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["er_db", "errors_without", "errors_with", "total_bits", "best_threshold"])
    for p in points:
        w.writerow([repr(p.er_db), p.errors_without_laser, p.errors_with_laser, p.total_bits,
                    repr(p.best_threshold)])
    return buf.getvalue()


def stream_csv(stream: SymbolStream) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "re", "im", "power", "phase"])
    for k, z in enumerate(stream.symbols):
        w.writerow([k, repr(float(z.real)), repr(float(z.imag)), repr(float(abs(z) ** 2)),
                    repr(float(np.angle(z)))])
    return buf.getvalue()
