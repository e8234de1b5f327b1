"""Complex field arithmetic: Jones vectors, the sign operators and passive optics.

All field quantities are dimensionless amplitudes; optical power is
``|field|**2``.  A :class:`JonesField` carries the vertical (``v``) and
horizontal (``h``) polarization components.  In the laser rate equations the
x-polarized amplitude maps to ``v`` and the y-polarized amplitude to ``h``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError, UndefinedInputError, UsageError

__all__ = [
    "JonesField",
    "PassiveElement",
    "sign",
    "sign_a",
    "normalize",
    "coupler",
    "attenuator",
    "phase_shifter",
    "bias_source",
    "apply_passive",
    "combine_inputs",
    "db_to_field",
    "complex_to_pair",
    "pair_to_complex",
]


@dataclass(frozen=True)
class JonesField:
    """Two-component complex field amplitude.

    Parameters
    ----------
    v : complex
        Vertical polarization amplitude.
    h : complex
        Horizontal polarization amplitude.
    """

    v: complex = 0j
    h: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "v", complex(self.v))
        object.__setattr__(self, "h", complex(self.h))

    @property
    def power(self) -> float:
        """Total optical power ``|v|^2 + |h|^2``."""
        return abs(self.v) ** 2 + abs(self.h) ** 2

    @property
    def norm(self) -> float:
        """Euclidean norm ``sqrt(power)``."""
        return math.hypot(abs(self.v), abs(self.h))

    def rotate(self, theta: float) -> "JonesField":
        """Apply a global phase ``exp(i*theta)`` to both components."""
        ph = cmath.exp(1j * theta)
        return JonesField(self.v * ph, self.h * ph)

    def as_array(self) -> np.ndarray:
        return np.array([self.v, self.h], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "JonesField":
        arr = np.asarray(arr, dtype=complex).ravel()
        if arr.shape != (2,):
            raise ShapeError(f"a Jones vector has 2 components, got {arr.shape[0]}")
        return cls(arr[0], arr[1])

    @classmethod
    def vertical(cls, amplitude: complex) -> "JonesField":
        return cls(amplitude, 0j)

    def __add__(self, other: "JonesField") -> "JonesField":
        if not isinstance(other, JonesField):
            return NotImplemented
        return JonesField(self.v + other.v, self.h + other.h)

    def __sub__(self, other: "JonesField") -> "JonesField":
        if not isinstance(other, JonesField):
            return NotImplemented
        return JonesField(self.v - other.v, self.h - other.h)

    def __mul__(self, scalar) -> "JonesField":
        if isinstance(scalar, JonesField):
            return NotImplemented
        s = complex(scalar)
        return JonesField(self.v * s, self.h * s)

    __rmul__ = __mul__

    def __neg__(self) -> "JonesField":
        return JonesField(-self.v, -self.h)


def sign(z):
    """Complex sign ``z/|z|``.

    Parameters
    ----------
    z : complex or array_like
        Input value(s).

    Returns
    -------
    complex or ndarray
        Unit-magnitude value(s) with the phase of ``z``.

    Raises
    ------
    UndefinedInputError
        If any input is exactly zero; the operator has no value there.
    """
    return sign_a(z, 0.0)


def sign_a(z, a: float = 0.0):
    """Smoothed complex sign ``z / sqrt(|z|^2 + a^2)``.

    For ``a > 0`` the map is total and ``|sign_a(z, a)| < 1``; for ``a = 0``
    it reduces to :func:`sign` and zero inputs are rejected.

    Examples
    --------
    >>> sign_a(1, 1.0)
    (0.7071067811865475+0j)
    >>> abs(sign_a(3 + 4j, 0.0) - (0.6 + 0.8j)) < 1e-15
    True
    """
    if a < 0 or not math.isfinite(a):
        raise UsageError(f"smoothing a must be a finite nonnegative number, got {a}")
    scalar = np.isscalar(z)
    arr = np.asarray(z, dtype=complex)
    mag2 = arr.real**2 + arr.imag**2
    if a == 0.0 and np.any(mag2 == 0.0):
        raise UndefinedInputError("sign(0) is undefined; use sign_a with a > 0")
    out = arr / np.sqrt(mag2 + a * a)
    if scalar:
        return complex(out)
    return out


def normalize(f: JonesField, a: float = 0.0) -> JonesField:
    """Jones-vector normalization ``f / sqrt(||f||^2 + a^2)``."""
    if a < 0:
        raise UsageError("smoothing a must be nonnegative")
    p = f.power
    if a == 0.0 and p == 0.0:
        raise UndefinedInputError("cannot normalize a zero Jones vector")
    return f * (1.0 / math.sqrt(p + a * a))


def db_to_field(db: float) -> float:
    """Field factor of an attenuation given in dB (``10**(-db/20)``)."""
    return 10.0 ** (-db / 20.0)


@dataclass(frozen=True, eq=False)
class PassiveElement:
    """Linear optical element.

    Parameters
    ----------
    kind : {"coupler", "attenuator", "phase_shifter", "bias_source"}
    transfer : ndarray
        Complex matrix of shape ``(n_out, n_in)``.  A bias source has
        ``n_in = 0``.
    bias : JonesField, optional
        Field emitted by a bias source.
    """

    kind: str
    transfer: np.ndarray
    bias: JonesField = field(default_factory=JonesField)
    label: str = ""

    @property
    def n_in(self) -> int:
        return self.transfer.shape[1]

    @property
    def n_out(self) -> int:
        return self.transfer.shape[0]

    @property
    def lossless(self) -> bool:
        """True when the transfer is an isometry (``T^H T = I``)."""
        if self.kind == "bias_source":
            return False
        t = self.transfer
        return bool(np.allclose(t.conj().T @ t, np.eye(self.n_in), atol=1e-14))

    def __eq__(self, other):
        if not isinstance(other, PassiveElement):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.transfer.shape == other.transfer.shape
            and bool(np.array_equal(self.transfer, other.transfer))
            and self.bias == other.bias
        )

    __hash__ = None


def coupler(m: int, n: int) -> PassiveElement:
    """Even ``m``-input, ``n``-output coupler.

    Every output carries ``(sum of inputs)/sqrt(m*n)``.  A ``1 -> n`` splitter
    is an isometry; an ``m -> 1`` combiner keeps the in-phase port, so power is
    conserved exactly when the inputs are equal and in phase.  This reproduces
    the power levels of the cell design: an ``8 x 2`` coupler gives each arm
    ``sum/4`` and a ``2 x 9`` splitter puts ``|E_a + E_b|**2 / 18`` on each path.
    """
    if m < 1 or n < 1:
        raise ShapeError(f"coupler needs at least one input and output, got {m}x{n}")
    t = np.full((n, m), 1.0 / math.sqrt(m * n), dtype=complex)
    return PassiveElement("coupler", t, label=f"{m}x{n}")


def attenuator(db: float) -> PassiveElement:
    """Attenuator with loss ``db`` (field factor ``10**(-db/20)``)."""
    return PassiveElement("attenuator", np.array([[db_to_field(db)]], dtype=complex), label=f"{db} dB")


def phase_shifter(angle: float) -> PassiveElement:
    """Phase shifter multiplying the field by ``exp(i*angle)``."""
    return PassiveElement("phase_shifter", np.array([[cmath.exp(1j * angle)]], dtype=complex), label=f"{angle} rad")


def bias_source(f: JonesField | complex) -> PassiveElement:
    """Constant coherent source emitting ``f`` (a complex value is vertical)."""
    if not isinstance(f, JonesField):
        f = JonesField(f, 0j)
    return PassiveElement("bias_source", np.zeros((1, 0), dtype=complex), bias=f)


def apply_passive(el: PassiveElement, inputs: Sequence[JonesField]) -> list[JonesField]:
    """Propagate fields through a passive element.

    The transfer matrix acts on each polarization component independently.

    Raises
    ------
    ShapeError
        If ``len(inputs)`` differs from the element's input arity.
    """
    if len(inputs) != el.n_in:
        raise ShapeError(f"{el.kind} {el.label} expects {el.n_in} inputs, got {len(inputs)}")
    if el.kind == "bias_source":
        return [el.bias]
    vin = np.array([[f.v, f.h] for f in inputs], dtype=complex).reshape(el.n_in, 2)
    vout = el.transfer @ vin
    return [JonesField(row[0], row[1]) for row in vout]


def combine_inputs(fields: Iterable[JonesField]) -> JonesField:
    """Coherent sum of injected fields (empty sum is the zero field)."""
    total = JonesField()
    for f in fields:
        total = total + f
    return total


def complex_to_pair(z: complex) -> list[float]:
    """Encode a complex number as ``[re, im]`` for JSON documents."""
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(p) -> complex:
    """Decode ``[re, im]`` (or a bare real number) into a complex value."""
    if isinstance(p, (int, float)) and not isinstance(p, bool):
        return complex(p)
    if isinstance(p, (list, tuple)) and len(p) == 2 and all(isinstance(x, (int, float)) for x in p):
        return complex(p[0], p[1])
    raise UsageError(f"expected a complex [re, im] pair, got {p!r}")
