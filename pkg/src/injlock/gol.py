"""All-optical Conway's Game of Life.

Each cell holds two slave lasers.  The fields of the eight neighbors (each
``x1 = sqrt(2/9)`` when alive, 0 when dead) are combined by an 8x2 coupler,
giving ``s = n * x1 / 4`` on each arm.  The cell's own feedback ``e`` and two
shared-bias taps ``-2.5 x1`` and ``-3.5 x1`` pass -12 dB attenuators
(field factor 0.2512).  In units of ``x1``:

* upper laser (3x1 combiner) is injected with ``n/4 + 0.2512 e - 0.628``
  and emits ``E_a = +1`` iff that is positive;
* lower laser (2x1 combiner) is injected with ``n/4 - 0.879``; its output is
  phase-shifted by pi, so ``E_b = +1`` iff ``n <= 3``.

A 2x9 splitter sends ``(E_a + E_b)/sqrt(18)`` on each of nine paths (eight
neighbors and the feedback), so a living cell carries ``x1`` on every path
and total output power 2.

Three evaluation modes are offered: ``formula`` (the piecewise rules),
``ideal`` (optical field propagation through the cell network with
closed-form laser normalization) and ``dynamical`` (the same network with
rate-equation lasers settled for 2 ns).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ShapeError, UsageError
from .field_math import JonesField
from .laser import LaserParams
from .network import Edge, NetworkSpec, Node, eval_dag

__all__ = [
    "X1",
    "ATTENUATION_DB",
    "CellState",
    "Grid",
    "DivergenceReport",
    "cell_spec",
    "cell_update",
    "step_grid",
    "run_generations",
    "boolean_oracle_step",
    "read_grid",
    "write_grid",
    "pulsar",
    "load_pattern",
    "MODES",
]

#: Field on one output path of a living cell.
X1 = math.sqrt(2.0 / 9.0)
ATTENUATION_DB = 12.0
ALIVE_THRESHOLD = 1.0
#: Coupling from the cell's optical field to the normalized laser injection.
CELL_INJECTION_SCALE = 0.2
#: Settling time per generation (seconds).
CELL_SETTLE_TIME = 2e-9
MODES = ("formula", "ideal", "dynamical")


@dataclass(frozen=True)
class CellState:
    """Output of one cell.

    Attributes
    ----------
    field : complex
        ``E_a + E_b`` before the 2x9 splitter.
    e_a, e_b : complex
        Upper-laser field and phase-shifted lower-laser field.
    alive : bool
        ``|field|**2 / 2 >= 1`` (total output power is 0 or 2).
    """

    field: complex
    e_a: complex
    e_b: complex
    alive: bool

    @property
    def power(self) -> float:
        return abs(self.field) ** 2 / 2.0


@lru_cache(maxsize=8)
def cell_spec(params: LaserParams = LaserParams(), bias: complex = X1,
              injection_scale: float = CELL_INJECTION_SCALE,
              settle_time: float = CELL_SETTLE_TIME) -> NetworkSpec:
    """Optical network of one cell.

    Inputs ``n0..n7`` are the neighbor paths and ``fb`` the cell's own
    feedback path; outputs ``o0..o8`` are the nine splitter paths.  Internal
    lasers are ``La`` (upper) and ``Lb`` (lower), the pi shifter is ``PH``.
    """
    lp = {**params.as_dict(), "injection_scale": injection_scale, "settle_time": settle_time}
    nodes = [
        Node("C82", "coupler", {"m": 8, "n": 2}),
        Node("Bup", "bias", {"v": -2.5 * complex(bias)}),
        Node("Blo", "bias", {"v": -3.5 * complex(bias)}),
        Node("Afb", "attenuator", {"db": ATTENUATION_DB}),
        Node("Aup", "attenuator", {"db": ATTENUATION_DB}),
        Node("Alo", "attenuator", {"db": ATTENUATION_DB}),
        Node("C31", "coupler", {"m": 3, "n": 1}),
        Node("C21", "coupler", {"m": 2, "n": 1}),
        Node("La", "laser", dict(lp)),
        Node("Lb", "laser", dict(lp)),
        Node("PH", "phase", {"angle": math.pi}),
        Node("C29", "coupler", {"m": 2, "n": 9}),
    ]
    edges = [Edge(f"n{i}", "C82", dst_port=i) for i in range(8)]
    edges += [
        Edge("fb", "Afb"), Edge("Bup", "Aup"), Edge("Blo", "Alo"),
        Edge("C82", "C31", src_port=0, dst_port=0), Edge("Afb", "C31", dst_port=1),
        Edge("Aup", "C31", dst_port=2),
        Edge("C82", "C21", src_port=1, dst_port=0), Edge("Alo", "C21", dst_port=1),
        Edge("C31", "La"), Edge("C21", "Lb"), Edge("Lb", "PH"),
        Edge("La", "C29", dst_port=0), Edge("PH", "C29", dst_port=1),
    ]
    edges += [Edge("C29", f"o{i}", src_port=i) for i in range(9)]
    return NetworkSpec(nodes, edges, [f"n{i}" for i in range(8)] + ["fb"],
                       [f"o{i}" for i in range(9)])


def _formula(alive_prev: bool, n: int) -> tuple[int, int]:
    e_a = -1 if (n <= 2 and not alive_prev) or (n <= 1 and alive_prev) else 1
    e_b = 1 if n <= 3 else -1
    return e_a, e_b


def _state(e_a: complex, e_b: complex) -> CellState:
    f = complex(e_a) + complex(e_b)
    return CellState(f, complex(e_a), complex(e_b), abs(f) ** 2 / 2.0 >= ALIVE_THRESHOLD)


def _optical_cell(neighbors: Sequence[complex], feedback: complex, mode: str,
                  params: LaserParams) -> CellState:
    trace: dict = {}
    eval_dag(cell_spec(params), [JonesField(z) for z in neighbors] + [JonesField(feedback)],
             mode=mode, trace=trace)
    return _state(trace["La"][0].v, trace["PH"][0].v)


def cell_update(alive_prev: bool, n: int, mode: str = "formula",
                params: LaserParams | None = None) -> CellState:
    """New state of a cell from its previous state and living-neighbor count.

    Examples
    --------
    >>> cell_update(True, 2).alive, cell_update(False, 3).alive, cell_update(True, 4).alive
    (True, True, False)
    """
    if not (isinstance(n, (int, np.integer)) and 0 <= n <= 8):
        raise UsageError(f"neighbor count must be an integer in 0..8, got {n!r}")
    if mode == "formula":
        return _state(*_formula(bool(alive_prev), int(n)))
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    neighbors = [X1] * int(n) + [0.0] * (8 - int(n))
    return _optical_cell(neighbors, X1 if alive_prev else 0.0, mode, params or LaserParams())


@dataclass(frozen=True, eq=False)
class Grid:
    """Cell grid with dead boundary.

    Attributes
    ----------
    alive : ndarray of bool, shape (height, width)
    fields : ndarray of complex
        Each cell's output field ``E_a + E_b`` (2 for living, 0 for dead
        cells in the ideal picture).
    bias : complex
        Shared coherent reference ``x1``.
    """

    alive: np.ndarray
    fields: np.ndarray
    bias: complex = X1

    def __post_init__(self):
        alive = np.asarray(self.alive, dtype=bool)
        if alive.ndim != 2 or min(alive.shape) < 1:
            raise ShapeError("grid must be a nonempty 2-D array")
        fields = np.asarray(self.fields, dtype=complex)
        if fields.shape != alive.shape:
            raise ShapeError("fields and alive arrays differ in shape")
        object.__setattr__(self, "alive", alive)
        object.__setattr__(self, "fields", fields)

    @classmethod
    def from_bits(cls, bits, bias: complex = X1) -> "Grid":
        bits = np.asarray(bits, dtype=bool)
        return cls(bits, np.where(bits, 2.0 + 0j, 0j), bias)

    @property
    def width(self) -> int:
        return self.alive.shape[1]

    @property
    def height(self) -> int:
        return self.alive.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Grid):
            return NotImplemented
        return bool(np.array_equal(self.alive, other.alive))

    __hash__ = None


def _neighbor_sum(a: np.ndarray) -> np.ndarray:
    p = np.pad(a, 1)
    h, w = a.shape
    return sum(p[1 + di:1 + di + h, 1 + dj:1 + dj + w]
               for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0))


def step_grid(g: Grid, mode: str = "formula", params: LaserParams | None = None) -> Grid:
    """Advance every cell synchronously by one generation."""
    if mode == "formula":
        n = _neighbor_sum(g.alive.astype(int))
        dead_a = np.where(g.alive, n <= 1, n <= 2)
        e_a = np.where(dead_a, -1.0, 1.0)
        e_b = np.where(n <= 3, 1.0, -1.0)
        f = (e_a + e_b).astype(complex)
        return Grid(np.abs(f) ** 2 / 2 >= ALIVE_THRESHOLD, f, g.bias)
    if mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    params = params or LaserParams()
    # every splitter path carries the cell field / sqrt(18)
    path = np.pad(g.fields / math.sqrt(18.0), 1)
    h, w = g.alive.shape
    new_f = np.zeros_like(g.fields)
    offsets = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0)]
    for i in range(h):
        for j in range(w):
            nb = [path[1 + i + di, 1 + j + dj] for di, dj in offsets]
            new_f[i, j] = _optical_cell(nb, path[1 + i, 1 + j], mode, params).field
    return Grid(np.abs(new_f) ** 2 / 2 >= ALIVE_THRESHOLD, new_f, g.bias)


def boolean_oracle_step(bits) -> np.ndarray:
    """Reference Conway update with dead boundary (direct rule application)."""
    b = np.asarray(bits, dtype=bool)
    h, w = b.shape
    out = np.zeros_like(b)
    for i in range(h):
        for j in range(w):
            count = 0
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    if (di or dj) and 0 <= i + di < h and 0 <= j + dj < w and b[i + di, j + dj]:
                        count += 1
            out[i, j] = count in (2, 3) if b[i, j] else count == 3
    return out


@dataclass
class DivergenceReport:
    """Comparison of an evolution against the Boolean oracle."""

    generations: int
    mode: str
    divergent_generations: int = 0
    divergent_cells: int = 0
    first_divergence: dict | None = None

    @property
    def ok(self) -> bool:
        return self.divergent_cells == 0

    def to_json(self) -> str:
        return json.dumps({"generations": self.generations, "mode": self.mode,
                           "divergent_generations": self.divergent_generations,
                           "divergent_cells": self.divergent_cells,
                           "first_divergence": self.first_divergence}, indent=2) + "\n"


def run_generations(g: Grid, count: int, mode: str = "formula",
                    params: LaserParams | None = None) -> tuple[list[Grid], DivergenceReport]:
    """Evolve ``count`` generations and compare each with the Boolean oracle.

    Returns the ``count + 1`` grids (initial included) and a report naming
    the first divergent cell, if any.
    """
    if count < 1:
        raise UsageError("count must be at least 1")
    grids = [g]
    ref = g.alive.copy()
    rep = DivergenceReport(count, mode)
    for gen in range(1, count + 1):
        grids.append(step_grid(grids[-1], mode, params))
        ref = boolean_oracle_step(ref)
        diff = np.argwhere(grids[-1].alive != ref)
        if len(diff):
            rep.divergent_generations += 1
            rep.divergent_cells += len(diff)
            if rep.first_divergence is None:
                rep.first_divergence = {"generation": gen, "row": int(diff[0][0]),
                                        "col": int(diff[0][1])}
    return grids, rep


def read_grid(text: str) -> Grid:
    """Parse ``#``/``.`` rows (blank lines and ``!`` comments ignored)."""
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [r for r in rows if r and not r.startswith("!")]
    if not rows:
        raise UsageError("empty grid file")
    if len({len(r) for r in rows}) != 1:
        raise ShapeError("grid rows have different lengths")
    bad = set("".join(rows)) - {"#", "."}
    if bad:
        raise UsageError(f"unexpected grid characters: {''.join(sorted(bad))}")
    return Grid.from_bits([[c == "#" for c in r] for r in rows])


def write_grid(g: Grid) -> str:
    return "".join("".join("#" if c else "." for c in row) + "\n" for row in g.alive)


def pulsar() -> Grid:
    """The shipped 17x17 period-3 oscillator."""
    return read_grid(resources.files("injlock.data").joinpath("pulsar.txt").read_text())


def load_pattern(path: str | Path) -> Grid:
    """Read a grid file; a bare name of a shipped pattern (``pulsar.txt``) also works."""
    p = Path(path)
    if not p.exists() and p.parent == Path("."):
        shipped = resources.files("injlock.data").joinpath(p.name)
        if p.suffix == ".txt" and shipped.is_file():
            return read_grid(shipped.read_text())
    return read_grid(p.read_text())
