"""Phase-encoded logic: the programmable AND/OR gate, NOT and gate circuits.

A bit is carried by the phase of a unit-magnitude field: bit 1 is ``+1`` and
bit 0 is ``-1``.  One slave laser injected with the coherent sum of inputs
``A``, ``B`` and a program input ``X`` emits ``sign(E_A + E_B + E_X)``; with
``X = 0`` (field ``-1``) this is AND, with ``X = 1`` (field ``+1``) it is OR.
NOT is a phase shift of pi.
"""

from __future__ import annotations

import cmath
import csv
import io
import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence, Union

import graphlib

from .errors import SchemaError, TopologyError, UnassignedInputError, UsageError
from .field_math import JonesField, sign
from .network import NetworkSpec, eval_dag, laser_params_of, load_spec

__all__ = [
    "PhaseBit",
    "programmable_gate",
    "gate_output_field",
    "not_gate",
    "gate_spec",
    "GateNode",
    "GateCircuit",
    "eval_circuit",
    "boolean_eval",
    "circuit_from_dict",
    "nand_circuit",
    "xor_circuit",
    "programmed_circuit",
    "all_assignments",
    "truth_table",
    "format_truth_table",
    "truth_table_csv",
]


@dataclass(frozen=True)
class PhaseBit:
    """Binary value encoded as the field ``2*value - 1``."""

    value: int

    def __post_init__(self):
        if self.value not in (0, 1):
            raise UsageError(f"a bit is 0 or 1, got {self.value!r}")
        object.__setattr__(self, "value", int(self.value))

    @property
    def field(self) -> complex:
        return complex(2 * self.value - 1)

    @classmethod
    def from_field(cls, z: complex, theta: float = 0.0) -> "PhaseBit":
        """Decode by the sign of the real part after removing the phase ``theta``."""
        r = (complex(z) * cmath.exp(-1j * theta)).real
        if r == 0:
            raise UsageError("field is in quadrature with the reference; bit undefined")
        return cls(1 if r > 0 else 0)

    def __int__(self) -> int:
        return self.value


BitLike = Union[PhaseBit, int, bool]


def _bit(b: BitLike) -> PhaseBit:
    return b if isinstance(b, PhaseBit) else PhaseBit(int(b))


@lru_cache(maxsize=1)
def gate_spec() -> NetworkSpec:
    """The shipped single-laser AND/OR gate network (inputs A, B, X; output Y)."""
    text = resources.files("injlock.data").joinpath("and_or_gate.json").read_text()
    return load_spec(text)


def gate_output_field(e_a: complex, e_b: complex, e_x: complex) -> complex:
    """Ideal gate output ``sign(E_A + E_B + E_X)`` for arbitrary input fields."""
    return sign(complex(e_a) + complex(e_b) + complex(e_x))


def programmable_gate(A: BitLike, B: BitLike, X: BitLike, mode: str = "ideal") -> PhaseBit:
    """Programmable AND/OR gate.

    Examples
    --------
    >>> programmable_gate(0, 1, 0).value, programmable_gate(0, 1, 1).value
    (0, 1)
    """
    A, B, X = _bit(A), _bit(B), _bit(X)
    if mode == "ideal":
        return PhaseBit.from_field(gate_output_field(A.field, B.field, X.field))
    if mode == "dynamical":
        spec = gate_spec()
        out = eval_dag(spec, [A.field, B.field, X.field], mode="dynamical")[0]
        theta = laser_params_of(spec.node("G")).theta
        return PhaseBit.from_field(out.v, theta)
    raise UsageError(f"mode must be 'ideal' or 'dynamical', got {mode!r}")


def not_gate(b: BitLike) -> PhaseBit:
    """Phase shift by pi: negates the field and flips the bit."""
    b = _bit(b)
    return PhaseBit.from_field(-b.field)


# ---------------------------------------------------------------------------
# Circuits
# ---------------------------------------------------------------------------

Ref = Union[str, int]


@dataclass(frozen=True)
class GateNode:
    """One gate of a circuit.

    ``kind`` is ``"and_or"`` with ``args = (A, B, X)`` or ``"not"`` with
    ``args = (x,)``.  Arguments name a circuit input or another gate, or are
    the constants 0/1.
    """

    name: str
    kind: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        want = {"and_or": 3, "not": 1}.get(self.kind)
        if want is None:
            raise UsageError(f"gate {self.name!r}: unknown kind {self.kind!r}")
        if len(self.args) != want:
            raise UsageError(f"gate {self.name!r} ({self.kind}) needs {want} inputs, got {len(self.args)}")


@dataclass(frozen=True)
class GateCircuit:
    inputs: tuple
    gates: tuple
    outputs: tuple

    def __init__(self, inputs: Sequence[str], gates: Sequence[GateNode], outputs: Sequence[str]):
        object.__setattr__(self, "inputs", tuple(inputs))
        object.__setattr__(self, "gates", tuple(gates))
        object.__setattr__(self, "outputs", tuple(outputs))
        self.order()  # validate

    def order(self) -> list[GateNode]:
        """Gates in a valid evaluation order; raises on cycles or bad references."""
        by_name = {g.name: g for g in self.gates}
        if len(by_name) != len(self.gates) or set(by_name) & set(self.inputs):
            raise TopologyError("gate and input names must be unique")
        ts = graphlib.TopologicalSorter()
        for g in self.gates:
            deps = []
            for a in g.args:
                if isinstance(a, str):
                    if a not in by_name and a not in self.inputs:
                        raise TopologyError(f"gate {g.name!r} references unknown signal {a!r}")
                    if a in by_name:
                        deps.append(a)
                elif a not in (0, 1):
                    raise UsageError(f"gate {g.name!r}: constant inputs must be 0 or 1")
            ts.add(g.name, *deps)
        for o in self.outputs:
            if o not in by_name and o not in self.inputs:
                raise TopologyError(f"unknown output {o!r}")
        try:
            names = list(ts.static_order())
        except graphlib.CycleError as exc:
            raise TopologyError(f"circuit contains a cycle: {exc.args[1]}") from None
        return [by_name[n] for n in names]


def _resolve(ref: Ref, values: Mapping[str, int]) -> int:
    return ref if isinstance(ref, int) else values[ref]


def _check_assignment(circuit: GateCircuit, inputs: Mapping[str, BitLike]) -> dict[str, int]:
    values = {}
    for name in circuit.inputs:
        if name not in inputs:
            raise UnassignedInputError(f"circuit input {name!r} is not assigned")
        values[name] = _bit(inputs[name]).value
    return values


def eval_circuit(circuit: GateCircuit, inputs: Mapping[str, BitLike], mode: str = "ideal") -> dict[str, int]:
    """Evaluate a circuit of optical gates; returns ``{output: bit}``."""
    values = _check_assignment(circuit, inputs)
    for g in circuit.order():
        args = [_resolve(a, values) for a in g.args]
        if g.kind == "and_or":
            values[g.name] = programmable_gate(*args, mode=mode).value
        else:
            values[g.name] = not_gate(args[0]).value
    return {o: values[o] for o in circuit.outputs}


def boolean_eval(circuit: GateCircuit, inputs: Mapping[str, BitLike]) -> dict[str, int]:
    """Reference evaluation with Python Boolean operators (no field arithmetic)."""
    values = {k: bool(v) for k, v in _check_assignment(circuit, inputs).items()}
    for g in circuit.order():
        a = [bool(_resolve(x, values)) for x in g.args]
        if g.kind == "and_or":
            values[g.name] = (a[0] or a[1]) if a[2] else (a[0] and a[1])
        else:
            values[g.name] = not a[0]
    return {o: int(values[o]) for o in circuit.outputs}


def circuit_from_dict(doc: Mapping) -> GateCircuit:
    """Build a circuit from ``{"inputs", "gates", "outputs"}``.

    Each gate is ``{"name", "kind": "and_or", "A", "B", "X"}`` or
    ``{"name", "kind": "not", "in"}``; arguments are signal names or 0/1.
    """
    try:
        gates = []
        for i, g in enumerate(doc["gates"]):
            if g["kind"] == "and_or":
                args = (g["A"], g["B"], g["X"])
            elif g["kind"] == "not":
                args = (g["in"],)
            else:
                raise SchemaError(f"unknown gate kind {g['kind']!r}", f"$.gates[{i}].kind")
            gates.append(GateNode(g["name"], g["kind"], args))
        return GateCircuit(doc["inputs"], gates, doc["outputs"])
    except KeyError as exc:
        raise SchemaError(f"missing field {exc.args[0]!r}") from None


def nand_circuit() -> GateCircuit:
    """NAND(A, B) = NOT(AND(A, B))."""
    return GateCircuit(["A", "B"], [GateNode("and", "and_or", ("A", "B", 0)),
                                    GateNode("Y", "not", ("and",))], ["Y"])


def xor_circuit() -> GateCircuit:
    """XOR(A, B) = OR(AND(A, NOT B), AND(NOT A, B)) with five gates."""
    return GateCircuit(["A", "B"], [
        GateNode("nA", "not", ("A",)),
        GateNode("nB", "not", ("B",)),
        GateNode("t1", "and_or", ("A", "nB", 0)),
        GateNode("t2", "and_or", ("nA", "B", 0)),
        GateNode("Y", "and_or", ("t1", "t2", 1)),
    ], ["Y"])


def programmed_circuit() -> GateCircuit:
    """Gate on ``(C, D)`` programmed on the fly by ``A AND B``."""
    return GateCircuit(["A", "B", "C", "D"], [
        GateNode("prog", "and_or", ("A", "B", 0)),
        GateNode("Y", "and_or", ("C", "D", "prog")),
    ], ["Y"])


def all_assignments(circuit: GateCircuit):
    for bits in itertools.product((0, 1), repeat=len(circuit.inputs)):
        yield dict(zip(circuit.inputs, bits))


# ---------------------------------------------------------------------------
# Truth tables
# ---------------------------------------------------------------------------


def truth_table(mode: str = "ideal") -> list[dict]:
    """All eight rows of the programmable gate.

    Each row has keys ``A, B, X, sum, output, expected, function``.
    """
    rows = []
    for X, A, B in itertools.product((0, 1), repeat=3):
        s = PhaseBit(A).field + PhaseBit(B).field + PhaseBit(X).field
        out = programmable_gate(A, B, X, mode).value
        expected = int((A or B) if X else (A and B))
        rows.append({"A": A, "B": B, "X": X, "sum": int(s.real), "output": out,
                     "expected": expected, "function": "OR" if X else "AND"})
    return rows


def format_truth_table(rows: Sequence[dict]) -> str:
    """Aligned text rendering of :func:`truth_table` rows."""
    head = f"{'A':>2} {'B':>2} {'X':>2} {'E_A':>4} {'E_B':>4} {'E_X':>4} {'sum':>4} {'out':>4} {'fn':>4} {'ok':>3}"
    lines = [head]
    for r in rows:
        fa, fb, fx = (2 * r[k] - 1 for k in "ABX")
        lines.append(f"{r['A']:>2} {r['B']:>2} {r['X']:>2} {fa:>+4d} {fb:>+4d} {fx:>+4d} {r['sum']:>+4d} "
                     f"{r['output']:>4} {r['function']:>4} {'yes' if r['output'] == r['expected'] else 'NO':>3}")
    return "\n".join(lines) + "\n"


def truth_table_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["A", "B", "X", "sum", "output", "expected", "function"])
    for r in rows:
        w.writerow([r[k] for k in ("A", "B", "X", "sum", "output", "expected", "function")])
    return buf.getvalue()
