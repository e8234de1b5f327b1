"""Feed-forward laser networks.

Two representations are provided:

* :class:`LayeredModel` -- the three-layer model: inputs ``z_j`` are mixed by
  ``A``, biased by ``E_ext``, normalized by one laser each and mixed again by
  ``C``::

      out_l = sum_k C[l, k] * c0 * sign_a(sum_j A[k, j] z_j + E_ext[k], a)

* :class:`NetworkSpec` -- an arbitrary directed acyclic graph of lasers and
  passive elements with complex edge weights, loaded from / saved to JSON.

JSON document layout::

    {"nodes":  [{"id": "L1", "type": "laser", "params": {"mu": 2.0}}, ...],
     "edges":  [{"from": "in0", "to": "L1", "weight": [1.0, 0.0]}, ...],
     "inputs": ["in0"], "outputs": ["out0"]}

Input and output names are virtual nodes usable in edges.  Endpoints are
written ``"id"`` or ``"id:port"`` (ports count from 0).  Several edges into
the same port add coherently; one output port may feed several edges.

Node parameters
---------------
laser
    ``mu, alpha, gamma_c, gamma, gamma_s, gamma_p, gamma_a`` (see
    :class:`~injlock.laser.LaserParams`), ``a`` (smoothing, default 0),
    ``c0`` (ideal-mode emission amplitude, default ``sqrt(mu-1) e^{i theta}``),
    ``injection_scale`` (dynamical coupling from field to normalized injection,
    default 0.01), ``settle_time`` (seconds) or ``settle_factor`` (multiples of
    ``1/Re(beta)``, default 100).
coupler
    ``m`` inputs, ``n`` outputs.
attenuator
    ``db`` loss.
phase
    ``angle`` in radians.
bias
    ``v`` and ``h`` components (complex pairs; ``h`` defaults to 0).
"""

from __future__ import annotations

import copy
import graphlib
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import jsonschema
import numpy as np

from .errors import NoLockingError, SchemaError, ShapeError, TopologyError, UsageError
from .field_math import (JonesField, PassiveElement, apply_passive, attenuator, bias_source,
                         complex_to_pair, coupler, pair_to_complex, phase_shifter, sign_a)
from .laser import LaserParams, LaserState, convergence_rate, lock

__all__ = [
    "LayeredModel",
    "eval_layered",
    "Node",
    "Edge",
    "NetworkSpec",
    "validate",
    "eval_dag",
    "load_spec",
    "save_spec",
    "layered_to_spec",
    "laser_params_of",
    "passive_element_of",
    "NODE_TYPES",
]

NODE_TYPES = ("laser", "coupler", "attenuator", "phase", "bias")
_LASER_KEYS = ("mu", "alpha", "gamma_c", "gamma", "gamma_s", "gamma_p", "gamma_a")
_COMPLEX_KEYS = ("c0", "v", "h")
DEFAULT_INJECTION_SCALE = 0.01


# ---------------------------------------------------------------------------
# Layered model
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LayeredModel:
    """Three-layer laser network.

    Parameters
    ----------
    A : ndarray, shape (k0, j0)
        Input-to-laser weights.
    C : ndarray, shape (l0, k0)
        Laser-to-output weights.
    E_ext : ndarray, shape (k0,)
        Vertical bias injected into each laser.
    a : float
        Smoothing (horizontal bias magnitude).
    c0 : complex
        Laser emission amplitude.
    """

    A: np.ndarray
    C: np.ndarray
    E_ext: np.ndarray
    a: float = 0.0
    c0: complex = 1.0 + 0j

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        C = np.atleast_2d(np.asarray(self.C, dtype=complex))
        E = np.asarray(self.E_ext, dtype=complex).reshape(-1)
        if A.ndim != 2 or C.ndim != 2:
            raise ShapeError("A and C must be matrices")
        k0 = A.shape[0]
        if C.shape[1] != k0 or E.shape[0] != k0:
            raise ShapeError(f"inconsistent shapes: A {A.shape}, C {C.shape}, E_ext {E.shape}")
        if self.a < 0:
            raise UsageError("smoothing a must be nonnegative")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "E_ext", E)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "c0", complex(self.c0))

    @property
    def shape(self) -> tuple[int, int, int]:
        """``(j0, k0, l0)``: inputs, lasers, outputs."""
        return self.A.shape[1], self.A.shape[0], self.C.shape[0]


def eval_layered(model: LayeredModel, z) -> np.ndarray:
    """Evaluate a :class:`LayeredModel`.

    Parameters
    ----------
    z : array_like, shape (j0,) or (P, j0)
        Input vector, or a batch of ``P`` input vectors.

    Returns
    -------
    ndarray, shape (l0,) or (P, l0)

    Examples
    --------
    >>> m = LayeredModel(A=[[1, 1]], C=[[1]], E_ext=[-1])
    >>> eval_layered(m, [1, 1])
    array([1.+0.j])
    """
    zz = np.asarray(z, dtype=complex)
    j0 = model.A.shape[1]
    single = zz.ndim <= 1
    zz = zz.reshape(1, -1) if single else zz
    if zz.shape[-1] != j0:
        raise ShapeError(f"model expects {j0} inputs, got {zz.shape[-1]}")
    U = zz @ model.A.T + model.E_ext[None, :]
    E = model.c0 * sign_a(U, model.a)
    out = E @ model.C.T
    return out[0] if single else out


# ---------------------------------------------------------------------------
# Graph specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    id: str
    type: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    weight: complex = 1.0 + 0j
    src_port: int = 0
    dst_port: int = 0

    def __post_init__(self):
        object.__setattr__(self, "weight", complex(self.weight))


@dataclass(frozen=True)
class NetworkSpec:
    """Directed acyclic optical network (see module docstring)."""

    nodes: tuple
    edges: tuple
    inputs: tuple
    outputs: tuple

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Edge], inputs: Sequence[str],
                 outputs: Sequence[str]):
        object.__setattr__(self, "nodes", tuple(nodes))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "inputs", tuple(inputs))
        object.__setattr__(self, "outputs", tuple(outputs))

    def node(self, node_id: str) -> Node:
        for nd in self.nodes:
            if nd.id == node_id:
                return nd
        raise KeyError(node_id)


def _arity(node: Node) -> tuple[int, int]:
    t, p = node.type, node.params
    if t == "laser":
        return 1, 1
    if t == "coupler":
        return int(p["m"]), int(p["n"])
    if t in ("attenuator", "phase"):
        return 1, 1
    if t == "bias":
        return 0, 1
    raise SchemaError(f"unknown node type {t!r}", f"$.nodes[{node.id}].type")


def laser_params_of(node: Node) -> LaserParams:
    """Build :class:`LaserParams` from a laser node's parameters."""
    return LaserParams(**{k: node.params[k] for k in _LASER_KEYS if k in node.params})


def passive_element_of(node: Node) -> PassiveElement:
    """Build the :class:`PassiveElement` of a passive node."""
    p = node.params
    if node.type == "coupler":
        return coupler(int(p["m"]), int(p["n"]))
    if node.type == "attenuator":
        return attenuator(float(p.get("db", 0.0)))
    if node.type == "phase":
        return phase_shifter(float(p.get("angle", 0.0)))
    if node.type == "bias":
        return bias_source(JonesField(p.get("v", 0j), p.get("h", 0j)))
    raise UsageError(f"node {node.id!r} of type {node.type!r} is not passive")


def validate(spec: NetworkSpec) -> list[str]:
    """Check structural invariants and return one topological order of node ids.

    Raises
    ------
    TopologyError
        Unknown endpoints, dangling ports, duplicate ids or a cycle.
    ShapeError
        Port numbers outside an element's arity.
    """
    ids = [n.id for n in spec.nodes]
    virtual = list(spec.inputs) + list(spec.outputs)
    all_ids = ids + virtual
    if len(set(all_ids)) != len(all_ids):
        dup = sorted({x for x in all_ids if all_ids.count(x) > 1})
        raise TopologyError(f"duplicate node/port ids: {dup}")
    arity = {n.id: _arity(n) for n in spec.nodes}
    arity.update({i: (0, 1) for i in spec.inputs})
    arity.update({o: (1, 0) for o in spec.outputs})
    fed = set()
    ts = graphlib.TopologicalSorter({i: () for i in all_ids})
    for k, e in enumerate(spec.edges):
        for end in (e.src, e.dst):
            if end not in arity:
                raise TopologyError(f"edge {k} references unknown id {end!r}")
        if not 0 <= e.src_port < arity[e.src][1]:
            raise ShapeError(f"edge {k}: {e.src!r} has no output port {e.src_port}")
        if not 0 <= e.dst_port < arity[e.dst][0]:
            raise ShapeError(f"edge {k}: {e.dst!r} has no input port {e.dst_port}")
        fed.add((e.dst, e.dst_port))
        ts.add(e.dst, e.src)
    for nid, (n_in, _) in arity.items():
        for port in range(n_in):
            if (nid, port) not in fed:
                raise TopologyError(f"input port {port} of {nid!r} has no incoming edge")
    try:
        order = list(ts.static_order())
    except graphlib.CycleError as exc:
        raise TopologyError(f"network contains a cycle: {' -> '.join(map(str, exc.args[1]))}") from None
    return order


def _check_order(spec: NetworkSpec, order: Sequence[str]) -> None:
    pos = {nid: i for i, nid in enumerate(order)}
    needed = {n.id for n in spec.nodes} | set(spec.inputs) | set(spec.outputs)
    if set(pos) != needed:
        raise TopologyError("custom order must list every node exactly once")
    for e in spec.edges:
        if pos[e.src] >= pos[e.dst]:
            raise TopologyError(f"order is not topological: {e.src!r} after {e.dst!r}")


def _laser_ideal(node: Node, U: JonesField) -> JonesField:
    p = node.params
    a = float(p.get("a", 0.0))
    if "c0" in p:
        c0 = complex(p["c0"])
    else:
        lp = laser_params_of(node)
        c0 = lp.amplitude * complex(math.cos(lp.theta), math.sin(lp.theta))
    if a == 0.0 and U.power == 0.0:
        raise NoLockingError(f"laser {node.id!r} receives zero total injection")
    return U * (c0 / math.sqrt(U.power + a * a))


def _laser_dynamical(node: Node, U: JonesField, dt: float | None) -> JonesField:
    p = node.params
    lp = laser_params_of(node)
    a = float(p.get("a", 0.0))
    kappa = float(p.get("injection_scale", DEFAULT_INJECTION_SCALE))
    if a > 0:
        if U.h != 0:
            raise UsageError(f"laser {node.id!r}: smoothing needs vertically polarized injection")
        # the smoothing is realized by an orthogonally polarized bias of
        # magnitude a; a vertical polarizer after the laser removes it
        u = JonesField(kappa * U.v, kappa * a)
    else:
        u = U * kappa
    if u.power == 0.0:
        raise NoLockingError(f"laser {node.id!r} receives zero total injection")
    t_settle = p.get("settle_time")
    if t_settle is None:
        t_settle = float(p.get("settle_factor", 100.0)) / convergence_rate(u, lp).real
    st: LaserState = lock(u, lp, t_settle=float(t_settle), dt=dt)
    if a > 0:
        return JonesField(st.E_x, 0j)
    return st.field


def eval_dag(spec: NetworkSpec, inputs: Sequence, mode: str = "ideal", *,
             order: Sequence[str] | None = None, dt: float | None = None,
             trace: dict | None = None) -> list[JonesField]:
    """Evaluate a network on the given input fields.

    Parameters
    ----------
    spec : NetworkSpec
    inputs : sequence of JonesField or complex
        One field per declared input (complex values are vertical).
    mode : {"ideal", "dynamical"}
        ``ideal`` applies the closed-form normalization at every laser;
        ``dynamical`` integrates each laser's rate equations to its locked state.
    order : sequence of str, optional
        Explicit topological order (for testing order independence).
    dt : float, optional
        Integration step (seconds) for dynamical mode.
    trace : dict, optional
        If given, filled with ``{node_id: [output port fields]}`` for every
        node, exposing internal laser outputs.

    Returns
    -------
    list of JonesField
        One field per declared output.
    """
    if mode not in ("ideal", "dynamical"):
        raise UsageError(f"mode must be 'ideal' or 'dynamical', got {mode!r}")
    topo = validate(spec)
    if order is not None:
        _check_order(spec, order)
        topo = list(order)
    if len(inputs) != len(spec.inputs):
        raise ShapeError(f"network has {len(spec.inputs)} inputs, got {len(inputs)}")
    nodes = {n.id: n for n in spec.nodes}
    incoming: dict[str, list[Edge]] = {}
    for e in spec.edges:
        incoming.setdefault(e.dst, []).append(e)
    out_ports: dict[str, list[JonesField]] = {}
    for name, f in zip(spec.inputs, inputs):
        out_ports[name] = [f if isinstance(f, JonesField) else JonesField(f)]
    results = {}
    for nid in topo:
        if nid in out_ports:
            continue
        node = nodes.get(nid)
        n_in = _arity(node)[0] if node is not None else 1
        port_in = [JonesField() for _ in range(n_in)]
        for e in incoming.get(nid, ()):
            port_in[e.dst_port] = port_in[e.dst_port] + out_ports[e.src][e.src_port] * e.weight
        if node is None:  # declared output
            results[nid] = port_in[0]
            continue
        if node.type == "laser":
            f = _laser_ideal(node, port_in[0]) if mode == "ideal" else _laser_dynamical(node, port_in[0], dt)
            out_ports[nid] = [f]
        else:
            out_ports[nid] = apply_passive(passive_element_of(node), port_in)
    if trace is not None:
        trace.update(out_ports)
    return [results[o] for o in spec.outputs]


# ---------------------------------------------------------------------------
# JSON I/O
# ---------------------------------------------------------------------------

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_NUM_OR_PAIR = {"oneOf": [{"type": "number"}, _PAIR]}
_ENDPOINT = {"type": "string", "pattern": r"^[^:]+(:\d+)?$"}

SCHEMA = {
    "type": "object",
    "required": ["nodes", "edges", "inputs", "outputs"],
    "additionalProperties": False,
    "properties": {
        "nodes": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "type"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1, "pattern": r"^[^:]+$"},
                    "type": {"enum": list(NODE_TYPES)},
                    "params": {"type": "object"},
                },
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["from", "to"],
                "additionalProperties": False,
                "properties": {"from": _ENDPOINT, "to": _ENDPOINT, "weight": _NUM_OR_PAIR},
            },
        },
        "inputs": {"type": "array", "items": {"type": "string", "pattern": r"^[^:]+$"}},
        "outputs": {"type": "array", "items": {"type": "string", "pattern": r"^[^:]+$"}},
    },
}

_PARAM_SCHEMAS = {
    "laser": {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            **{k: {"type": "number"} for k in _LASER_KEYS},
            "a": {"type": "number", "minimum": 0},
            "c0": _NUM_OR_PAIR,
            "injection_scale": {"type": "number", "exclusiveMinimum": 0},
            "settle_time": {"type": "number", "exclusiveMinimum": 0},
            "settle_factor": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "coupler": {
        "type": "object",
        "required": ["m", "n"],
        "additionalProperties": False,
        "properties": {"m": {"type": "integer", "minimum": 1}, "n": {"type": "integer", "minimum": 1}},
    },
    "attenuator": {"type": "object", "additionalProperties": False, "properties": {"db": {"type": "number"}}},
    "phase": {"type": "object", "additionalProperties": False, "properties": {"angle": {"type": "number"}}},
    "bias": {"type": "object", "additionalProperties": False,
             "properties": {"v": _NUM_OR_PAIR, "h": _NUM_OR_PAIR}},
}


def _json_path(path) -> str:
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def _check_schema(instance, schema, prefix=()):
    errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(instance),
                    key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _json_path(list(prefix) + list(err.absolute_path)))


def _parse_endpoint(s: str) -> tuple[str, int]:
    if ":" in s:
        nid, port = s.rsplit(":", 1)
        return nid, int(port)
    return s, 0


def spec_from_dict(doc: Mapping) -> NetworkSpec:
    """Build a :class:`NetworkSpec` from an already-parsed JSON object."""
    _check_schema(doc, SCHEMA)
    nodes = []
    for i, nd in enumerate(doc["nodes"]):
        params = copy.deepcopy(nd.get("params", {}))
        _check_schema(params, _PARAM_SCHEMAS[nd["type"]], ("nodes", i, "params"))
        for k in _COMPLEX_KEYS:
            if k in params:
                params[k] = pair_to_complex(params[k])
        nodes.append(Node(nd["id"], nd["type"], params))
    edges = []
    for e in doc["edges"]:
        src, sp = _parse_endpoint(e["from"])
        dst, dp = _parse_endpoint(e["to"])
        edges.append(Edge(src, dst, pair_to_complex(e.get("weight", 1.0)), sp, dp))
    spec = NetworkSpec(nodes, edges, doc["inputs"], doc["outputs"])
    validate(spec)
    return spec


def load_spec(text: str) -> NetworkSpec:
    """Parse and validate a JSON network document.

    Raises
    ------
    SchemaError
        Malformed JSON or schema violation (message carries the field path).
    TopologyError
        Structurally invalid graph, e.g. a cycle.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    return spec_from_dict(doc)


def spec_to_dict(spec: NetworkSpec) -> dict:
    nodes = []
    for nd in spec.nodes:
        params = {k: (complex_to_pair(v) if k in _COMPLEX_KEYS else v) for k, v in nd.params.items()}
        nodes.append({"id": nd.id, "type": nd.type, "params": params})

    def ep(nid, port):
        return nid if port == 0 else f"{nid}:{port}"

    edges = [{"from": ep(e.src, e.src_port), "to": ep(e.dst, e.dst_port),
              "weight": complex_to_pair(e.weight)} for e in spec.edges]
    return {"nodes": nodes, "edges": edges, "inputs": list(spec.inputs), "outputs": list(spec.outputs)}


def save_spec(spec: NetworkSpec) -> str:
    """Serialize a :class:`NetworkSpec` to a JSON document."""
    return json.dumps(spec_to_dict(spec), indent=2) + "\n"


def layered_to_spec(model: LayeredModel, *, tol: float = 0.0) -> NetworkSpec:
    """Express a :class:`LayeredModel` as an explicit graph.

    Each laser ``k`` receives input ``j`` with weight ``A[k, j]`` (entries with
    ``|A| <= tol`` are omitted) and a bias node emitting ``E_ext[k]``; outputs
    collect ``C[l, k]``.  Lasers carry ``a`` and ``c0`` so ideal evaluation
    reproduces :func:`eval_layered`.
    """
    j0, k0, l0 = model.shape
    ins = [f"in{j}" for j in range(j0)]
    outs = [f"out{l}" for l in range(l0)]
    nodes, edges = [], []
    for k in range(k0):
        nodes.append(Node(f"L{k}", "laser", {"a": model.a, "c0": model.c0}))
        nodes.append(Node(f"B{k}", "bias", {"v": complex(model.E_ext[k])}))
        edges.append(Edge(f"B{k}", f"L{k}"))
        for j in range(j0):
            if abs(model.A[k, j]) > tol:
                edges.append(Edge(ins[j], f"L{k}", model.A[k, j]))
        for l in range(l0):
            if abs(model.C[l, k]) > tol:
                edges.append(Edge(f"L{k}", outs[l], model.C[l, k]))
    # outputs with no contributing laser still need an incoming edge
    fed = {e.dst for e in edges}
    for o in outs:
        if o not in fed:
            nodes.append(Node(f"Z{o}", "bias", {"v": 0j}))
            edges.append(Edge(f"Z{o}", o))
    return NetworkSpec(nodes, edges, ins, outs)
