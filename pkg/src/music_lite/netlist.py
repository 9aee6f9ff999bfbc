"""Gate-level adder netlists.

A netlist is a JSON description of a combinational adder over input pins
``a0..a{w-1}``, ``b0..b{w-1}`` and optionally ``cin`` (LSB first):

    {
      "name": "ripple2",
      "width": 2,
      "has_cin": true,
      "gates": [
        {"id": "p0", "op": "XOR", "in": ["a0", "b0"]},
        ...
      ],
      "outputs": {"sum": ["s0", "s1"], "cout": "c2"}
    }

Gate ops are AND, OR, NOT, XOR, NAND, NOR, XNOR, BUF; NOT and BUF take one
input, all others exactly two. Output references may name gates or input
pins. Loading compiles the graph into a topologically ordered instruction
program evaluated by the integer kernels.
"""

from __future__ import annotations

import json
from collections import deque
from pathlib import Path

import numpy as np

OPCODES = {
    "AND": 0, "OR": 1, "NOT": 2, "XOR": 3,
    "NAND": 4, "NOR": 5, "XNOR": 6, "BUF": 7,
}
_UNARY = {"NOT", "BUF"}


class NetlistError(ValueError):
    """Base class for netlist validation failures."""


class NetlistFormatError(NetlistError):
    """Malformed JSON, unknown op, bad arity, duplicate or missing ids."""


class NetlistCycleError(NetlistError):
    """The gate graph is not acyclic."""


class UndrivenOutputError(NetlistError):
    """A declared output is missing or references nothing that drives it."""


class WidthMismatchError(NetlistError):
    """Pin or sum vector widths disagree with the declared width."""


class Netlist:
    """A validated, compiled gate-level adder description.

    Equality and hashing are by identity; instances are immutable in use.
    """

    def __init__(self, name, width, has_cin, ops, in1, in2, sum_nodes,
                 cout_node, n_nodes, gate_ops):
        self.name = name
        self.width = width
        self.has_cin = has_cin
        self.ops = ops
        self.in1 = in1
        self.in2 = in2
        self.sum_nodes = sum_nodes
        self.cout_node = cout_node
        self.n_nodes = n_nodes
        self.gate_ops = gate_ops  # list of op names, for gate counting

    @property
    def program(self):
        return (self.ops, self.in1, self.in2, self.sum_nodes,
                self.cout_node, self.n_nodes)


def _pin_index(name: str, width: int) -> int | None:
    if name == "cin":
        return 2 * width
    if len(name) >= 2 and name[0] in "ab":
        try:
            bit = int(name[1:])
        except ValueError:
            return None
        if not 0 <= bit < width:
            raise WidthMismatchError(
                f"pin {name!r} is outside the declared width {width}")
        return bit if name[0] == "a" else width + bit
    return None


def load_netlist(source) -> Netlist:
    """Parse, validate and compile a netlist from a path, JSON text or dict."""
    if isinstance(source, dict):
        doc = source
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") \
            else str(source)
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise NetlistFormatError(f"netlist is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise NetlistFormatError("netlist root must be a JSON object")

    try:
        name = str(doc["name"])
        width = int(doc["width"])
        gates = doc["gates"]
        outputs = doc["outputs"]
    except (KeyError, TypeError, ValueError) as e:
        raise NetlistFormatError(f"missing or malformed required field: {e}") from e
    has_cin = bool(doc.get("has_cin", False))
    known = {"name", "width", "has_cin", "gates", "outputs"}
    extra = set(doc) - known
    if extra:
        raise NetlistFormatError(f"unknown netlist fields: {sorted(extra)}")
    if width < 2:
        raise WidthMismatchError(f"adder width must be >= 2, got {width}")

    node_of: dict[str, int] = {}
    base = 2 * width + 1  # a bits, b bits, cin
    if not isinstance(gates, list):
        raise NetlistFormatError("'gates' must be a list")
    for t, g in enumerate(gates):
        try:
            gid = str(g["id"])
            op = str(g["op"])
            ins = list(g["in"])
        except (KeyError, TypeError) as e:
            raise NetlistFormatError(f"gate #{t} malformed: {e}") from e
        if op not in OPCODES:
            raise NetlistFormatError(f"gate {gid!r}: unknown op {op!r}")
        want = 1 if op in _UNARY else 2
        if len(ins) != want:
            raise NetlistFormatError(
                f"gate {gid!r}: op {op} takes {want} input(s), got {len(ins)}")
        if gid in node_of or _pin_index(gid, width) is not None:
            raise NetlistFormatError(f"duplicate or reserved gate id {gid!r}")
        node_of[gid] = base + t

    def resolve(ref: str, where: str) -> int:
        pin = _pin_index(ref, width)
        if pin is not None:
            if pin == 2 * width and not has_cin:
                raise NetlistFormatError(
                    f"{where} references 'cin' but has_cin is false")
            return pin
        if ref in node_of:
            return node_of[ref]
        raise KeyError(ref)

    resolved_ins = []
    for g in gates:
        row = []
        for ref in g["in"]:
            try:
                row.append(resolve(str(ref), f"gate {g['id']!r}"))
            except KeyError:
                raise NetlistFormatError(
                    f"gate {g['id']!r} input {ref!r} is not a pin or gate")
        resolved_ins.append(row)

    # topological order over gate nodes (Kahn)
    ngates = len(gates)
    deps = [[] for _ in range(ngates)]
    indeg = [0] * ngates
    for t, row in enumerate(resolved_ins):
        for src in row:
            if src >= base:
                deps[src - base].append(t)
                indeg[t] += 1
    order = deque(t for t in range(ngates) if indeg[t] == 0)
    topo = []
    while order:
        t = order.popleft()
        topo.append(t)
        for u in deps[t]:
            indeg[u] -= 1
            if indeg[u] == 0:
                order.append(u)
    if len(topo) != ngates:
        stuck = sorted(gates[t]["id"] for t in range(ngates) if indeg[t] > 0)
        raise NetlistCycleError(f"netlist contains a combinational cycle "
                                f"through gates {stuck}")

    if not isinstance(outputs, dict) or "sum" not in outputs:
        raise UndrivenOutputError("outputs must declare a 'sum' vector")
    if "cout" not in outputs:
        raise UndrivenOutputError("outputs must declare 'cout'")
    sum_refs = list(outputs["sum"])
    if len(sum_refs) != width:
        raise WidthMismatchError(
            f"sum vector has {len(sum_refs)} bits, declared width is {width}")
    try:
        sum_nodes = [resolve(str(r), "output sum") for r in sum_refs]
        cout_node = resolve(str(outputs["cout"]), "output cout")
    except KeyError as e:
        raise UndrivenOutputError(f"output references undriven node {e}") from e
    extra_out = set(outputs) - {"sum", "cout"}
    if extra_out:
        raise NetlistFormatError(f"unknown output fields: {sorted(extra_out)}")

    # renumber into topological program order
    new_node = {base + t: base + i for i, t in enumerate(topo)}
    remap = lambda n: new_node.get(n, n)
    ops = np.array([OPCODES[str(gates[t]["op"])] for t in topo], dtype=np.intc)
    in1 = np.array([remap(resolved_ins[t][0]) for t in topo], dtype=np.intc)
    in2 = np.array(
        [remap(resolved_ins[t][-1]) for t in topo], dtype=np.intc)
    return Netlist(
        name=name, width=width, has_cin=has_cin,
        ops=ops, in1=in1, in2=in2,
        sum_nodes=np.array([remap(n) for n in sum_nodes], dtype=np.intc),
        cout_node=remap(cout_node),
        n_nodes=base + ngates,
        gate_ops=[str(gates[t]["op"]) for t in topo],
    )
