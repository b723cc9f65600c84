"""Gate-level Verilog netlists: parsing, emission, characterization, metrics.

Only scalar nets and the eight primitive gates are modelled. Any other
statement inside the module (flip-flops, cell instances, ``assign``) is kept
verbatim as an opaque item and never transformed.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Mapping

import numpy as np

from netrewrite.ops import OP_ORDER, ArityError, Op, apply_packed

CONSTANTS = {"1'b0": 0, "1'b1": 1}
GATE_KEYWORDS = {op.value.lower(): op for op in Op}
DECL_KEYWORDS = ("input", "output", "wire")


class NetlistError(ValueError):
    """Structurally invalid netlist."""


class NetlistSyntaxError(NetlistError):
    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True, order=True)
class GateType:
    op: Op
    fan_in: int

    def __post_init__(self) -> None:
        if self.fan_in < 1:
            raise ValueError("fan-in must be positive")
        if self.op.unary != (self.fan_in == 1):
            raise ArityError(f"{self.op.value} cannot have fan-in {self.fan_in}")

    def sort_key(self) -> tuple[int, int]:
        return OP_ORDER[self.op], self.fan_in

    def __str__(self) -> str:
        return f"{self.op.value}{self.fan_in}"


@dataclass(frozen=True)
class GateInstance:
    op: Op
    name: str
    output: str
    inputs: tuple[str, ...]

    def __post_init__(self) -> None:
        self.op.check_arity(len(self.inputs))

    @property
    def gate_type(self) -> GateType:
        return GateType(self.op, len(self.inputs))


@dataclass(frozen=True)
class Netlist:
    module_name: str
    ports: tuple[tuple[str, str], ...]
    wires: tuple[str, ...]
    gates: tuple[GateInstance, ...]
    opaque_items: tuple[str, ...] = ()
    _driver: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_driver", _validate(self))

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(n for n, d in self.ports if d == "input")

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(n for n, d in self.ports if d == "output")

    def driver(self, net: str) -> GateInstance | None:
        return self._driver.get(net)

    def gate_counts(self) -> Counter:
        return Counter(g.gate_type for g in self.gates)

    def __len__(self) -> int:
        return len(self.gates)


def _validate(nl: Netlist) -> dict[str, GateInstance]:
    names = [n for n, _ in nl.ports]
    if len(set(names)) != len(names):
        raise NetlistError("duplicate port name")
    inputs = set(nl.inputs)
    declared = set(names) | set(nl.wires)
    driver: dict[str, GateInstance] = {}
    for g in nl.gates:
        if g.output not in declared:
            raise NetlistError(f"gate {g.name} drives undeclared net {g.output}")
        if g.output in inputs:
            raise NetlistError(f"gate {g.name} drives primary input {g.output}")
        if g.output in driver:
            raise NetlistError(
                f"net {g.output} has multiple drivers "
                f"({driver[g.output].name}, {g.name})"
            )
        driver[g.output] = g
        for net in g.inputs:
            if net not in declared and net not in CONSTANTS:
                raise NetlistError(f"gate {g.name} reads undeclared net {net}")
    ts = TopologicalSorter(
        {g.output: [n for n in g.inputs if n in driver] for g in nl.gates}
    )
    try:
        ts.prepare()
    except CycleError as exc:
        raise NetlistError(f"combinational cycle through {exc.args[1]}") from None
    return driver


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<escaped>\\\S+)
  | (?P<const>1'b[01])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$]*)
  | (?P<punct>[(),;])
  | (?P<other>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[_Tok] = []
        for m in _TOKEN_RE.finditer(text):
            if m.lastgroup in ("ws", "comment"):
                continue
            if m.lastgroup == "other" and m.group() == "/" and text.startswith("/*", m.start()):
                self.fail("unterminated comment", m.start())
            self.toks.append(_Tok(m.lastgroup, m.group(), m.start()))
        self.i = 0

    def fail(self, msg: str, pos: int | None = None):
        if pos is None:
            pos = self.toks[self.i].pos if self.i < len(self.toks) else len(self.text)
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        raise NetlistSyntaxError(msg, line, col)

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.peek()
        if tok is None or tok.text != text:
            self.fail(f"expected {text!r}, got {tok.text if tok else 'end of input'!r}")
        return self.next()

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind not in ("ident", "escaped"):
            self.fail(f"expected identifier, got {tok.text if tok else 'end of input'!r}")
        self.i += 1
        return tok.text

    def net(self) -> str:
        tok = self.peek()
        if tok is not None and tok.kind == "const":
            self.i += 1
            return tok.text
        name = self.ident()
        nxt = self.peek()
        if nxt is not None and nxt.text == "[":
            self.fail("bus/vector nets are not supported; bit-blast the netlist first")
        return name

    def ident_list(self, terminator: str) -> list[str]:
        tok = self.peek()
        if tok is not None and tok.text == "[":
            self.fail("vector declarations are not supported")
        items = [self.ident()]
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            items.append(self.ident())
        self.expect(terminator)
        return items

    def parse(self) -> Netlist:
        self.expect("module")
        name = self.ident()
        self.expect("(")
        header, directions = self.header()
        self.expect(";")
        wires: list[str] = []
        gates: list[GateInstance] = []
        opaque: list[str] = []
        while True:
            tok = self.peek()
            if tok is None:
                self.fail("missing endmodule")
            if tok.text == "endmodule":
                self.next()
                break
            if tok.text in ("input", "output"):
                self.next()
                for n in self.ident_list(";"):
                    if n in directions:
                        self.fail(f"direction of {n} declared twice", tok.pos)
                    directions[n] = tok.text
            elif tok.text == "wire":
                self.next()
                wires.extend(self.ident_list(";"))
            elif tok.kind == "ident" and tok.text in GATE_KEYWORDS:
                gates.append(self.gate())
            elif tok.kind in ("ident", "escaped"):
                opaque.append(self.opaque_statement())
            else:
                self.fail(f"unexpected {tok.text!r}")
        if self.peek() is not None:
            tok = self.peek()
            if tok.text == "module":
                self.fail("only one module per netlist file is supported")
            self.fail(f"unexpected {tok.text!r} after endmodule")
        for n in directions:
            if n not in header:
                self.fail(f"{n} is declared {directions[n]} but is not a port")
        ports = []
        for n in header:
            if n not in directions:
                self.fail(f"port {n} has no input/output declaration")
            ports.append((n, directions[n]))
        wires = [w for w in dict.fromkeys(wires) if w not in directions]
        return Netlist(name, tuple(ports), tuple(wires), tuple(gates), tuple(opaque))

    def header(self) -> tuple[list[str], dict[str, str]]:
        """Port list; ANSI-style directions (``input a, output y``) allowed."""
        names: list[str] = []
        directions: dict[str, str] = {}
        if self.peek() is not None and self.peek().text == ")":
            self.next()
            return names, directions
        current = None
        while True:
            tok = self.peek()
            if tok is not None and tok.text in ("input", "output"):
                current = self.next().text
                if self.peek() is not None and self.peek().text == "wire":
                    self.next()
            if self.peek() is not None and self.peek().text == "[":
                self.fail("vector declarations are not supported")
            name = self.ident()
            names.append(name)
            if current is not None:
                directions[name] = current
            sep = self.peek()
            if sep is None:
                self.fail("unterminated port list")
            self.next()
            if sep.text == ")":
                return names, directions
            if sep.text != ",":
                self.fail(f"expected ',' or ')', got {sep.text!r}", sep.pos)

    def gate(self) -> GateInstance:
        start = self.next()
        op = GATE_KEYWORDS[start.text]
        tok = self.peek()
        if tok is not None and tok.text == "(":
            self.fail(f"{start.text} instance needs an instance name")
        inst = self.ident()
        self.expect("(")
        terms = [self.net()]
        while self.peek() is not None and self.peek().text == ",":
            self.next()
            terms.append(self.net())
        self.expect(")")
        self.expect(";")
        if terms[0] in CONSTANTS:
            self.fail(f"gate {inst} drives a constant", start.pos)
        try:
            return GateInstance(op, inst, terms[0], tuple(terms[1:]))
        except ArityError as exc:
            self.fail(f"gate {inst}: {exc}", start.pos)

    def opaque_statement(self) -> str:
        start = self.peek().pos
        while True:
            tok = self.next()
            if tok.text == ";":
                return " ".join(self.text[start : tok.pos + 1].split())
            if tok.text in ("endmodule", "module"):
                self.fail("unterminated statement", start)


def parse_netlist(source: str) -> Netlist:
    """Parse one module of the supported Verilog subset."""
    try:
        return _Parser(source).parse()
    except NetlistSyntaxError:
        raise


def read_netlist(path) -> Netlist:
    with open(path, encoding="utf-8") as f:
        return parse_netlist(f.read())


# -- emission ----------------------------------------------------------------


def _fmt(name: str) -> str:
    # escaped identifiers end at whitespace
    return name + " " if name.startswith("\\") else name


def _join(names: Iterable[str]) -> str:
    return ", ".join(_fmt(n) for n in names)


def format_gate(g: GateInstance) -> str:
    return f"{g.op.value.lower()} {_fmt(g.name)} ({_join((g.output, *g.inputs))});"


def emit_netlist(nl: Netlist) -> str:
    lines = [f"module {_fmt(nl.module_name)} ({_join(n for n, _ in nl.ports)});"]
    if nl.inputs:
        lines.append(f"  input {_join(nl.inputs)};")
    if nl.outputs:
        lines.append(f"  output {_join(nl.outputs)};")
    if nl.wires:
        lines.append(f"  wire {_join(nl.wires)};")
    lines.extend("  " + format_gate(g) for g in nl.gates)
    lines.extend("  " + item for item in nl.opaque_items)
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


# -- analysis ----------------------------------------------------------------


def characterize(*netlists: Netlist) -> list[GateType]:
    """Distinct gate types, sorted by operator then fan-in."""
    types = {g.gate_type for nl in netlists for g in nl.gates}
    return sorted(types, key=GateType.sort_key)


def topological_gates(nl: Netlist) -> list[GateInstance]:
    ts = TopologicalSorter(
        {g.output: [n for n in g.inputs if nl.driver(n)] for g in nl.gates}
    )
    return [nl.driver(net) for net in ts.static_order()]


def critical_path_depth(nl: Netlist) -> int:
    """Gates on the longest path ending at a primary output.

    Nets not driven by a parsed gate (inputs, constants, opaque outputs)
    have depth 0.
    """
    depth: dict[str, int] = {}
    for g in topological_gates(nl):
        depth[g.output] = 1 + max(depth.get(n, 0) for n in g.inputs)
    return max((depth.get(o, 0) for o in nl.outputs), default=0)


@dataclass(frozen=True)
class OverheadReport:
    original_gate_count: int
    pirated_gate_count: int
    gate_count_overhead_pct: float | None
    original_depth: int
    pirated_depth: int
    depth_overhead_pct: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _pct(before: int, after: int) -> float | None:
    # None marks an undefined percentage (empty original)
    if before == 0:
        return None
    return 100.0 * (after - before) / before


def overhead(original: Netlist, pirated: Netlist) -> OverheadReport:
    g0, g1 = len(original.gates), len(pirated.gates)
    d0, d1 = critical_path_depth(original), critical_path_depth(pirated)
    return OverheadReport(g0, g1, _pct(g0, g1), d0, d1, _pct(d0, d1))


# -- simulation --------------------------------------------------------------

_OPAQUE_IDENT_RE = re.compile(r"\\\S+|[A-Za-z_][A-Za-z0-9_$]*")


def scan_interface(nl: Netlist) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Simulation inputs and observed nets under full-scan assumptions.

    Nets read by gates but driven by nothing parsed (e.g. flip-flop outputs)
    become pseudo-inputs; gate-driven nets referenced by opaque items become
    pseudo-outputs.
    """
    known = set(nl.inputs)
    pseudo_in: list[str] = []
    for g in nl.gates:
        for n in g.inputs:
            if n not in known and n not in CONSTANTS and nl.driver(n) is None:
                known.add(n)
                pseudo_in.append(n)
    for o in nl.outputs:
        if o not in known and nl.driver(o) is None:
            known.add(o)
            pseudo_in.append(o)
    observed = list(nl.outputs)
    seen = set(observed)
    for item in nl.opaque_items:
        for name in _OPAQUE_IDENT_RE.findall(item):
            if name not in seen and nl.driver(name) is not None:
                seen.add(name)
                observed.append(name)
    return nl.inputs + tuple(sorted(pseudo_in)), tuple(observed)


def simulate(
    nl: Netlist, stimulus: Mapping[str, np.ndarray], observe: Iterable[str]
) -> dict[str, np.ndarray]:
    """Propagate packed stimulus words through the gates."""
    words = len(next(iter(stimulus.values()))) if stimulus else 1
    env: dict[str, np.ndarray] = dict(stimulus)
    env["1'b0"] = np.zeros(words, dtype=np.uint64)
    env["1'b1"] = ~np.zeros(words, dtype=np.uint64)
    for g in topological_gates(nl):
        env[g.output] = apply_packed(g.op, [env[n] for n in g.inputs])
    return {o: env[o] for o in observe}
