"""Single-output Boolean circuits in assignment form, e.g. ``Y = NAND(A1, A2)``.

This is the representation exchanged with language models. Evaluation is
exhaustive: :func:`truth_table` sweeps all ``2**n`` input vectors with the
packed evaluator in :mod:`netrewrite.ops`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from netrewrite.ops import (
    ArityError,
    Op,
    apply_packed,
    exhaustive_patterns,
    first_set_bit,
    gate_semantics,
    unpack_bits,
    valid_mask,
)

__all__ = [
    "MAX_INPUTS",
    "Assignment",
    "BooleanCircuit",
    "CircuitSyntaxError",
    "Comparison",
    "TruthTable",
    "compare",
    "equivalent",
    "gate_semantics",
    "operators_used",
    "parse_boolean_circuit",
    "truth_table",
]

MAX_INPUTS = 16

IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
ASSIGNMENT_RE = re.compile(
    rf"^\s*(?P<target>{IDENT})\s*=\s*(?P<op>[A-Za-z]+)\s*\(\s*"
    rf"(?P<args>{IDENT}(?:\s*,\s*{IDENT})*)\s*\)\s*$"
)


class CircuitSyntaxError(ValueError):
    def __init__(self, line: int | None, reason: str):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + reason)


@dataclass(frozen=True)
class Assignment:
    target: str
    op: Op
    args: tuple[str, ...]

    def __post_init__(self) -> None:
        self.op.check_arity(len(self.args))

    def __str__(self) -> str:
        return f"{self.target} = {self.op.value}({', '.join(self.args)})"


@dataclass(frozen=True)
class BooleanCircuit:
    statements: tuple[Assignment, ...]
    inputs: tuple[str, ...]
    output: str

    @classmethod
    def from_statements(cls, statements: Iterable[Assignment]) -> "BooleanCircuit":
        """Validate ordering/single-assignment and derive inputs and output."""
        statements = tuple(statements)
        if not statements:
            raise CircuitSyntaxError(None, "circuit has no assignments")
        assigned: set[str] = set()
        inputs: list[str] = []
        for lineno, st in enumerate(statements, 1):
            for arg in st.args:
                if arg in assigned or arg in inputs:
                    continue
                if any(later.target == arg for later in statements[lineno:]):
                    raise CircuitSyntaxError(
                        lineno, f"{arg} is used before it is assigned"
                    )
                inputs.append(arg)
            if st.target in assigned:
                raise CircuitSyntaxError(lineno, f"{st.target} is assigned twice")
            if st.target in inputs:
                raise CircuitSyntaxError(
                    lineno, f"{st.target} is used before it is assigned"
                )
            assigned.add(st.target)
        output = "Y" if "Y" in assigned else statements[-1].target
        return cls(statements, tuple(inputs), output)

    @property
    def text(self) -> str:
        return "\n".join(str(st) for st in self.statements)

    def __str__(self) -> str:
        return self.text


def parse_boolean_circuit(text: str) -> BooleanCircuit:
    """Parse assignment lines; blank lines are skipped.

    Errors carry the 1-based line number of the offending source line.
    """
    statements = []
    linenos = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = ASSIGNMENT_RE.match(line)
        if m is None:
            raise CircuitSyntaxError(
                lineno, f"expected `name = OP(arg, ...)`, got {line.strip()!r}"
            )
        try:
            op = Op.parse(m["op"])
        except ValueError as exc:
            raise CircuitSyntaxError(lineno, str(exc)) from None
        args = tuple(a.strip() for a in m["args"].split(","))
        try:
            statements.append(Assignment(m["target"], op, args))
        except ArityError as exc:
            raise CircuitSyntaxError(lineno, str(exc)) from None
        linenos.append(lineno)
    if not statements:
        raise CircuitSyntaxError(None, "no assignment lines found")
    try:
        return BooleanCircuit.from_statements(statements)
    except CircuitSyntaxError as exc:
        # map statement index back to the source line
        line = linenos[exc.line - 1] if exc.line is not None else None
        raise CircuitSyntaxError(line, exc.reason) from None


@dataclass(frozen=True)
class TruthTable:
    """Output bits indexed by the input vector read as an unsigned integer."""

    num_inputs: int
    words: np.ndarray

    @property
    def bits(self) -> np.ndarray:
        return unpack_bits(self.words, 1 << self.num_inputs)

    def bitstring(self) -> str:
        """Bits in index order, index 0 first."""
        return "".join(str(b) for b in self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.num_inputs == other.num_inputs and bool(
            np.array_equal(self.words, other.words)
        )

    def __len__(self) -> int:
        return 1 << self.num_inputs


def _evaluate(circuit: BooleanCircuit, inputs: tuple[str, ...]) -> np.ndarray:
    n = len(inputs)
    if n > MAX_INPUTS:
        raise ValueError(
            f"circuit has {n} inputs; exhaustive evaluation is capped at {MAX_INPUTS}"
        )
    env = dict(zip(inputs, exhaustive_patterns(n)))
    for st in circuit.statements:
        env[st.target] = apply_packed(st.op, [env[a] for a in st.args])
    return env[circuit.output] & valid_mask(n)


def truth_table(
    circuit: BooleanCircuit, input_order: tuple[str, ...] | None = None
) -> TruthTable:
    order = circuit.inputs if input_order is None else input_order
    return TruthTable(len(order), _evaluate(circuit, order))


def evaluate(circuit: BooleanCircuit, assignment: dict[str, int]) -> int:
    """Scalar evaluation, one gate at a time."""
    env = dict(assignment)
    for st in circuit.statements:
        env[st.target] = gate_semantics(st.op, [env[a] for a in st.args])
    return env[circuit.output]


class Comparison(NamedTuple):
    equivalent: bool
    reason: str = ""
    counterexample: dict[str, int] | None = None


def compare(a: BooleanCircuit, b: BooleanCircuit) -> Comparison:
    """Exhaustive equivalence with inputs matched by name."""
    if set(a.inputs) != set(b.inputs):
        return Comparison(
            False,
            "input mismatch: expected inputs "
            f"{', '.join(a.inputs)}, got {', '.join(b.inputs)}",
        )
    order = a.inputs
    diff = truth_table(a, order).words ^ truth_table(b, order).words
    idx = first_set_bit(diff)
    if idx is None:
        return Comparison(True)
    vector = {name: (idx >> i) & 1 for i, name in enumerate(order)}
    return Comparison(False, "outputs differ", vector)


def equivalent(a: BooleanCircuit, b: BooleanCircuit) -> bool:
    return compare(a, b).equivalent


def operators_used(circuit: BooleanCircuit) -> set[Op]:
    return {st.op for st in circuit.statements}
