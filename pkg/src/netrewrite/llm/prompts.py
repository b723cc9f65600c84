"""Prompt text, feedback messages, and response clean-up."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Literal

from netrewrite.boolexpr import ASSIGNMENT_RE, BooleanCircuit
from netrewrite.translate import OperatorSet

FailureKind = Literal["syntax", "operators", "functionality"]

FUNCTIONALITY_FEEDBACK = (
    "This is not correct because the functionality is not the same as the "
    "original circuit. Can you try again? Below is the original circuit:"
)

_ALLOWED_LINE = "Use ONLY the following Boolean operators: {ops}."
_ALLOWED_RE = re.compile(r"Use ONLY the following Boolean operators: ([A-Z, ]+)\.")


@dataclass(frozen=True)
class CheckFailure:
    kind: FailureKind
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


def _names(circuit: BooleanCircuit) -> tuple[str, str]:
    return ", ".join(circuit.inputs), circuit.output


def build_initial_prompt(circuit: BooleanCircuit, ops: OperatorSet) -> str:
    inputs, output = _names(circuit)
    op_names = ", ".join(op.value for op in ops)
    first = ops.operators[0]
    if first.unary:
        example = f"N1 = {first.value}(A1)"
    else:
        args = list(circuit.inputs[:2])
        if len(args) == 1:
            args *= 2
        example = f"N1 = {first.value}({', '.join(args)})"
    return (
        "The following circuit is written in a generic Boolean function format, "
        "one assignment per line:\n"
        "\n"
        f"{circuit.text}\n"
        "\n"
        "Rewrite this circuit so that it has exactly the same functionality. "
        + _ALLOWED_LINE.format(ops=op_names)
        + " No other operators may appear.\n"
        "Output only the assignment lines of the rewritten circuit, one per line, "
        f"in the same format as above (for example: {example}).\n"
        f"Keep the input names {inputs} and the output name {output} unchanged; "
        "name intermediate variables N1, N2, N3, and so on.\n"
    )


def build_feedback_prompt(failure: CheckFailure, original: BooleanCircuit | str) -> str:
    if failure.kind == "functionality":
        head = FUNCTIONALITY_FEEDBACK
    elif failure.kind == "syntax":
        head = (
            "This is not correct because the response does not follow the required "
            f"format ({failure.detail}). Every line must have the form "
            "`name = OPERATOR(input1, input2, ...)`, for example "
            "`N1 = NAND(A1, A2)`, with nothing else on the line. "
            "Can you try again? Below is the original circuit:"
        )
    elif failure.kind == "operators":
        head = (
            "This is not correct because the circuit uses Boolean operators that "
            f"are not allowed ({failure.detail}). Use only the allowed operators. "
            "Can you try again? Below is the original circuit:"
        )
    else:
        raise ValueError(f"unknown failure kind {failure.kind!r}")
    body = original if isinstance(original, str) else original.text
    return f"{head}\n\n{body}\n"


_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_circuit_text(response: str) -> str:
    """Keep only assignment lines, preferring fenced code blocks."""
    blocks = _FENCE_RE.findall(response)
    candidates = [b for b in blocks if any(ASSIGNMENT_RE.match(l) for l in b.splitlines())]
    body = "\n".join(candidates) if candidates else response
    lines = [l.strip() for l in body.splitlines() if ASSIGNMENT_RE.match(l)]
    return "\n".join(lines)


def allowed_from_prompt(prompt: str) -> OperatorSet | None:
    m = _ALLOWED_RE.search(prompt)
    return OperatorSet.parse(m.group(1)) if m else None


def build_netlist_prompt(body: str, ops: OperatorSet, translated: bool) -> str:
    """Whole-netlist rewrite request, used only when per-gate
    characterization is switched off."""
    op_names = ", ".join(op.value for op in ops)
    if translated:
        fmt = "generic Boolean function format, one assignment per line"
        out = "Output only the assignment lines of the rewritten circuit, in the same format."
    else:
        fmt = "gate-level Verilog"
        out = "Output only the complete rewritten Verilog module."
    return (
        f"The following circuit is written in {fmt}:\n\n{body}\n\n"
        "Rewrite this circuit so that it has exactly the same functionality. "
        + _ALLOWED_LINE.format(ops=op_names)
        + " No other operators may appear.\n"
        f"{out}\nKeep all primary input and output names unchanged.\n"
    )
