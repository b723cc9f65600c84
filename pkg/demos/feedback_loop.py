"""Watch the rewrite loop recover from bad answers.

A scripted backend plays a model that first breaks the format, then uses a
forbidden operator, then gets the logic wrong, and finally answers well.

    python3 demos/feedback_loop.py
"""

from netrewrite.llm import ScriptedBackend
from netrewrite.netlist import GateType
from netrewrite.ops import Op
from netrewrite.pipeline import generate_transformation
from netrewrite.translate import OperatorSet

replies = [
    "Sure! Y <- NAND(A1, A2)",
    "Y = AND(A1, A2)",
    "Y = NAND(A1, A2)",
    "N1 = NAND(A1, A2)\nY = NAND(N1, N1)",
]
outcome = generate_transformation(GateType(Op.AND, 2), OperatorSet.of("NAND"), ScriptedBackend(replies), attempts=5)

for i, (role, text) in enumerate(outcome.conversation.messages):
    print(f"--- {role} ({i})\n{text}")

print(outcome.summary())
