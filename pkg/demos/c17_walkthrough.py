"""Pirate the six-gate c17 benchmark by hand, one step at a time.

    python3 demos/c17_walkthrough.py
"""

import random

from netrewrite.fixtures import load_fixture
from netrewrite.llm import OracleBackend
from netrewrite.netlist import characterize, emit_netlist, overhead
from netrewrite.pipeline import MappingStrategy, build_dictionary, pirate_netlist, verify_equivalence

c17 = load_fixture("c17")
print(f"c17 has {len(c17.gates)} gates of types {sorted(str(t) for t in characterize(c17))}")

# Every gate type in the design needs one rewrite per allowed operator set.
dictionary = build_dictionary(characterize(c17), OracleBackend())
for gt in dictionary.gate_types():
    for ops, circuit in dictionary.options(gt):
        print(f"\n{gt} using {ops}:\n{circuit.text}")

pirated = pirate_netlist(c17, dictionary, MappingStrategy.AND_NOT, random.Random(0))
print("\n" + emit_netlist(pirated))

verdict = verify_equivalence(c17, pirated)
print(f"equivalence: {verdict.status} over {verdict.vectors} vectors")
print(overhead(c17, pirated).as_dict())
