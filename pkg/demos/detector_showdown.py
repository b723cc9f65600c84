"""Score one pirated multiplier against the four detector analogs.

    python3 demos/detector_showdown.py [strategy]
"""

import random
import sys

from netrewrite.detectors import DETECTORS, verdict
from netrewrite.fixtures import load_fixture
from netrewrite.llm import OracleBackend
from netrewrite.netlist import characterize, overhead
from netrewrite.pipeline import MappingStrategy, build_dictionary, pirate_netlist

strategy = MappingStrategy.parse(sys.argv[1] if len(sys.argv) > 1 else "RANDOM")
original = load_fixture("mult5")
dictionary = build_dictionary(characterize(original), OracleBackend())
pirated = pirate_netlist(original, dictionary, strategy, random.Random(7))

rep = overhead(original, pirated)
print(f"mult5 via {strategy.value}: {rep.original_gate_count} -> {rep.pirated_gate_count} gates, "
      f"depth {rep.original_depth} -> {rep.pirated_depth}")
for name, det in DETECTORS.items():
    s = det.score(original, pirated)
    print(f"  {name:14s} {s.value:.3f}  threshold {det.threshold}  {verdict(s, det.threshold)}")

