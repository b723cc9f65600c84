"""Run a small piracy campaign and print the summary table.

    python3 demos/campaign.py
"""

from netrewrite.detectors import DETECTORS
from netrewrite.fixtures import load_fixture
from netrewrite.llm import OracleBackend
from netrewrite.netlist import characterize
from netrewrite.pipeline import ALL_STRATEGIES, CampaignTarget, build_dictionary, run_campaign

names = ["c17", "adder8", "parity16"]
targets = [CampaignTarget(n, load_fixture(n)) for n in names]
types = characterize(*(t.netlist for t in targets))
dictionary = build_dictionary(types, OracleBackend())

report = run_campaign(targets, dictionary, ALL_STRATEGIES, repeats=3, detectors=list(DETECTORS.values()), seed=1)
print(report.table())
