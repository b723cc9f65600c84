import random

import pytest

from netrewrite.fixtures import FIXTURES, load_fixture
from netrewrite.llm import OracleBackend
from netrewrite.netlist import characterize, parse_netlist
from netrewrite.pipeline import build_dictionary


@pytest.fixture(scope="session")
def fixtures():
    return {name: load_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def c17(fixtures):
    return fixtures["c17"]


@pytest.fixture(scope="session")
def oracle():
    return OracleBackend()


@pytest.fixture(scope="session")
def oracle_dict(fixtures, oracle):
    """Oracle dictionary covering every bundled fixture."""
    return build_dictionary(characterize(*fixtures.values()), oracle)


@pytest.fixture
def rng():
    return random.Random(1234)


SMALL = """\
module small (a, b, c, y, z);
  input a, b, c;
  output y, z;
  wire t;
  and g1 (t, a, b);
  or g2 (y, t, c);
  xor g3 (z, a, c);
endmodule
"""


@pytest.fixture
def small():
    return parse_netlist(SMALL)


# -- acceptance summary ----------------------------------------------------------
# Tests marked ``acceptance(n, title)`` are folded into one PASS/FAIL line per
# criterion at the end of the run. ``criterion_note`` attaches measured values.

_criteria: dict[int, dict] = {}


@pytest.fixture
def criterion_note(request):
    def note(text: str) -> None:
        request.node.user_properties.append(("note", text))

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None:
        return
    if rep.when == "call" or rep.failed:
        n, title = mark.args
        entry = _criteria.setdefault(n, {"title": title, "ok": True, "notes": []})
        entry["ok"] = entry["ok"] and rep.passed
        if rep.when == "call":
            entry["notes"] += [v for k, v in item.user_properties if k == "note"]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        e = _criteria[n]
        line = f"criterion {n}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        if e["notes"]:
            line += "  [" + "; ".join(e["notes"]) + "]"
        terminalreporter.write_line(line)
