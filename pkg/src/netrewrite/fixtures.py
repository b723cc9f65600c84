"""Bundled example netlists."""

from __future__ import annotations

from importlib import resources

from netrewrite.netlist import Netlist, parse_netlist

FIXTURES = ("c17", "adder8", "mult5", "alu7", "parity16", "count2")


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    return resources.files("netrewrite.data").joinpath(f"{name}.v").read_text(encoding="utf-8")


def load_fixture(name: str) -> Netlist:
    return parse_netlist(fixture_text(name))
