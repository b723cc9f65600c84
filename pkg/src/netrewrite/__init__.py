"""Gate-level netlist rewriting with a checked, feedback-driven rewrite loop,
plus similarity detectors for measuring how far rewrites drift from the
original."""

__version__ = "0.1.0"
