"""Experiment orchestration: benchmark shapes, the two-method comparison
run with CSV/JSON/SVG outputs, the seeded property suite, and the CLI."""

from .experiment import ExperimentSpec, initial_shape, reference_ellipse, run_table1
from .properties import run_property_suite

__all__ = [
    "ExperimentSpec",
    "initial_shape",
    "reference_ellipse",
    "run_table1",
    "run_property_suite",
]
