"""The two-method benchmark: steepest descent versus Newton on the
quadratic objective, from a pinched starting shape to the optimal
ellipse, with per-iteration CSV, a side-by-side comparison table, and
SVG overlays of the iterate curves.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..curve import DiscreteCurve
from ..errors import InsufficientData, ShapeOptError
from ..functional import VolumeFunctional
from ..solver import (METHODS, NEWTON_GENERAL_FORM, NEWTON_MULTIPLICATIVE,
                      STEEPEST_DESCENT, SolverConfig, convergence_diagnostics,
                      optimize)
from .svg import render_curves

METHOD_SLUGS = {
    STEEPEST_DESCENT: "sd",
    NEWTON_MULTIPLICATIVE: "newton",
    NEWTON_GENERAL_FORM: "newton-general",
}

CSV_HEADER = "k,f,dbar,alpha,step_norm,contraction_ratio,quadratic_ratio"


@dataclass(frozen=True)
class ExperimentSpec:
    """Configuration of a benchmark run.

    The defaults (mu=2, N=100, A=0, exact line search) are the
    configuration of the reference tables the regression suite compares
    against.  stop_distance is tighter than the library solver default
    because the recorded reference trajectories continue below 1e-8;
    seed feeds only the randomized property suite.
    """
    mu: float = 2.0
    N: int = 100
    A: float = 0.0
    methods: tuple = (STEEPEST_DESCENT, NEWTON_MULTIPLICATIVE)
    seed: int = 0
    output_dir: str = "."
    stop_distance: float = 5e-9

    def __post_init__(self):
        if not self.mu >= 1.0:
            raise ValueError("mu must be >= 1")
        if self.N < 8:
            raise ValueError("N must be >= 8")
        if not self.A >= 0.0:
            raise ValueError("A must be >= 0")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; expected among {METHODS}")
        if not self.stop_distance > 0.0:
            raise ValueError("stop_distance must be positive")


def initial_shape(N):
    """Pinched starting curve of the benchmark,

        c0(s) = (1/2) (cos s - 0.15 |1 - sin 2s| cos s,
                       sin s - 0.15 |1 - cos 2s| cos s),

    sampled at s_i = 2*pi*i/N.  Star-shaped but far from elliptical.
    """
    s = 2.0 * np.pi * np.arange(N) / N
    x = 0.5 * (np.cos(s) - 0.15 * np.abs(1.0 - np.sin(2.0 * s)) * np.cos(s))
    y = 0.5 * (np.sin(s) - 0.15 * np.abs(1.0 - np.cos(2.0 * s)) * np.cos(s))
    return DiscreteCurve(np.column_stack([x, y]))


def reference_ellipse(N, mu):
    """The optimal shape x1^2 + mu^2 x2^2 = 1, nodes (cos t_i, sin t_i / mu)."""
    t = 2.0 * np.pi * np.arange(N) / N
    return DiscreteCurve(np.column_stack([np.cos(t), np.sin(t) / mu]))


def _fmt(value):
    return "" if value is None else repr(value)


def _write_csv(path, records):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in records:
            row = (r.index, r.objective, r.distance, r.step_scale, r.step_norm,
                   r.contraction_ratio, r.quadratic_ratio)
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _rows_json(records):
    return [
        {"k": r.index, "f": r.objective, "dbar": r.distance, "alpha": r.step_scale,
         "step_norm": r.step_norm, "contraction_ratio": r.contraction_ratio,
         "quadratic_ratio": r.quadratic_ratio}
        for r in records
    ]


def _comparison_text(per_method):
    """Side-by-side table, four significant digits for f, scientific
    notation for the distance, two decimals for the step parameter."""
    slugs = list(per_method)
    header = ["   k"]
    for slug in slugs:
        header += [f"{'f_' + slug:>10}", f"{'d_' + slug:>10}", f"{'a_' + slug:>6}"]
    lines = ["  ".join(header)]
    depth = max(len(records) for records in per_method.values())
    for k in range(depth):
        row = [f"{k:4d}"]
        for slug in slugs:
            records = per_method[slug]
            if k < len(records):
                r = records[k]
                row += [f"{r.objective:10.4f}", f"{r.distance:10.3e}",
                        "  --- " if r.step_scale is None else f"{r.step_scale:6.2f}"]
            else:
                row += [" " * 10, " " * 10, " " * 6]
        lines.append("  ".join(row))
    return "\n".join(lines) + "\n"


def run_table1(spec):
    """Run the configured methods from the pinched start and write the
    comparison artifacts into spec.output_dir.

    Per method: <out>/table1_<slug>.csv (one row per visited curve) and
    <out>/iterates_<slug>.svg (all iterates, blue start to red finish).
    Across methods: table1.txt (side-by-side) and table1.json (full
    precision rows plus late-phase diagnostics).  Outputs are byte-stable
    for a fixed spec.  On a solver error the partial trajectory is
    flushed before the error propagates.  Returns a report dict with the
    records, diagnostics, and output paths.
    """
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    c0 = initial_shape(spec.N)
    f = VolumeFunctional.quadratic_mso(spec.mu)
    per_method = {}
    report = {"mu": spec.mu, "N": spec.N, "A": spec.A, "methods": {}}
    for method in spec.methods:
        slug = METHOD_SLUGS[method]
        config = SolverConfig(method=method, A=spec.A,
                              stop_distance=spec.stop_distance)
        try:
            records = optimize(c0, f, config)
        except ShapeOptError as exc:
            partial = getattr(exc, "records", [])
            if partial:
                _write_csv(out / f"table1_{slug}.csv", partial)
                render_curves([r.nodes for r in partial], out / f"iterates_{slug}.svg")
            raise
        csv_path = out / f"table1_{slug}.csv"
        svg_path = out / f"iterates_{slug}.svg"
        _write_csv(csv_path, records)
        render_curves([r.nodes for r in records], svg_path)
        try:
            diagnostics = convergence_diagnostics(records)
        except InsufficientData:
            diagnostics = None
        per_method[slug] = records
        report["methods"][slug] = {
            "rows": _rows_json(records),
            "diagnostics": diagnostics,
            "csv": str(csv_path),
            "svg": str(svg_path),
        }

    text_path = out / "table1.txt"
    with open(text_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(_comparison_text(per_method))
    json_path = out / "table1.json"
    with open(json_path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")
    report["records"] = per_method
    report["table_text"] = str(text_path)
    report["table_json"] = str(json_path)
    return report
