"""Descent loops on the shape manifold: step directions, exact line
search, the optimize driver, and convergence diagnostics.

An iteration is direction -> line search -> retract.  Directions are the
negative Riesz gradient (steepest descent) or a Newton step from one of
the two Hessian representations in ``calculus``.  The exact line search
brackets by doubling and refines by golden section; for the quadratic
objective family it minimizes an exactly differenced objective, so step
lengths remain meaningful even when the objective decrease is far below
the rounding noise of the objective value itself.
"""

from dataclasses import dataclass
from statistics import median

import numpy as np

from .calculus import HessianOperator, hessian_at_solution, solve_hessian
from .curve import as_field, retract
from .errors import (DegenerateCurve, InsufficientData, LineSearchFailed,
                     NotStarShaped, ShapeDegenerate, ShapeOptError)
from .functional import (boundary_kernel, distance_bar, distance_tilde,
                         mso_step_objective)
from .metric import as_params, norm, riesz_gradient

STEEPEST_DESCENT = "steepest-descent"
NEWTON_MULTIPLICATIVE = "newton-multiplicative"
NEWTON_GENERAL_FORM = "newton-general-form"
METHODS = (STEEPEST_DESCENT, NEWTON_MULTIPLICATIVE, NEWTON_GENERAL_FORM)

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ExactLineSearch:
    """Bracketing plus golden-section minimization along the step.

    bracket_max bounds the probed step parameter; tolerance is the final
    bracket width in t.  step_resolution, when set, snaps the minimizer
    to that grid before it is applied (skipped if snapping would destroy
    the decrease).  The default 0.01 grid suppresses sub-noise variation
    of the step parameter and matches the granularity of the recorded
    reference trajectories the regression tests compare against.
    """
    bracket_max: float = 2.0
    tolerance: float = 1e-10
    step_resolution: float | None = 0.01

    def __post_init__(self):
        if not self.bracket_max > 0.0:
            raise ValueError("bracket_max must be positive")
        if not 0.0 < self.tolerance < self.bracket_max:
            raise ValueError("tolerance must lie in (0, bracket_max)")
        if self.step_resolution is not None and not self.step_resolution > 0.0:
            raise ValueError("step_resolution must be positive or None")


@dataclass(frozen=True)
class FixedStep:
    """Constant step parameter t for every iteration."""
    t: float = 1.0

    def __post_init__(self):
        if not self.t > 0.0:
            raise ValueError("fixed step must be positive")


@dataclass(frozen=True)
class SolverConfig:
    method: str = STEEPEST_DESCENT
    A: float = 0.0
    max_iterations: int = 50
    stop_distance: float = 1e-7
    line_search: object = ExactLineSearch()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.stop_distance > 0.0:
            raise ValueError("stop_distance must be positive")
        if self.line_search is not None and not isinstance(
                self.line_search, (ExactLineSearch, FixedStep)):
            raise ValueError("line_search must be ExactLineSearch, FixedStep, or None")

    @property
    def metric(self):
        return as_params(self.A)


@dataclass
class IterationRecord:
    """One row of an optimization run.

    distance is present when a distance surrogate is available (see
    ``optimize``); step fields are absent on the final row.
    contraction_ratio on row k is |step_{k+1}| / |step_k| and
    quadratic_ratio is distance_{k+1} / distance_k**2, both filled in
    retroactively once the next iterate exists.
    """
    index: int
    objective: float
    nodes: np.ndarray
    distance: float = None
    step_scale: float = None
    step_norm: float = None
    contraction_ratio: float = None
    quadratic_ratio: float = None


def step_direction(c, f, config):
    """Descent direction of f at c for the configured method.

    Steepest descent returns the negative gradient.  The multiplicative
    Newton method divides the gradient by the stationary-shape factor
    nu = dpsi_dn evaluated along the current curve; the general-form
    Newton method solves against the full covariant Hessian form.
    """
    params = config.metric
    g, dpsi_dn = boundary_kernel(c, f)
    grad = riesz_gradient(c, params, g)
    if config.method == STEEPEST_DESCENT:
        return -grad
    if config.method == NEWTON_MULTIPLICATIVE:
        if f.is_quadratic_mso:
            H = hessian_at_solution(c, f.mu)
        else:
            H = HessianOperator.multiplication(c, dpsi_dn)
        return -solve_hessian(H, grad, params)
    H = HessianOperator.general_form(c, params, (g, dpsi_dn))
    return -solve_hessian(H, grad, params)


def _decrease_function(c, f, direction):
    """phi(t) = f(r_c(t*direction)) - f(c) as a callable.

    The quadratic family uses the exactly differenced polar objective;
    other functionals evaluate the fan quadrature on the moved polygon,
    with inadmissible probes scored +inf so brackets shrink below them.
    """
    if getattr(f, "is_quadratic_mso", False):
        step_vec = direction[:, None] * c.geometry.normal
        return mso_step_objective(c.nodes, step_vec, f.mu)
    f0 = f.evaluate(c)

    def phi(t):
        try:
            moved = retract(c, direction, t)
            return f.evaluate(moved) - f0
        except (DegenerateCurve, ShapeDegenerate, NotStarShaped):
            return np.inf

    return phi


def line_search_exact(c, f, direction, bracket_max=2.0, tolerance=1e-10,
                      step_resolution=0.01):
    """Step parameter minimizing f along the retracted direction.

    Brackets a descent interval by doubling from t = 1e-3 (halving first
    if even that fails to decrease), refines with golden section to the
    requested bracket width, then snaps to the step_resolution grid when
    that preserves the decrease.  Raises LineSearchFailed when no probed
    step above the tolerance decreases the objective.  For the quadratic
    family the probes themselves skip admissibility checks (the loop
    validates the accepted step when retracting); bracket_max should be
    kept small enough that probed polygons stay star-shaped.
    """
    direction = as_field(c, direction, "direction")
    if not np.any(direction):
        raise LineSearchFailed("zero direction")
    phi = _decrease_function(c, f, direction)

    t0, f0 = 1e-3, phi(1e-3)
    while f0 >= 0.0 and t0 > tolerance:
        t0 *= 0.5
        f0 = phi(t0)
    if f0 >= 0.0 or not np.isfinite(f0):
        raise LineSearchFailed(
            f"no decrease along the direction for any t >= {tolerance:g}")

    lo, a, fa = 0.0, t0, f0
    b = min(2.0 * t0, bracket_max)
    fb = phi(b)
    while fb < fa and b < bracket_max:
        lo, a, fa = a, b, fb
        b = min(2.0 * b, bracket_max)
        fb = phi(b)
    hi = b

    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = phi(x1), phi(x2)
    while hi - lo > tolerance:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = phi(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = phi(x2)
    t_star = 0.5 * (lo + hi)
    if phi(t_star) >= 0.0:
        raise LineSearchFailed("bracket collapsed without decrease")

    if step_resolution:
        t_snap = round(t_star / step_resolution) * step_resolution
        if 0.0 < t_snap <= bracket_max and phi(t_snap) < 0.0:
            return float(t_snap)
    return float(t_star)


def _choose_step(c, f, direction, line_search):
    if line_search is None:
        return 1.0
    if isinstance(line_search, FixedStep):
        return line_search.t
    return line_search_exact(c, f, direction, line_search.bracket_max,
                             line_search.tolerance, line_search.step_resolution)


def _iterate_distance(c, f, reference):
    if getattr(f, "is_quadratic_mso", False):
        return distance_bar(c, f.mu)
    if reference is not None:
        return distance_tilde(c, reference)
    return None


def optimize(c0, f, config, reference=None):
    """Run the configured descent method from c0 on functional f.

    Returns the list of IterationRecords, one per visited curve (the
    starting curve included).  The monitored distance is the radial
    surrogate against the known optimal ellipse for the quadratic family,
    the normal-offset surrogate against ``reference`` when one is given,
    and absent otherwise.  Stopping: distance < config.stop_distance when
    a distance is monitored, step norm < stop_distance otherwise, or
    max_iterations.  Solver errors are re-raised with the partial record
    list attached as ``exc.records``.
    """
    records = []
    c = c0
    params = config.metric
    stop_on_step = False
    try:
        for k in range(config.max_iterations + 1):
            rec = IterationRecord(index=k, objective=f.evaluate(c),
                                  nodes=np.array(c.nodes),
                                  distance=_iterate_distance(c, f, reference))
            records.append(rec)
            if rec.distance is not None and rec.distance < config.stop_distance:
                break
            if stop_on_step or k == config.max_iterations:
                break
            direction = step_direction(c, f, config)
            t = _choose_step(c, f, direction, config.line_search)
            rec.step_scale = t
            rec.step_norm = t * norm(c, params, direction)
            if k > 0 and records[k - 1].step_norm:
                records[k - 1].contraction_ratio = rec.step_norm / records[k - 1].step_norm
            c = retract(c, direction, t)
            if rec.distance is None and rec.step_norm < config.stop_distance:
                stop_on_step = True
        for prev, nxt in zip(records, records[1:]):
            if prev.distance and nxt.distance is not None:
                prev.quadratic_ratio = nxt.distance / prev.distance ** 2
        return records
    except ShapeOptError as exc:
        exc.records = records
        raise


def convergence_diagnostics(records):
    """Late-phase rate summary of an optimization run.

    geometric_factor: median contraction_ratio over the last five steps
    that have one (the linear rate).  quadratic_coefficient: median
    quadratic_ratio (bounded iff convergence is quadratic).  omega_hat:
    2 max_k |step_{k+1}| / |step_k|^2, the empirical affine-invariant
    curvature constant for Newton runs.  Raises InsufficientData for
    fewer than three records.
    """
    if len(records) < 3:
        raise InsufficientData(f"need >= 3 records, got {len(records)}")
    contractions = [r.contraction_ratio for r in records if r.contraction_ratio is not None]
    quad = [r.quadratic_ratio for r in records if r.quadratic_ratio is not None]
    steps = [r.step_norm for r in records if r.step_norm is not None]
    omega = None
    if len(steps) >= 2:
        omega = 2.0 * max(b / a ** 2 for a, b in zip(steps, steps[1:]) if a > 0.0)
    return {
        "iterations": len(records) - 1,
        "geometric_factor": median(contractions[-5:]) if contractions else None,
        "quadratic_coefficient": median(quad) if quad else None,
        "omega_hat": omega,
        "final_objective": records[-1].objective,
        "final_distance": records[-1].distance,
    }
