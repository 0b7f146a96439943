"""Discrete closed planar curves and their local geometry.

A shape is represented by a periodic polygon of N nodes.  Tangent vectors
of the shape manifold are normal fields: one scalar per node, the field
h = alpha * n.  Normal fields are passed around as plain 1-D float arrays;
``as_field`` validates them at operation boundaries.

Derived geometry (unit tangent, outward unit normal, curvature, node
quadrature weights) is computed once per curve and cached on first use.
"""

import json

import numpy as np

from .errors import DegenerateCurve, DimensionMismatch, ShapeDegenerate

MIN_NODES = 8


def as_field(c, values, name="field"):
    """Validate a per-node scalar field against curve c and return it as
    a float array.  Raises DimensionMismatch on length or finiteness
    violations."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] != c.n_nodes:
        raise DimensionMismatch(
            f"{name}: expected {c.n_nodes} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionMismatch(f"{name}: contains non-finite values")
    return arr


def signed_area(nodes):
    """Shoelace area of the closed polygon; positive for counterclockwise."""
    x, y = nodes[:, 0], nodes[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return 0.5 * float(np.sum(x * yn - xn * y))


def _segments_intersect(nodes):
    """True if any two non-adjacent closed-polygon segments properly cross."""
    n = len(nodes)
    a = nodes
    b = np.roll(nodes, -1, axis=0)
    d = b - a
    for i in range(n - 2):
        # adjacent segments share an endpoint and are skipped
        js = np.arange(i + 2, n if i > 0 else n - 1)
        r = a[js] - a[i]
        dj = d[js]
        den = d[i, 0] * dj[:, 1] - d[i, 1] * dj[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (r[:, 0] * dj[:, 1] - r[:, 1] * dj[:, 0]) / den
            u = (r[:, 0] * d[i, 1] - r[:, 1] * d[i, 0]) / den
        hit = (np.abs(den) > 1e-15) & (t > 0) & (t < 1) & (u > 0) & (u < 1)
        if hit.any():
            return True
    return False


def check_simple(curve_or_nodes):
    """True iff the closed polygon is admissible: no two non-adjacent
    segments intersect and the orientation is counterclockwise.

    Orientation is part of the test because a curve update that flips the
    winding has passed through a degenerate state even when the final
    polygon does not self-cross (for example a circle pushed inward
    through its own center).  Accepts a DiscreteCurve or a raw (N, 2)
    node array.
    """
    nodes = curve_or_nodes.nodes if isinstance(curve_or_nodes, DiscreteCurve) \
        else np.asarray(curve_or_nodes, dtype=float)
    if signed_area(nodes) <= 0.0:
        return False
    return not _segments_intersect(nodes)


class CurveGeometry:
    """Per-node geometric data of a DiscreteCurve.

    tangent   : (N, 2) unit tangent from periodic central differences
    normal    : (N, 2) outward unit normal (tangent rotated by -90 degrees)
    curvature : (N,) signed curvature
    weights   : (N,) quadrature weights for the length measure ds;
                their sum is exactly the polygon perimeter
    """

    __slots__ = ("tangent", "normal", "curvature", "weights")

    def __init__(self, tangent, normal, curvature, weights):
        self.tangent = tangent
        self.normal = normal
        self.curvature = curvature
        self.weights = weights
        for arr in (tangent, normal, curvature, weights):
            arr.setflags(write=False)


class DiscreteCurve:
    """Periodic polygon of N planar nodes, oriented counterclockwise.

    Parameters
    ----------
    nodes : (N, 2) array of node coordinates, N >= 8, consecutive nodes
        distinct.  Orientation is normalized on construction: if the
        signed area is negative the node order is reversed so that the
        outward-normal convention holds unconditionally.
    params : optional (N,) strictly increasing parameter values in
        [0, 2*pi); defaults to the equidistant grid 2*pi*i/N.
    require_simple : when True (default) a self-intersecting polygon is
        rejected with ShapeDegenerate.  Pass False to build a
        non-admissible polygon on purpose, e.g. to feed check_simple.
    """

    def __init__(self, nodes, params=None, require_simple=True):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2:
            raise DegenerateCurve(f"nodes must be (N, 2), got {nodes.shape}")
        n = nodes.shape[0]
        if n < MIN_NODES:
            raise DegenerateCurve(f"need at least {MIN_NODES} nodes, got {n}")
        if not np.all(np.isfinite(nodes)):
            raise DegenerateCurve("nodes contain non-finite coordinates")
        seg = np.linalg.norm(np.roll(nodes, -1, axis=0) - nodes, axis=1)
        if np.any(seg == 0.0):
            raise DegenerateCurve("consecutive nodes coincide")

        if params is None:
            params = 2.0 * np.pi * np.arange(n) / n
        else:
            params = np.array(params, dtype=float)
            if params.shape != (n,):
                raise DegenerateCurve("params length must match node count")
            if np.any(np.diff(params) <= 0) or params[0] < 0 or params[-1] >= 2 * np.pi:
                raise DegenerateCurve("params must be strictly increasing in [0, 2*pi)")

        if signed_area(nodes) < 0.0:
            # reverse traversal so orientation is counterclockwise; keep the
            # first node first and mirror the parameter gaps
            order = np.concatenate([[0], np.arange(n - 1, 0, -1)])
            nodes = nodes[order]
            gaps = np.diff(np.append(params, params[0] + 2 * np.pi))
            params = params[0] + np.concatenate([[0.0], np.cumsum(gaps[::-1][:-1])])

        if require_simple and not check_simple(nodes):
            raise ShapeDegenerate("polygon self-intersects")

        nodes.setflags(write=False)
        params.setflags(write=False)
        self.nodes = nodes
        self.params = params
        self._geometry = None

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def geometry(self):
        if self._geometry is None:
            self._geometry = _compute_geometry(self)
        return self._geometry

    # -- serialization ----------------------------------------------------

    def to_csv(self, path):
        """Write one ``x,y`` row per node.  repr() gives the shortest
        decimal that round-trips, so reading the file back reproduces the
        coordinates exactly."""
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            for x, y in self.nodes:
                fh.write(f"{float(x)!r},{float(y)!r}\n")

    @classmethod
    def from_csv(cls, path, **kwargs):
        rows = []
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                x, y = line.split(",")
                rows.append((float(x), float(y)))
        return cls(np.array(rows), **kwargs)

    def to_json(self, path):
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            json.dump({"nodes": [[float(x), float(y)] for x, y in self.nodes]}, fh)
            fh.write("\n")

    @classmethod
    def from_json(cls, path, **kwargs):
        with open(path, "r", encoding="ascii") as fh:
            data = json.load(fh)
        return cls(np.array(data["nodes"], dtype=float), **kwargs)


def _param_gaps(params):
    """Forward parameter gaps d+ with periodic wrap, and backward gaps d-."""
    dp = np.diff(np.append(params, params[0] + 2 * np.pi))
    return dp, np.roll(dp, 1)


def _compute_geometry(c):
    nodes = c.nodes
    fwd = np.roll(nodes, -1, axis=0) - nodes
    bwd = nodes - np.roll(nodes, 1, axis=0)
    central = np.roll(nodes, -1, axis=0) - np.roll(nodes, 1, axis=0)
    norms = np.linalg.norm(central, axis=1)
    if np.any(norms == 0.0):
        raise DegenerateCurve("central difference stencil produced a zero tangent")
    tangent = central / norms[:, None]
    # rotate by -90 degrees: outward for counterclockwise orientation
    normal = np.column_stack([tangent[:, 1], -tangent[:, 0]])
    weights = 0.5 * (np.linalg.norm(fwd, axis=1) + np.linalg.norm(bwd, axis=1))

    # curvature kappa = (x'y'' - y'x'') / |(x', y')|^3 with three-point
    # stencils in the parameter; the nonuniform weights reduce to the
    # classical central differences on the equidistant grid
    dp, dm = _param_gaps(c.params)
    fp = np.roll(nodes, -1, axis=0)
    fm = np.roll(nodes, 1, axis=0)
    den = (dm * dp * (dm + dp))[:, None]
    d1 = (dm[:, None] ** 2 * fp - dp[:, None] ** 2 * fm
          + ((dp ** 2 - dm ** 2))[:, None] * nodes) / den
    d2 = 2.0 * (dm[:, None] * fp + dp[:, None] * fm - (dm + dp)[:, None] * nodes) / den
    speed = np.linalg.norm(d1, axis=1)
    if np.any(speed == 0.0):
        raise DegenerateCurve("zero speed in curvature stencil")
    curvature = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed ** 3
    return CurveGeometry(tangent, normal, curvature, weights)


def build_geometry(c):
    """Geometry of curve c (cached on the curve after the first call)."""
    return c.geometry


def retract(c, h, t=1.0):
    """Move every node of c by t*h_i along its outward normal.

    The straight-line retraction of the shape manifold: r_c(t h) has nodes
    nodes_i + t h_i n_i with parameters carried over unchanged.  The moved
    polygon must stay admissible: ShapeDegenerate is raised when it
    self-intersects, or when a local tangent reverses against the
    pre-step tangent.  The tangent test catches updates that drag the
    curve through itself and out the other side (for example a unit
    circle moved inward by 1.5), which end simple and counterclockwise
    again and so would slip past a pure self-intersection check.
    """
    h = as_field(c, h, "h")
    geo = c.geometry
    nodes = c.nodes + float(t) * h[:, None] * geo.normal
    chord = np.roll(nodes, -1, axis=0) - np.roll(nodes, 1, axis=0)
    if np.any(np.sum(chord * geo.tangent, axis=1) <= 0.0):
        raise ShapeDegenerate("retraction reversed the local orientation of the curve")
    if not check_simple(nodes):
        raise ShapeDegenerate("retracted polygon self-intersects")
    return DiscreteCurve(nodes, params=c.params, require_simple=False)


def tangential_second_derivative(c, u):
    """Discrete second derivative u_tautau along the curve.

    Three-point second-difference stencil for unequally spaced points,
    with the chord lengths to the two neighbors as arc distances:

        u_tautau(i) ~ 2 [ u(i-1)/(d-(d-+d+)) - u(i)/(d-d+) + u(i+1)/(d+(d-+d+)) ]

    Exact for fields quadratic in arc length; second order on smooth data.
    """
    u = as_field(c, u, "u")
    dp = np.linalg.norm(np.roll(c.nodes, -1, axis=0) - c.nodes, axis=1)
    dm = np.roll(dp, 1)
    up = np.roll(u, -1)
    um = np.roll(u, 1)
    return 2.0 * (dm * up + dp * um - (dm + dp) * u) / (dm * dp * (dm + dp))
