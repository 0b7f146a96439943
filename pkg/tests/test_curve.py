"""Curve construction, derived geometry, admissibility checks, the
normal-step retraction, and node serialization."""

import numpy as np
import numpy.testing as npt
import pytest

from conftest import circle, figure_eight
from shapeopt import DiscreteCurve, check_simple, retract, tangential_second_derivative
from shapeopt.curve import as_field, signed_area
from shapeopt.errors import DegenerateCurve, DimensionMismatch, ShapeDegenerate
from shapeopt.harness import reference_ellipse


def test_constructor_rejects_bad_shape():
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(np.zeros((10, 3)))


def test_constructor_rejects_too_few_nodes():
    nodes = circle(8).nodes
    DiscreteCurve(nodes)  # eight is the floor
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(nodes[:7])


def test_constructor_rejects_nonfinite():
    nodes = circle(16).nodes.copy()
    nodes[3, 1] = np.nan
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(nodes)


def test_constructor_rejects_coincident_neighbors():
    nodes = circle(16).nodes.copy()
    nodes[5] = nodes[4]
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(nodes)


def test_params_must_match_and_increase():
    c = circle(16)
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(c.nodes, params=c.params[:-1])
    bad = c.params.copy()
    bad[3] = bad[5]
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(c.nodes, params=bad)
    with pytest.raises(DegenerateCurve):
        DiscreteCurve(c.nodes, params=c.params + 2.0 * np.pi)


def test_clockwise_input_is_reoriented():
    c = circle(32)
    cw = DiscreteCurve(c.nodes[::-1].copy())
    assert signed_area(cw.nodes) > 0.0
    npt.assert_allclose(np.sort(cw.nodes, axis=0), np.sort(c.nodes, axis=0))


def test_require_simple_rejects_self_intersection():
    with pytest.raises(ShapeDegenerate):
        DiscreteCurve(figure_eight())
    c = DiscreteCurve(figure_eight(), require_simple=False)
    assert c.n_nodes == 16


def test_check_simple():
    c = circle(64)
    assert check_simple(c)
    assert check_simple(c.nodes)
    assert not check_simple(figure_eight())
    assert not check_simple(c.nodes[::-1])  # clockwise fails the orientation clause


def test_signed_area_circle():
    assert abs(signed_area(circle(400, 1.5).nodes) - np.pi * 1.5 ** 2) < 2e-4 * np.pi


def test_as_field_validation():
    c = circle(16)
    out = as_field(c, [1.0] * 16)
    assert out.shape == (16,)
    with pytest.raises(DimensionMismatch):
        as_field(c, np.ones(15))
    with pytest.raises(DimensionMismatch):
        as_field(c, np.full(16, np.inf))


def test_circle_geometry():
    c = circle(100)
    geo = c.geometry
    radial = c.nodes / np.hypot(c.nodes[:, 0], c.nodes[:, 1])[:, None]
    # tangent is unit, perpendicular to the radius, counterclockwise
    npt.assert_allclose(np.hypot(geo.tangent[:, 0], geo.tangent[:, 1]), 1.0, atol=1e-14)
    assert np.max(np.abs(np.sum(geo.tangent * radial, axis=1))) < 1e-13
    assert np.min(radial[:, 0] * geo.tangent[:, 1] - radial[:, 1] * geo.tangent[:, 0]) > 0.99
    # normal is the outward radial direction
    assert np.min(np.sum(geo.normal * radial, axis=1)) > 1.0 - 1e-12
    npt.assert_allclose(geo.curvature, 1.0, atol=1.5e-3)
    assert abs(geo.weights.sum() - 2.0 * np.pi) < 1.6e-3
    assert np.all(geo.weights > 0.0)


def test_circle_geometry_scales_with_radius():
    geo = circle(100, 2.0).geometry
    npt.assert_allclose(geo.curvature, 0.5, atol=7.5e-4)
    assert abs(geo.weights.sum() - 4.0 * np.pi) < 3.2e-3


def test_curvature_on_nonuniform_parameterization():
    i = np.arange(100)
    theta = 2.0 * np.pi * (i / 100 + 0.03 * np.sin(2.0 * np.pi * i / 100))
    c = DiscreteCurve(np.column_stack([np.cos(theta), np.sin(theta)]), params=theta)
    npt.assert_allclose(c.geometry.curvature, 1.0, atol=2.1e-3)


def test_ellipse_axis_curvature():
    # semi-axes (1, 1/2): analytic curvature 4 at (1,0) and 1/2 at (0,1/2)
    geo = reference_ellipse(100, 2.0).geometry
    assert abs(geo.curvature[0] - 4.0) < 6e-3
    assert abs(geo.curvature[25] - 0.5) < 7.5e-4


def test_geometry_is_cached_and_frozen():
    c = circle(16)
    assert c.geometry is c.geometry
    with pytest.raises(ValueError):
        c.geometry.curvature[0] = 5.0


def test_tangential_second_derivative_oracles():
    c = circle(200)
    theta = c.params
    # on the unit circle arc length equals angle, so (cos)_tautau = -cos
    err1 = np.max(np.abs(tangential_second_derivative(c, np.cos(theta)) + np.cos(theta)))
    assert err1 < 1e-10
    err3 = np.max(np.abs(tangential_second_derivative(c, np.sin(3.0 * theta))
                         + 9.0 * np.sin(3.0 * theta)))
    assert err3 < 300.0 / 200 ** 2


def test_retract_moves_along_normals():
    c = circle(100)
    grown = retract(c, np.full(100, 0.5))
    npt.assert_allclose(np.hypot(grown.nodes[:, 0], grown.nodes[:, 1]), 1.5, atol=1e-12)
    npt.assert_array_equal(grown.params, c.params)
    same = retract(c, np.zeros(100), 0.7)
    npt.assert_array_equal(same.nodes, c.nodes)


def test_retract_rejects_inversion_through_center():
    with pytest.raises(ShapeDegenerate):
        retract(circle(100), -np.ones(100), 1.5)


def test_retract_rejects_folding_step():
    theta = circle(100).params
    with pytest.raises(ShapeDegenerate):
        retract(circle(100), 5.0 * np.sin(7.0 * theta), 1.0)


def test_csv_roundtrip_exact(tmp_path):
    c = circle(32, 1.3)
    path = tmp_path / "curve.csv"
    c.to_csv(path)
    back = DiscreteCurve.from_csv(path)
    npt.assert_array_equal(back.nodes, c.nodes)


def test_json_roundtrip_exact(tmp_path):
    c = circle(32, 0.8)
    path = tmp_path / "curve.json"
    c.to_json(path)
    back = DiscreteCurve.from_json(path)
    npt.assert_array_equal(back.nodes, c.nodes)
