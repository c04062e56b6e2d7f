import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from warpsurf.errors import BaseMismatch, ConfigError, DegeneratePlane, DomainError
from warpsurf.warped_space import (BUILTIN_WARPINGS, AmbientPoint, AmbientVector, WarpedSpace, d_t, d_x, d_y,
                                   warping_from_name)

coord = st.floats(-2, 2)
vec3 = st.tuples(coord, coord, coord)


def vec(p, c):
    return AmbientVector(p, *c)


def test_metric_scales_horizontal_directions():
    space = WarpedSpace("exp")
    p = AmbientPoint(1.0, 0.0, 0.0)
    assert space.metric(d_x(p), d_x(p)) == pytest.approx(np.e**2)
    assert space.metric(d_t(p), d_t(p)) == 1.0
    assert space.metric(d_t(p), d_y(p)) == 0.0


def test_connection_examples():
    space = WarpedSpace("exp")
    p = AmbientPoint(0.3, 0.1, -0.2)
    # nabla_{d_x} d_t = (f'/f) d_x and nabla_{d_x} d_x = -f f' d_t
    got = space.covariant_derivative(d_t, d_x(p)).components
    assert np.allclose(got, [0, 1, 0], atol=1e-9)
    got = space.covariant_derivative(d_x, d_x(p)).components
    assert np.allclose(got, [-np.exp(0.6), 0, 0], atol=1e-9)


@pytest.mark.parametrize("name", BUILTIN_WARPINGS)
@given(a=vec3, b=vec3, c=vec3)
@settings(max_examples=30, deadline=None)
def test_two_curvature_paths_agree(name, a, b, c):
    space = WarpedSpace(name)
    p = AmbientPoint(float(np.mean(space.warping.sample_points(3))), 0.2, 0.4)
    r1 = space.curvature(vec(p, a), vec(p, b), vec(p, c)).components
    r2 = space.curvature_christoffel(vec(p, a), vec(p, b), vec(p, c)).components
    assert np.allclose(r1, r2, atol=1e-10 * (1 + np.max(np.abs(r1))))


@given(a=vec3, b=vec3)
@settings(max_examples=50)
def test_euclidean_space_is_flat(a, b):
    space = WarpedSpace("constant:1")
    p = AmbientPoint(0.0, 0.0, 0.0)
    assert np.all(space.curvature(vec(p, a), vec(p, b), vec(p, a)).components == 0)


@given(a=vec3, b=vec3, t=st.floats(-2, 2))
@settings(max_examples=50)
def test_exp_warping_is_hyperbolic(a, b, t):
    space = WarpedSpace("exp")
    p = AmbientPoint(t, 0.0, 0.0)
    A, B = vec(p, a), vec(p, b)
    gaa, gbb, gab = space.metric(A, A), space.metric(B, B), space.metric(A, B)
    assume(gaa * gbb - gab * gab > 1e-6 * max(gaa * gbb, 1e-3))
    assert space.sectional_curvature(p, A, B) == pytest.approx(-1.0, abs=1e-8)


def test_linear_warping_horizontal_plane():
    space = WarpedSpace("linear:2,0.5")
    p = AmbientPoint(1.0, 0.0, 0.0)
    # -(f'/f)^2 = -1/(t+b)^2
    assert space.sectional_curvature(p, d_x(p), d_y(p)) == pytest.approx(-1 / 1.5**2, abs=1e-12)
    assert space.sectional_curvature(p, d_t(p), d_x(p)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", BUILTIN_WARPINGS)
@given(a=vec3, b=vec3)
@settings(max_examples=30, deadline=None)
def test_cross_product_is_orthogonal_with_area_norm(name, a, b):
    space = WarpedSpace(name)
    p = AmbientPoint(float(space.warping.sample_points(1)[0]), 0.0, 0.0)
    A, B = vec(p, a), vec(p, b)
    n = space.warped_cross(A, B)
    area2 = space.metric(A, A) * space.metric(B, B) - space.metric(A, B) ** 2
    scale = 1 + space.metric(A, A) * space.metric(B, B)
    assert abs(space.metric(n, A)) < 1e-9 * scale
    assert abs(space.metric(n, B)) < 1e-9 * scale
    assert abs(space.metric(n, n) - area2) < 1e-9 * scale


def test_euclidean_cross():
    p = AmbientPoint(0.0, 0.0, 0.0)
    assert np.allclose(WarpedSpace("constant:1").warped_cross(d_x(p), d_y(p)).components, [1, 0, 0])


@pytest.mark.parametrize("name", BUILTIN_WARPINGS)
def test_builtin_derivatives_consistent(name):
    assert warping_from_name(name).derivative_error() < 1e-6


def test_domain_and_plane_errors():
    space = WarpedSpace("power:0.5")
    with pytest.raises(DomainError):
        space.warping(-1.0)
    p, q = AmbientPoint(1.0, 0.0, 0.0), AmbientPoint(2.0, 0.0, 0.0)
    with pytest.raises(BaseMismatch):
        space.metric(d_x(p), d_x(q))
    with pytest.raises(DegeneratePlane):
        space.sectional_curvature(p, d_x(p), d_x(p) * 2.0)


@pytest.mark.parametrize("bad", ["power", "linear:1,2,3", "nope", "constant:x"])
def test_bad_registry_names(bad):
    with pytest.raises(ConfigError):
        warping_from_name(bad)


def test_tabulated_warping(tmp_path):
    t = np.linspace(0.0, 3.0, 61)
    path = tmp_path / "f.txt"
    np.savetxt(path, np.column_stack([t, np.exp(t)]), header="t f")
    w = warping_from_name(f"table:{path}")
    assert w.interval == (0.0, 3.0)
    assert w(1.3) == pytest.approx(np.exp(1.3), rel=1e-4)
    assert w.d1(1.3) == pytest.approx(np.exp(1.3), rel=1e-2)
    with pytest.raises(DomainError):
        w(3.5)
