import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from warpsurf.errors import AngleDegenerate, BoundaryError, DegenerateImmersion, ModelMismatch
from warpsurf.generators import GeneratorSpec, generate, immersion_from_expression
from warpsurf.surface import (adapted_frame, angle, curvature_report, evaluate_grid, first_fundamental_form,
                              gauss_curvature_intrinsic, laplacian_height, local_geometry, parameter_grid,
                              shape_operator, surface_geometry, to_half_space, unit_normal)
from warpsurf.warped_space import AmbientPoint, WarpedSpace


def plane(warp="constant:1"):
    return immersion_from_expression("(u, u, v)", warp, (0.5, 1.5, -1, 1))


def test_euclidean_plane_angle():
    # t = x makes 45 degrees with d_t
    assert angle(plane(), 1.0, 0.0) == pytest.approx(np.pi / 4, abs=1e-14)
    assert np.allclose(shape_operator(plane(), 1.0, 0.2), 0.0, atol=1e-14)


def test_slice_geometry():
    imm = generate(GeneratorSpec("type_iii", warping="exp", t0=0.5))
    g = surface_geometry(imm, 0.1, 0.2)
    assert g.theta == 0.0
    assert np.allclose(g.first_form, np.exp(1.0) * np.eye(2))
    # Weingarten sign: A = -(f'/f) id for the normal d_t
    assert np.allclose(g.shape, -np.eye(2), atol=1e-14)
    assert g.K_intrinsic == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(AngleDegenerate):
        adapted_frame(imm, 0.1, 0.2)


def test_normal_is_unit_and_orthogonal():
    imm = generate(GeneratorSpec("type_i", warping="exp", theta=0.6, alpha="0.3*sin(v)"))
    u, v = 1.2, 0.4
    n = unit_normal(imm, u, v)
    space = WarpedSpace("exp")
    assert space.norm(n) == pytest.approx(1.0, abs=1e-14)
    J = imm.jet(u, v)
    p = n.base
    from warpsurf.warped_space import AmbientVector
    for d in (J.Xu, J.Xv):
        assert abs(space.metric(n, AmbientVector(p, *d))) < 1e-13


def test_adapted_frame_is_orthonormal_and_oriented():
    imm = generate(GeneratorSpec("type_i", warping="cosh", theta=1.0, alpha="v"))
    e1, e2, T, theta = adapted_frame(imm, 1.0, 0.5)
    space = WarpedSpace("cosh")
    assert space.metric(e1, e1) == pytest.approx(1.0)
    assert space.metric(e2, e2) == pytest.approx(1.0)
    assert abs(space.metric(e1, e2)) < 1e-13
    assert space.norm(T) == pytest.approx(np.sin(theta), abs=1e-13)
    xi = unit_normal(imm, 1.0, 0.5)
    assert space.metric(space.warped_cross(e1, e2), xi) == pytest.approx(1.0, abs=1e-12)


def test_type_ii_exp_curvature_value():
    imm = generate(GeneratorSpec("type_ii", warping="exp", theta=np.pi / 3))
    assert gauss_curvature_intrinsic(imm, 1.0, 0.0) == pytest.approx(-0.75, abs=1e-7)


def test_laplacian_identity_on_graph():
    # an arbitrary non-constant-angle surface still satisfies the identity
    imm = immersion_from_expression("(u + 0.2*v^2, sin(u), v)", "exp", (0, 1, -1, 1))
    lhs, rhs = laplacian_height(imm, 0.4, 0.3)
    assert lhs == pytest.approx(rhs, abs=1e-6)


@given(u=st.floats(0.1, 0.9), v=st.floats(-0.9, 0.9))
@settings(max_examples=20, deadline=None)
def test_gauss_codazzi_on_arbitrary_surface(u, v):
    imm = immersion_from_expression("(1 + 0.3*u*v, u + 0.1*v^3, v - 0.2*u^2)", "linear:1,1", (0, 1, -1, 1))
    rep = curvature_report(imm, u, v)
    assert rep.gauss_residual_norm() < 1e-6
    assert rep.codazzi_residual_norm() < 1e-6
    assert abs(rep.K_brioschi - rep.K_christoffel) < 1e-6
    assert abs(rep.K_brioschi - rep.geom.K_gauss_ambient) < 1e-6


def test_boundary_stencil():
    imm = plane()
    with pytest.raises(BoundaryError):
        curvature_report(imm, 0.5, 0.0)
    rep = curvature_report(imm, 0.5, 0.0, allow_one_sided=True)
    assert bool(rep.one_sided)
    assert abs(rep.K_brioschi) < 1e-8


def test_degenerate_immersion():
    imm = immersion_from_expression("(u, u, u)", "constant:1", (0, 1, 0, 1))
    with pytest.raises(DegenerateImmersion):
        first_fundamental_form(imm, 0.5, 0.5) and angle(imm, 0.5, 0.5)


def test_fd_and_analytic_paths_agree():
    imm = generate(GeneratorSpec("type_i", warping="linear:2,0.5", theta=0.7, alpha="0.1*v^2"))
    U, V = parameter_grid(imm.domain, 6, interior=True)
    a = local_geometry(imm, U, V, "analytic")
    f = local_geometry(imm.as_fd(), U, V)
    assert np.allclose(a.shape, f.shape, atol=1e-6)
    assert np.allclose(a.normal, f.normal, atol=1e-8)


def test_threads_do_not_change_results(monkeypatch):
    imm = generate(GeneratorSpec("rotational", warping="exp", theta=1.0))
    one = evaluate_grid(imm, 16, 12, threads=1)
    four = evaluate_grid(imm, 16, 12, threads=4)
    assert np.array_equal(one.K_brioschi, four.K_brioschi)
    assert np.array_equal(one.geom.shape, four.geom.shape)


def test_half_space_map():
    z = to_half_space(AmbientPoint(np.log(2.0), 1.0, 2.0))
    assert z == pytest.approx((1.0, 2.0, 0.5))
    with pytest.raises(ModelMismatch):
        to_half_space(AmbientPoint(0.0, 0.0, 0.0), "cosh")
