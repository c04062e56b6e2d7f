import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import spec_id, spec_matrix
from warpsurf.errors import ConfigError, DomainError, GridTooSmall, RegularityError
from warpsurf.generators import (GeneratorSpec, ProfileFunction, classify, generate, immersion_from_expression,
                                 immersion_from_samples, make_harmonic_exp, make_minimal_power, make_rotational,
                                 make_type_i, minimal_angle, minimal_exponent, resolved)
from warpsurf.surface import local_geometry, parameter_grid

MATRIX = spec_matrix(angles=(15, 45, 90), alphas=("0", "0.1*v^2"))


def grid_geometry(imm, n=16):
    U, V = parameter_grid(imm.domain, n, interior=True)
    return local_geometry(imm, U, V).canonical()


@pytest.mark.parametrize("spec", MATRIX, ids=spec_id)
def test_declared_angle_is_measured(spec):
    g = grid_geometry(generate(spec))
    assert np.std(g.theta) < 1e-8
    assert np.max(np.abs(g.theta - spec.theta)) < 1e-8


@pytest.mark.parametrize("spec", MATRIX, ids=spec_id)
def test_classification_recovers_family(spec):
    assert classify(generate(spec), 16).verdict == spec.label


def test_euclidean_cone():
    imm = make_type_i(GeneratorSpec("type_i", theta=np.pi / 4, base_t=0.0))
    u, v = 1.3, 0.7
    s = u / np.sqrt(2)
    assert np.allclose(imm(u, v), [s, s * np.cos(v), s * np.sin(v)], atol=1e-12)


def test_height_is_u_sin_theta():
    spec = GeneratorSpec("type_i", warping="exp", theta=0.4, alpha="0.3*sin(v)")
    imm = generate(spec)
    U, V = parameter_grid(imm.domain, 5)
    assert np.allclose(imm(U, V)[..., 0], U * np.sin(0.4), atol=1e-15)


@pytest.mark.parametrize("warp", ["exp", "power:0.5", "cosh"])
def test_rotational_is_type_i_with_zero_profile(warp):
    a = make_rotational(GeneratorSpec("rotational", warping=warp, theta=0.8))
    b = make_type_i(GeneratorSpec("type_i", warping=warp, theta=0.8, domain=a.domain, base_t=a.meta["base_t"]))
    U, V = parameter_grid(a.domain, 9)
    assert np.max(np.abs(a(U, V) - b(U, V))) < 1e-10


def test_type_ii_examples():
    flat = generate(GeneratorSpec("type_ii", theta=np.pi / 4))
    U, V = parameter_grid(flat.domain, 5)
    P = flat(U, V)
    assert np.allclose(np.diff(P[..., 1] - P[..., 0], axis=0), 0, atol=1e-13)
    vertical = generate(GeneratorSpec("type_ii", warping="exp", theta=np.pi / 2))
    assert np.all(vertical(U, V)[..., 1] == 0.0)
    # both parametrizations trace the same cylinder x = cot(theta) F(t)
    ad = generate(GeneratorSpec("type_ii", warping="exp", theta=0.5, adapted=True))
    na = generate(GeneratorSpec("type_ii", warping="exp", theta=0.5))
    t = np.array([0.7, 1.1])
    assert np.allclose(ad(t / np.sin(0.5), 0.0), na(t, 0.0), atol=1e-12)
    g = grid_geometry(ad)
    assert np.allclose(g.first_form[..., 0, 0], 1.0)


def test_minimal_power_angle():
    imm, th = make_minimal_power(1 / 3)
    assert abs(th - np.pi / 4) <= 2 * np.finfo(float).eps
    for m in (0.2, 0.5, 0.8):
        assert minimal_exponent(minimal_angle(m)) == pytest.approx(m, abs=1e-15)
    with pytest.raises(ConfigError):
        make_minimal_power(1.2)
    bad, _ = make_minimal_power(0.5, domain=(-1.0, 1.0, 0.0, 1.0))
    with pytest.raises(DomainError):
        bad(-0.5, 0.0)


def test_harmonic_exp_values():
    g = grid_geometry(make_harmonic_exp(np.pi / 3))
    assert np.allclose(g.H, -1.25, atol=1e-12)


def test_regularity_error():
    # cot F + alpha vanishes inside the v-range
    with pytest.raises(RegularityError):
        generate(GeneratorSpec("type_i", theta=np.pi / 2, alpha="v - 0.5", domain=(0, 1, 0, 1)))


@pytest.mark.parametrize("kw", [dict(family="nope"), dict(family="type_i", theta=2.0),
                                dict(family="type_ii", alpha="v"), dict(family="minimal_power", m=0.0),
                                dict(family="type_iii")])
def test_bad_specs(kw):
    with pytest.raises((ConfigError, DomainError)):
        generate(GeneratorSpec(**kw))


def test_slice_outside_interval():
    with pytest.raises(DomainError):
        generate(GeneratorSpec("type_iii", warping="power:0.5", t0=-1.0))


def test_default_bases_keep_profile_positive():
    spec = resolved(GeneratorSpec("rotational", warping="power:0.5", theta=0.5))
    assert 0 < spec.base_t < spec.domain[0] * np.sin(0.5)
    assert resolved(GeneratorSpec("type_ii", warping="exp")).base_t == 1.0


def test_profile_from_samples():
    v = np.linspace(0, 1, 12)
    p = ProfileFunction.from_samples(v, np.sin(v))
    assert p(0.33) == pytest.approx(np.sin(0.33), abs=1e-3)
    with pytest.raises(ConfigError):
        ProfileFunction.from_samples(v[:3], v[:3])
    with pytest.raises(ConfigError):
        ProfileFunction.from_expression("u + v")


@pytest.mark.parametrize("alpha", ["0", "v", "0.3*sin(v)", "0.1*v^2"])
def test_alpha_recovery(alpha):
    spec = GeneratorSpec("type_i", warping="linear:1,1", theta=0.6, alpha=alpha)
    rep = classify(generate(spec), 24)
    d = rep.alpha - spec.alpha(rep.alpha_v)
    assert rep.verdict == "TYPE_I"
    assert np.max(np.abs(d - d.mean())) < 1e-4


def test_classify_rejections():
    bowl = immersion_from_expression("(u^2, u, v)", "constant:1", (0, 1, 0, 1))
    assert classify(bowl, 8).verdict == "NOT_CONSTANT_ANGLE"
    slope = immersion_from_expression("(u, u, v)", "constant:1", (0, 1, 0, 1))
    assert classify(slope, 8).verdict == "TYPE_II"
    with pytest.raises(GridTooSmall):
        classify(slope, 7)


def test_classify_sampled_surface():
    imm = generate(GeneratorSpec("rotational", warping="exp", theta=np.pi / 3))
    U, V = parameter_grid(imm.domain, 48)
    s = immersion_from_samples(U[:, 0], V[0], imm(U, V), "exp")
    rep = classify(s, 16)
    assert rep.verdict == "TYPE_I"
    assert np.ptp(rep.alpha) < 1e-4


@given(theta=st.floats(0.2, 1.4), a=st.floats(-0.2, 0.2), b=st.floats(0.0, 0.3),
       warp=st.sampled_from(["constant:1", "linear:1,1", "exp", "cosh", "power:0.5"]))
@settings(max_examples=25, deadline=None)
def test_random_profiles_keep_angle_and_label(theta, a, b, warp):
    spec = GeneratorSpec("type_i", warping=warp, theta=theta, alpha=f"{b!r}*v^2 + {a!r}*sin(v)")
    imm = generate(spec)
    g = grid_geometry(imm, 12)
    assert np.max(np.abs(g.theta - theta)) < 1e-8
    rep = classify(imm, 12)
    assert rep.verdict == "TYPE_I"
    d = rep.alpha - spec.alpha(rep.alpha_v)
    assert np.max(np.abs(d - d.mean())) < 1e-4
