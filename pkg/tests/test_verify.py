import json

import numpy as np
import pytest

from conftest import spec_id
from warpsurf.errors import ConfigError
from warpsurf.generators import GeneratorSpec, generate, immersion_from_expression
from warpsurf.verify import SUITES, compare_oracles, run_suite


def test_flat_cone_example():
    rep = run_suite("flat_cone", GeneratorSpec("type_ii", warping="linear:2,1", theta=np.pi / 3))
    assert rep.passed
    assert rep.check("flat").max_residual < 1e-6


def test_minimal_example():
    rep = run_suite("minimal", GeneratorSpec("minimal_power", m=0.5))
    assert rep.passed and rep.check("minimal").max_residual < 1e-6


def test_slice_constant_angle():
    rep = run_suite("constant_angle", GeneratorSpec("type_iii", warping="exp", t0=0.3))
    c = rep.check("angle_stddev")
    assert rep.passed and c.max_residual == 0.0 and c.value == 0.0


def test_slice_minimality_follows_derivative():
    assert not run_suite("minimal", GeneratorSpec("type_iii", warping="exp", t0=0.0)).passed
    assert run_suite("minimal", GeneratorSpec("type_iii", warping="cosh", t0=0.0)).passed


def test_failure_is_data():
    # the cone with exp warping is not flat: the check fails, nothing raises
    rep = run_suite("flat_cone", GeneratorSpec("type_ii", warping="exp", theta=np.pi / 3))
    assert not rep.passed
    assert rep.check("flat").value == pytest.approx(-0.75, abs=1e-6)
    assert rep.to_dict()["passed"] is False


@pytest.mark.parametrize("spec", [GeneratorSpec("type_i", warping="exp", theta=0.5, alpha="v"),
                                  GeneratorSpec("type_ii", warping="linear:1,1", theta=np.pi / 4),
                                  GeneratorSpec("harmonic_exp", theta=np.pi / 4),
                                  GeneratorSpec("minimal_power", m=0.2),
                                  GeneratorSpec("rotational", warping="cosh", theta=np.pi / 2)], ids=spec_id)
def test_all_suite_passes(spec):
    rep = run_suite("all", spec, grid=(24, 24))
    assert rep.passed, [c.to_dict() for c in rep.checks if not c.passed]
    assert all(c.max_residual >= 0 for c in rep.checks)


def test_residuals_shrink_or_hold_with_refinement():
    spec = GeneratorSpec("type_i", warping="power:0.5", theta=0.9, alpha="0.3*sin(v)")
    coarse = run_suite("all", spec, grid=(16, 16))
    fine = run_suite("all", spec, grid=(32, 32))
    assert coarse.passed and fine.passed


def test_oracles_on_user_surface():
    imm = immersion_from_expression("(u, 0.5*u + 0.1*sin(v), v)", "cosh", (0.2, 1.0, -1, 1))
    rep = compare_oracles(imm, grid=(12, 12))
    assert rep.passed
    assert [c.name for c in rep.checks] == ["K_brioschi_vs_christoffel", "K_brioschi_vs_gauss_trace",
                                            "K_christoffel_vs_gauss_trace"]


def test_fd_mode_uses_loose_tolerance():
    rep = run_suite("constant_angle", GeneratorSpec("type_ii", warping="exp", theta=0.5), mode="fd")
    assert rep.environment["derivative_mode"] == "fd"
    assert rep.check("angle_stddev").tolerance == 1e-5
    assert rep.passed


def test_tolerance_override():
    rep = run_suite("minimal", GeneratorSpec("type_iii", warping="exp", t0=0.0), tolerances={"minimal": 2.0})
    assert rep.passed and rep.check("minimal").tolerance == 2.0


def test_report_is_deterministic():
    spec = GeneratorSpec("type_i", warping="exp", theta=0.7, alpha="0.1*v^2")
    a = run_suite("all", spec, grid=(12, 12)).to_json()
    b = run_suite("all", spec, grid=(12, 12)).to_json()
    assert a == b
    assert list(json.loads(a)) == ["suite", "surface", "passed", "environment", "checks"]


@pytest.mark.parametrize("args", [("nope", (8, 8)), ("all", (1, 8))])
def test_config_errors(args):
    name, grid = args
    with pytest.raises(ConfigError):
        run_suite(name, GeneratorSpec("type_ii"), grid=grid)


def test_suite_names():
    assert "all" in SUITES and "oracles" in SUITES
