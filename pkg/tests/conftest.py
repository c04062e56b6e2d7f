import numpy as np
import pytest

from warpsurf.generators import GeneratorSpec
from warpsurf.warped_space import BUILTIN_WARPINGS

ALPHAS = ("0", "v", "0.3*sin(v)", "0.1*v^2")


def type_i_spec(warp, theta_deg, alpha):
    """type_i spec; at 90 degrees alpha is shifted away from zero so the cylinder is regular."""
    if theta_deg == 90:
        if alpha != "0.3*sin(v)":
            alpha = "1+" + alpha
        return GeneratorSpec("type_i", warping=warp, theta=np.pi / 2, alpha=alpha, domain=(0.5, 1.5, 0.1, 1.0))
    return GeneratorSpec("type_i", warping=warp, theta=np.radians(theta_deg), alpha=alpha)


def spec_matrix(angles=(15, 30, 45, 60, 75, 90), alphas=ALPHAS):
    """Every family over the builtin warpings at the given angles."""
    specs = []
    for w in BUILTIN_WARPINGS:
        for th in angles:
            r = np.pi / 2 if th == 90 else np.radians(th)
            for a in alphas:
                specs.append(type_i_spec(w, th, a))
            specs.append(GeneratorSpec("type_ii", warping=w, theta=r))
            specs.append(GeneratorSpec("rotational", warping=w, theta=r))
        specs.append(GeneratorSpec("type_iii", warping=w, t0=1.0))
    for m in (0.2, 1 / 3, 0.5, 0.8):
        specs.append(GeneratorSpec("minimal_power", m=m))
    for th in (30, 45, 60):
        specs.append(GeneratorSpec("harmonic_exp", theta=np.radians(th)))
    return specs


def spec_id(spec):
    extra = spec.alpha.source if spec.alpha is not None else ""
    return f"{spec.family}-{spec.warping.name}-{np.degrees(spec.theta):.0f}-{extra}"


@pytest.fixture(scope="session")
def small_matrix():
    return spec_matrix(angles=(30, 60, 90), alphas=("0", "0.3*sin(v)"))
