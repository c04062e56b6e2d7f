"""Constant angle surfaces in warped products I x_f E^2.

Modules: ``warped_space`` (the ambient metric), ``surface`` (geometry of
immersions), ``generators`` (the three families and their special cases,
plus classification), ``verify`` (named check suites) and ``cli``.
"""

from .errors import *  # noqa: F401,F403
from .generators import (GeneratorSpec, ProfileFunction, classify, generate, make_harmonic_exp,
                         make_minimal_power, make_rotational, make_type_i, make_type_ii, make_type_iii)
from .surface import Immersion, curvature_report, local_geometry, surface_geometry
from .verify import compare_oracles, run_suite
from .warped_space import WarpedSpace, WarpingFunction, warping_from_name

__version__ = "0.1.0"
