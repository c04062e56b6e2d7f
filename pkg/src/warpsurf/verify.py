"""Named verification suites over a parameter grid.

Each check reduces a residual field to its maximum over the grid (an
order-independent reduction, so reports do not depend on threading) and
compares it to a tolerance.  A failing check is data, not an exception.
"""

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError
from .generators import (FAMILY_LABEL, GeneratorSpec, classify, generate, recover_alpha)
from .quadrature import DEFAULT_TOL
from .surface import Immersion, evaluate_grid, local_geometry, parameter_grid, to_half_space
from .warped_space import AmbientPoint, AmbientVector, WarpedSpace

SUITES = ("constant_angle", "principal_direction", "frame_connection", "gauss_codazzi", "umbilical",
          "flat_cone", "minimal", "harmonic", "classification_roundtrip", "laplacian", "oracles", "all")

# defaults: analytic-derivative checks, finite-difference checks, alpha round trip
TOL_ANALYTIC = 1e-8
TOL_FD = 1e-5
TOL_ALPHA = 1e-4


@dataclass
class CheckRecord:
    name: str
    source: str
    grid: tuple
    max_residual: float
    tolerance: float
    passed: bool
    value: Optional[float] = None

    def to_dict(self):
        out = {"name": self.name, "source": self.source, "grid": list(self.grid),
               "max_residual": self.max_residual, "tolerance": self.tolerance, "passed": self.passed}
        if self.value is not None:
            out["value"] = self.value
        return out


@dataclass
class VerificationReport:
    suite: str
    surface: str
    checks: list = field(default_factory=list)
    environment: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def check(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {"suite": self.suite, "surface": self.surface, "passed": self.passed,
                "environment": self.environment, "checks": [c.to_dict() for c in self.checks]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"


def _max(x):
    """Largest absolute entry, ignoring NaN (points where a check does not apply)."""
    x = np.abs(np.asarray(x, dtype=float))
    if x.size == 0 or np.all(np.isnan(x)):
        return 0.0
    return float(np.nanmax(x))


class _Context:
    """Lazily evaluated grid data shared by the checks of one run."""

    def __init__(self, target, nu, nv, mode, tolerances):
        if isinstance(target, GeneratorSpec):
            self.spec = target
            self.imm = generate(target)
        elif isinstance(target, Immersion):
            self.spec = None
            self.imm = target
        else:
            raise ConfigError("run_suite needs a GeneratorSpec or an Immersion")
        if nu < 2 or nv < 2:
            raise ConfigError(f"grid must be at least 2x2, got {nu}x{nv}")
        self.grid = (nu, nv)
        self.mode = mode
        self.tol = tolerances
        self._rep = None

    @property
    def rep(self):
        if self._rep is None:
            self._rep = evaluate_grid(self.imm, *self.grid, interior=True, mode=self.mode)
        return self._rep

    @property
    def geom(self):
        return self.rep.geom.canonical()

    @property
    def fd(self):
        return self.mode == "fd" or not self.imm.analytic

    def tol_for(self, name, kind):
        if name in self.tol:
            return float(self.tol[name])
        if kind == "analytic":
            return TOL_FD if self.fd else TOL_ANALYTIC
        return TOL_ALPHA if kind == "alpha" else TOL_FD

    def record(self, name, source, residual, kind, value=None):
        r = _max(residual)
        tol = self.tol_for(name, kind)
        return CheckRecord(name, source, self.grid, r, tol, bool(r <= tol),
                           None if value is None else float(value))

    @property
    def family(self):
        return None if self.spec is None else self.spec.family

    @property
    def theta(self):
        return None if self.spec is None else self.spec.theta


# ------------------------------------------------------------------ suites

def _constant_angle(cx):
    th = cx.geom.theta
    out = [cx.record("angle_stddev", "constant angle hypothesis", np.std(th), "analytic", np.mean(th))]
    if cx.theta is not None:
        out.append(cx.record("angle_value", "declared angle of the generator", th - cx.theta, "analytic"))
    return out


def _principal_direction(cx):
    g = cx.geom
    scale = np.maximum(1.0, g.T_norm)
    return [cx.record("principal_T", "T is a principal direction with eigenvalue -cos(theta)(log f)'",
                      g.principal_residual / scale, "analytic")]


def _type_i_interior(cx):
    """Checks that need the type (i) coordinates with theta strictly between 0 and pi/2."""
    return (cx.spec is not None and FAMILY_LABEL[cx.family] == "TYPE_I"
            and 0.0 < cx.theta < np.pi / 2 and cx.spec.gamma is None)


def _frame_connection(cx):
    rep = cx.rep
    out = [cx.record("frame_connection", "Levi-Civita connection in the adapted frame",
                     rep.frame_residual(), "fd")]
    if _type_i_interior(cx):
        g_raw = rep.geom
        g = g_raw.canonical()
        s, c = np.sin(cx.theta), np.cos(cx.theta)
        beta = np.sqrt(g.first_form[..., 1, 1]) * np.sign(g_raw.cos_theta)
        lam = g.frame_eigenvalues[1]
        out.append(cx.record("lambda_law", "second principal curvature lambda beta = sin - (log f)' beta cos",
                             lam * beta - (s - g.log_d1 * beta * c), "analytic"))
        # beta_u - sigma' beta = cos(theta), sigma(u) = log f(u sin theta)
        U, V = g.u, g.v
        h = np.cbrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(U))
        bp, bm = (np.sqrt(local_geometry(cx.imm, U + d, V, cx.mode).first_form[..., 1, 1]) * np.sign(g_raw.cos_theta)
                  for d in (h, -h))
        beta_u = (bp - bm) / (2 * h)
        out.append(cx.record("beta_ode", "beta_u - sigma' beta = cos(theta)",
                             beta_u - s * g.log_d1 * beta - c, "fd"))
    return out


def _gauss_codazzi(cx):
    return [cx.record("gauss_equation", "Gauss equation in I x_f E^2", cx.rep.gauss_residual_norm(), "fd"),
            cx.record("codazzi_equation", "Codazzi equation in I x_f E^2", cx.rep.codazzi_residual_norm(), "fd")]


def _umbilical(cx):
    g = cx.geom
    return [cx.record("umbilic", "type (ii) cylinders are totally umbilical", g.umbilicity, "analytic"),
            cx.record("mean_curvature_type_ii", "H = -cos(theta) f'/f",
                      g.H + g.cos_theta * g.log_d1, "analytic", np.mean(g.H))]


def _flat_cone(cx):
    K = cx.rep.K_brioschi
    return [cx.record("flat", "linear warping makes type (ii) surfaces flat", K, "fd", np.mean(K))]


def _minimal(cx):
    H = cx.geom.H
    return [cx.record("minimal", "mean curvature vanishes", H, "analytic", np.mean(H))]


def _harmonic(cx, seed=20240601):
    g = cx.geom
    c = g.cos_theta
    out = [cx.record("harmonic_height", "Laplacian of the height function vanishes",
                     cx.rep.laplacian_lhs, "fd"),
           cx.record("harmonic_mean_curvature", "H = -(1 + cos^2)/(2 cos)",
                     g.H + (1 + c * c) / (2 * c), "analytic", np.mean(g.H)),
           cx.record("harmonic_flat", "beta constant, so the surface is flat", cx.rep.K_brioschi, "fd")]
    if cx.imm.warping.name == "exp":
        # ambient curvature on random planes at surface points
        rng = np.random.default_rng(seed)
        space = WarpedSpace(cx.imm.warping)
        pts = g.X.reshape(-1, 3)
        idx = rng.choice(len(pts), size=min(64, len(pts)), replace=False)
        sec = []
        for i in np.sort(idx):
            a, b = rng.normal(size=(2, 3))
            p = AmbientPoint(*pts[i])
            sec.append(space.sectional_curvature(p, AmbientVector(p, *a), AmbientVector(p, *b)) + 1.0)
        out.append(cx.record("ambient_hyperbolic", "e^t warping has sectional curvature -1",
                             np.array(sec), "analytic"))
        if cx.theta is not None and 0 < cx.theta < np.pi / 2:
            x, y, z = np.moveaxis(to_half_space(g.X, cx.imm.warping), -1, 0)
            ct = np.cos(cx.theta) / np.sin(cx.theta)
            out.append(cx.record("half_space_cone", "half-space image lies on x^2 + y^2 = cot^2 z^2",
                                 (x * x + y * y - ct * ct * z * z) / (1 + z * z), "analytic"))
    return out


def _laplacian(cx):
    rep = cx.rep
    return [cx.record("laplacian_identity", "Laplacian of the height = 2 cos H + (log f)'(1 + cos^2)",
                      rep.laplacian_lhs - rep.laplacian_rhs, "fd")]


def _oracles(cx):
    rep = cx.rep
    Kb, Kc, Kt = rep.K_brioschi, rep.K_christoffel, rep.geom.K_gauss_trace
    return [cx.record("K_brioschi_vs_christoffel", "intrinsic curvature: two derivative paths", Kb - Kc, "fd"),
            cx.record("K_brioschi_vs_gauss_trace", "intrinsic curvature vs traced Gauss equation", Kb - Kt, "fd"),
            cx.record("K_christoffel_vs_gauss_trace", "pullback curvature vs traced Gauss equation", Kc - Kt, "fd")]


def _roundtrip(cx):
    nu, nv = cx.grid
    rep = classify(cx.imm, max(nu, 8), max(nv, 8))
    out = []
    if cx.spec is not None:
        ok = rep.verdict == FAMILY_LABEL[cx.family]
        out.append(CheckRecord("classification_label", "classification of the generated family", cx.grid,
                               0.0 if ok else 1.0, 0.0, ok))
        out.append(cx.record("classification_angle", "estimated angle", rep.theta - cx.theta, "analytic"))
        if cx.family == "type_i" and rep.alpha is not None and cx.spec.gamma is None:
            d = rep.alpha - cx.spec.alpha(rep.alpha_v)
            out.append(cx.record("alpha_recovery", "profile alpha(v) recovered up to a constant",
                                 d - np.mean(d), "alpha"))
    else:
        out.append(CheckRecord("classification_label", "classification verdict", cx.grid,
                               0.0 if rep.verdict.startswith("TYPE") else 1.0, 0.0,
                               rep.verdict.startswith("TYPE")))
    return out


_RUNNERS = {
    "constant_angle": _constant_angle, "principal_direction": _principal_direction,
    "frame_connection": _frame_connection, "gauss_codazzi": _gauss_codazzi, "umbilical": _umbilical,
    "flat_cone": _flat_cone, "minimal": _minimal, "harmonic": _harmonic,
    "classification_roundtrip": _roundtrip, "laplacian": _laplacian, "oracles": _oracles,
}


def _all_suites(cx):
    names = ["constant_angle", "principal_direction", "frame_connection", "gauss_codazzi",
             "laplacian", "oracles", "classification_roundtrip"]
    fam = cx.family
    if fam == "type_ii":
        names.append("umbilical")
        if cx.imm.warping.family in ("linear", "constant"):
            names.append("flat_cone")
    elif fam == "minimal_power":
        names.append("minimal")
    elif fam == "harmonic_exp":
        names.append("harmonic")
    return names


def run_suite(name, target, grid=(32, 32), tolerances=None, mode="auto"):
    """Run suite ``name`` on a GeneratorSpec or an Immersion and return the report."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if mode not in ("auto", "analytic", "fd"):
        raise ConfigError(f"unknown derivative mode {mode!r}")
    nu, nv = grid
    cx = _Context(target, int(nu), int(nv), mode, dict(tolerances or {}))
    names = _all_suites(cx) if name == "all" else [name]
    report = VerificationReport(name, cx.imm.name, environment={
        "derivative_mode": "fd" if cx.fd else "analytic",
        "quadrature_tolerance": DEFAULT_TOL,
        "grid": [cx.grid[0], cx.grid[1]],
        "suites": names,
    })
    for n in names:
        report.checks.extend(_RUNNERS[n](cx))
    return report


def compare_oracles(s, grid=(32, 32), mode="auto"):
    """Pairwise maxima between the three intrinsic curvature computations."""
    return run_suite("oracles", s, grid, mode=mode)
