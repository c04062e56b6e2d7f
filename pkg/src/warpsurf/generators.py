"""Constant angle surfaces in I x_f E^2, built with analytic derivatives.

Families:

``type_i``        (u sin th, cot th F(u sin th) cos v - S(v), cot th F(u sin th) sin v + C(v))
                  with F = int dt/f, S = int alpha sin, C = int alpha cos
``type_ii``       the cylinder x = cot th F(t) over the t-axis
``type_iii``      the horizontal slice t = t0
``rotational``    type_i with alpha = 0 (the circular cylinder at th = pi/2)
``minimal_power`` f = t^m, the rotational minimal surface
``harmonic_exp``  f = e^t, the flat rotational surface with harmonic height

Indefinite integrals are anchored at explicit base points (``base_t`` for F,
``base_v`` for S and C) so generated surfaces are reproducible.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator, RectBivariateSpline

from .errors import ConfigError, DomainError, GridTooSmall, RegularityError
from .expr import Expression
from .quadrature import DEFAULT_TOL, antiderivative, integrate  # noqa: F401  (integrate re-exported)
from .surface import FD_STEP, Immersion, ImmersionJet, local_geometry, parameter_grid
from .warped_space import WarpingFunction, power_warping, exp_warping, warping_from_name

FAMILIES = ("type_i", "type_ii", "type_iii", "rotational", "minimal_power", "harmonic_exp")
FAMILY_LABEL = {
    "type_i": "TYPE_I", "rotational": "TYPE_I", "minimal_power": "TYPE_I",
    "harmonic_exp": "TYPE_I", "type_ii": "TYPE_II", "type_iii": "TYPE_III",
}
HALF_PI = np.pi / 2


def _trig(theta):
    # exact values at the ends so that cot(pi/2) is 0, not 6e-17
    if theta == HALF_PI:
        return 1.0, 0.0
    if theta == 0.0:
        return 0.0, 1.0
    return float(np.sin(theta)), float(np.cos(theta))


def _vec(a, b, c):
    a, b, c = np.broadcast_arrays(a, b, c)
    return np.stack([a, b, c], -1)


# ------------------------------------------------------------------ profiles

@dataclass(frozen=True)
class ProfileFunction:
    """The free function alpha(v) of type (i) surfaces.

    ``derivs(v)`` returns (alpha, alpha', alpha'').
    """

    derivs: Callable
    source: str = "0"

    def __call__(self, v):
        return self.derivs(np.asarray(v, dtype=float))[0]

    @classmethod
    def constant(cls, c=0.0):
        def d(v):
            v = np.asarray(v, dtype=float)
            return np.full_like(v, c), np.zeros_like(v), np.zeros_like(v)
        return cls(d, f"{c:g}")

    @classmethod
    def from_expression(cls, text, constants=None):
        expr = Expression(str(text), constants)
        if expr.arity != 1 or "u" in expr.variables:
            raise ConfigError(f"alpha must be a single expression in v, got {text!r}")

        def d(v):
            j = expr.jet(np.zeros_like(np.asarray(v, dtype=float)), v)
            return j.val, j.dv, j.dvv
        return cls(d, str(text))

    @classmethod
    def from_samples(cls, v, a):
        v = np.asarray(v, dtype=float)
        a = np.asarray(a, dtype=float)
        if v.size < 4:
            raise ConfigError("a sampled profile needs at least 4 knots")
        p = PchipInterpolator(v, a, extrapolate=True)
        d1, d2 = p.derivative(1), p.derivative(2)
        return cls(lambda x: (p(x), d1(x), d2(x)), f"table[{v.size}]")

    @classmethod
    def coerce(cls, alpha):
        if alpha is None:
            return cls.constant(0.0)
        if isinstance(alpha, ProfileFunction):
            return alpha
        if isinstance(alpha, (int, float)):
            return cls.constant(float(alpha))
        return cls.from_expression(alpha)


# ------------------------------------------------------------------ specs

@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    warping: object = "constant:1"
    theta: float = np.pi / 4
    alpha: object = None
    t0: Optional[float] = None
    m: Optional[float] = None
    gamma: Optional[tuple] = None
    radius: float = 1.0
    domain: Optional[tuple] = None
    base_t: Optional[float] = None
    base_v: float = 0.0
    adapted: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.family == "minimal_power":
            if self.m is None or not 0.0 < self.m < 1.0:
                raise ConfigError("minimal_power needs m in (0, 1)")
            object.__setattr__(self, "warping", power_warping(self.m))
            object.__setattr__(self, "theta", minimal_angle(self.m))
        elif self.family == "harmonic_exp":
            object.__setattr__(self, "warping", exp_warping())
        else:
            object.__setattr__(self, "warping", warping_from_name(self.warping))
        if self.family == "type_iii":
            object.__setattr__(self, "theta", 0.0)
        if not 0.0 <= self.theta <= HALF_PI + 1e-15:
            raise ConfigError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if self.alpha is not None and self.family != "type_i":
            raise ConfigError("alpha only applies to type_i")
        object.__setattr__(self, "alpha", ProfileFunction.coerce(self.alpha) if self.family == "type_i" else None)

    @property
    def label(self):
        return FAMILY_LABEL[self.family]


def minimal_angle(m):
    """The angle of the rotational minimal surface for f = t^m."""
    return float(np.arccos(np.sqrt((1 - m) / (1 + m))))


def minimal_exponent(theta):
    s, c = np.sin(theta), np.cos(theta)
    return float(s * s / (1 + c * c))


def t_window(warping):
    """A comfortable range of heights inside the warping interval."""
    lo, hi = warping.interval
    if lo < 0.25 and hi > 1.75:
        return 0.5, 1.5
    if np.isfinite(lo) and np.isfinite(hi):
        w = hi - lo
        return lo + 0.25 * w, lo + 0.75 * w
    if np.isfinite(lo):
        return lo + 0.5, lo + 1.5
    return hi - 1.5, hi - 0.5


def default_base_t(family, warping, t_lo, t_hi):
    """Anchor of int dt/f.

    Type (ii) uses the middle of the height range.  Surfaces that rotate
    about the t-axis put the anchor below the range (half a range-width, or
    halfway to the interval end) so that the profile radius stays positive.
    """
    if family == "type_ii":
        return 0.5 * (t_lo + t_hi)
    lo = warping.interval[0]
    cand = t_lo - 0.5 * (t_hi - t_lo)
    if cand <= lo + 1e-6:
        cand = 0.5 * (lo + t_lo)
    return cand


def default_domain(spec):
    t_lo, t_hi = t_window(spec.warping)
    s, _ = _trig(spec.theta)
    fam = spec.family
    if fam == "type_iii":
        return (-1.0, 1.0, -1.0, 1.0)
    if fam == "type_ii":
        if spec.adapted:
            return (t_lo / s, t_hi / s, -1.0, 1.0)
        return (t_lo, t_hi, -1.0, 1.0)
    if fam == "type_i":
        return (t_lo / s, t_hi / s, 0.0, 1.0)
    return (t_lo / s, t_hi / s, 0.0, 2 * np.pi)


def resolved(spec):
    """Spec with domain and base points filled in."""
    dom = spec.domain if spec.domain is not None else default_domain(spec)
    base_t = spec.base_t
    if base_t is None and spec.family in ("type_i", "type_ii", "rotational"):
        t_lo, t_hi = t_window(spec.warping)
        if spec.domain is not None:
            s, _ = _trig(spec.theta)
            scale = s if (spec.family != "type_ii" or spec.adapted) else 1.0
            t_lo, t_hi = sorted((dom[0] * scale, dom[1] * scale))
        base_t = default_base_t(spec.family, spec.warping, t_lo, t_hi)
    return replace(spec, domain=tuple(float(x) for x in dom), base_t=base_t)


def _primitive(warping, base_t, tol=DEFAULT_TOL):
    warping.check_domain(base_t)
    return lambda t: antiderivative(lambda x: 1.0 / warping(x), base_t, t, tol)


def _check_regular(jets, domain, name, n=33):
    U, V = parameter_grid(domain, n)
    J = jets(U, V)
    nu = np.linalg.norm(J.Xu, axis=-1)
    nv = np.linalg.norm(J.Xv, axis=-1)
    bad = ~(nv > 1e-9 * np.maximum(1.0, nu)) | ~(nu > 0)
    if np.any(bad):
        i = np.argwhere(bad)[0]
        raise RegularityError(f"{name} fails to be immersed near u={U[tuple(i)]:.6g}, v={V[tuple(i)]:.6g}")


def _rotational_jets(s, R):
    """Jets of (u s, R(u) cos v, R(u) sin v); R returns (R, R_u, R_uu) at t = u s."""
    def jets(u, v):
        r, ru, ruu = R(u * s)
        cv, sv = np.cos(v), np.sin(v)
        z = np.zeros_like(cv)
        dirv = _vec(z, -sv, cv)
        return ImmersionJet(
            X=_vec(u * s, r * cv, r * sv),
            Xu=_vec(np.full_like(cv, s), ru * cv, ru * sv),
            Xv=r[..., None] * dirv,
            Xuu=_vec(z, ruu * cv, ruu * sv),
            Xuv=ru[..., None] * dirv,
            Xvv=r[..., None] * _vec(z, -cv, -sv),
        )
    return jets


def _immersion(jets, spec, name, meta=None):
    info = {"family": spec.family, "theta": spec.theta, "warping": spec.warping.name,
            "base_t": spec.base_t, "base_v": spec.base_v}
    info.update(meta or {})
    return Immersion(position=lambda u, v: jets(*np.broadcast_arrays(u, v)).X, warping=spec.warping,
                     domain=spec.domain, jets=jets, name=name, meta=info)


# ------------------------------------------------------------------ families

def make_type_i(spec):
    spec = resolved(spec)
    w = spec.warping
    s, c = _trig(spec.theta)
    if s == 0.0:
        raise ConfigError("type_i needs theta in (0, pi/2]")
    if spec.gamma is not None:
        return _make_general_cylinder(spec)
    ct = c / s
    alpha = spec.alpha
    F = _primitive(w, spec.base_t)
    bv = spec.base_v

    def SC(v):
        S = antiderivative(lambda x: alpha(x) * np.sin(x), bv, v)
        C = antiderivative(lambda x: alpha(x) * np.cos(x), bv, v)
        return S, C

    def jets(u, v):
        t = u * s
        f, f1, _ = w.derivatives(t)
        Fv = F(t)
        a, a1, _ = alpha.derivs(v)
        S, C = SC(v)
        cv, sv = np.cos(v), np.sin(v)
        z = np.zeros_like(t)
        B = ct * Fv + a
        dirv = _vec(z, -sv, cv)
        return ImmersionJet(
            X=_vec(t, ct * Fv * cv - S, ct * Fv * sv + C),
            Xu=_vec(np.full_like(t, s), c * cv / f, c * sv / f),
            Xv=B[..., None] * dirv,
            Xuu=(-c * s * f1 / f**2)[..., None] * _vec(z, cv, sv),
            Xuv=(c / f)[..., None] * dirv,
            Xvv=a1[..., None] * dirv + B[..., None] * _vec(z, -cv, -sv),
        )

    _check_regular(jets, spec.domain, "type_i surface")
    return _immersion(jets, spec, f"type_i[{w.name}, alpha={alpha.source}]", {"alpha": alpha.source})


def _make_general_cylinder(spec):
    """(u, gamma1(v), gamma2(v)): the vertical cylinder over a plane curve, theta = pi/2."""
    if spec.theta != HALF_PI:
        raise ConfigError("an explicit gamma curve is only meaningful at theta = pi/2")
    g1, g2 = (Expression(str(g)) for g in spec.gamma)

    def jets(u, v):
        a, b = g1.jet(np.zeros_like(v), v), g2.jet(np.zeros_like(v), v)
        z = np.zeros_like(u)
        return ImmersionJet(
            X=_vec(u, a.val, b.val), Xu=_vec(np.ones_like(u), z, z), Xv=_vec(z, a.dv, b.dv),
            Xuu=_vec(z, z, z), Xuv=_vec(z, z, z), Xvv=_vec(z, a.dvv, b.dvv))

    _check_regular(jets, spec.domain, "cylinder")
    return _immersion(jets, spec, f"cylinder[{spec.warping.name}, {spec.gamma}]", {"gamma": list(map(str, spec.gamma))})


def make_type_ii(spec):
    spec = resolved(spec)
    w = spec.warping
    s, c = _trig(spec.theta)
    if s == 0.0:
        raise ConfigError("type_ii needs theta in (0, pi/2]")
    ct = c / s
    F = _primitive(w, spec.base_t)
    k = s if spec.adapted else 1.0

    def jets(u, v):
        u, v = np.broadcast_arrays(u, v)
        t = u * k
        f, f1, _ = w.derivatives(t)
        z = np.zeros_like(t)
        return ImmersionJet(
            X=_vec(t, ct * F(t), v),
            Xu=_vec(np.full_like(t, k), k * ct / f, z),
            Xv=_vec(z, z, np.ones_like(t)),
            Xuu=_vec(z, -k * k * ct * f1 / f**2, z),
            Xuv=_vec(z, z, z),
            Xvv=_vec(z, z, z),
        )

    return _immersion(jets, spec, f"type_ii[{w.name}]", {"adapted": spec.adapted})


def make_type_iii(spec):
    spec = resolved(spec)
    w = spec.warping
    if spec.t0 is None:
        raise ConfigError("type_iii needs t0")
    t0 = float(spec.t0)
    w.check_domain(t0)

    def jets(u, v):
        u, v = np.broadcast_arrays(u, v)
        z = np.zeros_like(u)
        one = np.ones_like(u)
        return ImmersionJet(X=_vec(z + t0, u, v), Xu=_vec(z, one, z), Xv=_vec(z, z, one),
                            Xuu=_vec(z, z, z), Xuv=_vec(z, z, z), Xvv=_vec(z, z, z))

    return _immersion(jets, spec, f"type_iii[{w.name}, t0={t0:g}]", {"t0": t0})


def make_rotational(spec, check_profile=True):
    spec = resolved(spec)
    w = spec.warping
    s, c = _trig(spec.theta)
    if s == 0.0:
        raise ConfigError("rotational surfaces need theta in (0, pi/2]")
    if c == 0.0:
        b0 = float(spec.radius)
        R = lambda t: (np.full_like(t, b0), np.zeros_like(t), np.zeros_like(t))
    else:
        ct = c / s
        F = _primitive(w, spec.base_t)

        def R(t):
            f, f1, _ = w.derivatives(t)
            return ct * F(t), c / f, -c * s * f1 / f**2
    jets = _rotational_jets(s, R)
    _check_regular(jets, spec.domain, "rotational surface")
    if check_profile:
        # profile (a(u), b(u)) = (u s, R): unit speed and b' f(a) = cos(theta)
        u = np.linspace(spec.domain[0], spec.domain[1], 17)
        _, bu, _ = R(u * s)
        fa = w(u * s)
        if not np.allclose(s * s + fa**2 * bu**2, 1.0, rtol=0, atol=1e-12):
            raise RegularityError("profile curve is not unit speed")
        if not np.allclose(bu * fa, c, rtol=0, atol=1e-12):
            raise RegularityError("profile does not make the prescribed angle")
    return _immersion(jets, spec, f"rotational[{w.name}]")


def make_minimal_power(m, domain=None):
    """The rotational minimal surface in I x_{t^m} E^2; returns (immersion, theta)."""
    spec = resolved(GeneratorSpec("minimal_power", m=m, domain=domain))
    s, c = _trig(spec.theta)
    k = (c / s) / (1 - m)

    def R(t):
        if np.any(t <= 0):
            raise DomainError("minimal_power needs u sin(theta) > 0")
        return k * t ** (1 - m), c * t ** (-m), -c * m * s * t ** (-m - 1)

    imm = _immersion(_rotational_jets(s, R), spec, f"minimal_power[m={m:g}]", {"m": m})
    return imm, spec.theta


def make_harmonic_exp(theta, domain=None):
    """Rotational constant angle surface with harmonic height in I x_{e^t} E^2.

    Its profile radius is cot(theta) e^(-t); it is flat and has constant mean
    curvature -(1 + cos^2)/(2 cos) for the normal with positive d_t component.
    """
    if not 0.0 < theta < HALF_PI:
        raise ConfigError("harmonic_exp needs theta in (0, pi/2)")
    spec = resolved(GeneratorSpec("harmonic_exp", theta=theta, domain=domain))
    s, c = _trig(theta)
    ct = c / s

    def R(t):
        e = np.exp(-t)
        return ct * e, -c * e, c * s * e

    return _immersion(_rotational_jets(s, R), spec, f"harmonic_exp[theta={theta:.6g}]")


def generate(spec):
    fam = spec.family
    if fam == "type_i":
        return make_type_i(spec)
    if fam == "type_ii":
        return make_type_ii(spec)
    if fam == "type_iii":
        return make_type_iii(spec)
    if fam == "rotational":
        return make_rotational(spec)
    if fam == "minimal_power":
        return make_minimal_power(spec.m, spec.domain)[0]
    return make_harmonic_exp(spec.theta, spec.domain)


# ------------------------------------------------------------------ user immersions

def immersion_from_expression(text, warping, domain, constants=None):
    """An immersion ``(t(u,v), x(u,v), y(u,v))`` written in the expression grammar."""
    expr = Expression(text, constants)
    if expr.arity != 3:
        raise ConfigError("an immersion expression must be a triple (t, x, y)")
    w = warping_from_name(warping)

    def jets(u, v):
        comps = expr.jet(u, v)
        return ImmersionJet(*(np.stack([getattr(c, k) for c in comps], -1)
                              for k in ("val", "du", "dv", "duu", "duv", "dvv")))

    return Immersion(position=lambda u, v: jets(u, v).X, warping=w, domain=tuple(map(float, domain)),
                     jets=jets, name=f"expr{text}", meta={"expression": text})


def immersion_from_samples(us, vs, points, warping):
    """Interpolate a sampled grid ``points[i, j] = (t, x, y)(us[i], vs[j])`` with
    quintic (or lower, for small grids) tensor splines."""
    us = np.asarray(us, dtype=float)
    vs = np.asarray(vs, dtype=float)
    points = np.asarray(points, dtype=float)
    if points.shape != (us.size, vs.size, 3):
        raise ConfigError("sample array must have shape (len(us), len(vs), 3)")
    ku = min(5, us.size - 1)
    kv = min(5, vs.size - 1)
    splines = [RectBivariateSpline(us, vs, points[..., i], kx=ku, ky=kv, s=0) for i in range(3)]
    w = warping_from_name(warping)

    def ev(u, v, a, b):
        return np.stack([sp.ev(u, v, dx=a, dy=b) for sp in splines], -1)

    def jets(u, v):
        u, v = np.broadcast_arrays(u, v)
        return ImmersionJet(ev(u, v, 0, 0), ev(u, v, 1, 0), ev(u, v, 0, 1),
                            ev(u, v, 2, 0), ev(u, v, 1, 1), ev(u, v, 0, 2))

    dom = (float(us[0]), float(us[-1]), float(vs[0]), float(vs[-1]))
    return Immersion(position=lambda u, v: jets(u, v).X, warping=w, domain=dom, jets=jets,
                     name=f"samples[{us.size}x{vs.size}]", meta={"sampled": True})


def load_sample_grid(path, warping):
    """Read ``u v t x y`` rows (any order) lying on a rectangular (u, v) grid."""
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read sample grid {path}: {exc}") from None
    if data.shape[1] != 5:
        raise ConfigError(f"{path}: expected five columns u v t x y")
    us, iu = np.unique(data[:, 0], return_inverse=True)
    vs, iv = np.unique(data[:, 1], return_inverse=True)
    if us.size * vs.size != data.shape[0]:
        raise ConfigError(f"{path}: samples do not form a full rectangular grid")
    pts = np.full((us.size, vs.size, 3), np.nan)
    pts[iu, iv] = data[:, 2:]
    if np.isnan(pts).any():
        raise ConfigError(f"{path}: duplicate (u, v) samples")
    return immersion_from_samples(us, vs, pts, warping)


# ------------------------------------------------------------------ classification

@dataclass
class ClassificationReport:
    verdict: str
    theta: float
    theta_std: float
    umbilicity: float
    grid: tuple
    tolerances: dict
    alpha_v: Optional[np.ndarray] = None
    alpha: Optional[np.ndarray] = None
    alpha_residual: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        out = {"verdict": self.verdict, "theta": self.theta, "theta_deg": float(np.degrees(self.theta)),
               "theta_std": self.theta_std, "umbilicity": self.umbilicity, "grid": list(self.grid),
               "tolerances": self.tolerances}
        if self.alpha is not None:
            out["alpha_residual"] = self.alpha_residual
            out["alpha_samples"] = [[float(a), float(b)] for a, b in zip(self.alpha_v, self.alpha)]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def recover_alpha(imm, geom, base_t):
    """Pointwise recovery of the type (i) profile from the geometry.

    Uses beta = sin / (lambda + (log f)' cos) and alpha = beta / f - cot F(t), all for
    the canonical normal; the matching profile parameter is the direction angle
    of the horizontal part of -xi.  Returns (v_hat, alpha_hat).
    """
    g = geom.canonical()
    lam = g.frame_eigenvalues[1]
    beta = g.sin_theta / (lam + g.log_d1 * g.cos_theta)
    F = antiderivative(lambda x: 1.0 / imm.warping(x), base_t, g.t)
    alpha = beta / g.f - (g.cos_theta / g.sin_theta) * F
    v_hat = np.arctan2(-g.normal[..., 2], -g.normal[..., 1])
    return v_hat, alpha


def classify(imm, nu=32, nv=None, angle_tol=None, zero_tol=1e-6, umbilic_tol=None,
             alpha_tol=1e-4, base_t=None):
    """Decide which family of the classification a surface belongs to."""
    nv = nu if nv is None else nv
    if nu < 8 or nv < 8:
        raise GridTooSmall(f"classification needs at least an 8x8 grid, got {nu}x{nv}")
    analytic = imm.analytic and not imm.meta.get("sampled")
    if angle_tol is None:
        angle_tol = 1e-8 if analytic else 1e-5
    if umbilic_tol is None:
        umbilic_tol = 1e-6 if analytic else 1e-4
    tols = {"angle": angle_tol, "zero_angle": zero_tol, "umbilic": umbilic_tol, "alpha": alpha_tol}
    U, V = parameter_grid(imm.domain, nu, nv, interior=True)
    g = local_geometry(imm, U, V).canonical()
    theta = g.theta
    th_mean, th_std = float(np.mean(theta)), float(np.std(theta))
    umb = float(np.max(g.umbilicity))
    rep = ClassificationReport("NOT_CONSTANT_ANGLE", th_mean, th_std, umb, (nu, nv), tols)
    if th_std > angle_tol:
        return rep
    if th_mean < zero_tol:
        rep.verdict = "TYPE_III"
        return rep
    if umb < umbilic_tol:
        rep.verdict = "TYPE_II"
        return rep
    rep.verdict = "TYPE_I"
    if base_t is None:
        base_t = 0.5 * (float(g.t.min()) + float(g.t.max()))
    v_hat, alpha = recover_alpha(imm, g, base_t)
    # alpha must be constant along the e1 curves: difference it along e1
    e1, _ = g.frame
    h = (FD_STEP * np.maximum(1.0, np.maximum(np.abs(U), np.abs(V))))
    plus = local_geometry(imm, U + h * e1[..., 0], V + h * e1[..., 1])
    minus = local_geometry(imm, U - h * e1[..., 0], V - h * e1[..., 1])
    a_plus = recover_alpha(imm, plus, base_t)[1]
    a_minus = recover_alpha(imm, minus, base_t)[1]
    resid = float(np.max(np.abs(a_plus - a_minus) / (2 * h)))
    rep.alpha_v, rep.alpha, rep.alpha_residual = v_hat[:, :].mean(axis=0), alpha.mean(axis=0), resid
    rep.notes.append(f"alpha anchored at t={base_t:.17g}")
    if not resid < alpha_tol:
        rep.verdict = "INCONCLUSIVE"
        rep.notes.append("recovered alpha varies along the T direction")
    return rep
