"""The ambient warped product I x_f E^2 with metric dt^2 + f(t)^2 (dx^2 + dy^2).

Coordinates are ordered (t, x, y) everywhere.  The module has two layers:

* array kernels (``metric_components``, ``connection_components``, ...) that
  act on ``(..., 3)`` arrays and are what the surface code uses on whole grids;
* a small object layer (:class:`AmbientPoint`, :class:`AmbientVector`,
  :class:`WarpedSpace`) that checks base points and domains for single-point use.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BaseMismatch, ConfigError, DegeneratePlane, DomainError

EPS = np.finfo(float).eps
FD_STEP = EPS ** (1 / 3)
FD_STEP2 = EPS ** (1 / 4)
ENDPOINT_MARGIN = 1e-9


def _fd_first(f, t):
    h = FD_STEP * np.maximum(1.0, np.abs(t))
    return (f(t + h) - f(t - h)) / (2 * h)


def _fd_second(f, t):
    h = FD_STEP2 * np.maximum(1.0, np.abs(t))
    return (f(t + h) - 2 * f(t) + f(t - h)) / (h * h)


@dataclass(frozen=True)
class WarpingFunction:
    """A strictly positive warping function on an open interval.

    ``df`` / ``d2f`` may be omitted, in which case central differences are used
    (step cbrt(eps)*max(1,|t|) for the first derivative, eps**(1/4)*max(1,|t|)
    for the second).  ``primitive`` is an optional closed form of int dt/f used
    only as a cross-check.
    """

    f: Callable
    df: Optional[Callable] = None
    d2f: Optional[Callable] = None
    interval: tuple = (-np.inf, np.inf)
    name: str = "custom"
    primitive: Optional[Callable] = field(default=None, compare=False)

    @property
    def family(self):
        return self.name.split(":", 1)[0]

    @property
    def analytic(self):
        return self.df is not None and self.d2f is not None

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.interval
        bad = ~np.isfinite(t) | (t <= lo + ENDPOINT_MARGIN) | (t >= hi - ENDPOINT_MARGIN)
        if np.any(bad):
            worst = t[bad].flat[0] if t.ndim else float(t)
            raise DomainError(f"t={worst!r} outside the warping interval {self.interval} of {self.name}")
        return t

    def __call__(self, t):
        t = self.check_domain(t)
        val = np.asarray(self.f(t), dtype=float)
        if np.any(val <= 0):
            raise DomainError(f"warping function {self.name} is not positive on the requested points")
        return val

    def d1(self, t):
        t = self.check_domain(t)
        return np.asarray(self.df(t) if self.df is not None else _fd_first(self.f, t), dtype=float)

    def d2(self, t):
        t = self.check_domain(t)
        return np.asarray(self.d2f(t) if self.d2f is not None else _fd_second(self.f, t), dtype=float)

    def derivatives(self, t):
        """(f, f', f'') at t, with domain and positivity checks."""
        return self(t), self.d1(t), self.d2(t)

    def log_d1(self, t):
        f, f1, _ = self.derivatives(t)
        return f1 / f

    def log_d2(self, t):
        f, f1, f2 = self.derivatives(t)
        return f2 / f - (f1 / f) ** 2

    def sample_points(self, n, seed=0):
        """Uniform samples from a bounded window well inside the interval."""
        lo, hi = self.interval
        if np.isfinite(lo) and np.isfinite(hi):
            a, b = lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo)
        elif np.isfinite(lo):
            a, b = lo + 0.25, lo + 3.0
        elif np.isfinite(hi):
            a, b = hi - 3.0, hi - 0.25
        else:
            a, b = -3.0, 3.0
        return np.random.default_rng(seed).uniform(a, b, size=n)

    def derivative_error(self, n=32, seed=0):
        """Largest relative gap between the supplied derivatives and central differences.

        Returns 0.0 for finite-difference warpings (nothing to compare).
        """
        if not self.analytic:
            return 0.0
        t = self.sample_points(n, seed)
        f = np.abs(self(t))
        e1 = np.abs(self.d1(t) - _fd_first(self.f, t)) / np.maximum(np.abs(self.d1(t)), f)
        e2 = np.abs(self.d2(t) - _fd_second(self.f, t)) / np.maximum(np.abs(self.d2(t)), f)
        return float(max(e1.max(), e2.max()))


# ---------------------------------------------------------------- registry

def constant_warping(a=1.0):
    if a <= 0:
        raise ConfigError("constant warping needs a > 0")
    return WarpingFunction(
        f=lambda t: np.full_like(np.asarray(t, dtype=float), a),
        df=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        d2f=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        name=f"constant:{a:g}",
        primitive=lambda t: np.asarray(t, dtype=float) / a,
    )


def linear_warping(a=1.0, b=0.0):
    """f(t) = a (t + b), the cone metric."""
    if a == 0:
        raise ConfigError("linear warping needs a != 0")
    interval = (-b, np.inf) if a > 0 else (-np.inf, -b)
    return WarpingFunction(
        f=lambda t: a * (np.asarray(t, dtype=float) + b),
        df=lambda t: np.full_like(np.asarray(t, dtype=float), a),
        d2f=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        interval=interval,
        name=f"linear:{a:g},{b:g}",
        primitive=lambda t: np.log(np.abs(np.asarray(t, dtype=float) + b)) / a,
    )


def power_warping(m):
    """f(t) = t**m on (0, inf)."""
    def prim(t):
        t = np.asarray(t, dtype=float)
        return np.log(t) if m == 1 else t ** (1 - m) / (1 - m)

    return WarpingFunction(
        f=lambda t: np.asarray(t, dtype=float) ** m,
        df=lambda t: m * np.asarray(t, dtype=float) ** (m - 1),
        d2f=lambda t: m * (m - 1) * np.asarray(t, dtype=float) ** (m - 2),
        interval=(0.0, np.inf),
        name=f"power:{m:.17g}",
        primitive=prim,
    )


def exp_warping():
    return WarpingFunction(f=np.exp, df=np.exp, d2f=np.exp, name="exp",
                           primitive=lambda t: -np.exp(-np.asarray(t, dtype=float)))


def cosh_warping():
    return WarpingFunction(f=np.cosh, df=np.sinh, d2f=np.cosh, name="cosh",
                           primitive=lambda t: 2 * np.arctan(np.tanh(np.asarray(t, dtype=float) / 2)))


def tabulated_warping(path):
    """Monotone-cubic (PCHIP) interpolant of a two-column ``t f`` text file.

    The second derivative of a PCHIP interpolant is only piecewise continuous,
    so curvature quantities are only as good as the table.
    """
    path = Path(path)
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"cannot read warping table {path}: {exc}") from None
    if data.shape[1] != 2 or data.shape[0] < 4:
        raise ConfigError(f"{path}: need at least 4 rows of two columns (t, f)")
    order = np.argsort(data[:, 0])
    t, fv = data[order, 0], data[order, 1]
    if np.any(np.diff(t) <= 0):
        raise ConfigError(f"{path}: t column has repeated values")
    if np.any(fv <= 0):
        raise ConfigError(f"{path}: warping samples must be positive")
    p = PchipInterpolator(t, fv, extrapolate=False)
    return WarpingFunction(f=p, df=p.derivative(1), d2f=p.derivative(2),
                           interval=(float(t[0]), float(t[-1])), name=f"table:{path}")


def _params(text, n, defaults):
    vals = [float(x) for x in text.split(",")] if text else []
    if len(vals) > n:
        raise ConfigError(f"too many parameters in {text!r}")
    return vals + list(defaults[len(vals):])


def warping_from_name(spec):
    """Build a warping from a registry string.

    ``constant:a``, ``linear:a,b`` (a(t+b)), ``power:m`` (t^m), ``exp`` (e^t),
    ``cosh``, or ``table:PATH`` / a path to a two-column file.
    """
    if isinstance(spec, WarpingFunction):
        return spec
    spec = str(spec).strip()
    kind, _, rest = spec.partition(":")
    try:
        if kind == "constant":
            return constant_warping(*_params(rest, 1, [1.0]))
        if kind == "linear":
            return linear_warping(*_params(rest, 2, [1.0, 0.0]))
        if kind == "power":
            if not rest:
                raise ConfigError("power warping needs an exponent, e.g. power:0.5")
            return power_warping(float(rest))
        if kind == "exp" and not rest:
            return exp_warping()
        if kind == "cosh" and not rest:
            return cosh_warping()
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad warping parameters in {spec!r}") from None
    if kind == "table":
        return tabulated_warping(rest)
    if Path(spec).is_file():
        return tabulated_warping(spec)
    raise ConfigError(f"unknown warping {spec!r}")


BUILTIN_WARPINGS = ("constant:1", "linear:1,1", "linear:2,0.5", "power:0.5", "exp", "cosh")


# ---------------------------------------------------------------- array kernels

def metric_components(a, b, f):
    """g(a, b) for component arrays a, b of shape (..., 3) at height with warping value f."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] + f**2 * (a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2])


def connection_components(a, b, f, f1):
    """Christoffel contraction Gamma(a, b)^k = Gamma^k_ij a^i b^j.

    Nonzero symbols: Gamma^t_xx = Gamma^t_yy = -f f', Gamma^x_tx = Gamma^y_ty = f'/f.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    k = f1 / f
    return np.stack([
        -f * f1 * (a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]),
        k * (a[..., 0] * b[..., 1] + a[..., 1] * b[..., 0]),
        k * (a[..., 0] * b[..., 2] + a[..., 2] * b[..., 0]),
    ], axis=-1)


def warped_cross_components(a, b, f):
    a = np.asarray(a)
    b = np.asarray(b)
    return np.stack([
        f**2 * (a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1]),
        a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
        a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
    ], axis=-1)


def curvature_components(U, V, W, f, f1, f2):
    """R(U, V)W by splitting each argument into its d/dt part and horizontal part."""
    U, V, W = (np.asarray(x, dtype=float) for x in (U, V, W))
    u0, v0, w0 = U[..., 0], V[..., 0], W[..., 0]
    Uh, Vh, Wh = (np.concatenate([np.zeros_like(x[..., :1]), x[..., 1:]], axis=-1) for x in (U, V, W))
    g_vw = metric_components(Vh, Wh, f)
    g_uw = metric_components(Uh, Wh, f)
    k1 = np.asarray((f1 / f) ** 2)[..., None]
    k2 = np.asarray(f2 / f)
    horizontal = -k1 * (g_vw[..., None] * Uh - g_uw[..., None] * Vh)
    mixed = -k2[..., None] * w0[..., None] * (v0[..., None] * Uh - u0[..., None] * Vh)
    vertical = k2 * (v0 * g_uw - u0 * g_vw)
    out = horizontal + mixed
    out[..., 0] += vertical
    return out


def christoffel_table(f, f1):
    """Gamma^k_ij as a (3, 3, 3) array indexed [k, i, j] at a single height."""
    g = np.zeros((3, 3, 3))
    g[0, 1, 1] = g[0, 2, 2] = -f * f1
    g[1, 0, 1] = g[1, 1, 0] = f1 / f
    g[2, 0, 2] = g[2, 2, 0] = f1 / f
    return g


def christoffel_table_dt(f, f1, f2):
    """d/dt of :func:`christoffel_table` (the only coordinate it depends on)."""
    g = np.zeros((3, 3, 3))
    g[0, 1, 1] = g[0, 2, 2] = -(f1 * f1 + f * f2)
    d = f2 / f - (f1 / f) ** 2
    g[1, 0, 1] = g[1, 1, 0] = d
    g[2, 0, 2] = g[2, 2, 0] = d
    return g


def riemann_table(f, f1, f2):
    """R^r_{s m n} with R(d_m, d_n) d_s = R^r_{s m n} d_r, from Christoffel symbols."""
    gam = christoffel_table(f, f1)
    dgam = np.zeros((3, 3, 3, 3))          # [m, k, i, j] = d_m Gamma^k_ij
    dgam[0] = christoffel_table_dt(f, f1, f2)
    r = (np.einsum("mrns->rsmn", dgam) - np.einsum("nrms->rsmn", dgam)
         + np.einsum("rml,lns->rsmn", gam, gam) - np.einsum("rnl,lms->rsmn", gam, gam))
    return r


# ---------------------------------------------------------------- object layer

@dataclass(frozen=True)
class AmbientPoint:
    t: float
    x: float = 0.0
    y: float = 0.0

    @property
    def components(self):
        return np.array([self.t, self.x, self.y], dtype=float)


@dataclass(frozen=True)
class AmbientVector:
    base: AmbientPoint
    dt: float = 0.0
    dx: float = 0.0
    dy: float = 0.0

    @property
    def components(self):
        return np.array([self.dt, self.dx, self.dy], dtype=float)

    @classmethod
    def from_components(cls, base, c):
        return cls(base, float(c[0]), float(c[1]), float(c[2]))

    def __add__(self, other):
        _same_base(self, other)
        return AmbientVector.from_components(self.base, self.components + other.components)

    def __sub__(self, other):
        _same_base(self, other)
        return AmbientVector.from_components(self.base, self.components - other.components)

    def __mul__(self, k):
        return AmbientVector.from_components(self.base, self.components * k)

    __rmul__ = __mul__


def _same_base(*vectors):
    first = vectors[0].base
    for vec in vectors[1:]:
        if vec.base != first:
            raise BaseMismatch(f"vectors live at different points: {first} vs {vec.base}")
    return first


def d_t(p):
    return AmbientVector(p, 1.0, 0.0, 0.0)


def d_x(p):
    return AmbientVector(p, 0.0, 1.0, 0.0)


def d_y(p):
    return AmbientVector(p, 0.0, 0.0, 1.0)


class WarpedSpace:
    """I x_f E^2 for a given warping function."""

    def __init__(self, warping):
        self.warping = warping_from_name(warping)

    def __repr__(self):
        return f"WarpedSpace({self.warping.name})"

    def _f(self, p):
        f, f1, f2 = self.warping.derivatives(p.t)
        return float(f), float(f1), float(f2)

    def metric(self, a, b):
        p = _same_base(a, b)
        f, _, _ = self._f(p)
        return float(metric_components(a.components, b.components, f))

    def norm(self, a):
        return float(np.sqrt(self.metric(a, a)))

    def christoffel(self, p):
        f, f1, _ = self._f(p)
        return christoffel_table(f, f1)

    def covariant_derivative(self, field, direction):
        """Covariant derivative of the vector field ``field`` (a callable
        AmbientPoint -> AmbientVector) along ``direction``.

        The ordinary derivative of the components is a central difference along
        the direction, step cbrt(eps)*max(1, |p|).
        """
        p = direction.base
        f, f1, _ = self._f(p)
        d = direction.components
        x0 = p.components
        here = field(p).components
        dn = np.max(np.abs(d))
        if dn == 0:
            return AmbientVector(p)
        h = FD_STEP * max(1.0, float(np.max(np.abs(x0)))) / dn
        plus = field(AmbientPoint(*(x0 + h * d))).components
        minus = field(AmbientPoint(*(x0 - h * d))).components
        deriv = (plus - minus) / (2 * h)
        return AmbientVector.from_components(p, deriv + connection_components(d, here, f, f1))

    def curvature(self, U, V, W):
        """R(U, V)W with R(U, V) = [nabla_U, nabla_V] - nabla_[U,V]."""
        p = _same_base(U, V, W)
        f, f1, f2 = self._f(p)
        return AmbientVector.from_components(
            p, curvature_components(U.components, V.components, W.components, f, f1, f2))

    def curvature_christoffel(self, U, V, W):
        """Same tensor as :meth:`curvature`, assembled from Christoffel symbols."""
        p = _same_base(U, V, W)
        f, f1, f2 = self._f(p)
        r = riemann_table(f, f1, f2)
        return AmbientVector.from_components(
            p, np.einsum("rsmn,m,n,s->r", r, U.components, V.components, W.components))

    def sectional_curvature(self, p, a, b, tol=1e-12):
        if a.base != p or b.base != p:
            raise BaseMismatch("plane vectors must be based at p")
        gaa, gbb, gab = self.metric(a, a), self.metric(b, b), self.metric(a, b)
        denom = gaa * gbb - gab * gab
        if denom < tol * max(gaa * gbb, 1e-300):
            raise DegeneratePlane("vectors do not span a plane")
        return self.metric(self.curvature(a, b, b), a) / denom

    def warped_cross(self, a, b):
        p = _same_base(a, b)
        f, _, _ = self._f(p)
        return AmbientVector.from_components(p, warped_cross_components(a.components, b.components, f))
