"""Geometry of immersed surfaces in I x_f E^2.

Conventions used throughout:

* the unit normal is the normalised warped cross product of the parameter
  derivatives, ``xi = (X_u x_f X_v) / |X_u x_f X_v|``;
* the shape operator follows the Weingarten sign, ``nabla_X xi = -A X``, and is
  expressed as a 2x2 matrix in the coordinate basis (d_u, d_v);
* ``theta`` is the angle between d_t and xi, in [0, pi).  ``canonical()`` flips
  xi wherever cos(theta) < 0 so that theta lands in [0, pi/2].

Everything that needs one derivative more than the immersion jet supplies
(intrinsic curvature, Codazzi, the Laplacian of the height) is obtained by
differencing analytically evaluated fields with step cbrt(eps)*max(1,|u|).
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Optional

import numpy as np

from .errors import AngleDegenerate, BoundaryError, DegenerateImmersion, ModelMismatch
from .warped_space import (FD_STEP, FD_STEP2, AmbientPoint, AmbientVector, WarpingFunction,
                           connection_components, curvature_components, metric_components,
                           warped_cross_components, warping_from_name)

REGULARITY_TOL = 1e-10
FRAME_TOL = 1e-8


@dataclass(frozen=True)
class ImmersionJet:
    """Position and first/second parameter derivatives, each an (..., 3) array."""

    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray


@dataclass(frozen=True)
class Immersion:
    """A map (u, v) -> (t, x, y) over a rectangle ``domain = (u0, u1, v0, v1)``.

    ``position(u, v)`` must accept broadcastable arrays and return (..., 3).
    ``jets(u, v)``, when given, returns an :class:`ImmersionJet` with analytic
    derivatives; otherwise derivatives come from central differences.
    """

    position: Callable
    warping: WarpingFunction
    domain: tuple
    jets: Optional[Callable] = None
    name: str = "immersion"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def analytic(self):
        return self.jets is not None

    def as_fd(self):
        """The same surface with the analytic derivatives dropped."""
        return replace(self, jets=None, name=self.name + "[fd]")

    def __call__(self, u, v):
        return np.asarray(self.position(np.asarray(u, dtype=float), np.asarray(v, dtype=float)), dtype=float)

    def jet(self, u, v, mode="auto"):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        if mode == "analytic" and self.jets is None:
            raise ValueError(f"{self.name} has no analytic derivatives")
        if self.jets is not None and mode != "fd":
            return self.jets(u, v)
        return fd_jet(self.position, u, v)


def fd_jet(position, u, v):
    """Central-difference jet.  First derivatives use cbrt(eps) steps, second
    derivatives eps**(1/4) steps (the optimal order for a 3-point stencil)."""
    p = lambda a, b: np.asarray(position(a, b), dtype=float)
    hu = (FD_STEP * np.maximum(1.0, np.abs(u)))[..., None]
    hv = (FD_STEP * np.maximum(1.0, np.abs(v)))[..., None]
    ku = (FD_STEP2 * np.maximum(1.0, np.abs(u)))[..., None]
    kv = (FD_STEP2 * np.maximum(1.0, np.abs(v)))[..., None]
    X = p(u, v)
    Xu = (p(u + hu[..., 0], v) - p(u - hu[..., 0], v)) / (2 * hu)
    Xv = (p(u, v + hv[..., 0]) - p(u, v - hv[..., 0])) / (2 * hv)
    Xuu = (p(u + ku[..., 0], v) - 2 * X + p(u - ku[..., 0], v)) / ku**2
    Xvv = (p(u, v + kv[..., 0]) - 2 * X + p(u, v - kv[..., 0])) / kv**2
    a, b = ku[..., 0], kv[..., 0]
    Xuv = (p(u + a, v + b) - p(u + a, v - b) - p(u - a, v + b) + p(u - a, v - b)) / (4 * ku * kv)
    return ImmersionJet(X, Xu, Xv, Xuu, Xuv, Xvv)


def _mat_inv2(E, F, G):
    det = E * G - F * F
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.stack([np.stack([G, -F], -1), np.stack([-F, E], -1)], -2) / det[..., None, None], det


def _matvec(M, x):
    return np.einsum("...ij,...j->...i", M, x)


def _form(I, a, b):
    return np.einsum("...i,...ij,...j->...", a, I, b)


@dataclass
class LocalGeometry:
    """Pointwise geometric data on an array of parameter points.

    Matrices are (..., 2, 2) in the basis (d_u, d_v); ``christoffel`` is
    (..., 2, 2, 2) indexed [k, i, j] for Gamma^k_ij of the induced metric.
    """

    u: np.ndarray
    v: np.ndarray
    X: np.ndarray
    Xu: np.ndarray
    Xv: np.ndarray
    f: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    first_form: np.ndarray
    dfirst_form: np.ndarray     # (..., 2, 2, 2): [k, i, j] = d_k g_ij
    normal: np.ndarray
    cos_theta: np.ndarray
    sin_theta: np.ndarray
    second_form: np.ndarray
    shape: np.ndarray
    christoffel: np.ndarray
    T_coords: np.ndarray

    @property
    def t(self):
        return self.X[..., 0]

    @property
    def log_d1(self):
        return self.f1 / self.f

    @property
    def log_d2(self):
        return self.f2 / self.f - (self.f1 / self.f) ** 2

    @property
    def theta(self):
        return np.arctan2(self.sin_theta, self.cos_theta)

    @property
    def H(self):
        return 0.5 * (self.shape[..., 0, 0] + self.shape[..., 1, 1])

    @property
    def K_extrinsic(self):
        A = self.shape
        return A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]

    @property
    def det_first(self):
        I = self.first_form
        return I[..., 0, 0] * I[..., 1, 1] - I[..., 0, 1] ** 2

    @property
    def principal(self):
        # half-gap from the traceless part B = A - H id (B^2 = r^2 id); avoids sqrt(H^2 - K) cancellation
        H = self.H
        A = self.shape
        b11, b22 = A[..., 0, 0] - H, A[..., 1, 1] - H
        r = np.sqrt(np.maximum(0.5 * (b11 * b11 + b22 * b22) + A[..., 0, 1] * A[..., 1, 0], 0.0))
        return H - r, H + r

    @property
    def T_norm(self):
        return np.sqrt(np.maximum(_form(self.first_form, self.T_coords, self.T_coords), 0.0))

    @property
    def frame(self):
        """(e1, e2) in coordinates; NaN where d_t is (numerically) normal."""
        I = self.first_form
        n = self.T_norm
        with np.errstate(invalid="ignore", divide="ignore"):
            e1 = np.where((n > FRAME_TOL)[..., None], self.T_coords / n[..., None], np.nan)
            root = np.sqrt(self.det_first)
            # g-rotation by +90 degrees, so that e1 x_f e2 = +xi
            e2 = np.stack([-(I[..., 0, 1] * e1[..., 0] + I[..., 1, 1] * e1[..., 1]),
                           I[..., 0, 0] * e1[..., 0] + I[..., 0, 1] * e1[..., 1]], -1) / root[..., None]
        return e1, e2

    @property
    def frame_eigenvalues(self):
        """(g(A e1, e1), g(A e2, e2)): the T-direction eigenvalue and lambda."""
        e1, e2 = self.frame
        I = self.first_form
        return _form(I, _matvec(self.shape, e1), e1), _form(I, _matvec(self.shape, e2), e2)

    @property
    def principal_residual(self):
        """|A T + cos(theta) (log f)'(t) T| in the induced metric."""
        Tc = self.T_coords
        r = _matvec(self.shape, Tc) + (self.cos_theta * self.log_d1)[..., None] * Tc
        return np.sqrt(np.maximum(_form(self.first_form, r, r), 0.0))

    @property
    def umbilicity(self):
        k1, k2 = self.principal
        return k2 - k1

    @property
    def K_gauss_trace(self):
        """det A - ((log f)')^2 - (log f)'' sin^2(theta): the traced Gauss equation."""
        return self.K_extrinsic - self.log_d1**2 - self.log_d2 * self.sin_theta**2

    @property
    def K_gauss_ambient(self):
        """det A plus the ambient sectional curvature of the tangent plane."""
        R = curvature_components(self.Xu, self.Xv, self.Xv, self.f, self.f1, self.f2)
        return self.K_extrinsic + metric_components(R, self.Xu, self.f) / self.det_first

    def canonical(self):
        """Copy with xi flipped wherever cos(theta) < 0."""
        s = np.where(self.cos_theta < 0, -1.0, 1.0)
        return replace(self, normal=self.normal * s[..., None], cos_theta=self.cos_theta * s,
                       second_form=self.second_form * s[..., None, None],
                       shape=self.shape * s[..., None, None])

    def take(self, index):
        """Restrict every array to ``index`` (applied to the leading axes)."""
        return LocalGeometry(**{f.name: getattr(self, f.name)[index] for f in fields(self)})


def local_geometry(imm, u, v, mode="auto"):
    """Evaluate first-order and shape-operator data at parameter points (u, v)."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    J = imm.jet(u, v, mode)
    X, Xu, Xv = J.X, J.Xu, J.Xv
    f, f1, f2 = imm.warping.derivatives(X[..., 0])
    g = lambda a, b: metric_components(a, b, f)
    hz = lambda a, b: a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]

    E, F, G = g(Xu, Xu), g(Xu, Xv), g(Xv, Xv)
    I = np.stack([np.stack([E, F], -1), np.stack([F, G], -1)], -2)
    Iinv, det = _mat_inv2(E, F, G)

    # derivatives of the pulled-back metric by the chain rule (no connection involved)
    w = 2 * f * f1
    Eu = 2 * g(J.Xuu, Xu) + w * Xu[..., 0] * hz(Xu, Xu)
    Ev = 2 * g(J.Xuv, Xu) + w * Xv[..., 0] * hz(Xu, Xu)
    Fu = g(J.Xuu, Xv) + g(Xu, J.Xuv) + w * Xu[..., 0] * hz(Xu, Xv)
    Fv = g(J.Xuv, Xv) + g(Xu, J.Xvv) + w * Xv[..., 0] * hz(Xu, Xv)
    Gu = 2 * g(J.Xuv, Xv) + w * Xu[..., 0] * hz(Xv, Xv)
    Gv = 2 * g(J.Xvv, Xv) + w * Xv[..., 0] * hz(Xv, Xv)
    dI = np.stack([
        np.stack([np.stack([Eu, Fu], -1), np.stack([Fu, Gu], -1)], -2),
        np.stack([np.stack([Ev, Fv], -1), np.stack([Fv, Gv], -1)], -2),
    ], -3)

    n = warped_cross_components(Xu, Xv, f)
    nn = np.sqrt(g(n, n))
    scale = np.sqrt(E * G)
    if np.any(~(nn > REGULARITY_TOL * scale)):
        bad = np.argwhere(~(nn > REGULARITY_TOL * scale))[0]
        raise DegenerateImmersion(
            f"{imm.name}: X_u and X_v are dependent at u={u[tuple(bad)]!r}, v={v[tuple(bad)]!r}")
    xi = n / nn[..., None]
    cos = xi[..., 0]
    sin = f * np.hypot(xi[..., 1], xi[..., 2])

    D = {k: J.__dict__[k] + connection_components(a, b, f, f1)
         for k, a, b in (("Xuu", Xu, Xu), ("Xuv", Xu, Xv), ("Xvv", Xv, Xv))}
    huu, huv, hvv = g(D["Xuu"], xi), g(D["Xuv"], xi), g(D["Xvv"], xi)
    II = np.stack([np.stack([huu, huv], -1), np.stack([huv, hvv], -1)], -2)
    A = np.einsum("...ik,...kj->...ij", Iinv, II)

    # Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
    first_kind = 0.5 * (np.einsum("...ijl->...ijl", dI) + np.einsum("...jil->...ijl", dI)
                        - np.einsum("...lij->...ijl", dI))
    chris = np.einsum("...kl,...ijl->...kij", Iinv, first_kind)

    Tc = _matvec(Iinv, np.stack([Xu[..., 0], Xv[..., 0]], -1))
    return LocalGeometry(u=u, v=v, X=X, Xu=Xu, Xv=Xv, f=f, f1=f1, f2=f2, first_form=I,
                         dfirst_form=dI, normal=xi, cos_theta=cos, sin_theta=sin,
                         second_form=II, shape=A, christoffel=chris, T_coords=Tc)


# ------------------------------------------------------------------ stencils

@dataclass
class CurvatureReport:
    """Local geometry at the points plus every quantity that needs field differences."""

    geom: LocalGeometry
    one_sided: np.ndarray
    K_brioschi: np.ndarray
    K_christoffel: np.ndarray
    riemann: np.ndarray          # (..., 2, 2): [:, k] = R(d_u, d_v) d_k in coordinates
    dshape: np.ndarray           # (..., 2, 2, 2): [i] = d_i A
    laplacian_lhs: np.ndarray
    frame_derivs: tuple          # (nabla_e1 e1, nabla_e1 e2, nabla_e2 e1, nabla_e2 e2)

    @property
    def laplacian_rhs(self):
        g = self.geom
        return 2 * g.cos_theta * g.H + g.log_d1 * (1 + g.cos_theta**2)

    def gauss_residual(self, X=(1.0, 0.0), Y=(0.0, 1.0), Z=(1.0, 0.0)):
        """(EG) left side minus right side, as a coordinate 2-vector."""
        g = self.geom
        I, A = g.first_form, g.shape
        X, Y, Z = (np.broadcast_to(np.asarray(a, dtype=float), g.u.shape + (2,)) for a in (X, Y, Z))
        wedge = X[..., 0] * Y[..., 1] - X[..., 1] * Y[..., 0]
        lhs = wedge[..., None] * _matvec(self.riemann, Z)
        AX, AY = _matvec(A, X), _matvec(A, Y)
        gYZ, gXZ = _form(I, Y, Z), _form(I, X, Z)
        # g(X, T) is the d_t component of X
        XT = X[..., 0] * g.Xu[..., 0] + X[..., 1] * g.Xv[..., 0]
        YT = Y[..., 0] * g.Xu[..., 0] + Y[..., 1] * g.Xv[..., 0]
        ZT = Z[..., 0] * g.Xu[..., 0] + Z[..., 1] * g.Xv[..., 0]
        Tc = g.T_coords
        rhs = (_form(I, AY, Z)[..., None] * AX - _form(I, AX, Z)[..., None] * AY
               - (g.log_d1**2)[..., None] * (gYZ[..., None] * X - gXZ[..., None] * Y)
               - g.log_d2[..., None] * ((YT * ZT)[..., None] * X - (XT * ZT)[..., None] * Y
                                        - (YT * gXZ)[..., None] * Tc + (XT * gYZ)[..., None] * Tc))
        return lhs - rhs

    def codazzi_residual(self, X=(1.0, 0.0), Y=(0.0, 1.0)):
        """(EC) left side minus right side, as a coordinate 2-vector."""
        g = self.geom
        X, Y = (np.broadcast_to(np.asarray(a, dtype=float), g.u.shape + (2,)) for a in (X, Y))
        wedge = X[..., 0] * Y[..., 1] - X[..., 1] * Y[..., 0]
        A, Gam, dA = g.shape, g.christoffel, self.dshape
        # (nabla_u A) d_v - (nabla_v A) d_u; the Gamma^l_uv terms cancel
        lhs = (dA[..., 0, :, 1] - dA[..., 1, :, 0]
               + np.einsum("...kl,...l->...k", Gam[..., :, 0, :], A[..., :, 1])
               - np.einsum("...kl,...l->...k", Gam[..., :, 1, :], A[..., :, 0]))
        lhs = wedge[..., None] * lhs
        XT = X[..., 0] * g.Xu[..., 0] + X[..., 1] * g.Xv[..., 0]
        YT = Y[..., 0] * g.Xu[..., 0] + Y[..., 1] * g.Xv[..., 0]
        rhs = (g.cos_theta * g.log_d2)[..., None] * (YT[..., None] * X - XT[..., None] * Y)
        return lhs - rhs

    def gauss_residual_norm(self):
        """Largest g-norm of the (EG) residual over Z in {d_u, d_v}, scaled by |d_u||d_v||Z|."""
        g = self.geom
        I = g.first_form
        E, G = I[..., 0, 0], I[..., 1, 1]
        out = []
        for Z, nz in (((1.0, 0.0), E), ((0.0, 1.0), G)):
            r = self.gauss_residual(Z=Z)
            out.append(np.sqrt(np.maximum(_form(I, r, r), 0.0) / (E * G * nz)))
        return np.maximum(*out)

    def codazzi_residual_norm(self):
        g = self.geom
        I = g.first_form
        r = self.codazzi_residual()
        return np.sqrt(np.maximum(_form(I, r, r), 0.0) / (I[..., 0, 0] * I[..., 1, 1]))

    def frame_residual(self):
        """Largest deviation from the adapted-frame connection law (NaN where theta = 0)."""
        g = self.geom
        e1, e2 = g.frame
        lam = g.frame_eigenvalues[1]
        with np.errstate(invalid="ignore", divide="ignore"):
            c = (lam * g.cos_theta + g.log_d1) / g.sin_theta
        d11, d12, d21, d22 = self.frame_derivs
        I = g.first_form
        parts = [d11, d12, d21 - c[..., None] * e2, d22 + c[..., None] * e1]
        return np.max([np.sqrt(np.abs(_form(I, p, p))) for p in parts], axis=0)


def _stencil(x, lo, hi, allow_one_sided):
    h = FD_STEP * np.maximum(1.0, np.abs(x))
    left = x - h < lo - 1e-12 * max(1.0, abs(lo))
    right = x + h > hi + 1e-12 * max(1.0, abs(hi))
    both = left & right
    if np.any(both):
        raise BoundaryError("parameter domain is narrower than the difference stencil")
    side = left | right
    if np.any(side) and not allow_one_sided:
        raise BoundaryError("point is within one difference step of the domain boundary")
    sgn = np.where(left, 1.0, np.where(right, -1.0, 0.0))
    o1 = np.where(side, sgn * h, -h)
    o2 = np.where(side, 2 * sgn * h, h)
    w0 = np.where(side, -1.5 * sgn / h, 0.0)
    w1 = np.where(side, 2.0 * sgn / h, -0.5 / h)
    w2 = np.where(side, -0.5 * sgn / h, 0.5 / h)
    return o1, o2, (w0, w1, w2), side


def curvature_report(imm, u, v, mode="auto", allow_one_sided=False):
    """Geometry plus difference-based quantities at parameter points (u, v)."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    u0, u1, v0, v1 = imm.domain
    ou1, ou2, wu, su = _stencil(u, u0, u1, allow_one_sided)
    ov1, ov2, wv, sv = _stencil(v, v0, v1, allow_one_sided)
    U = np.stack([u, u + ou1, u + ou2, u, u])
    V = np.stack([v, v, v, v + ov1, v + ov2])
    G5 = local_geometry(imm, U, V, mode)
    geom = G5.take(0)

    def d(arr, w, idx):
        extra = arr.ndim - 1 - u.ndim
        ws = [x.reshape(x.shape + (1,) * extra) for x in w]
        return ws[0] * arr[0] + ws[1] * arr[idx[0]] + ws[2] * arr[idx[1]]

    du = lambda arr: d(arr, wu, (1, 2))
    dv = lambda arr: d(arr, wv, (3, 4))

    dI = G5.dfirst_form                       # [..., k, i, j]
    E_vv = dv(dI[..., 1, 0, 0])
    F_uv = 0.5 * (du(dI[..., 1, 0, 1]) + dv(dI[..., 0, 0, 1]))
    G_uu = du(dI[..., 0, 1, 1])
    I = geom.first_form
    E, F, G = I[..., 0, 0], I[..., 0, 1], I[..., 1, 1]
    Eu, Ev = geom.dfirst_form[..., 0, 0, 0], geom.dfirst_form[..., 1, 0, 0]
    Fu, Fv = geom.dfirst_form[..., 0, 0, 1], geom.dfirst_form[..., 1, 0, 1]
    Gu, Gv = geom.dfirst_form[..., 0, 1, 1], geom.dfirst_form[..., 1, 1, 1]
    M1 = np.stack([
        np.stack([-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * Eu, Fu - 0.5 * Ev], -1),
        np.stack([Fv - 0.5 * Gu, E, F], -1),
        np.stack([0.5 * Gv, F, G], -1)], -2)
    M2 = np.stack([
        np.stack([np.zeros_like(E), 0.5 * Ev, 0.5 * Gu], -1),
        np.stack([0.5 * Ev, E, F], -1),
        np.stack([0.5 * Gu, F, G], -1)], -2)
    det = E * G - F * F
    K_brioschi = (np.linalg.det(M1) - np.linalg.det(M2)) / det**2

    # R(d_u, d_v) d_k = d_u Gamma^l_vk - d_v Gamma^l_uk + Gamma^l_um Gamma^m_vk - Gamma^l_vm Gamma^m_uk
    Gam = geom.christoffel
    dGu, dGv = du(G5.christoffel), dv(G5.christoffel)
    riemann = (dGu[..., :, 1, :] - dGv[..., :, 0, :]
               + np.einsum("...lm,...mk->...lk", Gam[..., :, 0, :], Gam[..., :, 1, :])
               - np.einsum("...lm,...mk->...lk", Gam[..., :, 1, :], Gam[..., :, 0, :]))
    K_chr = _form(I, riemann[..., :, 1], np.stack([np.ones_like(E), np.zeros_like(E)], -1)) / det

    dshape = np.stack([du(G5.shape), dv(G5.shape)], -3)

    # Laplace-Beltrami of the height: div(sqrt(det) g^ij h_j) / sqrt(det)
    I5inv, det5 = _mat_inv2(G5.first_form[..., 0, 0], G5.first_form[..., 0, 1], G5.first_form[..., 1, 1])
    grad5 = _matvec(I5inv, np.stack([G5.Xu[..., 0], G5.Xv[..., 0]], -1)) * np.sqrt(det5)[..., None]
    lap = (du(grad5[..., 0]) + dv(grad5[..., 1])) / np.sqrt(det)

    # nabla_X Y = X^i (d_i Y^k + Gamma^k_ij Y^j) for the adapted frame fields
    e1_5, e2_5 = G5.frame
    e1, e2 = e1_5[0], e2_5[0]

    def nabla(Xc, Y5):
        dY = np.stack([du(Y5), dv(Y5)], -1)            # [..., k, i]
        Y = Y5[0]
        return (np.einsum("...ki,...i->...k", dY, Xc)
                + np.einsum("...kij,...i,...j->...k", Gam, Xc, Y))

    with np.errstate(invalid="ignore"):
        frame_derivs = (nabla(e1, e1_5), nabla(e1, e2_5), nabla(e2, e1_5), nabla(e2, e2_5))
    return CurvatureReport(geom=geom, one_sided=su | sv, K_brioschi=K_brioschi, K_christoffel=K_chr,
                           riemann=riemann, dshape=dshape, laplacian_lhs=lap, frame_derivs=frame_derivs)


# ------------------------------------------------------------------ grids

def parameter_grid(domain, nu, nv=None, interior=False):
    """Meshgrid (U, V) of shape (nu, nv).  ``interior`` uses cell centres, which
    keeps every point at least half a cell away from the boundary."""
    nv = nu if nv is None else nv
    u0, u1, v0, v1 = domain
    if interior:
        us = u0 + (np.arange(nu) + 0.5) * (u1 - u0) / nu
        vs = v0 + (np.arange(nv) + 0.5) * (v1 - v0) / nv
    else:
        us = np.linspace(u0, u1, nu)
        vs = np.linspace(v0, v1, nv)
    return np.meshgrid(us, vs, indexing="ij")


def thread_count():
    try:
        return max(1, int(os.environ.get("WARPSURF_THREADS", "1")))
    except ValueError:
        return 1


def evaluate_points(imm, u, v, mode="auto", second_order=True, allow_one_sided=False, threads=None):
    """Evaluate at arbitrary parameter points, split along the first axis across threads.

    Results are elementwise, so they do not depend on the thread count.
    """
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    work = (lambda a, b: curvature_report(imm, a, b, mode, allow_one_sided)) \
        if second_order else (lambda a, b: local_geometry(imm, a, b, mode))
    threads = thread_count() if threads is None else threads
    if threads <= 1 or u.ndim == 0 or u.shape[0] < 2 * threads:
        return work(u, v)
    chunks = np.array_split(np.arange(u.shape[0]), threads)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        parts = list(ex.map(lambda idx: work(u[idx], v[idx]), chunks))
    return _concat(parts)


def evaluate_grid(imm, nu, nv=None, interior=True, mode="auto", second_order=True, threads=None):
    """Evaluate on a parameter grid (cell centres when ``interior``; else the
    closed grid, with one-sided stencils on the boundary)."""
    U, V = parameter_grid(imm.domain, nu, nv, interior)
    return evaluate_points(imm, U, V, mode, second_order, allow_one_sided=not interior, threads=threads)


def regular_mask(imm, u, v, mode="auto", tol=1e-9):
    """True where the immersion is regular: |X_u x_f X_v| > tol * max(1, |X_u| |X_v|)."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    J = imm.jet(u, v, mode)
    f = imm.warping(J.X[..., 0])
    n = warped_cross_components(J.Xu, J.Xv, f)
    nn = np.sqrt(metric_components(n, n, f))
    scale = np.sqrt(metric_components(J.Xu, J.Xu, f) * metric_components(J.Xv, J.Xv, f))
    return nn > tol * np.maximum(1.0, scale)


def _concat(parts):
    first = parts[0]
    if isinstance(first, np.ndarray):
        return np.concatenate(parts)
    if isinstance(first, tuple):
        return tuple(_concat([p[i] for p in parts]) for i in range(len(first)))
    cls = type(first)
    return cls(**{f.name: _concat([getattr(p, f.name) for p in parts]) for f in fields(first)})


# ------------------------------------------------------------------ single-point API

@dataclass(frozen=True)
class SurfaceGeometry:
    point: AmbientPoint
    first_form: np.ndarray
    normal: AmbientVector
    cos_theta: float
    theta: float
    T: AmbientVector
    frame: Optional[tuple]
    shape: np.ndarray
    principal: tuple
    H: float
    K_extrinsic: float
    K_intrinsic: Optional[float]


def _scalar(x):
    return float(np.asarray(x))


def _geom(s, u, v):
    return local_geometry(s, np.float64(u), np.float64(v))


def surface_geometry(s, u, v, intrinsic=True, canonical=False):
    """Full per-point report; K_intrinsic needs an interior point (else None).

    ``canonical`` flips xi when cos(theta) < 0, as the grid reports do.
    """
    if intrinsic:
        try:
            rep = curvature_report(s, np.float64(u), np.float64(v))
            g, K = rep.geom, _scalar(rep.K_brioschi)
        except BoundaryError:
            g, K = _geom(s, u, v), None
    else:
        g, K = _geom(s, u, v), None
    if canonical:
        g = g.canonical()
    p = AmbientPoint(*map(float, g.X))
    T = np.array([1.0, 0.0, 0.0]) - g.cos_theta * g.normal
    frame = None
    if g.T_norm > FRAME_TOL:
        e1, e2 = g.frame
        frame = tuple(AmbientVector.from_components(p, e[0] * g.Xu + e[1] * g.Xv) for e in (e1, e2))
    k1, k2 = g.principal
    return SurfaceGeometry(point=p, first_form=g.first_form, normal=AmbientVector.from_components(p, g.normal),
                           cos_theta=_scalar(g.cos_theta), theta=_scalar(g.theta),
                           T=AmbientVector.from_components(p, T), frame=frame, shape=g.shape,
                           principal=(_scalar(k1), _scalar(k2)), H=_scalar(g.H),
                           K_extrinsic=_scalar(g.K_extrinsic), K_intrinsic=K)


def first_fundamental_form(s, u, v):
    return _geom(s, u, v).first_form


def unit_normal(s, u, v):
    g = _geom(s, u, v)
    return AmbientVector.from_components(AmbientPoint(*map(float, g.X)), g.normal)


def angle(s, u, v):
    return _scalar(_geom(s, u, v).theta)


def shape_operator(s, u, v):
    return _geom(s, u, v).shape


def adapted_frame(s, u, v):
    """(e1, e2, T, theta) as ambient vectors; raises AngleDegenerate when theta ~ 0."""
    g = _geom(s, u, v)
    if not g.T_norm > FRAME_TOL:
        raise AngleDegenerate(f"d_t is normal to {s.name} at ({u}, {v})")
    p = AmbientPoint(*map(float, g.X))
    e1, e2 = g.frame
    amb = [AmbientVector.from_components(p, e[0] * g.Xu + e[1] * g.Xv) for e in (e1, e2)]
    T = AmbientVector.from_components(p, np.array([1.0, 0.0, 0.0]) - g.cos_theta * g.normal)
    return amb[0], amb[1], T, _scalar(g.theta)


def gauss_curvature_intrinsic(s, u, v):
    return _scalar(curvature_report(s, np.float64(u), np.float64(v)).K_brioschi)


def gauss_residual(s, u, v, X, Y, Z):
    return curvature_report(s, np.float64(u), np.float64(v)).gauss_residual(X, Y, Z)


def codazzi_residual(s, u, v, X, Y):
    return curvature_report(s, np.float64(u), np.float64(v)).codazzi_residual(X, Y)


def laplacian_height(s, u, v):
    rep = curvature_report(s, np.float64(u), np.float64(v))
    return _scalar(rep.laplacian_lhs), _scalar(rep.laplacian_rhs)


def to_half_space(p, warping="exp"):
    """Map a point of I x_{e^t} E^2 to the upper half-space model: (x, y, e^-t)."""
    w = warping_from_name(warping)
    if w.name != "exp":
        raise ModelMismatch(f"half-space model needs the warping 'exp', not {w.name!r}")
    if isinstance(p, AmbientPoint):
        return (p.x, p.y, float(np.exp(-p.t)))
    p = np.asarray(p, dtype=float)
    return np.stack([p[..., 1], p[..., 2], np.exp(-p[..., 0])], -1)
