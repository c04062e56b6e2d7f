"""Mesh (ASCII OBJ) and per-vertex geometry (JSON-lines) output."""

import json

import numpy as np

from .errors import ModelMismatch
from .surface import evaluate_points, parameter_grid, regular_mask, to_half_space

MODELS = ("raw", "half_space")


def check_model(model, warping):
    if model not in MODELS:
        raise ModelMismatch(f"unknown coordinate model {model!r}; choose raw or half_space")
    if model == "half_space" and warping.name != "exp":
        raise ModelMismatch(f"half_space output needs the warping 'exp', not {warping.name!r}")


def mesh_grid(imm, nu, nv, mode="auto"):
    """Closed parameter grid, positions, and the mask of regular vertices."""
    U, V = parameter_grid(imm.domain, nu, nv)
    P = imm(U, V)
    keep = regular_mask(imm, U, V, mode)
    return U, V, P, keep


def triangles(keep, flip=False):
    """Two triangles per grid cell; cells touching a dropped vertex are skipped.

    Vertex ids are 1-based indices into the kept vertices in row-major order.
    Counter-clockwise in (u, v) makes the OBJ normal follow X_u x X_v, i.e. xi.
    """
    nu, nv = keep.shape
    ids = np.full(keep.shape, -1, dtype=np.int64)
    ids[keep] = np.arange(1, int(keep.sum()) + 1)
    faces = []
    for i in range(nu - 1):
        for j in range(nv - 1):
            a, b, c, d = ids[i, j], ids[i + 1, j], ids[i + 1, j + 1], ids[i, j + 1]
            for tri in ((a, b, c), (a, c, d)):
                if min(tri) > 0:
                    faces.append(tri[::-1] if flip else tri)
    return faces


def obj_text(imm, nu, nv, model="raw", mode="auto"):
    check_model(model, imm.warping)
    _, _, P, keep = mesh_grid(imm, nu, nv, mode)
    pts = P[keep]
    if model == "half_space":
        # (t, x, y) -> (x, y, e^-t) reverses orientation, so reverse the winding too
        pts = to_half_space(pts, imm.warping)
    lines = [f"# {imm.name}", f"# model {model}, grid {nu}x{nv}"]
    lines += ["v {!r} {!r} {!r}".format(*map(float, p)) for p in pts]
    lines += ["f {} {} {}".format(*t) for t in triangles(keep, flip=model == "half_space")]
    return "\n".join(lines) + "\n", int(keep.sum())


def write_obj(path, imm, nu, nv, model="raw", mode="auto"):
    text, n = obj_text(imm, nu, nv, model, mode)
    with open(path, "w") as fh:
        fh.write(text)
    return n


def geometry_records(imm, nu, nv, mode="auto"):
    """One dict per regular mesh vertex, in row-major grid order."""
    U, V, P, keep = mesh_grid(imm, nu, nv, mode)
    u, v = U[keep], V[keep]
    if u.size == 0:
        return []
    rep = evaluate_points(imm, u, v, mode, allow_one_sided=True)
    g = rep.geom.canonical()
    res = {
        "gauss": rep.gauss_residual_norm(),
        "codazzi": rep.codazzi_residual_norm(),
        "laplacian": np.abs(rep.laplacian_lhs - rep.laplacian_rhs),
        "principal": g.principal_residual,
    }
    out = []
    for k in range(u.size):
        t, x, y = (float(c) for c in g.X[k])
        out.append({
            "u": float(u[k]), "v": float(v[k]), "t": t, "x": x, "y": y,
            "theta": float(g.theta[k]), "H": float(g.H[k]), "K": float(rep.K_brioschi[k]),
            "residuals": {name: float(r[k]) for name, r in res.items()},
        })
    return out


def write_records(path, records):
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r) + "\n")
