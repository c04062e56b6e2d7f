import json

import numpy as np
import pytest

from warpsurf.errors import ModelMismatch
from warpsurf.export import geometry_records, obj_text, triangles, write_obj, write_records
from warpsurf.generators import GeneratorSpec, generate, immersion_from_expression


def parse_obj(text):
    v = np.array([[float(x) for x in l.split()[1:]] for l in text.splitlines() if l.startswith("v ")])
    f = np.array([[int(x) for x in l.split()[1:]] for l in text.splitlines() if l.startswith("f ")])
    return v, f


def test_vertex_and_face_counts():
    imm = generate(GeneratorSpec("rotational", warping="exp", theta=np.pi / 3))
    text, n = obj_text(imm, 10, 7)
    v, f = parse_obj(text)
    assert n == len(v) == 70
    assert len(f) == 2 * 9 * 6
    assert f.min() == 1 and f.max() == 70


def test_winding_follows_normal():
    # plane t = 1 with xi = +d_t: faces must point along +t in raw coordinates
    imm = generate(GeneratorSpec("type_iii", warping="exp", t0=1.0))
    for model, sign in (("raw", 1.0), ("half_space", 1.0)):
        v, f = parse_obj(obj_text(imm, 4, 4, model)[0])
        a, b, c = v[f[0, 0] - 1], v[f[0, 1] - 1], v[f[0, 2] - 1]
        n = np.cross(b - a, c - a)
        if model == "raw":
            assert n[0] > 0
        else:
            # d_t maps to -d_z in the half-space picture
            assert n[2] < 0


def test_half_space_needs_exp():
    imm = generate(GeneratorSpec("type_ii", warping="cosh"))
    with pytest.raises(ModelMismatch):
        obj_text(imm, 4, 4, "half_space")


def test_degenerate_vertices_are_dropped():
    keep = np.ones((3, 3), bool)
    keep[1, 1] = False
    # only the two corner triangles avoid the centre vertex
    assert len(triangles(keep)) == 2
    # a cone apex row at u = 0 is removed from the mesh
    imm = immersion_from_expression("(u, u*cos(v), u*sin(v))", "constant:1", (0, 1, 0, 6))
    text, n = obj_text(imm, 5, 8)
    assert n == 4 * 8


def test_records(tmp_path):
    imm = generate(GeneratorSpec("type_ii", warping="linear:1,1", theta=np.pi / 4))
    recs = geometry_records(imm, 6, 5)
    assert len(recs) == 30
    r = recs[0]
    assert list(r) == ["u", "v", "t", "x", "y", "theta", "H", "K", "residuals"]
    assert r["theta"] == pytest.approx(np.pi / 4)
    assert abs(r["K"]) < 1e-6
    path = tmp_path / "g.jsonl"
    write_records(path, recs)
    lines = path.read_text().splitlines()
    assert json.loads(lines[-1]) == recs[-1]
    write_obj(tmp_path / "m.obj", imm, 6, 5)
    assert (tmp_path / "m.obj").read_text() == obj_text(imm, 6, 5)[0]
