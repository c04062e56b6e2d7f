"""Write OBJ meshes and geometry records for one surface of each family.

usage: python scripts/export_gallery.py OUTDIR [--grid 48]
"""

import argparse
import os

import numpy as np

from warpsurf.export import geometry_records, write_obj, write_records
from warpsurf.generators import GeneratorSpec, generate

GALLERY = {
    "type_i_exp": GeneratorSpec("type_i", warping="exp", theta=np.radians(50), alpha="0.3*sin(v)"),
    "type_ii_cone": GeneratorSpec("type_ii", warping="linear:1,1", theta=np.radians(40)),
    "slice_cosh": GeneratorSpec("type_iii", warping="cosh", t0=0.0),
    "rotational_power": GeneratorSpec("rotational", warping="power:0.5", theta=np.radians(60)),
    "minimal_third": GeneratorSpec("minimal_power", m=1 / 3),
    "harmonic_60": GeneratorSpec("harmonic_exp", theta=np.radians(60)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--grid", type=int, default=48)
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for name, spec in GALLERY.items():
        imm = generate(spec)
        model = "half_space" if spec.warping.name == "exp" else "raw"
        n = write_obj(os.path.join(args.outdir, f"{name}.obj"), imm, args.grid, args.grid, model)
        write_records(os.path.join(args.outdir, f"{name}.jsonl"), geometry_records(imm, args.grid, args.grid))
        print(f"{name:18s} {n:6d} vertices ({model})")


if __name__ == "__main__":
    main()
