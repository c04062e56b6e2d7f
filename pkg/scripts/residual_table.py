"""Worst residual of every check over all families, builtin warpings and angles.

usage: python scripts/residual_table.py [--grid 32] [--out table.json]
"""

import argparse
import json

import numpy as np

from warpsurf.generators import GeneratorSpec
from warpsurf.verify import run_suite
from warpsurf.warped_space import BUILTIN_WARPINGS


def specs(angles=(15, 30, 45, 60, 75, 90)):
    for w in BUILTIN_WARPINGS:
        for d in angles:
            th = np.pi / 2 if d == 90 else np.radians(d)
            for a in ("0", "v", "0.3*sin(v)", "0.1*v^2"):
                if d == 90 and a != "0.3*sin(v)":
                    a = "1+" + a
                yield GeneratorSpec("type_i", warping=w, theta=th, alpha=a,
                                    domain=(0.5, 1.5, 0.1, 1.0) if d == 90 else None)
            yield GeneratorSpec("type_ii", warping=w, theta=th)
            yield GeneratorSpec("rotational", warping=w, theta=th)
        yield GeneratorSpec("type_iii", warping=w, t0=1.0)
    for m in (0.2, 1 / 3, 0.5, 0.8):
        yield GeneratorSpec("minimal_power", m=m)
    for d in (30, 45, 60):
        yield GeneratorSpec("harmonic_exp", theta=np.radians(d))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--grid", type=int, default=32)
    ap.add_argument("--out")
    args = ap.parse_args()
    worst, tol, failed, n = {}, {}, [], 0
    for s in specs():
        rep = run_suite("all", s, grid=(args.grid, args.grid))
        n += 1
        for c in rep.checks:
            worst[c.name] = max(worst.get(c.name, 0.0), c.max_residual)
            tol[c.name] = c.tolerance
        if not rep.passed:
            failed.append(rep.surface)
    print(f"{n} surfaces, grid {args.grid}x{args.grid}, {len(failed)} with a failing check")
    print(f"{'check':32s} {'worst':>10s} {'tolerance':>10s}")
    for k in sorted(worst):
        print(f"{k:32s} {worst[k]:10.2e} {tol[k]:10.0e}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"surfaces": n, "failed": failed, "worst": worst, "tolerance": tol}, fh, indent=2)


if __name__ == "__main__":
    main()
