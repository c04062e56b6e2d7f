"""The harmonic-height surface of the e^t warping seen in the upper half-space.

Prints, for a few angles, how far the half-space image is from the two
candidate quadrics  (x^2+y^2) z^2 = cot^2  and  x^2+y^2 = cot^2 z^2, and
checks that the mirrored profile cot e^{+t} is not a constant angle surface.
"""

import numpy as np

from warpsurf.generators import classify, immersion_from_expression, make_harmonic_exp
from warpsurf.surface import local_geometry, parameter_grid, to_half_space


def main():
    print(f"{'deg':>4s} {'|(x2+y2)z2-cot2|':>18s} {'|x2+y2-cot2 z2|':>18s} {'mirrored profile':>20s}")
    for deg in (30, 45, 60):
        th = np.radians(deg)
        imm = make_harmonic_exp(th)
        U, V = parameter_grid(imm.domain, 32, interior=True)
        x, y, z = np.moveaxis(to_half_space(imm(U, V), "exp"), -1, 0)
        ct2 = 1 / np.tan(th) ** 2
        a = np.max(np.abs((x * x + y * y) * z * z - ct2))
        b = np.max(np.abs(x * x + y * y - ct2 * z * z))
        s, c = np.sin(th), np.cos(th)
        mirror = immersion_from_expression("(u*s, k*exp(u*s)*cos(v), k*exp(u*s)*sin(v))", "exp",
                                           imm.domain, {"s": s, "k": c / s})
        g = local_geometry(mirror, U, V).canonical()
        spread = np.degrees(np.ptp(g.theta))
        verdict = classify(mirror, 16).verdict
        print(f"{deg:4d} {a:18.3e} {b:18.3e} {verdict:>20s} (angle spread {spread:.1f} deg)")


if __name__ == "__main__":
    main()
