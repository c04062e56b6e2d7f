"""Command-line front end: ``warpsurf generate | verify | classify | report``.

Angles are given in degrees (``--theta-deg``).  Every flag can also be set in a
``key = value`` config file passed with ``--config``; flags win.  Exit codes:
0 success, 1 a verification check failed, 2 configuration error.
Set WARPSURF_THREADS to split grid evaluation over several threads.
"""

import argparse
import json
import os
import sys

import numpy as np

from .config import build_config, read_config
from .errors import ConfigError, WarpSurfError
from .export import check_model, geometry_records, obj_text, write_records
from .generators import classify, generate, immersion_from_expression, load_sample_grid
from .surface import evaluate_grid, surface_geometry
from .verify import SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_CONFIG)


def _surface_flags(p):
    g = p.add_argument_group("surface")
    g.add_argument("--family", help="type_i, type_ii, type_iii, rotational, minimal_power, harmonic_exp")
    g.add_argument("--warp", help="warping: constant:a, linear:a,b, power:m, exp, cosh, table:PATH")
    g.add_argument("--theta-deg", dest="theta_deg", help="constant angle in degrees")
    g.add_argument("--alpha", help="type_i profile alpha(v), e.g. '0.3*sin(v)'")
    g.add_argument("--t0", help="slice height for type_iii")
    g.add_argument("--m", help="exponent for minimal_power")
    g.add_argument("--radius", help="cylinder radius for rotational at 90 degrees")
    g.add_argument("--gamma", help="'g1(v); g2(v)': general cylinder for type_i at 90 degrees")
    g.add_argument("--domain", help="u0,u1,v0,v1")
    g.add_argument("--base-t", dest="base_t", help="lower limit of the integral of 1/f")
    g.add_argument("--base-v", dest="base_v", help="lower limit of the alpha integrals")
    g.add_argument("--adapted", action="store_const", const="true", help="type_ii in arc-length u")
    g.add_argument("--grid", help="NUxNV, e.g. 64x64")
    g.add_argument("--mode", help="derivatives: auto, analytic or fd")
    g.add_argument("--config", help="key = value config file")
    g.add_argument("--tol", action="append", metavar="NAME=VALUE", help="override a check tolerance")


def make_parser():
    parser = _Parser(prog="warpsurf", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write an OBJ mesh and per-vertex geometry records")
    _surface_flags(p)
    p.add_argument("-o", "--output", help="OBJ path (default: stdout summary only)")
    p.add_argument("--records", help="JSON-lines path (default: OBJ path with .jsonl)")
    p.add_argument("--model", help="vertex coordinates: raw or half_space (exp warping only)")

    p = sub.add_parser("verify", help="run a verification suite")
    _surface_flags(p)
    p.add_argument("--suite", help=", ".join(SUITES))
    p.add_argument("--report", help="write the JSON report here (default: stdout)")

    p = sub.add_parser("classify", help="classify a generated or user-supplied surface")
    _surface_flags(p)
    p.add_argument("--expr", help="immersion '(t, x, y)' in u, v, e.g. '(t0, u, v)'")
    p.add_argument("--const", action="append", metavar="NAME=VALUE", help="constant for --expr")
    p.add_argument("--samples", help="text file with rows 'u v t x y' on a rectangular grid")
    p.add_argument("--report", help="write the JSON result here (default: stdout)")

    p = sub.add_parser("report", help="geometry summary over a grid, or at one point")
    _surface_flags(p)
    p.add_argument("--point", help="u,v for a single-point report")
    p.add_argument("--report", help="write the JSON here (default: stdout)")
    return parser


def _config(args):
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "tol")}
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"bad --tol {item!r}; use NAME=VALUE")
        flags[f"tol_{name.strip()}"] = value
    file_values = read_config(args.config) if args.config else {}
    return build_config(args.command, file_values, flags)


def _dump(obj, path):
    text = json.dumps(obj, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _user_surface(cfg):
    if cfg.expr is not None:
        if cfg.domain is None:
            raise ConfigError("--expr needs --domain u0,u1,v0,v1")
        consts = dict(cfg.const)
        if cfg.t0 is not None:
            consts.setdefault("t0", cfg.t0)
        return immersion_from_expression(cfg.expr, cfg.warp, cfg.domain, consts)
    if cfg.samples is not None:
        return load_sample_grid(cfg.samples, cfg.warp)
    return generate(cfg.generator_spec())


def cmd_generate(cfg):
    imm = generate(cfg.generator_spec())
    check_model(cfg.model, imm.warping)
    nu, nv = cfg.grid
    text, nverts = obj_text(imm, nu, nv, cfg.model, cfg.mode)
    records = geometry_records(imm, nu, nv, cfg.mode)
    summary = {"surface": imm.name, "model": cfg.model, "grid": [nu, nv], "vertices": nverts}
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
        rec_path = cfg.records or os.path.splitext(cfg.output)[0] + ".jsonl"
        write_records(rec_path, records)
        summary.update(obj=cfg.output, records=rec_path)
    elif cfg.records:
        write_records(cfg.records, records)
        summary["records"] = cfg.records
    theta = np.array([r["theta"] for r in records])
    summary.update(theta_mean=float(np.mean(theta)), theta_std=float(np.std(theta)),
                   theta_deg=float(np.degrees(np.mean(theta))))
    _dump(summary, None)
    return EXIT_OK


def cmd_verify(cfg):
    rep = run_suite(cfg.suite, cfg.generator_spec(), cfg.grid, cfg.tolerances, cfg.mode)
    _dump(rep.to_dict(), cfg.report)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_classify(cfg):
    imm = _user_surface(cfg)
    nu, nv = cfg.grid
    rep = classify(imm, nu, nv)
    out = {"surface": imm.name}
    out.update(rep.to_dict())
    _dump(out, cfg.report)
    return EXIT_OK


def cmd_report(cfg):
    imm = _user_surface(cfg)
    if cfg.point is not None:
        g = surface_geometry(imm, *cfg.point, canonical=True)
        out = {"surface": imm.name, "u": cfg.point[0], "v": cfg.point[1],
               "point": [g.point.t, g.point.x, g.point.y], "theta": g.theta,
               "theta_deg": float(np.degrees(g.theta)), "H": g.H, "K_extrinsic": g.K_extrinsic,
               "K_intrinsic": g.K_intrinsic, "principal": list(g.principal),
               "first_form": np.asarray(g.first_form).tolist(), "shape": np.asarray(g.shape).tolist()}
    else:
        nu, nv = cfg.grid
        rep = evaluate_grid(imm, nu, nv, interior=True, mode=cfg.mode)
        g = rep.geom.canonical()
        k1, k2 = g.principal
        rng = lambda a: [float(np.min(a)), float(np.max(a))]
        out = {"surface": imm.name, "grid": [nu, nv], "domain": list(imm.domain),
               "theta_mean": float(np.mean(g.theta)), "theta_std": float(np.std(g.theta)),
               "H": rng(g.H), "K": rng(rep.K_brioschi), "k1": rng(k1), "k2": rng(k2),
               "t": rng(g.t)}
    _dump(out, cfg.report)
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "verify": cmd_verify, "classify": cmd_classify, "report": cmd_report}


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[cfg.command](cfg)
    except (WarpSurfError, ValueError) as exc:
        print(f"warpsurf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
