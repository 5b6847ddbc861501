"""Command line interface: ``harmonorm <command> [options]``.

Every command prints a JSON report ``{"command", "arguments", "result"}`` to
stdout. ``--json PATH`` also writes it to PATH, plus a run manifest (tool
version, wall time, output paths) next to it as ``PATH.manifest.json``.
Exit codes: 0 success, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import catalog
from .boundary import angular_limit, asymptotic_value, radial_limit
from .errors import ToolkitError
from .harmonic import PathPolyline, eval_f, jacobian, spherical_derivative
from .maxprinciple import LensConfig, delta0, lens_region, solve_eta, t0, verify_max_principle
from .normality import (
    derivative_growth,
    five_point_test,
    lappan_pair_test,
    normality_constant,
    p_criterion,
    write_samples_csv,
)
from .rescaling import convergence_probe, default_schedule, extract_blowup, frames_from_blowup, zoom
from .search import GridConfig
from .validation import parse_complex, parse_value_list


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _cx(z: complex) -> list:
    return [float(complex(z).real), float(complex(z).imag)]


def _grid(args) -> GridConfig:
    return GridConfig(
        max_radius=args.max_radius,
        initial_mesh=args.mesh,
        refine_depth=args.depth,
        tol=args.tol,
        max_evals=args.max_evals,
        rng_seed=args.seed,
    )


def _read_csv(path, ncols: int) -> list[list[float]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    out = []
    for i, row in enumerate(rows):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            vals = [float(c) for c in row]
        except ValueError:
            if i == 0:
                continue  # header
            raise UsageError(f"{path}:{i + 1}: non-numeric row") from None
        if len(vals) != ncols:
            raise UsageError(f"{path}:{i + 1}: expected {ncols} columns")
        out.append(vals)
    return out


# -- commands --

def cmd_eval(args):
    f = catalog.resolve_map(args.map)
    pts = [parse_complex(s) for s in args.z.split(";") if s.strip()]
    rows = []
    for z in pts:
        rows.append({
            "z": _cx(z),
            "f": _cx(eval_f(f, z)),
            "sharp": float(spherical_derivative(f, z)),
            "jacobian": float(jacobian(f, z)),
        })
    return {"points": rows}


def _estimate_report(est, args):
    if args.csv:
        write_samples_csv(args.csv, *est.samples)
    return est.to_dict()


def cmd_normality(args):
    f = catalog.resolve_map(args.map)
    return _estimate_report(normality_constant(f, _grid(args), record=bool(args.csv)), args)


def cmd_pcrit(args):
    f = catalog.resolve_map(args.map)
    return _estimate_report(p_criterion(f, args.p, _grid(args), record=bool(args.csv)), args)


def cmd_dgrowth(args):
    f = catalog.resolve_map(args.map)
    return _estimate_report(derivative_growth(f, args.n, args.K, _grid(args), record=bool(args.csv)), args)


def cmd_fivepoint(args):
    f = catalog.resolve_map(args.map)
    values = parse_value_list(args.values)
    res = five_point_test(f, values, _grid(args))
    return {"values": [r.to_dict() for r in res]}


def cmd_zoom(args):
    f = catalog.resolve_map(args.map)
    fr = zoom(f, parse_complex(args.center), args.rho, args.radius, args.frame_mesh)
    if args.csv:
        fr.write_csv(args.csv)
    return fr.manifest()


def cmd_blowup(args):
    f = catalog.resolve_map(args.map)
    seq = extract_blowup(f, default_schedule(args.n_max), _grid(args))
    out = seq.to_dict()
    R_min = min((1.0 - abs(e.z)) / e.rho for e in seq.entries)
    radius = min(args.frame_radius, R_min)
    frames = frames_from_blowup(f, seq, radius, args.frame_mesh)
    out["frame_radius"] = radius
    out["frames"] = [fr.manifest() for fr in frames]
    out["probe"] = convergence_probe(frames, args.probe_tol).to_dict()
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "z_re", "z_im", "M", "rho"])
            for e in seq.entries:
                w.writerow([repr(e.r), repr(e.z.real), repr(e.z.imag), repr(e.M), repr(e.rho)])
    return out


def cmd_maxprin(args):
    lens = LensConfig(args.alpha, args.beta, args.delta)
    k = lens.kappa
    eta = solve_eta(args.delta, k)  # raises DeltaTooLarge
    out = {"kappa": k, "t0": t0(k), "delta0": delta0(k), "eta": eta}
    if args.csv or args.map:
        region = lens_region(args.beta, args.cap)
        out["chord_error"] = region.chord_error
        if args.csv:
            with open(args.csv, "w", newline="", encoding="utf-8") as fh:
                w = csv.writer(fh)
                w.writerow(["x", "y"])
                for x, y in region.to_csv_rows():
                    w.writerow([repr(x), repr(y)])
        if args.map:
            f = catalog.resolve_map(args.map)
            out["report"] = verify_max_principle(f, region.free, region.arc, lens, _grid(args)).to_dict()
    return out


def cmd_boundary(args):
    f = catalog.resolve_map(args.map)
    xi = parse_complex(args.xi)
    openings = [float(s) for s in args.openings.split(",") if s.strip()]
    out = {"radial": radial_limit(f, xi, args.samples, args.tol).to_dict()}
    if openings:
        out["angular"] = angular_limit(f, xi, openings, args.samples, args.tol).to_dict()
    if args.path:
        verts = [complex(a, b) for a, b in _read_csv(args.path, 2)]
        probe = asymptotic_value(f, PathPolyline(tuple(verts)), args.samples, args.tol)
        out["asymptotic"] = probe.to_dict()
        if args.csv:
            probe.write_tail_csv(args.csv)
    return out


def cmd_lappan(args):
    f = catalog.resolve_map(args.map)
    rows = _read_csv(args.pairs, 4)
    pairs = [(complex(a, b), complex(c, d)) for a, b, c, d in rows]
    return lappan_pair_test(f, pairs).to_dict()


def cmd_catalog(args):
    return json.loads(catalog.list_json())


# -- parser --

def _common(p, map_required=True):
    p.add_argument("--map", required=map_required, help="catalog name or map JSON file")
    p.add_argument("--depth", type=int, default=6, help="refinement rounds")
    p.add_argument("--mesh", type=int, default=24, help="rings of the level-0 polar grid")
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-radius", type=float, default=0.999)
    p.add_argument("--max-evals", type=int, default=2_000_000)
    p.add_argument("--json", help="also write the report here")
    p.add_argument("--csv", help="write plot-ready rows here")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="harmonorm", description="Normality toolkit for planar harmonic maps.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate f, f^# and J_f at points")
    _common(p)
    p.add_argument("--z", required=True, help="points 're,im' separated by ';'")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("normality", help="sup of (1-|z|^2) f^#")
    _common(p)
    p.set_defaults(func=cmd_normality)

    p = sub.add_parser("pcrit", help="two-point criterion")
    _common(p)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_pcrit)

    p = sub.add_parser("fivepoint", help="sup over preimages of five values")
    _common(p)
    p.add_argument("--values", required=True, help="five values 're,im' or 'inf' separated by ';'")
    p.set_defaults(func=cmd_fivepoint)

    p = sub.add_parser("dgrowth", help="growth of the n-th derivatives where |f| <= K")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--K", type=float, required=True)
    p.set_defaults(func=cmd_dgrowth)

    p = sub.add_parser("zoom", help="sample F(zeta) = f(zc + rho zeta)")
    _common(p)
    p.add_argument("--center", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--frame-mesh", type=int, default=21)
    p.set_defaults(func=cmd_zoom)

    p = sub.add_parser("blowup", help="extract the rescaling sequence and probe the frames")
    _common(p)
    p.add_argument("--n-max", type=int, default=12, help="schedule r_n = 1 - 2^-n, n = 1..N")
    p.add_argument("--frame-radius", type=float, default=1.0)
    p.add_argument("--frame-mesh", type=int, default=21)
    p.add_argument("--probe-tol", type=float, default=1e-2)
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("maxprin", help="max-principle constants and optional lens check")
    _common(p, map_required=False)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cap", type=float, default=0.95, help="radius cutting the lens off the circle")
    p.set_defaults(func=cmd_maxprin)

    p = sub.add_parser("boundary", help="radial, angular and path limits at xi")
    _common(p)
    p.add_argument("--xi", required=True)
    p.add_argument("--path", help="CSV of path vertices x,y ending at xi")
    p.add_argument("--openings", default=f"{math.pi / 6!r},{math.pi / 3!r}")
    p.add_argument("--samples", type=int, default=40)
    p.set_defaults(func=cmd_boundary, tol=1e-6)

    p = sub.add_parser("lappan", help="chordal gaps along pairs z_n, w_n")
    _common(p)
    p.add_argument("--pairs", required=True, help="CSV z_re,z_im,w_re,w_im")
    p.set_defaults(func=cmd_lappan)

    p = sub.add_parser("catalog", help="list built-in maps")
    p.add_argument("action", choices=["list"])
    p.add_argument("--json")
    p.set_defaults(func=cmd_catalog)
    return ap


_OUTPUT_ARGS = ("json", "csv", "func", "command")


def canonical_arguments(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _OUTPUT_ARGS}


def render(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.perf_counter()
    try:
        with np.errstate(all="ignore"):
            result = args.func(args)
    except UsageError as e:
        print(f"harmonorm: error: {e}", file=sys.stderr)
        return 1
    except ToolkitError as e:
        print(f"harmonorm: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    report = {"command": args.command, "arguments": canonical_arguments(args), "result": result}
    text = render(report)
    sys.stdout.write(text)
    if getattr(args, "json", None):
        out = Path(args.json)
        out.write_text(text, encoding="utf-8")
        manifest = {
            "command": args.command,
            "arguments": canonical_arguments(args),
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "wall_time": time.perf_counter() - start,
            "outputs": [p for p in (args.json, getattr(args, "csv", None)) if p],
        }
        Path(str(out) + ".manifest.json").write_text(render(manifest), encoding="utf-8")
    return 0


if __name__ == "__main__":
    sys.exit(main())
