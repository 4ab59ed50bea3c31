"""Command-line interface.

Subcommands: ``spectrum``, ``cauchy-null``, ``scatter``, ``sweep``, ``expand``.
Every run writes its outputs and one manifest, relative to ``--workdir``.

Exit codes: 0 success, 2 invalid input, 3 certification or root-finding
failure, 4 numerical failure, 5 resolution guard tripped (override with
``--force``).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (CertificationError, ConvergenceError, DomainError, ResolutionError,
                     ResolutionWarning, SolverError)

logger = logging.getLogger("cornerscatter.cli")

EXIT_OK, EXIT_INPUT, EXIT_CERT, EXIT_NUMERIC, EXIT_GUARD = 0, 2, 3, 4, 5
SCHEMA_PREFIX = "cornerscatter.cli"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class Run:
    """Collects parameters, inputs and outputs for the manifest."""

    def __init__(self, args, workdir: Path):
        self.args = args
        self.workdir = workdir
        self.inputs: dict = {}
        self.outputs: list = []
        self.t0 = time.perf_counter()

    def path(self, name) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.workdir / p

    def add_input(self, path: Path):
        self.inputs[str(path)] = _sha256(path)

    def add_output(self, path: Path):
        self.outputs.append({"path": str(path), "sha256": _sha256(path)})

    def write_manifest(self, summary: dict) -> Path:
        params = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        doc = {
            "schema": "cornerscatter.manifest/1",
            "subcommand": self.args.command,
            "tool_version": __version__,
            "parameters": params,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "summary": summary,
            "elapsed_seconds": round(time.perf_counter() - self.t0, 6),
        }
        name = self.args.manifest or f"{self.args.command}.manifest.json"
        path = self.path(name)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
        return path


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _angle(args, text):
    from .geometry import parse_angle

    return parse_angle(text, degrees=args.degrees)


def _geometry(args):
    from .geometry import ConeGeometry, SectorGeometry

    omega, frac = _angle(args, args.omega)
    cls = SectorGeometry if args.geometry == "sector" else ConeGeometry
    geom = cls(omega, frac)
    if args.command == "spectrum" and geom.is_excluded:
        if cls is SectorGeometry:
            raise CliError(EXIT_INPUT, "sector opening omega = pi is excluded: the boundary is "
                                       "flat and has no corner")
        # the flat cone still has a well-defined spectrum (odd integers for m = 0)
        logger.warning("cone half-angle pi/2 is flat; computing its spectrum as a control")
    return geom


# --------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args, run: Run) -> dict:
    from .cone_spectrum import cone_exponents, sector_exponents
    from .geometry import SectorGeometry

    geom = _geometry(args)
    try:
        if isinstance(geom, SectorGeometry):
            exps = sector_exponents(geom, args.bc, args.lambda_max)
        else:
            orders = [int(m) for m in args.orders.split(",")] if args.orders else None
            exps = cone_exponents(geom, args.bc, args.lambda_max, orders=orders)
    except ConvergenceError as exc:
        raise CliError(EXIT_CERT, f"root finder failed: {exc}") from None
    if not args.include_reflected:
        exps = [e for e in exps if e.value >= 0]
    out = run.path(args.out)
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["value", "boundary_condition", "index", "multiplicity", "orders",
                    "residual", "raw_residual", "merged", "certified"])
        for e in exps:
            w.writerow([repr(float(e.value)), e.boundary_condition.value, e.index, e.multiplicity,
                        " ".join(map(str, e.orders)), repr(float(e.residual)),
                        repr(float(e.raw_residual)), int(e.merged), int(e.residual <= 1e-9)])
    run.add_output(out)
    return {"geometry": args.geometry, "omega": geom.omega, "bc": args.bc,
            "exponents": [float(e.value) for e in exps]}


def cmd_cauchy_null(args, run: Run) -> dict:
    from .poly_cauchy import nullspace_report

    geom = _geometry(args)
    reports = []
    for d in range(args.min_degree, args.max_degree + 1):
        try:
            rep = nullspace_report(geom, d, method=args.method, precision_bits=args.precision_bits,
                                   allow_exact=not args.no_exact)
        except CertificationError as exc:
            raise CliError(EXIT_CERT, str(exc)) from None
        reports.append(rep.to_json())
    doc = {"schema": f"{SCHEMA_PREFIX}/cauchy-null/1", "geometry": args.geometry,
           "omega": geom.omega,
           "pi_fraction": None if geom.pi_fraction is None else str(geom.pi_fraction),
           "degrees": reports}
    out = run.path(args.out)
    out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    run.add_output(out)
    return {"dimensions": {r["degree"]: r["dimension"] for r in reports},
            "methods": {r["degree"]: r["method"] for r in reports}}


def _load_scene(args, run: Run):
    from .scatter2d.scene import load_scene

    path = run.path(args.scene)
    if not path.is_file():
        raise CliError(EXIT_INPUT, f"scene file not found: {path}")
    scene = load_scene(path)
    run.add_input(path)
    if args.n is not None:
        scene.n = args.n
    return scene


def _solve_guarded(args, contrast, k, inc):
    from .scatter2d import solve
    from .scatter2d.solver import required_grid_size

    need = required_grid_size(contrast, k)
    if contrast.n < need and not args.force:
        raise CliError(EXIT_GUARD, f"grid N={contrast.n} is below the resolution threshold "
                                   f"N>={need} at k={k:g}; rerun with --force to proceed")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        return solve(contrast, k, inc)


def cmd_scatter(args, run: Run) -> dict:
    from .scatter2d import far_field
    from .scatter2d.io import write_far_field_csv, write_snapshot

    scene = _load_scene(args, run)
    k = args.k if args.k is not None else scene.k
    if k is None:
        raise CliError(EXIT_INPUT, "no wavenumber: set k in the scene or pass --k")
    spec = scene.shape(args.shape)
    contrast = spec.build(scene.half_width, scene.n)
    total = _solve_guarded(args, contrast, k, scene.incident)
    pattern = far_field(total, scene.farfield_samples)
    ff = run.path(scene.outputs.get("farfield", f"farfield_{spec.name}.csv"))
    write_far_field_csv(ff, pattern)
    run.add_output(ff)
    if "snapshot" in scene.outputs:
        snap = run.path(scene.outputs["snapshot"])
        L = scene.half_width
        write_snapshot(snap, total.u, (-L, L, -L, L), k)
        run.add_output(snap)
    return {"shape": spec.name, "k": k, "farfield_norm": pattern.norm,
            "residual": total.residual, "iterations": total.iterations}


def cmd_sweep(args, run: Run) -> dict:
    from .scatter2d import sweep
    from .scatter2d.io import write_sweep_csv
    from .scatter2d.solver import required_grid_size

    scene = _load_scene(args, run)
    if scene.k_range is None or scene.steps < 1:
        raise CliError(EXIT_INPUT, "sweep needs k_min, k_max and steps in the scene")
    names = [args.shape] if args.shape else [s.name for s in scene.shapes]
    tables = {}
    for name in names:
        contrast = scene.contrast(name)
        need = required_grid_size(contrast, scene.k_range[1])
        if contrast.n < need and not args.force:
            raise CliError(EXIT_GUARD, f"grid N={contrast.n} is below the resolution threshold "
                                       f"N>={need} at k={scene.k_range[1]:g}; use --force")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            tables[name] = sweep(contrast, scene.incident, scene.k_range, scene.steps,
                                 floor=scene.floor)
    out = run.path(scene.outputs.get("sweep", "sweep.csv"))
    write_sweep_csv(out, tables)
    run.add_output(out)
    return {name: {"flagged": t.flagged, "failed": t.failed,
                   "min_norm": float(np.nanmin(t.norms)) if len(t.entries) else None}
            for name, t in tables.items()}


def _parse_number(value):
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError:
            return complex(value.replace(" ", ""))
    if isinstance(value, int):
        return Fraction(value)
    return value


def cmd_expand(args, run: Run) -> dict:
    from . import helmholtz_series as hs

    path = run.path(args.seeds)
    if not path.is_file():
        raise CliError(EXIT_INPUT, f"seeds file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"seeds file is not JSON: {exc}") from None
    run.add_input(path)
    try:
        dim = int(doc.get("dimension", 2))
        k = _parse_number(doc["k"])
        J = int(args.max_degree if args.max_degree is not None else doc.get("max_degree", 8))
        if "plane_wave" in doc:
            pw = doc["plane_wave"]
            if dim == 2:
                seeds = hs.plane_wave_seeds_2d(float(k), _angle(args, pw.get("angle", 0))[0], J)
                exp = hs.expand_2d(seeds, float(k), J)
            else:
                seeds = hs.plane_wave_seeds_3d(float(k), pw["direction"], J)
                exp = hs.expand_3d(seeds, float(k), J)
        elif dim == 2:
            seeds = {(int(s["n"]), s.get("sign", "+")): _parse_number(s["value"])
                     for s in doc["seeds"]}
            exp = hs.expand_2d(seeds, k, J)
        else:
            seeds = {(int(s["n"]), int(s["m"])): _parse_number(s["value"]) for s in doc["seeds"]}
            exp = hs.expand_3d(seeds, k, J)
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"bad seeds document: {exc}") from None
    radii = [float(r) for r in args.radii.split(",")]
    res, slope = hs.residual_decay(exp, radii)
    terms = hs.lowest_taylor_terms(exp, 2)
    harmonic = [t.laplacian().is_zero() for t in terms]
    out = run.path(args.out)
    payload = {"schema": f"{SCHEMA_PREFIX}/expand/1", "expansion": hs.expansion_to_json(exp),
               "residuals": [{"radius": r, "residual": float(v)} for r, v in zip(radii, res)],
               "slope": slope, "expected_slope": J - 1,
               "lowest_terms": [{"degree": t.degree, "harmonic": h, "polynomial": t.to_string()}
                                for t, h in zip(terms, harmonic)]}
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    run.add_output(out)
    return {"slope": slope, "expected_slope": J - 1, "lowest_terms_harmonic": harmonic}


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cornerscatter", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workdir", default=".", help="directory for relative paths")
    common.add_argument("--json", action="store_true", help="print a JSON summary on stdout")
    common.add_argument("--manifest", help="manifest file name (default <command>.manifest.json)")
    common.add_argument("--degrees", action="store_true", help="read angles in degrees")
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="singular exponents of a sector or cone")
    s.add_argument("--geometry", choices=["sector", "cone"], required=True)
    s.add_argument("--omega", required=True, help="opening (sector) or half-angle (cone)")
    s.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")
    s.add_argument("--lambda-max", type=float, default=6.0)
    s.add_argument("--orders", help="comma-separated cone orders |m| (default: all needed)")
    s.add_argument("--include-reflected", action="store_true",
                   help="also list the reflected exponents below zero")
    s.add_argument("--out", default="exponents.csv")
    s.set_defaults(func=cmd_spectrum)

    c = sub.add_parser("cauchy-null", parents=[common], help="biharmonic Cauchy null spaces")
    c.add_argument("--geometry", choices=["sector", "cone"], required=True)
    c.add_argument("--omega", required=True)
    c.add_argument("--max-degree", type=int, default=8)
    c.add_argument("--min-degree", type=int, default=2)
    c.add_argument("--method", choices=["auto", "interval", "exact", "float"], default="auto")
    c.add_argument("--precision-bits", type=int, default=200)
    c.add_argument("--no-exact", action="store_true", help="disable the exact fallback")
    c.add_argument("--out", default="cauchy_null.json")
    c.set_defaults(func=cmd_cauchy_null)

    for name, func, helptext in (("scatter", cmd_scatter, "solve one scene"),
                                 ("sweep", cmd_sweep, "far-field norms over a k range")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("scene", help="scene file")
        q.add_argument("--shape", help="shape section to use")
        q.add_argument("--n", type=int, help="override the grid size")
        q.add_argument("--force", action="store_true", help="ignore the resolution guard")
        if name == "scatter":
            q.add_argument("--k", type=float, help="override the wavenumber")
        q.set_defaults(func=func)

    e = sub.add_parser("expand", parents=[common], help="Helmholtz series from seeds")
    e.add_argument("seeds", help="seeds JSON file")
    e.add_argument("--max-degree", type=int)
    e.add_argument("--radii", default="0.05,0.1,0.2")
    e.add_argument("--out", default="expansion.json")
    e.set_defaults(func=cmd_expand)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    workdir = Path(args.workdir)
    if not workdir.is_dir():
        print(f"error: workdir {workdir} does not exist", file=sys.stderr)
        return EXIT_INPUT
    run = Run(args, workdir)
    try:
        summary = args.func(args, run)
        code, error = EXIT_OK, None
    except CliError as exc:
        code, error = exc.code, str(exc)
    except CertificationError as exc:
        code, error = EXIT_CERT, str(exc)
    except ResolutionError as exc:
        code, error = EXIT_GUARD, str(exc)
    except (SolverError, ConvergenceError, FloatingPointError) as exc:
        code, error = EXIT_NUMERIC, str(exc)
    except (DomainError, ValueError, KeyError) as exc:
        code, error = EXIT_INPUT, str(exc)
    if error is not None:
        summary = {"error": error}
        print(f"error: {error}", file=sys.stderr)
    manifest = run.write_manifest(dict(summary, exit_code=code))
    if args.json:
        doc = {"schema": f"{SCHEMA_PREFIX}/{args.command}/1", "exit_code": code,
               "outputs": [o["path"] for o in run.outputs], "manifest": str(manifest)}
        doc.update(summary)
        print(json.dumps(doc, sort_keys=True, default=str))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
