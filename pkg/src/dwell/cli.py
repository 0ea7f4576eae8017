"""Command-line interface: ``dwell {solve,gl,verify,slice}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import ginzburg_landau as gl
from .dual import DEFAULT_TOL, Sphere
from .exceptions import InstanceError
from .instance import objective_rows, read_instance, save_instance
from .oracle import GRID_MAX_DIM, grid_min, instance_scale, multistart_min
from .pipeline import GLOBAL_SPHERE, UNBOUNDED, Solution, solve

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_UNBOUNDED = 2

VERIFY_MAX_DIM = 6
VERIFY_ATOL = 1e-6
GRID_STEPS = {1: 10_000, 2: 400, 3: 60}


def _floats(a):
    return [float(v) for v in np.ravel(a)]


def solve_report(sol: Solution) -> dict:
    """JSON-ready report; only the keys implied by ``sol.status`` are present."""
    report = {"status": sol.status}
    if sol.status == UNBOUNDED:
        cert = sol.certificate
        report["certificate"] = {
            "kind": cert.kind,
            "base": _floats(cert.base),
            "direction": _floats(cert.direction),
        }
    else:
        report["sigma"] = float(sol.sigma)
        report["value"] = float(sol.value)
        report["x"] = _floats(sol.x)
    if sol.status == GLOBAL_SPHERE:
        sph: Sphere = sol.solution
        e = np.zeros(sph.I.size)
        e[0] = 1.0
        report["sphere"] = {
            "indices": sph.I.tolist(),
            "center": _floats(sph.center),
            "radius": float(sph.radius),
            "fixed_indices": sph.J.tolist(),
            "fixed": _floats(sph.fixed),
            "samples": [_floats(sol.to_x(sph.member(e))), _floats(sol.to_x(sph.member(-e)))],
        }
    report["diagnostics"] = sol.diagnostics
    return report


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(msg):
    print(f"dwell: error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_solve(args):
    inst = read_instance(args.instance)
    sol = solve(inst, tol=args.tol)
    _emit(json.dumps(solve_report(sol), indent=2) + "\n", args.out)
    return EXIT_UNBOUNDED if sol.status == UNBOUNDED else EXIT_OK


def cmd_gl(args):
    spec = gl.GridSpec(args.s, args.t, args.alpha, args.beta)
    inst = gl.build_dwp_instance(spec)
    _emit(save_instance(inst).decode("utf-8"), args.out)
    return EXIT_OK


def cmd_verify(args):
    inst = read_instance(args.instance)
    if inst.n > VERIFY_MAX_DIM:
        return _error(f"verify supports n <= {VERIFY_MAX_DIM}, instance has n = {inst.n}")
    sol = solve(inst, tol=args.tol)
    lines = [f"pipeline status: {sol.status}", f"pipeline value: {sol.value!r}"]
    oracles = {}
    x_ms, v_ms = multistart_min(inst, args.starts, args.seed)
    oracles["multistart"] = v_ms
    if inst.n <= GRID_MAX_DIM:
        R = instance_scale(inst)
        steps = args.steps or GRID_STEPS[inst.n]
        _, v_grid = grid_min(inst, (-R, R), steps)
        oracles["grid"] = v_grid
    for name, v in oracles.items():
        lines.append(f"{name} value: {v!r}  gap: {v - sol.value!r}")
    best = min(oracles.values())
    ok = sol.value <= best + VERIFY_ATOL
    lines.append("verdict: " + ("PASS" if ok else "FAIL"))
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_INPUT


def _parse_range(text):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _parse_dims(text):
    try:
        dims = [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I or I,J, got {text!r}") from None
    if not 1 <= len(dims) <= 2 or len(set(dims)) != len(dims):
        raise argparse.ArgumentTypeError("select one or two distinct dimensions")
    return dims


def _parse_fix(text):
    fixed = {}
    for item in filter(None, text.split(",")):
        try:
            k, v = item.split("=")
            fixed[int(k)] = float(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected I=V[,I=V...], got {text!r}") from None
    return fixed


def slice_rows(inst, dims, lo, hi, steps, fixed=None):
    """Objective on a 1-D or 2-D axis-aligned lattice through a base point."""
    base = np.zeros(inst.n)
    for k, v in (fixed or {}).items():
        if not 0 <= k < inst.n:
            raise InstanceError(f"--fix: dimension {k} out of range for n = {inst.n}")
        base[k] = v
    for k in dims:
        if not 0 <= k < inst.n:
            raise InstanceError(f"--dims: dimension {k} out of range for n = {inst.n}")
    ax = np.linspace(lo, hi, steps + 1)
    grids = np.meshgrid(*([ax] * len(dims)), indexing="ij")
    coords = np.stack([g.ravel() for g in grids], axis=1)
    X = np.tile(base, (coords.shape[0], 1))
    X[:, dims] = coords
    return coords, objective_rows(inst, X)


def cmd_slice(args):
    inst = read_instance(args.instance)
    lo, hi = args.range
    coords, values = slice_rows(inst, args.dims, lo, hi, args.steps, args.fix)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{k + 1}" for k in range(len(args.dims))] + ["value"])
    for row, v in zip(coords, values):
        writer.writerow([f"{c:.17g}" for c in row] + [f"{v:.17g}"])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # Usage errors are input errors; exit status 2 is reserved for unbounded instances.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="dwell", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="global minimum of an instance file")
    s.add_argument("instance")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gl", help="write the Ginzburg-Landau double-well instance")
    g.add_argument("s", type=int)
    g.add_argument("t", type=int)
    g.add_argument("alpha", type=float)
    g.add_argument("beta", type=float)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gl)

    v = sub.add_parser("verify", help="compare the solver with brute-force oracles")
    v.add_argument("instance")
    v.add_argument("--starts", type=int, default=50)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--steps", type=int, default=None, help="grid steps per axis")
    v.add_argument("--tol", type=float, default=DEFAULT_TOL)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("slice", help="objective along 1 or 2 coordinate axes as CSV")
    c.add_argument("instance")
    c.add_argument("--dims", type=_parse_dims, default=[0])
    c.add_argument("--range", type=_parse_range, default=(-10.0, 10.0),
                   help="LO:HI; write --range=-12:2 for a negative LO")
    c.add_argument("--steps", type=int, default=100)
    c.add_argument("--fix", type=_parse_fix, default={})
    c.add_argument("--out")
    c.set_defaults(func=cmd_slice)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return int(exc.code or 0)
    if getattr(args, "steps", None) is not None and args.steps < 1:
        return _error("--steps must be positive")
    try:
        return args.func(args)
    except (InstanceError, ValueError) as exc:
        return _error(str(exc))
    except OSError as exc:
        return _error(f"{exc.filename}: {exc.strerror}")


if __name__ == "__main__":
    sys.exit(main())
