"""Command-line interface tying the pipeline together.

Subcommands: ``plan`` (knot to buildable geometry + cable cut list),
``simulate`` (plan to folding run with trace and verdict files),
``verify`` (standalone Gauss-code check of sampled curve points), and
``search`` (exhaustive grid-diagram search).

Exit codes: 0 success, 1 invalid input, 2 not found, 3 incomplete run,
4 topology mismatch, 5 inconclusive verification.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assets import bundled_names, load_bundled, load_grid_file
from .curve_code import DegenerateCrossingError, gauss_code_of_curve
from .gauss import canonicalize, parse_gauss_code
from .grid import GridDiagram, grid_search, open_diagram, trace_polyline
from .plan import (
    KnotPlan,
    build_plan,
    cable_cut_list,
    plan_from_json_dict,
    plan_to_json_dict,
    rescale_for_cable,
)
from .sim import SimConfig, audit_margins, run as run_simulation
from .trajectory import augment_waypoints, make_schedule, quintic_spline

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_FOUND = 2
EXIT_INCOMPLETE = 3
EXIT_MISMATCH = 4
EXIT_INCONCLUSIVE = 5

# Every constant the planner or simulator assumes but the problem statement
# leaves open lives here and is surfaced as a flag.
DEFAULTS = {
    "d": 1.0,
    "h_min": 1.0,
    "v_ref": 1.0,          # trajectory reference speed, m/s
    "t_floor": 0.5,        # minimum quintic interval duration, s
    "t_entry": 3.0,        # grasp-to-trajectory connector duration, s
    "k_p": 25.0,           # position gain (critically damped with k_d = 2*sqrt(k_p))
    "k_d": 10.0,
    "dt": 1e-3,            # integrator step, s
    "n_max": 7,            # grid search cap
    "samples": 128,        # verification samples per segment
    "zp_plan_factor": 1.25,   # plan-only default z_p, multiple of h_max
    "zp_sim_factor": 1.75,    # simulation default: dips reach 1.5*h_max below z_p
}


def _add_knot_source(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--knot", help=f"bundled diagram ({', '.join(bundled_names())})")
    src.add_argument("--gauss", help="Gauss code text, e.g. '1- 2+ 3- 1+ 2- 3+'")
    src.add_argument("--grid", help="grid diagram JSON file")


def _add_plan_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=float, default=DEFAULTS["d"], help="grid cell width, m")
    p.add_argument("--hmin", type=float, default=DEFAULTS["h_min"],
                   help="shallow catenary sag, m")
    p.add_argument("--zp", type=float, default=None,
                   help="corner plane height, m (default: derived from h_max)")
    p.add_argument("--cable-length", type=float, default=None,
                   help="rescale the grid so total cable length fits this")
    p.add_argument("--nmax", type=int, default=DEFAULTS["n_max"],
                   help="grid search size cap for --gauss input")
    p.add_argument("--out", default=".", help="output directory")


def _resolve_diagram(args) -> tuple[GridDiagram, dict]:
    if args.knot:
        g, provenance = load_bundled(args.knot)
        return g, {"kind": "bundled", "name": args.knot, "provenance": provenance}
    if args.grid:
        return load_grid_file(args.grid), {"kind": "grid-file", "path": str(args.grid)}
    code = parse_gauss_code(args.gauss)
    g = grid_search(code, args.nmax)
    if g is None:
        raise LookupError(
            f"no grid diagram of size <= {args.nmax} realizes that Gauss code; "
            "supply a grid file with --grid"
        )
    return g, {"kind": "gauss", "code": code.to_text(), "n_max": args.nmax}


def _make_plan(args, z_p_default_factor: float) -> KnotPlan:
    g, source = _resolve_diagram(args)
    og = open_diagram(g)
    d, h_min = args.d, args.hmin
    poly = trace_polyline(og, d, 1.0)
    if args.cable_length is not None:
        d_new = rescale_for_cable(poly, h_min, args.cable_length)
        h_min = h_min * d_new / d
        d = d_new
        poly = trace_polyline(og, d, 1.0)
        source["rescaled_d"] = d
    probe = build_plan(poly, h_min, z_p=None, source=source)
    z_p = args.zp if args.zp is not None else z_p_default_factor * probe.h_max
    return build_plan(poly, h_min, z_p=z_p, source=source)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=1) + "\n")


def cmd_plan(args) -> int:
    try:
        plan = _make_plan(args, DEFAULTS["zp_plan_factor"])
    except LookupError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "plan.json", plan_to_json_dict(plan))
    total, lengths = cable_cut_list(plan)
    lines = [
        f"knot plan: {plan.grid_size}x{plan.grid_size} grid, {plan.n} robots, "
        f"{len(lengths)} cable segments, {len(plan.polyline.crossings)} crossings",
        f"d = {plan.d!r}  h_min = {plan.h_min!r}  h_max = {plan.h_max!r}  "
        f"z_p = {plan.z_p!r}",
        f"total cable length = {total!r}",
        "segment cut lengths:",
    ]
    lines += [f"  {i + 1:3d}: {x!r}" for i, x in enumerate(lengths)]
    (out / "cutlist.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines[:3]))
    print(f"wrote {out / 'plan.json'} and {out / 'cutlist.txt'}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        if args.plan:
            plan = plan_from_json_dict(json.loads(Path(args.plan).read_text()))
        else:
            plan = _make_plan(args, DEFAULTS["zp_sim_factor"])
        waypoints = augment_waypoints(plan.targets, plan.h_max)
        traj = quintic_spline(waypoints, v_ref=args.vref, t_floor=DEFAULTS["t_floor"])
        schedule = make_schedule(
            plan, traj, t_d=args.td, entry_duration=args.tentry, v_ref=args.vref
        )
        config = SimConfig(
            dt=args.dt,
            k_p=args.kp,
            k_d=args.kd,
            record_every=args.record_every,
            verify_samples=args.samples,
        )
    except LookupError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (ValueError, KeyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID

    trace = run_simulation(plan, traj, schedule, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.csv").write_text(trace.trace_csv())
    (out / "margins.csv").write_text(trace.margins_csv())
    audit = audit_margins(trace)
    verdict = dict(trace.verdict)
    verdict["min_margin_per_pair"] = list(audit.min_margin)
    verdict["max_tracking_error"] = list(audit.max_tracking_error)
    _write_json(out / "verdict.json", verdict)
    _write_json(
        out / "trajectory.json",
        {
            "schema": "knotfold/trajectory@1",
            "waypoints": [list(map(float, w)) for w in traj.waypoints],
            "knot_times": [float(t) for t in traj.times],
            "intervals": traj.interval_coeffs(),
            "schedule": {
                "t_d": schedule.t_d,
                "entry_duration": schedule.entry_duration,
                "entry_starts": [float(x) for x in schedule.entry_starts],
                "track_starts": [float(x) for x in schedule.track_starts],
                "stop_clocks": [float(x) for x in schedule.stop_clocks],
            },
        },
    )
    print(
        f"simulated {trace.times[-1]:.1f}s: completed={trace.completed} "
        f"topology_ok={verdict['topology_ok']}"
    )
    print(f"wrote trace.csv, margins.csv, verdict.json, trajectory.json in {out}")
    if not trace.completed:
        return EXIT_INCOMPLETE
    if verdict["topology_ok"] is not True:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        target = canonicalize(parse_gauss_code(args.gauss))
        samples = np.loadtxt(args.samples_file, delimiter=",", ndmin=2)
        if samples.shape[1] != 3:
            raise ValueError(
                f"expected 3 columns (x,y,z), got {samples.shape[1]}"
            )
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    try:
        extracted = canonicalize(
            gauss_code_of_curve(samples, closure=not args.open_curve)
        )
    except DegenerateCrossingError as err:
        print(f"inconclusive: {err}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    print(f"extracted: {extracted.to_text() or '(unknot)'}")
    print(f"target:    {target.to_text() or '(unknot)'}")
    return EXIT_OK if extracted == target else EXIT_MISMATCH


def cmd_search(args) -> int:
    try:
        code = parse_gauss_code(args.gauss)
        if args.nmax > DEFAULTS["n_max"]:
            raise ValueError(f"--nmax capped at {DEFAULTS['n_max']}")
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    t0 = time.perf_counter()
    g = grid_search(code, args.nmax)
    elapsed = time.perf_counter() - t0
    if g is None:
        print(
            f"not found: no diagram of size <= {args.nmax} "
            f"({elapsed:.2f}s searched)",
            file=sys.stderr,
        )
        return EXIT_NOT_FOUND
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    payload = g.to_json_dict()
    payload["provenance"] = (
        f"Exhaustive smallest-N search for Gauss code '{code.to_text()}'"
    )
    _write_json(out, payload)
    print(f"found {g.n}x{g.n} diagram in {elapsed:.2f}s -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knotfold",
        description="Plan and simulate midair knot folding with cable-carrying robots",
    )
    parser.add_argument("--version", action="version", version=f"knotfold {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="build a multi-catenary knot plan")
    _add_knot_source(p_plan)
    _add_plan_args(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_sim = sub.add_parser("simulate", help="fold the knot with simulated robots")
    src = p_sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--knot", help=f"bundled diagram ({', '.join(bundled_names())})")
    src.add_argument("--gauss", help="Gauss code text")
    src.add_argument("--grid", help="grid diagram JSON file")
    src.add_argument("--plan", help="existing plan.json from the plan command")
    _add_plan_args(p_sim)
    p_sim.add_argument("--td", type=float, default=None,
                       help="leader-follower start delay, s (default: mean cable segment / v_ref)")
    p_sim.add_argument("--tentry", type=float, default=DEFAULTS["t_entry"],
                       help="grasp-to-trajectory connector duration, s")
    p_sim.add_argument("--vref", type=float, default=DEFAULTS["v_ref"],
                       help="trajectory reference speed, m/s")
    p_sim.add_argument("--kp", type=float, default=DEFAULTS["k_p"], help="position gain")
    p_sim.add_argument("--kd", type=float, default=DEFAULTS["k_d"], help="velocity gain")
    p_sim.add_argument("--dt", type=float, default=DEFAULTS["dt"], help="integrator step, s")
    p_sim.add_argument("--record-every", type=int, default=10,
                       help="trace recording cadence, steps")
    p_sim.add_argument("--samples", type=int, default=DEFAULTS["samples"],
                       help="verification samples per cable segment")
    p_sim.set_defaults(func=cmd_simulate)

    p_verify = sub.add_parser("verify", help="check sampled curve points against a Gauss code")
    p_verify.add_argument("samples_file", help="CSV of x,y,z samples along the curve")
    p_verify.add_argument("--gauss", required=True, help="target Gauss code")
    p_verify.add_argument("--open-curve", action="store_true",
                          help="do not close the curve with a final chord")
    p_verify.set_defaults(func=cmd_verify)

    p_search = sub.add_parser("search", help="exhaustive grid-diagram search")
    p_search.add_argument("--gauss", required=True, help="target Gauss code")
    p_search.add_argument("--nmax", type=int, default=DEFAULTS["n_max"],
                          help="largest grid size to try")
    p_search.add_argument("--out", default="grid.json", help="output JSON path")
    p_search.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def run() -> None:  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":
    run()
