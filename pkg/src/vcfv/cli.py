"""Command-line front end (``vcfv``)."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .errors import VcfvError

log = logging.getLogger("vcfv")

SOD_L1 = 0.015
SOD_OVERSHOOT = 1e-3
BOUND_SLACK = 1e-9
ORDER_MIN = 1.8
FIRST_ORDER_RANGE = (0.8, 1.2)
TAYLOR_RANGE = (0.35, 0.45)


def _verdict(ok):
    return "PASS" if ok else "FAIL"


# -- mesh arguments ---------------------------------------------------------------------


def _add_mesh_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mesh", help="GMSH 2.2 ASCII file")
    g.add_argument("--box", type=float, nargs="+", metavar="L", help="box extents (2 or 3 values)")
    p.add_argument("--cells", type=int, nargs="+", metavar="N", help="cells per axis for --box")
    p.add_argument("--split", help="diagonal rule for --box (right/left/alternate/random in 2-D, kuhn/alternate in 3-D)")
    p.add_argument("--perturb", type=float, default=0.0, help="random interior vertex displacement, fraction of h")
    p.add_argument("--seed", type=int, default=None)


def _mesh_from_args(args):
    from .config import MeshSpec

    if args.mesh:
        return MeshSpec(gmsh=args.mesh).build()
    if args.cells is None or len(args.cells) != len(args.box):
        raise SystemExit("--cells needs one count per --box extent")
    return MeshSpec(
        extents=tuple(args.box), cells=tuple(args.cells), split=args.split, perturb=args.perturb, seed=args.seed
    ).build()


# -- subcommands --------------------------------------------------------------------------


def cmd_run(args):
    from .config import parse_config
    from .io import CellLocator, make_snapshot, write_line_probe, write_summary, write_vtk
    from .solver import run

    cfg = parse_config(args.config)
    if args.seed is not None:
        cfg.mesh.seed = args.seed
    out = Path(args.output or cfg.output.directory)
    state = {}

    def on_snapshot(fields):
        disc = state["disc"]
        snap = make_snapshot(disc, fields, names=cfg.output.fields)
        tag = f"{fields.step:06d}"
        if cfg.output.vtk:
            write_vtk(disc.mesh, snap, out / f"snapshot_{tag}.vtk")
        for probe in cfg.output.probes:
            write_line_probe(disc.mesh, snap, probe, out / f"probe_{probe.name}_{tag}.csv", state["locator"])

    build = cfg.build

    def build_and_remember():
        disc, fields, controls = build()
        state["disc"] = disc
        state["locator"] = CellLocator(disc.mesh) if cfg.output.probes else None
        return disc, fields, controls

    cfg.build = build_and_remember
    started = time.perf_counter()
    try:
        fields, report, disc = run(cfg, on_snapshot)
    finally:
        cfg.build = build
    summary = report.summary()
    summary["wall_seconds"] = round(time.perf_counter() - started, 3)
    summary["config"] = str(args.config)
    write_summary(out / "summary.json", summary)
    for key in ("final_time", "steps", "min_density", "min_pressure", "max_principle_violations"):
        if summary[key] is not None:
            print(f"{key:26s} {summary[key]}")
    print(f"{'conservation_drift':26s} {summary['conservation_drift']}")
    print(f"outputs in {out}")
    return 0


def cmd_verify_riemann(args):
    from .verify import exact_riemann, shock_tube_study

    ok = True
    cases = ("sod", "test2") if args.case == "both" else (args.case,)
    for case in cases:
        flux = args.flux or ("roe" if case == "sod" else "kfvs")
        from .config import SHOCK_TUBES

        sol = exact_riemann(*SHOCK_TUBES[case])
        print(f"{case}: exact p* = {sol.p_star:.6f}, u* = {sol.u_star:.6f}")
        for recon in args.schemes:
            t0 = time.perf_counter()
            try:
                r = shock_tube_study(case, recon, True, flux, tuple(args.cells))
            except VcfvError as exc:
                print(f"  {recon:7s} limited + {flux}: FAIL ({exc})")
                ok = False
                continue
            dt = time.perf_counter() - t0
            if case == "sod":
                good = r.l1_density <= SOD_L1 and r.overshoot <= SOD_OVERSHOOT
                detail = f"L1(rho) {r.l1_density:.5f} (<= {SOD_L1}), overshoot {r.overshoot:.2e} (<= {SOD_OVERSHOOT})"
            else:
                good = r.min_density > 0 and r.min_pressure > 0
                detail = f"min rho {r.min_density:.3e}, min p {r.min_pressure:.3e} over {r.steps} steps"
            ok &= good
            print(f"  {recon:7s} limited + {flux}: {_verdict(good)}  {detail}  [{dt:.1f} s]")
    return 0 if ok else 1


def cmd_verify_bounds(args):
    from .verify import quadratic_bound_audit

    audit = quadratic_bound_audit(args.dim, args.trials, args.seed)
    ok = audit.passed(BOUND_SLACK)
    print(audit)
    print(_verdict(ok))
    return 0 if ok else 1


def cmd_verify_convergence(args):
    from .verify import convergence_study

    ok = True
    for recon in args.schemes:
        res = convergence_study(tuple(args.levels), recon, interpolation=args.interpolation)
        if recon == "first_order":
            good = FIRST_ORDER_RANGE[0] <= res.order <= FIRST_ORDER_RANGE[1]
            want = f"in [{FIRST_ORDER_RANGE[0]}, {FIRST_ORDER_RANGE[1]}]"
        else:
            good = res.order >= ORDER_MIN
            want = f">= {ORDER_MIN}"
        ok &= good
        print(f"{recon}: observed order {res.order:.3f} ({want}) {_verdict(good)}")
        print(res.csv(), end="")
    return 0 if ok else 1


def cmd_verify_blast(args):
    from .verify import blast_study

    res = blast_study(
        cells=args.cells, t_end=args.t_end, snapshots=args.snapshots, cfl=args.cfl, fixed_dt=args.fixed_dt
    )
    print(f"{res.n_cells} tetrahedra, {res.steps} steps")
    fit = res.fit
    for t, R in zip(fit.times, fit.radii):
        print(f"t = {t:.4e}  R = {R:.3f}")
    ok = fit.within(*TAYLOR_RANGE)
    print(f"slope {fit.slope:.4f} (theory 0.4, accept {TAYLOR_RANGE}) {_verdict(ok)} {fit.message}")
    return 0 if ok else 1


def cmd_mesh_info(args):
    from .mesh import validate_mesh

    mesh = _mesh_from_args(args)
    print(mesh)
    print(validate_mesh(mesh))
    return 0


def cmd_interp_report(args):
    from .interp import InterpDiagnostics, build_all_stencils

    mesh = _mesh_from_args(args)
    rows = []
    for scheme in args.schemes:
        _, diag = build_all_stencils(mesh, scheme)
        rows.append(diag)
        if not args.csv:
            print(diag)
            print()
    if args.csv:
        print(InterpDiagnostics.CSV_HEADER)
        for d in rows:
            print(d.csv_row())
    return 0


# -- entry point ----------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="vcfv", description="Vertex-centroid finite volume solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a case from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--output", help="output directory (overrides the config)")
    r.add_argument("--seed", type=int, help="mesh seed (overrides the config)")
    r.set_defaults(func=cmd_run)

    r = sub.add_parser("verify-riemann", help="shock tubes against the exact Riemann solution")
    r.add_argument("--case", choices=("sod", "test2", "both"), default="sod")
    r.add_argument("--schemes", nargs="+", default=["frink", "upwind"], choices=("frink", "upwind", "jameson"))
    r.add_argument("--flux", choices=("roe", "kfvs"))
    r.add_argument("--cells", type=int, nargs="+", default=[100, 4, 4])
    r.set_defaults(func=cmd_verify_riemann)

    r = sub.add_parser("verify-bounds", help="audit face errors against the quadratic bounds")
    r.add_argument("--dim", type=int, choices=(2, 3), default=2)
    r.add_argument("--trials", type=int, default=10_000)
    r.add_argument("--seed", type=int, default=0)
    r.set_defaults(func=cmd_verify_bounds)

    r = sub.add_parser("verify-convergence", help="observed order on periodic advection")
    r.add_argument("--levels", type=int, nargs="+", default=[16, 32, 64])
    r.add_argument("--schemes", nargs="+", default=["frink", "upwind", "first_order"])
    r.add_argument("--interpolation", default="consistent_shepard")
    r.set_defaults(func=cmd_verify_convergence)

    r = sub.add_parser("verify-blast", help="coarse blast wave and the radius-time fit (slow)")
    r.add_argument("--cells", type=int, default=26, help="cells per side of the cube (6 tets each)")
    r.add_argument("--t-end", type=float, default=7e-4)
    r.add_argument("--snapshots", type=int, default=8)
    r.add_argument("--cfl", type=float, default=0.4)
    r.add_argument("--fixed-dt", type=float, help="constant time step instead of the CFL-based one")
    r.set_defaults(func=cmd_verify_blast)

    r = sub.add_parser("mesh-info", help="mesh statistics and quality")
    _add_mesh_args(r)
    r.set_defaults(func=cmd_mesh_info)

    r = sub.add_parser("interp-report", help="interpolation weight diagnostics")
    _add_mesh_args(r)
    r.add_argument("--schemes", nargs="+", default=["pseudo_laplacian", "consistent_shepard"])
    r.add_argument("--csv", action="store_true")
    r.set_defaults(func=cmd_interp_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    np.seterr(all="ignore") if not args.verbose else None
    try:
        return args.func(args)
    except VcfvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
