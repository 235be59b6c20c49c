"""Command-line entry point: ``cc4oc <subcommand> ...`` or ``python -m cc4oc``."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import harness

log = logging.getLogger("cc4oc")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _case_args(p, nx_required=False):
    p.add_argument("--case", required=True, choices=harness.CASES)
    p.add_argument("--iota", type=float, default=0.5)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--re", type=float, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--d", type=float, default=None)
    p.add_argument("--norms", choices=("nodes", "cells"), default="nodes",
                   help="average L1/L2 over nodes (default) or cells")
    p.add_argument("--linear-rtol", type=float, default=0.0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cc4oc", description="Compact fourth-order convection-diffusion "
                 "and stream function-vorticity solvers.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one case on one grid")
    _case_args(p)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--ny", type=int, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", required=True)

    p = sub.add_parser("convergence", help="spatial order study")
    _case_args(p)
    p.add_argument("--grids", type=_ints, required=True)
    p.add_argument("--dt-rule", choices=("h2", "fixed"), default="h2")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("temporal", help="temporal order study")
    _case_args(p)
    p.add_argument("--nx", type=int, required=True)
    p.add_argument("--dts", type=_floats, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("wavenumber", help="non-dimensional scheme characteristics")
    p.add_argument("--pe", type=_floats, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stability", help="max |G| over random parameter draws")
    p.add_argument("--iota", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("cavity", help="lid-driven cavity to steady state")
    p.add_argument("--re", type=int, required=True, choices=sorted(harness.CAVITY_GRID))
    p.add_argument("--steady-tol", type=float, default=1e-10)
    p.add_argument("--linear-rtol", type=float, default=0.1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("perceived", help="shear-layer perceived order from three grids")
    p.add_argument("--grids", type=_ints, default=[33, 65, 129])
    p.add_argument("--dts", type=_floats, default=[0.01, 0.005, 0.0025])
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--re", type=float, default=10000.0)
    p.add_argument("--out", default=None)
    return ap


def _overrides(ns) -> dict:
    return dict(iota=ns.iota, t_end=ns.t_end, re=ns.re, a=ns.a, c=ns.c, d=ns.d,
                norms=ns.norms, linear_rtol=ns.linear_rtol)


def _emit(ns, header, rows):
    if ns.out:
        harness.write_csv(ns.out, header, rows)
    else:
        import csv
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows([harness._fmt(v) for v in r] for r in rows)


def _dispatch(ns) -> None:
    if ns.command == "run":
        cfg = harness.RunConfig(ns.case, ns.nx, ns.ny, ns.dt, out=ns.out, **_overrides(ns))
        res = harness.run_case(cfg)
        log.info("%s finished at t=%g after %d steps (%.1f s)", ns.case, res.t,
                 res.steps, res.seconds)
    elif ns.command == "convergence":
        ov = _overrides(ns)
        if ns.dt is not None:
            ov["dt"] = ns.dt
        rows = harness.convergence(ns.case, ns.grids, ns.dt_rule, **ov)
        _emit(ns, harness.ERROR_COLUMNS, rows)
    elif ns.command == "temporal":
        rows = harness.temporal(ns.case, ns.nx, ns.dts, **_overrides(ns))
        _emit(ns, harness.ERROR_COLUMNS, rows)
    elif ns.command == "wavenumber":
        harness.write_wavenumber_csv(ns.out, ns.pe, ns.samples)
    elif ns.command == "stability":
        harness.write_stability_csv(ns.out, harness.stability_table(
            ns.iota, ns.samples, ns.n_theta, ns.seed))
    elif ns.command == "cavity":
        n = harness.CAVITY_GRID[ns.re]
        cfg = harness.RunConfig("cavity", n, dt=0.01, re=float(ns.re),
                                linear_rtol=ns.linear_rtol, out=ns.out)
        res = harness.run_case(cfg, steady_tol=ns.steady_tol)
        log.info("cavity Re=%d steady after %d steps (%.1f s)", ns.re, res.steps,
                 res.seconds)
    elif ns.command == "perceived":
        est = harness.shear_perceived_order(ns.grids, ns.dts, ns.t_end, ns.re)
        _emit(ns, ("component", "norm", "diff31", "diff32", "p"),
              [(e.component, e.norm, e.diff31, e.diff32, e.p) for e in est])


def main(argv: Optional[Sequence[str]] = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(message)s")
    try:
        _dispatch(ns)
    except Exception as err:  # one-line diagnostic for any failure
        msg = str(err).splitlines()[0] if str(err) else type(err).__name__
        print(f"cc4oc: error: {type(err).__name__}: {msg}", file=sys.stderr)
        return 1
    return 0
