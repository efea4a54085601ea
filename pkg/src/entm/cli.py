"""Command-line front end: ``entm <subcommand>``.

Exit status: 0 success, 1 violation or validation failure, 2 usage error.
ENTM_SEED sets the default seed for commands that take ``--seed``.
"""

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from . import extremal, scan
from .errors import EntmError, InvalidState, ParseError
from .qcore import check_density, load_state

SCAN_HELP = """\
CSV columns (header always written):
  rank             numerical rank of the generated state (tol 1e-9)
  seed             per-record seed; regenerates that row alone
  method           direct | inverse
  negativity       -2 x min eigenvalue of the partial transpose
  concurrence      Wootters concurrence
  ree              relative entropy of entanglement (bits)
  x                mixing distance along -G (inverse only, empty otherwise)
  solver_restarts  restarts used by the numerical REE (direct only)
  status           ok, or the failure that flagged the record
Numbers are written with 12 significant digits.
"""


def _default_seed():
    raw = os.environ.get("ENTM_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"ENTM_SEED must be an integer, got {raw!r}")


def _emit(obj):
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None


def cmd_measures(args):
    rho = check_density(load_state(args.state))
    _emit(scan.measures_report(rho, restarts=args.restarts, seed=args.seed))
    return 0


def cmd_family(args):
    _emit(scan.family_report(scan.parse_family(_read_json(args.point))))
    return 0


def cmd_curves(args):
    t0 = time.perf_counter()
    table = scan.curve_table(args.grid)
    _write(args.out, table.to_csv())
    logging.info("curves: %d points in %.2fs", args.grid, time.perf_counter() - t0)
    return 0


def cmd_crossing(args):
    n, e = scan.crossing()
    _emit({"N_Y": n, "E": e})
    return 0


def cmd_maxgap(args):
    n, gap = scan.maxgap()
    _emit({"N_prime": n, "gap": gap})
    return 0


def cmd_scan(args):
    records = scan.scan(args.rank, args.n, args.method, seed=args.seed,
                        restarts=args.restarts, workers=args.workers)
    _write(args.out, scan.records_to_csv(records))
    failed = sum(r.status != "ok" for r in records)
    if failed:
        logging.warning("%d of %d records flagged", failed, len(records))
    return 0


def cmd_bounds(args):
    with open(args.records) as fh:
        records = scan.read_records(fh.read())
    rep = scan.check_bounds(records, tol=args.tol)
    _emit(rep.to_json())
    return 1 if rep.violations else 0


def cmd_extremal(args):
    rho = check_density(load_state(args.rho))
    sigma = check_density(load_state(args.sigma))
    rep = extremal.check_extremal_rank2(rho, sigma, ree=args.ree, restarts=args.restarts,
                                        seed=args.seed)
    _emit(rep.to_json())
    return 0


def cmd_distill(args):
    _emit(scan.distill_report(args.p))
    return 0


def build_parser():
    seed = _default_seed()
    p = argparse.ArgumentParser(prog="entm", description="Two-qubit REE versus negativity toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("measures", help="negativity, concurrence, EoF and numerical REE of a state file")
    s.add_argument("state", help='JSON file {"re": 4x4, "im": 4x4}')
    s.add_argument("--restarts", type=int, default=scan.DEFAULT_RESTARTS)
    s.add_argument("--seed", type=int, default=seed)
    s.set_defaults(func=cmd_measures)

    s = sub.add_parser("family", help="closed-form REE and CSS of a family point")
    s.add_argument("point", help='JSON file {"family": "Horodecki", "params": {"p": 0.6}}')
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("curves", help="E_P, E_H, E_BD, E_OGH and p_opt on a negativity grid")
    s.add_argument("--grid", type=int, default=scan.DEFAULT_GRID)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_curves)

    s = sub.add_parser("crossing", help="negativity where the Horodecki and pure curves cross")
    s.set_defaults(func=cmd_crossing)

    s = sub.add_parser("maxgap", help="largest excess of the Horodecki curve over the pure one")
    s.set_defaults(func=cmd_maxgap)

    s = sub.add_parser("scan", help="Monte-Carlo (negativity, REE) samples as CSV",
                       epilog=SCAN_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--rank", type=int, choices=(2, 3, 4), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--method", choices=("direct", "inverse"), default="inverse")
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--restarts", type=int, default=scan.DEFAULT_RESTARTS)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("bounds", help="count records outside E_BD(N) <= E_R <= E_OGH(N)")
    s.add_argument("records")
    s.add_argument("--tol", type=float, default=scan.BAND_TOL)
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("extremal", help="rank-2 Lagrange extremality residuals for (rho, sigma)")
    s.add_argument("rho")
    s.add_argument("sigma")
    s.add_argument("--ree", type=float, default=None,
                   help="reference REE of rho (default: numerical estimate)")
    s.add_argument("--restarts", type=int, default=4)
    s.add_argument("--seed", type=int, default=seed)
    s.set_defaults(func=cmd_extremal)

    s = sub.add_parser("distill", help="distillation bound p^2/4 of a Horodecki state vs pure REE")
    s.add_argument("--p", type=float, default=0.37)
    s.set_defaults(func=cmd_distill)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InvalidState, ParseError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except EntmError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
