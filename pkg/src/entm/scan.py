"""Experiment harness: REE-negativity curves, crossings, Monte-Carlo scans, band checks."""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import logging
import math

import numpy as np

from . import families as fam
from . import gh, inverse
from .errors import DomainError, EntmError, NonConvergence, ParseError
from .families import Family, FamilyPoint
from .measures import (
    DEFAULT_RESTARTS,
    concurrence,
    entanglement_of_formation,
    log_negativity,
    negativity,
    ree_numeric,
)
from .qcore import numerical_rank, random_density, relative_entropy, rng_for, state_to_json

log = logging.getLogger(__name__)

DEFAULT_GRID = 200
BAND_TOL = 1e-6
CSV_FIELDS = ("rank", "seed", "method", "negativity", "concurrence", "ree", "x",
              "solver_restarts", "status")
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def fmt(v):
    """12 significant digits; empty for missing values."""
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return "%.12g" % v


# closed-form curves

def gap_hp(N):
    return fam.ree_horodecki(N) - fam.ree_pure(N)


def crossing(lo=0.1, hi=0.9, tol=1e-10):
    """N_Y where E_H(N) = E_P(N); returns (N_Y, E)."""
    flo = gap_hp(lo)
    if flo * gap_hp(hi) > 0:
        raise DomainError("E_H - E_P does not change sign on the bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = gap_hp(mid)
        if fm * flo > 0:
            lo, flo = mid, fm
        else:
            hi = mid
    n = 0.5 * (lo + hi)
    return n, fam.ree_pure(n)


def maxgap(lo=1e-4, hi=None, tol=1e-10):
    """Location and value of max_N [E_H(N) - E_P(N)] below the crossing."""
    if hi is None:
        hi = crossing()[0]
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = gap_hp(c), gap_hp(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = gap_hp(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = gap_hp(d)
    n = 0.5 * (lo + hi)
    return n, gap_hp(n)


@dataclass
class CurveTable:
    grid: list
    e_pure: list = field(default_factory=list)
    e_horodecki: list = field(default_factory=list)
    e_bd: list = field(default_factory=list)
    e_ogh: list = field(default_factory=list)
    p_opt: list = field(default_factory=list)

    HEADER = ("N", "E_P", "E_H", "E_BD", "E_OGH", "p_opt")

    def rows(self):
        return zip(self.grid, self.e_pure, self.e_horodecki, self.e_bd, self.e_ogh, self.p_opt)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.HEADER)
        for row in self.rows():
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()


def curve_table(n_grid=DEFAULT_GRID, lo=1e-3, hi=1.0 - 1e-3):
    if n_grid < 2:
        raise DomainError("grid needs at least 2 points")
    table = CurveTable([float(n) for n in np.linspace(lo, hi, n_grid)])
    for n in table.grid:
        p, e = gh.p_opt(n)
        table.e_pure.append(fam.ree_pure(n))
        table.e_horodecki.append(fam.ree_horodecki(n))
        table.e_bd.append(fam.ree_bell_diagonal(n))
        table.e_ogh.append(e)
        table.p_opt.append(p)
    return table


class OghLookup:
    """E_OGH(N) from a precomputed grid, with exact evaluation near a decision threshold."""

    def __init__(self, n_grid=401):
        self.grid = np.linspace(0.0, 1.0, n_grid)
        self.vals = None

    def approx(self, N):
        if self.vals is None:
            inner = [gh.p_opt(n)[1] for n in self.grid[1:-1]]
            self.vals = np.array([0.0, *inner, 1.0])
        return float(np.interp(N, self.grid, self.vals))

    def exact(self, N):
        return gh.ree_ogh(N)

    def exceeds(self, N, ree, tol=BAND_TOL, margin=1e-3):
        """True if ree > E_OGH(N) + tol."""
        if ree <= self.approx(N) - margin:
            return False
        return ree > self.exact(N) + tol


def band_violation(N, ree, ogh, tol=BAND_TOL):
    """'' if E_BD(N) - tol <= ree <= E_OGH(N) + tol, else which side failed."""
    N = min(max(N, 0.0), 1.0)
    if ree < fam.ree_bell_diagonal(N) - tol:
        return "below_bd"
    if ogh.exceeds(N, ree, tol):
        return "above_ogh"
    return ""


# family evaluation

def family_state(point):
    """(rho, analytic CSS, closed-form REE) for a family point."""
    f, q = point.family, point.params
    try:
        if f == Family.PURE:
            P = q["P"]
            return fam.pure_density(P), fam.css_pure(P), fam.ree_pure(fam.pure_negativity(P))
        if f == Family.HORODECKI:
            p = q["p"]
            return (fam.horodecki_state(p), fam.css_horodecki(p),
                    fam.ree_horodecki(fam.horodecki_negativity(p)))
        if f == Family.HPRIME:
            p, N = q["p"], q["N"]
            return fam.hprime_state(p, N), fam.css_horodecki(p), fam.ree_hprime(p, N)
        if f == Family.PPRIME:
            P, N = q["P"], q["N"]
            return fam.pprime_state(P, N), fam.css_pure(P), fam.ree_pprime(P, N)
        if f == Family.BELL_DIAGONAL:
            lam = q["lambdas"]
            return (fam.bell_diagonal(lam), fam.css_bell_diagonal(lam),
                    fam.ree_bell_diagonal(fam.bell_diagonal_negativity(lam)))
        if f == Family.GEN_HORODECKI:
            p = q["p"]
            P = q["P"] if "P" in q else gh.gh_param_from_N(p, q["N"])
            sol = gh.solve_gh_css(gh.rhoz_from_gh(p, P))
            return gh.gen_horodecki(p, P), sol.sigma.matrix(), sol.ree
        if f == Family.GHPRIME:
            p, N, x = q["p"], q["N"], q["x"]
            P = gh.gh_param_from_N(p, N)
            sigma = gh.solve_gh_css(gh.rhoz_from_gh(p, P)).sigma.matrix()
            # mixing with its own CSS keeps sigma optimal
            return gh.ghprime_state(p, N, x), sigma, gh.ree_ghprime(p, N, x)
    except KeyError as exc:
        raise DomainError(f"{f.value} needs parameter {exc}") from None
    raise DomainError(f"unsupported family {f}")


def family_report(point):
    rho, sigma, ree = family_state(point)
    return {
        "family": point.family.value,
        "params": point.params,
        "negativity": negativity(rho),
        "ree_closed_form": ree,
        "relative_entropy_to_css": relative_entropy(rho, sigma),
        "state": state_to_json(rho),
        "css": state_to_json(sigma),
    }


def measures_report(rho, restarts=DEFAULT_RESTARTS, seed=0):
    pair = ree_numeric(rho, restarts=restarts, seed=seed)
    return {
        "negativity": negativity(rho),
        "log_negativity": log_negativity(rho),
        "concurrence": concurrence(rho),
        "entanglement_of_formation": entanglement_of_formation(rho),
        "ree": pair.ree,
        "ree_diagnostics": {
            "iterations": pair.iterations,
            "restarts": pair.restarts,
            "simplex_spread": pair.spread,
            "converged": pair.converged,
        },
    }


def distill_report(p=0.37, nominal_N=0.1):
    """Distillable-entanglement lower bound p^2/4 of rho_H(p) vs the pure-state REE at equal N.

    ``ree_pure_nominal`` is the pure-state REE at the rounded negativity
    ``nominal_N`` often quoted for p = 0.37.
    """
    N = fam.horodecki_negativity(p)
    bound = p * p / 4.0
    e_pure = fam.ree_pure(N)
    return {
        "p": p,
        "negativity": N,
        "ree_pure": e_pure,
        "nominal_negativity": nominal_N,
        "ree_pure_nominal": fam.ree_pure(nominal_N),
        "ree_horodecki": fam.ree_horodecki(N),
        "distillation_lower_bound": bound,
        "bound_exceeds_pure_ree": bound > e_pure,
    }


# Monte-Carlo scans

@dataclass
class ScanRecord:
    rank: int
    seed: int
    method: str
    negativity: float
    concurrence: float
    ree: float
    x: float = math.nan
    solver_restarts: int = 0
    status: str = "ok"

    def row(self):
        return [fmt(getattr(self, k)) if k not in ("method", "status") else getattr(self, k)
                for k in CSV_FIELDS]


def record_seed(seed, i):
    """Per-record seed; a row can be regenerated from it alone."""
    return int(np.random.SeedSequence([int(seed), int(i)]).generate_state(1)[0])


def direct_record(rank, rseed, restarts=DEFAULT_RESTARTS):
    rho = random_density(rank, rseed)
    n, c = negativity(rho), concurrence(rho)
    try:
        pair = ree_numeric(rho, restarts=restarts, seed=rseed)
        return ScanRecord(rank, rseed, "direct", n, c, pair.ree, math.nan, pair.restarts)
    except NonConvergence:
        return ScanRecord(rank, rseed, "direct", n, c, math.nan, math.nan, restarts,
                          "nonconvergence")


def inverse_record(rank, rseed):
    """Rank 4: x uniform in (0, x_max]. Rank 2 or 3: x = x_max, where rho loses rank."""
    try:
        b = inverse.sample_boundary(rseed)
        xm = b.x_max
        if rank == 4:
            x = xm * (1.0 - rng_for(rseed, 1).random())
        else:
            x = xm
        rho = inverse.rho_from_css(b, x)
        ree = inverse.ree_inverse(b, x)
        got = numerical_rank(rho, 1e-9)
        return ScanRecord(got, rseed, "inverse", negativity(rho), concurrence(rho), ree, x, 0)
    except EntmError as exc:
        return ScanRecord(rank, rseed, "inverse", math.nan, math.nan, math.nan, math.nan, 0,
                          type(exc).__name__)


def _one(args):
    rank, method, rseed, restarts = args
    if method == "direct":
        return direct_record(rank, rseed, restarts)
    return inverse_record(rank, rseed)


def scan(rank, n, method, seed=0, restarts=DEFAULT_RESTARTS, workers=1):
    """List of ScanRecord in index order (independent of ``workers``)."""
    if rank not in (2, 3, 4):
        raise DomainError(f"rank must be 2, 3 or 4, got {rank}")
    if method not in ("direct", "inverse"):
        raise DomainError(f"unknown method {method!r}")
    if n < 1:
        raise DomainError("n must be at least 1")
    jobs = [(rank, method, record_seed(seed, i), restarts) for i in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_one, jobs, chunksize=max(1, n // (8 * workers))))
    return [_one(j) for j in jobs]


def records_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def _num(s, cast=float):
    return math.nan if s == "" else cast(s)


def read_records(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    if tuple(rows[0]) != CSV_FIELDS:
        raise ParseError(f"unexpected header {rows[0]!r}")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_FIELDS):
            raise ParseError(f"line {k}: expected {len(CSV_FIELDS)} fields, got {len(row)}")
        try:
            out.append(ScanRecord(int(row[0]), int(row[1]), row[2], _num(row[3]), _num(row[4]),
                                  _num(row[5]), _num(row[6]), int(row[7] or 0), row[8]))
        except ValueError as exc:
            raise ParseError(f"line {k}: {exc}") from None
    return out


@dataclass
class BoundsReport:
    records: int = 0
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)

    def to_json(self):
        return {"records": self.records, "checked": self.checked, "skipped": self.skipped,
                "violations": len(self.violations), "details": self.violations[:50]}


def check_bounds(records, tol=BAND_TOL, ogh=None):
    rep = BoundsReport(records=len(records))
    if not records:
        log.warning("no records to check")
        return rep
    ogh = ogh or OghLookup()
    for r in records:
        if r.status != "ok" or math.isnan(r.ree) or math.isnan(r.negativity):
            rep.skipped += 1
            continue
        rep.checked += 1
        side = band_violation(r.negativity, r.ree, ogh, tol)
        if side:
            rep.violations.append({"seed": r.seed, "method": r.method, "negativity": r.negativity,
                                   "ree": r.ree, "side": side})
    return rep


def envelope(records, bins=20):
    """Max REE per negativity bin: list of (bin_center, max_ree, count)."""
    edges = np.linspace(0.0, 1.0, bins + 1)
    out = []
    n = np.array([r.negativity for r in records if r.status == "ok"])
    e = np.array([r.ree for r in records if r.status == "ok"])
    for a, b in zip(edges[:-1], edges[1:]):
        m = (n >= a) & (n < b)
        if m.any():
            out.append((0.5 * (a + b), float(e[m].max()), int(m.sum())))
    return out


def parse_family(obj):
    if not isinstance(obj, dict):
        raise ParseError("family JSON must be an object")
    return FamilyPoint.from_json(obj)
