"""Generalized Horodecki states p|psi_P><psi_P| + (1-p)|00><00| and their CSS.

The CSS has the block form

    sigma = R1|00><00| + R4|11><11| + [[R2, Y], [Y, R3]] on {|01>, |10>}

with Y = sqrt(R1 R4). Given the state, R2..R4 are explicit functions of R1,
so finding the CSS reduces to one root in R1 (``solve_gh_css``). The REE
maximized over p at fixed negativity defines the optimal curve E_OGH(N)
(``p_opt``, ``ree_ogh``).
"""

from dataclasses import dataclass
import logging
import math

import mpmath
import numpy as np

from . import _kernels, families
from .errors import DegenerateDelta, DomainError, NoBracket
from .families import p0, ree_horodecki, ree_pure
from .qcore import LOG_FLOOR, binary_entropy

log = logging.getLogger(__name__)

SCAN_POINTS = 400
EDGE = 1e-12
GOLDEN_TOL = 1e-8
PRESCAN = 200
ENDPOINT_TIE = 1e-8
# relative gap |r3 - r2| / (r2 + r3) below which the exact Horodecki form is used
HALF_TOL = 1e-14
# below this gap lambda_minus of sigma is lost to cancellation in doubles
MP_BAND = 1e-3
MP_DPS = 50
POLISH_TOL = 1e-11


@dataclass(frozen=True)
class RhoZ:
    """Entries of r1|00><00| + [[r2, y], [y, r3]] on {|01>, |10>}."""

    r1: float
    r2: float
    r3: float
    y: float

    def __post_init__(self):
        r = (self.r1, self.r2, self.r3)
        if min(r) < -1e-12 or abs(sum(r) - 1.0) > 1e-10:
            raise DomainError(f"r = {r} is not a probability vector")
        if self.y * self.y > self.r2 * self.r3 + 1e-12:
            raise DomainError("y^2 exceeds r2 r3, not a density matrix")

    def matrix(self):
        m = np.zeros((4, 4), dtype=np.complex128)
        m[0, 0] = self.r1
        m[1, 1] = self.r2
        m[2, 2] = self.r3
        m[1, 2] = m[2, 1] = self.y
        return m

    def is_gen_horodecki(self, tol=1e-10):
        return abs(self.y * self.y - self.r2 * self.r3) <= tol

    @property
    def negativity(self):
        return math.sqrt(self.r1 ** 2 + 4.0 * self.y ** 2) - self.r1


@dataclass(frozen=True)
class SigmaZ:
    R1: float
    R2: float
    R3: float
    R4: float
    Y: float

    def matrix(self):
        m = np.zeros((4, 4), dtype=np.complex128)
        m[0, 0] = self.R1
        m[1, 1] = self.R2
        m[2, 2] = self.R3
        m[3, 3] = self.R4
        m[1, 2] = m[2, 1] = self.Y
        return m

    def eig_block(self):
        """(lambda_minus, lambda_plus) of the {|01>, |10>} block."""
        z = math.sqrt((self.R2 - self.R3) ** 2 + 4.0 * self.Y ** 2)
        hi = self.R2 + self.R3 + z
        lo = 2.0 * (self.R2 * self.R3 - self.Y ** 2) / hi if hi > 0.0 else 0.0
        return lo, 0.5 * hi


@dataclass(frozen=True)
class GHSolution:
    rho: RhoZ
    sigma: SigmaZ
    ree: float
    x_max: float
    residual: float


def rhoz_from_gh(p, P):
    p = families._unit("p", p)
    P = families._unit("P", P)
    r2 = P * p
    r3 = (1.0 - P) * p
    return RhoZ(1.0 - p, r2, r3, math.sqrt(r2 * r3))


def gen_horodecki(p, P):
    """p|psi_P><psi_P| + (1-p)|00><00|."""
    p = families._unit("p", p)
    return p * families.pure_density(P) + (1.0 - p) * families.horodecki_state(0.0)


def gh_negativity(p, P):
    p = families._unit("p", p)
    P = families._unit("P", P)
    return math.sqrt((1.0 - p) ** 2 + 4.0 * p * p * P * (1.0 - P)) - (1.0 - p)


def gh_param_from_N(p, N):
    """Schmidt parameter P >= 1/2 giving negativity N at weight p."""
    p = families._unit("p", p)
    N = families._unit("N", N)
    lo = p0(N)
    if p < lo - 1e-12:
        raise DomainError(f"p={p} below p0(N)={lo}")
    if p == 0.0:
        return 0.5
    disc = p * p - N * N - 2.0 * N * (1.0 - p)
    return 0.5 * (p + math.sqrt(max(disc, 0.0))) / p


def _horodecki_solution(rho):
    q = 0.5 * (rho.r2 + rho.r3)
    R1 = (1.0 - q) ** 2
    R4 = q * q
    a = q * (1.0 - q)
    return R1, a, a, R4


def _mp_defect(s, r1, r2, r3):
    """Extended-precision defect along the falling branch of delta(R1) = s^2."""
    A = (3 * r1 + 1) ** 2 - 4 * r2 * r3
    B = 8 * (r1 + 1)
    C2 = 256 * r2 * r3
    E = s * s - A
    qa = C2 - B * B
    qb = -(C2 * r1 + 2 * B * E)
    disc = qb * qb + 4 * qa * E * E
    if disc < 0:
        return None
    R1 = (-qb - mpmath.sqrt(disc)) / (2 * qa)
    R2 = (1 + 3 * r1 + 2 * r2 - 4 * R1 - s) / 4
    R4 = R1 - r1
    R3 = 1 - R1 - R2 - R4
    if R1 < r1 or R2 <= 0 or R3 <= 0 or E + B * R1 < 0:
        return None
    Y2 = R1 * R4
    z = mpmath.sqrt((R2 - R3) ** 2 + 4 * Y2)
    hi = R2 + R3 + z
    lo = 4 * (R2 * R3 - Y2) / hi
    if z <= 0 or lo <= 0:
        return None
    L = mpmath.log(lo / hi)
    f = R2 + 2 * R4 / z ** 2 * (R2 * R2 - R2 * R3 + 2 * Y2) + 2 * R4 / (L * z) * (R2 - R3) - r2
    return f, R1, R2


def _mp_bisect(a, fa, b, r1, r2, r3, s0):
    tol = s0 * mpmath.mpf(10) ** (-(MP_DPS - 12))
    for _ in range(400):
        if b - a <= tol:
            break
        c = (a + b) / 2
        oc = _mp_defect(c, r1, r2, r3)
        if oc is None:
            break
        if fa * oc[0] <= 0:
            b = c
        else:
            a, fa = c, oc[0]
    out = _mp_defect((a + b) / 2, r1, r2, r3)
    if out is None:
        return None
    f, R1, R2 = out
    return float(R1), float(R2), float(abs(f))


def _root_mp(r1, r2, r3, guess=None, n=120):
    """Extended-precision (R1, R2, residual) on the falling branch, or None.

    With ``guess`` (a double-precision s) only a small bracket around it is
    searched; otherwise the branch is scanned from s = 0.
    """
    with mpmath.workdps(MP_DPS):
        # unit trace taken exactly, so delta at R1 = r1 is (r3 - r2)^2 >= 0
        r2, r3 = mpmath.mpf(r2), mpmath.mpf(r3)
        r1 = 1 - r2 - r3
        d0 = (3 * r1 + 1) ** 2 - 4 * r2 * r3 - 8 * r1 * (r1 + 1)
        if d0 <= 0:
            return None
        s0 = mpmath.sqrt(d0)
        if guess is not None:
            g = mpmath.mpf(guess)
            h = s0 * mpmath.mpf("1e-9")
            for _ in range(30):
                a, b = max(g - h, mpmath.mpf(0)), min(g + h, s0)
                fa, fb = _mp_defect(a, r1, r2, r3), _mp_defect(b, r1, r2, r3)
                if fa is not None and fb is not None and fa[0] * fb[0] <= 0:
                    return _mp_bisect(a, fa[0], b, r1, r2, r3, s0)
                h *= 4
            return None
        ts = sorted(set([mpmath.mpf(10) ** (-30 + 30 * mpmath.mpf(i) / (n - 1)) for i in range(n)]
                        + [mpmath.mpf(i) / (n - 1) for i in range(1, n)]))
        prev = None
        for t in ts:
            out = _mp_defect(t * s0, r1, r2, r3)
            if out is None:
                prev = None
                continue
            if prev is not None and prev[1] * out[0] <= 0:
                return _mp_bisect(prev[0], prev[1], t * s0, r1, r2, r3, s0)
            prev = (t * s0, out[0])
    return None


def _root(r1, r2, r3, polish=True):
    """(R1, R2, residual) solving the CSS equation, r2 <= r3 orientation."""
    if r3 - r2 <= MP_BAND * (r2 + r3):
        out = _root_mp(r1, r2, r3)
        if out is not None:
            return out
    s = _kernels.gh_root_s(r1, r2, r3, SCAN_POINTS)
    if math.isfinite(s):
        R1 = _kernels.gh_R1_of_s(s, r1, r2, r3)
        R2 = 0.25 * (1.0 + 3.0 * r1 + 2.0 * r2 - 4.0 * R1 - s)
        res = abs(_kernels.gh_defect(R1, R2, r1, r2))
        if polish and not res <= POLISH_TOL:
            out = _root_mp(r1, r2, r3, guess=s)
            if out is not None and not out[2] > res:
                return out
        if math.isfinite(res):
            return R1, R2, res
    # roots on the rising side of delta(R1), close to R1 = r1
    R1 = _kernels.gh_root(r1, r2, r3, SCAN_POINTS)
    if not math.isfinite(R1):
        raise NoBracket(f"no sign change of the CSS equation for r=({r1}, {r2}, {r3})")
    R2, _, _, delta = _kernels.gh_sigma(R1, r1, r2, r3)
    if not math.isfinite(R2):
        raise DegenerateDelta(f"delta={delta} at the root")
    return R1, R2, abs(_kernels.gh_defect(R1, R2, r1, r2))


def solve_gh_css(rho, polish=True):
    """CSS of a generalized Horodecki state given in block form.

    Where the double-precision defect stays above 1e-11 (small p, or r2
    close to r3) the root is refined in extended precision unless
    ``polish`` is off; the REE is insensitive to that refinement.
    """
    if not rho.is_gen_horodecki():
        raise DomainError("solve_gh_css needs y^2 = r2 r3")
    r1 = rho.r1
    swapped = rho.r2 > rho.r3
    r2, r3 = (rho.r3, rho.r2) if swapped else (rho.r2, rho.r3)
    if r1 <= EDGE:
        # pure state: sigma is the dephased state
        sig = SigmaZ(0.0, rho.r2, rho.r3, 0.0, 0.0)
        ree = binary_entropy(rho.r2 / max(rho.r2 + rho.r3, EDGE))
        return GHSolution(rho, sig, ree, 2.0, 0.0)
    if r3 - r2 <= HALF_TOL * (r2 + r3):
        R1, R2, R3, R4 = _horodecki_solution(rho)
        residual = 0.0
    else:
        R1, R2, residual = _root(r1, r2, r3, polish)
        R4 = R1 - r1
        R3 = 1.0 - R1 - R2 - R4
    if swapped:
        R2, R3 = R3, R2
    sig = SigmaZ(R1, R2, R3, R4, math.sqrt(R1 * R4))
    return GHSolution(rho, sig, ree_gh(rho, sig), (R1 + R4) / R1, residual)


def ree_gh(rho, sigma):
    """Closed-form S(rho||sigma) for the block-structured pair."""
    lm, lp = sigma.eig_block()
    out = -binary_entropy(rho.r1)
    if rho.r1 > 0.0:
        out -= rho.r1 * math.log2(sigma.R1)
    s2, s3 = math.sqrt(rho.r2), math.sqrt(rho.r3)
    for lam in (lm, lp):
        a = lam - sigma.R3
        nrm = a * a + sigma.Y ** 2
        if nrm <= 0.0:
            # diagonal block: eigenvector is |01> or |10>
            f2 = rho.r2 if abs(lam - sigma.R2) <= abs(lam - sigma.R3) else rho.r3
        else:
            f2 = (a * s2 + sigma.Y * s3) ** 2 / nrm
        if lam < LOG_FLOOR:
            # same support convention as relative_entropy
            if f2 > 1e-10:
                return math.inf
            continue
        out -= f2 * math.log2(lam)
    return out


def ree_gh_pN(p, N):
    """REE of the generalized Horodecki state with weight p and negativity N."""
    N = families._unit("N", N)
    if N <= 0.0:
        return 0.0
    p = families._unit("p", p)
    if p >= 1.0 - 1e-13:
        return ree_pure(N)
    P = gh_param_from_N(p, N)
    if P - 0.5 <= HALF_TOL:
        return ree_horodecki(N)
    return solve_gh_css(rhoz_from_gh(p, P), polish=False).ree


def gh_css_matrix(p, P):
    return solve_gh_css(rhoz_from_gh(p, P)).sigma.matrix()


def ghprime_state(p, N, x):
    """(1-x) rho_GH + x sigma_GH at weight p and negativity N."""
    x = families._unit("x", x)
    P = gh_param_from_N(p, N)
    rho = gen_horodecki(p, P)
    sol = solve_gh_css(rhoz_from_gh(p, P))
    return (1.0 - x) * rho + x * sol.sigma.matrix()


def _block_eig(a, b, c):
    """Eigenpairs of [[a, b], [b, c]] as [(lam, (u, v)), ...], real symmetric."""
    z = math.hypot(a - c, 2.0 * b)
    out = []
    for lam in (0.5 * (a + c - z), 0.5 * (a + c + z)):
        u, v = (b, lam - a) if abs(lam - a) >= abs(lam - c) else (lam - c, b)
        n = math.hypot(u, v)
        out.append((lam, (u / n, v / n) if n > 0.0 else ((1.0, 0.0) if lam == a else (0.0, 1.0))))
    return out


def ree_ghprime(p, N, x):
    """S(rho_x||sigma_GH) for rho_x = (1-x) rho_GH + x sigma_GH from 2x2 blocks."""
    x = families._unit("x", x)
    P = gh_param_from_N(p, N)
    rho = rhoz_from_gh(p, P)
    sig = solve_gh_css(rho).sigma
    d0 = (1.0 - x) * rho.r1 + x * sig.R1
    d3 = x * sig.R4
    a = (1.0 - x) * rho.r2 + x * sig.R2
    c = (1.0 - x) * rho.r3 + x * sig.R3
    b = (1.0 - x) * rho.y + x * sig.Y
    out = 0.0
    for w in (d0, d3, *(lam for lam, _ in _block_eig(a, b, c))):
        if w > LOG_FLOOR:
            out += w * math.log2(w)
    if d0 > 0.0:
        out -= d0 * math.log2(sig.R1)
    if d3 > 0.0:
        out -= d3 * math.log2(sig.R4)
    for lam, (u, v) in _block_eig(sig.R2, sig.Y, sig.R3):
        f = a * u * u + 2.0 * b * u * v + c * v * v
        if lam < LOG_FLOOR:
            if f > 1e-10:
                return math.inf
            continue
        out -= f * math.log2(lam)
    return out


def _golden_max(f, a, b, tol):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def p_opt(N, prescan=PRESCAN, tol=GOLDEN_TOL):
    """Weight p in [p0(N), 1] maximizing the REE at fixed N; returns (p, E_OGH(N))."""
    N = float(N)
    if not 0.0 < N < 1.0:
        raise DomainError(f"p_opt needs 0 < N < 1, got {N}")
    lo = p0(N)
    grid = np.linspace(lo, 1.0, prescan)
    # p0(N) is the Horodecki point P = 1/2
    vals = np.array([ree_horodecki(N)] + [ree_gh_pN(p, N) for p in grid[1:]])
    i = int(np.argmax(vals))
    interior = (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    peaks = int(np.count_nonzero(interior))
    if peaks > 1:
        log.warning("p_opt(N=%g): %d local maxima on the prescan grid", N, peaks)
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, prescan - 1)]
    p, e = _golden_max(lambda t: ree_gh_pN(t, N), a, b, tol)
    # endpoints win near-ties (solver noise ~1e-9 as r1 -> 0) so p = 1 is reported exactly
    for k in (i, 0, prescan - 1):
        ec = vals[k]
        if ec > e or (k in (0, prescan - 1) and ec >= e - ENDPOINT_TIE):
            p, e = grid[k], ec
    return float(p), float(e)


def ree_ogh(N):
    """E_OGH(N), the REE of the optimal generalized Horodecki state (0 at N = 0)."""
    if N <= 0.0:
        return 0.0
    if N >= 1.0:
        return 1.0
    return p_opt(N)[1]


def p_opt_approx(N):
    """Quadratic fit 1/3 + 8N/5 - 7N^2/11, valid on [0, 0.527]."""
    if not -1e-12 <= N <= 0.527 + 1e-12:
        raise DomainError(f"approximation valid for 0 <= N <= 0.527, got {N}")
    return 1.0 / 3.0 + 1.6 * N - 7.0 / 11.0 * N * N
