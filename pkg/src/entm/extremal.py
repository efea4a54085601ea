"""Lagrange-multiplier extremality checks for rank-2 states.

For rho = l1|e1><e1| + l2|e2><e2| with candidate CSS sigma and |psi> the
eigenvector of rho^T_B with the most negative eigenvalue, extremality of the
REE at fixed negativity requires

    <e1|log2 sigma|e2> = l <e1|Psi|e2>                                  (off-diagonal)
    log2 l1 - <e1|log2 sigma|e1> + l <e1|Psi|e1> = E_R - (l/2) N        (diagonal)

with Psi = (|psi><psi|)^T_B. The second diagonal equation (for e2) follows
from the first once E_R is the REE of rho.
"""

from dataclasses import asdict, dataclass
import math

import numpy as np

from .errors import DomainError, NotEntangled, RankMismatch, SupportMismatch
from .measures import ree_numeric
from .qcore import LOG_FLOOR, check_density, partial_transpose, projector

RANK_TOL = 1e-10
ZERO_TOL = 1e-9


@dataclass
class ExtremalReport:
    l: float
    residual_offdiag: float
    residual_diag: float
    lhs_rhs_zero: bool
    ree: float = math.nan

    def to_json(self):
        return {k: (bool(v) if isinstance(v, (bool, np.bool_)) else float(v))
                for k, v in asdict(self).items()}


def fix_phase(v):
    """Scale a vector so its largest-magnitude component is real and positive."""
    v = np.asarray(v, dtype=np.complex128)
    k = int(np.argmax(np.abs(v) - 1e-12 * np.arange(v.size)))
    return v * (abs(v[k]) / v[k])


def optimal_eigvec(rho):
    """(|psi>, mu): eigenvector of rho^T_B for its most negative eigenvalue mu."""
    rho = check_density(rho)
    w, v = np.linalg.eigh(partial_transpose(rho))
    if w[0] >= -1e-10:
        raise NotEntangled(f"rho^T_B has no negative eigenvalue (min {w[0]:.3g})")
    return fix_phase(v[:, 0]), float(w[0])


def _log2_sigma(sigma):
    g, u = np.linalg.eigh(sigma)
    return g, u, (u * np.log2(np.maximum(g, LOG_FLOOR))) @ u.conj().T


def check_extremal_rank2(rho, sigma, l=None, ree=None, restarts=4, seed=0):
    """Residuals of the rank-2 extremal conditions for the pair (rho, sigma).

    ``l`` defaults to the value that makes the two diagonal equations agree
    (their difference is linear in l and free of E_R and N). ``ree`` is the
    reference REE of rho entering the diagonal equation; when omitted it is
    estimated with ``ree_numeric``. Using S(rho||sigma) in its place would
    make the diagonal defect vanish identically for any sigma.
    """
    rho = check_density(rho)
    sigma = check_density(sigma)
    lam, vecs = np.linalg.eigh(rho)
    lam, vecs = lam[::-1], vecs[:, ::-1]
    if lam[1] <= RANK_TOL or lam[2] >= RANK_TOL:
        raise RankMismatch(f"rho must have rank 2, eigenvalues {np.round(lam, 12)}")
    e = np.column_stack([fix_phase(vecs[:, 0]), fix_phase(vecs[:, 1])])

    g, u, log_sigma = _log2_sigma(sigma)
    weights = np.abs(u.conj().T @ e) ** 2
    if np.any(weights[g < LOG_FLOOR] > RANK_TOL):
        raise SupportMismatch("supp(rho) is not contained in supp(sigma)")

    psi, mu = optimal_eigvec(rho)
    big_psi = partial_transpose(projector(psi))
    N = -2.0 * mu
    A = e.conj().T @ log_sigma @ e
    B = e.conj().T @ big_psi @ e
    x1 = math.log2(lam[0]) - A[0, 0].real
    x2 = math.log2(lam[1]) - A[1, 1].real
    b1, b2 = B[0, 0].real, B[1, 1].real

    if ree is None:
        ree = ree_numeric(rho, restarts=restarts, seed=seed).ree
    if l is None:
        if abs(b1 - b2) > 1e-12:
            l = (x2 - x1) / (b1 - b2)
        elif abs(b1 + 0.5 * N) > 1e-12:
            # the difference carries no information; use the e1 equation alone
            l = (ree - x1) / (b1 + 0.5 * N)
        else:
            l = 0.0
    off = abs(A[0, 1] - l * B[0, 1])
    diag = abs(x1 + l * b1 - (ree - 0.5 * l * N))
    zero = abs(A[0, 1]) < ZERO_TOL and abs(B[0, 1]) < ZERO_TOL
    return ExtremalReport(float(l), float(off), float(diag), bool(zero), float(ree))


def lagrange_l_gh(rho, ree, R1):
    """Closed-form multiplier for a generalized Horodecki state (block form ``rho``)."""
    f = math.sqrt(rho.r1 ** 2 + 4.0 * rho.y ** 2)
    if f <= rho.r1 or rho.r1 <= 0.0 or R1 <= 0.0:
        raise DomainError("multiplier undefined: need y != 0 and r1, R1 > 0")
    return 2.0 * f * (ree - math.log2(rho.r1) + math.log2(R1)) / ((f + 1.0) * (f - rho.r1))

