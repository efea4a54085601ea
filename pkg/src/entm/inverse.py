"""States with a prescribed closest separable state.

Take a full-rank separable sigma on the PPT boundary, with |phi> spanning
the kernel of sigma^T_B. Then sigma is the CSS of every

    rho(x) = sigma - x G(sigma),    0 <= x <= x_max,

where G is built from |phi><phi|^T_B and logarithmic means of the spectrum
of sigma. The REE of rho(x) is available without any optimization, which
makes this the fast route for scanning the REE-negativity plane.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RankDeficient, SamplingExhausted
from .qcore import LOG_FLOOR, check_density, partial_transpose, projector, rng_for

FULL_RANK_TOL = 1e-8
KERNEL_TOL = 1e-9
GAP_TOL = 1e-8
DEGENERATE_TOL = 1e-12
BISECT_TOL = 1e-12
PSD_SLACK = 1e-12
MAX_ATTEMPTS = 100


@dataclass
class BoundaryCss:
    sigma: np.ndarray
    phi: np.ndarray
    g: np.ndarray
    _x_max: float | None = None

    @property
    def x_max(self):
        if self._x_max is None:
            self._x_max = x_max(self)
        return self._x_max


def log_mean_matrix(gamma):
    """(g_i - g_j)/(ln g_i - ln g_j), with g_i on (near-)degenerate pairs."""
    gi = gamma[:, None]
    gj = gamma[None, :]
    close = np.abs(gi - gj) <= DEGENERATE_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        lm = (gi - gj) / (np.log(gi) - np.log(gj))
    return np.where(close, np.broadcast_to(gi, lm.shape), lm)


def build_g(sigma, phi):
    """G(sigma) = sum_ij G_ij |i><i| (|phi><phi|)^T_B |j><j| in the eigenbasis of sigma."""
    sigma = np.asarray(sigma, dtype=np.complex128)
    gamma, u = np.linalg.eigh(sigma)
    if gamma[0] < FULL_RANK_TOL:
        raise RankDeficient(f"sigma has eigenvalue {gamma[0]:.3g} below {FULL_RANK_TOL:g}")
    phi_pt = partial_transpose(projector(phi))
    coeff = log_mean_matrix(gamma)
    g = u @ (coeff * (u.conj().T @ phi_pt @ u)) @ u.conj().T
    return 0.5 * (g + g.conj().T)


def kernel_vector(sigma):
    """Unit vector spanning the one-dimensional kernel of sigma^T_B."""
    w, v = np.linalg.eigh(partial_transpose(sigma))
    if abs(w[0]) > KERNEL_TOL:
        raise DomainError(f"sigma is not on the PPT boundary (min eig of sigma^T_B = {w[0]:.3g})")
    if w[1] <= GAP_TOL:
        raise DomainError("kernel of sigma^T_B is not one-dimensional")
    return v[:, 0]


def boundary_css(sigma):
    """Validate a boundary state and bundle it with its kernel vector and G."""
    sigma = check_density(sigma)
    sigma = 0.5 * (sigma + sigma.conj().T)
    if np.linalg.eigvalsh(sigma)[0] < FULL_RANK_TOL:
        raise RankDeficient("boundary state must be full rank")
    phi = kernel_vector(sigma)
    return BoundaryCss(sigma, phi, build_g(sigma, phi))


def _min_eig(m):
    return float(np.linalg.eigvalsh(m)[0])


def x_max(b):
    """Largest x with sigma - x G positive semidefinite (to 1e-12)."""
    lo, hi = 0.0, 1.0
    for _ in range(80):
        if _min_eig(b.sigma - hi * b.g) < -PSD_SLACK:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise DomainError("G has no positive direction; x is unbounded")
    while hi - lo > BISECT_TOL * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if _min_eig(b.sigma - mid * b.g) >= -PSD_SLACK:
            lo = mid
        else:
            hi = mid
    return lo


def _check_x(b, x):
    xm = b.x_max
    if not (-1e-15 <= x <= xm * (1.0 + 1e-12) + 1e-15):
        raise DomainError(f"x={x} outside [0, x_max={xm}]")
    return min(max(float(x), 0.0), xm)


def rho_from_css(b, x):
    x = _check_x(b, x)
    rho = b.sigma - x * b.g
    return 0.5 * (rho + rho.conj().T)


def _entropy(m):
    w = np.linalg.eigvalsh(m)
    w = w[w > LOG_FLOOR]
    return float(-np.sum(w * np.log2(w)))


def ree_inverse(b, x):
    """S(sigma) - S(rho) + x tr[(|phi><phi|)^T_B sigma log2 sigma]."""
    x = _check_x(b, x)
    rho = rho_from_css(b, x)
    gamma, u = np.linalg.eigh(b.sigma)
    slog = (u * (gamma * np.log2(gamma))) @ u.conj().T
    phi_pt = partial_transpose(projector(b.phi))
    return _entropy(b.sigma) - _entropy(rho) + x * float(np.trace(phi_pt @ slog).real)


def sample_boundary(seed):
    """Random full-rank state on the PPT boundary.

    A rank-4 Ginibre state rho0 is drawn until it is entangled; the segment
    to I/4 is then bisected for the point where sigma^T_B becomes singular.
    """
    rng = rng_for(seed)
    eye = np.eye(4) / 4
    for _ in range(MAX_ATTEMPTS):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho0 = g @ g.conj().T
        rho0 = 0.5 * (rho0 + rho0.conj().T) / np.trace(rho0).real
        if _min_eig(partial_transpose(rho0)) >= 0.0:
            continue
        lo, hi = 0.0, 1.0
        while hi - lo > BISECT_TOL:
            t = 0.5 * (lo + hi)
            if _min_eig(partial_transpose((1.0 - t) * rho0 + t * eye)) < 0.0:
                lo = t
            else:
                hi = t
        sigma = (1.0 - hi) * rho0 + hi * eye
        try:
            return boundary_css(sigma)
        except (DomainError, RankDeficient):
            continue
    raise SamplingExhausted(f"no valid boundary state in {MAX_ATTEMPTS} attempts")


def inverse_pair(seed, x_frac=None):
    """(rho, ree, x, b) from a fresh boundary state; x = x_frac * x_max (x_max if None)."""
    b = sample_boundary(seed)
    xm = b.x_max
    x = xm if x_frac is None else float(x_frac) * xm
    return rho_from_css(b, x), ree_inverse(b, x), x, b

