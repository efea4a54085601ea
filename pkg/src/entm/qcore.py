"""Two-qubit linear algebra: eigensystems, partial transpose, entropies, sampling.

States are plain ``(4, 4)`` complex numpy arrays in the computational basis
|00>, |01>, |10>, |11> (tensor index (a, b) -> 2a + b). Functions that accept
"a density matrix" validate it with :func:`check_density`.
"""

from dataclasses import dataclass
import json

import numpy as np

from . import _kernels
from .errors import BadRank, InvalidState, NotHermitian, ParseError

HERM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
LOG_FLOOR = _kernels.LOG_FLOOR
INF = float("inf")

BASIS_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in descending order and matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m):
    a = np.asarray(m, dtype=np.complex128)
    if a.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidState("matrix has non-finite entries")
    return a


def hermitian_eig(m, tol=1e-8):
    """Diagonalize a Hermitian 4x4 matrix with the Jacobi kernel.

    Raises NotHermitian when ``max|m - m^dagger| > tol``.
    """
    a = as_matrix(m)
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise NotHermitian("matrix is not Hermitian within %g" % tol)
    w, v = _kernels.jacobi_eigh(a)
    order = np.argsort(w)[::-1]
    return EigenSystem(w[order], v[:, order])


def eigvalsh(m):
    """Ascending eigenvalues, no validation (hot path)."""
    return np.linalg.eigvalsh(m)


def partial_transpose(m):
    """Transpose on the second qubit: <ab|out|cd> = <ad|m|cb>."""
    a = np.asarray(m)
    return a.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)


def check_density(m, tol=HERM_TOL):
    """Return ``m`` as a complex array or raise InvalidState naming the failed invariant."""
    a = as_matrix(m)
    if np.max(np.abs(a - a.conj().T)) > tol:
        raise InvalidState("not Hermitian")
    tr = np.trace(a)
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidState(f"trace {tr.real:.3g} differs from 1")
    lo = np.linalg.eigvalsh(a)[0]
    if lo < -PSD_TOL:
        raise InvalidState(f"not positive semidefinite (min eigenvalue {lo:.3g})")
    return a


def is_density(m):
    try:
        check_density(m)
    except InvalidState:
        return False
    return True


def projector(amp):
    v = np.asarray(amp, dtype=np.complex128).reshape(4)
    return np.outer(v, v.conj())


def check_pure(amp, tol=1e-10):
    v = np.asarray(amp, dtype=np.complex128).reshape(-1)
    if v.shape != (4,):
        raise InvalidState("pure state must have 4 amplitudes")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise InvalidState("pure state is not normalized")
    return v


def ket(label):
    """Computational basis ket, e.g. ``ket("01")``."""
    v = np.zeros(4, dtype=np.complex128)
    v[BASIS_LABELS.index(label)] = 1.0
    return v


def min_pt_eigenvalue(rho):
    return np.linalg.eigvalsh(partial_transpose(rho))[0]


def is_ppt(rho, tol=1e-9):
    return min_pt_eigenvalue(rho) >= -tol


def _xlog2x(values):
    v = values[values > LOG_FLOOR]
    return float(np.sum(v * np.log2(v)))


def von_neumann_entropy(rho):
    """Entropy in bits, with 0 log 0 = 0 (eigenvalues below 1e-12 dropped)."""
    a = check_density(rho)
    return max(0.0, -_xlog2x(np.linalg.eigvalsh(a)))


def binary_entropy(x):
    x = float(x)
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return -x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x)


def relative_entropy(rho, sigma):
    """S(rho||sigma) in bits; ``inf`` when supp(rho) is not inside supp(sigma).

    The support test flags any eigenvector of sigma with eigenvalue below
    1e-12 on which rho has weight above 1e-10.
    """
    r = check_density(rho)
    s = check_density(sigma)
    g, u = np.linalg.eigh(s)
    weights = np.real(np.einsum("ik,ij,jk->k", u.conj(), r, u))
    small = g < LOG_FLOOR
    if np.any(weights[small] > 1e-10):
        return INF
    cross = -float(np.sum(weights[~small] * np.log2(g[~small])))
    return _xlog2x(np.linalg.eigvalsh(r)) + cross


def log2m(sigma):
    """Matrix base-2 logarithm of a positive definite Hermitian matrix."""
    g, u = np.linalg.eigh(sigma)
    return (u * np.log2(np.maximum(g, LOG_FLOOR))) @ u.conj().T


def rng_for(seed, *stream):
    """Generator keyed by ``(seed, *stream)``; independent streams per key."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng([int(seed), *[int(s) for s in stream]])


def random_density(rank, seed):
    """Induced (Ginibre) measure: G G^dagger / Tr with G a 4 x rank complex Gaussian."""
    if rank not in (1, 2, 3, 4):
        raise BadRank(f"rank must be 1..4, got {rank!r}")
    rng = rng_for(seed)
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def random_pure(seed):
    rng = rng_for(seed)
    v = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    return v / np.linalg.norm(v)


def numerical_rank(rho, tol=1e-10):
    return int(np.sum(np.linalg.eigvalsh(rho) > tol))


def state_to_json(rho):
    a = np.asarray(rho, dtype=np.complex128)
    return {"re": a.real.tolist(), "im": a.imag.tolist()}


def state_from_json(obj):
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros((4, 4))), dtype=float)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"state JSON must hold 're' and 'im' 4x4 arrays: {exc}") from None
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ParseError("state JSON arrays must be 4x4")
    return re + 1j * im


def load_state(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return state_from_json(obj)


def save_state(path, rho):
    with open(path, "w") as fh:
        json.dump(state_to_json(rho), fh)
