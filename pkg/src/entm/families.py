"""Parametric two-qubit families with known closest separable states and closed-form REE.

Negativity is written N throughout. The mixed families here are built by
mixing an entangled state with its own closest separable state, which keeps
that separable state optimal for the whole mixture.
"""

from dataclasses import dataclass, field
import enum
import math

import numpy as np

from .errors import DomainError
from .qcore import binary_entropy, ket, projector

SQRT_HALF = math.sqrt(0.5)
PSI_PLUS = np.array([0.0, SQRT_HALF, SQRT_HALF, 0.0], dtype=np.complex128)
PSI_MINUS = np.array([0.0, SQRT_HALF, -SQRT_HALF, 0.0], dtype=np.complex128)

# |beta_{2j+k}> = (|0,k> + (-1)^j |1,1-k>)/sqrt2
BELL_BASIS = np.array([
    [SQRT_HALF, 0, 0, SQRT_HALF],
    [0, SQRT_HALF, SQRT_HALF, 0],
    [SQRT_HALF, 0, 0, -SQRT_HALF],
    [0, SQRT_HALF, -SQRT_HALF, 0],
], dtype=np.complex128)

_EPS = 1e-12


class Family(str, enum.Enum):
    PURE = "Pure"
    HORODECKI = "Horodecki"
    HPRIME = "HPrime"
    PPRIME = "PPrime"
    BELL_DIAGONAL = "BellDiagonal"
    GEN_HORODECKI = "GenHorodecki"
    GHPRIME = "GHPrime"


@dataclass
class FamilyPoint:
    family: Family
    params: dict = field(default_factory=dict)

    def to_json(self):
        return {"family": self.family.value, "params": dict(self.params)}

    @classmethod
    def from_json(cls, obj):
        try:
            fam = Family(obj["family"])
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"unknown family in {obj!r}") from exc
        params = {k: v for k, v in dict(obj.get("params", {})).items()}
        return cls(fam, params)


def _unit(name, value):
    if not (-_EPS <= value <= 1.0 + _EPS):
        raise DomainError(f"{name}={value!r} outside [0, 1]")
    return min(max(float(value), 0.0), 1.0)


def _xlog2(a, b=None):
    """a log2(a / b) with the 0 log 0 = 0 convention (b defaults to 1)."""
    if a <= _EPS:
        return 0.0
    if b is None:
        return a * math.log2(a)
    return a * math.log2(a / max(b, _EPS))


def p0(N):
    """Smallest mixing weight p for which a Horodecki-type state reaches negativity N."""
    N = _unit("N", N)
    return math.sqrt(2.0 * N * (1.0 + N)) - N


# pure states

def pure_state(P):
    """sqrt(P)|01> + sqrt(1-P)|10>."""
    P = _unit("P", P)
    return np.sqrt(P) * ket("01") + np.sqrt(1.0 - P) * ket("10")


def pure_density(P):
    return projector(pure_state(P))


def pure_negativity(P):
    P = _unit("P", P)
    return 2.0 * math.sqrt(P * (1.0 - P))


def schmidt_bounds(N):
    """(P_minus, P_plus): Schmidt parameters of the pure states with negativity N."""
    N = _unit("N", N)
    s = math.sqrt(max(0.0, 1.0 - N * N))
    return 0.5 * (1.0 - s), 0.5 * (1.0 + s)


def css_pure(P):
    """Dephased state P|01><01| + (1-P)|10><10|."""
    P = _unit("P", P)
    return P * projector(ket("01")) + (1.0 - P) * projector(ket("10"))


def ree_pure(N):
    N = _unit("N", N)
    return binary_entropy(0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - N * N))))


# Horodecki states

def horodecki_state(p):
    """p|psi+><psi+| + (1-p)|00><00|."""
    p = _unit("p", p)
    return p * projector(PSI_PLUS) + (1.0 - p) * projector(ket("00"))


def horodecki_negativity(p):
    p = _unit("p", p)
    return math.sqrt((1.0 - p) ** 2 + p * p) - (1.0 - p)


def ree_horodecki(N):
    p = p0(N)
    return (p - 2.0) * math.log2(1.0 - p / 2.0) + _xlog2(1.0 - p)


def css_horodecki(p):
    """(1-q)^2|00><00| + q^2|11><11| + 2q(1-q)|psi+><psi+| with q = p/2."""
    q = _unit("p", p) / 2.0
    return ((1.0 - q) ** 2 * projector(ket("00")) + q * q * projector(ket("11"))
            + 2.0 * q * (1.0 - q) * projector(PSI_PLUS))


def css_horodecki_as_printed(p):
    """Variant with the literal (-1)^(j-k) phase, which aligns the block with psi-.

    Kept only so the sign reading can be compared numerically.
    """
    q = _unit("p", p) / 2.0
    return ((1.0 - q) ** 2 * projector(ket("00")) + q * q * projector(ket("11"))
            + 2.0 * q * (1.0 - q) * projector(PSI_MINUS))


# Horodecki states mixed with their CSS

def _check_hprime(p, N):
    N = _unit("N", N)
    p = _unit("p", p)
    lo = p0(N)
    if p < lo - 1e-12:
        raise DomainError(f"p={p} below p0(N)={lo}")
    return max(p, lo), N


def hprime_weight(p, N):
    p, N = _check_hprime(p, N)
    x = ((N + p) ** 2 - 2.0 * N * (1.0 + N)) / (p * p * (1.0 + N))
    return min(max(x, 0.0), 1.0)


def hprime_state(p, N):
    p, N = _check_hprime(p, N)
    x = hprime_weight(p, N)
    return (1.0 - x) * horodecki_state(p) + x * css_horodecki(p)


def ree_hprime(p, N):
    p, N = _check_hprime(p, N)
    x = hprime_weight(p, N)
    q = p / 2.0
    y1 = 1.0 - q * x
    y2 = 1.0 - 2.0 * q + q * q * x
    return q * q * _xlog2(x) + 2.0 * q * _xlog2(y1, 1.0 - q) + _xlog2(y2, (1.0 - q) ** 2)


# pure states mixed with their CSS

def _check_pprime(P, N):
    N = _unit("N", N)
    P = _unit("P", P)
    lo, hi = schmidt_bounds(N)
    if P < lo - 1e-12 or P > hi + 1e-12:
        raise DomainError(f"P={P} outside [{lo}, {hi}] for N={N}")
    return min(max(P, lo), hi), N


def pprime_weight(P, N):
    P, N = _check_pprime(P, N)
    denom = 2.0 * math.sqrt(P * (1.0 - P))
    if denom <= 0.0:
        return 1.0
    return min(max(1.0 - N / denom, 0.0), 1.0)


def pprime_state(P, N):
    P, N = _check_pprime(P, N)
    x = pprime_weight(P, N)
    return (1.0 - x) * pure_density(P) + x * css_pure(P)


def ree_pprime(P, N):
    P, N = _check_pprime(P, N)
    if N <= _EPS:
        return 0.0
    z = 2.0 * P * (1.0 - P) - 0.5 * N * N
    root = math.sqrt(max(0.0, 1.0 - 2.0 * z))
    ym, yp = 1.0 - root, 1.0 + root
    out = binary_entropy(P)
    if ym > _EPS:
        out -= (z - P * ym) / (2.0 * P - yp) * math.log2(ym / 2.0)
    out -= (z - P * yp) / (2.0 * P - ym) * math.log2(yp / 2.0)
    return out


# Bell-diagonal states

def bell_diagonal(lambdas):
    lam = np.asarray(lambdas, dtype=float).reshape(-1)
    if lam.shape != (4,) or np.any(lam < -_EPS) or abs(lam.sum() - 1.0) > 1e-10:
        raise DomainError(f"Bell weights must be 4 nonnegative reals summing to 1, got {lambdas!r}")
    lam = np.clip(lam, 0.0, None)
    return (BELL_BASIS.T * lam) @ BELL_BASIS.conj()


def bell_diagonal_negativity(lambdas):
    return max(0.0, 2.0 * float(np.max(lambdas)) - 1.0)


def ree_bell_diagonal(N):
    N = _unit("N", N)
    return 1.0 - binary_entropy(0.5 * (1.0 + N))


def css_bell_diagonal(lambdas):
    """CSS of a Bell-diagonal state: top weight lowered to 1/2, the rest rescaled."""
    lam = np.asarray(lambdas, dtype=float)
    k = int(np.argmax(lam))
    if lam[k] <= 0.5:
        return bell_diagonal(lam)
    rest = np.delete(lam, k)
    new = np.empty(4)
    new[k] = 0.5
    if rest.sum() > 0:
        new[np.arange(4) != k] = 0.5 * rest / rest.sum()
    else:
        new[np.arange(4) != k] = 0.5 / 3.0
    return bell_diagonal(new)
