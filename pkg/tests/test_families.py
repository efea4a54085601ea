import json
import math

import numpy as np
import pytest

from entm import families as fam
from entm.errors import DomainError
from entm.measures import negativity, ree_numeric
from entm.qcore import binary_entropy, ket, projector, relative_entropy

from conftest import oracle_negativity


def h2(x):
    return binary_entropy(x)


def test_pure_state():
    assert np.allclose(fam.pure_state(0.5), fam.PSI_PLUS)
    assert np.allclose(fam.pure_state(0.0), ket("10"))
    assert abs(negativity(fam.pure_density(0.5)) - 1) < 1e-12
    assert negativity(fam.pure_density(0.0)) < 1e-12
    n = oracle_negativity(fam.pure_density(0.25))
    assert abs(n - 2 * math.sqrt(0.1875)) < 1e-12
    assert abs(n - 0.866025) < 1e-6
    with pytest.raises(DomainError):
        fam.pure_state(1.2)


def test_ree_pure():
    assert abs(fam.ree_pure(1.0) - 1) < 1e-15
    assert fam.ree_pure(0.0) == 0.0
    assert round(fam.ree_pure(0.1), 3) == 0.025
    with pytest.raises(DomainError):
        fam.ree_pure(-0.1)


def test_horodecki_state():
    assert np.allclose(fam.horodecki_state(0.0), projector(ket("00")))
    assert np.allclose(fam.horodecki_state(1.0), projector(fam.PSI_PLUS))
    rho = fam.horodecki_state(0.37)
    assert abs(fam.horodecki_negativity(0.37) - oracle_negativity(rho)) < 1e-12
    assert round(oracle_negativity(rho), 4) == 0.1006


def test_ree_horodecki():
    assert fam.ree_horodecki(0.0) == 0.0
    assert round(fam.ree_horodecki(0.3770), 4) == 0.2279
    n = 0.01
    assert abs(fam.ree_horodecki(n) - n * (1 - math.sqrt(n / 2)) / math.log(4)) < 2e-4


def test_css_horodecki():
    assert np.allclose(fam.css_horodecki(0.0), projector(ket("00")))
    for p in (0.1, 0.3, 0.6, 0.9, 1.0):
        sigma = fam.css_horodecki(p)
        w = np.linalg.eigvalsh(sigma.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4))
        assert abs(w[0]) < 1e-10
    for p in (0.3, 0.6, 0.9):
        rho = fam.horodecki_state(p)
        e = fam.ree_horodecki(fam.horodecki_negativity(p))
        assert abs(relative_entropy(rho, fam.css_horodecki(p)) - e) < 1e-9


def test_css_horodecki_sign_variants():
    # the psi- aligned block of the printed phase is far worse than the psi+ reading
    for p in (0.3, 0.6, 0.9):
        rho = fam.horodecki_state(p)
        good = relative_entropy(rho, fam.css_horodecki(p))
        bad = relative_entropy(rho, fam.css_horodecki_as_printed(p))
        assert good < bad


def test_css_horodecki_matches_minimizer():
    rho = fam.horodecki_state(0.6)
    sigma = ree_numeric(rho, restarts=4).sigma
    dist = 0.5 * np.abs(np.linalg.eigvalsh(sigma - fam.css_horodecki(0.6))).sum()
    assert dist < 1e-3


def test_hprime_state():
    N = 0.3
    p0 = fam.p0(N)
    assert abs(fam.hprime_weight(p0, N)) < 1e-12
    assert np.allclose(fam.hprime_state(p0, N), fam.horodecki_state(p0))
    bd = fam.hprime_state(1.0, 0.5)
    assert np.allclose(bd, fam.bell_diagonal([0.125, 0.75, 0.125, 0]))
    assert abs(negativity(bd) - 0.5) < 1e-12
    # (1+N)/2 on psi+ = beta_1, remainder on the product diagonal
    assert abs(np.real(fam.PSI_PLUS.conj() @ bd @ fam.PSI_PLUS) - 0.75) < 1e-12
    assert abs(negativity(fam.hprime_state(0.8, 0.3)) - 0.3) < 1e-9
    with pytest.raises(DomainError):
        fam.hprime_state(0.2, 0.3)


def test_ree_hprime():
    for N in (0.1, 0.3, 0.6):
        assert abs(fam.ree_hprime(fam.p0(N), N) - fam.ree_horodecki(N)) < 1e-9
        assert abs(fam.ree_hprime(1.0, N) - (1 - h2((1 + N) / 2))) < 1e-12
    # the mixed state beats the pure state only close to p0
    assert fam.ree_hprime(0.4, 0.1) > fam.ree_pure(0.1)
    for p, N in [(0.8, 0.3), (0.5, 0.2), (0.95, 0.7)]:
        rho = fam.hprime_state(p, N)
        assert abs(fam.ree_hprime(p, N) - relative_entropy(rho, fam.css_horodecki(p))) < 1e-9


def test_pprime_state():
    N = 0.5
    lo, hi = fam.schmidt_bounds(N)
    assert np.allclose(fam.pprime_state(hi, N), fam.pure_density(hi))
    bd = fam.pprime_state(0.5, N)
    assert abs(negativity(bd) - N) < 1e-12
    assert abs(np.real(fam.PSI_PLUS.conj() @ bd @ fam.PSI_PLUS) - 0.75) < 1e-12
    assert abs(np.real(fam.PSI_MINUS.conj() @ bd @ fam.PSI_MINUS) - 0.25) < 1e-12
    assert abs(negativity(fam.pprime_state(0.7, 0.4)) - 0.4) < 1e-9
    with pytest.raises(DomainError):
        fam.pprime_state(0.99, 0.5)


def test_ree_pprime():
    for N in (0.2, 0.5, 0.8):
        lo, hi = fam.schmidt_bounds(N)
        assert abs(fam.ree_pprime(lo, N) - fam.ree_pure(N)) < 1e-9
        assert abs(fam.ree_pprime(hi, N) - fam.ree_pure(N)) < 1e-9
        assert abs(fam.ree_pprime(0.5, N) - (1 - h2((1 + N) / 2))) < 1e-12
    rho = fam.pprime_state(0.7, 0.4)
    assert abs(fam.ree_pprime(0.7, 0.4) - relative_entropy(rho, fam.css_pure(0.7))) < 1e-9


def test_bell_diagonal():
    assert np.allclose(fam.bell_diagonal([1, 0, 0, 0]), projector(fam.BELL_BASIS[0]))
    assert abs(fam.bell_diagonal_negativity([1, 0, 0, 0]) - 1) < 1e-12
    assert np.allclose(fam.bell_diagonal([0.25] * 4), np.eye(4) / 4)
    assert fam.bell_diagonal_negativity([0.25] * 4) == 0
    rho = fam.bell_diagonal([0.75, 0.25, 0, 0])
    assert abs(oracle_negativity(rho) - 0.5) < 1e-12
    with pytest.raises(DomainError):
        fam.bell_diagonal([0.5, 0.6, 0, -0.1])


def test_ree_bell_diagonal():
    assert abs(fam.ree_bell_diagonal(1.0) - 1) < 1e-15
    assert fam.ree_bell_diagonal(0.0) == 0.0
    assert abs(fam.ree_bell_diagonal(0.5) - 0.188722) < 1e-6
    lam = [0.1, 0.7, 0.15, 0.05]
    N = fam.bell_diagonal_negativity(lam)
    assert abs(relative_entropy(fam.bell_diagonal(lam), fam.css_bell_diagonal(lam))
               - fam.ree_bell_diagonal(N)) < 1e-9


def test_horodecki_vs_pure_sides():
    for N in np.linspace(0.01, 0.37, 20):
        assert fam.ree_horodecki(N) > fam.ree_pure(N)
    for N in np.linspace(0.38, 0.99, 20):
        assert fam.ree_horodecki(N) < fam.ree_pure(N)


def test_ree_pure_near_one():
    for eps in (1e-3, 1e-4, 1e-5):
        assert abs(fam.ree_pure(1 - eps) - (1 - eps / math.log(2))) <= 5 * eps**2


def test_mixed_families_minimized_at_bell_diagonal():
    for N in (0.2, 0.5, 0.8):
        ps = np.linspace(fam.p0(N), 1.0, 40)
        vals = [fam.ree_hprime(p, N) for p in ps]
        assert min(vals) >= fam.ree_bell_diagonal(N) - 1e-12
        assert abs(vals[-1] - fam.ree_bell_diagonal(N)) < 1e-12
        lo, hi = fam.schmidt_bounds(N)
        vals = [fam.ree_pprime(P, N) for P in np.linspace(lo, hi, 41)]
        assert min(vals) >= fam.ree_bell_diagonal(N) - 1e-12
        assert abs(fam.ree_pprime(0.5, N) - fam.ree_bell_diagonal(N)) < 1e-12


def test_negativity_round_trip_grid():
    for N in np.linspace(0.02, 0.98, 20):
        for t in np.linspace(0, 1, 20):
            p = fam.p0(N) + t * (1 - fam.p0(N))
            assert abs(negativity(fam.hprime_state(p, N)) - N) < 1e-9
            lo, hi = fam.schmidt_bounds(N)
            P = lo + t * (hi - lo)
            assert abs(negativity(fam.pprime_state(P, N)) - N) < 1e-9


def test_family_point_json():
    pt = fam.FamilyPoint.from_json(json.loads('{"family": "HPrime", "params": {"p": 0.8, "N": 0.3}}'))
    assert pt.family is fam.Family.HPRIME
    assert pt.to_json() == {"family": "HPrime", "params": {"p": 0.8, "N": 0.3}}
    with pytest.raises(DomainError):
        fam.FamilyPoint.from_json({"family": "Werner"})
