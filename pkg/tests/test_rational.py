import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import mcmillan_degree_realization, winding_count

from bitangential.domain import Domain, reflect
from bitangential.errors import ShapeError
from bitangential.rational import (RationalMVF, adjoint_sharp, block, cluster_roots, det, inverse,
                                   laurent, pole_mult_at, pole_mult_region, poly_from_roots,
                                   zero_mult_region)
from bitangential.realization import Realization

seeds = st.integers(0, 2**32 - 1)
domains = st.sampled_from([Domain.DISC, Domain.HALF_PLANE])


def _cg(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rand_rational(rng, shape=(2, 2), deg=3, domain=Domain.DISC):
    roots = 2.5 * (rng.uniform(size=deg) - 0.5) + 2.5j * (rng.uniform(size=deg) - 0.5)
    den = poly_from_roots(roots)
    num = _cg(rng, *shape, deg + 1)
    return RationalMVF(num, den, domain)


def _away_points(r, rng, k=20, margin=0.05):
    poles = [c for c, _ in r.clusters()]
    out = []
    while len(out) < k:
        z = complex(*(3.0 * (rng.uniform(size=2) - 0.5)))
        if all(abs(z - c) > margin for c in poles):
            out.append(z)
    return out


@given(seed=seeds, domain=domains, deg=st.integers(0, 4))
def test_sharp_is_involution(seed, domain, deg):
    rng = np.random.default_rng(seed)
    r = _rand_rational(rng, (2, 3), deg, domain)
    back = adjoint_sharp(adjoint_sharp(r))
    for z in _away_points(r, rng, 5, 0.2):
        assert np.allclose(back(z), r(z), rtol=1e-8, atol=1e-8 * max(1.0, np.abs(r(z)).max()))


@given(seed=seeds, domain=domains)
def test_sharp_pointwise(seed, domain):
    rng = np.random.default_rng(seed)
    r = _rand_rational(rng, (2, 2), 2, domain)
    rs = adjoint_sharp(r)
    for z in _away_points(rs, rng, 5, 0.2):
        zr = reflect(domain, z)
        if min(abs(zr - c) for c, _ in r.clusters()) < 0.1:
            continue
        assert np.allclose(rs(z), r(zr).conj().T, rtol=1e-8, atol=1e-8)


@given(seed=seeds)
def test_arithmetic_matches_pointwise(seed):
    rng = np.random.default_rng(seed)
    a = _rand_rational(rng, (2, 2), 2)
    b = _rand_rational(rng, (2, 2), 2)
    prod, total, inv = a @ b, a + b, inverse(a)
    for z in _away_points(prod, rng, 20, 0.05):
        az, bz = a(z), b(z)
        if np.linalg.cond(az) > 1e6:
            continue
        sc = max(1.0, np.abs(az).max() * np.abs(bz).max())
        assert np.max(np.abs(prod(z) - az @ bz)) <= 1e-10 * sc
        assert np.max(np.abs(total(z) - (az + bz))) <= 1e-10 * sc
        ai = np.linalg.inv(az)
        assert np.max(np.abs(inv(z) - ai)) <= 1e-10 * max(1.0, np.abs(ai).max()) * np.linalg.cond(az)


def test_exact_cancellation_and_constructors():
    x = RationalMVF.variable()
    r = RationalMVF.scalar([-0.5, 1.0], [-0.5, 1.0])  # (z - 1/2)/(z - 1/2)
    assert r.den_degree == 0 and np.allclose(r(0.3), 1.0)
    sq = RationalMVF.scalar(poly_from_roots([0.2, 0.2]), poly_from_roots([0.2, 0.2, 0.7]))
    assert sq.den_degree == 1  # double root cancels to one pole at 0.7
    assert np.allclose((x @ x)(2.0), 4.0)
    assert RationalMVF.identity(3)(0.1).shape == (3, 3)
    with pytest.raises(ZeroDivisionError):
        RationalMVF.scalar([1.0], [0.0])
    with pytest.raises(ShapeError):
        RationalMVF.constant(np.eye(2)) * RationalMVF.constant(np.ones((2, 3)))


def test_block_and_slicing():
    a = RationalMVF.scalar([1.0], [-0.5, 1.0])
    b = RationalMVF.scalar([0.0, 1.0], [0.3, 1.0])
    m = block([[a, b], [np.array([[2.0]]), a]])
    z = 0.1 + 0.2j
    assert np.allclose(m(z), [[a(z)[0, 0], b(z)[0, 0]], [2.0, a(z)[0, 0]]])
    assert np.allclose(m[0:1, 1:2](z), b(z))
    assert np.allclose(m.T(z), m(z).T)


def test_cluster_roots():
    cl = cluster_roots([0.5, 0.5 + 1e-9, -0.2])
    assert sorted(k for _, k in cl) == [1, 2]


@pytest.mark.parametrize("seed", range(12))
def test_laurent_reconstruction(seed):
    rng = np.random.default_rng(seed)
    lam0 = complex(*(0.5 * (rng.uniform(size=2) - 0.5)))
    order = int(rng.integers(1, 4))
    other = lam0 + 1.5
    den = poly_from_roots([lam0] * order + [other])
    r = RationalMVF(_cg(rng, 2, 2, order + 2), den)
    lb = laurent(r, lam0, order + 2, k_pos=60)
    assert all(np.max(np.abs(lb.coeff(j))) <= 1e-8 * np.max(np.abs(lb.coeffs)) for j in (-order - 2, -order - 1))
    theta = 2 * np.pi * np.arange(32) / 32
    for z in lam0 + lb.radius * np.exp(1j * theta):
        assert np.max(np.abs(lb.evaluate(z) - r(z))) <= 1e-8 * max(1.0, np.abs(r(z)).max())


def _realized(rng, a_in, n_out, m=2, domain=Domain.DISC):
    """Square function D + C (A - z)^{-1} B with A = diag(a_in, a_out), a_out outside the region."""
    n_in = a_in.shape[0]
    if domain is Domain.DISC:
        a_out = np.diag(np.exp(2j * np.pi * rng.uniform(size=n_out)) * rng.uniform(1.3, 2.5, n_out))
    else:
        a_out = np.diag(-rng.uniform(0.3, 2.0, n_out) + 1j * rng.uniform(-1, 1, n_out))
    A = np.zeros((n_in + n_out,) * 2, dtype=complex)
    A[:n_in, :n_in] = a_in
    A[n_in:, n_in:] = a_out
    B, C = _cg(rng, n_in + n_out, m), _cg(rng, m, n_in + n_out)
    D = np.eye(m) + 0.3 * _cg(rng, m, m)
    real = Realization(A, B, C, D, domain)
    return real, B[:n_in], C[:, :n_in]


def _interior_block(rng, kind, domain):
    alpha = 0.4 * np.exp(2j * np.pi * rng.uniform()) if domain is Domain.DISC else 0.7 + 0.3j
    beta = -0.3 + 0.1j if domain is Domain.DISC else 1.5 - 0.4j
    if kind == "simple":
        return np.diag([alpha, beta])
    if kind == "jordan":
        return np.array([[alpha, 1.0], [0.0, alpha]])
    if kind == "derogatory":
        return alpha * np.eye(2)
    return np.array([[alpha, 1.0, 0.0], [0.0, alpha, 0.0], [0.0, 0.0, alpha]])


@pytest.mark.parametrize("domain", [Domain.DISC, Domain.HALF_PLANE])
@pytest.mark.parametrize("kind", ["simple", "jordan", "derogatory", "mixed"])
@pytest.mark.parametrize("seed", range(5))
def test_pole_and_zero_counts_against_oracles(domain, kind, seed):
    rng = np.random.default_rng(seed)
    a_in = _interior_block(rng, kind, domain)
    real, b_in, c_in = _realized(rng, a_in, int(rng.integers(0, 2)), 2, domain)
    r = real.as_rational()
    expected = mcmillan_degree_realization(a_in, b_in, c_in)
    assert pole_mult_region(r) == expected
    wind = winding_count(lambda z: real(z), domain)
    assert abs(wind - round(wind)) < 1e-3
    assert zero_mult_region(r) - pole_mult_region(r) == round(wind)


def test_pole_mult_at_jordan_and_smith():
    # diag(1/z^2, 1/z) has one pole of total multiplicity 3 at 0
    r = RationalMVF.from_entries([[([1.0], [0, 0, 1.0]), ([0.0], [1.0])], [([0.0], [1.0]), ([1.0], [0, 1.0])]])
    assert pole_mult_at(r, 0.0) == 3
    assert pole_mult_at(r, 0.5) == 0
    # rank-one residue: [[1, 1], [1, 1]]/z has multiplicity 1
    ones = RationalMVF(np.ones((2, 2, 1)), [0.0, 1.0])
    assert pole_mult_at(ones, 0.0) == 1
    d = det(r)
    assert d.shape == (1, 1) and np.allclose(d(0.5), 1 / 0.5 ** 3)
