import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import is_minimal_pbh

from bitangential.domain import Domain, boundary_points, interior_grid, reflect
from bitangential.generators import InstanceConfig, random_instance
from bitangential.numeric import inertia
from bitangential.problem import DataSet
from bitangential.rational import inverse, pole_mult_region
from bitangential.resolvent import (associated_pair, build_w, compute_K, factorization_residual,
                                    kernel_residual, phi_rows, sep_residual, theta_phi, w_inverse)

seeds = st.integers(0, 2**32 - 1)
domains = st.sampled_from([Domain.DISC, Domain.HALF_PLANE])


def _instance(seed, domain, p=1, q=1, n_max=4):
    return random_instance(np.random.default_rng(seed), InstanceConfig(domain=domain, n_max=n_max, p=p, q=q))


def _rho(domain, lam, om):
    return 1 - lam * np.conj(om) if domain is Domain.DISC else lam + np.conj(om)


def _w_direct(ds, lam):
    """I - rho_mu(lam) C (M - lam N)^{-1} P^{-1} (M - mu N)^{-*} C^* j for invertible P."""
    Fl = ds.C @ np.linalg.inv(ds.M - lam * ds.N)
    Fm = ds.C @ np.linalg.inv(ds.M - ds.mu * ds.N)
    return np.eye(ds.m) - _rho(ds.domain, lam, ds.mu) * Fl @ np.linalg.inv(ds.P) @ Fm.conj().T @ ds.j


@given(seed=seeds, domain=domains, p=st.integers(1, 2), q=st.integers(1, 2))
def test_w_normalized_and_j_unitary(seed, domain, p, q):
    ds = _instance(seed, domain, p, q)
    W = build_w(ds)
    assert np.allclose(W(ds.mu), np.eye(ds.m), atol=1e-12)
    vals = [W(t) for t in boundary_points(domain, 64)]
    assert max(np.linalg.norm(w @ ds.j @ w.conj().T - ds.j, 2) for w in vals) <= 1e-9 * max(
        1.0, max(np.linalg.norm(w, 2) ** 2 for w in vals))


@given(seed=seeds, domain=domains)
def test_w_forms_agree(seed, domain):
    ds = _instance(seed, domain, 2, 1)
    W = build_w(ds)
    Wr, real = W.as_rational, W.realization()
    for z in interior_grid(domain, 10):
        ref = _w_direct(ds, z)
        sc = max(1.0, np.abs(ref).max())
        assert np.abs(W(z) - ref).max() <= 1e-9 * sc
        assert np.abs(Wr(z) - ref).max() <= 1e-9 * sc
        assert np.abs(real(z) - ref).max() <= 1e-9 * sc
        assert np.abs(W.inverse_at(z) @ ref - np.eye(ds.m)).max() <= 1e-8 * sc
        zr = reflect(domain, z)
        assert np.abs(W.sharp_at(z) - W(zr).conj().T).max() <= 1e-9 * sc
    Wi = w_inverse(W)
    z = interior_grid(domain, 3)[1]
    assert np.allclose(Wi(z) @ W(z), np.eye(ds.m), atol=1e-8)
    # the realization is minimal, so W has McMillan degree n
    assert real.A.shape == (ds.n, ds.n) and is_minimal_pbh(real.A, real.B, real.C)


@pytest.mark.parametrize("seed", range(25))
def test_kernel_identity(seed):
    dom = Domain.DISC if seed % 2 else Domain.HALF_PLANE
    ds = _instance(seed, dom, 1 + seed % 2, 1 + seed % 3 // 2)
    W = build_w(ds)
    pts = list(interior_grid(dom, 8))
    assert kernel_residual(W, pts) <= 1e-9
    # written out independently: F(l) P^{-1} F(w)^* against the kernel of W
    Pi = np.linalg.inv(ds.P)
    for la in pts[:3]:
        for om in pts[:3]:
            Fl = ds.C @ np.linalg.inv(ds.M - la * ds.N)
            Fo = ds.C @ np.linalg.inv(ds.M - om * ds.N)
            lhs = Fl @ Pi @ Fo.conj().T
            rhs = (ds.j - _w_direct(ds, la) @ ds.j @ _w_direct(ds, om).conj().T) / _rho(dom, la, om)
            assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(lhs).max())


@pytest.mark.parametrize("seed", range(15))
def test_sharp_identity_on_disc(seed):
    ds = _instance(seed, Domain.DISC, 1, 1 + seed % 2)
    W = build_w(ds)
    M, N, X = ds.M, ds.N, W.X
    Fmu = ds.F(ds.mu)
    Ct = Fmu @ X @ (ds.mu * M.conj().T - N.conj().T)
    for z in interior_grid(Domain.DISC, 10):
        lhs = ds.j @ W.sharp_at(z) @ ds.j @ ds.F(z) @ X
        rhs = Ct @ np.linalg.inv(z * M.conj().T - N.conj().T)
        assert np.abs(lhs - rhs).max() <= 1e-9 * max(1.0, np.abs(rhs).max())


@pytest.mark.parametrize("seed", range(16))
def test_pair_degrees_and_pg_index(seed):
    dom = Domain.DISC if seed % 2 else Domain.HALF_PLANE
    ds = _instance(seed, dom, 1 + seed % 2, 1 + seed % 4 // 2, 3)
    W = build_w(ds)
    pair = associated_pair(ds, W.X)
    assert pair.deg_b1 + pair.deg_b2 <= ds.n
    # invertible P with observable pairs: b1 carries the n2 right-sided nodes, b2 the n1 left-sided ones
    assert (pair.deg_b1, pair.deg_b2) == (ds.n2, ds.n1)
    _, _, w21, w22 = W.blocks()
    s21 = -(inverse(w22) @ w21)
    assert pole_mult_region(s21) == inertia(ds.P).n_neg


@pytest.mark.parametrize("seed", range(10))
def test_phi_rows_and_theta_factorization(seed):
    dom = Domain.DISC if seed % 2 else Domain.HALF_PLANE
    ds = _instance(seed, dom, 1 + seed % 2, 1, 3)
    W = build_w(ds)
    pair = associated_pair(ds, W.X)
    phis = phi_rows(W, pair)
    # phi21, phi22 are holomorphic inside
    assert pole_mult_region(phis.phi21) == 0 and pole_mult_region(phis.phi22) == 0
    # phit11, phit12 are holomorphic outside
    assert pole_mult_region(phis.phit11, region="exterior") == 0
    assert pole_mult_region(phis.phit12, region="exterior") == 0
    K = compute_K(W, pair)
    assert pole_mult_region(K) == 0
    tp = theta_phi(W, pair, K)
    pts = [z for z in interior_grid(dom, 12)]
    assert sep_residual(tp, ds.j, pts) <= 1e-8
    assert factorization_residual(tp, W, pts) <= 1e-8 * max(1.0, max(np.abs(W(z)).max() for z in pts))
    assert pole_mult_region(tp.Phi) == 0


def test_single_node_example(single_node):
    W = build_w(single_node)
    for lam in (0.3, -0.2 + 0.5j, 0.7j):
        w = W(lam)
        assert w[0, 0] == pytest.approx((4 - lam) / (3 * lam))
        assert w[0, 3] == pytest.approx(2 * (lam - 1) / (3 * lam))
        assert w[3, 0] == pytest.approx(2 * (1 - lam) / (3 * lam))
        assert w[3, 3] == pytest.approx((4 * lam - 1) / (3 * lam))
        assert np.allclose(w[1:3, 1:3], np.eye(2))
    pair = associated_pair(single_node)
    assert np.allclose(pair.b1(0.4), np.eye(2))
    assert np.allclose(pair.b2(0.4), np.diag([1.0, 0.4]))
    K = compute_K(W, pair)
    assert pole_mult_region(K) == 0
    tp = theta_phi(W, pair, K)
    assert sep_residual(tp, single_node.j, [0.3, -0.2 + 0.5j, 0.7j]) <= 1e-10
    # Theta^{-1} W stays bounded at the only node, while W itself blows up there
    for eps in (1e-3, 1e-5, 1e-7):
        phi = np.linalg.solve(tp.theta_at(eps), W(eps))
        assert np.abs(phi).max() < 10.0
    assert np.abs(W(1e-7)).max() > 1e6


def test_empty_data_gives_identity():
    ds = DataSet.create(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((2, 0)), 1, 1)
    W = build_w(ds)
    assert np.array_equal(W(0.3), np.eye(2))
    assert W.realization().A.shape == (0, 0)
