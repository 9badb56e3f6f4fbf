import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import stein_oracle

from bitangential.domain import Domain, interior_grid
from bitangential.errors import ShapeError
from bitangential.generators import InstanceConfig, random_contraction, random_instance
from bitangential.numeric import inertia
from bitangential.problem import (DataSet, gram_matrix, negative_squares_sample, neutral_subspace,
                                  np_dataset, nu_degenerate, pick_matrix_np, resolvent_kernel,
                                  schur_kernel, uv_from_neutral, validate)
from bitangential.rational import RationalMVF
from bitangential.resolvent import build_w

seeds = st.integers(0, 2**32 - 1)


def _cg(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@given(seed=seeds, domain=st.sampled_from([Domain.DISC, Domain.HALF_PLANE]),
       p=st.integers(1, 2), q=st.integers(1, 2))
def test_validate_solved_data(seed, domain, p, q):
    ds = random_instance(np.random.default_rng(seed), InstanceConfig(domain=domain, n_max=4, p=p, q=q))
    rep = validate(ds)
    assert rep.b1_ok and rep.b2_ok and rep.b3_ok and rep.b4_ok and rep.ok
    assert rep.stein_residual <= 1e-10 * max(1.0, np.linalg.norm(ds.P), np.linalg.norm(ds.C) ** 2)
    assert rep.kappa1 == inertia(ds.P).n_neg


def test_validate_flags_each_assumption():
    # spectrum of A1 outside the disc
    bad = DataSet.create([[1.5]], np.zeros((0, 0)), [[1.0], [1.0]], 1, 1, P=[[1.0]])
    rep = validate(bad)
    assert not rep.b1_ok
    # P not solving the equation
    ds = DataSet.create([[0.5]], np.zeros((0, 0)), [[0.2], [1.0]], 1, 1)
    assert validate(ds).ok
    assert not validate(ds.with_(P=ds.P + 1.0)).b2_ok
    # unobservable pair
    ds = DataSet.create(np.zeros((2, 2)), np.zeros((0, 0)), np.eye(2), 1, 1)
    assert not validate(ds).b3_ok


def test_dataset_shapes():
    with pytest.raises(ShapeError):
        DataSet.create([[0.1]], np.zeros((0, 0)), [[1.0], [1.0], [1.0]], 1, 1)
    with pytest.raises(ShapeError):
        DataSet.create(np.zeros((2, 3)), np.zeros((0, 0)), np.ones((2, 2)), 1, 1)
    with pytest.raises(ValueError):
        DataSet.create([[0.1]], np.zeros((0, 0)), [[1.0], [1.0]], 1, 1, P=[[1.0, 2.0], [0.0, 1.0]])
    ds = DataSet.create([[0.1]], [[0.5j]], np.ones((3, 2)), 2)
    assert (ds.n1, ds.n2, ds.n, ds.m, ds.q) == (1, 1, 2, 3, 1)
    assert sorted(ds.nodes(), key=lambda z: z.imag) == pytest.approx([-0.5j, 0.1])


@given(seed=seeds, t=st.integers(1, 4), p=st.integers(1, 2), q=st.integers(1, 2))
def test_pick_matrix_hermitian_and_matches_stein(seed, t, p, q):
    rng = np.random.default_rng(seed)
    alphas = list(0.9 * rng.uniform(size=t) * np.exp(2j * np.pi * rng.uniform(size=t)))
    vals = [random_contraction(rng, p, q, 1.3) for _ in range(t)]
    P = pick_matrix_np(alphas, vals)
    assert np.array_equal(P, P.conj().T)
    a1 = np.kron(np.diag(alphas), np.eye(q))
    c = np.vstack([np.hstack(vals), np.hstack([np.eye(q)] * t)])
    ref = stein_oracle(a1, c, p)
    assert np.allclose(P, ref, atol=1e-9 * max(1.0, np.abs(ref).max()))
    ds = np_dataset(alphas, vals)
    assert np.allclose(ds.P, P, atol=1e-9 * max(1.0, np.abs(P).max()))


@pytest.mark.parametrize("seed", range(12))
def test_resolvent_kernel_saturation(seed):
    rng = np.random.default_rng(seed)
    dom = Domain.DISC if seed % 2 == 0 else Domain.HALF_PLANE
    ds = random_instance(rng, InstanceConfig(domain=dom, n_max=3, p=1 + seed % 2, q=1))
    W = build_w(ds)
    kern = resolvent_kernel(W, dom, ds.j)
    nu_minus = inertia(ds.P).n_neg
    pts = list(interior_grid(dom, max(8, 2 * ds.n)))
    assert negative_squares_sample(kern, pts) == nu_minus
    for k in range(1, len(pts)):
        assert negative_squares_sample(kern, pts[:k]) <= nu_minus


def test_gram_fast_path_matches_pairwise():
    rng = np.random.default_rng(7)
    s = RationalMVF(_cg(rng, 2, 2, 2), [0.5, 0.0, 1.0])
    kern = schur_kernel(s, Domain.DISC)
    pts = [0.1, 0.2 + 0.3j, -0.4j, 0.5]
    G = gram_matrix(kern, pts)
    G2 = gram_matrix(lambda a, b: kern(a, b), pts)
    assert np.allclose(G, G2, atol=1e-12)
    d = np.array([1.0, 1j])
    Gd = gram_matrix(kern, pts, [d])
    ref = np.array([[d.conj() @ kern(a, b) @ d for b in pts] for a in pts])
    assert np.allclose(Gd, 0.5 * (ref + ref.conj().T), atol=1e-12)


def _degenerate(rng, p, t):
    """Values of a degree-one inner function at t > 1 points: Pick matrix of rank one."""
    a = 0.5 * np.exp(2j * np.pi * rng.uniform())
    u, _ = np.linalg.qr(_cg(rng, p, p))
    alphas = list(0.8 * rng.uniform(0.1, 1.0, t) * np.exp(2j * np.pi * rng.uniform(size=t)))
    vals = [(z - a) / (1 - np.conj(a) * z) * u for z in alphas]
    return np_dataset(alphas, vals)


@pytest.mark.parametrize("seed", range(10))
def test_neutral_subspace_is_j_neutral(seed):
    rng = np.random.default_rng(seed)
    p = 1 + seed % 2
    ds = _degenerate(rng, p, 3)
    nu = nu_degenerate(ds)
    basis = neutral_subspace(ds)
    assert nu >= 1 and basis.shape[1] >= 1
    gram = basis.conj().T @ ds.j @ basis
    assert np.abs(gram).max() <= 1e-9
    U, V = uv_from_neutral(basis, p)
    assert np.allclose(U.conj().T @ U, np.eye(p)) and np.allclose(V.conj().T @ V, np.eye(p))
    k = basis.shape[1]
    for _ in range(3):
        e = random_contraction(rng, p - k, p - k) if p > k else np.zeros((0, 0))
        full = U @ np.block([[e, np.zeros((p - k, k))], [np.zeros((k, p - k)), np.eye(k)]]) @ V.conj().T
        assert np.allclose(full @ basis[p:], basis[:p], atol=1e-9)


def test_nondegenerate_has_no_neutral_part():
    ds = random_instance(np.random.default_rng(3))
    assert nu_degenerate(ds) == 0 and neutral_subspace(ds).shape[1] == 0
