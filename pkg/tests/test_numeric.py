import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import lyapunov_oracle, stein_oracle

from bitangential.errors import ShapeError, SingularEquationError
from bitangential.numeric import (Tolerances, _round_robin, inertia, is_observable, jacobi_eigh, jpq,
                                  null_basis, numerical_rank, pinv_hermitian, range_basis,
                                  solve_lyapunov_halfplane, solve_stein_disc)

seeds = st.integers(0, 2**32 - 1)


def _herm(rng, n, rank=None):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if rank is None:
        return g + g.conj().T
    u, _ = np.linalg.qr(g)
    w = rng.uniform(0.5, 3.0, rank) * rng.choice([-1.0, 1.0], rank)
    return (u[:, :rank] * w) @ u[:, :rank].conj().T


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8, 13])
def test_round_robin_covers_each_pair_once(n):
    seen = []
    for P, Q, PQ, k in _round_robin(n):
        assert len(set(PQ.tolist())) == 2 * k  # disjoint within a round
        seen += list(zip(P.tolist(), Q.tolist()))
    assert sorted(seen) == [(a, b) for a in range(n) for b in range(a + 1, n)]


@given(seed=seeds, n=st.integers(1, 12))
def test_jacobi_matches_lapack(seed, n):
    h = _herm(np.random.default_rng(seed), n)
    w, v = jacobi_eigh(h)
    scale = np.linalg.norm(h)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(w - np.linalg.eigvalsh(h))) <= 1e-12 * scale
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) <= 1e-12 * scale


def test_jacobi_deterministic_and_degenerate_inputs():
    h = _herm(np.random.default_rng(0), 6)
    w1, v1 = jacobi_eigh(h)
    w2, v2 = jacobi_eigh(h)
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)
    w, v = jacobi_eigh(np.zeros((3, 3)))
    assert np.array_equal(w, np.zeros(3)) and np.array_equal(v, np.eye(3))
    w, v = jacobi_eigh(np.zeros((0, 0)))
    assert w.shape == (0,)
    w, v = jacobi_eigh(np.diag([2.0, -1.0, 2.0]))
    assert np.allclose(w, [-1.0, 2.0, 2.0])
    w, v = jacobi_eigh(h, vectors=False)
    assert v is None and np.allclose(w, w1)
    with pytest.raises(ShapeError):
        jacobi_eigh(np.zeros((2, 3)))


def test_jacobi_early_stop_stays_within_bound():
    h = _herm(np.random.default_rng(1), 10)
    stop = 1e-4 * np.linalg.norm(h)
    w, _ = jacobi_eigh(h, vectors=False, stop=stop)
    assert np.max(np.abs(w - np.linalg.eigvalsh(h))) <= stop


@given(seed=seeds, n=st.integers(1, 8))
def test_inertia_mirror(seed, n):
    h = _herm(np.random.default_rng(seed), n)
    a, b = inertia(h), inertia(-h)
    assert a.n_neg == b.n_pos and a.n_pos == b.n_neg and a.n_zero == b.n_zero
    assert a.n_neg + a.n_zero + a.n_pos == n == a.dim


def test_inertia_counts_and_tolerance():
    h = np.diag([-2.0, -1e-12, 0.0, 3.0, 5.0])
    ine = inertia(h)
    assert (ine.n_neg, ine.n_zero, ine.n_pos) == (1, 2, 2)
    ine = inertia(h, Tolerances(eig_tol=1e-14))
    assert (ine.n_neg, ine.n_zero, ine.n_pos) == (2, 1, 2)


@given(seed=seeds, n=st.integers(2, 6), r=st.integers(0, 6))
def test_rank_and_bases(seed, n, r):
    r = min(r, n)
    rng = np.random.default_rng(seed)
    a = (rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))) @ \
        (rng.standard_normal((r, n + 1)) + 1j * rng.standard_normal((r, n + 1)))
    assert numerical_rank(a) == r
    rb, nb = range_basis(a), null_basis(a)
    assert rb.shape == (n, r) and nb.shape == (n + 1, n + 1 - r)
    assert np.linalg.norm(a @ nb) <= 1e-9 * max(1.0, np.linalg.norm(a))
    assert np.linalg.norm(rb.conj().T @ rb - np.eye(r)) <= 1e-12


@given(seed=seeds, n=st.integers(1, 6), r=st.integers(0, 6))
def test_pinv_hermitian_identities(seed, n, r):
    rng = np.random.default_rng(seed)
    P = _herm(rng, n, min(r, n))
    X = pinv_hermitian(P)
    tol = 1e-8
    assert np.linalg.norm(X @ P @ X - X) <= tol * max(1.0, np.linalg.norm(X))
    assert np.linalg.norm(P @ X @ P - P) <= tol * max(1.0, np.linalg.norm(P))
    assert np.linalg.norm(X - X.conj().T) <= tol
    assert inertia(X).n_neg == inertia(P).n_neg


def _stable(rng, n, radius=0.8):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return g * (radius * rng.uniform(0.2, 1.0) / max(abs(np.linalg.eigvals(g))))


@pytest.mark.parametrize("seed", range(100))
def test_stein_residual_and_scipy_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    p = int(rng.integers(1, 3))
    q = int(rng.integers(1, 3))
    a1 = _stable(rng, n)
    c = rng.standard_normal((p + q, n)) + 1j * rng.standard_normal((p + q, n))
    P = solve_stein_disc(a1, np.zeros((0, 0)), c, p)
    j = jpq(p, q)
    res = np.linalg.norm(a1.conj().T @ P @ a1 - P - c.conj().T @ j @ c)
    assert res <= 1e-8 * max(1.0, np.linalg.norm(P))
    assert np.allclose(P, stein_oracle(a1, c, p), atol=1e-8 * max(1.0, np.linalg.norm(P)))


@pytest.mark.parametrize("seed", range(20))
def test_halfplane_lyapunov_against_scipy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = g + (0.3 - np.linalg.eigvals(g).real.min()) * np.eye(n)  # spectrum in the right half-plane
    c = rng.standard_normal((2, n)) + 1j * rng.standard_normal((2, n))
    P = solve_lyapunov_halfplane(a, c, 1)
    assert np.allclose(P, lyapunov_oracle(a, c, 1), atol=1e-8 * max(1.0, np.linalg.norm(P)))


def test_stein_singular_raises():
    # A1 with eigenvalues 1/2 and 2: 1 - conj(2)*(1/2) = 0 makes the equation singular
    with pytest.raises(SingularEquationError):
        solve_stein_disc(np.diag([0.5, 2.0]), np.zeros((0, 0)), np.eye(2), 1)


def test_observability():
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert is_observable(np.array([[1.0, 0.0]]), a)
    assert not is_observable(np.array([[0.0, 1.0]]), a)
    assert is_observable(np.zeros((1, 0)), np.zeros((0, 0)))


def test_tolerances_validation():
    with pytest.raises(ValueError):
        Tolerances(rank_tol=-1.0)
    t = Tolerances().with_(eig_tol=1e-6, rank_tol=None)
    assert t.eig_tol == 1e-6 and t.rank_tol == Tolerances().rank_tol
