"""Interpolation data sets and everything that only depends on the data.

A data set fixes the pencil (M, N), the output matrix C split into p
"top" rows and q "bottom" rows, the Hermitian solution P of the
Lyapunov-Stein equation and the normalization point mu on the boundary.
On the disc M = diag(A1, I), N = diag(I, A2); on the right half-plane
M = diag(A1, A2), N = I.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .domain import Domain, in_interior, in_exterior, mu_candidates, rho
from .errors import ShapeError
from .numeric import (DEFAULT_TOL, Tolerances, as_cmatrix, eigvals, inertia, is_observable,
                      jacobi_eigh, jpq, kernel_basis_hermitian, numerical_rank, pencil_disc,
                      pinv_hermitian, range_basis, solve_lyapunov_halfplane, solve_stein_disc,
                      unitary_completion)


@dataclass(frozen=True)
class DataSet:
    domain: Domain
    A1: np.ndarray
    A2: np.ndarray
    C: np.ndarray
    P: np.ndarray
    p: int
    q: int
    kappa: int
    mu: complex

    @classmethod
    def create(cls, A1, A2, C, p: int, q: int | None = None, P=None, kappa: int | None = None,
               mu: complex | None = None, domain=Domain.DISC,
               tol: Tolerances = DEFAULT_TOL) -> "DataSet":
        """Build a data set, solving for P and picking mu when they are not supplied."""
        domain = Domain.parse(domain)
        A1 = as_cmatrix(A1)
        A2 = as_cmatrix(A2)
        if A1.shape[0] != A1.shape[1] or A2.shape[0] != A2.shape[1]:
            raise ShapeError("A1 and A2 must be square")
        n = A1.shape[0] + A2.shape[0]
        C = as_cmatrix(C, cols=n) if n else np.zeros((np.shape(C)[0] if np.ndim(C) == 2 else p + (q or 0), 0), complex)
        if q is None:
            q = C.shape[0] - p
        if C.shape[0] != p + q:
            raise ShapeError(f"C has {C.shape[0]} rows, expected p+q = {p + q}")
        if P is None or (isinstance(P, str) and P == "solve"):
            P = solve_pencil_equation(domain, A1, A2, C, p, tol)
        P = as_cmatrix(P, rows=n, cols=n)
        if np.linalg.norm(P - P.conj().T) > tol.residual_tol * max(1.0, np.linalg.norm(P)):
            raise ValueError("P is not Hermitian")
        P = 0.5 * (P + P.conj().T)
        if kappa is None:
            kappa = inertia(P, tol).n_neg
        m, nn = _pencil(domain, A1, A2)
        mu = choose_mu(domain, m, nn, mu)
        return cls(domain, A1, A2, C, P, int(p), int(q), int(kappa), complex(mu))

    # sizes
    @property
    def n1(self) -> int:
        return self.A1.shape[0]

    @property
    def n2(self) -> int:
        return self.A2.shape[0]

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def m(self) -> int:
        return self.p + self.q

    # blocks
    @cached_property
    def M(self) -> np.ndarray:
        return _pencil(self.domain, self.A1, self.A2)[0]

    @cached_property
    def N(self) -> np.ndarray:
        return _pencil(self.domain, self.A1, self.A2)[1]

    @cached_property
    def j(self) -> np.ndarray:
        return jpq(self.p, self.q)

    @property
    def C11(self) -> np.ndarray:
        return self.C[: self.p, : self.n1]

    @property
    def C12(self) -> np.ndarray:
        return self.C[: self.p, self.n1:]

    @property
    def C21(self) -> np.ndarray:
        return self.C[self.p:, : self.n1]

    @property
    def C22(self) -> np.ndarray:
        return self.C[self.p:, self.n1:]

    @property
    def P21(self) -> np.ndarray:
        return self.P[self.n1:, : self.n1]

    def F(self, lam: complex) -> np.ndarray:
        """F(lam) = C (M - lam N)^{-1}."""
        if self.n == 0:
            return np.zeros((self.m, 0), dtype=complex)
        return np.linalg.solve((self.M - lam * self.N).T, self.C.T).T

    def nodes(self) -> list[complex]:
        """Interpolation nodes inside the region: sigma(A1) and the mirrored spectrum of A2."""
        pts = list(eigvals(self.A1))
        if self.domain is Domain.DISC:
            pts += list(np.conj(eigvals(self.A2)))
        else:
            pts += list(-np.conj(eigvals(self.A2)))
        return _dedupe(pts)

    def with_(self, **kw) -> "DataSet":
        from dataclasses import replace
        return replace(self, **kw)


def _dedupe(pts, tol: float = 1e-9) -> list[complex]:
    out: list[complex] = []
    for z in pts:
        if all(abs(z - w) > tol * max(1.0, abs(w)) for w in out):
            out.append(complex(z))
    return out


def _pencil(domain: Domain, A1, A2):
    if domain is Domain.DISC:
        return pencil_disc(A1, A2)
    n1, n2 = A1.shape[0], A2.shape[0]
    a = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    a[:n1, :n1] = A1
    a[n1:, n1:] = A2
    return a, np.eye(n1 + n2, dtype=complex)


def solve_pencil_equation(domain: Domain, A1, A2, C, p: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    if domain is Domain.DISC:
        return solve_stein_disc(A1, A2, C, p, tol)
    a, _ = _pencil(domain, as_cmatrix(A1), as_cmatrix(A2))
    return solve_lyapunov_halfplane(a, C, p, tol)


def choose_mu(domain: Domain, M, N, mu=None) -> complex:
    """The requested (or default) normalization point, shifted along the boundary if M - mu N is singular."""
    n = M.shape[0]

    def ok(z):
        return n == 0 or np.linalg.svd(M - z * N, compute_uv=False)[-1] > 1e-8 * max(1.0, np.linalg.norm(M) + np.linalg.norm(N))

    if mu is not None:
        mu = complex(mu)
        if ok(mu):
            return mu
    for z in mu_candidates(domain):
        if ok(z):
            return complex(z)
    raise ValueError("could not find a regular normalization point on the boundary")


def equation_residual(ds: DataSet) -> float:
    """Norm of the Lyapunov-Stein residual for the stored P."""
    M, N, P, C, j = ds.M, ds.N, ds.P, ds.C, ds.j
    if ds.domain is Domain.DISC:
        r = M.conj().T @ P @ M - N.conj().T @ P @ N - C.conj().T @ j @ C
    else:
        r = M.conj().T @ P + P @ M + C.conj().T @ j @ C
    return float(np.linalg.norm(r)) if r.size else 0.0


@dataclass
class ValidationReport:
    b1_ok: bool
    b2_ok: bool
    b3_ok: bool
    b4_ok: bool
    stein_residual: float
    X: np.ndarray | None
    kappa1: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.b1_ok and self.b2_ok and self.b3_ok and self.b4_ok


def validate(ds: DataSet, tol: Tolerances = DEFAULT_TOL) -> ValidationReport:
    """Check the standing assumptions on the data and build the matrix X."""
    diag: dict = {}
    # spectra
    e1, e2 = eigvals(ds.A1), eigvals(ds.A2)
    if ds.domain is Domain.DISC:
        b1 = all(abs(z) < 1.0 for z in e1) and all(abs(z) < 1.0 for z in e2)
    else:
        b1 = all(in_interior(ds.domain, z) for z in e1) and all(in_exterior(ds.domain, z) for z in e2)
    diag["b1"] = {"eig_A1": [complex(z) for z in e1], "eig_A2": [complex(z) for z in e2]}

    res = equation_residual(ds)
    scale = max(1.0, np.linalg.norm(ds.C) ** 2, np.linalg.norm(ds.P))
    b2 = res <= tol.residual_tol * scale
    diag["b2"] = {"residual": res, "threshold": tol.residual_tol * scale}

    obs_a1 = is_observable(ds.C21, ds.A1, tol)
    obs_a2 = is_observable(ds.C12, ds.A2, tol)
    b3 = obs_a1 and obs_a2
    diag["b3"] = {"pair_C21_A1": obs_a1, "pair_C12_A2": obs_a2}

    X = pinv_hermitian(ds.P, tol)
    b4, d4 = _check_b4(ds, X, tol)
    diag["b4"] = d4
    kappa1 = inertia(ds.P, tol).n_neg
    return ValidationReport(bool(b1), bool(b2), bool(b3), bool(b4), res, X, kappa1, diag)


def _check_b4(ds: DataSet, X: np.ndarray, tol: Tolerances):
    P = ds.P
    n = ds.n
    if n == 0:
        return True, {"xpx": 0.0, "pxp": 0.0, "inv_M": 0.0, "inv_N": 0.0}
    nx = max(1.0, np.linalg.norm(X))
    npn = max(1.0, np.linalg.norm(P))
    xpx = np.linalg.norm(X @ P @ X - X) / nx
    pxp = np.linalg.norm(P @ X @ P - P) / npn
    basis = range_basis(X, tol)
    proj_out = np.eye(n) - basis @ basis.conj().T
    inv_m = np.linalg.norm(proj_out @ ds.M @ X) / (nx * max(1.0, np.linalg.norm(ds.M)))
    inv_n = np.linalg.norm(proj_out @ ds.N @ X) / (nx * max(1.0, np.linalg.norm(ds.N)))
    herm = np.linalg.norm(X - X.conj().T) / nx
    d = {"xpx": float(xpx), "pxp": float(pxp), "inv_M": float(inv_m), "inv_N": float(inv_n)}
    ok = max(xpx, pxp, inv_m, inv_n, herm) <= tol.residual_tol
    return bool(ok), d


def pick_matrix_np(alphas: Sequence[complex], svals: Sequence, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Pick matrix of left-sided matrix data s(alpha_i) = s_i on the disc.

    Block (i, j) is (I - s_i^* s_j)/(1 - conj(alpha_i) alpha_j); this is the
    solution P of the Stein equation for A1 = diag(alpha_i I_q),
    C = [s_1 ... s_t; I_q ... I_q].
    """
    mats = [np.atleast_2d(np.asarray(s, dtype=complex)) for s in svals]
    if len(mats) != len(alphas):
        raise ShapeError("need one value per node")
    q = mats[0].shape[1]
    t = len(mats)
    P = np.zeros((t * q, t * q), dtype=complex)
    for i, (ai, si) in enumerate(zip(alphas, mats)):
        for k in range(i, t):
            ak, sk = alphas[k], mats[k]
            blk = (np.eye(q) - si.conj().T @ sk) / (1.0 - np.conj(ai) * ak)
            if k == i:
                blk = 0.5 * (blk + blk.conj().T)
                blk[np.diag_indices(q)] = blk.diagonal().real
            P[i * q:(i + 1) * q, k * q:(k + 1) * q] = blk
            P[k * q:(k + 1) * q, i * q:(i + 1) * q] = blk.conj().T
    return P


def np_dataset(alphas: Sequence[complex], svals: Sequence, kappa: int | None = None,
               mu: complex | None = None, tol: Tolerances = DEFAULT_TOL) -> DataSet:
    """Data set for the left-sided problem s(alpha_i) = s_i on the disc."""
    mats = [np.atleast_2d(np.asarray(s, dtype=complex)) for s in svals]
    p, q = mats[0].shape
    A1 = np.kron(np.diag(np.asarray(alphas, dtype=complex)), np.eye(q))
    C = np.vstack([np.hstack(mats), np.hstack([np.eye(q)] * len(mats))])
    return DataSet.create(A1, np.zeros((0, 0)), C, p, q, P=None, kappa=kappa, mu=mu, tol=tol)


# ---------------------------------------------------------------- kernels

Kernel = Callable[[complex, complex], np.ndarray]


class _PairKernel:
    """(lam, omega) -> (J - f(lam) J' f(omega)^*) / rho_omega(lam), with a vectorized Gram assembly."""

    def __init__(self, f, domain: Domain, left=None, right=None):
        self.f = f
        self.domain = domain
        self.left = left
        self.right = right

    def _values(self, pts) -> np.ndarray:
        try:
            vals = np.asarray(self.f(np.asarray(pts, dtype=complex)), dtype=complex)
            if vals.ndim == 3 and vals.shape[0] == len(pts):
                return vals
        except (TypeError, ValueError):
            pass
        return np.stack([np.asarray(self.f(complex(z)), dtype=complex) for z in pts])

    def _parts(self, vals):
        m = vals.shape[1]
        left = np.eye(m) if self.left is None else self.left
        right = np.eye(vals.shape[2]) if self.right is None else self.right
        return left, right

    def __call__(self, lam, om):
        vals = self._values([lam, om])
        left, right = self._parts(vals)
        return (left - vals[0] @ right @ vals[1].conj().T) / rho(self.domain, lam, om)

    def gram(self, pts, dirs: np.ndarray | None) -> np.ndarray:
        pts = np.asarray(list(pts), dtype=complex)
        vals = self._values(pts)
        left, right = self._parts(vals)
        n, m = len(pts), vals.shape[1]
        d = np.eye(m, dtype=complex) if dirs is None else dirs
        fv = np.einsum("ij,ajk->aik", d.conj().T, vals)          # D^* f(lam_a)
        inner = np.einsum("aik,kl,bjl->aibj", fv, right, fv.conj())
        base = d.conj().T @ left @ d
        r = d.shape[1]
        rh = rho(self.domain, pts[:, None], pts[None, :])
        G = (base[None, :, None, :] - inner) / rh[:, None, :, None]
        return G.reshape(n * r, n * r)


def schur_kernel(s, domain: Domain) -> Kernel:
    """(lam, omega) -> (I - s(lam) s(omega)^*) / rho_omega(lam)."""
    return _PairKernel(s, domain)


def resolvent_kernel(W, domain: Domain, j: np.ndarray) -> Kernel:
    """(lam, omega) -> (j - W(lam) j W(omega)^*) / rho_omega(lam)."""
    return _PairKernel(W, domain, j, j)


def gram_matrix(kernel: Kernel, points: Sequence[complex], directions=None) -> np.ndarray:
    pts = list(points)
    dirs = None if directions is None else np.column_stack(
        [np.asarray(d, dtype=complex) for d in directions])
    if isinstance(kernel, _PairKernel):
        G = kernel.gram(pts, dirs)
        return 0.5 * (G + G.conj().T)
    first = kernel(pts[0], pts[0])
    dim = first.shape[0]
    dirs = np.eye(dim, dtype=complex) if dirs is None else dirs
    r = dirs.shape[1]
    G = np.zeros((len(pts) * r, len(pts) * r), dtype=complex)
    for a, la in enumerate(pts):
        for b, lb in enumerate(pts):
            G[a * r:(a + 1) * r, b * r:(b + 1) * r] = dirs.conj().T @ kernel(la, lb) @ dirs
    return 0.5 * (G + G.conj().T)


def negative_squares_sample(kernel: Kernel, points: Sequence[complex], directions=None,
                            tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of negative eigenvalues of the sampled Gram matrix.

    Eigenvalues below ``-eig_tol * ||G||`` are counted.
    """
    if len(points) == 0:
        return 0
    G = gram_matrix(kernel, points, directions)
    # ||G||_2 >= ||G||_F / sqrt(n), so this stop is well inside the count threshold
    stop = 1e-2 * tol.eig_tol * np.linalg.norm(G) / np.sqrt(G.shape[0])
    w, _ = jacobi_eigh(G, vectors=False, stop=stop)
    scale = max(np.max(np.abs(w)), 1e-300)
    return int(np.sum(w < -tol.eig_tol * scale))


# ------------------------------------------------------- singular P geometry

def nu_degenerate(ds: DataSet, tol: Tolerances = DEFAULT_TOL) -> int:
    """rank(M^*P^2M + N^*P^2N + C^*C) - rank P."""
    if ds.n == 0:
        return 0
    M, N, P, C = ds.M, ds.N, ds.P, ds.C
    G = M.conj().T @ P @ P @ M + N.conj().T @ P @ P @ N + C.conj().T @ C
    return numerical_rank(G, tol) - numerical_rank(P, tol)


def neutral_subspace(ds: DataSet, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (m x nu) of F(mu) ker P."""
    ker = kernel_basis_hermitian(ds.P, tol) if ds.n else np.zeros((0, 0))
    if ker.size == 0:
        return np.zeros((ds.m, 0), dtype=complex)
    return range_basis(ds.F(ds.mu) @ ker, tol)


def uv_from_neutral(basis: np.ndarray, p: int, q: int | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Unitaries U, V with every parameter U diag(e, I_nu) V^* mapping the bottom parts
    of the neutral vectors onto their top parts."""
    basis = np.asarray(basis, dtype=complex)
    q = basis.shape[0] - p if q is None else q
    nu = basis.shape[1]
    if nu == 0:
        return np.eye(p, dtype=complex), np.eye(q, dtype=complex)
    xb, yb = basis[:p], basis[p:]
    qy = range_basis(yb, tol)
    if qy.shape[1] != nu:
        raise ValueError("neutral basis has dependent bottom components")
    r = qy.conj().T @ yb
    qx = np.linalg.solve(r.T, xb.T).T
    U = np.hstack([unitary_completion(qx), qx])
    V = np.hstack([unitary_completion(qy), qy])
    return U, V
