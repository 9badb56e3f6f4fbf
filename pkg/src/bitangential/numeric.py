"""Dense complex linear algebra used throughout the package.

Hermitian spectra come from a cyclic Jacobi iteration so that inertia
counts are reproducible bit for bit; general SVD and linear solves are
delegated to numpy.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import ShapeError, SingularEquationError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    rank_tol : singular values below ``rank_tol * sigma_max`` count as zero.
    eig_tol : eigenvalues inside ``(-eig_tol, eig_tol)`` count as zero.
    residual_tol : acceptance threshold for equation residuals.
    """

    rank_tol: float = 1e-9
    eig_tol: float = 1e-9
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in ("rank_tol", "eig_tol", "residual_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    def with_(self, **kw) -> "Tolerances":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Inertia:
    n_neg: int
    n_zero: int
    n_pos: int

    @property
    def dim(self) -> int:
        return self.n_neg + self.n_zero + self.n_pos


def as_cmatrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a 2-D complex array, checking finiteness and shape."""
    m = np.array(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    elif m.ndim == 1 and m.size == 0:
        m = m.reshape(rows or 0, cols or 0)
    if m.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    if rows is not None and m.shape[0] != rows:
        raise ShapeError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ShapeError(f"expected {cols} columns, got {m.shape[1]}")
    return m


def hermitian_part(h: np.ndarray) -> np.ndarray:
    return 0.5 * (h + h.conj().T)


@lru_cache(maxsize=64)
def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray, int]]:
    """Tournament schedule: n - 1 rounds (n even) of n/2 disjoint index pairs covering all pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[k], players[m - 1 - k]) for k in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            P, Q = np.array([a for a, _ in pairs]), np.array([b for _, b in pairs])
            rounds.append((P, Q, np.concatenate([P, Q]), len(pairs)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(h, max_sweeps: int = 60, vectors: bool = True, stop: float = 0.0) -> tuple[np.ndarray, np.ndarray | None]:
    """Eigen-decomposition of a Hermitian matrix by Jacobi rotations.

    Each sweep visits all pairs (p, q) in a fixed round-robin schedule,
    applying n/2 disjoint rotations at once, so the result is deterministic.
    Returns ``(w, V)`` with ascending ``w`` and ``h = V diag(w) V^*``;
    ``V`` is None when ``vectors`` is false.  Iteration ends once the
    off-diagonal Frobenius norm is below ``max(stop, 1e-15 ||h||)``; by Weyl's
    inequality every returned eigenvalue is then within that bound.
    """
    a = as_cmatrix(h)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ShapeError("jacobi_eigh needs a square matrix")
    a = hermitian_part(a)
    v = np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros(0), v
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    target = max(stop, 1e-15 * scale)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for P, Q, PQ, k in rounds:
            apq = a[P, Q]
            d = a[PQ, PQ].real
            zeta = 0.5 * (d[k:] - d[:k])
            # rotation [[c, x], [-conj(x), c]] with x = apq t / |apq|, tan = t
            r = np.copysign(1.0, zeta) / (np.abs(zeta) + np.hypot(zeta, np.abs(apq)) + 1e-300)
            c = 1.0 / np.sqrt(1.0 + (np.abs(apq) * r) ** 2)
            x = apq * r * c
            y = -np.conj(x)
            cols = a[:, PQ]
            a[:, P] = cols[:, :k] * c + cols[:, k:] * y
            a[:, Q] = cols[:, :k] * x + cols[:, k:] * c
            rows = a[PQ, :]
            a[P, :] = c[:, None] * rows[:k] + np.conj(y)[:, None] * rows[k:]
            a[Q, :] = np.conj(x)[:, None] * rows[:k] + c[:, None] * rows[k:]
            a[P, Q] = 0.0
            a[Q, P] = 0.0
            if vectors:
                cols = v[:, PQ]
                v[:, P] = cols[:, :k] * c + cols[:, k:] * y
                v[:, Q] = cols[:, :k] * x + cols[:, k:] * c
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if vectors else None)


def inertia(h, tol: Tolerances = DEFAULT_TOL) -> Inertia:
    """Count negative, zero and positive eigenvalues of a Hermitian matrix."""
    w, _ = jacobi_eigh(h, vectors=False, stop=1e-2 * tol.eig_tol)
    neg = int(np.sum(w <= -tol.eig_tol))
    pos = int(np.sum(w >= tol.eig_tol))
    return Inertia(neg, len(w) - neg - pos, pos)


def numerical_rank(a, tol: Tolerances = DEFAULT_TOL) -> int:
    """Number of singular values above ``rank_tol * sigma_max``."""
    m = np.asarray(a, dtype=complex)
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol.rank_tol * sv[0]))


def range_basis(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space (SVD based)."""
    m = np.asarray(a, dtype=complex)
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, sv, _ = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(m, tol)
    return _fix_signs(u[:, :r])


def null_basis(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the kernel (SVD based)."""
    m = np.asarray(a, dtype=complex)
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(ncols, dtype=complex)
    _, _, vh = np.linalg.svd(m, full_matrices=True)
    r = numerical_rank(m, tol)
    return _fix_signs(vh[r:].conj().T)


def _fix_signs(b: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest entry is real and positive."""
    b = b.copy()
    for k in range(b.shape[1]):
        i = int(np.argmax(np.abs(b[:, k]) - 1e-12 * np.arange(b.shape[0])))
        if abs(b[i, k]) > 0:
            b[:, k] *= np.conj(b[i, k]) / abs(b[i, k])
    return b


def unitary_completion(q: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the orthogonal complement of rng q."""
    n = q.shape[0]
    if q.shape[1] == 0:
        return np.eye(n, dtype=complex)
    r = numerical_rank(q)
    u, _, _ = np.linalg.svd(q)
    return _fix_signs(u[:, r:])


def _kron_solve(op: np.ndarray, rhs: np.ndarray, n: int, tol: Tolerances) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    sv = np.linalg.svd(op, compute_uv=False)
    if sv[-1] <= tol.rank_tol * max(sv[0], 1.0):
        raise SingularEquationError("matrix equation does not have a unique solution")
    x = np.linalg.solve(op, rhs.reshape(-1, order="F"))
    return x.reshape(n, n, order="F")


def jpq(p: int, q: int) -> np.ndarray:
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


def pencil_disc(a1, a2) -> tuple[np.ndarray, np.ndarray]:
    """Return (M, N) = (diag(A1, I), diag(I, A2))."""
    a1, a2 = as_cmatrix(a1), as_cmatrix(a2)
    n1, n2 = a1.shape[0], a2.shape[0]
    m = np.zeros((n1 + n2, n1 + n2), dtype=complex)
    nn = np.zeros_like(m)
    m[:n1, :n1] = a1
    m[n1:, n1:] = np.eye(n2)
    nn[:n1, :n1] = np.eye(n1)
    nn[n1:, n1:] = a2
    return m, nn


def solve_stein_disc(a1, a2, c, p: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve M^* P M - N^* P N = C^* j C for Hermitian P.

    ``p`` is the number of rows of C carrying the +1 signature. The system
    is vectorized column-major and solved densely.
    """
    m, nn = pencil_disc(a1, a2)
    n = m.shape[0]
    c = as_cmatrix(c, cols=n)
    j = jpq(p, c.shape[0] - p)
    rhs = c.conj().T @ j @ c
    op = np.kron(m.T, m.conj().T) - np.kron(nn.T, nn.conj().T)
    return hermitian_part(_kron_solve(op, rhs, n, tol))


def solve_lyapunov_halfplane(a, c, p: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve A^* P + P A + C^* J C = 0 for Hermitian P."""
    a = as_cmatrix(a)
    n = a.shape[0]
    c = as_cmatrix(c, cols=n)
    j = jpq(p, c.shape[0] - p)
    rhs = -(c.conj().T @ j @ c)
    eye = np.eye(n)
    op = np.kron(eye, a.conj().T) + np.kron(a.T, eye)
    return hermitian_part(_kron_solve(op, rhs, n, tol))


def solve_stein(a, rhs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve Q - A^* Q A = rhs (square, A with spectrum in the disc)."""
    a = as_cmatrix(a)
    n = a.shape[0]
    op = np.eye(n * n) - np.kron(a.T, a.conj().T)
    return _kron_solve(op, as_cmatrix(rhs), n, tol)


def solve_lyapunov(a, rhs, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Solve A^* Q + Q A = rhs."""
    a = as_cmatrix(a)
    n = a.shape[0]
    eye = np.eye(n)
    op = np.kron(eye, a.conj().T) + np.kron(a.T, eye)
    return _kron_solve(op, as_cmatrix(rhs), n, tol)


def pinv_hermitian(h, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Spectral pseudoinverse of a Hermitian matrix.

    Eigenvalues with modulus below ``eig_tol * max(1, |lambda|_max)`` are
    treated as zero. The result X satisfies XPX = X, PXP = P, X = X^*.
    """
    w, v = jacobi_eigh(h)
    if len(w) == 0:
        return np.zeros((0, 0), dtype=complex)
    cut = tol.eig_tol * max(1.0, np.max(np.abs(w)))
    inv = np.array([1.0 / x if abs(x) > cut else 0.0 for x in w])
    return hermitian_part((v * inv) @ v.conj().T)


def kernel_basis_hermitian(h, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal eigenvectors of a Hermitian matrix for (numerically) zero eigenvalues."""
    w, v = jacobi_eigh(h)
    if len(w) == 0:
        return np.zeros((0, 0), dtype=complex)
    cut = tol.eig_tol * max(1.0, np.max(np.abs(w)))
    return _fix_signs(v[:, np.abs(w) <= cut])


def is_observable(c, a, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Full column rank of the stacked matrix [C; CA; ...; CA^{n-1}]."""
    a = as_cmatrix(a)
    n = a.shape[0]
    if n == 0:
        return True
    c = np.asarray(c, dtype=complex).reshape(-1, n)
    blocks, cur = [], c
    for _ in range(n):
        blocks.append(cur)
        cur = cur @ a
    return numerical_rank(np.vstack(blocks), tol) == n


def eigvals(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.size == 0:
        return np.zeros(0, dtype=complex)
    return np.linalg.eigvals(a)
