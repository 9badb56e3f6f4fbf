"""The resolvent matrix W and its factorization W = Theta Phi.

W(lambda) = I - rho_mu(lambda) F(lambda) X F(mu)^* j with F(lambda) =
C (M - lambda N)^{-1}, normalized so that W(mu) = I. Point values come
straight from this realization; an exact rational form is derived once
from the adjugate of the pencil and used for the function-level algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .blaschke import BPProduct, kl_factor_left, kl_factor_right
from .domain import Domain, reflect, rho
from .errors import NotHolomorphicError, SingularEquationError
from .numeric import (DEFAULT_TOL, Tolerances, numerical_rank, pinv_hermitian, range_basis,
                      solve_lyapunov, solve_stein)
from .problem import DataSet
from .realization import Realization
from .rational import (RationalMVF, _pm_det_adj, fit_over_denominator, _pm_scale, adjoint_sharp, block, pole_mult_region,
                       poly_from_roots)


def pencil_inverse(e0: np.ndarray, e1: np.ndarray, domain: Domain) -> RationalMVF:
    """(E0 + lambda E1)^{-1} as a rational function."""
    n = e0.shape[0]
    if n == 0:
        return RationalMVF.zeros(0, 0, domain)
    num = np.stack([e0, e1], axis=2).astype(complex)
    det_c, adj_c = _pm_det_adj(num)
    return RationalMVF(adj_c, det_c, domain)


@dataclass(frozen=True, eq=False)
class ResolventW:
    ds: DataSet
    X: np.ndarray
    mu: complex

    @cached_property
    def _G(self) -> np.ndarray:
        # X F(mu)^* j, so that W(lam) = I - rho_mu(lam) F(lam) G
        return self.X @ self.ds.F(self.mu).conj().T @ self.ds.j

    @property
    def j(self) -> np.ndarray:
        return self.ds.j

    @property
    def domain(self) -> Domain:
        return self.ds.domain

    @property
    def m(self) -> int:
        return self.ds.m

    def __call__(self, lam: complex) -> np.ndarray:
        ds = self.ds
        if ds.n == 0:
            return np.eye(ds.m, dtype=complex)
        return np.eye(ds.m) - rho(ds.domain, lam, self.mu) * ds.F(lam) @ self._G

    def sharp_at(self, lam: complex) -> np.ndarray:
        """W^#(lam) from the realization; finite at lam = 0 on the disc."""
        ds = self.ds
        if ds.n == 0:
            return np.eye(ds.m, dtype=complex)
        M, N, C = ds.M, ds.N, ds.C
        if ds.domain is Domain.DISC:
            pen = lam * M.conj().T - N.conj().T
            fac = lam - self.mu
        else:
            pen = M.conj().T + lam * N.conj().T
            fac = self.mu - lam
        return np.eye(ds.m) - fac * self._G.conj().T @ np.linalg.solve(pen, C.conj().T)

    def inverse_at(self, lam: complex) -> np.ndarray:
        """W(lam)^{-1} = j W^#(lam) j."""
        return self.j @ self.sharp_at(lam) @ self.j

    def realization(self) -> Realization:
        """W = D + C_r (A - lam I)^{-1} B_r with A = N^{-1} M (N is invertible under the standing assumptions)."""
        ds = self.ds
        if ds.n == 0:
            z = np.zeros((0, 0), dtype=complex)
            return Realization(z, np.zeros((0, ds.m)), np.zeros((ds.m, 0)), np.eye(ds.m, dtype=complex), ds.domain)
        # rho_mu(lam) = a + b lam
        if ds.domain is Domain.DISC:
            a, b = 1.0, -np.conj(self.mu)
        else:
            a, b = np.conj(self.mu), 1.0
        A = np.linalg.solve(ds.N, ds.M)
        Br = np.linalg.solve(ds.N, self._G)
        D = np.eye(ds.m) + b * ds.C @ Br
        Cr = -ds.C @ (a * np.eye(ds.n) + b * A)
        return Realization(A, Br, Cr, D, ds.domain)

    @cached_property
    def as_rational(self) -> RationalMVF:
        ds = self.ds
        dom = ds.domain
        if ds.n == 0:
            return RationalMVF.identity(ds.m, dom)
        det_c, adj_c = _pm_det_adj(np.stack([ds.M, -ds.N], axis=2))
        # C adj(M - lam N) G, degree n-1
        cag = np.einsum("ik,klt,lj->ijt", ds.C, adj_c, self._G)
        if dom is Domain.DISC:
            rho_c = np.array([1.0, -np.conj(self.mu)])
        else:
            rho_c = np.array([np.conj(self.mu), 1.0])
        num = np.zeros((ds.m, ds.m, max(len(det_c), cag.shape[2] + 1)), dtype=complex)
        num[:, :, : len(det_c)] += np.eye(ds.m)[:, :, None] * det_c[None, None, :]
        for k, rk in enumerate(rho_c):
            num[:, :, k:k + cag.shape[2]] -= rk * cag
        return RationalMVF(num, det_c, dom)

    def blocks(self):
        w = self.as_rational
        p = self.ds.p
        return w[:p, :p], w[:p, p:], w[p:, :p], w[p:, p:]


def build_w(ds: DataSet, X: np.ndarray | None = None, tol: Tolerances = DEFAULT_TOL) -> ResolventW:
    if X is None:
        X = pinv_hermitian(ds.P, tol)
    return ResolventW(ds, np.asarray(X, dtype=complex), ds.mu)


def w_inverse(W: ResolventW) -> RationalMVF:
    """W^{-1} = j W^# j as a rational function."""
    j = W.j
    return RationalMVF.constant(j, W.domain) @ adjoint_sharp(W.as_rational) @ RationalMVF.constant(j, W.domain)


def kernel_residual(W: ResolventW, pts) -> float:
    """Largest mismatch between F(l) X F(w)^* and (j - W(l) j W(w)^*)/rho_w(l) over point pairs.

    The mismatch is divided by max(1, largest kernel entry) so that the
    figure is a relative error for large kernels and absolute otherwise.
    """
    ds = W.ds
    if ds.n == 0:
        return 0.0
    pts = list(pts)
    Fs = [ds.F(z) for z in pts]
    Ws = [W(z) for z in pts]
    worst, scale = 0.0, 1.0
    for a, la in enumerate(pts):
        for b, lb in enumerate(pts):
            lhs = Fs[a] @ W.X @ Fs[b].conj().T
            rhs = (W.j - Ws[a] @ W.j @ Ws[b].conj().T) / rho(ds.domain, la, lb)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            scale = max(scale, float(np.max(np.abs(lhs))))
    return worst / scale


# ------------------------------------------------------------ associated pair

@dataclass(frozen=True)
class AssociatedPair:
    b1: BPProduct
    b2: BPProduct

    @property
    def deg_b1(self) -> int:
        return self.b1.degree

    @property
    def deg_b2(self) -> int:
        return self.b2.degree


def _restrict(a: np.ndarray, c: np.ndarray, rows: np.ndarray, tol: Tolerances):
    """Orthonormal basis V of rng(rows) and the compressed pair (V^* A V, C V)."""
    v = range_basis(rows, tol)
    return v.conj().T @ a @ v, c @ v


def inner_from_data_b2(ds: DataSet, X: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> RationalMVF:
    """The q x q inner function whose zeros absorb the poles of C21 (A1 - lam)^{-1}[X11 X12]."""
    dom, q = ds.domain, ds.q
    if ds.n1 == 0 or numerical_rank(X[: ds.n1, :], tol) == 0:
        return RationalMVF.identity(q, dom)
    a, c = _restrict(ds.A1, ds.C21, X[: ds.n1, :], tol)
    r = a.shape[0]
    ch = c.conj().T
    if dom is Domain.DISC:
        Q = solve_stein(a, ch @ c, tol)
        left = c @ np.linalg.solve(a - ds.mu * np.eye(r), np.linalg.inv(Q))
        mid = pencil_inverse(-np.eye(r), a.conj().T, dom)  # (lam A^* - I)^{-1}
        lin = RationalMVF.scalar([-ds.mu, 1.0], [1.0], dom)
        return RationalMVF.identity(q, dom) + lin * (RationalMVF.constant(left, dom) @ mid @ ch)
    Q = solve_lyapunov(a, -(c.conj().T @ c), tol)
    mid = pencil_inverse(a.conj().T, np.eye(r), dom)  # (A^* + lam)^{-1}
    return RationalMVF.identity(q, dom) + RationalMVF.constant(c @ np.linalg.inv(Q), dom) @ mid @ ch


def inner_from_data_b1(ds: DataSet, X: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> RationalMVF:
    """The p x p inner function attached to C12 and the A2-block of X."""
    dom, p = ds.domain, ds.p
    if ds.n2 == 0 or numerical_rank(X[ds.n1:, :], tol) == 0:
        return RationalMVF.identity(p, dom)
    a, c = _restrict(ds.A2, ds.C12, X[ds.n1:, :], tol)
    r = a.shape[0]
    ch = c.conj().T
    if dom is Domain.DISC:
        Q = solve_stein(a, -(ch @ c), tol)
        right = np.linalg.solve(Q, np.linalg.solve(np.eye(r) - np.conj(ds.mu) * a.conj().T, ch))
        mid = pencil_inverse(np.eye(r), -a, dom)  # (I - lam A)^{-1}
        lin = RationalMVF.scalar([1.0, -np.conj(ds.mu)], [1.0], dom)
        return RationalMVF.identity(p, dom) + lin * (RationalMVF.constant(c, dom) @ mid @ right)
    Q = solve_lyapunov(a, -(ch @ c), tol)
    mid = pencil_inverse(a, -np.eye(r), dom)  # (A - lam)^{-1}
    return RationalMVF.identity(p, dom) + RationalMVF.constant(c, dom) @ mid @ np.linalg.solve(Q, ch)


def associated_pair(ds: DataSet, X: np.ndarray | None = None,
                    tol: Tolerances = DEFAULT_TOL) -> AssociatedPair:
    """Associated pair {b1, b2} as canonical Blaschke-Potapov products.

    The inner functions built from the data are converted to products of
    elementary factors; this only changes them by constant unitary factors
    (b1 on the right, b2 on the left), which is the freedom the pair has.
    """
    if X is None:
        X = pinv_hermitian(ds.P, tol)
    b1_raw = inner_from_data_b1(ds, X, tol)
    b2_raw = inner_from_data_b2(ds, X, tol)
    _, b1 = kl_factor_right(b1_raw.inverse(), tol)
    b2, _ = kl_factor_left(b2_raw.inverse(), tol)
    return AssociatedPair(b1, b2)


# ------------------------------------------------------------------- phi rows

@dataclass(frozen=True)
class PhiRows:
    phi21: RationalMVF
    phi22: RationalMVF
    phit11: RationalMVF
    phit12: RationalMVF


def phi_rows(W: ResolventW, pair: AssociatedPair) -> PhiRows:
    """phi_2j = b2 w_2j (holomorphic inside), phit_1j = b1^{-1} w_1j (holomorphic outside)."""
    w11, w12, w21, w22 = W.blocks()
    b2 = pair.b2.as_rational()
    b1i = pair.b1.inverse_rational()
    return PhiRows(b2 @ w21, b2 @ w22, b1i @ w11, b1i @ w12)


# ------------------------------------------------------------------------- K

def _exterior_root_poly(fs, domain: Domain) -> np.ndarray:
    """Monic polynomial whose roots are the exterior poles of the given functions (max multiplicity)."""
    roots: list[tuple[complex, int]] = []
    for f in fs:
        for c, k in f.poles_in("exterior"):
            for i, (r, kk) in enumerate(roots):
                if abs(r - c) <= 1e-6 * max(1.0, abs(r)):
                    roots[i] = (r, max(k, kk))
                    break
            else:
                roots.append((c, k))
    return poly_from_roots([r for r, k in roots for _ in range(k)])


def _coef_system(a_poly: np.ndarray, deg: int) -> np.ndarray:
    """Matrix of n(lam) -> A(lam) n(lam) on stacked coefficients (A is q x m, n has degree deg)."""
    q, m, da = a_poly.shape
    rows = q * (da + deg)
    L = np.zeros((rows, m * (deg + 1)), dtype=complex)
    for j in range(deg + 1):
        for i in range(da):
            k = i + j
            L[k * q:(k + 1) * q, j * m:(j + 1) * m] += a_poly[:, :, i]
    return L


def solve_bezout_row(W: ResolventW, pair: AssociatedPair, tol: Tolerances = DEFAULT_TOL,
                     max_degree: int | None = None) -> tuple[RationalMVF, RationalMVF]:
    """Rational g1, g2 holomorphic in the closed region with w21 g1 + w22 g2 = b2^{-1}.

    g = N(lam)/d(lam), d fixed with roots at the exterior poles of W and
    W^{-1}; the polynomial N of smallest degree is found from the
    coefficient equations by least squares.
    """
    dom = W.domain
    p, q = W.ds.p, W.ds.q
    Wr = W.as_rational
    row = Wr[p:, :]
    b2i = pair.b2.inverse_rational()
    d = _exterior_root_poly([Wr, w_inverse(W)], dom)
    base_deg = len(d) - 1
    cap = max_degree if max_degree is not None else 4 * (Wr.den_degree + 1)
    a_poly = _pm_scale(row.num, b2i.den)
    for deg in range(0, cap + 1):
        if dom is Domain.HALF_PLANE:
            dd = np.convolve(d, _power([1.0, 1.0], max(0, deg - base_deg)))
        else:
            dd = d
        rhs_poly = _pm_scale(_pm_scale(b2i.num, row.den), dd)
        L = _coef_system(a_poly, deg)
        rhs_len = L.shape[0] // q
        if rhs_poly.shape[2] > rhs_len:
            if np.max(np.abs(rhs_poly[:, :, rhs_len:])) > 1e-12 * max(1.0, np.max(np.abs(rhs_poly))):
                continue
            rhs_poly = rhs_poly[:, :, :rhs_len]
        R = np.zeros((q, q, rhs_len), dtype=complex)
        R[:, :, : rhs_poly.shape[2]] = rhs_poly
        rhs = np.concatenate([R[:, :, k] for k in range(rhs_len)], axis=0)  # (q*rhs_len, q)
        sol, *_ = np.linalg.lstsq(L, rhs, rcond=tol.rank_tol)
        resid = np.linalg.norm(L @ sol - rhs)
        if resid <= tol.residual_tol * max(1.0, np.linalg.norm(rhs)):
            coeffs = sol.reshape(deg + 1, p + q, q)
            num = np.transpose(coeffs, (1, 2, 0))
            g = RationalMVF(num, dd, dom)
            return g[:p, :], g[p:, :]
    raise SingularEquationError("no rational solution g found within the degree cap")


def _power(c, k: int) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for _ in range(k):
        out = np.convolve(out, c)
    return out


def compute_K(W: ResolventW, pair: AssociatedPair, tol: Tolerances = DEFAULT_TOL) -> RationalMVF:
    """K = (w11 g1 + w12 g2) b2, holomorphic in the region."""
    p = W.ds.p
    g1, g2 = solve_bezout_row(W, pair, tol)
    Wr = W.as_rational
    b2 = pair.b2.as_rational()
    # K is holomorphic inside: fit it over the exterior poles of its ingredients
    den = np.polymul(np.polymul(_exterior_root_poly([Wr], W.domain)[::-1], g1.den[::-1]),
                     b2.den[::-1])[::-1]
    if not np.array_equal(g1.den, g2.den):
        den = np.polymul(den[::-1], g2.den[::-1])[::-1]
    excess = (max(0, Wr.num_degree - Wr.den_degree) + max(0, g1.num_degree - g1.den_degree)
              + max(0, g2.num_degree - g2.den_degree))

    def k_at(z):
        w = W(z)
        return (w[:p, :p] @ g1(z) + w[:p, p:] @ g2(z)) @ pair.b2(z)
    K = fit_over_denominator(k_at, den, (p, W.ds.q), len(den) - 1 + excess + 2, W.domain)
    if pole_mult_region(K, tol) != 0:
        raise NotHolomorphicError("computed K has poles inside the region")
    return K


@dataclass(frozen=True)
class ThetaPhi:
    K: RationalMVF
    Phi: RationalMVF
    Theta: RationalMVF
    Theta_tilde: RationalMVF
    pair: AssociatedPair

    def theta_at(self, lam: complex) -> np.ndarray:
        """Theta(lam) assembled from the factor values."""
        b1, b2i = self.pair.b1(lam), np.linalg.inv(self.pair.b2(lam))
        p, q = b1.shape[0], b2i.shape[0]
        return np.block([[b1, self.K(lam) @ b2i], [np.zeros((q, p)), b2i]])

    def theta_tilde_at(self, lam: complex) -> np.ndarray:
        b1, b2i = self.pair.b1(lam), np.linalg.inv(self.pair.b2(lam))
        p, q = b1.shape[0], b2i.shape[0]
        k_sharp = self.K(reflect(self.K.domain, lam)).conj().T
        return np.block([[b1, np.zeros((p, q))], [k_sharp @ b1, b2i]])


def theta_phi(W: ResolventW, pair: AssociatedPair, K: RationalMVF) -> ThetaPhi:
    dom = W.domain
    p, q = W.ds.p, W.ds.q
    b1, b1i = pair.b1.as_rational(), pair.b1.inverse_rational()
    b2, b2i = pair.b2.as_rational(), pair.b2.inverse_rational()
    theta = block([[b1, K @ b2i], [RationalMVF.zeros(q, p, dom), b2i]])
    theta_t = block([[b1, RationalMVF.zeros(p, q, dom)], [adjoint_sharp(K) @ b1, b2i]])
    # Phi is holomorphic inside, so its poles are among the exterior poles of W, K and b2;
    # fitting the numerator over that denominator avoids cancelling the interior poles numerically
    Wr = W.as_rational
    den = np.polymul(np.polymul(poly_from_roots([c for c, k in Wr.poles_in("exterior")
                                                 for _ in range(k)])[::-1],
                                K.den[::-1]), b2.den[::-1])[::-1]
    excess = sum(max(0, f.num_degree - f.den_degree) for f in (Wr, K, b1i, b2))
    m = p + q

    def phi_at(z):
        ti = np.block([[np.linalg.inv(pair.b1(z)), -np.linalg.solve(pair.b1(z), K(z))],
                       [np.zeros((q, p)), pair.b2(z)]])
        return ti @ W(z)
    phi = fit_over_denominator(phi_at, den, (m, m), len(den) - 1 + excess + 2, dom)
    return ThetaPhi(K, phi, theta, theta_t, pair)


def sep_residual(tp: ThetaPhi, j: np.ndarray, pts) -> float:
    """max |Theta~^#(l) j Theta(l) - j| over sample points, from factor values."""
    dom = tp.Theta.domain
    worst = 0.0
    for z in pts:
        tt_sharp = tp.theta_tilde_at(reflect(dom, z)).conj().T
        worst = max(worst, float(np.max(np.abs(tt_sharp @ j @ tp.theta_at(z) - j))))
    return worst


def factorization_residual(tp: ThetaPhi, W: ResolventW, pts) -> float:
    """max |Theta(l) Phi(l) - W(l)| over sample points."""
    return float(max(np.max(np.abs(tp.theta_at(z) @ tp.Phi(z) - W(z))) for z in pts))
