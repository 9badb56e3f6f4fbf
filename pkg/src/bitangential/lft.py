"""Linear fractional transformations, the parametrization of solutions and
their verification.

T_W[eps] = (w11 eps + w12)(w21 eps + w22)^{-1}; the dual form is
(w11^# + eps w12^#)^{-1}(w21^# + eps w22^#). Verification checks the
interpolation conditions as pole-freeness of explicit rational
functions, the extra holomorphy at the nodes, coprimeness of the
factorizations and class membership.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .blaschke import (BPProduct, boundary_sup, kl_factor_left, kl_factor_right)
from .domain import Domain, interior_grid
from .errors import BitangentialError, SingularEquationError
from .numeric import DEFAULT_TOL, Tolerances, eigvals, inertia
from .problem import (DataSet, negative_squares_sample, neutral_subspace, nu_degenerate,
                      schur_kernel, uv_from_neutral)
from .rational import (LazyMVF, RationalMVF, _pm_add, _pm_add_chopped, _pm_mul, _pm_scale,
                       left_divide, right_divide, adjoint_sharp, block,
                       lazy_product, pole_mult_at, pole_mult_region, zero_mult_region)
from .realization import Realization, pg_realization
from .resolvent import (AssociatedPair, PhiRows, ResolventW, associated_pair, build_w,
                        pencil_inverse, w_inverse)


def _rational_w(W) -> RationalMVF:
    return W.as_rational if isinstance(W, ResolventW) else W


def _split(Wr: RationalMVF, p: int):
    return Wr[:p, :p], Wr[:p, p:], Wr[p:, :p], Wr[p:, p:]


# ------------------------------------------------------------------ transforms

def t_transform(W, eps) -> RationalMVF:
    """(w11 eps + w12)(w21 eps + w22)^{-1}.

    Worked on numerators: with W = N_W/d_W and eps = N_e/d_e the scalar
    d_W d_e cancels, so the poles of W never enter the computation.
    """
    Wr = _rational_w(W)
    eps = RationalMVF.coerce(eps, Wr.domain)
    p = eps.shape[0]
    n = Wr.num
    ne, de = eps.num, eps.den
    top = _pm_add_chopped(_pm_mul(n[:p, :p], ne), _pm_scale(n[:p, p:], de))
    bot = _pm_add(_pm_mul(n[p:, :p], ne), _pm_scale(n[p:, p:], de))
    return right_divide(top, bot, Wr.domain)


def t_transform_dual(W, eps) -> RationalMVF:
    """(w11^# + eps w12^#)^{-1}(w21^# + eps w22^#), on numerators as above."""
    Wr = _rational_w(W)
    eps = RationalMVF.coerce(eps, Wr.domain)
    p = eps.shape[0]
    n = adjoint_sharp(Wr).num  # (W^#)_{11} = w11^#, (W^#)_{21} = w12^#, (W^#)_{12} = w21^#
    ne, de = eps.num, eps.den
    left = _pm_add(_pm_scale(n[:p, :p], de), _pm_mul(ne, n[p:, :p]))
    right = _pm_add_chopped(_pm_scale(n[:p, p:], de), _pm_mul(ne, n[p:, p:]))
    return left_divide(left, right, Wr.domain)


def lft_at(w: np.ndarray, eps: np.ndarray, p: int) -> np.ndarray:
    """Pointwise T_W[eps] from the values W(lam), eps(lam)."""
    w11, w12, w21, w22 = w[:p, :p], w[:p, p:], w[p:, :p], w[p:, p:]
    return np.linalg.solve((w21 @ eps + w22).T, (w11 @ eps + w12).T).T


def lft_dual_at(w_sharp: np.ndarray, eps: np.ndarray, p: int) -> np.ndarray:
    """Pointwise dual form from the value W^#(lam) (note (W^#)_{ij} = (w_ji)^#)."""
    s11, s12, s21, s22 = w_sharp[:p, :p], w_sharp[:p, p:], w_sharp[p:, :p], w_sharp[p:, p:]
    # w11^# = s11, w12^# = s21, w21^# = s12, w22^# = s22
    return np.linalg.solve(s11 + eps @ s21, s12 + eps @ s22)


def pg_transform(W) -> RationalMVF:
    """Potapov-Ginzburg transform [[w11, w12], [0, I]] [[I, 0], [w21, w22]]^{-1}.

    A resolvent matrix is transformed through its realization, which keeps
    the poles at the eigenvalues of an n x n matrix; a plain rational input
    goes through pg_transform_blocks and needs the block size.
    """
    if isinstance(W, Realization):
        raise ValueError("use pg_realization for realizations")
    if not isinstance(W, ResolventW):
        raise ValueError("pass a ResolventW or use pg_transform_blocks")
    try:
        return pg_realization(W.realization(), W.ds.p).as_rational()
    except SingularEquationError:
        return pg_transform_blocks(W.as_rational, W.ds.p)


def pg_transform_blocks(Wr: RationalMVF, p: int) -> RationalMVF:
    """Potapov-Ginzburg transform on numerators: with W = N/d the scalar d cancels."""
    n, d = Wr.num, Wr.den
    m = n.shape[0]
    eye_d = np.eye(m - p)[:, :, None] * d[None, None, :]
    top = np.zeros((m, m, max(n.shape[2], len(d))), dtype=complex)
    bot = np.zeros_like(top)
    top[:p, :, :n.shape[2]] = n[:p]
    top[p:, p:, :len(d)] = eye_d
    bot[:p, :p, :len(d)] = np.eye(p)[:, :, None] * d[None, None, :]
    bot[p:, :, :n.shape[2]] = n[p:]
    return right_divide(top, bot, Wr.domain)


def pg_at(w: np.ndarray, p: int) -> np.ndarray:
    m = w.shape[0]
    top = np.zeros_like(w)
    top[:p] = w[:p]
    top[p:, p:] = np.eye(m - p)
    bot = np.zeros_like(w)
    bot[:p, :p] = np.eye(p)
    bot[p:] = w[p:]
    return top @ np.linalg.inv(bot)


# ------------------------------------------------------------------ parameters

@dataclass(frozen=True)
class Parameter:
    """A parameter eps with its factorizations eps = theta_l^{-1} eps_l = eps_r theta_r^{-1}."""

    eps: RationalMVF
    theta_l: BPProduct
    eps_l: RationalMVF
    eps_r: RationalMVF
    theta_r: BPProduct

    @property
    def kappa2(self) -> int:
        return self.theta_r.degree


def make_parameter(eps, domain: Domain = Domain.DISC, tol: Tolerances = DEFAULT_TOL) -> Parameter:
    eps = RationalMVF.coerce(eps, domain)
    theta_l, eps_l = kl_factor_left(eps, tol)
    eps_r, theta_r = kl_factor_right(eps, tol)
    return Parameter(eps, theta_l, eps_l, eps_r, theta_r)


def embed_parameter(eps_tilde, U: np.ndarray, V: np.ndarray, p: int, q: int, nu: int,
                    domain: Domain) -> RationalMVF:
    """U diag(eps_tilde, I_nu) V^*."""
    full = np.zeros((p, q), dtype=complex)
    full[p - nu:, q - nu:] = np.eye(nu)
    inner = RationalMVF.constant(full, domain)
    if p > nu and q > nu:
        et = RationalMVF.coerce(eps_tilde, domain)
        if et.shape != (p - nu, q - nu):
            raise ValueError(f"parameter must be {(p - nu, q - nu)}, got {et.shape}")
        inner = block([[et, np.zeros((p - nu, nu))], [np.zeros((nu, q - nu)), np.eye(nu)]])
    return RationalMVF.constant(U, domain) @ inner @ RationalMVF.constant(V.conj().T, domain)


def parametrize(ds: DataSet, eps_tilde=None, W: ResolventW | None = None,
                tol: Tolerances = DEFAULT_TOL) -> RationalMVF:
    """s = T_W[U diag(eps_tilde, I_nu) V^*]; eps_tilde defaults to zero."""
    W = build_w(ds, tol=tol) if W is None else W
    nu = nu_degenerate(ds, tol)
    basis = neutral_subspace(ds, tol)
    if basis.shape[1] != nu:
        raise BitangentialError(f"neutral subspace has dimension {basis.shape[1]}, expected {nu}")
    U, V = uv_from_neutral(basis, ds.p, ds.q, tol)
    if eps_tilde is None:
        eps_tilde = np.zeros((ds.p - nu, ds.q - nu))
    eps = embed_parameter(eps_tilde, U, V, ds.p, ds.q, nu, ds.domain)
    return t_transform(W, eps)


# ------------------------------------------------------------------ membership

@dataclass
class Membership:
    contractive: bool
    boundary_sup: float
    pole_count: int
    sampled: int
    kappa: int

    @property
    def agree(self) -> bool:
        verdicts = {self.contractive and self.pole_count == self.kappa,
                    self.contractive and self.sampled == self.kappa}
        return len(verdicts) == 1

    @property
    def member(self) -> bool:
        return self.contractive and self.pole_count == self.kappa and self.sampled == self.kappa


def sample_points(s: RationalMVF, n: int = 25) -> list[complex]:
    """Interior grid with points too close to poles of s removed."""
    poles = [c for c, _ in s.clusters()]
    out = []
    for z in interior_grid(s.domain, n):
        if all(abs(z - c) > 1e-3 * max(1.0, abs(c)) for c in poles):
            out.append(complex(z))
    return out


def class_membership(s: RationalMVF, kappa: int, tol: Tolerances = DEFAULT_TOL,
                     n_boundary: int = 64, n_grid: int = 16) -> Membership:
    sup = boundary_sup(s, n_boundary)
    poles = pole_mult_region(s, tol)
    pts = sample_points(s, n_grid)
    sampled = negative_squares_sample(schur_kernel(s, s.domain), pts, tol=tol)
    return Membership(sup <= 1.0 + 1e-7, sup, poles, sampled, kappa)


# ------------------------------------------------------------------ verification

@dataclass
class Check:
    passed: bool | None
    detail: str = ""
    data: dict = field(default_factory=dict)


@dataclass
class VerificationReport:
    c1: Check
    c2: Check
    c3: Check
    c4: Check
    kappa_actual: int
    coprime_a: bool | None
    coprime_b: bool | None
    class_membership: int
    membership: Membership
    kappa: int

    @property
    def interpolation_ok(self) -> bool:
        return bool(self.c1.passed) and bool(self.c2.passed) and self.c3.passed is not False

    @property
    def passed(self) -> bool:
        return self.interpolation_ok and self.membership.member

    @property
    def takagi_nudelman(self) -> bool:
        return self.passed and bool(self.c4.passed)


def data_function(ds: DataSet) -> LazyMVF:
    """F(lam) = C (M - lam N)^{-1}, evaluated by linear solves."""
    M, N, C = ds.M, ds.N, ds.C
    return LazyMVF(lambda z: np.linalg.solve((M - z * N).T, C.T).T,
                   [pencil_inverse(M, -N, ds.domain)], C.shape, ds.domain)


def mirrored_data_function(ds: DataSet) -> LazyMVF:
    """The n x m function whose poles inside the region carry the right-sided conditions:
    (lam M^* - N^*)^{-1} C^* on the disc, (M^* + lam N^*)^{-1} C^* on the half-plane."""
    Mh, Nh, Ch = ds.M.conj().T, ds.N.conj().T, ds.C.conj().T
    if ds.domain is Domain.DISC:
        e0, e1 = -Nh, Mh
    else:
        e0, e1 = Mh, Nh
    return LazyMVF(lambda z: np.linalg.solve(e0 + z * e1, Ch),
                   [pencil_inverse(e0, e1, ds.domain)], Ch.shape, ds.domain)


def residue_sum(f, centres, radius_hint, n_quad: int = 256) -> np.ndarray:
    """Sum of residues of a matrix function at the given points, by small-circle quadrature."""
    total = None
    for c in centres:
        r = radius_hint(c)
        theta = 2 * np.pi * np.arange(n_quad) / n_quad
        z = c + r * np.exp(1j * theta)
        vals = np.stack([f(zk) * (zk - c) for zk in z])
        part = vals.mean(axis=0)
        total = part if total is None else total + part
    return total


def _radius_fn(s: RationalMVF, nodes: list[complex], ds: DataSet):
    sing = [c for c, _ in s.clusters()] + list(nodes) + list(_reflected(ds))

    def rad(c):
        others = [abs(c - z) for z in sing if abs(c - z) > 1e-9]
        return 0.4 * min(others) if others else 0.5
    return rad


def _reflected(ds: DataSet):
    from .domain import reflect
    return [reflect(ds.domain, z) for z in ds.nodes() if z != 0 or ds.domain is Domain.HALF_PLANE]


def residue_conditions(ds: DataSet, s: RationalMVF) -> dict:
    """Residuals of the three residue identities (valid when s is holomorphic at the nodes)."""
    nodes = ds.nodes()
    rad = _radius_fn(s, nodes, ds)
    A1, A2 = ds.A1, ds.A2
    n1, n2 = ds.n1, ds.n2
    sgn = 1.0 if ds.domain is Domain.DISC else -1.0
    # second block kernel: (lam - A2^*)^{-1} on the disc, (lam + A2^*)^{-1} on the half-plane
    A2m = A2.conj().T if ds.domain is Domain.DISC else -A2.conj().T
    out = {}
    e1 = list(eigvals(A1))
    e2 = list(eigvals(A2m))
    scale = max(1.0, np.linalg.norm(ds.C), np.linalg.norm(ds.P))
    if n1:
        f1 = lambda z: s(z) @ ds.C21 @ np.linalg.inv(z * np.eye(n1) - A1)
        r1 = residue_sum(f1, _dedupe(e1), rad)
        out["left"] = float(np.max(np.abs(r1 - ds.C11))) / scale
    if n2:
        f2 = lambda z: np.linalg.inv(z * np.eye(n2) - A2m) @ ds.C12.conj().T @ s(z)
        r2 = residue_sum(f2, _dedupe(e2), rad)
        out["right"] = float(np.max(np.abs(r2 - ds.C22.conj().T))) / scale
    if n1 and n2:
        f3 = lambda z: (np.linalg.inv(z * np.eye(n2) - A2m) @ ds.C12.conj().T @ s(z) @ ds.C21
                        @ np.linalg.inv(z * np.eye(n1) - A1))
        r3 = residue_sum(f3, _dedupe(e1 + e2), rad)
        out["coupling"] = float(np.max(np.abs(r3 - sgn * ds.P21))) / scale
    return out


def _dedupe(pts, tol=1e-9):
    out = []
    for z in pts:
        if all(abs(z - w) > tol for w in out):
            out.append(complex(z))
    return out


def sylvester_unique(ds: DataSet, tol: float = 1e-9) -> bool:
    """Whether the off-diagonal block of the Lyapunov-Stein equation is uniquely solvable."""
    e1 = eigvals(ds.A1)
    if ds.domain is Domain.DISC:
        e2 = np.conj(eigvals(ds.A2))
        return all(abs(a - b) > tol for a in e1 for b in e2)
    e2 = -np.conj(eigvals(ds.A2))
    return all(abs(a - b) > tol for a in e1 for b in e2)


def _count_at(r: LazyMVF, centres, tol: Tolerances) -> int:
    return sum(pole_mult_at(r, c, tol) for c, _ in centres)


def verify_solution(ds: DataSet, s: RationalMVF, pair: AssociatedPair | None = None,
                    phis: PhiRows | None = None, kappa: int | None = None,
                    W: ResolventW | None = None, tol: Tolerances = DEFAULT_TOL) -> VerificationReport:
    """Check (C1)-(C4), class membership and coprimeness for a candidate s."""
    kappa = ds.kappa if kappa is None else kappa
    s = RationalMVF.coerce(s, ds.domain)
    nodes = ds.nodes()
    b_l, s_l = kl_factor_left(s, tol)
    s_r, b_r = kl_factor_right(s, tol)
    p, q = ds.p, ds.q

    # left/right-sided conditions, checked at the only possible poles (the pencil spectra)
    if ds.n:
        F = data_function(ds)
        ip = np.eye(p)
        left = lazy_product(b_l, lambda z: np.hstack([ip, -s(z)]), F, domain=ds.domain,
                            shape=(p, ds.n))
        left.parts.append(s)
        k1 = _count_at(left, F.poles_in(), tol)
        c1 = Check(k1 == 0, "no poles of [b_l  -s_l] F inside" if k1 == 0 else f"{k1} poles inside",
                   {"poles": k1})
        G = mirrored_data_function(ds)
        iq = np.eye(q)
        right = lazy_product(G, lambda z: np.vstack([-s(z), iq]), b_r, domain=ds.domain,
                             shape=(ds.n, q))
        right.parts.append(s)
        k2 = _count_at(right, G.poles_in(), tol)
        c2 = Check(k2 == 0, "mirrored object holomorphic inside" if k2 == 0 else f"{k2} poles inside",
                   {"poles": k2})
    else:
        c1 = Check(True, "no data")
        c2 = Check(True, "no data")

    # extra holomorphy at the nodes
    bad = [z for z in nodes if pole_mult_at(s, z, tol) > 0]
    c4 = Check(not bad, "holomorphic at all nodes" if not bad else f"poles at nodes {bad}",
               {"pole_nodes": [complex(z) for z in bad]})

    # coupling condition
    if not (c1.passed and c2.passed):
        c3 = Check(False, "left/right conditions fail")
    elif not bad and ds.n:
        res = residue_conditions(ds, s)
        worst = max(res.values()) if res else 0.0
        ok = bool(worst <= tol.residual_tol * 10)
        c3 = Check(ok, "verified via residues" if ok else "residue mismatch", res)
    elif sylvester_unique(ds):
        c3 = Check(True, "implied (coupling block uniquely determined)")
    else:
        c3 = Check(None, "undetermined (s has poles at nodes and the coupling block is not unique)")

    memb = class_membership(s, kappa, tol)

    coprime_a = coprime_b = None
    try:
        W = build_w(ds, tol=tol) if W is None else W
        pair = associated_pair(ds, W.X, tol) if pair is None else pair
        eps = t_transform(w_inverse(W), s)
        par = make_parameter(eps, ds.domain, tol)
        coprime_a, coprime_b = regularity_checks(W, pair, par, tol)
    except (BitangentialError, np.linalg.LinAlgError, ValueError):
        pass

    return VerificationReport(c1, c2, c3, c4, memb.pole_count, coprime_a, coprime_b,
                              memb.sampled, memb, kappa)


def regularity_checks(W, pair: AssociatedPair, par: Parameter,
                      tol: Tolerances = DEFAULT_TOL) -> tuple[bool, bool]:
    """(Reg1, Reg2): pole counts of theta_l w11^# + eps_l w12^# and w21 eps_r + w22 theta_r."""
    Wr = _rational_w(W)
    Ws = adjoint_sharp(Wr)
    at = W if isinstance(W, ResolventW) else Wr
    sharp_at = W.sharp_at if isinstance(W, ResolventW) else Ws
    p = par.eps.shape[0]
    q = Wr.shape[0] - p
    tl, tr = par.theta_l.as_rational(), par.theta_r.as_rational()

    def f1(z):
        ws = sharp_at(z)  # (W^#)_{11} = w11^#, (W^#)_{21} = w12^#
        return tl(z) @ ws[:p, :p] + par.eps_l(z) @ ws[p:, :p]

    def f2(z):
        w = at(z)
        return w[p:, :p] @ par.eps_r(z) + w[p:, p:] @ tr(z)

    def n1(z):
        ws = sharp_at(z)
        nrm = lambda a: np.linalg.norm(a, 2)
        return nrm(tl(z)) * nrm(ws[:p, :p]) + nrm(par.eps_l(z)) * nrm(ws[p:, :p])

    def n2(z):
        w = at(z)
        nrm = lambda a: np.linalg.norm(a, 2)
        return nrm(w[p:, :p]) * nrm(par.eps_r(z)) + nrm(w[p:, p:]) * nrm(tr(z))

    g1 = LazyMVF(f1, [tl, par.eps_l, Ws], (p, p), Wr.domain, scale=n1)
    g2 = LazyMVF(f2, [Wr, par.eps_r, tr], (q, q), Wr.domain, scale=n2)
    return (pole_mult_region(g1, tol) == pair.deg_b1, pole_mult_region(g2, tol) == pair.deg_b2)


# ---------------------------------------------------------- excluded parameters

def rouche_count(phis: PhiRows, param: Parameter, tol: Tolerances = DEFAULT_TOL) -> int:
    """Zero multiplicity of phi21 eps_r + phi22 theta_r inside the region."""
    g = phis.phi21 @ param.eps_r + phis.phi22 @ param.theta_r.as_rational()
    return zero_mult_region(g, tol)


def excluded_check(phis: PhiRows, param: Parameter, nodes, tol: Tolerances = DEFAULT_TOL) -> list[bool]:
    """True at a node where phi21 eps_r + phi22 theta_r is singular."""
    out = []
    for a in nodes:
        m = phis.phi21(a) @ param.eps_r(a) + phis.phi22(a) @ param.theta_r(a)
        sv = np.linalg.svd(m, compute_uv=False)
        out.append(bool(sv[-1] <= tol.eig_tol * max(1.0, sv[0])))
    return out


def no_excluded_criterion(phis: PhiRows, nodes, tol: Tolerances = DEFAULT_TOL) -> list[bool]:
    """True at a node where phi21 phi21^* - phi22 phi22^* is negative definite."""
    out = []
    for a in nodes:
        f21, f22 = phis.phi21(a), phis.phi22(a)
        h = f21 @ f21.conj().T - f22 @ f22.conj().T
        out.append(inertia(h, tol).n_neg == h.shape[0])
    return out


def find_admissible_constant(ds: DataSet, phis: PhiRows, nodes, max_tries: int = 200,
                             seed: int = 0, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """A constant strict contraction that is not excluded at any node."""
    rng = np.random.default_rng(seed)
    p, q = ds.p, ds.q
    candidates = [np.zeros((p, q), dtype=complex)]
    for _ in range(max_tries):
        g = rng.standard_normal((p, q)) + 1j * rng.standard_normal((p, q))
        candidates.append(g * (rng.uniform(0.1, 0.95) / np.linalg.norm(g, 2)))
    ident = BPProduct.identity(q, ds.domain)
    for eps in candidates:
        e = RationalMVF.constant(eps, ds.domain)
        par = Parameter(e, BPProduct.identity(p, ds.domain), e, e, ident)
        if not any(excluded_check(phis, par, nodes, tol)):
            return eps
    raise BitangentialError("no admissible constant parameter found")


def takagi_sarason_membership(s: RationalMVF, pair: AssociatedPair, K: RationalMVF, kappa: int,
                              tol: Tolerances = DEFAULT_TOL) -> bool:
    """pole multiplicity of b1^{-1}(s - K) b2^{-1} equals kappa."""
    f = lazy_product(pair.b1.inverse_rational(), s - K, pair.b2.inverse_rational())
    return pole_mult_region(f, tol) == kappa
