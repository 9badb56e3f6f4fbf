"""Finite Blaschke-Potapov products and Krein-Langer factorizations.

An elementary factor is I - P + beta_alpha(lambda) P with P an orthogonal
projection and beta_alpha the scalar Blaschke factor of the region:
(lambda - alpha)/(1 - conj(alpha) lambda) on the disc and
(lambda - alpha)/(lambda + conj(alpha)) on the half-plane.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Domain, boundary_points, in_interior
from .errors import ExtractionError, ShapeError
from .numeric import DEFAULT_TOL, Tolerances, numerical_rank
from .rational import (RationalMVF, _scaled_principal, pole_mult_region,
                       poles_with_mult)


def scalar_blaschke(domain: Domain, alpha: complex, lam):
    if domain is Domain.DISC:
        return (lam - alpha) / (1.0 - np.conj(alpha) * lam)
    return (lam - alpha) / (lam + np.conj(alpha))


@dataclass(frozen=True)
class BPFactor:
    alpha: complex
    proj: np.ndarray
    domain: Domain = Domain.DISC

    def __post_init__(self):
        proj = np.asarray(self.proj, dtype=complex)
        object.__setattr__(self, "proj", proj)
        object.__setattr__(self, "alpha", complex(self.alpha))
        if proj.ndim != 2 or proj.shape[0] != proj.shape[1]:
            raise ShapeError("projection must be square")
        if np.linalg.norm(proj @ proj - proj) > 1e-8 or np.linalg.norm(proj - proj.conj().T) > 1e-8:
            raise ValueError("proj is not an orthogonal projection")
        if not in_interior(self.domain, self.alpha):
            raise ValueError(f"zero {self.alpha} is not inside the region")

    @property
    def size(self) -> int:
        return self.proj.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.proj).real))

    def __call__(self, lam) -> np.ndarray:
        beta = scalar_blaschke(self.domain, self.alpha, np.asarray(lam, dtype=complex))
        return np.eye(self.size) - self.proj + beta[..., None, None] * self.proj

    def _polys(self):
        a = self.alpha
        if self.domain is Domain.DISC:
            return np.array([-a, 1.0]), np.array([1.0, -np.conj(a)])
        return np.array([-a, 1.0]), np.array([np.conj(a), 1.0])

    def as_rational(self) -> RationalMVF:
        top, bot = self._polys()
        rest = np.eye(self.size) - self.proj
        num = rest[:, :, None] * bot[None, None, :] + self.proj[:, :, None] * top[None, None, :]
        return RationalMVF(num, bot, self.domain)

    def inverse_rational(self) -> RationalMVF:
        top, bot = self._polys()
        rest = np.eye(self.size) - self.proj
        num = rest[:, :, None] * top[None, None, :] + self.proj[:, :, None] * bot[None, None, :]
        return RationalMVF(num, top, self.domain)


@dataclass(frozen=True)
class BPProduct:
    """Ordered product factors[0] @ factors[1] @ ... of elementary factors."""

    factors: tuple = ()
    domain: Domain = Domain.DISC
    size: int = 1

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        for f in self.factors:
            if f.size != self.size:
                raise ShapeError("factor size mismatch")

    @classmethod
    def identity(cls, size: int, domain: Domain = Domain.DISC) -> "BPProduct":
        return cls((), domain, size)

    def __call__(self, lam) -> np.ndarray:
        out = np.eye(self.size, dtype=complex) * np.ones(np.shape(lam) + (1, 1))
        for f in self.factors:
            out = out @ f(lam)
        return out

    @property
    def degree(self) -> int:
        return sum(f.rank for f in self.factors)

    @property
    def zeros(self) -> list[complex]:
        return [f.alpha for f in self.factors]

    def as_rational(self) -> RationalMVF:
        out = RationalMVF.identity(self.size, self.domain)
        for f in self.factors:
            out = out @ f.as_rational()
        return out

    def inverse_rational(self) -> RationalMVF:
        out = RationalMVF.identity(self.size, self.domain)
        for f in reversed(self.factors):
            out = out @ f.inverse_rational()
        return out


def bp_eval(b: BPProduct, lam) -> np.ndarray:
    return b(lam)


def bp_degree(b: BPProduct) -> int:
    return b.degree


def _unit_phase(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v * (np.conj(v[i]) / abs(v[i]))


def _leading_direction(s: RationalMVF, alpha: complex, mult: int, tol: Tolerances, side: str):
    principal = _scaled_principal(s, alpha, mult, tol)
    if not principal:
        return None
    u, _, vh = np.linalg.svd(principal[0])
    vec = u[:, 0] if side == "left" else vh[0].conj()
    return _unit_phase(vec)


def _extract(s: RationalMVF, tol: Tolerances, side: str):
    cur = s
    factors: list[BPFactor] = []
    budget = 4 * max(1, cur.den_degree) * max(cur.shape) + 8
    while True:
        poles = poles_with_mult(cur, tol)
        if not poles:
            break
        if budget <= 0:
            raise ExtractionError("Krein-Langer extraction did not terminate")
        budget -= 1
        alpha = poles[0][0]
        hit = [k for c, k in cur.poles_in() if c == alpha][0]
        vec = _leading_direction(cur, alpha, hit, tol, side)
        if vec is None:
            break
        f = BPFactor(alpha, np.outer(vec, vec.conj()), cur.domain)
        if side == "left":
            cur = f.as_rational() @ cur
            factors.insert(0, f)
        else:
            cur = cur @ f.as_rational()
            factors.append(f)
    return factors, cur


def kl_factor_left(s: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> tuple[BPProduct, RationalMVF]:
    """s = b_l^{-1} s_l with b_l a Blaschke-Potapov product and s_l holomorphic in the region."""
    factors, cur = _extract(s, tol, "left")
    return BPProduct(tuple(factors), s.domain, s.shape[0]), cur


def kl_factor_right(s: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> tuple[RationalMVF, BPProduct]:
    """s = s_r b_r^{-1} with b_r a Blaschke-Potapov product and s_r holomorphic in the region."""
    factors, cur = _extract(s, tol, "right")
    return cur, BPProduct(tuple(factors), s.domain, s.shape[1])


def check_noncancellation_left(b: BPProduct, s_l: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> bool:
    """b_l^{-1} s_l keeps all deg b_l poles, i.e. the pair is left coprime."""
    if b.degree == 0:
        return True
    return pole_mult_region(b.inverse_rational() @ s_l, tol) == b.degree


def check_noncancellation_right(s_r: RationalMVF, b: BPProduct, tol: Tolerances = DEFAULT_TOL) -> bool:
    if b.degree == 0:
        return True
    return pole_mult_region(s_r @ b.inverse_rational(), tol) == b.degree


def boundary_sup(s: RationalMVF, n: int = 64) -> float:
    pts = boundary_points(s.domain, n)
    vals = s(pts)
    return float(max(np.linalg.norm(v, 2) for v in vals))


def is_boundary_contractive(s: RationalMVF, n: int = 64, slack: float = 1e-7) -> bool:
    return boundary_sup(s, n) <= 1.0 + slack


def projection_onto(vectors, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto the span of the given columns."""
    v = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if numerical_rank(v, tol) == 0:
        return np.zeros((v.shape[0], v.shape[0]), dtype=complex)
    u, sv, _ = np.linalg.svd(v, full_matrices=False)
    r = numerical_rank(v, tol)
    return u[:, :r] @ u[:, :r].conj().T
