"""Random problem instances for tests and experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BPFactor, BPProduct
from .domain import Domain
from .errors import BitangentialError, SingularEquationError
from .numeric import DEFAULT_TOL, Tolerances, inertia, is_observable
from .problem import DataSet
from .rational import RationalMVF


@dataclass(frozen=True)
class InstanceConfig:
    domain: Domain = Domain.DISC
    n_max: int = 4
    p: int = 1
    q: int = 1
    kappa_max: int | None = None
    spectral_radius: float = 0.7
    cond_max: float = 1e6
    one_sided: bool = False
    max_tries: int = 500


def _cgauss(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _stable_matrix(rng, n: int, domain: Domain, inside: bool, radius: float) -> np.ndarray:
    """Random n x n matrix with spectrum inside (or, for A2 on the half-plane, outside) the region."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    g = _cgauss(rng, n, n)
    if domain is Domain.DISC:
        rad = max(abs(np.linalg.eigvals(g)))
        return g * (radius * rng.uniform(0.3, 1.0) / rad)
    # half-plane: shift so the real parts sit on the right side
    ev = np.linalg.eigvals(g)
    shift = -ev.real.min() + rng.uniform(0.2, 1.0)
    a = g + shift * np.eye(n)
    return a if inside else -a


def random_instance(rng: np.random.Generator, cfg: InstanceConfig = InstanceConfig(),
                    tol: Tolerances = DEFAULT_TOL) -> DataSet:
    """A valid instance with invertible, reasonably conditioned P."""
    for _ in range(cfg.max_tries):
        n = int(rng.integers(1, cfg.n_max + 1))
        n1 = n if cfg.one_sided else int(rng.integers(0, n + 1))
        n2 = n - n1
        A1 = _stable_matrix(rng, n1, cfg.domain, True, cfg.spectral_radius)
        A2 = _stable_matrix(rng, n2, cfg.domain, False, cfg.spectral_radius)
        C = _cgauss(rng, cfg.p + cfg.q, n) * rng.uniform(0.3, 1.5)
        try:
            ds = DataSet.create(A1, A2, C, cfg.p, cfg.q, P="solve", domain=cfg.domain, tol=tol)
        except SingularEquationError:
            continue
        if np.linalg.cond(ds.P) > cfg.cond_max:
            continue
        if not (is_observable(ds.C21, ds.A1, tol) and is_observable(ds.C12, ds.A2, tol)):
            continue
        k1 = inertia(ds.P, tol).n_neg
        if cfg.kappa_max is not None and k1 > cfg.kappa_max:
            continue
        return ds.with_(kappa=k1)
    raise BitangentialError("could not generate an instance")


def random_blaschke(rng: np.random.Generator, size: int, degree: int, domain: Domain = Domain.DISC,
                    radius: float = 0.6) -> BPProduct:
    """Product of rank-one elementary factors with random zeros and directions."""
    factors = []
    for _ in range(degree):
        if domain is Domain.DISC:
            alpha = radius * rng.uniform(0.1, 1.0) * np.exp(2j * np.pi * rng.uniform())
        else:
            alpha = rng.uniform(0.2, 2.0) + 1j * rng.uniform(-1.0, 1.0)
        v = _cgauss(rng, size)
        v /= np.linalg.norm(v)
        factors.append(BPFactor(alpha, np.outer(v, v.conj()), domain))
    return BPProduct(tuple(factors), domain, size)


def random_contraction(rng: np.random.Generator, p: int, q: int, norm_max: float = 0.95) -> np.ndarray:
    g = _cgauss(rng, p, q)
    return g * (rng.uniform(0.05, norm_max) / max(np.linalg.norm(g, 2), 1e-300))


def planted_parameter(rng: np.random.Generator, p: int, q: int, kappa2: int,
                      domain: Domain = Domain.DISC) -> RationalMVF:
    """eps = eps_r theta_r^{-1} with eps_r a constant contraction and theta_r of degree kappa2."""
    e = RationalMVF.constant(random_contraction(rng, p, q), domain)
    if kappa2 == 0:
        return e
    theta = random_blaschke(rng, q, kappa2, domain)
    return e @ theta.inverse_rational()


def excluded_parameter(rng: np.random.Generator, phis, node: complex, domain: Domain = Domain.DISC,
                       max_tries: int = 60) -> RationalMVF | None:
    """Scalar eps = e / theta with phi21 e + phi22 theta vanishing at a node.

    theta is one Blaschke factor with zero near the node, pushed closer until |e| < 1.
    Returns None when phi21 vanishes at the node or no such contraction turns up.
    """
    f21, f22 = complex(phis.phi21(node)[0, 0]), complex(phis.phi22(node)[0, 0])
    if abs(f21) < 1e-8:
        return None
    d = 0.3 if domain is Domain.DISC else 0.3 * max(1.0, node.real)
    for _ in range(max_tries):
        b = node + d * np.exp(2j * np.pi * rng.uniform())
        inside = abs(b) < 0.95 if domain is Domain.DISC else b.real > 0.05 * max(1.0, node.real)
        if inside:
            theta = BPProduct((BPFactor(b, np.eye(1), domain),), domain, 1)
            e = -f22 * theta(node)[0, 0] / f21
            if abs(e) <= 0.95:
                return RationalMVF.constant(np.array([[e]]), domain) @ theta.inverse_rational()
        d *= 0.7
    return None
