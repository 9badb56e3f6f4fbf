"""The two model regions: the unit disc and the right half-plane.

Everything that depends on the choice of region (the kernel denominator,
reflection across the boundary, boundary and interior sample grids) is
collected here so the rest of the code can stay region agnostic.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

BOUNDARY_TOL = 1e-9


class Domain(str, Enum):
    DISC = "disc"
    HALF_PLANE = "half-plane"

    @classmethod
    def parse(cls, value) -> "Domain":
        if isinstance(value, Domain):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"disc": cls.DISC, "disk": cls.DISC, "d": cls.DISC,
                   "half-plane": cls.HALF_PLANE, "halfplane": cls.HALF_PLANE,
                   "right-half-plane": cls.HALF_PLANE, "rhp": cls.HALF_PLANE}
        if key not in aliases:
            raise ValueError(f"unknown domain {value!r}")
        return aliases[key]


def rho(domain: Domain, lam, omega):
    """Kernel denominator: 1 - lam*conj(omega) on the disc, lam + conj(omega) on the half-plane."""
    if domain is Domain.DISC:
        return 1.0 - lam * np.conj(omega)
    return lam + np.conj(omega)


def reflect(domain: Domain, lam: complex) -> complex:
    """Mirror image across the boundary (1/conj(lam) or -conj(lam))."""
    if domain is Domain.DISC:
        return np.inf if lam == 0 else 1.0 / np.conj(lam)
    return -np.conj(lam)


def in_interior(domain: Domain, lam: complex, tol: float = BOUNDARY_TOL) -> bool:
    if not np.isfinite(lam):
        return False
    if domain is Domain.DISC:
        return abs(lam) < 1.0 - tol
    return lam.real > tol


def in_exterior(domain: Domain, lam: complex, tol: float = BOUNDARY_TOL) -> bool:
    if not np.isfinite(lam):
        return True
    if domain is Domain.DISC:
        return abs(lam) > 1.0 + tol
    return lam.real < -tol


def on_boundary(domain: Domain, lam: complex, tol: float = BOUNDARY_TOL) -> bool:
    return not in_interior(domain, lam, tol) and not in_exterior(domain, lam, tol)


def boundary_points(domain: Domain, n: int = 64) -> np.ndarray:
    """n equispaced samples of the boundary (the half-plane grid is the Cayley image)."""
    theta = 2.0 * np.pi * (np.arange(n) + 0.5) / n
    z = np.exp(1j * theta)
    if domain is Domain.DISC:
        return z
    return 1j * np.tan(theta / 2.0 - np.pi / 2.0)


def interior_grid(domain: Domain, n: int = 25) -> np.ndarray:
    """Deterministic well-spread interior points (golden-angle spiral)."""
    k = np.arange(n)
    r = 0.9 * np.sqrt((k + 0.5) / n)
    z = r * np.exp(1j * k * np.pi * (3.0 - np.sqrt(5.0)))
    if domain is Domain.DISC:
        return z
    return (1.0 + z) / (1.0 - z)


def default_mu(domain: Domain) -> complex:
    return 1.0 + 0j if domain is Domain.DISC else 0j


def mu_candidates(domain: Domain, n: int = 64):
    """Deterministic sequence of boundary points tried as normalization point."""
    yield default_mu(domain)
    if domain is Domain.DISC:
        for k in range(1, n):
            yield np.exp(2j * np.pi * k * (np.sqrt(5.0) - 1.0) / 2.0)
    else:
        yield 1j
        for k in range(1, n):
            yield 1j * (0.5 + 0.37 * k) * (-1) ** k


def from_disc(domain: Domain, z):
    """Map disc points into the region (identity on the disc, Cayley on the half-plane)."""
    z = np.asarray(z)
    if domain is Domain.DISC:
        return z
    return (1.0 + z) / (1.0 - z)
