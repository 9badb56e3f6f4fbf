"""Rational matrix-valued functions R(lambda) = Num(lambda) / den(lambda).

The numerator is a polynomial matrix stored as a complex array of shape
(rows, cols, degree + 1) with ascending coefficients; the denominator is
a single scalar polynomial. Common roots of the denominator and all
numerator entries are cancelled after every operation, which keeps
degrees in check and makes the denominator roots the candidate poles.

Pole and zero multiplicities follow the Laurent block-Toeplitz rank
definition and are computed from trapezoidal contour quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np
from numpy.polynomial import polynomial as npoly

from .domain import Domain, in_interior
from .errors import ShapeError, SingularEquationError
from .numeric import DEFAULT_TOL, Tolerances, numerical_rank

# relative size below which a coefficient is treated as an exact zero
_COEF_EPS = 1e-13
# a denominator root is cancelled when every numerator entry is this small there
_CANCEL_TOL = 1e-8
# denominator roots closer than this (relative) are one pole
CLUSTER_TOL = 1e-6
_CANCEL_CLUSTER = 1e-5  # wide enough for the sqrt(eps) split of double roots
# relative coefficient error behind the eps**(1/k) scatter of a k-fold root
_SPLIT_EPS = 1e-13
_SPLIT_MAX = 1e-3
N_QUAD = 256


# ---------------------------------------------------------------- polynomials

def poly_trim(c, scale: float | None = None) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    ref = np.max(np.abs(c)) if scale is None else scale
    if ref == 0:
        return np.zeros(1, dtype=complex)
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= _COEF_EPS * ref:
        k -= 1
    return c[:k].copy()


def poly_eval(c, x):
    return npoly.polyval(x, np.asarray(c, dtype=complex))


def poly_roots(c) -> np.ndarray:
    """Roots via companion-matrix eigenvalues."""
    c = poly_trim(c)
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1])


def poly_from_roots(roots) -> np.ndarray:
    out = np.ones(1, dtype=complex)
    for r in roots:
        out = npoly.polymul(out, [-r, 1.0])
    return np.asarray(out, dtype=complex)


def _deflate(c: np.ndarray, r: complex) -> np.ndarray:
    """Divide by (x - r), discarding the remainder; direction chosen for stability."""
    d = len(c) - 1
    if d == 0:
        return c.copy()
    b = np.zeros(d, dtype=complex)
    if abs(r) <= 1.0:
        b[d - 1] = c[d]
        for k in range(d - 1, 0, -1):
            b[k - 1] = c[k] + r * b[k]
    else:
        b[0] = -c[0] / r
        for k in range(1, d):
            b[k] = (b[k - 1] - c[k]) / r
    return b


def _group_roots(roots, tol: float) -> list[list[complex]]:
    """Group roots that look like one multiple root.

    A k-fold root computed in floating point scatters over a circle of radius
    about eps**(1/k), so the allowed spread of a group grows with its size.
    Larger groups are formed first, each from a root and its nearest neighbours.
    """
    left = [complex(r) for r in np.asarray(roots, dtype=complex).ravel()]
    groups: list[list[complex]] = []
    for k in range(len(left), 1, -1):
        lim_k = min(_SPLIT_MAX, max(tol, _SPLIT_EPS ** (1.0 / k)))
        while len(left) >= k:
            best = None
            for z in left:
                cand = sorted(left, key=lambda w: abs(w - z))[:k]
                c = np.mean(cand)
                spread = max(abs(w - c) for w in cand)
                if spread <= lim_k * max(1.0, abs(c)) and (best is None or spread < best[0]):
                    best = (spread, cand)
            if best is None:
                break
            groups.append(best[1])
            for w in best[1]:
                left.remove(w)
    groups += [[z] for z in left]
    return sorted(groups, key=lambda g: (np.mean(g).real, np.mean(g).imag))


def cluster_roots(roots, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group numerically coincident roots; returns (centre, multiplicity) pairs."""
    out = [(complex(np.mean(cl)), len(cl)) for cl in _group_roots(roots, tol)]
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return out


# ------------------------------------------------------------ polynomial matrices

def _pm_trim(num: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(num)) if num.size else 0.0
    if scale == 0:
        return np.zeros(num.shape[:2] + (1,), dtype=complex)
    k = num.shape[2]
    while k > 1 and np.max(np.abs(num[:, :, k - 1])) <= _COEF_EPS * scale:
        k -= 1
    return num[:, :, :k].copy()


def _pm_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    da, db = a.shape[2], b.shape[2]
    out = np.zeros((a.shape[0], b.shape[1], da + db - 1), dtype=complex)
    for k in range(da):
        out[:, :, k:k + db] += np.einsum("ij,jlb->ilb", a[:, :, k], b)
    return out


def _pm_scale(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Multiply a polynomial matrix by a scalar polynomial."""
    out = np.zeros(a.shape[:2] + (a.shape[2] + len(c) - 1,), dtype=complex)
    for k, ck in enumerate(c):
        out[:, :, k:k + a.shape[2]] += ck * a
    return out


def _pm_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = max(a.shape[2], b.shape[2])
    out = np.zeros(a.shape[:2] + (d,), dtype=complex)
    out[:, :, :a.shape[2]] += a
    out[:, :, :b.shape[2]] += b
    return out


def _pm_add_chopped(a: np.ndarray, b: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    """a + b with entries that cancel to roundoff (on unit-circle samples) set to zero."""
    c = _pm_add(a, b)
    z = np.exp(2j * np.pi * np.arange(32) / 32)
    va, vb, vc = (np.abs(_pm_eval(x, z)) for x in (a, b, c))
    dead = vc.max(axis=0) <= rel * (va + vb).max(axis=0)
    c[dead] = 0.0
    return c


def _pm_eval(num: np.ndarray, x):
    """Evaluate at scalar x -> (p, q), or at an array -> (len, p, q)."""
    vals = npoly.polyval(np.asarray(x), np.moveaxis(num, 2, 0))
    if np.ndim(x) == 0:
        return vals
    return np.moveaxis(vals, -1, 0)


def _fit_from_circle(values: np.ndarray, radius: float) -> np.ndarray:
    """Coefficients of a polynomial from samples at radius*exp(2 pi i k/N); axis 0 is k."""
    n = values.shape[0]
    c = np.fft.fft(values, axis=0) / n
    scale = radius ** (-np.arange(n, dtype=float))
    return c * scale.reshape((n,) + (1,) * (values.ndim - 1))


def _snap(c: np.ndarray, rel: float = 1e-14) -> np.ndarray:
    """Zero out interpolation noise (real and imaginary parts separately)."""
    ref = np.max(np.abs(c)) if c.size else 0.0
    re, im = c.real.copy(), c.imag.copy()
    re[np.abs(re) <= rel * ref] = 0.0
    im[np.abs(im) <= rel * ref] = 0.0
    return re + 1j * im


def _pm_det_adj(num: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinant and adjugate of a square polynomial matrix by interpolation."""
    n = num.shape[0]
    d = num.shape[2] - 1
    if n == 0:
        return np.ones(1, dtype=complex), np.zeros((0, 0, 1), dtype=complex)
    npts = n * d + 1
    z = np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = _pm_eval(num, z)  # (npts, n, n)
    det_v = np.linalg.det(vals)
    adj_v = np.zeros_like(vals)
    if n == 1:
        adj_v[:, 0, 0] = 1.0
    else:
        idx = np.arange(n)
        for i, j in iproduct(range(n), range(n)):
            minor = vals[:, idx != i][:, :, idx != j]
            adj_v[:, j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    det_c = _snap(_fit_from_circle(det_v, 1.0))
    adj_c = np.moveaxis(_snap(_fit_from_circle(adj_v, 1.0)), 0, 2)
    return det_c, adj_c[:, :, : max(1, (n - 1) * d + 1)]


# --------------------------------------------------------------------- class

def _as_domain(d) -> Domain:
    return Domain.parse(d)


class RationalMVF:
    """Rational matrix function with a polynomial-matrix numerator over a scalar denominator."""

    __array_priority__ = 100

    def __init__(self, num, den, domain=Domain.DISC, normalize: bool = True):
        num = np.asarray(num, dtype=complex)
        if num.ndim == 2:
            num = num[:, :, None]
        if num.ndim != 3:
            raise ShapeError("numerator must have shape (rows, cols, degree+1)")
        if num.shape[2] == 0:
            num = np.zeros(num.shape[:2] + (1,), dtype=complex)
        den = poly_trim(den)
        if np.all(den == 0):
            raise ZeroDivisionError("denominator is identically zero")
        self.domain = _as_domain(domain)
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._cluster_cache = None

    # construction helpers
    @classmethod
    def constant(cls, m, domain=Domain.DISC) -> "RationalMVF":
        m = np.atleast_2d(np.asarray(m, dtype=complex))
        return cls(m[:, :, None], [1.0], domain, normalize=False)

    @classmethod
    def identity(cls, n: int, domain=Domain.DISC) -> "RationalMVF":
        return cls.constant(np.eye(n), domain)

    @classmethod
    def zeros(cls, p: int, q: int, domain=Domain.DISC) -> "RationalMVF":
        return cls.constant(np.zeros((p, q)), domain)

    @classmethod
    def scalar(cls, num, den=(1.0,), domain=Domain.DISC) -> "RationalMVF":
        return cls(np.asarray(num, dtype=complex).reshape(1, 1, -1), den, domain)

    @classmethod
    def variable(cls, domain=Domain.DISC) -> "RationalMVF":
        return cls.scalar([0.0, 1.0], [1.0], domain)

    @classmethod
    def from_entries(cls, entries, domain=Domain.DISC) -> "RationalMVF":
        """Build from a nested list of (num_coeffs, den_coeffs) pairs."""
        rows = []
        for row in entries:
            rows.append([cls.scalar(np.atleast_1d(n), np.atleast_1d(d), domain) for n, d in row])
        return block(rows)

    @classmethod
    def coerce(cls, x, domain=Domain.DISC) -> "RationalMVF":
        if isinstance(x, RationalMVF):
            return x
        return cls.constant(x, domain)

    # basic properties
    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape[0], self.num.shape[1]

    @property
    def num_degree(self) -> int:
        return self.num.shape[2] - 1

    @property
    def den_degree(self) -> int:
        return len(self.den) - 1

    def __repr__(self) -> str:
        return (f"RationalMVF(shape={self.shape}, num_deg={self.num_degree}, "
                f"den_deg={self.den_degree}, domain={self.domain.value})")

    # evaluation
    def __call__(self, lam):
        return eval_rational(self, lam)

    def is_constant(self) -> bool:
        return self.num_degree == 0 and self.den_degree == 0

    # slicing
    def __getitem__(self, key) -> "RationalMVF":
        if not isinstance(key, tuple) or len(key) != 2:
            raise IndexError("use R[rows, cols]")
        r, c = key
        sub = self.num[r, c, :]
        if sub.ndim != 3:
            rows = np.arange(self.shape[0])[r]
            cols = np.arange(self.shape[1])[c]
            sub = self.num[np.ix_(np.atleast_1d(rows), np.atleast_1d(cols))]
        return RationalMVF(sub, self.den, self.domain)

    @property
    def T(self) -> "RationalMVF":
        return RationalMVF(np.transpose(self.num, (1, 0, 2)), self.den, self.domain, normalize=False)

    # arithmetic
    def __matmul__(self, other) -> "RationalMVF":
        return mul(self, RationalMVF.coerce(other, self.domain))

    def __rmatmul__(self, other) -> "RationalMVF":
        return mul(RationalMVF.coerce(other, self.domain), self)

    def __add__(self, other) -> "RationalMVF":
        return add(self, RationalMVF.coerce(other, self.domain))

    __radd__ = __add__

    def __sub__(self, other) -> "RationalMVF":
        return add(self, -RationalMVF.coerce(other, self.domain))

    def __rsub__(self, other) -> "RationalMVF":
        return add(RationalMVF.coerce(other, self.domain), -self)

    def __neg__(self) -> "RationalMVF":
        return RationalMVF(-self.num, self.den, self.domain, normalize=False)

    def __mul__(self, other) -> "RationalMVF":
        if isinstance(other, RationalMVF):
            if other.shape == (1, 1):
                return scale(self, other)
            if self.shape == (1, 1):
                return scale(other, self)
            raise ShapeError("use @ for matrix products")
        return RationalMVF(self.num * complex(other), self.den, self.domain, normalize=False)

    __rmul__ = __mul__

    def inverse(self) -> "RationalMVF":
        return inverse(self)

    def sharp(self) -> "RationalMVF":
        return adjoint_sharp(self)

    def clusters(self) -> list[tuple[complex, int]]:
        if self._cluster_cache is None:
            self._cluster_cache = cluster_roots(poly_roots(self.den))
        return self._cluster_cache

    def poles_in(self, region: str = "interior") -> list[tuple[complex, int]]:
        """Denominator root clusters lying in the open region (or its exterior)."""
        from .domain import in_exterior
        test = in_interior if region == "interior" else in_exterior
        return [(c, k) for c, k in self.clusters() if test(self.domain, c)]


def _normalize(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if num.size == 0:
        return np.zeros(num.shape[:2] + (1,), dtype=complex), np.ones(1, dtype=complex)
    num = _pm_trim(num)
    if np.max(np.abs(num)) == 0:
        return num[:, :, :1] * 0, np.ones(1, dtype=complex)
    den = poly_trim(den)
    # exact powers of lambda first
    nscale = np.max(np.abs(num))
    dscale = np.max(np.abs(den))
    kd = 0
    while kd < len(den) - 1 and abs(den[kd]) <= _COEF_EPS * dscale:
        kd += 1
    kn = 0
    while kn < num.shape[2] - 1 and np.max(np.abs(num[:, :, kn])) <= _COEF_EPS * nscale:
        kn += 1
    k = min(kd, kn)
    if k:
        num = num[:, :, k:]
        den = den[k:]
    # approximate common roots, one cluster of den roots at a time; a split
    # multiple root has an accurate centre even when its members are not
    if len(den) > 1 and num.shape[2] > 1:
        keep: list[complex] = []
        changed = False
        for members in _group_roots(poly_roots(den), _CANCEL_CLUSTER):
            c = complex(np.mean(members))
            v = _vanishing_order(num, c, len(members))
            if v == 0:
                keep.extend(members)
                continue
            changed = True
            for _ in range(v):
                num = np.stack([np.stack([_deflate(num[i, j], c) for j in range(num.shape[1])])
                                for i in range(num.shape[0])])
            keep.extend([c] * (len(members) - v))
        if changed:
            num = _pm_trim(num)
            den = den[-1] * poly_from_roots(keep)
    lead = den[-1]
    return num / lead, den / lead


def _vanishing_order(num: np.ndarray, c: complex, m: int) -> int:
    """How many of the first m Taylor coefficients of num at c vanish (entrywise, relative)."""
    coef = np.moveaxis(num, 2, 0)
    mag = np.abs(coef)
    for j in range(m):
        val = npoly.polyval(c, npoly.polyder(coef, j)) if coef.shape[0] > j else np.zeros(num.shape[:2])
        ref = npoly.polyval(abs(c), npoly.polyder(mag, j)).real if mag.shape[0] > j else np.zeros(num.shape[:2])
        floor = _COEF_EPS * np.max(ref)  # entries that are pure roundoff
        if not np.all(np.abs(val) <= _CANCEL_TOL * ref + floor + 1e-300):
            return j
    return m


# ------------------------------------------------------------------ operations

class LazyMVF:
    """A rational function kept as a callable plus the functions it is built from.

    Candidate poles are the union of the parts' poles, so the Laurent
    machinery applies without multiplying polynomials out; this avoids the
    coefficient growth that blurs exact cancellations in long products.
    """

    n_quad = 64  # pointwise evaluation is costly; radius <= half the gap keeps aliasing ~2^-64

    def __init__(self, fn, parts, shape: tuple[int, int], domain=Domain.DISC, scale=None):
        self._fn = fn
        self.scale = scale  # optional z -> size of the ingredients, for cancellation thresholds
        self.parts = [x for x in parts if isinstance(x, (RationalMVF, LazyMVF))]
        self.shape = tuple(shape)
        self.domain = _as_domain(domain)
        self._cluster_cache = None

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        if lam.ndim == 0:
            return np.asarray(self._fn(complex(lam)), dtype=complex)
        return np.stack([np.asarray(self._fn(complex(z)), dtype=complex) for z in lam.ravel()])

    def clusters(self) -> list[tuple[complex, int]]:
        if self._cluster_cache is None:
            merged: list[list] = []
            for part in self.parts:
                for c, k in part.clusters():
                    for item in merged:
                        if abs(item[0] - c) <= CLUSTER_TOL * max(1.0, abs(c)):
                            item[1] += k
                            break
                    else:
                        merged.append([c, k])
            self._cluster_cache = [(complex(c), int(k)) for c, k in merged]
        return self._cluster_cache

    poles_in = RationalMVF.poles_in


def lazy_product(*factors, domain=None, shape=None) -> LazyMVF:
    """Pointwise product of rational functions and constant matrices."""
    dom = domain or next(f.domain for f in factors if isinstance(f, (RationalMVF, LazyMVF)))
    mats = [f for f in factors]

    def fn(z):
        out = None
        for f in mats:
            v = f(z) if callable(f) else np.asarray(f)
            out = v if out is None else out @ v
        return out
    def size(z):
        out = 1.0
        for f in mats:
            out *= np.linalg.norm(f(z) if callable(f) else np.asarray(f), 2)
        return out
    if shape is None:
        z0 = 0.123 + 0.0456j
        shape = np.shape(fn(z0))
    return LazyMVF(fn, factors, shape, dom, scale=size)


def fit_over_denominator(fn, den, shape: tuple[int, int], degree: int,
                         domain=Domain.DISC, radius: float = 1.0) -> RationalMVF:
    """The rational N/den whose values match fn, given den and a bound on deg N.

    N = den * fn is sampled on a circle and its coefficients are read off
    by FFT; the circle radius is nudged away from the roots of den. The
    result is left unnormalized, so den may carry redundant roots.
    """
    den = np.asarray(den, dtype=complex)
    roots = poly_roots(den)
    n_fit = 1 << int(np.ceil(np.log2(2 * (degree + 1))))
    for _ in range(20):
        if all(abs(abs(r) - radius) > 0.05 * max(radius, 1.0) for r in roots):
            break
        radius *= 1.13
    z = radius * np.exp(2j * np.pi * np.arange(n_fit) / n_fit)
    vals = np.stack([np.asarray(fn(zk), dtype=complex) * poly_eval(den, zk) for zk in z])
    coeffs = _snap(_fit_from_circle(vals, radius))[: degree + 1]
    num = _pm_trim(np.transpose(coeffs, (1, 2, 0)).reshape(shape + (degree + 1,)))
    # no cancellation pass: den is trusted, and cancelling near-double roots would move poles
    lead = den[-1]
    return RationalMVF(num / lead, den / lead, domain, normalize=False)


def eval_rational(r: RationalMVF, lam):
    """Evaluate at a scalar (returns p x q) or an array of points (returns N x p x q)."""
    lam = np.asarray(lam, dtype=complex)
    if not isinstance(r, RationalMVF):
        return r(lam)
    nv = _pm_eval(r.num, lam)
    dv = poly_eval(r.den, lam)
    if lam.ndim == 0:
        return nv / dv
    return nv / dv[:, None, None]


def mul(a: RationalMVF, b: RationalMVF) -> RationalMVF:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    num = _pm_mul(a.num, b.num)
    den = npoly.polymul(a.den, b.den)
    skip = a.is_constant() or b.is_constant()
    return RationalMVF(num, den, a.domain, normalize=not skip)


def scale(a: RationalMVF, f: RationalMVF) -> RationalMVF:
    """Multiply every entry of a by the scalar rational f."""
    num = _pm_scale(a.num, f.num[0, 0])
    den = npoly.polymul(a.den, f.den)
    return RationalMVF(num, den, a.domain)


def add(a: RationalMVF, b: RationalMVF) -> RationalMVF:
    if a.shape != b.shape:
        raise ShapeError(f"cannot add {a.shape} and {b.shape}")
    if len(a.den) == len(b.den) and np.array_equal(a.den, b.den):
        return RationalMVF(_pm_add(a.num, b.num), a.den, a.domain)
    if b.den_degree == 0:
        return RationalMVF(_pm_add(a.num, _pm_scale(b.num, a.den / b.den[0])), a.den, a.domain)
    if a.den_degree == 0:
        return RationalMVF(_pm_add(_pm_scale(a.num, b.den / a.den[0]), b.num), b.den, a.domain)
    num = _pm_add(_pm_scale(a.num, b.den), _pm_scale(b.num, a.den))
    return RationalMVF(num, npoly.polymul(a.den, b.den), a.domain)


def add_chopped(a: RationalMVF, b: RationalMVF, rel: float = 1e-10) -> RationalMVF:
    """a + b with entries that cancel to roundoff set exactly to zero.

    Cancellation is judged on boundary samples against |a_ij| + |b_ij|.
    """
    c = add(a, b)
    from .domain import boundary_points
    pts = boundary_points(a.domain, 32)
    va, vb, vc = np.abs(a(pts)), np.abs(b(pts)), np.abs(c(pts))
    dead = vc.max(axis=0) <= rel * (va + vb).max(axis=0)
    if not dead.any():
        return c
    num = c.num.copy()
    num[dead] = 0.0
    return RationalMVF(num, c.den, c.domain)


def inverse(r: RationalMVF) -> RationalMVF:
    p, q = r.shape
    if p != q:
        raise ShapeError("inverse needs a square function")
    if p == 0:
        return r
    det_c, adj_c = _pm_det_adj(r.num)
    det_c = poly_trim(det_c, scale=max(np.max(np.abs(det_c)), 1e-300))
    if np.max(np.abs(det_c)) <= 1e-14 * max(1.0, np.max(np.abs(r.num))) ** p:
        raise SingularEquationError("matrix function is singular")
    num = _pm_scale(adj_c, r.den)
    return RationalMVF(num, det_c, r.domain)


def right_divide(a: np.ndarray, b: np.ndarray, domain=Domain.DISC) -> RationalMVF:
    """A(lam) B(lam)^{-1} for polynomial matrices A, B (B square)."""
    det_c, adj_c = _pm_det_adj(b)
    det_c = poly_trim(det_c, scale=max(np.max(np.abs(det_c)), 1e-300))
    if np.max(np.abs(det_c)) <= 1e-14 * max(1.0, np.max(np.abs(b))) ** b.shape[0]:
        raise SingularEquationError("matrix function is singular")
    return RationalMVF(_pm_mul(a, adj_c), det_c, domain)


def left_divide(b: np.ndarray, a: np.ndarray, domain=Domain.DISC) -> RationalMVF:
    """B(lam)^{-1} A(lam) for polynomial matrices A, B (B square)."""
    det_c, adj_c = _pm_det_adj(b)
    det_c = poly_trim(det_c, scale=max(np.max(np.abs(det_c)), 1e-300))
    if np.max(np.abs(det_c)) <= 1e-14 * max(1.0, np.max(np.abs(b))) ** b.shape[0]:
        raise SingularEquationError("matrix function is singular")
    return RationalMVF(_pm_mul(adj_c, a), det_c, domain)


def det(r: RationalMVF) -> RationalMVF:
    """Scalar determinant as a 1x1 rational function."""
    p, q = r.shape
    if p != q:
        raise ShapeError("det needs a square function")
    det_c, _ = _pm_det_adj(r.num)
    den = np.ones(1, dtype=complex)
    for _ in range(p):
        den = npoly.polymul(den, r.den)
    return RationalMVF(np.asarray(det_c).reshape(1, 1, -1), den, r.domain)


def adjoint_sharp(r: RationalMVF) -> RationalMVF:
    """f^#(lambda) = f(reflection of lambda)^*."""
    num, den = r.num, r.den
    if r.domain is Domain.DISC:
        big = max(num.shape[2], len(den)) - 1
        new_num = np.zeros(num.shape[:2] + (big + 1,), dtype=complex)
        new_den = np.zeros(big + 1, dtype=complex)
        for k in range(num.shape[2]):
            new_num[:, :, big - k] = np.conj(num[:, :, k])
        for k in range(len(den)):
            new_den[big - k] = np.conj(den[k])
    else:
        sign = (-1.0) ** np.arange(max(num.shape[2], len(den)))
        new_num = np.conj(num) * sign[: num.shape[2]]
        new_den = np.conj(den) * sign[: len(den)]
    return RationalMVF(np.transpose(new_num, (1, 0, 2)), new_den, r.domain)


def block(rows) -> RationalMVF:
    """Assemble a block matrix from a nested list of RationalMVF (or constant arrays)."""
    domain = None
    for row in rows:
        for x in row:
            if isinstance(x, RationalMVF):
                domain = x.domain
                break
    domain = domain or Domain.DISC
    items = [[RationalMVF.coerce(x, domain) for x in row] for row in rows]
    dens: list[np.ndarray] = []
    for row in items:
        for x in row:
            if x.den_degree > 0 and not any(len(d) == len(x.den) and np.array_equal(d, x.den)
                                            for d in dens):
                dens.append(x.den)
    common = np.ones(1, dtype=complex)
    for d in dens:
        common = npoly.polymul(common, d)
    blocks = []
    for row in items:
        brow = []
        for x in row:
            # x.num / x.den == x.num * (product of the other denominators) / common
            factor = np.ones(1, dtype=complex) / x.den[-1]
            skipped = x.den_degree == 0
            for d in dens:
                if not skipped and len(d) == len(x.den) and np.array_equal(d, x.den):
                    skipped = True
                    continue
                factor = npoly.polymul(factor, d)
            brow.append(_pm_scale(x.num, factor))
        blocks.append(brow)
    degree = max(b.shape[2] for row in blocks for b in row)
    padded = [[np.concatenate([b, np.zeros(b.shape[:2] + (degree - b.shape[2],), dtype=complex)], axis=2)
               for b in row] for row in blocks]
    num = np.concatenate([np.concatenate(row, axis=1) for row in padded], axis=0)
    return RationalMVF(num, common, domain)


def hstack(items) -> RationalMVF:
    return block([list(items)])


def vstack(items) -> RationalMVF:
    return block([[x] for x in items])


# ------------------------------------------------------------ Laurent analysis

@dataclass(frozen=True)
class LaurentBlock:
    """Laurent coefficients G_j for j = lo, ..., hi about ``center``."""

    center: complex
    radius: float
    lo: int
    coeffs: np.ndarray  # shape (hi - lo + 1, p, q)

    def coeff(self, j: int) -> np.ndarray:
        return self.coeffs[j - self.lo]

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.shape[0] - 1

    def principal(self) -> list[np.ndarray]:
        """[G_{-k}, ..., G_{-1}] with k = -lo."""
        return [self.coeff(j) for j in range(self.lo, 0)]

    def evaluate(self, lam) -> np.ndarray:
        u = lam - self.center
        return sum(self.coeff(j) * u ** j for j in range(self.lo, self.hi + 1))


def _default_radius(r: RationalMVF, lam0: complex) -> float:
    others = [abs(c - lam0) for c, _ in r.clusters()
              if abs(c - lam0) > CLUSTER_TOL * max(1.0, abs(lam0))]
    if not others:
        return 0.5 * max(1.0, abs(lam0))
    return 0.5 * min(others)


def _circle_samples(r: RationalMVF, lam0: complex, radius: float, n_quad: int):
    theta = 2.0 * np.pi * np.arange(n_quad) / n_quad
    zeta = lam0 + radius * np.exp(1j * theta)
    return theta, eval_rational(r, zeta)


def laurent(r: RationalMVF, lam0: complex, k_max: int, radius: float | None = None,
            n_quad: int = N_QUAD, k_pos: int = 0) -> LaurentBlock:
    """Laurent coefficients G_{-k_max} .. G_{k_pos} about lam0 by trapezoidal quadrature."""
    lam0 = complex(lam0)
    if radius is None:
        radius = _default_radius(r, lam0)
    _, vals = _circle_samples(r, lam0, radius, n_quad)
    fft = np.fft.fft(vals, axis=0) / n_quad  # index j -> coefficient of u^j (u=(z-lam0)/radius)
    js = np.arange(-k_max, k_pos + 1)
    coeffs = np.stack([fft[j % n_quad] * radius ** (-float(j)) for j in js])
    return LaurentBlock(lam0, float(radius), -k_max, coeffs)


def _scaled_principal(r: RationalMVF, lam0: complex, k_max: int, tol: Tolerances,
                      radius: float | None = None) -> list[np.ndarray]:
    """Principal-part coefficients in the scaled variable, small ones set to zero."""
    if radius is None:
        radius = _default_radius(r, lam0)
    nq = getattr(r, "n_quad", N_QUAD)
    _, vals = _circle_samples(r, lam0, radius, nq)
    fft = np.fft.fft(vals, axis=0) / nq
    ref = max(np.max(np.abs(vals)), 1e-300)
    if getattr(r, "scale", None) is not None:
        zeta = lam0 + radius * np.exp(2j * np.pi * np.arange(0, nq, 4) / nq)
        ref = max(ref, max(r.scale(z) for z in zeta))
    out = []
    for j in range(k_max, 0, -1):
        g = fft[(-j) % nq]
        out.append(np.zeros_like(g) if np.max(np.abs(g)) <= tol.eig_tol * ref else g)
    # drop leading zero coefficients
    while out and not np.any(out[0]):
        out.pop(0)
    return out


def toeplitz_from_principal(principal: list[np.ndarray]) -> np.ndarray:
    """Block lower-triangular Toeplitz matrix with G_{-k} on the diagonal."""
    k = len(principal)
    if k == 0:
        return np.zeros((0, 0), dtype=complex)
    p, q = principal[0].shape
    t = np.zeros((k * p, k * q), dtype=complex)
    for a in range(k):
        for b in range(a + 1):
            t[a * p:(a + 1) * p, b * q:(b + 1) * q] = principal[a - b]
    return t


def _find_cluster(r: RationalMVF, lam0: complex):
    for c, k in r.clusters():
        if abs(c - lam0) <= 1e3 * CLUSTER_TOL * max(1.0, abs(c)):
            return c, k
    return None


def pole_mult_at(r: RationalMVF, lam0: complex, tol: Tolerances = DEFAULT_TOL) -> int:
    """Pole multiplicity at lam0: rank of the principal-part block Toeplitz matrix."""
    hit = _find_cluster(r, complex(lam0))
    if hit is None:
        return 0
    centre, k_max = hit
    principal = _scaled_principal(r, centre, k_max, tol)
    if not principal:
        return 0
    return numerical_rank(toeplitz_from_principal(principal), tol)


def pole_mult_region(r: RationalMVF, tol: Tolerances = DEFAULT_TOL, region: str = "interior") -> int:
    """Total pole multiplicity in the open region (or in its exterior)."""
    return sum(pole_mult_at(r, c, tol) for c, _ in r.poles_in(region))


def poles_with_mult(r: RationalMVF, tol: Tolerances = DEFAULT_TOL,
                    region: str = "interior") -> list[tuple[complex, int]]:
    out = []
    for c, _ in r.poles_in(region):
        k = pole_mult_at(r, c, tol)
        if k:
            out.append((c, k))
    return out


def zero_mult_region(r: RationalMVF, tol: Tolerances = DEFAULT_TOL, region: str = "interior") -> int:
    """Zero multiplicity of a square function: pole multiplicity of its inverse."""
    return pole_mult_region(inverse(r), tol, region)


def coprime_left_check(g: RationalMVF, h: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Left coprimeness over the open region: M(G^{-1}H) = M(G^{-1})."""
    gi = inverse(g)
    return pole_mult_region(gi @ h, tol) == pole_mult_region(gi, tol)


def coprime_right_check(g: RationalMVF, h: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Right coprimeness over the open region: M(H G^{-1}) = M(G^{-1})."""
    gi = inverse(g)
    return pole_mult_region(h @ gi, tol) == pole_mult_region(gi, tol)


def is_holomorphic_in(r: RationalMVF, tol: Tolerances = DEFAULT_TOL) -> bool:
    return pole_mult_region(r, tol) == 0


def sup_norm_on(r: RationalMVF, pts) -> float:
    """Largest spectral norm over the sample points."""
    vals = eval_rational(r, np.asarray(pts))
    return float(max(np.linalg.norm(v, 2) for v in vals)) if len(vals) else 0.0
