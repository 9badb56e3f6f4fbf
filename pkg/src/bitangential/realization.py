"""State-space realizations F(lam) = D + C (A - lam I)^{-1} B."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Domain
from .errors import SingularEquationError
from .rational import RationalMVF, _pm_det_adj


@dataclass(frozen=True)
class Realization:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    domain: Domain = Domain.DISC

    @property
    def shape(self) -> tuple[int, int]:
        return self.D.shape

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=complex)
        n = self.A.shape[0]
        if n == 0:
            return np.broadcast_to(self.D, lam.shape + self.D.shape).copy()
        if lam.ndim == 0:
            return self.D + self.C @ np.linalg.solve(self.A - lam * np.eye(n), self.B)
        pen = self.A[None] - lam.ravel()[:, None, None] * np.eye(n)[None]
        out = self.D[None] + self.C[None] @ np.linalg.solve(pen, np.broadcast_to(self.B, pen.shape[:1] + self.B.shape))
        return out.reshape(lam.shape + self.D.shape)

    def as_rational(self) -> RationalMVF:
        n = self.A.shape[0]
        if n == 0:
            return RationalMVF.constant(self.D, self.domain)
        det_c, adj_c = _pm_det_adj(np.stack([self.A, -np.eye(n)], axis=2))
        cab = np.einsum("ik,klt,lj->ijt", self.C, adj_c, self.B)
        num = np.zeros(self.D.shape + (max(len(det_c), cab.shape[2]),), dtype=complex)
        num[:, :, :len(det_c)] += self.D[:, :, None] * det_c[None, None, :]
        num[:, :, :cab.shape[2]] += cab
        return RationalMVF(num, det_c, self.domain)


def pg_realization(r: Realization, p: int) -> Realization:
    """Potapov-Ginzburg transform: inputs (u1, y2) and outputs (y1, u2) of the system r."""
    A, B, C, D = r.A, r.B, r.C, r.D
    B1, B2 = B[:, :p], B[:, p:]
    C1, C2 = C[:p], C[p:]
    D11, D12, D21, D22 = D[:p, :p], D[:p, p:], D[p:, :p], D[p:, p:]
    if D22.size and np.linalg.svd(D22, compute_uv=False)[-1] <= 1e-12 * max(1.0, np.linalg.norm(D)):
        raise SingularEquationError("w22 is singular at infinity")
    i22 = np.linalg.inv(D22)
    Ax = A + B2 @ i22 @ C2  # sign from the (A - lam I)^{-1} convention
    Bx = np.hstack([B1 - B2 @ i22 @ D21, B2 @ i22])
    Cx = np.vstack([C1 - D12 @ i22 @ C2, -i22 @ C2])
    Dx = np.block([[D11 - D12 @ i22 @ D21, D12 @ i22], [-i22 @ D21, i22]])
    return Realization(Ax, Bx, Cx, Dx, r.domain)
