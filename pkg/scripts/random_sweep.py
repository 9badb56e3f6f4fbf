"""Random instances on either domain: residuals of W and the pipeline checks on the zero-parameter solution.

    python scripts/random_sweep.py --domain half-plane --p 2 --q 1 --count 20
"""
import argparse
import time
from dataclasses import dataclass

import numpy as np

from bitangential.domain import Domain, boundary_points, interior_grid
from bitangential.generators import InstanceConfig, random_instance
from bitangential.lft import parametrize, verify_solution
from bitangential.problem import validate
from bitangential.resolvent import (associated_pair, build_w, compute_K, factorization_residual,
                                    kernel_residual, sep_residual, theta_phi)


@dataclass
class SweepConfig:
    domain: Domain = Domain.DISC
    p: int = 1
    q: int = 1
    count: int = 10
    n_max: int = 3
    kappa_max: int = 2
    seed: int = 1


def sweep(cfg: SweepConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    failures = 0
    for it in range(cfg.count):
        ds = random_instance(rng, InstanceConfig(domain=cfg.domain, n_max=cfg.n_max, p=cfg.p, q=cfg.q,
                                                 kappa_max=cfg.kappa_max))
        rep = validate(ds)
        W = build_w(ds, rep.X)
        ju = max(np.linalg.norm(W(t) @ ds.j @ W(t).conj().T - ds.j) for t in boundary_points(cfg.domain, 16))
        pts = list(interior_grid(cfg.domain, 6))
        kr = kernel_residual(W, pts)
        pair = associated_pair(ds, W.X)
        tp = theta_phi(W, pair, compute_K(W, pair))
        sr, fr = sep_residual(tp, ds.j, pts), factorization_residual(tp, W, pts)
        ver = verify_solution(ds, parametrize(ds, W=W), pair=pair, W=W)
        ok = rep.ok and ver.passed
        failures += not ok
        print(f"{it:3d} n=({ds.n1},{ds.n2}) kappa={ds.kappa} j-unitary={ju:.1e} kernel={kr:.1e} "
              f"sep={sr:.1e} fact={fr:.1e} C1..C4={ver.c1.passed},{ver.c2.passed},{ver.c3.passed},"
              f"{ver.c4.passed} member={ver.membership.member} {'ok' if ok else 'FAIL'}")
    return failures


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--domain", default="disc", choices=("disc", "half-plane"))
    ap.add_argument("--p", type=int, default=1)
    ap.add_argument("--q", type=int, default=1)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    cfg = SweepConfig(Domain.parse(a.domain), a.p, a.q, a.count, seed=a.seed)
    t0 = time.perf_counter()
    failures = sweep(cfg)
    print(f"{failures} failures in {cfg.count} instances, {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
