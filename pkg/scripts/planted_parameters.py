"""Planted parameters with a known number of inner poles, plus scalar parameters forced onto the excluded set.

For each instance and parameter, compares the Rouche zero count with kappa1 + kappa2, and
class membership of T_W[eps] (by pole counting) with the two regularity tests.
"""
import argparse
from dataclasses import dataclass

import numpy as np

from bitangential.domain import Domain
from bitangential.generators import InstanceConfig, excluded_parameter, planted_parameter, random_instance
from bitangential.lft import (class_membership, excluded_check, make_parameter, regularity_checks, rouche_count,
                              t_transform)
from bitangential.resolvent import associated_pair, build_w, phi_rows


@dataclass
class PlantedConfig:
    instances: int = 20
    per_instance: int = 5
    seed: int = 6
    n_max: int = 3
    kappa_max: int = 2


def run(cfg: PlantedConfig) -> tuple[int, int, int]:
    rng = np.random.default_rng(cfg.seed)
    total = count_ok = agree = 0
    for it in range(cfg.instances):
        p, q = (1, 1) if it % 4 else (2, 1)
        ds = random_instance(rng, InstanceConfig(domain=Domain.DISC, n_max=cfg.n_max, p=p, q=q,
                                                 kappa_max=cfg.kappa_max))
        W = build_w(ds)
        pair = associated_pair(ds, W.X)
        phis = phi_rows(W, pair)
        params = [planted_parameter(rng, p, q, int(rng.integers(0, 2)), Domain.DISC)
                  for _ in range(cfg.per_instance)]
        if p == q == 1:
            params += [e for e in (excluded_parameter(rng, phis, a) for a in ds.nodes()) if e is not None]
        for eps in params:
            par = make_parameter(eps, Domain.DISC)
            rc = rouche_count(phis, par)
            m = class_membership(t_transform(W, par.eps), ds.kappa + par.kappa2)
            member = m.contractive and m.pole_count == ds.kappa + par.kappa2
            reg1, reg2 = regularity_checks(W, pair, par)
            total += 1
            count_ok += rc == ds.kappa + par.kappa2
            agree += member == (reg1 and reg2)
            excluded = any(excluded_check(phis, par, ds.nodes()))
            print(f"inst {it:2d} kappa1={ds.kappa} kappa2={par.kappa2} rouche={rc} poles={m.pole_count} "
                  f"member={member} reg=({reg1},{reg2}) excluded={excluded}")
    return total, count_ok, agree


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--seed", type=int, default=6)
    a = ap.parse_args()
    total, count_ok, agree = run(PlantedConfig(instances=a.instances, seed=a.seed))
    print(f"rouche count correct {count_ok}/{total}, membership vs regularity {agree}/{total}")


if __name__ == "__main__":
    main()
