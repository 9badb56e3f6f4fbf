"""Walk the single-node 2x2 example through every stage and print the intermediate objects."""
import numpy as np

from bitangential.domain import Domain
from bitangential.lft import class_membership, make_parameter, parametrize, rouche_count, t_transform, verify_solution
from bitangential.problem import DataSet, validate
from bitangential.rational import RationalMVF
from bitangential.resolvent import associated_pair, build_w, compute_K, phi_rows


def show(label, value):
    print(f"{label}:\n{np.array2string(np.asarray(value), precision=4, suppress_small=True)}")


def main():
    ds = DataSet.create([[0.0]], np.zeros((0, 0)), [[2.0], [0.0], [0.0], [1.0]], 2, 2, mu=1.0)
    rep = validate(ds)
    print(f"valid={rep.ok} kappa1={rep.kappa1}")
    show("P", ds.P)

    W = build_w(ds)
    show("W(0.5)", W(0.5))
    pair = associated_pair(ds, W.X)
    show("b2(0.5)", pair.b2(0.5))
    K = compute_K(W, pair)
    show("K(0.5)", K(0.5))

    # a Schur parameter (pole at 4) whose image is s = diag(1/z, z)
    eps = RationalMVF.from_entries([[([3.0], [4.0, -1.0]), ([2.0, -2.0], [4.0, -1.0])],
                                    [([2.0, -2.0], [4.0, -1.0]), ([0.0, 3.0], [4.0, -1.0])]])
    s = t_transform(W, eps)
    show("s(0.5)", s(0.5))
    par = make_parameter(eps, Domain.DISC)
    print(f"kappa2={par.kappa2} rouche={rouche_count(phi_rows(W, pair), par)}")
    m = class_membership(s, ds.kappa + par.kappa2)
    print(f"member={m.member} poles={m.pole_count} sampled={m.sampled} sup={m.boundary_sup:.6f}")
    ver = verify_solution(ds, s, pair=pair, W=W)
    print(f"C1={ver.c1.passed} C2={ver.c2.passed} C3={ver.c3.passed} C4={ver.c4.passed}")

    s0 = parametrize(ds)
    ver0 = verify_solution(ds, s0, pair=pair, W=W)
    show("s0(0.5) from the zero parameter", s0(0.5))
    print(f"takagi_nudelman={ver0.takagi_nudelman}")


if __name__ == "__main__":
    main()
