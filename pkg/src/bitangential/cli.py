"""Command-line front end.

Usage::

    python -m bitangential validate problem.json
    python -m bitangential solve problem.json --emit s
    python -m bitangential verify problem.json
    python -m bitangential pick problem.json

Exit codes: 0 success, 1 verification failed, 2 validation failed, 3 parse error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .errors import BitangentialError, ParseError
from .lft import (VerificationReport, find_admissible_constant, parametrize,
                  t_transform, verify_solution)
from .numeric import Tolerances, inertia
from .problem import DataSet, ValidationReport, nu_degenerate, pick_matrix_np, validate
from .resolvent import associated_pair, build_w, compute_K, phi_rows
from .serialize import ProblemFile, emit_report, enc_complex, load_problem

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INVALID = 2
EXIT_PARSE = 3

EMIT_CHOICES = ("W", "pair", "K", "s", "all")


def validation_json(rep: ValidationReport) -> dict:
    return {"b1": rep.b1_ok, "b2": rep.b2_ok, "b3": rep.b3_ok, "b4": rep.b4_ok, "ok": rep.ok,
            "equation_residual": rep.stein_residual, "kappa1": rep.kappa1,
            "diagnostics": rep.diagnostics}


def verification_json(rep: VerificationReport) -> dict:
    checks = {name: {"passed": c.passed, "detail": c.detail, "data": c.data}
              for name, c in (("C1", rep.c1), ("C2", rep.c2), ("C3", rep.c3), ("C4", rep.c4))}
    m = rep.membership
    return {"checks": checks, "kappa": rep.kappa, "kappa_actual": rep.kappa_actual,
            "membership": {"member": m.member, "agree": m.agree, "contractive": m.contractive,
                           "boundary_sup": m.boundary_sup, "pole_count": m.pole_count,
                           "sampled_negative_squares": m.sampled},
            "coprime": {"reg1": rep.coprime_a, "reg2": rep.coprime_b},
            "interpolation_ok": rep.interpolation_ok, "passed": rep.passed,
            "takagi_nudelman": rep.takagi_nudelman}


def _header(cmd: str, args, pf: ProblemFile, ds: DataSet) -> dict:
    t = pf.tolerances
    return {"command": cmd, "file": args.file, "domain": ds.domain.value, "p": ds.p, "q": ds.q,
            "n1": ds.n1, "n2": ds.n2, "kappa": ds.kappa, "mu": enc_complex(ds.mu),
            "tolerances": {"rank": t.rank_tol, "eig": t.eig_tol, "residual": t.residual_tol}}


def _tolerances(pf: ProblemFile, args) -> Tolerances:
    return pf.tolerances.with_(rank_tol=args.tol_rank, eig_tol=args.tol_eig, residual_tol=args.tol_res)


def _prepare(cmd: str, args):
    pf = load_problem(args.file, args.domain)
    pf.tolerances = _tolerances(pf, args)
    ds = pf.dataset()
    rep = validate(ds, pf.tolerances)
    out = _header(cmd, args, pf, ds)
    out["validation"] = validation_json(rep)
    out["P"] = ds.P
    out["X"] = rep.X
    return pf, ds, rep, out


def cmd_validate(args) -> tuple[dict, int]:
    _, _, rep, out = _prepare("validate", args)
    return out, EXIT_OK if rep.ok else EXIT_INVALID


def _default_parameter(ds: DataSet, W, pair, nu: int, seed: int, tol: Tolerances):
    """Zero for degenerate data, otherwise a constant parameter avoiding the excluded set."""
    if nu:
        return np.zeros((ds.p - nu, ds.q - nu))
    phis = phi_rows(W, pair)
    return find_admissible_constant(ds, phis, ds.nodes(), seed=seed, tol=tol)


def cmd_solve(args) -> tuple[dict, int]:
    pf, ds, rep, out = _prepare("solve", args)
    if not rep.ok:
        return out, EXIT_INVALID
    tol = pf.tolerances
    emit = set(EMIT_CHOICES[:-1]) if args.emit == "all" else {args.emit}
    W = build_w(ds, rep.X, tol)
    nu = nu_degenerate(ds, tol)
    out["nu"] = nu
    errors: dict = {}
    pair = None
    try:
        pair = associated_pair(ds, W.X, tol)
    except (BitangentialError, np.linalg.LinAlgError) as exc:
        errors["pair"] = str(exc)
    if "W" in emit:
        out["W"] = W.as_rational
    if "pair" in emit and pair is not None:
        out["pair"] = {"b1": pair.b1, "b2": pair.b2}
    if "K" in emit and pair is not None:
        try:
            out["K"] = compute_K(W, pair, tol)
        except (BitangentialError, np.linalg.LinAlgError) as exc:
            errors["K"] = str(exc)

    if pf.epsilon is not None:
        eps = pf.epsilon
        if eps.shape == (ds.p, ds.q) and nu:
            s = t_transform(W, eps)
        else:
            s = parametrize(ds, eps, W, tol)
        out["epsilon_source"] = "file"
    else:
        if pair is None:
            return _fail(out, errors, "no associated pair for the default parameter")
        try:
            eps = _default_parameter(ds, W, pair, nu, args.seed, tol)
        except BitangentialError as exc:
            return _fail(out, errors, str(exc))
        s = parametrize(ds, eps, W, tol)
        out["epsilon_source"] = "default"
        out["epsilon"] = eps
    if "s" in emit:
        out["s"] = s
    ver = verify_solution(ds, s, pair=pair, W=W, tol=tol)
    out["verification"] = verification_json(ver)
    if errors:
        out["errors"] = errors
    return out, EXIT_OK if ver.passed else EXIT_VERIFY


def _fail(out: dict, errors: dict, msg: str) -> tuple[dict, int]:
    errors["solve"] = msg
    out["errors"] = errors
    return out, EXIT_VERIFY


def cmd_verify(args) -> tuple[dict, int]:
    pf, ds, rep, out = _prepare("verify", args)
    if pf.candidate_s is None:
        raise ParseError("required for verify", "candidate_s")
    if not rep.ok:
        return out, EXIT_INVALID
    ver = verify_solution(ds, pf.candidate_s, tol=pf.tolerances)
    out["verification"] = verification_json(ver)
    return out, EXIT_OK if ver.passed else EXIT_VERIFY


def cmd_pick(args) -> tuple[dict, int]:
    pf = load_problem(args.file, args.domain)
    pf.tolerances = _tolerances(pf, args)
    if pf.points is not None:
        pick = pick_matrix_np(pf.points, pf.values, pf.tolerances)
        ds = pf.dataset()
    else:
        ds = pf.dataset()
        pick = ds.P
    out = _header("pick", args, pf, ds)
    ine = inertia(pick, pf.tolerances)
    out["pick"] = pick
    out["inertia"] = {"negative": ine.n_neg, "zero": ine.n_zero, "positive": ine.n_pos}
    return out, EXIT_OK


COMMANDS = {"validate": cmd_validate, "solve": cmd_solve, "verify": cmd_verify, "pick": cmd_pick}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bitangential",
                                 description="Bitangential interpolation in generalized Schur classes.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("file")
        sp.add_argument("--tol-rank", type=float)
        sp.add_argument("--tol-eig", type=float)
        sp.add_argument("--tol-res", type=float)
        sp.add_argument("--domain", choices=("disc", "half-plane"))
        sp.add_argument("--json", action="store_true", default=True, help="JSON report on stdout (default)")
        if name == "solve":
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--emit", choices=EMIT_CHOICES, default="all")
    return ap


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    args = build_parser().parse_args(argv)
    try:
        out, code = COMMANDS[args.command](args)
    except ParseError as exc:
        out = {"command": args.command, "file": args.file, "error": {"type": "ParseError",
                                                                    "field": exc.field, "message": str(exc)}}
        code = EXIT_PARSE
    except (BitangentialError, ValueError, np.linalg.LinAlgError) as exc:
        out = {"command": args.command, "file": args.file,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_INVALID if args.command == "validate" else EXIT_VERIFY
    out["exit_code"] = code
    stdout.write(emit_report(out) + "\n")
    return code


def main() -> None:
    sys.exit(run())
