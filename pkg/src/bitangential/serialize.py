"""JSON encoding of problem files and reports.

Complex numbers are written as ``[re, im]``, polynomials as ascending
coefficient arrays and rational matrix functions as a nested array of
entry numerators over one common denominator.
"""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .blaschke import BPProduct
from .domain import Domain
from .errors import ParseError
from .numeric import DEFAULT_TOL, Tolerances
from .problem import DataSet
from .rational import RationalMVF

# ------------------------------------------------------------------ encoding


def enc_complex(z) -> list[float]:
    z = complex(z)
    return [_enc_float(z.real), _enc_float(z.imag)]


def _enc_float(x: float):
    x = float(x)
    if math.isfinite(x):
        return x
    return str(x)


def enc_matrix(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[enc_complex(z) for z in row] for row in m]


def enc_poly(c) -> list:
    return [enc_complex(z) for z in np.asarray(c, dtype=complex).ravel()]


def enc_rational(r: RationalMVF) -> dict:
    rows, cols = r.shape
    num = [[enc_poly(r.num[i, k]) for k in range(cols)] for i in range(rows)]
    return {"shape": [rows, cols], "num": num, "den": enc_poly(r.den)}


def enc_bp(b: BPProduct) -> dict:
    return {"size": b.size, "degree": b.degree,
            "factors": [{"alpha": enc_complex(f.alpha), "proj": enc_matrix(f.proj)} for f in b.factors]}


def to_json(obj: Any) -> Any:
    """Convert a report value into plain JSON types."""
    if isinstance(obj, RationalMVF):
        return enc_rational(obj)
    if isinstance(obj, BPProduct):
        return enc_bp(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _enc_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return enc_complex(obj)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return enc_matrix(obj)
        return [to_json(x) for x in obj]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_json(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(x) for x in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def emit_report(tree: dict) -> str:
    return json.dumps(to_json(tree), indent=2, allow_nan=False)


def parse_report(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc


# ------------------------------------------------------------------ decoding


def dec_complex(x, name: str) -> complex:
    if isinstance(x, bool):
        raise ParseError("expected a number or [re, im]", name)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                     for v in x):
        return complex(x[0], x[1])
    raise ParseError(f"expected a number or [re, im], got {x!r}", name)


def dec_matrix(x, name: str, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if not isinstance(x, list):
        raise ParseError("expected a list of rows", name)
    if not x:
        out = np.zeros((0, cols or 0), dtype=complex)
    else:
        data = []
        for i, row in enumerate(x):
            if not isinstance(row, list):
                raise ParseError("row is not a list", f"{name}[{i}]")
            data.append([dec_complex(v, f"{name}[{i}][{k}]") for k, v in enumerate(row)])
        widths = {len(r) for r in data}
        if len(widths) != 1:
            raise ParseError("rows have different lengths", name)
        out = np.array(data, dtype=complex).reshape(len(data), widths.pop())
    if rows is not None and out.shape[0] != rows:
        raise ParseError(f"expected {rows} rows, got {out.shape[0]}", name)
    if cols is not None and out.size and out.shape[1] != cols:
        raise ParseError(f"expected {cols} columns, got {out.shape[1]}", name)
    return out


def dec_poly(x, name: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ParseError("expected a non-empty coefficient array", name)
    return np.array([dec_complex(v, f"{name}[{i}]") for i, v in enumerate(x)], dtype=complex)


def dec_rational(x, name: str, domain: Domain) -> RationalMVF:
    """A rational matrix function, or a constant matrix given as a plain nested list."""
    if isinstance(x, list):
        return RationalMVF.constant(dec_matrix(x, name), domain)
    if not isinstance(x, dict) or "num" not in x:
        raise ParseError("expected {num, den} or a constant matrix", name)
    num = x["num"]
    if not isinstance(num, list) or not num or not all(isinstance(r, list) for r in num):
        raise ParseError("numerator must be a matrix of coefficient arrays", f"{name}.num")
    polys = [[dec_poly(c, f"{name}.num[{i}][{k}]") for k, c in enumerate(row)] for i, row in enumerate(num)]
    if len({len(r) for r in polys}) != 1:
        raise ParseError("rows have different lengths", f"{name}.num")
    deg = max(len(c) for row in polys for c in row)
    arr = np.zeros((len(polys), len(polys[0]), deg), dtype=complex)
    for i, row in enumerate(polys):
        for k, c in enumerate(row):
            arr[i, k, :len(c)] = c
    den = dec_poly(x.get("den", [1.0]), f"{name}.den")
    if not np.any(den):
        raise ParseError("denominator is identically zero", f"{name}.den")
    return RationalMVF(arr, den, domain)


def _dec_int(x, name: str, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise ParseError(f"expected an integer >= {minimum}", name)
    return x


def _dec_float(x, name: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0:
        raise ParseError("expected a positive number", name)
    return float(x)


# ------------------------------------------------------------------ problem file

@dataclass
class ProblemFile:
    domain: Domain
    p: int
    q: int
    A1: np.ndarray
    A2: np.ndarray
    C: np.ndarray
    P: np.ndarray | None = None
    kappa: int | None = None
    mu: complex | None = None
    epsilon: RationalMVF | None = None
    candidate_s: RationalMVF | None = None
    tolerances: Tolerances = DEFAULT_TOL
    points: list[complex] | None = None
    values: list[np.ndarray] | None = None
    raw: dict = field(default_factory=dict)

    def dataset(self) -> DataSet:
        return DataSet.create(self.A1, self.A2, self.C, self.p, self.q, P=self.P, kappa=self.kappa,
                              mu=self.mu, domain=self.domain, tol=self.tolerances)


_KNOWN = {"domain", "p", "q", "A1", "A2", "C", "P", "kappa", "mu", "epsilon", "candidate_s",
          "tolerances", "interpolation"}


def parse_problem(obj: Any, domain_override: str | None = None) -> ProblemFile:
    """Validate the JSON tree of a problem file and decode it."""
    if not isinstance(obj, dict):
        raise ParseError("problem file must be a JSON object")
    unknown = sorted(set(obj) - _KNOWN)
    if unknown:
        raise ParseError("unknown field", unknown[0])
    try:
        domain = Domain.parse(domain_override or obj.get("domain", "disc"))
    except ValueError as exc:
        raise ParseError(str(exc), "domain") from exc

    tol = DEFAULT_TOL
    if "tolerances" in obj:
        t = obj["tolerances"]
        if not isinstance(t, dict):
            raise ParseError("expected an object", "tolerances")
        keys = {"rank": "rank_tol", "eig": "eig_tol", "residual": "residual_tol"}
        for k in t:
            if k not in keys:
                raise ParseError("unknown tolerance", f"tolerances.{k}")
        tol = tol.with_(**{keys[k]: _dec_float(v, f"tolerances.{k}") for k, v in t.items()})

    points = values = None
    if "interpolation" in obj:
        A1, A2, C, p, q, points, values = _dec_interpolation(obj["interpolation"], domain)
        if "p" in obj and obj["p"] != p:
            raise ParseError(f"interpolation values are {p} x {q}", "p")
    else:
        for k in ("p", "A1", "C"):
            if k not in obj:
                raise ParseError("missing field", k)
        p = _dec_int(obj["p"], "p")
        A1 = dec_matrix(obj["A1"], "A1")
        A2 = dec_matrix(obj.get("A2", []), "A2")
        for name, a in (("A1", A1), ("A2", A2)):
            if a.shape[0] != a.shape[1]:
                raise ParseError(f"matrix must be square, got {a.shape[0]} x {a.shape[1]}", name)
        n = A1.shape[0] + A2.shape[0]
        C = dec_matrix(obj["C"], "C", cols=n)
        if n == 0:
            C = C.reshape(C.shape[0], 0)
        q = _dec_int(obj["q"], "q") if "q" in obj else C.shape[0] - p
        if C.shape[0] != p + q:
            raise ParseError(f"expected p + q = {p + q} rows, got {C.shape[0]}", "C")
    n = A1.shape[0] + A2.shape[0]

    P = None
    if obj.get("P", "solve") != "solve":
        P = dec_matrix(obj["P"], "P", rows=n, cols=n)
        if np.linalg.norm(P - P.conj().T) > 1e-8 * max(1.0, np.linalg.norm(P)):
            raise ParseError("matrix is not Hermitian", "P")
    kappa = _dec_int(obj["kappa"], "kappa") if obj.get("kappa") is not None else None
    mu = dec_complex(obj["mu"], "mu") if obj.get("mu") is not None else None
    eps = dec_rational(obj["epsilon"], "epsilon", domain) if obj.get("epsilon") is not None else None
    cand = dec_rational(obj["candidate_s"], "candidate_s", domain) if obj.get("candidate_s") is not None else None
    if cand is not None and cand.shape != (p, q):
        raise ParseError(f"expected a {p} x {q} function, got {cand.shape}", "candidate_s")
    return ProblemFile(domain, p, q, A1, A2, C, P, kappa, mu, eps, cand, tol, points, values, obj)


def _dec_interpolation(x, domain: Domain):
    """Left-sided point data s(z_i) = s_i, encoded as a one-sided problem."""
    if domain is not Domain.DISC:
        raise ParseError("point interpolation data is supported on the disc only", "interpolation")
    if not isinstance(x, dict) or "points" not in x or "values" not in x:
        raise ParseError("expected {points, values}", "interpolation")
    if not isinstance(x["points"], list) or not isinstance(x["values"], list):
        raise ParseError("expected arrays", "interpolation")
    pts = [dec_complex(z, f"interpolation.points[{i}]") for i, z in enumerate(x["points"])]
    vals = [dec_matrix(v, f"interpolation.values[{i}]") for i, v in enumerate(x["values"])]
    if len(pts) != len(vals) or not pts:
        raise ParseError("points and values must be non-empty and of equal length", "interpolation")
    p, q = vals[0].shape
    if any(v.shape != (p, q) for v in vals):
        raise ParseError("values have different shapes", "interpolation.values")
    A1 = np.kron(np.diag(pts), np.eye(q))
    C = np.vstack([np.hstack(vals), np.hstack([np.eye(q)] * len(vals))])
    return A1, np.zeros((0, 0), dtype=complex), C, p, q, pts, vals


def load_problem(path: str, domain_override: str | None = None) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    except OSError as exc:
        raise ParseError(str(exc), "path") from exc
    return parse_problem(obj, domain_override)
