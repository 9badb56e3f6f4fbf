import io
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bitangential.cli import run
from bitangential.domain import Domain
from bitangential.errors import ParseError
from bitangential.rational import RationalMVF
from bitangential.serialize import (dec_complex, dec_rational, emit_report, enc_rational, parse_problem,
                                    parse_report)

PROBLEMS = Path(__file__).resolve().parents[1] / "scripts" / "problems"


def _run(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    out = json.loads(buf.getvalue())
    assert out["exit_code"] == code
    return code, out


EXPECTED = {
    # file: (validate, solve, verify, pick)
    "single_node": (0, 0, 0, 0),
    "single_node_default": (0, 0, 3, 0),
    "degenerate": (0, 0, 3, 0),
    "non_observable": (2, 2, 3, 0),
    "np_one_point_half": (0, 0, 1, 0),
    "np_one_point_zero": (0, 0, 0, 0),
    "np_two_point": (0, 0, 3, 0),
    "bad_row": (3, 3, 3, 3),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
@pytest.mark.parametrize("k, cmd", list(enumerate(["validate", "solve", "verify", "pick"])))
def test_exit_codes(name, k, cmd):
    code, out = _run(cmd, str(PROBLEMS / f"{name}.json"))
    assert code == EXPECTED[name][k]
    if code == 3:
        assert out["error"]["type"] == "ParseError"


def test_bad_row_names_the_field():
    _, out = _run("validate", str(PROBLEMS / "bad_row.json"))
    assert out["error"]["field"] == "C"


def test_verify_without_candidate_names_the_field():
    _, out = _run("verify", str(PROBLEMS / "single_node_default.json"))
    assert out["error"]["field"] == "candidate_s"


def test_single_node_solve_report():
    code, out = _run("solve", str(PROBLEMS / "single_node.json"), "--emit", "s")
    assert code == 0 and out["epsilon_source"] == "file"
    s = dec_rational(out["s"], "s", Domain.DISC)
    for z in (0.3, -0.2 + 0.5j):
        assert np.allclose(s(z), np.diag([1 / z, z]), atol=1e-9)
    v = out["verification"]
    assert v["passed"] and not v["checks"]["C4"]["passed"] and not v["takagi_nudelman"]
    assert v["kappa_actual"] == 1


def test_default_parameter_solution_is_takagi_nudelman():
    code, out = _run("solve", str(PROBLEMS / "single_node_default.json"), "--emit", "all")
    assert code == 0 and out["epsilon_source"] == "default"
    assert {"W", "pair", "K", "s"} <= set(out)
    assert out["verification"]["takagi_nudelman"]


def test_pick_inertia_of_one_point_data():
    _, out = _run("pick", str(PROBLEMS / "np_one_point_half.json"))
    assert out["pick"] == [[[0.75, 0.0]]]
    assert out["inertia"] == {"negative": 0, "zero": 0, "positive": 1}


def test_tolerance_and_domain_flags():
    code, out = _run("validate", str(PROBLEMS / "single_node.json"), "--tol-eig", "1e-6")
    assert code == 0 and out["tolerances"]["eig"] == 1e-6
    # read on the right half-plane the node 0 sits on the boundary and the equation is singular
    code, out = _run("validate", str(PROBLEMS / "single_node.json"), "--domain", "half-plane")
    assert code == 2 and out["error"]["type"] == "SingularEquationError"


def _write(tmp_path, obj, text=None):
    f = tmp_path / "p.json"
    f.write_text(text if text is not None else json.dumps(obj))
    return str(f)


@pytest.mark.parametrize("obj, field", [
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "extra": 1}, "extra"),
    ({"A1": [[0.1]], "C": [[1], [1]]}, "p"),
    ({"p": 1, "A1": [[0.1, 0.2]], "C": [[1], [1]]}, "A1"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "domain": "annulus"}, "domain"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "P": [[1, 2], [3, 4]]}, "P"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "tolerances": {"rank": -1}}, "tolerances.rank"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "tolerances": {"foo": 1}}, "tolerances.foo"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "candidate_s": [[0, 0]]}, "candidate_s"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], [1]], "kappa": -1}, "kappa"),
    ({"p": 1, "A1": [[0.1]], "C": [[1], ["x"]]}, "C[1][0]"),
    ({"interpolation": {"points": [0, 0.5], "values": [[[0]]]}}, "interpolation"),
])
def test_parse_errors_name_the_field(obj, field):
    with pytest.raises(ParseError) as info:
        parse_problem(obj)
    assert info.value.field == field


def test_invalid_json_exits_3(tmp_path):
    code, out = _run("validate", _write(tmp_path, None, "{not json"))
    assert code == 3 and out["error"]["type"] == "ParseError"
    code, _ = _run("pick", str(tmp_path / "missing.json"))
    assert code == 3


def test_complex_and_rational_decoding():
    assert dec_complex([1, -2], "z") == 1 - 2j and dec_complex(3, "z") == 3
    with pytest.raises(ParseError):
        dec_complex(True, "z")
    r = RationalMVF(np.arange(12).reshape(2, 3, 2) + 1j, [0.5, 1.0])
    back = dec_rational(parse_report(emit_report({"r": r}))["r"], "r", Domain.DISC)
    assert np.allclose(back(0.2), r(0.2))
    assert enc_rational(back) == enc_rational(r)


json_leaves = (st.none() | st.booleans() | st.integers(-2**53, 2**53)
               | st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=8))
json_trees = st.recursive(json_leaves, lambda kids: st.lists(kids, max_size=4)
                          | st.dictionaries(st.text(max_size=6), kids, max_size=4), max_leaves=20)


@given(tree=st.dictionaries(st.text(max_size=6), json_trees, max_size=5))
def test_emit_parse_round_trip(tree):
    assert parse_report(emit_report(tree)) == tree


def test_parse_report_rejects_garbage():
    with pytest.raises(ParseError):
        parse_report("[1, 2")


def test_degenerate_problem_forces_the_constant_one():
    code, out = _run("solve", str(PROBLEMS / "degenerate.json"), "--emit", "s")
    assert code == 0 and out["nu"] == 1
    s = dec_rational(out["s"], "s", Domain.DISC)
    for z in (0.0, 0.4, -0.3 + 0.5j):
        assert np.allclose(s(z), [[1.0]], atol=1e-10)
