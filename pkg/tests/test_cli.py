import csv
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from motpave import cli
from motpave.instances import EXAMPLE_2_2_P1, EXAMPLE_2_2_P2, table

SYM = [{"point": ["-1"], "mass": "1/2"}, {"point": ["1"], "mass": "1/2"}]
ZERO = [{"point": ["0"], "mass": "1"}]


def _write(tmp_path, obj, name="inst.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv, "--format", "json")
    return code, json.loads(out) if out else None, err


def test_check_order_false_ships_witness(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": SYM, "nu": ZERO})
    code, rep, _ = _json(capsys, "check-order", "--instance", path)
    assert code == 0
    res = rep["results"]
    assert res["holds"] is False and res["potential_criterion"] is False
    assert F(res["mu_f"]["exact"]) > F(res["nu_f"]["exact"])
    # re-evaluate the witness from its JSON pieces
    pieces = [(F(p["slope"][0]), F(p["intercept"])) for p in res["witness"]["pieces"]]
    f = lambda t: max(a * t + b for a, b in pieces)  # noqa: E731
    assert (f(-1) + f(1)) / 2 > f(0)


def test_check_order_true(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM})
    code, rep, _ = _json(capsys, "check-order", "--instance", path)
    assert code == 0 and rep["results"]["holds"] is True
    assert rep["results"]["coupling"]["p"] == [["1/2", "1/2"]]


def test_potentials_csv_gap(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM})
    out = tmp_path / "pot.csv"
    code, rep, _ = _json(capsys, "potentials", "--instance", path, "--csv", str(out), "--points", "41")
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "U_mu", "U_nu", "gap"]
    assert len(rows) == 42
    for t, um, un, gap in rows[1:]:
        t = float(t)
        # U_delta0(t) = |t|, U_nu(t) = max(1, |t|)
        assert float(um) == pytest.approx(abs(t)) and float(un) == pytest.approx(max(1, abs(t)))
        assert (float(gap) > 0) == (-1 < t < 1)
    assert rep["results"]["intervals"] == [{"left": "-1", "right": "1", "mu_atoms": [0],
                                           "J_endpoints": ["-1", "1"]}]


@pytest.mark.parametrize("payload", [
    "{not json",
    {"dim": 1, "mu": SYM},
    {"dim": 1, "mu": SYM, "nu": ZERO, "extra": 1},
    {"dim": 2, "mu": SYM, "nu": ZERO},
    {"dim": 1, "mu": [{"point": ["0"], "mass": "1/2"}], "nu": ZERO},
    {"dim": 1, "mu": [{"point": ["0"], "mass": "one"}], "nu": ZERO},
])
def test_malformed_instance_exit_2(tmp_path, capsys, payload):
    path = _write(tmp_path, payload)
    code, out, err = _run(capsys, "check-order", "--instance", path)
    assert code == 2 and "error" in err and out == ""


def test_not_in_order_is_domain_error(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": SYM, "nu": ZERO})
    code, _, err = _run(capsys, "paving", "--instance", path)
    assert code == 2 and "not in convex order" in err


def test_vertices_need_seed(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM})
    code, _, err = _run(capsys, "coupling", "--instance", path, "--vertices", "3")
    assert code == 2 and "seed" in err
    code, rep, _ = _json(capsys, "coupling", "--instance", path, "--vertices", "3", "--seed", "5")
    assert code == 0 and len(rep["results"]["vertices"]) == 1 and rep["seed"] == 5


def test_decimal_masses_are_exact(tmp_path, capsys):
    inst = {"dim": 1, "mu": [{"point": ["0.1"], "mass": "1"}],
            "nu": [{"point": ["-0.9"], "mass": "0.5"}, {"point": ["1.1"], "mass": "0.5"}]}
    path = _write(tmp_path, inst)
    code, rep, _ = _json(capsys, "coupling", "--instance", path)
    assert code == 0 and rep["results"]["maximal"]["p"] == [["1/2", "1/2"]]


def test_dual_with_infinite_entry(tmp_path, capsys):
    # the example in the plane; (x0, y2) is polar, so inf there only breaks the pointwise dual
    _, rep, _ = _json(capsys, "example-2-2")
    inst = rep["results"]["instance"]
    inst["cost"] = [["0", "0", "0", "inf"], ["1", "0", "0", "0"]]
    path = _write(tmp_path, inst)
    code, rep, _ = _json(capsys, "dual", "--instance", path)
    res = rep["results"]
    assert code == 0
    assert res["primal"]["value"] == res["quasisure"]["value"] == {"exact": "1/4", "float": 0.25}
    assert res["pointwise"]["value"] == {"exact": "inf", "float": None}
    assert res["pointwise"]["offending_pair"] == [0, 3]


def test_dual_cost_file_and_mode(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM})
    cost = _write(tmp_path, {"cost": [["3/2", "1"]]}, "cost.json")
    code, rep, _ = _json(capsys, "dual", "--instance", path, "--cost", cost, "--mode", "pointwise")
    assert code == 0 and "quasisure" not in rep["results"]
    assert rep["results"]["pointwise"]["value"]["exact"] == "5/4"


def test_dual_without_cost(tmp_path, capsys):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM})
    assert _run(capsys, "dual", "--instance", path)[0] == 2


def test_paving_report_and_jobs(tmp_path, capsys):
    _, rep, _ = _json(capsys, "example-2-2")
    path = _write(tmp_path, rep["results"]["instance"])
    code, a, _ = _json(capsys, "paving", "--instance", path)
    code2, b, _ = _json(capsys, "paving", "--instance", path, "--jobs", "2")
    assert code == code2 == 0
    res = a["results"]
    assert res["polar"] == [[0, 0, 0, 1], [0, 0, 0, 0]]
    assert [c["dim"] for c in res["components"]] == [1, 2]
    assert res["components"][1]["J_lower_equals_upper"] is False
    assert a["results"]["components"] == b["results"]["components"]


def test_example_report_values(capsys):
    code, rep, _ = _json(capsys, "example-2-2")
    assert code == 0
    res = rep["results"]
    assert all(res["checks"].values())
    P1, P2 = table(EXAMPLE_2_2_P1, 2, 4), table(EXAMPLE_2_2_P2, 2, 4)
    got = {tuple(tuple(F(v) for v in r) for r in m) for m in res["vertices"]}
    assert got == {P1, P2}


def test_json_rationals_round_trip(capsys):
    _, rep, _ = _json(capsys, "example-2-2")

    def walk(v):
        if isinstance(v, dict):
            if set(v) == {"exact", "float"} and v["exact"] != "inf":
                q = F(v["exact"])
                assert str(q) == v["exact"] and v["float"] == float(q)
            for w in v.values():
                walk(w)
        elif isinstance(v, list):
            for w in v:
                walk(w)

    walk(rep)
    for p in rep["results"]["instance"]["nu"]:
        assert str(F(p["mass"])) == p["mass"]


def test_text_format_and_timing(capsys):
    code, out, _ = _run(capsys, "example-2-2", "--timing")
    assert code == 0 and "time:" in out.splitlines()[-1]
    code, out, _ = _run(capsys, "example-2-2", "--timing", "--format", "json")
    assert "time" not in json.loads(out)


def test_instance_required(capsys):
    assert _run(capsys, "paving")[0] == 2


def test_console_script_is_byte_identical(tmp_path):
    path = _write(tmp_path, {"dim": 1, "mu": ZERO, "nu": SYM, "seed": 3})
    cmd = [sys.executable, "-m", "motpave.cli", "coupling", "--instance", path, "--vertices", "2",
           "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["command"] == "coupling"
