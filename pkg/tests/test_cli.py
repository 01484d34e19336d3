import json
from importlib import resources

import pytest

from orbitcx.chaincx import FreeChainComplex
from orbitcx.cli import main

DATA = resources.files("orbitcx") / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_subgroups(capsys):
    code, out, _ = run(capsys, "subgroups", "catalog:Q8")
    d = json.loads(out)
    assert code == 0 and d["subgroups"] == 6 and len(d["classes"]) == 6


def test_sphere_check_fixture(capsys):
    code, out, _ = run(capsys, "sphere-check", str(DATA / "c2xc2_regular_sphere.json"))
    d = json.loads(out)
    assert code == 0 and d["sphere"] and d["n"] == [2, 0, 0, 0, -1] and d["oriented"]


def test_ahr_check_and_tighten(capsys, tmp_path):
    padded = str(DATA / "c2xc2_regular_sphere_padded.json")
    code, out, _ = run(capsys, "ahr-check", padded)
    assert code == 0 and json.loads(out)["tight"] is False
    dest = tmp_path / "t.json"
    code, out, _ = run(capsys, "tighten", padded, "-o", str(dest))
    d = json.loads(out)
    assert code == 0 and d["ok"] and d["dim"] == d["hdim"] == [2, 0, 0, 0, -1] and len(d["trace"]) == 3
    code, out, _ = run(capsys, "ahr-check", str(dest))
    assert code == 0 and json.loads(out)["tight"] is True


def test_gen_round_trip_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert run(capsys, "gen", "boundary-sphere", "catalog:C3", "--gset", "regular", "-p", "3", "-o", str(f))[0] == 0
    assert a.read_text() == b.read_text()
    C = FreeChainComplex.from_json(json.loads(a.read_text()))
    assert C.coeffs.p == 3
    code, out, _ = run(capsys, "sphere-check", str(a))
    assert code == 0 and json.loads(out)["n"][0] == 1


def test_tighten_obstruction_exit_code(capsys, tmp_path):
    from orbitcx.ahr import non_ahr_examples
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(non_ahr_examples()["C2/Z3 zero restriction"].to_json()))
    code, out, _ = run(capsys, "tighten", str(f))
    assert code == 2 and json.loads(out)["obstruction"] is not None
    assert run(capsys, "ahr-check", str(f))[0] == 2


def test_borel_smith_commands(capsys, tmp_path):
    f = tmp_path / "n.json"
    f.write_text(json.dumps({"values": {"0": 3, "1": 0}}))
    code, out, _ = run(capsys, "borel-smith", "check", "catalog:C4", str(f), "-p", "2")
    assert code == 2 and json.loads(out)["violations"]
    f.write_text(json.dumps({"values": {"0": 1, "1": 1, "2": -1}}))
    assert run(capsys, "borel-smith", "check", "catalog:C4", str(f), "-p", "2")[0] == 0
    assert run(capsys, "borel-smith", "infer", "catalog:C3xC3", "-p", "3")[0] == 0


def test_qd_demo(capsys):
    code, out, _ = run(capsys, "qd-demo", "-p", "3")
    assert code == 2
    assert out.index("Z(P)") < out.index("n(1) = -1")
    assert "Infeasible" in out


@pytest.mark.parametrize("content", ['{"modules": [', '{"a": 1}', "[1, 2]"])
def test_malformed_input(capsys, tmp_path, content):
    f = tmp_path / "bad.json"
    f.write_text(content)
    code, _, err = run(capsys, "sphere-check", str(f))
    assert code == 1 and err.startswith("error:")


def test_malformed_diagnostics(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{\n  "x": ,\n}')
    code, _, err = run(capsys, "ahr-check", str(f))
    assert code == 1 and "bad.json:2:" in err
    assert run(capsys, "subgroups", "catalog:NOPE")[0] == 1
    assert run(capsys, "qd-demo", "-p", "4")[0] == 1
    assert run(capsys, "sphere-check", str(tmp_path / "missing.json"))[0] == 1
