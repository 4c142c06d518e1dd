import json

import pytest

from hardyop import acceptance, cli

FAST = "name = half\nu = 1\nphi = mul(0.5, z)\np = 2\nq = inf\n"


def write(tmp_path, text, name="s.scn"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_analyze_identity_json(tmp_path):
    path = write(tmp_path, "name = id\nu = 1\nphi = z\np = 2\nq = 2\n")
    out = tmp_path / "r.json"
    assert cli.main(["analyze", "--scenario", path, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["tool"] == "hardyop" and rep["version"]
    res = rep["result"]
    assert res["status"] == "ok"
    assert res["bracket"]["lower_raw"] == pytest.approx(1.0, abs=1e-6)
    assert res["bracket"]["upper_raw"] == pytest.approx(1.0, abs=1e-6)
    assert res["truncation"]["upper"] == pytest.approx(1.0, abs=1e-8)
    assert rep["config"]["grid"] == 2**14


def test_output_is_byte_identical(tmp_path):
    path = write(tmp_path, FAST)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["analyze", "--scenario", path, "--out", str(a)])
    cli.main(["analyze", "--scenario", path, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_essnorm_unbounded_exits_one(tmp_path):
    path = write(tmp_path, "u = 1\nphi = z\np = 2\nq = 4\n")
    out = tmp_path / "r.json"
    assert cli.main(["essnorm", "--scenario", path, "--out", str(out)]) == 1
    assert json.loads(out.read_text())["result"]["status"] == "unbounded"


def test_parse_error_exits_one(tmp_path, capsys):
    path = write(tmp_path, "u = 1\nphi = z\np = 2\nq = 2\nbogus = 1\n")
    assert cli.main(["analyze", "--scenario", path]) == 1
    assert "line 5, column 1" in capsys.readouterr().err


def test_validation_error_exits_one(tmp_path):
    path = write(tmp_path, "u = 1\nphi = add(1, z)\np = 2\nq = 2\n")
    assert cli.main(["analyze", "--scenario", path]) == 1


def test_undecided_exits_two(tmp_path, monkeypatch):
    from hardyop.errors import Undecided

    def undecided(s):
        raise Undecided("stub")

    monkeypatch.setitem(cli.COMMANDS, "carleson", undecided)
    path = write(tmp_path, FAST)
    assert cli.main(["carleson", "--scenario", path]) == 2


def test_flags_override_config(tmp_path):
    path = write(tmp_path, FAST)
    out = tmp_path / "r.json"
    cli.main(["analyze", "--scenario", path, "--out", str(out), "--grid", "4096", "--depth", "6", "--alpha", "0.6"])
    cfg = json.loads(out.read_text())["config"]
    assert (cfg["grid"], cfg["depth"], cfg["alpha"]) == (4096, 6, 0.6)


def test_csv_traces(tmp_path):
    path = write(tmp_path, "u = poly(1, -1)\nphi = poly(0.5, 0.5)\np = 2\nq = inf\n")
    out = tmp_path / "t.csv"
    assert cli.main(["analyze", "--scenario", path, "--out", str(out), "--format", "csv"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "series,x,value"
    assert len(lines) == 11 and all(line.startswith("m_phi,") for line in lines[1:])


def test_truncate_and_boundedness(tmp_path):
    path = write(tmp_path, "u = 1\nphi = pow(z, 2)\np = 2\nq = 2\n")
    out = tmp_path / "r.json"
    assert cli.main(["truncate", "--scenario", path, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["upper"] == pytest.approx(1.0, abs=1e-8)
    assert cli.main(["boundedness", "--scenario", path, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["bounded"] is True


def test_carleson(tmp_path):
    path = write(tmp_path, "u = 1\nphi = mul(0.5, z)\np = 4\nq = 2\n")
    out = tmp_path / "r.json"
    assert cli.main(["carleson", "--scenario", path, "--out", str(out)]) == 0
    assert json.loads(out.read_text())["result"]["is_carleson"] is True


def test_sweep_merges_sorted_reports(tmp_path, monkeypatch):
    monkeypatch.setenv("HARDYOP_THREADS", "2")
    write(tmp_path, FAST.replace("name = half", "name = b"), "b.scn")
    write(tmp_path, FAST.replace("name = half", "name = a"), "a.scn")
    out = tmp_path / "sweep.json"
    assert cli.main(["sweep", "--scenario", str(tmp_path), "--out", str(out)]) == 0
    names = [r["scenario"]["name"] for r in json.loads(out.read_text())["reports"]]
    assert names == ["a", "b"]


def test_selftest_wiring(monkeypatch, tmp_path):
    monkeypatch.setattr(acceptance, "CRITERIA", (acceptance.criterion_9, acceptance.criterion_10))
    out = tmp_path / "self.json"
    assert cli.main(["selftest", "--out", str(out)]) == 0
    res = json.loads(out.read_text())["result"]
    assert [r["criterion"] for r in res] == [9, 10]


def test_jsonable_handles_special_values():
    assert cli.jsonable({"a": float("inf"), "b": (1, 2j)}) == {"a": "inf", "b": [1, {"re": 0.0, "im": 2.0}]}
