import json
import subprocess
import sys

import pytest

from qmfold.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def specs(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"blocks": [["2"], ["1"]], "slacks": ["8"]}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"blocks": [["2"], ["1"]], "slacks": ["7"]}))
    return good, bad


def test_qm_eval(capsys):
    code, out, _ = run(["qm", "eval", "2/5"], capsys)
    assert code == 0
    assert json.loads(out) == {"value": {"num": "3", "exp": "3"}}


def test_qm_invert_and_cf(capsys):
    _, out, _ = run(["qm", "invert", "7/2^4"], capsys)
    assert json.loads(out)["cf"] == ["2", "3"]
    _, out, _ = run(["cf", "of", "9/22"], capsys)
    assert json.loads(out)["cf"] == ["2", "2", "4"]
    _, out, _ = run(["cf", "to", "[2,1,1,1]"], capsys)
    assert json.loads(out)["value"] == "3/8"
    _, out, _ = run(["cf", "canon", "[3,1]"], capsys)
    assert json.loads(out)["cf"] == ["4"]


def test_fold(capsys):
    _, out, _ = run(["fold", "step", "--image", "[2]", "--parity", "even", "--s", "1"], capsys)
    assert json.loads(out)["raw"] == ["2", "3", "1", "1"]
    _, out, _ = run(["fold", "bounds", "--image", "[2]", "--parity", "even", "--s", "8"], capsys)
    assert json.loads(out)["z"] == ["511", "1023"]


def test_certify_exit_codes(specs, capsys):
    good, bad = specs
    code, out, _ = run(["setm", "certify", str(good)], capsys)
    assert code == 0 and json.loads(out)["status"] == "pass"
    code, out, _ = run(["setm", "certify", str(bad)], capsys)
    assert code == 1 and json.loads(out)["verdicts"][0]["verdict"] == "fail"


def test_image_and_avg(specs, capsys):
    good, _ = specs
    code, out, _ = run(["setm", "image", str(good)], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["image"]["raw"] == ["2", "1023", "2"]
    assert data["certificate"]["checks"][0]["exact"]["g"] == "1021"
    code, out, _ = run(["setm", "avg", str(good), "--format", "csv"], capsys)
    assert out.splitlines()[0].startswith("j,t,average")


def test_gen_then_certify(tmp_path, capsys):
    path = tmp_path / "gen.json"
    code, _, _ = run(["setm", "gen", "--blocks", "[[2],[1],[]]", "--output", str(path)], capsys)
    assert code == 0
    assert json.loads(path.read_text())["slacks"] == ["8", "16"]
    assert run(["setm", "certify", str(path)], capsys)[0] == 0


def test_cahen(capsys):
    code, out, _ = run(["cahen", "verify", "--depth", "6"], capsys)
    assert code == 0
    assert json.loads(out)["cf_prefix"] == ["1", "1", "1", "4", "9", "196", "16641"]


def test_deriv_table_csv(specs, capsys):
    good, _ = specs
    code, out, _ = run(["deriv", "table", str(good), "--n", "2", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "level,block,exact,t,S_t,log2_width,log2_image_width,log2_quotient_lo,log2_quotient_hi"
    assert len(lines) == 5


def test_orbit_scan(capsys):
    code, out, _ = run(["orbit", "scan", "--max-q", "6"], capsys)
    rows = {r["x"]: r["classification"] for r in json.loads(out)["rows"]}
    assert code == 0
    assert rows["1/2"] == "fixed" and rows["1/3"] == "toward 0"


def test_usage_errors(tmp_path, capsys):
    assert run(["qm", "eval", "2/0"], capsys)[0] == 2
    assert run(["nosuch"], capsys)[0] == 2
    assert run(["cf", "of", "3/2"], capsys)[0] == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["qm", "eval", "1/3", "--config", str(cfg)], capsys)[0] == 2
    assert run(["qm", "eval", "1/3", "--format", "csv"], capsys)[0] == 2


def test_cap_exit_code(capsys):
    code, out, _ = run(["qm", "iterate", "1/3", "--n", "5", "--work-cap", "100"], capsys)
    assert code == 3 and json.loads(out)["capped"]


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"work_cap": 100, "format": "json"}))
    assert run(["qm", "iterate", "1/3", "--n", "5", "--config", str(cfg)], capsys)[0] == 3
    args = ["qm", "iterate", "1/3", "--n", "4", "--config", str(cfg), "--work-cap", "100000"]
    assert run(args, capsys)[0] == 0


def test_output_is_deterministic(specs, capsys):
    good, _ = specs
    first = run(["setm", "image", str(good)], capsys)[1]
    second = run(["setm", "image", str(good)], capsys)[1]
    assert first == second


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qmfold", "qm", "eval", "1/3"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["value"] == {"num": "1", "exp": "2"}
