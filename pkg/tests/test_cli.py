import csv
import io
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from seqmns.cli import main
from seqmns.constructions import computational_povm, build_scenario, trine_povm
from seqmns.documents import encode_matrix, povm_to_document, scenario_to_document
from seqmns.quantum import Scenario

import randops


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def numbers(text):
    return [float(x) for x in re.findall(r"-?\d+\.\d{6,}", text)]


def flatten(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from flatten(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from flatten(v)
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        yield float(obj)


def assert_human_numbers_in_json(human, payload):
    pool = np.array(list(flatten(payload)))
    for x in numbers(human):
        assert np.min(np.abs(pool - x)) <= 5.1e-11, x


def test_demo_trine(capsys):
    code, out, _ = run(capsys, "demo", "trine")
    assert code == 0
    assert "witness S: 0.3333333333" in out
    assert "NSIT residual: 0.0000000000" in out
    assert "self-commuting: false" in out


def test_demo_dual_basis(capsys):
    code, out, _ = run(capsys, "demo", "dual-basis", "--d", "4")
    assert code == 0 and "witness S: 0.3750000000" in out
    assert "1/d" in out


def test_demo_json_contains_human_numbers(capsys):
    for argv in (["demo", "trine"], ["demo", "dual-basis", "--d", "3"]):
        _, human, _ = run(capsys, *argv)
        _, js, _ = run(capsys, *argv, "--json")
        payload = json.loads(js)
        assert_human_numbers_in_json(human, payload)


def test_demo_usage_errors(capsys):
    assert run(capsys, "demo", "trine", "--d", "3")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["demo", "square"])
    assert e.value.code == 2


def test_witness_formats(capsys, tmp_path):
    path = write(tmp_path, "trine.json", scenario_to_document(build_scenario("trine")))
    code, human, _ = run(capsys, "witness", path)
    assert code == 0 and "0.3333333333" in human
    _, js, _ = run(capsys, "witness", path, "--json")
    payload = json.loads(js)
    assert payload["value"] == pytest.approx(1 / 3, abs=1e-9)
    assert_human_numbers_in_json(human, payload)
    _, text, _ = run(capsys, "witness", path, "--csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 6
    assert float(rows[0]["residual"]) == pytest.approx(-1 / 12, abs=1e-10)
    assert sum(abs(float(r["residual"])) for r in rows) == pytest.approx(1 / 3, abs=1e-10)


def test_witness_projective_document(capsys, tmp_path):
    rng = np.random.default_rng(0)
    s = randops.scenario(rng, 2, 2, 3, 2, alice=randops.projective_povm(rng, 2, 3))
    path = write(tmp_path, "proj.json", scenario_to_document(s))
    _, js, _ = run(capsys, "witness", path, "--json")
    assert json.loads(js)["value"] <= 1e-10


def test_witness_with_unitaries_roundtrip(capsys, tmp_path):
    rng = np.random.default_rng(1)
    s = randops.scenario(rng, 2, 2, 3, 2, with_unitaries=True)
    doc = scenario_to_document(s)
    assert "post_unitaries" in doc
    _, js, _ = run(capsys, "witness", write(tmp_path, "u.json", doc), "--json")
    from seqmns.correlations import evaluate_scenario

    assert json.loads(js)["value"] == pytest.approx(evaluate_scenario(s).value, abs=1e-12)


def test_witness_input_errors(capsys, tmp_path):
    doc = scenario_to_document(build_scenario("trine"))
    bad = np.diag([1.5, 0, 0, -0.5])
    doc["state"] = encode_matrix(bad)
    code, _, err = run(capsys, "witness", write(tmp_path, "bad.json", doc))
    assert code == 1
    assert "PSD" in err and "5.000e-01" in err
    assert run(capsys, "witness", str(tmp_path / "missing.json"))[0] == 1
    (tmp_path / "junk.json").write_text("{not json")
    assert run(capsys, "witness", str(tmp_path / "junk.json"))[0] == 1
    assert run(capsys, "witness", write(tmp_path, "empty.json", {}))[0] == 1


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--d-max", "8")
    assert code == 0 and "1/d" in out
    _, text, err = run(capsys, "scan", "--d-max", "8", "--csv")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["d"]) for r in rows] == list(range(2, 9))
    assert float(rows[0]["simulated"]) == pytest.approx(0.25, abs=1e-10)
    assert float(rows[-1]["analytic"]) == 0.4375
    assert all(float(r["abs_diff"]) < 1e-10 for r in rows)
    assert "1/d" in err
    assert run(capsys, "scan", "--d-max", "1")[0] == 2


def test_check(capsys, tmp_path):
    _, out, _ = run(capsys, "check", write(tmp_path, "t.json", povm_to_document(trine_povm())))
    assert "self-commuting: false" in out and "scaled-projector: true" in out
    _, out, _ = run(capsys, "check", write(tmp_path, "c.json", povm_to_document(computational_povm(3))))
    assert "self-commuting: true" in out
    two = randops.two_outcome_povm(np.random.default_rng(2), 3)
    _, js, _ = run(capsys, "check", write(tmp_path, "2.json", povm_to_document(two)), "--json")
    assert json.loads(js)["self_commuting"] is True
    _, out, _ = run(capsys, "check", write(tmp_path, "s.json", scenario_to_document(build_scenario("dual_basis", 3))))
    assert "dual-basis identity deviation" in out
    bad = {"povm": [encode_matrix(np.diag([1, 0])), encode_matrix(np.diag([0, 0.5]))]}
    code, _, err = run(capsys, "check", write(tmp_path, "bad.json", bad))
    assert code == 1 and "identity" in err


OPT = ["optimize", "--restarts", "3", "--iters", "300", "--seed", "7", "--threads", "1"]


def test_optimize_deterministic_and_roundtrip(capsys, tmp_path):
    _, a, _ = run(capsys, *OPT, "--json")
    _, b, _ = run(capsys, *OPT, "--json")
    assert a == b
    payload = json.loads(a)
    _, js, _ = run(capsys, "witness", write(tmp_path, "best.json", payload), "--json")
    assert json.loads(js)["value"] == pytest.approx(payload["best_value"], abs=1e-9)
    _, human, _ = run(capsys, *OPT)
    assert_human_numbers_in_json(human, payload)


def test_optimize_two_outcomes(capsys):
    _, js, _ = run(capsys, *OPT, "--na", "2", "--json")
    assert json.loads(js)["best_value"] <= 1e-6


def test_optimize_usage_errors(capsys):
    assert run(capsys, "optimize", "--na", "1")[0] == 2
    assert run(capsys, "optimize", "--restarts", "0")[0] == 2
    assert run(capsys, "optimize", "--mode", "fixed-alice", "--na", "5")[0] == 2
    with pytest.raises(SystemExit) as e:
        main(["optimize", "--mode", "sideways"])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "seqmns", "demo", "trine", "--json"], capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["value"] == pytest.approx(1 / 3, abs=1e-12)
