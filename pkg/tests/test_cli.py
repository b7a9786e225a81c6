from __future__ import annotations

import cmath
import json
import math

import pytest
from click.testing import CliRunner

from clusterq.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def a2_file(tmp_path):
    p = tmp_path / "a2.json"
    p.write_text(json.dumps({"n": 2, "epsilon": [[0, 1], [-1, 0]], "d": [1, 1]}))
    return str(p)


def test_seed_mutate(runner, a2_file):
    res = runner.invoke(main, ["seed", "mutate", "--file", a2_file, "--k", "1"])
    assert res.exit_code == 0
    assert json.loads(res.stdout)["epsilon"] == [[0, -1], [1, 0]]


def test_seed_mutate_twice_is_identity(runner, a2_file):
    res = runner.invoke(main, ["seed", "mutate", "--file", a2_file, "--k", "1", "--k", "1"])
    assert json.loads(res.stdout)["epsilon"] == [[0, 1], [-1, 0]]


def test_malformed_seed_exit_2(runner, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"epsilon": [[0, 1], [-1, 0]], "d": [1, 2]}))
    res = runner.invoke(main, ["seed", "mutate", "--file", str(p), "--k", "1"])
    assert res.exit_code == 2
    assert "skew-symmetrizable" in res.stderr


@pytest.mark.parametrize("layer,relation,name", [
    ("operator", "A2", "a2"), ("classical", "G2", "g2"), ("quantum", "B2", "b2"),
])
def test_verify_examples(runner, tmp_path, layer, relation, name):
    out = tmp_path / "cert.json"
    res = runner.invoke(main, ["verify", "--layer", layer, "--relation", relation, "--seed", name,
                               "--order", "4", "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert out.exists()


def test_operator_certificate_file(runner, a2_file, tmp_path):
    out = tmp_path / "cert.json"
    res = runner.invoke(main, ["verify", "--layer", "operator", "--relation", "A2", "--file", a2_file,
                               "--out", str(out)])
    assert res.exit_code == 0
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "constant = 1"
    assert cert["phase_exponents"] == {}


def test_inapplicable_relation_exit_3(runner, a2_file):
    res = runner.invoke(main, ["verify", "--layer", "classical", "--relation", "G2", "--file", a2_file])
    assert res.exit_code == 3


def test_order_env_default(runner, monkeypatch):
    monkeypatch.setenv("CLUSTERQ_ORDER", "3")
    res = runner.invoke(main, ["verify", "--layer", "quantum", "--relation", "A2", "--seed", "a2"])
    assert res.exit_code == 0
    assert json.loads(res.stdout)["order"] == 3


def test_verify_all_subset(runner):
    res = runner.invoke(main, ["verify-all", "--only", "7", "--format", "csv"])
    assert res.exit_code == 0
    assert "[PASS] 7." in res.stderr
    assert res.stdout.splitlines()[0].startswith("criterion,")


def test_dilog_check(runner):
    res = runner.invoke(main, ["dilog", "check", "--hbar", "0.7", "--tol", "1e-8", "--samples", "5",
                               "--format", "json"])
    assert res.exit_code == 0
    rows = json.loads(res.stdout)
    assert all(r["passed"] for r in rows)


def test_dilog_check_bad_tol(runner):
    assert runner.invoke(main, ["dilog", "check", "--hbar", "0.7", "--tol", "0"]).exit_code == 2


def test_dilog_eval_at_zero(runner):
    res = runner.invoke(main, ["dilog", "eval", "--hbar", "1.3", "--z", "0"])
    v = json.loads(res.stdout)
    expected = cmath.exp(-1j * math.pi * (1.3 + 1 / 1.3) / 24)
    assert abs(complex(v["real"], v["imag"]) - expected) < 1e-10


def test_dilog_eval_bad_hbar(runner):
    assert runner.invoke(main, ["dilog", "eval", "--hbar", "-1", "--z", "0"]).exit_code == 1
