from __future__ import annotations

import json
import re
import subprocess
import sys

import numpy as np
import pytest

from assortbounds.cli import main
from assortbounds.models import LCMNL, MNL, Instance, save_instance


@pytest.fixture
def mnl_file(tmp_path):
    path = tmp_path / "mnl.json"
    save_instance(Instance([1.0, 0.5], MNL([1.0, 1.0])), path)
    return str(path)


@pytest.fixture
def lc_file(tmp_path):
    path = tmp_path / "lc.json"
    rng = np.random.default_rng(0)
    save_instance(Instance(np.sort(rng.uniform(1, 10, 5))[::-1],
                           LCMNL([0.3, 0.7], np.exp(rng.normal(size=(5, 2))))), path)
    return str(path)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _numbers(text):
    return [float(x) for x in re.findall(r"-?\d+(?:\.\d+)?(?:e[-+]?\d+)?", text)]


def test_solve_brute(capsys, mnl_file):
    code, out, _ = _run(capsys, "solve", "--instance", mnl_file, "--method", "brute")
    assert code == 0
    assert "revenue: 0.5" in out and "assortment: {1}" in out


@pytest.mark.parametrize("method", ["revenue-ordered", "mnl"])
def test_solve_methods(capsys, mnl_file, method):
    code, out, _ = _run(capsys, "solve", "--instance", mnl_file, "--method", method, "--json")
    assert code == 0
    assert json.loads(out)["revenue"] == pytest.approx(0.5)


def test_solve_constrained(capsys, lc_file):
    code, out, _ = _run(capsys, "solve", "--instance", lc_file, "--method", "constrained", "--k", "2", "--json")
    assert code == 0 and len(json.loads(out)["assortment"]) <= 2
    code, _, err = _run(capsys, "solve", "--instance", lc_file, "--method", "constrained")
    assert code == 2 and "--k" in err


def test_solve_mnl_method_needs_mnl(capsys, lc_file):
    code, _, err = _run(capsys, "solve", "--instance", lc_file, "--method", "mnl")
    assert code == 2


def test_certify_mnl_omega(capsys, mnl_file):
    code, out, _ = _run(capsys, "certify", "--instance", mnl_file, "--kind", "omega")
    assert code == 0
    assert "holds, factor 2" in out


def test_certify_incompatible(capsys, mnl_file):
    code, _, err = _run(capsys, "certify", "--instance", mnl_file, "--kind", "nl")
    assert code == 2 and "nested-logit" in err


@pytest.mark.parametrize("argv", [
    ("bounds",), ("constrained", "--k", "2"), ("clairvoyant",), ("personalize", "--k", "2"),
    ("certify", "--kind", "lc"), ("solve", "--method", "brute"),
])
def test_json_contains_text_numbers(capsys, lc_file, argv):
    cmd, *rest = argv
    code, text, _ = _run(capsys, cmd, "--instance", lc_file, *rest)
    assert code == 0
    code, raw, _ = _run(capsys, cmd, "--instance", lc_file, *rest, "--json")
    assert code == 0
    flat = []

    def walk(x):
        if isinstance(x, dict):
            for v in x.values():
                walk(v)
        elif isinstance(x, list):
            for v in x:
                walk(v)
        elif isinstance(x, (int, float)) and not isinstance(x, bool):
            flat.append(float(x))

    walk(json.loads(raw))
    for shown in _numbers(text.replace("R^k", "").replace("S^k", "").replace("r_lambda", "")):
        assert any(abs(shown - x) <= 5e-6 * max(1.0, abs(x)) for x in flat) or shown in (0.0, 1.0, 2.0), shown


def test_pricing(capsys):
    code, out, _ = _run(capsys, "pricing", "--V", str(2 * np.e ** 3), "--json")
    assert code == 0 and json.loads(out)["p_star"] == pytest.approx(3.0, abs=1e-9)
    code, out, _ = _run(capsys, "pricing", "--a", str(np.e - 1))
    assert code == 0 and "ratio: 2" in out
    code, _, _ = _run(capsys, "pricing", "--V", "-1")
    assert code == 2
    code, _, _ = _run(capsys, "pricing")
    assert code == 2


def test_validation_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"revenues": [1.0, 2.0], "model": {"kind": "mnl", "v": [1.0, 1.0]}}))
    code, _, err = _run(capsys, "bounds", "--instance", str(bad))
    assert code == 2 and "sorted non-increasing" in err
    bad.write_text("{")
    code, _, err = _run(capsys, "bounds", "--instance", str(bad))
    assert code == 2
    code, _, _ = _run(capsys, "bounds", "--instance", str(tmp_path / "missing.json"))
    assert code == 2


def test_runtime_error_exit_code(capsys, tmp_path):
    from assortbounds.models import MarkovChain
    path = tmp_path / "markov.json"
    save_instance(Instance([2.0, 1.0], MarkovChain([0.2, 0.4, 0.4], [[1, 0, 0], [0.5, 0, 0.5], [0.5, 0.5, 0]])), path)
    code, _, err = _run(capsys, "personalize", "--instance", str(path))
    assert code == 2
    # clairvoyant revenue of a general Markov chain needs a sampler, which it lacks
    code, _, err = _run(capsys, "clairvoyant", "--instance", str(path), "--samples", "10")
    assert code == 2 and "markov" in err


def test_unexpected_failure_exit_one(capsys, mnl_file, monkeypatch):
    import assortbounds.cli as cli

    def boom(*a, **k):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "bound_chain", boom)
    code, _, err = _run(capsys, "bounds", "--instance", mnl_file)
    assert code == 1 and "boom" in err


def test_experiment_beta_csv(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = _run(capsys, "experiment", "beta", "--beta", "20", "--n", "5", "--m", "2",
                        "--count", "3", "--seed", "7", "--csv", str(path))
    assert code == 0 and "beta = 20" in out
    assert len(path.read_text().splitlines()) == 4


def test_experiment_config_and_cardinality(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_list": [5], "m_list": [1, 2], "beta": 2.0, "instances": 2, "seed": 3}))
    code, out, _ = _run(capsys, "experiment", "beta", "--config", str(cfg), "--json")
    assert code == 0 and len(json.loads(out)["rows"]) == 4
    code, out, _ = _run(capsys, "experiment", "cardinality", "--config", str(cfg))
    assert code == 0 and "Max-H" in out
    code, _, _ = _run(capsys, "experiment", "beta", "--n", "5")
    assert code == 2


def test_module_entry_point(mnl_file):
    proc = subprocess.run([sys.executable, "-m", "assortbounds", "solve", "--instance", mnl_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "revenue: 0.5" in proc.stdout


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])
    assert exc.value.code == 2
