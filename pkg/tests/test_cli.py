import io
import json
import math
import subprocess
import sys

import pytest

from qrelent.cli import RunReport, main, table_rows
from qrelent.qstate import DensityMatrix, bell_state, load_state, save_state, schmidt_state


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def run_json(argv):
    code, text = run(["--json"] + argv)
    return code, json.loads(text)


@pytest.fixture
def state_files(tmp_path):
    bell = tmp_path / "bell.json"
    mixed = tmp_path / "mixed.json"
    save_state(bell_state(2).density(), bell)
    save_state(DensityMatrix.maximally_mixed(4, (2, 2)), mixed)
    return str(bell), str(mixed)


@pytest.mark.parametrize("spec, expected", [("log", 1.386294), ("power_entropy:0.5", 0.5)])
def test_entropy_bell_vs_mixed(state_files, spec, expected):
    bell, mixed = state_files
    code, text = run(["entropy", "--rho", bell, "--sigma", mixed, "--f", spec])
    assert code == 0
    assert text.strip() == f"S_f = {expected:g}"


def test_entropy_identical_files(state_files):
    _, mixed = state_files
    code, report = run_json(["entropy", "--rho", mixed, "--sigma", mixed, "--f", "tsallis:0.3", "--check-modular"])
    assert code == 0
    assert abs(report["outputs"]["S_f"]) <= 1e-12
    assert report["outputs"]["discrepancy"] <= 1e-9


def test_entropy_modular_skipped_for_pure(state_files):
    bell, mixed = state_files
    code, report = run_json(["entropy", "--rho", bell, "--sigma", mixed, "--f", "log", "--check-modular"])
    assert code == 0
    assert report["outputs"]["modular"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["entropy", "--rho", "missing.json", "--sigma", "missing.json", "--f", "log"],
        ["closest", "--bell", "2", "--f", "unknown"],
        ["closest", "--schmidt", "0.5,0.6", "--f", "log"],
        ["closest", "--p", "1.5", "--f", "log"],
        ["table", "--alpha", "1.5"],
    ],
)
def test_input_errors_exit_2(argv):
    code, report = run_json(argv)
    assert code == 2
    assert report["error"].startswith("input error")


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["closest", "--f", "log"])
    assert info.value.code == 2


def test_precision_limit():
    with pytest.raises(SystemExit):
        main(["--precision", "16", "table"])


def test_closest_bell():
    code, text = run(["closest", "--bell", "2", "--f", "log", "--certify", "500"])
    assert code == 0
    assert "E = 0.693147" in text
    assert "q = (0.5, 0.5)" in text


def test_closest_two_qubit():
    code, report = run_json(["closest", "--p", "0.75", "--f", "power_entropy:0.5", "--certify", "200"])
    assert code == 0
    assert report["outputs"]["q"][0] == pytest.approx(0.9, abs=1e-10)
    assert report["outputs"]["entanglement"] == pytest.approx(0.209431, abs=1e-6)
    assert report["certificates"][0]["passed"]


def test_closest_schmidt_log():
    code, text = run(["closest", "--schmidt", "0.7,0.3", "--f", "log"])
    assert code == 0
    assert "E = 0.610864" in text


def test_closest_hypothesis_violation_exit_3():
    code, report = run_json(["closest", "--schmidt", "0.5,0.3,0.2", "--f", "power:0.5"])
    assert code == 3
    assert "flatH" in report["error"]


def test_closest_oracle():
    code, report = run_json(["closest", "--p", "0.75", "--f", "power_entropy:0.5", "--oracle",
                             "--restarts", "3", "--max-iters", "100"])
    assert code == 0
    assert report["flags"]["oracle_not_below_analytic"]
    assert abs(report["outputs"]["oracle_gap"]) <= 1e-3


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("QRE_SEED", "17")
    _, report = run_json(["closest", "--bell", "2", "--f", "log", "--certify", "10"])
    assert report["inputs"]["seed"] == 17
    assert report["certificates"][0]["seed"] == 17


def test_bad_seed_environment(monkeypatch):
    monkeypatch.setenv("QRE_SEED", "abc")
    code, _ = run_json(["closest", "--bell", "2", "--f", "log"])
    assert code == 2


def test_deterministic_output():
    argv = ["closest", "--p", "0.8", "--f", "tsallis:0.7", "--certify", "100", "--seed", "3"]
    _, a = run_json(argv)
    _, b = run_json(argv)
    a.pop("wall_time")
    b.pop("wall_time")
    assert a == b


def test_table_values():
    rows = {(r["d"], r["alpha"]): r for r in table_rows([2], [0.5])}
    r = rows[(2, 0.5)]
    assert r["renyi_E"] == pytest.approx(math.log(2), abs=1e-12)
    assert r["renyi_marginal"] == pytest.approx(math.log(2), abs=1e-12)
    assert r["tsallis_E"] == pytest.approx(2 - math.sqrt(2), abs=1e-12)
    assert r["tsallis_marginal"] == pytest.approx(2 * math.sqrt(2) - 2, abs=1e-12)
    assert not r["tsallis_reduces"]


def test_table_command():
    code, text = run(["table", "--d", "2", "--alpha", "0.5"])
    assert code == 0
    assert "0.585786" in text and "0.828427" in text


def test_verify_divergence_suite():
    code, report = run_json(["verify", "--suite", "divergence", "--seed", "5"])
    assert code == 0
    names = {c["name"] for c in report["outputs"]["checks"]}
    assert {"DPI", "unitary invariance", "spectral = modular"} <= names


def test_verify_functions_text():
    code, text = run(["verify", "--suite", "functions"])
    assert code == 0
    assert "FAIL" not in text


def test_run_report_round_trip():
    _, data = run_json(["closest", "--bell", "3", "--f", "power:0.3", "--certify", "20"])
    again = RunReport.from_json(json.loads(json.dumps(data)))
    assert again.to_json() == data


def test_emitted_state_refeeds(tmp_path):
    # sigma_star written by closest reproduces the same value through entropy
    _, data = run_json(["closest", "--p", "0.75", "--f", "power_entropy:0.5"])
    sigma_path = tmp_path / "sigma.json"
    rho_path = tmp_path / "rho.json"
    sigma_path.write_text(json.dumps(data["outputs"]["sigma_star"]))
    save_state(schmidt_state([0.75, 0.25]), rho_path)
    assert load_state(sigma_path).dim == 4
    _, ent = run_json(["entropy", "--rho", str(rho_path), "--sigma", str(sigma_path), "--f", "power_entropy:0.5"])
    assert ent["outputs"]["S_f"] == pytest.approx(data["outputs"]["entanglement"], abs=1e-12)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qrelent", "closest", "--bell", "2", "--f", "log"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert "E = 0.693147" in proc.stdout
