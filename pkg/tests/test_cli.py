import json
import subprocess
import sys

import pytest

from rabi2.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


# ---- verify-g -----------------------------------------------------------

def test_verify_g_defaults(capsys):
    code, payload, _ = run_json(capsys, "verify-g", "--order", "64")
    assert code == 0 and payload["exit_code"] == 0 and payload["status"] == "verified"
    res = payload["result"]
    assert res["claim_holds"] and res["g_plus_verdict"] == "all_zero"
    assert res["vanishing_members"] == ["+1/even", "+i/odd"]
    assert payload["ring"] == "epoly"
    assert payload["config"]["order"] == 64
    assert set(payload["versions"]) >= {"rabi2", "numpy", "numba", "kernel_backend"}
    assert res["control_uniqueness"]["identically_zero"] is False


def test_verify_g_minimum_order(capsys):
    code, payload, _ = run_json(capsys, "verify-g", "--order", "4")
    assert code == 0 and payload["result"]["claim_holds"]


def test_verify_g_fault_injection(capsys):
    code, payload, _ = run_json(capsys, "verify-g", "--order", "32", "--inject-fault", "9")
    assert code == 1 and payload["status"] == "falsified"
    verdict = payload["result"]["g_plus_verdict"]
    assert verdict["first_nonzero"]["index"] == 9


def test_verify_g_bound_energy(capsys):
    code, payload, _ = run_json(capsys, "verify-g", "--order", "16", "--energy", "1/2")
    assert code == 0 and payload["ring"] == "gaussian"


# ---- verify-ode4 --------------------------------------------------------

def test_verify_ode4(capsys):
    code, payload, _ = run_json(capsys, "verify-ode4", "--order", "24")
    rows = payload["result"]["residuals"]
    assert code == 0 and len(rows) == 3 * 6 and all(r["zero"] for r in rows)


def test_verify_ode4_rejects_shifted_reading(capsys):
    code, payload, _ = run_json(capsys, "verify-ode4", "--order", "24", "--a1-variant", "shifted")
    assert code == 1 and not payload["result"]["all_zero"]


# ---- spectrum -----------------------------------------------------------

def test_spectrum_json_defaults(capsys):
    code, payload, _ = run_json(capsys, "spectrum")
    res = payload["result"]
    assert code == 0 and res["cutoffs"] == [500, 600] and res["converged_count"] >= 10
    assert all(lv["bargmann"] == {"phi1": "converging", "phi2": "converging"} for lv in res["levels"])
    energies = [lv["eigenvalue"] for lv in res["levels"]]
    assert energies == sorted(energies)
    # a third cutoff confirms the lowest levels
    _, third, _ = run_json(capsys, "spectrum", "--cutoffs", "600,700")
    for a, b in zip(res["levels"][:10], third["result"]["levels"][:10]):
        assert abs(a["eigenvalue"] - b["eigenvalue"]) <= 1e-10


def test_spectrum_csv_g_zero(capsys):
    code, out, _ = run(capsys, "spectrum", "--g", "0", "--cutoffs", "10,12", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "index,eigenvalue,converged_flag,residual_bound"
    assert len(lines) == 1 + 26
    first = lines[1].split(",")
    assert float(first[1]) == pytest.approx(-0.35) and first[2] == "1"


def test_spectrum_parity(capsys):
    code, payload, _ = run_json(capsys, "spectrum", "--cutoffs", "60,80", "--parity", "odd")
    assert code == 0 and payload["result"]["parity"] == "odd"


# ---- report -------------------------------------------------------------

def test_report_json(capsys):
    code, payload, _ = run_json(capsys, "report", "--grid", "0:2:5", "--order", "48",
                                "--cutoffs", "100,120", "--format", "json", "--control")
    res = payload["result"]
    assert code == 0
    assert res["scan"]["all_zero"] and res["scan"]["zero_count"] == 5
    assert res["control_scan"]["zero_count"] == 0


def test_report_text(capsys):
    code, out, _ = run(capsys, "report", "--grid", "0:1:3", "--order", "32", "--cutoffs", "60,80")
    assert code == 0
    assert "exact zeros: 3/3" in out and "converged levels" in out


def test_report_g_zero(capsys):
    code, payload, _ = run_json(capsys, "report", "--g", "0", "--cutoffs", "20,30", "--format", "json")
    assert code == 0 and payload["result"]["scan"] is None
    assert payload["result"]["scan_skipped"]


# ---- usage errors -------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["verify-g", "--g", "0.1.2"],
    ["verify-g", "--order", "3"],
    ["verify-g", "--g", "0"],
    ["verify-g", "--order", "8", "--inject-fault", "20"],
    ["spectrum", "--g", "1/4"],
    ["spectrum", "--cutoffs", "600,500"],
    ["spectrum", "--cutoffs", "five"],
    ["report", "--grid", "0:1"],
    ["report", "--z0", "1/0"],
    ["verify-ode4", "--a1-variant", "other"],
    ["no-such-command"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "g.json"
    code, out, _ = run(capsys, "verify-g", "--order", "8", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "verify-g"


def test_output_is_deterministic(capsys):
    argv = ["verify-ode4", "--order", "16", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, other, _ = run(capsys, "verify-ode4", "--order", "16", "--seed", "8")
    assert other != first


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rabi2.cli", "verify-g", "--order", "8"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["status"] == "verified"
