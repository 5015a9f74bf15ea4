import csv
import json
import math
import subprocess
import sys


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "swapbell", *args],
        capture_output=True, text=True, timeout=120,
    )


def test_probabilities_plain_text():
    proc = run_cli("probabilities", "--variant", "A", "--theta1", "0.3", "--theta2", "0.1")
    assert proc.returncode == 0
    assert "P(1a+,1a-;0b+,0b-) = 0.153846154" in proc.stdout
    assert proc.stdout.strip().endswith("sum = 1")


def test_probabilities_json():
    proc = run_cli("probabilities", "--variant", "B", "--theta1", "0", "--theta2", "0",
                   "--format", "json")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["variant"] == "B"
    assert payload["sum"] == 1
    by_label = {row["label"]: row["probability"] for row in payload["patterns"]}
    assert by_label["1a+,1a-;0b+,0b-"] == 0.4


def test_probabilities_csv_and_out_file(tmp_path):
    out = tmp_path / "table.csv"
    proc = run_cli("probabilities", "--variant", "A", "--theta1", "0", "--theta2", "0",
                   "--format", "csv", "--out", str(out))
    assert proc.returncode == 0
    assert proc.stdout == ""
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0][0] == "label"
    assert len(rows) == 12  # header, ten patterns, sum line
    assert rows[-1][0] == "sum"


def test_correlation_degrees():
    proc = run_cli("correlation", "--variant", "B", "--alpha", "0.5",
                   "--theta1", "45", "--theta2", "0", "--degrees")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert abs(payload["theta1"] - math.pi / 4) < 1e-8
    assert abs(payload["correlation"] - 0.6) < 1e-9


def test_chsh_max_evaluation_mode():
    proc = run_cli("chsh-max", "--variant", "B", "--alpha", "1",
                   "--theta1", "-0.65139", "--theta1p", "-1.437175",
                   "--theta2", "0.52663", "--theta2p", "1.31193")
    payload = json.loads(proc.stdout)
    assert payload["mode"] == "evaluated"
    assert abs(payload["s"] - 2.16569) < 1e-4
    assert payload["violated"] is True
    assert abs(payload["doubled_angles"]["theta1"] + 1.30278) < 1e-9


def test_chsh_max_requires_both_primed_angles():
    proc = run_cli("chsh-max", "--variant", "B", "--alpha", "1",
                   "--theta1", "0", "--theta1p", "1")
    assert proc.returncode == 2
    assert "theta2p" in proc.stderr


def test_chsh_max_optimizes():
    proc = run_cli("chsh-max", "--variant", "B", "--alpha", "1")
    payload = json.loads(proc.stdout)
    assert payload["mode"] == "maximized"
    assert abs(payload["s"] - (2 * math.sqrt(2) / 5 + 8 / 5)) < 1e-6


def test_alpha_threshold_variant_b():
    proc = run_cli("alpha-threshold", "--variant", "B")
    payload = json.loads(proc.stdout)
    assert payload["always_violated"] is True
    assert payload["alpha_star"] == 0


def test_scan_hom_dip():
    proc = run_cli("scan", "--which", "hom-dip", "--points", "51")
    rows = list(csv.reader(proc.stdout.splitlines()))
    assert rows[0] == ["theta1", "coincidence_probability"]
    values = {float(t): float(p) for t, p in rows[1:]}
    assert abs(values[min(values, key=lambda t: abs(t - math.pi / 4))]) < 1e-12
    assert abs(values[0.0] - 0.4) < 1e-9


def test_scan_fringe_json():
    proc = run_cli("scan", "--which", "fringe", "--variant", "A", "--alpha", "1",
                   "--points", "3", "--format", "json")
    payload = json.loads(proc.stdout)
    assert payload["which"] == "fringe"
    assert len(payload["rows"]) == 3
    assert abs(float(payload["rows"][0]["correlation"]) - 11 / 13) < 1e-8


def test_scan_requires_which():
    proc = run_cli("scan")
    assert proc.returncode == 2


def test_config_file_flags_win(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("variant = B\nalpha = 0.25\ntheta1 = 0.3\ntheta2 = 9.9\n")
    proc = run_cli("correlation", "--config", str(cfg), "--theta2", "0.3")
    payload = json.loads(proc.stdout)
    assert payload["variant"] == "B"
    assert payload["theta2"] == 0.3


def test_config_file_bad_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("variance = B\n")
    proc = run_cli("correlation", "--config", str(cfg), "--alpha", "0.5")
    assert proc.returncode == 2
    assert "unknown key" in proc.stderr


def test_missing_required_setting():
    proc = run_cli("correlation", "--variant", "A")
    assert proc.returncode == 2
    assert "alpha" in proc.stderr


def test_alpha_out_of_range():
    proc = run_cli("correlation", "--variant", "A", "--alpha", "1.5")
    assert proc.returncode == 2


def test_verify_passes():
    proc = run_cli("verify")
    assert proc.returncode == 0
    assert "all checks passed" in proc.stdout
    assert proc.stdout.count("[ok]") == 5


def test_verify_reports_injected_error():
    proc = run_cli("verify", "--inject-error")
    assert proc.returncode == 1
    assert "[FAIL]" in proc.stdout
