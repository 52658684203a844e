"""Exit-code contract and output checks for the command-line interface.

The golden suite pins twelve invocations' exit codes; the round-trip test
checks that an exported variety file reproduces the family-based results.
"""

import json
import subprocess
import sys

import pytest

from fqspectra.cli import main


def run_cli(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:  # argparse usage failures
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


GOLDEN = [
    # (argv, expected exit code)
    (["variety", "check", "--p", "3", "--d", "2", "--family", "sphere", "--j", "1"], 0),
    (["variety", "enum", "--p", "3", "--d", "2", "--family", "sphere", "--j", "1"], 0),
    (["energy", "lambda", "--p", "3", "--d", "2", "--family", "sphere", "--j", "1",
      "--subset", "all", "--k", "4"], 0),
    (["energy", "nu", "--p", "3", "--d", "2", "--family", "sphere", "--k", "2",
      "--format", "csv"], 0),
    (["energy", "delta", "--p", "3", "--d", "2", "--family", "sphere", "--k", "2"], 0),
    (["spectrum", "cayley", "--p", "3", "--d", "2", "--family", "paraboloid"], 0),
    (["spectrum", "euclidean", "--p", "5", "--d", "2", "--t", "1"], 0),
    (["spectrum", "euclidean", "--p", "3", "--d", "2", "--t", "0"], 0),
    (["spectrum", "affine", "--p", "3", "--d", "1", "--s", "2"], 0),
    (["spectrum", "affine", "--p", "2", "--d", "1", "--s", "2"], 1),   # even characteristic
    (["variety", "check", "--p", "3", "--d", "2", "--family", "sphere", "--j", "0"], 1),
    (["spectrum", "affine", "--p", "5", "--d", "1", "--s", "3"], 2),   # measured bound violated
]


@pytest.mark.parametrize("argv,expected", GOLDEN, ids=[" ".join(a) for a, _ in GOLDEN])
def test_golden_exit_codes(argv, expected, capsys):
    code, _out, _err = run_cli(argv, capsys)
    assert code == expected


def test_variety_check_values(capsys):
    code, out, _ = run_cli(["variety", "check", "--p", "3", "--d", "2",
                            "--family", "sphere", "--j", "1"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert payload["c1"] == pytest.approx(4 / 3)
    assert payload["c2"] == pytest.approx(2 / 3 ** 0.5)
    assert payload["verdict"] == "REGULAR"


def test_energy_lambda_value(capsys):
    code, out, _ = run_cli(["energy", "lambda", "--p", "3", "--d", "2",
                            "--family", "sphere", "--j", "1",
                            "--subset", "all", "--k", "4"], capsys)
    assert code == 0
    assert json.loads(out)["lambda_k"] == 36


def test_energy_lambda_pretty_prints_just_the_number(capsys):
    code, out, _ = run_cli(["energy", "lambda", "--p", "3", "--d", "2",
                            "--family", "sphere", "--j", "1",
                            "--subset", "all", "--k", "4", "--pretty"], capsys)
    assert code == 0
    assert out.strip() == "36"


def test_nu_csv_table(capsys):
    code, out, _ = run_cli(["energy", "nu", "--p", "3", "--d", "2",
                            "--family", "sphere", "--k", "2", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines() == ["t,count", "0,4", "1,4", "2,8"]


def test_nup_reports_bound(capsys):
    code, out, _ = run_cli(["energy", "nup", "--p", "3", "--d", "2",
                            "--family", "sphere", "--k", "2", "--s", "2",
                            "--x-set", "0"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert payload["cs_bound_ok"]
    assert payload["sumset_size"] >= payload["cs_bound"]


def test_variety_roundtrip_preserves_downstream_results(tmp_path, capsys):
    vfile = tmp_path / "sphere.txt"
    code, _, _ = run_cli(["variety", "enum", "--p", "3", "--d", "2",
                          "--family", "sphere", "--j", "1", "--out", str(vfile)], capsys)
    assert code == 0
    code, direct, _ = run_cli(["spectrum", "cayley", "--p", "3", "--d", "2",
                               "--family", "sphere", "--j", "1"], capsys)
    code2, from_file, _ = run_cli(["spectrum", "cayley", "--p", "3", "--d", "2",
                                   "--variety-file", str(vfile)], capsys)
    assert code == code2 == 0
    assert json.loads(direct) == json.loads(from_file)
    code3, lam_direct, _ = run_cli(["energy", "lambda", "--p", "3", "--d", "2",
                                    "--family", "sphere", "--j", "1", "--k", "4"], capsys)
    code4, lam_file, _ = run_cli(["energy", "lambda", "--p", "3", "--d", "2",
                                  "--variety-file", str(vfile), "--k", "4"], capsys)
    assert json.loads(lam_direct)["lambda_k"] == json.loads(lam_file)["lambda_k"] == 36


def test_variety_file_field_mismatch(tmp_path, capsys):
    vfile = tmp_path / "sphere5.txt"
    run_cli(["variety", "enum", "--p", "5", "--d", "2", "--family", "sphere",
             "--out", str(vfile)], capsys)
    code, _, err = run_cli(["spectrum", "cayley", "--p", "3", "--d", "2",
                            "--variety-file", str(vfile)], capsys)
    assert code == 1
    assert "F_5" in err


def test_spectrum_out_table(tmp_path, capsys):
    path = tmp_path / "spec.txt"
    code, out, _ = run_cli(["spectrum", "cayley", "--p", "3", "--d", "2",
                            "--family", "sphere", "--out", str(path)], capsys)
    assert code == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "m re im modulus"
    assert len(lines) == 1 + 9
    assert json.loads(out)["out"] == str(path)


def test_audit_mixing_cli(capsys):
    code, out, _ = run_cli(["audit", "mixing", "--p", "3", "--d", "2",
                            "--family", "sphere", "--pairs", "200", "--seed", "1"], capsys)
    payload = json.loads(out)
    assert code == 0
    assert payload["violations"] == 0
    assert payload["min_relative_gap"] >= -1e-6


def test_experiment_cli(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(
        "p = 3\nd = 2\nfamily = sphere\nj = 1\nk = 2\n"
        "sizes = 4\nsizes_mode = absolute\ntrials = 2\nseed = 7\n")
    out_json = tmp_path / "report.json"
    out_csv = tmp_path / "table.csv"
    code, out, _ = run_cli(["experiment", "coverage", "--plan", str(plan),
                            "--out", str(out_json), "--csv", str(out_csv)], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["hard_failures"] == 0
    assert out_json.exists() and out_csv.exists()
    report = json.loads(out_json.read_text())
    assert report["plan"]["seed"] == 7
    assert len(report["records"]) == 2


def test_experiment_missing_plan(capsys):
    code, _, err = run_cli(["experiment", "coverage", "--plan", "/nonexistent"], capsys)
    assert code == 1


def test_threads_flag_validated(capsys):
    code, _, _ = run_cli(["--threads", "0", "variety", "check", "--p", "3",
                          "--d", "2", "--family", "sphere"], capsys)
    assert code == 1


def test_threads_flag_output_identical(capsys):
    argv = ["variety", "check", "--p", "3", "--d", "2", "--family", "sphere"]
    _, out1, _ = run_cli(["--threads", "1"] + argv, capsys)
    _, out4, _ = run_cli(["--threads", "4"] + argv, capsys)
    assert out1 == out4


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fqspectra.cli", "variety", "check",
         "--p", "3", "--d", "2", "--family", "sphere", "--j", "1", "--pretty"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "C1 = 1.3333" in proc.stdout
    assert "REGULAR" in proc.stdout
