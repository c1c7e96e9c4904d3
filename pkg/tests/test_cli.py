"""End-to-end command line checks run through subprocesses."""
import json
import math
import os
import subprocess
import sys

import pytest

NULL_SCAN = """\
[species]
label = 40Ca+
charge_number = 1
mass_u = 39.9625909

[site1]
frequency_mhz = 1.368
height_um = 60
deff_um = auto

[site2]
frequency_mhz = 1.368
height_um = 80
deff_um = auto

[wire]
capacitance_ff = 30
paddle_um = 120
separation_um = 620

[noise]
site1_heating_quanta_per_ms = 0
site1_jitter_sigma_hz = 372.65
site2_heating_quanta_per_ms = 250
site2_reference_mhz = 1.368
site2_jitter_sigma_hz = 372.65

[cooling]
site1_damping_per_s = 0
site1_target_quanta = 0
site2_damping_per_s = 0
site2_target_quanta = 0

[coupling]
kappa_hz = 0

[schedule]
kind = resonance_scan
center_mhz = 1.368
span_khz = 6
points = 9
probe_ms = 2
hot_quanta = 10000
cold_quanta = 200

[run]
ensemble = 60
seed = 99
"""


def run_cli(args, cwd, check=None):
    env = {k: v for k, v in os.environ.items()
           if not k.startswith("IONWIRE_")}
    proc = subprocess.run([sys.executable, "-m", "ionwire", *args],
                          cwd=cwd, env=env, capture_output=True, text=True,
                          timeout=300)
    if check is not None:
        assert proc.returncode == check, proc.stderr + proc.stdout
    return proc


def read_manifest(out_dir):
    with open(out_dir / "manifest.json") as fh:
        return json.load(fh)


def test_all_subcommands_advertise_help(tmp_path):
    for sub in ("rate", "deff", "swap", "scan", "sympathetic",
                "thermometry", "predict"):
        proc = run_cli([sub, "--help"], tmp_path, check=0)
        assert sub in proc.stdout


def test_usage_errors_exit_2(tmp_path):
    assert run_cli([], tmp_path).returncode == 2
    assert run_cli(["frobnicate"], tmp_path).returncode == 2
    proc = run_cli(["scan", "--scenario", "no_such_file.scenario",
                    "--out", str(tmp_path / "o")], tmp_path)
    assert proc.returncode == 2
    assert "no_such_file" in proc.stderr


def test_malformed_scenario_exits_2(tmp_path):
    bad = tmp_path / "bad.scenario"
    bad.write_text(NULL_SCAN.replace("capacitance_ff = 30",
                                     "capacitance_ff = thirty"))
    proc = run_cli(["scan", "--scenario", str(bad),
                    "--out", str(tmp_path / "o")], tmp_path)
    assert proc.returncode == 2
    assert "[unit]" in proc.stderr


def test_predict_writes_manifest_and_tables(tmp_path):
    out = tmp_path / "pred"
    proc = run_cli(["predict", "--out", str(out)], tmp_path, check=0)
    man = read_manifest(out)
    assert man["tool"] == "ionwire" and man["command"] == "predict"
    files = sorted(p.name for p in out.iterdir() if p.name != "manifest.json")
    assert files == sorted(man["outputs"])
    table = out / "prediction_table_headline.csv"
    assert table.exists()
    first = table.read_text().splitlines()[0]
    assert first.startswith("# ionwire csv schema v1 table=")
    assert "PASS" in proc.stdout


def test_seed_repeatability_is_byte_identical(tmp_path):
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        run_cli(["sympathetic", "--scenario", "sympathetic_benchmark", "--ensemble",
                 "400", "--seed", "42", "--svg", "--out", str(out)], tmp_path)
        outs.append(out)
    csvs = sorted(p.name for p in outs[0].iterdir()
                  if p.suffix in (".csv", ".svg"))
    assert any(n.endswith(".svg") for n in csvs), "expected an svg plot"
    for name in csvs:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()
    ja = json.load(open(outs[0] / "sympathetic_fit_uncoupled.json"))
    jb = json.load(open(outs[1] / "sympathetic_fit_uncoupled.json"))
    assert ja == jb


def test_no_writes_outside_out_dir(tmp_path):
    workdir = tmp_path / "cwd"
    workdir.mkdir()
    out = tmp_path / "results"
    run_cli(["predict", "--out", str(out)], workdir, check=0)
    assert list(workdir.iterdir()) == []


def test_json_format_switch(tmp_path):
    out = tmp_path / "j"
    run_cli(["deff", "--format", "json", "--out", str(out)], tmp_path,
            check=0)
    man = read_manifest(out)
    assert any(name.endswith(".json") and name != "manifest.json"
               for name in man["outputs"])
    assert not any(name.endswith(".csv") for name in man["outputs"])


def test_deff_table_contents(tmp_path):
    out = tmp_path / "d"
    run_cli(["deff", "--heights-um", "40,50,60", "--out", str(out)],
            tmp_path, check=0)
    rows = (out / "deff.csv").read_text().splitlines()
    assert rows[1].split(",")[0] == "height_um"
    assert len(rows) == 2 + 3
    d50 = float(rows[3].split(",")[1])
    assert abs(d50 - 131.069935) < 1e-3


def test_rate_reports_enhancement(tmp_path):
    out = tmp_path / "r"
    proc = run_cli(["rate", "--out", str(out)], tmp_path, check=0)
    man = read_manifest(out)
    assert man["command"] == "rate"
    rows = (out / "rate.csv").read_text()
    assert "enhancement_ratio" in rows
    assert "kappa_wire_hz" in proc.stdout


def test_thermometry_round_trip_cli(tmp_path):
    out = tmp_path / "t"
    proc = run_cli(["thermometry", "--nbar", "182", "--seed", "12",
                    "--out", str(out)], tmp_path, check=0)
    assert "fitted" in proc.stdout
    fit = json.load(open(out / "thermometry_fit.json"))
    assert abs(fit["parameters"]["n_bar"] - 182.0) / 182.0 < 0.10
    truth = json.load(open(out / "thermometry_truth.json"))
    assert truth["n_bar_true"] == 182.0 and truth["seed"] == 12


def test_band_failure_exits_1(tmp_path):
    scn = tmp_path / "null.scenario"
    scn.write_text(NULL_SCAN)
    out = tmp_path / "n"
    proc = run_cli(["scan", "--scenario", str(scn), "--out", str(out)],
                   tmp_path)
    assert proc.returncode == 1
    assert "FAIL" in proc.stdout
    # artifacts still land for post-mortem use
    assert (out / "manifest.json").exists()
    man = read_manifest(out)
    assert man["passed"] is False


def test_scan_precision_scales_with_ensemble(tmp_path):
    fits = {}
    for n in (50, 400):
        out = tmp_path / f"e{n}"
        run_cli(["scan", "--scenario", "scan_benchmark", "--ensemble", str(n),
                 "--seed", "42", "--out", str(out)], tmp_path, check=0)
        fits[n] = json.load(open(out / "resonance_scan_fit_resonance.json"))
    w50 = fits[50]["parameters"]["width_sigma_hz"]
    w400 = fits[400]["parameters"]["width_sigma_hz"]
    s50 = fits[50]["sigmas"]["width_sigma_hz"]
    s400 = fits[400]["sigmas"]["width_sigma_hz"]
    # same physics, only the statistical precision may differ
    assert abs(w50 - w400) < 3.0 * math.hypot(s50, s400)
    ratio = s50 / s400
    assert math.sqrt(8.0) / 2.0 < ratio < math.sqrt(8.0) * 2.0
