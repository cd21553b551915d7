import json
import math
from pathlib import Path

import numpy as np
import pytest

from curabeam.cli import main
from curabeam.config import config_hash, load_config

ROOT = Path(__file__).resolve().parents[1]
SMALL = str(ROOT / "configs" / "small_1d.json")
FAST = ["--set", "scenario.trials=20", "--set", "scenario.coverage_samples=50",
        "--set", "erd_map.points=11", "--set", "validation.directions=2"]


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def summary(out):
    return json.loads(out.strip().splitlines()[-1])


def check_hashes(directory: Path, expected: str):
    files = sorted(directory.iterdir())
    assert files
    for f in files:
        if f.suffix == ".csv":
            assert f.read_text().splitlines()[0] == f"# config_sha256={expected}"
        elif f.suffix == ".json":
            assert json.loads(f.read_text())["config_sha256"] == expected


def test_codebook_outputs(capsys, tmp_path):
    code, out, _ = run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path))
    assert code == 0
    s = summary(out)
    assert s["materialized"] and s["size"]["total"] == s["codewords"]
    assert {"angular_points", "near_field", "far_field"} <= set(s["size"])
    manifest = json.loads((tmp_path / "codebook_manifest.json").read_text())
    raw = (tmp_path / "codebook_matrix.bin").read_bytes()
    import hashlib
    assert hashlib.sha256(raw).hexdigest() == manifest["matrix"]["sha256"]
    k, n, two = manifest["matrix"]["shape"]
    data = np.frombuffer(raw, dtype="<f8").reshape(k, n, two)
    w = data[..., 0] + 1j * data[..., 1]
    assert np.max(np.abs(np.abs(w) - 1 / math.sqrt(n))) < 1e-12
    lines = (tmp_path / "codebook_metadata.csv").read_text().splitlines()
    assert lines[1] == "index,kind,range,rho,varphi,theta,phi,ring,azimuth,range_index"
    assert len(lines) == k + 2
    check_hashes(tmp_path, s["config_sha256"])


def test_codebook_rerun_is_byte_identical(capsys, tmp_path):
    for d in ("a", "b"):
        assert run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path / d))[0] == 0
    for f in (tmp_path / "a").iterdir():
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()


def test_codebook_straight_array(capsys, tmp_path):
    code, out, _ = run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path),
                       "--set", "geometry.bend_half_angle=0")
    assert code == 0 and summary(out)["codewords"] > 0


def test_codebook_over_guard_writes_counts_only(capsys, tmp_path):
    code, out, _ = run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path),
                       "--set", "switches.max_codewords=100")
    assert code == 0
    assert not summary(out)["materialized"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["codebook_manifest.json"]


def test_config_errors_exit_2(capsys, tmp_path):
    cases = [
        ["--set", "geometry.bogus=1"],
        ["--set", "thresholds.delta_p=2"],
        ["--set", "scenario.trials=0"],
        ["--set", "thresholds.r_min=0.01"],
    ]
    for extra in cases:
        code, _, err = run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path), *extra)
        assert code == 2, extra
        assert json.loads(err)["exit_code"] == 2
    code, _, _ = run(capsys, "codebook", "--config", str(tmp_path / "missing.json"))
    assert code == 2
    both = tmp_path / "both.json"
    both.write_text(json.dumps({"geometry": {"wavelength": 0.01, "carrier_frequency": 3e10}}))
    assert run(capsys, "codebook", "--config", str(both))[0] == 2


def test_domain_errors_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "sweep", "--config", SMALL, "--out", str(tmp_path),
                       "--set", "switches.max_codewords=100", *FAST)
    assert code == 3
    assert json.loads(err)["error"] == "CodebookSizeError"


def test_wavelength_override(capsys, tmp_path):
    code, out, _ = run(capsys, "codebook", "--config", SMALL, "--out", str(tmp_path),
                       "--set", "geometry.wavelength=0.01")
    assert code == 0
    manifest = json.loads((tmp_path / "codebook_manifest.json").read_text())
    assert manifest["geometry"]["wavelength"] == 0.01
    assert manifest["geometry"]["carrier_frequency"] is None
    cfg = load_config(SMALL, ["geometry.wavelength=0.01", "geometry.carrier_frequency=1e10"])
    assert cfg["geometry"]["wavelength"] is None


def test_hash_ignores_output_and_jobs():
    a = load_config(SMALL, ["output.directory=\"x\"", "runtime.jobs=1"])
    b = load_config(SMALL, ["output.directory=\"y\"", "runtime.jobs=4"])
    c = load_config(SMALL, ["scenario.seed=3"])
    assert config_hash(a) == config_hash(b) != config_hash(c)


def test_heatmap_focal_gain(capsys, tmp_path):
    code, out, _ = run(capsys, "heatmap", "--config", SMALL, "--out", str(tmp_path))
    assert code == 0
    assert summary(out)["peak_gain"] == pytest.approx(1.0, abs=1e-12)
    rows = np.loadtxt(tmp_path / "heatmap_angle_angle.csv", delimiter=",", skiprows=2)
    assert rows.shape == (41 * 41, 3)
    check_hashes(tmp_path, summary(out)["config_sha256"])


def test_heatmap_straight_array_is_phi_invariant(capsys, tmp_path):
    code, _, _ = run(capsys, "heatmap", "--config", SMALL, "--out", str(tmp_path),
                     "--set", "geometry.bend_half_angle=0")
    assert code == 0
    rows = np.loadtxt(tmp_path / "heatmap_angle_angle.csv", delimiter=",", skiprows=2)
    gain = rows[:, 2].reshape(41, 41)
    assert np.max(np.ptp(gain, axis=1)) < 1e-6


def test_heatmap_far_focus_is_range_invariant(capsys, tmp_path):
    code, _, _ = run(capsys, "heatmap", "--config", SMALL, "--out", str(tmp_path),
                     "--set", "heatmap.mode=range_angle", "--set", "heatmap.range_span=[25, 10000]",
                     "--set", 'heatmap.focus={"range": 10000, "theta": 1.2, "phi": 1.5}')
    assert code == 0
    rows = np.loadtxt(tmp_path / "heatmap_range_angle.csv", delimiter=",", skiprows=2)
    gain = rows[:, 2].reshape(41, 41)
    assert np.max(np.ptp(gain, axis=0)) < 0.01


def test_erd_map_files(capsys, tmp_path):
    code, out, _ = run(capsys, "erd-map", "--config", SMALL, "--out", str(tmp_path), *FAST)
    assert code == 0
    contours = sorted(p.name for p in tmp_path.glob("erd_contour_*.csv"))
    assert contours == ["erd_contour_beta_0deg.csv", "erd_contour_beta_30deg.csv",
                        "erd_contour_beta_45deg.csv", "erd_contour_beta_60deg.csv"]
    lines = (tmp_path / contours[0]).read_text().splitlines()
    assert lines[1] == "rho,varphi,theta,phi,erd,y,z"
    assert len(lines) == 13
    check_hashes(tmp_path, summary(out)["config_sha256"])


def test_sweep_single_row(capsys, tmp_path):
    code, out, _ = run(capsys, "sweep", "--config", SMALL, "--out", str(tmp_path),
                       "--set", 'scenario.codebooks=["proposed"]', "--set", "scenario.snr_db=[10]",
                       "--set", "scenario.trials=1")
    assert code == 0
    lines = (tmp_path / "sweep.csv").read_text().splitlines()
    assert lines[1] == "codebook,size,snr_db,mean_se,mean_gain,genie_se,trials"
    assert len(lines) == 3
    check_hashes(tmp_path, summary(out)["config_sha256"])


def test_sweep_independent_of_jobs(capsys, tmp_path):
    for jobs in ("1", "2"):
        assert run(capsys, "sweep", "--config", SMALL, "--out", str(tmp_path / jobs),
                   "--jobs", jobs, *FAST)[0] == 0
    for f in (tmp_path / "1").iterdir():
        assert f.read_bytes() == (tmp_path / "2" / f.name).read_bytes()


def test_coverage_and_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "coverage", "--config", SMALL, "--out", str(tmp_path), *FAST)
    assert code == 0
    cov = json.loads((tmp_path / "coverage_summary.json").read_text())
    assert cov["n_samples"] == 50
    code, out, _ = run(capsys, "validate", "--config", SMALL, "--out", str(tmp_path), *FAST)
    assert code == 0
    verdicts = [ln for ln in out.splitlines() if ln.startswith(("PASS", "FAIL"))]
    assert len(verdicts) == 3
    reports = json.loads((tmp_path / "validation.json").read_text())["reports"]
    assert [r["model"] for r in reports][1:] == ["range_gain_model_1d", "erd_1d"]
    check_hashes(tmp_path, summary(out)["config_sha256"])


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "curabeam", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "erd-map" in proc.stdout
