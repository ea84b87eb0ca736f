"""End-to-end tests of the command line interface.

Every test runs the installed entry point in a subprocess, so argument
parsing, exit codes, the JSON error channel, and artifact round-trips
are exercised exactly as a shell user sees them.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from kmva import load_matrix

CLI = [sys.executable, "-m", "kmva.cli"]


def run_cli(*args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CLI + [str(a) for a in args], capture_output=True,
                          text=True, env=env, cwd=cwd)


def stderr_error(proc):
    return json.loads(proc.stderr.strip().splitlines()[-1])


@pytest.fixture
def ring_csv(tmp_path):
    path = tmp_path / "ring.csv"
    proc = run_cli("synth", "regime", "--kind", "ring", "--n", 60,
                   "--seed", 0, "--out", path)
    assert proc.returncode == 0, proc.stderr
    return path


@pytest.fixture
def ring_pair(ring_csv, tmp_path):
    """The ring sample split into one single-column CSV per side."""
    data = np.genfromtxt(ring_csv, delimiter=",", skip_header=1)
    paths = (tmp_path / "x.csv", tmp_path / "y.csv")
    for path, col in zip(paths, data.T):
        path.write_text("\n".join(["v"] + [repr(float(v)) for v in col]) + "\n")
    return paths


class TestSynth:
    def test_regime_csv_and_rerun_bytes(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        for path in (a, b):
            proc = run_cli("synth", "regime", "--kind", "linear", "--n", 25,
                           "--seed", 3, "--out", path)
            assert proc.returncode == 0, proc.stderr
        assert a.read_bytes() == b.read_bytes()
        header, first = a.read_text().splitlines()[:2]
        assert header == "x,y"
        assert len(first.split(",")) == 2

    def test_cube_writes_field_and_truth(self, tmp_path):
        spec = {"shape": [4, 4], "n": 32, "noise_fraction": 0.1,
                "modes": [{"fraction": 0.9, "temporal": "sinusoid",
                           "freq_bin": 5}]}
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        base = tmp_path / "field"
        proc = run_cli("synth", "cube", "--spec", spec_path, "--seed", 1,
                       "--out", base)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "field.json").exists()
        assert (tmp_path / "field.bin").exists()
        truth = json.loads((tmp_path / "field_truth.json").read_text())
        assert truth["seed"] == 1
        assert truth["modes"][0]["freq_bin"] == 5

    def test_bad_spec_key_is_a_data_error(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"shape": [4, 4], "n": 32,
                                         "modes": [], "typo": 1}))
        proc = run_cli("synth", "cube", "--spec", spec_path, "--seed", 0,
                       "--out", tmp_path / "f")
        assert proc.returncode == 3
        assert "typo" in stderr_error(proc)["message"]


class TestDecompose:
    def test_mca_artifacts_round_trip(self, ring_pair, tmp_path):
        out = tmp_path / "modes"
        proc = run_cli("decompose", "--method", "mca", "--input", *ring_pair,
                       "--p", 1, "--out", out)
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((out / "modes.json").read_text())
        assert meta["method"] == "mca"
        assert meta["n"] == 60
        loadings = load_matrix(str(out / "loadings_a"))
        assert loadings.shape == (1, 1)
        temporal = load_matrix(str(out / "temporal_a"))
        assert temporal.shape == (60, 1)

    def test_component_overflow_names_the_flag(self, ring_pair, tmp_path):
        proc = run_cli("decompose", "--method", "mca", "--input", *ring_pair,
                       "--p", 5, "--out", tmp_path)
        assert proc.returncode == 2
        err = stderr_error(proc)
        assert err["error"] == "config"
        assert err["flag"] == "--p"

    def test_kernel_flag_requires_kernel_method(self, ring_pair, tmp_path):
        proc = run_cli("decompose", "--method", "mca", "--input", *ring_pair,
                       "--kernel", "rbf", "--out", tmp_path)
        assert proc.returncode == 2
        assert stderr_error(proc)["flag"] == "--kernel"

    def test_missing_input_is_a_data_error(self, tmp_path):
        proc = run_cli("decompose", "--method", "kpca",
                       "--input", tmp_path / "absent.csv", "--out", tmp_path)
        assert proc.returncode == 3
        assert stderr_error(proc)["error"] == "data"

    def test_cube_kpca(self, tmp_path):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(
            {"shape": [5, 5], "n": 40, "noise_fraction": 0.2,
             "modes": [{"fraction": 0.8, "temporal": "sinusoid",
                        "freq_bin": 6}]}))
        base = tmp_path / "field"
        assert run_cli("synth", "cube", "--spec", spec_path, "--seed", 0,
                       "--out", base).returncode == 0
        out = tmp_path / "kp"
        proc = run_cli("decompose", "--method", "kpca", "--cube", base,
                       "--p", 3, "--out", out)
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((out / "modes.json").read_text())
        assert len(meta["values"]) == 3

    def test_preset_recovers_leading_mode(self, tmp_path):
        out = tmp_path / "sst"
        proc = run_cli("decompose", "--preset", "sst-synth", "--seed", 0,
                       "--out", out)
        assert proc.returncode == 0, proc.stderr
        meta = json.loads((out / "modes.json").read_text())
        assert meta["method"] == "rock-pca"
        assert meta["explained_fraction"][0] > 0.95
        assert meta["rotation"]["converged"] is True

    def test_out_dir_env_var(self, ring_pair, tmp_path):
        outdir = tmp_path / "envout"
        proc = run_cli("decompose", "--method", "cca", "--input", *ring_pair,
                       "--out", "rel",
                       env_extra={"KMVA_OUT_DIR": str(outdir)})
        assert proc.returncode == 0, proc.stderr
        assert (outdir / "rel" / "modes.json").exists()


class TestDepend:
    def test_json_report(self, ring_csv):
        proc = run_cli("depend", "--input", ring_csv, "--perm", 20,
                       "--seed", 4)
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert payload["n"] == 60
        assert payload["n_permutations"] == 20
        stats = payload["statistics"]
        assert set(stats) == {"pearson", "mca", "cca", "hsic_lin",
                              "hsic_rbf", "coco", "kcca", "kgv"}
        q = stats["kgv"]["null_quantiles"]
        assert q["q50"] <= q["q95"] <= q["q99"]
        assert stats["hsic_rbf"]["sigma"][0] > 0

    def test_single_stat_and_rerun_bytes(self, ring_csv, tmp_path):
        first = tmp_path / "r1.json"
        second = tmp_path / "r2.json"
        for out in (first, second):
            proc = run_cli("depend", "--input", ring_csv, "--stat", "hsic_rbf",
                           "--perm", 15, "--seed", 2, "--out", out)
            assert proc.returncode == 0, proc.stderr
        assert first.read_bytes() == second.read_bytes()
        payload = json.loads(first.read_text())
        assert list(payload["statistics"]) == ["hsic_rbf"]

    def test_permutations_require_seed(self, ring_csv):
        proc = run_cli("depend", "--input", ring_csv, "--perm", 10)
        assert proc.returncode == 2
        assert stderr_error(proc)["flag"] == "--seed"


class TestSweepSigma:
    def test_point_count_and_columns(self, ring_pair):
        proc = run_cli("sweep-sigma", "--input", *ring_pair, "--points", 3)
        assert proc.returncode == 0, proc.stderr
        lines = proc.stdout.strip().splitlines()
        assert lines[0] == "label,sigma,kgv,kcca,kgv_linear,kcca_linear"
        assert len(lines) == 4


class TestEquivCheck:
    def test_matched_eps_passes(self):
        proc = run_cli("equiv-check", "--seed", 0)
        assert proc.returncode == 0, proc.stderr
        payload = json.loads(proc.stdout)
        assert payload["verdict"] == "PASS"
        assert payload["max_deviation"] < 1e-6

    def test_mismatched_eps_fails_with_explanation(self):
        # the achieved correlations only drift once the ridge visibly
        # rotates the dual directions, so the mismatch must be large
        proc = run_cli("equiv-check", "--seed", 0, "--eps-dual", "1.0")
        assert proc.returncode == 1
        payload = json.loads(proc.stdout)
        assert payload["verdict"] == "FAIL"
        assert "eps" in payload["explanation"]


class TestTable1:
    def test_small_n_warns_and_is_deterministic(self):
        first = run_cli("table1", "--seed", 0, "--n", 20, "--perm", 50)
        second = run_cli("table1", "--seed", 0, "--n", 20, "--perm", 50)
        assert "under-sampled" in first.stderr
        assert first.returncode in (0, 1)
        assert first.stdout == second.stdout

    def test_expected_detection_pattern_at_full_size(self):
        proc = run_cli("table1", "--seed", 0, "--n", 400, "--perm", 100)
        assert proc.returncode == 0, proc.stdout + proc.stderr
        assert "pattern: PASS" in proc.stdout


class TestErrors:
    def test_unknown_subcommand(self):
        proc = run_cli("frobnicate")
        assert proc.returncode == 2
        assert stderr_error(proc)["error"] == "config"

    def test_missing_required_flag_names_it(self):
        proc = run_cli("synth", "regime", "--kind", "linear",
                       "--out", "x.csv")
        assert proc.returncode == 2
        assert stderr_error(proc)["flag"] == "--seed"
