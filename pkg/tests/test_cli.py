"""Subcommand behaviour, exit codes, and output-file schemas."""

import json
import subprocess
import sys

import pytest

from skplane import moments, plane

BASE_CONFIG = {
    "n_assets": 5,
    "n_weeks": 16,
    "dgp": "raw_returns",
    "seed": 42,
    "start": "2019-11-04",  # straddles the era cutoff at week 8
}


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "skplane", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli")
    (path / "cfg.json").write_text(json.dumps(BASE_CONFIG))
    res = run_cli("synth", "--synth-config", path / "cfg.json", "--out", path)
    assert res.returncode == 0, res.stderr
    return path


class TestSynth:
    def test_writes_expected_row_count(self, workdir):
        lines = (workdir / "data.csv").read_text().strip().split("\n")
        assert len(lines) == 1 + 5 * 16 * 7

    def test_seed_override_changes_output(self, workdir, tmp_path):
        res = run_cli("synth", "--synth-config", workdir / "cfg.json",
                      "--out", tmp_path, "--seed", "7")
        assert res.returncode == 0
        assert (tmp_path / "data.csv").read_bytes() != (workdir / "data.csv").read_bytes()


class TestMoments:
    def test_outputs_and_schema(self, workdir):
        out = workdir / "m"
        res = run_cli("moments", "--input", workdir / "data.csv", "--out", out)
        assert res.returncode == 0, res.stderr
        panel = moments.read_panel_csv((out / "moments.csv").read_text())
        assert len(panel) > 0
        descriptives = json.loads((out / "descriptives.json").read_text())
        assert set(descriptives) == {"skewness", "kurtosis", "delta"}
        for block in descriptives.values():
            assert set(block) == {"n", "mean", "sd", "min", "max", "p1", "p25", "p50", "p75", "p99"}
        drops = json.loads((out / "drops.json").read_text())
        assert all(isinstance(v, int) for v in drops.values())

    def test_missing_input_exits_1(self, workdir, tmp_path):
        res = run_cli("moments", "--input", workdir / "nope.csv", "--out", tmp_path)
        assert res.returncode == 1
        assert res.stderr

    def test_all_constant_input_exits_2(self, tmp_path):
        rows = ["date,symbol,mcap"]
        for day in range(1, 22):
            rows.append(f"2019-04-{day:02d},FLAT,100.0")
        (tmp_path / "flat.csv").write_text("\n".join(rows) + "\n")
        res = run_cli("moments", "--input", tmp_path / "flat.csv", "--out", tmp_path / "o")
        assert res.returncode == 2

    def test_synth_config_source(self, workdir, tmp_path):
        res = run_cli("moments", "--synth-config", workdir / "cfg.json", "--out", tmp_path)
        assert res.returncode == 0
        direct = moments.read_panel_csv((tmp_path / "moments.csv").read_text())
        via_file = moments.read_panel_csv((workdir / "m" / "moments.csv").read_text())
        assert direct == via_file

    def test_input_and_synth_config_mutually_exclusive(self, workdir, tmp_path):
        res = run_cli("moments", "--input", workdir / "data.csv",
                      "--synth-config", workdir / "cfg.json", "--out", tmp_path)
        assert res.returncode == 2  # argparse usage error
        assert "not allowed with" in res.stderr


class TestFit:
    def test_eight_fits_with_tests(self, workdir):
        out = workdir / "f"
        res = run_cli("fit", "--input", workdir / "data.csv", "--out", out)
        assert res.returncode == 0, res.stderr
        fits = json.loads((out / "fits.json").read_text())
        assert list(fits["models"]) == ["M7", "M8", "M9", "M11"]
        n_fits = 0
        for model, entry in fits["models"].items():
            assert set(entry) == {"random_effects", "pooled_ols"}
            n_fits += len(entry)
            for estimator, fit in entry.items():
                assert "joint_zero_total" in fit["tests"]
                if model in ("M9", "M11"):
                    assert "joint_zero_interaction" in fit["tests"]
                kind = fit["tests"]["joint_zero_total"]["kind"]
                assert kind == ("wald_chi2" if estimator == "random_effects" else "f")
        assert n_fits == 8

    def test_zero_total_effect_df_mirrors_model_size(self, workdir):
        fits = json.loads((workdir / "f" / "fits.json").read_text())
        expected_q = {"M7": 1, "M8": 2, "M9": 3, "M11": 4}
        for model, q in expected_q.items():
            wald = fits["models"][model]["random_effects"]["tests"]["joint_zero_total"]
            assert wald["df"] == q
            f = fits["models"][model]["pooled_ols"]["tests"]["joint_zero_total"]
            assert f["df"][0] == q

    def test_model_subset_flag(self, workdir, tmp_path):
        res = run_cli("fit", "--input", workdir / "data.csv", "--out", tmp_path,
                      "--models", "7,8")
        assert res.returncode == 0
        fits = json.loads((tmp_path / "fits.json").read_text())
        assert list(fits["models"]) == ["M7", "M8"]

    def test_rank_deficient_input_names_model(self, tmp_path):
        # Entirely pre-cutoff data zeroes the interaction column of M9.
        cfg = dict(BASE_CONFIG, start="2019-04-01", n_weeks=8)
        (tmp_path / "pre.json").write_text(json.dumps(cfg))
        res = run_cli("fit", "--synth-config", tmp_path / "pre.json", "--out", tmp_path / "o")
        assert res.returncode == 1
        assert "M9" in res.stderr


class TestPlane:
    def test_outputs(self, workdir):
        out = workdir / "p"
        res = run_cli("plane", "--input", workdir / "data.csv", "--out", out)
        assert res.returncode == 0, res.stderr
        points, curves = plane.read_plane_csv((out / "plane.csv").read_text())
        assert set(curves) == {"pearson", "klaassen", "quadratic", "powerlaw"}
        pre = plane.read_points_csv((out / "plane_pre.csv").read_text())
        post = plane.read_points_csv((out / "plane_post.csv").read_text())
        assert len(pre) + len(post) == len(points)
        heat = plane.read_heatmap_csv((out / "heatmap.csv").read_text())
        assert len(heat) == len(points)

    def test_s_range_flag_controls_samples(self, workdir, tmp_path):
        res = run_cli("plane", "--input", workdir / "data.csv", "--out", tmp_path,
                      "--s-range", "-1", "1", "--s-step", "0.5")
        assert res.returncode == 0
        _, curves = plane.read_plane_csv((tmp_path / "plane.csv").read_text())
        assert all(len(samples) == 5 for samples in curves.values())

    def test_fully_pre_cutoff_panel_has_empty_post_file(self, tmp_path):
        cfg = dict(BASE_CONFIG, start="2019-04-01", n_weeks=8)
        (tmp_path / "pre.json").write_text(json.dumps(cfg))
        res = run_cli("plane", "--synth-config", tmp_path / "pre.json", "--out", tmp_path / "o")
        assert res.returncode == 0, res.stderr
        post = (tmp_path / "o" / "plane_post.csv").read_text()
        assert post.strip().split("\n") == [",".join(plane.POINTS_CSV_COLUMNS)]


class TestBundledData:
    def test_bundled_csv_produces_full_descriptives(self, tmp_path):
        import importlib.resources as resources

        sample = tmp_path / "sample_daily.csv"
        sample.write_bytes(
            resources.files("skplane").joinpath("data/sample_daily.csv").read_bytes()
        )
        res = run_cli("moments", "--input", sample, "--out", tmp_path / "o")
        assert res.returncode == 0, res.stderr
        descriptives = json.loads((tmp_path / "o" / "descriptives.json").read_text())
        for key in ("skewness", "kurtosis", "delta"):
            block = descriptives[key]
            assert set(block) == {"n", "mean", "sd", "min", "max", "p1", "p25", "p50", "p75", "p99"}
            assert block["n"] > 0


class TestDeterminism:
    def test_rerun_is_byte_identical(self, workdir, tmp_path):
        args = ("moments", "--input", workdir / "data.csv")
        run_cli(*args, "--out", tmp_path / "a")
        run_cli(*args, "--out", tmp_path / "b")
        for name in ("moments.csv", "descriptives.json", "drops.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
