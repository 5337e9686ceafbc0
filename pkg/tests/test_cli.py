"""Command-line interface: exit codes, JSON output, artifact files."""

import json

import pytest

from scrop.classifier import LeafClassifier, save_model
from scrop.cli import build_parser, main
from scrop.power import WeatherCondition
from scrop.scenario import ScenarioConfig, WeatherSegment, save_config
from scrop.sensors import capture_leaf, encode_pgm, encode_ppm


@pytest.fixture()
def short_scenario(tmp_path):
    cfg = ScenarioConfig(
        duration_h=0.1,
        weather_timeline=(WeatherSegment(0.0, 360.0, WeatherCondition.SUNNY),),
        initial_moisture_pct=31.0,
    )
    path = tmp_path / "scenario.json"
    save_config(cfg, path)
    return path


class TestSim:
    def test_writes_artifacts_and_prints_summary(self, short_scenario, tmp_path, capsys):
        out = tmp_path / "run"
        code = main(["sim", "--scenario", str(short_scenario), "--out", str(out)])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["ticks"] == 360
        assert (out / "trace.csv").exists()
        assert (out / "events.csv").exists()
        assert json.loads((out / "summary.json").read_text())["ticks"] == 360

    def test_two_runs_are_byte_identical(self, short_scenario, tmp_path, capsys):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["sim", "--scenario", str(short_scenario), "--out", str(out_a)]) == 0
        assert main(["sim", "--scenario", str(short_scenario), "--out", str(out_b)]) == 0
        capsys.readouterr()
        for name in ("trace.csv", "events.csv", "summary.json"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_seed_flag_overrides_scenario_seed(self, short_scenario, tmp_path, capsys):
        out = tmp_path / "run"
        assert main(
            ["sim", "--scenario", str(short_scenario), "--seed", "9", "--out", str(out)]
        ) == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 9

    def test_missing_scenario_file_fails_with_json_error(self, tmp_path, capsys):
        code = main(["sim", "--scenario", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        captured = capsys.readouterr()
        assert code == 1
        error = json.loads(captured.err.strip().splitlines()[-1])
        assert error["error"] == "FileNotFoundError"

    def test_invalid_scenario_fails_with_json_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"tick_s": -1.0}))
        code = main(["sim", "--scenario", str(bad), "--out", str(tmp_path / "o")])
        captured = capsys.readouterr()
        assert code == 1
        error = json.loads(captured.err.strip().splitlines()[-1])
        assert error["error"] == "ValueError"
        assert "tick_s" in error["message"]


class TestCompare:
    def test_writes_both_arms(self, short_scenario, tmp_path, capsys):
        out = tmp_path / "cmp"
        code = main(["compare", "--scenario", str(short_scenario), "--out", str(out)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {"automated", "baseline", "files"}
        for name in (
            "automated_trace.csv",
            "automated_events.csv",
            "baseline_trace.csv",
            "baseline_events.csv",
            "summary.json",
        ):
            assert (out / name).exists()


class TestTrain:
    def test_tiny_synthetic_run_saves_weights(self, tmp_path, capsys):
        weights = tmp_path / "model.scrp"
        code = main(
            [
                "train", "--per-class", "2", "--epochs", "1",
                "--holdout", "0.25", "--seed", "0", "--out", str(weights),
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["samples"] == 8
        assert payload["holdout_samples"] == 2
        assert 0.0 <= payload["holdout_accuracy"] <= 1.0
        assert weights.read_bytes().startswith(b"SCRP1\n")

    def test_image_directory_layout(self, tmp_path, capsys):
        data = tmp_path / "data"
        for class_name, class_id in (("healthy", 0), ("leaf_rust", 2)):
            d = data / class_name
            d.mkdir(parents=True)
            for i in range(3):
                (d / f"{i}.ppm").write_bytes(encode_ppm(capture_leaf(i, class_id)))
        weights = tmp_path / "model.scrp"
        code = main(
            [
                "train", "--data", str(data), "--epochs", "1",
                "--holdout", "0.34", "--out", str(weights),
            ]
        )
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["samples"] == 6
        assert payload["confusion"]["labels"] == ["healthy", "leaf_rust"]

    def test_empty_data_directory_fails(self, tmp_path, capsys):
        (tmp_path / "data").mkdir()
        code = main(
            ["train", "--data", str(tmp_path / "data"), "--out", str(tmp_path / "w")]
        )
        captured = capsys.readouterr()
        assert code == 1
        assert json.loads(captured.err.strip().splitlines()[-1])["error"] == "ValueError"


class TestPredict:
    @pytest.fixture()
    def weights(self, tmp_path):
        path = tmp_path / "model.scrp"
        save_model(LeafClassifier(seed=0), path)
        return path

    def test_classifies_a_color_image(self, weights, tmp_path, capsys):
        image = tmp_path / "leaf.ppm"
        image.write_bytes(encode_ppm(capture_leaf(1, 1)))
        code = main(["predict", "--weights", str(weights), "--image", str(image)])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["label"] in payload["probabilities"]
        assert sum(payload["probabilities"].values()) == pytest.approx(1.0)

    def test_classifies_a_gray_image(self, weights, tmp_path, capsys):
        image = tmp_path / "leaf.pgm"
        gray = capture_leaf(1, 0).mean(axis=2).astype("uint8")
        image.write_bytes(encode_pgm(gray))
        assert main(["predict", "--weights", str(weights), "--image", str(image)]) == 0
        capsys.readouterr()

    def test_rejects_non_netpbm_payload(self, weights, tmp_path, capsys):
        image = tmp_path / "leaf.png"
        image.write_bytes(b"\x89PNG....")
        code = main(["predict", "--weights", str(weights), "--image", str(image)])
        captured = capsys.readouterr()
        assert code == 1
        assert "PPM" in json.loads(captured.err.strip().splitlines()[-1])["message"]


class TestGradcheck:
    def test_passes_by_default(self, capsys):
        code = main(["gradcheck"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True
        assert payload["max_rel_error"] <= 1e-4


class TestParser:
    def test_serve_flags_parse(self):
        args = build_parser().parse_args(["serve", "--port", "9000", "--data", "/tmp/x"])
        assert args.port == 9000
        assert args.data == "/tmp/x"

    def test_unknown_command_exits_nonzero(self):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(["frobnicate"])
        assert excinfo.value.code != 0
