"""End-to-end command line tests driving main() with argv lists."""

import json
import subprocess
import sys

import numpy as np
import pytest

from speechscreen import audio as au
from speechscreen import harness
from speechscreen.cli import main
from speechscreen.harness.manifest import FEATURE_COLUMNS, Sample

RATE = 16000


def make_recording(path, f0=220.0):
    """0.3 s tone, 0.4 s silence, 0.3 s tone: one clear medium-short pause."""
    t = np.arange(int(0.3 * RATE)) / RATE
    tone = (0.5 * np.sin(2 * np.pi * f0 * t)).astype(np.float32)
    silence = np.zeros(int(0.4 * RATE), dtype=np.float32)
    au.write_wav(path, au.AudioBuffer(np.concatenate([tone, silence, tone]), RATE))


def make_dataset_dir(tmp_path):
    d = tmp_path / "data"
    d.mkdir()
    make_recording(d / "a.wav", f0=220.0)
    make_recording(d / "b.wav", f0=180.0)
    (d / "a.txt").write_text("i felt happy today\nwe walked to the park\n")
    (d / "b.txt").write_text("um i was worried about the meeting\nit went fine\n")
    harness.write_manifest(
        d / "manifest.csv",
        [
            Sample("rec_a", "subj01", "a.wav", "a.txt", 12, 4, "interview"),
            Sample("rec_b", "subj02", "b.wav", "b.txt", 3, 15, "interview"),
        ],
    )
    return d


class TestExtract:
    def test_extract_writes_feature_table(self, tmp_path):
        d = make_dataset_dir(tmp_path)
        out = tmp_path / "features.csv"
        rc = main(["extract", "--manifest", str(d / "manifest.csv"), "--out", str(out)])
        assert rc == 0
        rows = harness.read_feature_table(out)
        assert [r["sample_id"] for r in rows] == ["rec_a", "rec_b"]
        by_id = {r["sample_id"]: r for r in rows}
        assert by_id["rec_a"]["f0_mean_hz"] == pytest.approx(220.0, abs=2.0)
        assert by_id["rec_b"]["f0_mean_hz"] == pytest.approx(180.0, abs=2.0)
        assert by_id["rec_a"]["pause_count_short"] >= 1
        assert by_id["rec_b"]["filled_pause_count"] == 1.0
        for r in rows:
            for c in FEATURE_COLUMNS:
                assert np.isfinite(r[c])

    def test_missing_manifest_exits_2(self, tmp_path):
        rc = main(["extract", "--manifest", str(tmp_path / "nope.csv"), "--out", str(tmp_path / "f.csv")])
        assert rc == 2


class TestPipeline:
    def test_synth_folds_train_evaluate_report(self, tmp_path):
        data = tmp_path / "synth"
        run = tmp_path / "run"
        assert main([
            "synth", "--out", str(data), "--subjects", "40", "--samples-per-subject", "2",
            "--positive-rate", "0.3", "--signal", "3.0", "--seed", "5",
        ]) == 0
        features = data / "features.csv"
        assert features.exists()

        folds_csv = tmp_path / "folds.csv"
        assert main([
            "folds", "--features", str(features), "--disease", "depression",
            "--seed", "1", "--out", str(folds_csv), "--set", "folds=3",
        ]) == 0
        assignment = harness.read_folds_csv(folds_csv)
        assert set(assignment.values()) == {0, 1, 2}

        assert main([
            "train", "--features", str(features), "--disease", "depression",
            "--model", "baseline", "--seed", "1", "--out-dir", str(run),
            "--folds-file", str(folds_csv),
            "--set", "folds=3", "--set", "baseline_epochs=30", "--set", "baseline_lr=0.001",
        ]) == 0
        assert (run / "predictions.csv").exists()
        metrics = harness.read_metrics_json(run / "metrics.json")
        assert metrics["average"]["macro_f1"] > 0.9
        assert len(metrics["per_fold"]) == 3

        eval_dir = tmp_path / "eval"
        assert main([
            "evaluate", "--checkpoint", str(run / "baseline_depression_fold0.ckpt"),
            "--features", str(features), "--disease", "depression",
            "--out-dir", str(eval_dir),
        ]) == 0
        eval_metrics = harness.read_metrics_json(eval_dir / "metrics.json")
        assert 0.0 <= eval_metrics["metrics"]["macro_f1"] <= 1.0

        report_path = tmp_path / "report.txt"
        assert main([
            "report", "--metrics", str(run / "metrics.json"), "--out", str(report_path),
        ]) == 0
        text = report_path.read_text()
        assert "macro f1" in text
        assert "depression" in text

    def test_fusion_via_cli(self, tmp_path):
        data = tmp_path / "synth"
        run = tmp_path / "run"
        assert main([
            "synth", "--out", str(data), "--subjects", "10", "--samples-per-subject", "1",
            "--positive-rate", "0.5", "--signal", "2.0", "--seed", "2", "--embeddings",
        ]) == 0
        assert (data / "embeddings" / "index.csv").exists()
        assert main([
            "train", "--features", str(data / "features.csv"), "--disease", "anxiety",
            "--model", "fusion", "--seed", "0", "--out-dir", str(run),
            "--embeddings", str(data / "embeddings"),
            "--set", "folds=2", "--set", "fusion_epochs=1", "--set", "bilstm_hidden=3",
        ]) == 0
        assert (run / "fusion_anxiety_fold1.ckpt").exists()


class TestErrors:
    def test_bad_override_exits_2(self, tmp_path):
        rc = main(["synth", "--out", str(tmp_path / "d"), "--set", "folds"])
        assert rc == 2

    def test_unknown_config_key_exits_2(self, tmp_path):
        rc = main(["synth", "--out", str(tmp_path / "d"), "--set", "no_such_key=3"])
        assert rc == 2

    def test_missing_features_exits_2(self, tmp_path):
        rc = main([
            "folds", "--features", str(tmp_path / "missing.csv"),
            "--disease", "anxiety", "--out", str(tmp_path / "folds.csv"),
        ])
        assert rc == 2

    def test_bad_disease_is_argparse_error(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["folds", "--features", "x.csv", "--disease", "stress", "--out", "y.csv"])


class TestConsoleScript:
    def test_entry_point_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "speechscreen.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "extract" in proc.stdout and "synth" in proc.stdout

    def test_config_file_plus_set_precedence(self, tmp_path):
        cfg_file = tmp_path / "cfg.txt"
        cfg_file.write_text("folds = 4\nbaseline_epochs = 1\n")
        data = tmp_path / "d"
        assert main([
            "synth", "--out", str(data), "--subjects", "12", "--samples-per-subject", "1",
            "--seed", "0", "--config", str(cfg_file),
        ]) == 0
        folds_csv = tmp_path / "folds.csv"
        # --set wins over the file
        assert main([
            "folds", "--features", str(data / "features.csv"), "--disease", "depression",
            "--out", str(folds_csv), "--config", str(cfg_file), "--set", "folds=2",
        ]) == 0
        assignment = harness.read_folds_csv(folds_csv)
        assert set(assignment.values()) == {0, 1}
