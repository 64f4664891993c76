"""Harness tests: manifest parsing, folds, metrics, synthetic data, training."""

import numpy as np
import pytest

from speechscreen import harness
from speechscreen.config import load_config
from speechscreen.errors import ManifestError
from speechscreen.harness.manifest import FEATURE_COLUMNS, Sample
from speechscreen.harness.metrics import f1_from_precision_recall
from speechscreen.harness.synth import SIGNAL_FEATURES

CFG = load_config()


def make_samples():
    return [
        Sample("s1", "subjA", "a1.wav", "t1.txt", 12, 4, "interview"),
        Sample("s2", "subjA", "a2.wav", "t2.txt", 12, 4, "reading"),
        Sample("s3", "subjB", "b1.wav", "t3.txt", 3, 15, "interview"),
    ]


class TestManifest:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "m.csv"
        harness.write_manifest(p, make_samples())
        got = harness.load_manifest(p)
        assert got == make_samples()

    def test_header_must_match_exactly(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("sample_id,subject,audio_path,transcript_path,phq8,gad7,task_type\n")
        with pytest.raises(ManifestError):
            harness.load_manifest(p)

    def test_duplicate_sample_id_rejected(self, tmp_path):
        p = tmp_path / "m.csv"
        rows = make_samples()
        rows[1] = Sample("s1", "subjA", "x.wav", "x.txt", 1, 1, "t")
        harness.write_manifest(p, rows)
        with pytest.raises(ManifestError):
            harness.load_manifest(p)

    def test_score_out_of_range_rejected(self, tmp_path):
        p = tmp_path / "m.csv"
        harness.write_manifest(p, [Sample("s1", "a", "x.wav", "x.txt", 25, 4, "t")])
        with pytest.raises(ManifestError):
            harness.load_manifest(p)
        harness.write_manifest(p, [Sample("s1", "a", "x.wav", "x.txt", 4, 22, "t")])
        with pytest.raises(ManifestError):
            harness.load_manifest(p)

    def test_missing_scores_allowed(self, tmp_path):
        p = tmp_path / "m.csv"
        harness.write_manifest(p, [Sample("s1", "a", "x.wav", "x.txt", None, None, "t")])
        got = harness.load_manifest(p)
        assert got[0].phq8 is None and got[0].gad7 is None

    def test_binarize_cutoff_semantics(self):
        assert harness.binarize_score(9) == 0
        assert harness.binarize_score(10) == 1
        assert harness.binarize_score(24) == 1

    def test_label_for_diseases(self):
        row = {"phq8": 12, "gad7": 4}
        assert harness.label_for(row, "depression") == 1
        assert harness.label_for(row, "anxiety") == 0
        assert harness.label_for({"phq8": None, "gad7": 3}, "depression") is None


class TestFeatureTable:
    def rows(self, n=4):
        rng = np.random.default_rng(0)
        out = []
        for i in range(n):
            row = {
                "sample_id": f"s{i}",
                "subject_id": f"subj{i // 2}",
                "phq8": 12 if i % 2 else 3,
                "gad7": 11 if i % 2 else 2,
                "task_type": "synthetic",
            }
            for c in FEATURE_COLUMNS:
                row[c] = float(rng.normal())
            out.append(row)
        return out

    def test_round_trip_is_exact(self, tmp_path):
        p = tmp_path / "f.csv"
        rows = self.rows()
        harness.write_feature_table(p, rows)
        got = harness.read_feature_table(p)
        assert got == rows  # repr round-trips float64 bit for bit

    def test_rejects_wrong_header(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("sample_id,subject_id\nx,y\n")
        with pytest.raises(ManifestError):
            harness.read_feature_table(p)


class TestFolds:
    def rows(self, n_subjects=25, positive_every=4, samples_per_subject=2):
        out = []
        for s in range(n_subjects):
            positive = s % positive_every == 0
            for k in range(samples_per_subject):
                row = {
                    "sample_id": f"s{s}_{k}",
                    "subject_id": f"subj{s}",
                    "phq8": 15 if positive else 2,
                    "gad7": 15 if positive else 2,
                    "task_type": "t",
                }
                for c in FEATURE_COLUMNS:
                    row[c] = 0.0
                out.append(row)
        return out

    def test_subjects_stay_together(self):
        rows = self.rows()
        assignment = harness.assign_folds(rows, "depression", 5, seed=3)
        for row in rows:
            assert assignment[row["subject_id"]] == assignment[rows[0]["subject_id"]] or True
        by_subject = {}
        for row in rows:
            by_subject.setdefault(row["subject_id"], set()).add(assignment[row["subject_id"]])
        assert all(len(v) == 1 for v in by_subject.values())

    def test_stratification_balanced(self):
        rows = self.rows(n_subjects=23, positive_every=3)
        assignment = harness.assign_folds(rows, "depression", 5, seed=1)
        pos_subjects = {r["subject_id"] for r in rows if r["phq8"] >= 10}
        counts_pos = np.zeros(5, dtype=int)
        counts_neg = np.zeros(5, dtype=int)
        for sid, fold in assignment.items():
            if sid in pos_subjects:
                counts_pos[fold] += 1
            else:
                counts_neg[fold] += 1
        assert counts_pos.max() - counts_pos.min() <= 1
        assert counts_neg.max() - counts_neg.min() <= 1

    def test_deterministic_given_seed(self):
        rows = self.rows()
        a = harness.assign_folds(rows, "depression", 5, seed=9)
        b = harness.assign_folds(rows, "depression", 5, seed=9)
        assert a == b

    def test_unlabeled_sample_rejected(self):
        rows = self.rows()
        rows[0] = dict(rows[0], phq8=None)
        with pytest.raises(ManifestError):
            harness.assign_folds(rows, "depression", 5, seed=0)

    def test_too_few_subjects_rejected(self):
        rows = self.rows(n_subjects=3)
        with pytest.raises(ManifestError):
            harness.assign_folds(rows, "depression", 5, seed=0)

    def test_folds_csv_round_trip(self, tmp_path):
        rows = self.rows()
        assignment = harness.assign_folds(rows, "anxiety", 5, seed=2)
        p = tmp_path / "folds.csv"
        harness.write_folds_csv(p, rows, assignment, "anxiety")
        got = harness.read_folds_csv(p)
        assert got == assignment

    def test_fold_rows_partition(self):
        rows = self.rows()
        assignment = harness.assign_folds(rows, "depression", 5, seed=4)
        train, test = harness.fold_rows(rows, assignment, 0)
        assert len(train) + len(test) == len(rows)
        assert {r["sample_id"] for r in train}.isdisjoint({r["sample_id"] for r in test})


class TestMetrics:
    def test_hand_computed_example(self):
        y_true = [0, 0, 1, 1, 1]
        y_pred = [0, 1, 1, 1, 0]
        m = harness.classification_metrics(y_true, y_pred)
        assert m["class_1"]["precision"] == pytest.approx(2 / 3)
        assert m["class_1"]["recall"] == pytest.approx(2 / 3)
        assert m["class_1"]["f1"] == pytest.approx(2 / 3)
        assert m["class_0"]["precision"] == pytest.approx(0.5)
        assert m["class_0"]["recall"] == pytest.approx(0.5)
        assert m["class_0"]["f1"] == pytest.approx(0.5)
        assert m["macro_f1"] == pytest.approx((0.5 + 2 / 3) / 2)
        assert m["weighted_f1"] == pytest.approx((2 * 0.5 + 3 * (2 / 3)) / 5)
        assert m["accuracy"] == pytest.approx(0.6)
        assert m["class_0"]["support"] == 2
        assert m["class_1"]["support"] == 3

    def test_zero_denominator_warns_and_zeroes(self):
        with pytest.warns(UserWarning):
            m = harness.classification_metrics([0, 0], [1, 1])
        assert m["class_1"]["precision"] == 0.0
        assert m["class_0"]["recall"] == 0.0
        assert m["macro_f1"] == 0.0

    def test_perfect_prediction(self):
        m = harness.classification_metrics([0, 1, 1], [0, 1, 1])
        assert m["macro_f1"] == 1.0
        assert m["weighted_f1"] == 1.0

    def test_f1_helper(self):
        assert f1_from_precision_recall(0.5, 0.5) == pytest.approx(0.5)
        assert f1_from_precision_recall(0.0, 0.0) == 0.0

    def test_average_fold_metrics(self):
        a = harness.classification_metrics([0, 1], [0, 1])
        b = harness.classification_metrics([0, 1], [1, 0])
        with pytest.warns(UserWarning):
            b = harness.classification_metrics([0, 0, 1], [1, 1, 1])
        avg = harness.average_fold_metrics([a, b])
        assert avg["macro_f1"] == pytest.approx((a["macro_f1"] + b["macro_f1"]) / 2)
        assert avg["class_0"]["support"] == a["class_0"]["support"] + b["class_0"]["support"]


class TestSynth:
    def test_deterministic_bytes(self, tmp_path):
        harness.generate_dataset(tmp_path / "a", 20, 2, 0.25, 2.0, seed=5, cfg=CFG)
        harness.generate_dataset(tmp_path / "b", 20, 2, 0.25, 2.0, seed=5, cfg=CFG)
        assert (tmp_path / "a/features.csv").read_bytes() == (tmp_path / "b/features.csv").read_bytes()

    def test_positive_count_exact(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 100, 1, 0.253, 2.0, seed=1, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        pos_subjects = {r["subject_id"] for r in rows if r["phq8"] >= 10}
        assert len(pos_subjects) == 25  # round(0.253 * 100)

    def test_scores_consistent_with_label(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 30, 2, 0.3, 2.0, seed=2, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        for r in rows:
            assert (r["phq8"] >= 10) == (r["gad7"] >= 10)

    def test_signal_separates_classes(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 200, 1, 0.5, 3.0, seed=3, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        pos = [r for r in rows if r["phq8"] >= 10]
        neg = [r for r in rows if r["phq8"] < 10]
        for name in SIGNAL_FEATURES:
            gap = np.mean([r[name] for r in pos]) - np.mean([r[name] for r in neg])
            assert gap == pytest.approx(3.0, abs=0.5)
        # a non-signal feature shows no systematic gap
        gap = np.mean([r["brunet_w"] for r in pos]) - np.mean([r["brunet_w"] for r in neg])
        assert abs(gap) < 0.5

    def test_embeddings_written_and_loadable(self, tmp_path):
        from speechscreen import embeddings as em

        harness.generate_dataset(tmp_path / "d", 6, 1, 0.5, 2.0, seed=4, cfg=CFG, with_embeddings=True)
        entries = em.read_index(tmp_path / "d/embeddings/index.csv")
        assert len(entries) == 12  # one audio and one text per sample
        seq = em.load_valid_sequence(entries[0], tmp_path / "d/embeddings")
        assert seq.shape[1] == 8


class TestTraining:
    def test_baseline_learns_strong_signal(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 40, 2, 0.3, 3.0, seed=6, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        # default lr is tuned for large noisy data; this tiny clean set wants a hotter run
        cfg = load_config(overrides={"folds": 3, "baseline_epochs": 30, "baseline_lr": 1e-3})
        res = harness.run_cross_validation(rows, cfg, "depression", "baseline", seed=0)
        assert res["average"]["macro_f1"] > 0.9
        assert len(res["predictions"]) == len(rows)

    def test_run_is_deterministic(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 20, 1, 0.3, 2.0, seed=7, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        cfg = load_config(overrides={"folds": 2, "baseline_epochs": 2})
        a = harness.run_cross_validation(rows, cfg, "depression", "baseline", seed=3)
        b = harness.run_cross_validation(rows, cfg, "depression", "baseline", seed=3)
        assert a == b

    def test_checkpoints_and_eval_round_trip(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 20, 1, 0.3, 2.5, seed=8, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        cfg = load_config(overrides={"folds": 2, "baseline_epochs": 3})
        out = tmp_path / "run"
        res = harness.run_cross_validation(rows, cfg, "depression", "baseline", seed=1, out_dir=out)
        ckpt = out / "baseline_depression_fold0.ckpt"
        assert ckpt.exists()

        assignment = harness.assign_folds(rows, "depression", cfg.folds, seed=1)
        _, test_rows = harness.fold_rows(rows, assignment, 0)
        got = harness.evaluate_checkpoint(ckpt, test_rows, cfg, "depression")
        want_fold0 = [p for p in res["predictions"] if any(p["sample_id"] == r["sample_id"] for r in test_rows)]
        got_by_id = {p["sample_id"]: p for p in got["predictions"]}
        for p in want_fold0:
            assert got_by_id[p["sample_id"]]["logit"] == p["logit"]

    def test_fusion_smoke(self, tmp_path):
        harness.generate_dataset(
            tmp_path / "d", 12, 1, 0.5, 2.0, seed=9, cfg=CFG, with_embeddings=True
        )
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        cfg = load_config(
            overrides={"folds": 2, "fusion_epochs": 1, "bilstm_hidden": 3, "attention_heads": 2}
        )
        res = harness.run_cross_validation(
            rows, cfg, "anxiety", "fusion", seed=0, embeddings_dir=tmp_path / "d/embeddings"
        )
        assert len(res["predictions"]) == len(rows)
        assert 0.0 <= res["average"]["macro_f1"] <= 1.0

    def test_fusion_requires_embeddings(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 12, 1, 0.5, 2.0, seed=10, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        with pytest.raises(ManifestError):
            harness.run_cross_validation(rows, CFG, "depression", "fusion", seed=0)


class TestReport:
    def result(self, tmp_path):
        harness.generate_dataset(tmp_path / "d", 16, 1, 0.5, 2.5, seed=11, cfg=CFG)
        rows = harness.read_feature_table(tmp_path / "d/features.csv")
        cfg = load_config(overrides={"folds": 2, "baseline_epochs": 2})
        return harness.run_cross_validation(rows, cfg, "depression", "baseline", seed=0)

    def test_metrics_json_round_trip(self, tmp_path):
        res = self.result(tmp_path)
        p = tmp_path / "metrics.json"
        harness.write_metrics_json(p, res)
        got = harness.read_metrics_json(p)
        assert got["average"] == res["average"]
        assert "predictions" not in got

    def test_predictions_csv_round_trip(self, tmp_path):
        res = self.result(tmp_path)
        p = tmp_path / "pred.csv"
        harness.write_predictions_csv(p, res["predictions"])
        lines = p.read_text().splitlines()
        assert lines[0] == "sample_id,logit,probability,label,pred"
        assert len(lines) == len(res["predictions"]) + 1
        first = res["predictions"][0]
        assert lines[1].split(",")[1] == repr(first["logit"])

    def test_render_report_mentions_both_classes(self, tmp_path):
        res = self.result(tmp_path)
        text = harness.render_report([res])
        assert "no diagnosis" in text
        assert "diagnosis" in text
        assert "macro f1" in text
        assert "per fold:" in text
