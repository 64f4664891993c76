"""Cross-validated training and checkpoint evaluation.

All randomness descends from numpy SeedSequence spawns of (seed, fold, role),
so a run is reproducible bit for bit: checkpoints, predictions and metrics
come out identical for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..config import Config
from ..errors import ManifestError
from ..models import BaselineClassifier, FusionClassifier, load_model, save_model
from ..nn import AdamW, bce_with_logits, sigmoid
from .. import embeddings as em
from .folds import assign_folds, fold_rows
from .manifest import FEATURE_COLUMNS, label_for
from .metrics import average_fold_metrics, classification_metrics

MODEL_KINDS = ("baseline", "fusion")

_ROLE_INIT = 0
_ROLE_TRAIN = 1


def _rng(seed: int, fold: int, role: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, fold, role])))


def feature_matrix(rows: list) -> np.ndarray:
    return np.array([[r[c] for c in FEATURE_COLUMNS] for r in rows], dtype=np.float64)


def fit_standardizer(matrix: np.ndarray):
    """Column means and deviations from training rows; constant columns keep
    scale 1 so they pass through unchanged."""
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std = np.where(std < 1e-12, 1.0, std)
    return mean, std


def apply_standardizer(matrix: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    return (matrix - mean) / std


def _labels(rows: list, disease: str, cutoff: int) -> np.ndarray:
    out = []
    for r in rows:
        label = label_for(r, disease, cutoff)
        if label is None:
            raise ManifestError(f"sample {r['sample_id']} has no {disease} score")
        out.append(label)
    return np.asarray(out, dtype=np.float64)


class _EmbeddingStore:
    """Lazy reader for the embedding sequences named by an index.csv."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        entries = em.read_index(self.directory / "index.csv")
        self.by_sample: dict = {}
        for e in entries:
            self.by_sample.setdefault(e["sample_id"], {})[e["source"]] = e

    def sequences(self, sample_id: str):
        pair = self.by_sample.get(sample_id)
        if pair is None or "audio" not in pair or "text" not in pair:
            raise ManifestError(f"missing audio/text embeddings for sample {sample_id}")
        audio = em.load_valid_sequence(pair["audio"], self.directory)
        text = em.load_valid_sequence(pair["text"], self.directory)
        return audio, text

    def dims(self):
        first = next(iter(self.by_sample.values()))
        return first["audio"]["dim"], first["text"]["dim"]


def _train_baseline_fold(train_x, train_y, cfg: Config, seed: int, fold: int) -> BaselineClassifier:
    model = BaselineClassifier(train_x.shape[1], cfg, _rng(seed, fold, _ROLE_INIT))
    opt = AdamW(
        model.parameters(),
        lr=cfg.baseline_lr,
        beta1=cfg.adamw_beta1,
        beta2=cfg.adamw_beta2,
        eps=cfg.adamw_eps,
        weight_decay=cfg.weight_decay,
    )
    rng = _rng(seed, fold, _ROLE_TRAIN)
    n = train_x.shape[0]
    for _ in range(cfg.baseline_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.baseline_batch):
            idx = order[start : start + cfg.baseline_batch]
            x, y = train_x[idx], train_y[idx]
            opt.zero_grad()
            logits, cache = model.forward(x, rng, training=True)
            dlogits = np.empty(len(idx))
            for i in range(len(idx)):
                _, dlogits[i] = bce_with_logits(logits[i], y[i])
            model.backward(cache, dlogits / len(idx))
            opt.step()
    return model


def _train_fusion_fold(train_rows, train_x, train_y, store, cfg: Config, seed: int, fold: int) -> FusionClassifier:
    audio_dim, text_dim = store.dims()
    model = FusionClassifier(audio_dim, text_dim, train_x.shape[1], cfg, _rng(seed, fold, _ROLE_INIT))
    opt = AdamW(
        model.parameters(),
        lr=cfg.fusion_lr,
        beta1=cfg.adamw_beta1,
        beta2=cfg.adamw_beta2,
        eps=cfg.adamw_eps,
        weight_decay=cfg.weight_decay,
    )
    rng = _rng(seed, fold, _ROLE_TRAIN)
    n = train_x.shape[0]
    for _ in range(cfg.fusion_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.fusion_batch):
            idx = order[start : start + cfg.fusion_batch]
            opt.zero_grad()
            for i in idx:  # gradients accumulate sample by sample, in order
                audio, text = store.sequences(train_rows[i]["sample_id"])
                logit, cache = model.forward_sample(audio, text, train_x[i], rng, training=True)
                _, dlogit = bce_with_logits(logit, train_y[i])
                model.backward_sample(cache, dlogit / len(idx))
            opt.step()
    return model


def _predict(model, rows, x, store):
    logits = np.empty(x.shape[0])
    if model.kind == "baseline":
        logits, _ = model.forward(x)
    else:
        for i, row in enumerate(rows):
            audio, text = store.sequences(row["sample_id"])
            logits[i], _ = model.forward_sample(audio, text, x[i])
    return logits


def _prediction_rows(rows, logits, labels, threshold: float):
    out = []
    probs = sigmoid(logits)
    for row, logit, prob, label in zip(rows, logits, probs, labels):
        out.append(
            {
                "sample_id": row["sample_id"],
                "logit": float(logit),
                "probability": float(prob),
                "label": int(label),
                "pred": int(prob >= threshold),
            }
        )
    return out


def run_cross_validation(
    rows: list,
    cfg: Config,
    disease: str,
    model_kind: str,
    seed: int,
    out_dir: str | Path | None = None,
    embeddings_dir: str | Path | None = None,
    assignment: dict | None = None,
) -> dict:
    """Train and evaluate across all folds; optionally persist checkpoints.

    Returns {"per_fold": [...], "average": {...}, "predictions": [...]} where
    predictions cover every sample exactly once, from its held-out fold.
    """
    if model_kind not in MODEL_KINDS:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
    store = None
    if model_kind == "fusion":
        if embeddings_dir is None:
            raise ManifestError("fusion training needs an embeddings directory")
        store = _EmbeddingStore(embeddings_dir)

    if assignment is None:
        assignment = assign_folds(rows, disease, cfg.folds, seed)
    n_folds = max(assignment.values()) + 1

    per_fold = []
    predictions = []
    for fold in range(n_folds):
        train_rows, test_rows = fold_rows(rows, assignment, fold)
        train_x = feature_matrix(train_rows)
        test_x = feature_matrix(test_rows)
        train_y = _labels(train_rows, disease, cfg.diagnosis_cutoff)
        test_y = _labels(test_rows, disease, cfg.diagnosis_cutoff)

        if cfg.standardize_features:
            mean, std = fit_standardizer(train_x)
        else:
            mean = np.zeros(train_x.shape[1])
            std = np.ones(train_x.shape[1])
        train_x = apply_standardizer(train_x, mean, std)
        test_x = apply_standardizer(test_x, mean, std)

        if model_kind == "baseline":
            model = _train_baseline_fold(train_x, train_y, cfg, seed, fold)
        else:
            model = _train_fusion_fold(train_rows, train_x, train_y, store, cfg, seed, fold)

        logits = _predict(model, test_rows, test_x, store)
        preds = (sigmoid(logits) >= cfg.decision_threshold).astype(int)
        fold_metrics = classification_metrics(test_y.astype(int), preds)
        fold_metrics["fold"] = fold
        per_fold.append(fold_metrics)
        predictions.extend(_prediction_rows(test_rows, logits, test_y.astype(int), cfg.decision_threshold))

        if out_dir is not None:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            save_model(
                out_dir / f"{model_kind}_{disease}_fold{fold}.ckpt",
                model,
                {
                    "seed": seed,
                    "fold": fold,
                    "disease": disease,
                    "standardizer_mean": [repr(float(v)) for v in mean],
                    "standardizer_std": [repr(float(v)) for v in std],
                },
            )

    average = average_fold_metrics(per_fold)
    return {
        "disease": disease,
        "model": model_kind,
        "seed": seed,
        "folds": n_folds,
        "per_fold": per_fold,
        "average": average,
        "predictions": predictions,
    }


def evaluate_checkpoint(
    ckpt_path: str | Path,
    rows: list,
    cfg: Config,
    disease: str,
    embeddings_dir: str | Path | None = None,
) -> dict:
    """Apply a saved model to feature rows; returns metrics and predictions."""
    model, meta = load_model(ckpt_path, cfg)
    mean = np.array([float(v) for v in meta["standardizer_mean"]])
    std = np.array([float(v) for v in meta["standardizer_std"]])

    x = apply_standardizer(feature_matrix(rows), mean, std)
    y = _labels(rows, disease, cfg.diagnosis_cutoff).astype(int)
    store = None
    if model.kind == "fusion":
        if embeddings_dir is None:
            raise ManifestError("fusion evaluation needs an embeddings directory")
        store = _EmbeddingStore(embeddings_dir)
    logits = _predict(model, rows, x, store)
    preds = (sigmoid(logits) >= cfg.decision_threshold).astype(int)
    return {
        "metrics": classification_metrics(y, preds),
        "predictions": _prediction_rows(rows, logits, y, cfg.decision_threshold),
    }
