"""Binary classification metrics with per-class breakdown."""

from __future__ import annotations

import warnings

import numpy as np


def _safe_div(num: float, den: float, what: str) -> float:
    if den == 0:
        warnings.warn(f"{what} is undefined (zero denominator); reporting 0.0")
        return 0.0
    return num / den


def classification_metrics(y_true, y_pred) -> dict:
    """Per-class precision/recall/F1 plus macro, weighted and accuracy."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be equal-length vectors")
    if y_true.shape[0] == 0:
        raise ValueError("metrics need at least one sample")

    out: dict = {}
    f1s, supports = [], []
    for cls in (0, 1):
        tp = int(np.sum((y_pred == cls) & (y_true == cls)))
        fp = int(np.sum((y_pred == cls) & (y_true != cls)))
        fn = int(np.sum((y_pred != cls) & (y_true == cls)))
        support = int(np.sum(y_true == cls))
        precision = _safe_div(tp, tp + fp, f"precision for class {cls}")
        recall = _safe_div(tp, tp + fn, f"recall for class {cls}")
        f1 = _safe_div(2 * precision * recall, precision + recall, f"f1 for class {cls}")
        out[f"class_{cls}"] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": support,
        }
        f1s.append(f1)
        supports.append(support)

    out["macro_f1"] = float(np.mean(f1s))
    total = sum(supports)
    out["weighted_f1"] = float(sum(f * s for f, s in zip(f1s, supports)) / total)
    out["accuracy"] = float(np.mean(y_true == y_pred))
    return out


def f1_from_precision_recall(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def average_fold_metrics(fold_metrics: list) -> dict:
    """Element-wise mean of per-fold metric dicts; supports are summed."""
    if not fold_metrics:
        raise ValueError("no fold metrics to average")
    out: dict = {}
    for cls in ("class_0", "class_1"):
        out[cls] = {
            key: float(np.mean([m[cls][key] for m in fold_metrics]))
            for key in ("precision", "recall", "f1")
        }
        out[cls]["support"] = int(sum(m[cls]["support"] for m in fold_metrics))
    for key in ("macro_f1", "weighted_f1", "accuracy"):
        out[key] = float(np.mean([m[key] for m in fold_metrics]))
    return out
