"""Result serialization and the text report."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

PREDICTION_COLUMNS = ("sample_id", "logit", "probability", "label", "pred")


def write_predictions_csv(path: str | Path, predictions: list) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PREDICTION_COLUMNS)
    for p in predictions:
        writer.writerow([p["sample_id"], repr(p["logit"]), repr(p["probability"]), p["label"], p["pred"]])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def write_metrics_json(path: str | Path, results: dict) -> None:
    payload = {k: v for k, v in results.items() if k != "predictions"}
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def read_metrics_json(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _metric_line(name: str, block: dict) -> str:
    return (
        f"  {name:<14} precision {block['precision']:.4f}  "
        f"recall {block['recall']:.4f}  f1 {block['f1']:.4f}  "
        f"support {block['support']}"
    )


def render_report(results: list) -> str:
    """Plain-text summary of one or more cross-validation results."""
    lines = []
    lines.append("screening evaluation report")
    lines.append("=" * 60)
    for res in results:
        lines.append("")
        lines.append(f"disease: {res['disease']}   model: {res['model']}   seed: {res['seed']}   folds: {res['folds']}")
        lines.append("-" * 60)
        avg = res["average"]
        lines.append("averaged over folds:")
        lines.append(_metric_line("no diagnosis", avg["class_0"]))
        lines.append(_metric_line("diagnosis", avg["class_1"]))
        lines.append(
            f"  macro f1 {avg['macro_f1']:.4f}   weighted f1 {avg['weighted_f1']:.4f}   "
            f"accuracy {avg['accuracy']:.4f}"
        )
        lines.append("per fold:")
        for fm in res["per_fold"]:
            lines.append(
                f"  fold {fm['fold']}: f1[0] {fm['class_0']['f1']:.4f}  "
                f"f1[1] {fm['class_1']['f1']:.4f}  macro {fm['macro_f1']:.4f}  "
                f"weighted {fm['weighted_f1']:.4f}"
            )
    lines.append("")
    return "\n".join(lines)
