"""Experiment harness: manifests, feature tables, folds, training, reports."""

from .manifest import (
    FEATURE_COLUMNS,
    META_COLUMNS,
    Sample,
    binarize_score,
    label_for,
    load_manifest,
    read_feature_table,
    write_feature_table,
    write_manifest,
)
from .folds import assign_folds, fold_rows, read_folds_csv, write_folds_csv
from .metrics import average_fold_metrics, classification_metrics
from .synth import generate_dataset
from .training import run_cross_validation, evaluate_checkpoint
from .report import render_report, write_metrics_json, read_metrics_json, write_predictions_csv

__all__ = [
    "FEATURE_COLUMNS",
    "META_COLUMNS",
    "Sample",
    "assign_folds",
    "average_fold_metrics",
    "binarize_score",
    "classification_metrics",
    "evaluate_checkpoint",
    "fold_rows",
    "generate_dataset",
    "label_for",
    "load_manifest",
    "read_feature_table",
    "read_folds_csv",
    "read_metrics_json",
    "render_report",
    "run_cross_validation",
    "write_feature_table",
    "write_folds_csv",
    "write_manifest",
    "write_metrics_json",
    "write_predictions_csv",
]
