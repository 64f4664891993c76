"""Subject-disjoint stratified cross-validation folds.

A subject is positive when any of their samples is positive. Subjects are
shuffled with a seeded generator inside each label group, then dealt
round-robin, so per-fold positive counts differ by at most one and every
subject's samples land in exactly one fold.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from ..errors import ManifestError
from .manifest import label_for


def assign_folds(rows: list, disease: str, n_folds: int, seed: int) -> dict:
    """Map subject_id -> fold index for feature-table rows (or any dicts with
    subject_id plus the score columns)."""
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    subject_label: dict = {}
    order: dict = {}
    for i, row in enumerate(rows):
        label = label_for(row, disease)
        if label is None:
            raise ManifestError(
                f"sample {row['sample_id']} has no {disease} score; cannot stratify"
            )
        sid = row["subject_id"]
        subject_label[sid] = max(subject_label.get(sid, 0), label)
        order.setdefault(sid, i)

    subjects = sorted(subject_label, key=order.get)
    if len(subjects) < n_folds:
        raise ManifestError(f"{len(subjects)} subjects cannot fill {n_folds} folds")

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))
    assignment: dict = {}
    for label in (1, 0):
        group = [s for s in subjects if subject_label[s] == label]
        rng.shuffle(group)
        for i, sid in enumerate(group):
            assignment[sid] = i % n_folds
    return assignment


def fold_rows(rows: list, assignment: dict, fold: int):
    """Split rows into (train, test) for one held-out fold."""
    train = [r for r in rows if assignment[r["subject_id"]] != fold]
    test = [r for r in rows if assignment[r["subject_id"]] == fold]
    return train, test


def write_folds_csv(path: str | Path, rows: list, assignment: dict, disease: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", "subject_id", "fold", "label"])
    for r in rows:
        writer.writerow(
            [r["sample_id"], r["subject_id"], assignment[r["subject_id"]], label_for(r, disease)]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_folds_csv(path: str | Path) -> dict:
    """Returns subject_id -> fold from a folds CSV."""
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.DictReader(text.splitlines())
    if reader.fieldnames is None or tuple(reader.fieldnames) != ("sample_id", "subject_id", "fold", "label"):
        raise ManifestError("folds file must have columns sample_id,subject_id,fold,label")
    out: dict = {}
    for row in reader:
        sid = row["subject_id"]
        fold = int(row["fold"])
        if sid in out and out[sid] != fold:
            raise ManifestError(f"subject {sid} appears in multiple folds")
        out[sid] = fold
    return out
