"""Dataset manifest and feature table I/O.

The manifest CSV header is fixed: sample_id,subject_id,audio_path,
transcript_path,phq8,gad7,task_type. Audio and transcript paths are relative
to the manifest's directory. Scores may be empty (unlabeled); when present
they must sit in range (PHQ-8 0..24, GAD-7 0..21).

A feature table is the extraction output: sample_id, subject_id, phq8, gad7,
task_type, then every acoustic and linguistic feature column. Floats are
written with repr so a read round-trips bit for bit.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from ..acoustic import ACOUSTIC_FIELDS
from ..errors import ManifestError
from ..linguistic import LINGUISTIC_FIELDS

MANIFEST_COLUMNS = (
    "sample_id",
    "subject_id",
    "audio_path",
    "transcript_path",
    "phq8",
    "gad7",
    "task_type",
)

META_COLUMNS = ("sample_id", "subject_id", "phq8", "gad7", "task_type")
FEATURE_COLUMNS = ACOUSTIC_FIELDS + LINGUISTIC_FIELDS

PHQ8_MAX = 24
GAD7_MAX = 21

DISEASES = ("depression", "anxiety")


@dataclass
class Sample:
    sample_id: str
    subject_id: str
    audio_path: str
    transcript_path: str
    phq8: int | None
    gad7: int | None
    task_type: str


def _parse_score(raw: str, maximum: int, column: str, line: int) -> int | None:
    raw = raw.strip()
    if raw == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ManifestError(f"line {line}: {column} must be an integer, got {raw!r}")
    if not 0 <= value <= maximum:
        raise ManifestError(f"line {line}: {column} must be in 0..{maximum}, got {value}")
    return value


def load_manifest(path: str | Path) -> list:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("manifest is empty")
    if tuple(header) != MANIFEST_COLUMNS:
        raise ManifestError(
            "manifest header must be exactly " + ",".join(MANIFEST_COLUMNS)
        )

    samples = []
    seen = set()
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(MANIFEST_COLUMNS):
            raise ManifestError(f"line {line_no}: expected {len(MANIFEST_COLUMNS)} columns")
        sample_id, subject_id, audio_path, transcript_path, phq8, gad7, task_type = row
        if not sample_id or not subject_id:
            raise ManifestError(f"line {line_no}: sample_id and subject_id are required")
        if sample_id in seen:
            raise ManifestError(f"line {line_no}: duplicate sample_id {sample_id!r}")
        seen.add(sample_id)
        samples.append(
            Sample(
                sample_id,
                subject_id,
                audio_path,
                transcript_path,
                _parse_score(phq8, PHQ8_MAX, "phq8", line_no),
                _parse_score(gad7, GAD7_MAX, "gad7", line_no),
                task_type,
            )
        )
    if not samples:
        raise ManifestError("manifest has no rows")
    return samples


def write_manifest(path: str | Path, samples: list) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MANIFEST_COLUMNS)
    for s in samples:
        writer.writerow(
            [
                s.sample_id,
                s.subject_id,
                s.audio_path,
                s.transcript_path,
                "" if s.phq8 is None else s.phq8,
                "" if s.gad7 is None else s.gad7,
                s.task_type,
            ]
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def binarize_score(score: int, cutoff: int = 10) -> int:
    """Screening label: 1 when the questionnaire total reaches the cutoff."""
    return 1 if score >= cutoff else 0


def label_for(row: dict, disease: str, cutoff: int = 10) -> int | None:
    """Binary label for a feature-table row or manifest sample; None when the
    relevant score is missing."""
    if disease not in DISEASES:
        raise ValueError(f"disease must be one of {DISEASES}")
    score = row["phq8"] if disease == "depression" else row["gad7"]
    if score is None:
        return None
    return binarize_score(score, cutoff)


def write_feature_table(path: str | Path, rows: list) -> None:
    """rows are dicts carrying META_COLUMNS and FEATURE_COLUMNS keys."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(META_COLUMNS + FEATURE_COLUMNS)
    for r in rows:
        line = [
            r["sample_id"],
            r["subject_id"],
            "" if r["phq8"] is None else r["phq8"],
            "" if r["gad7"] is None else r["gad7"],
            r["task_type"],
        ]
        line.extend(repr(float(r[c])) for c in FEATURE_COLUMNS)
        writer.writerow(line)
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_feature_table(path: str | Path) -> list:
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("feature table is empty")
    if tuple(header) != META_COLUMNS + FEATURE_COLUMNS:
        raise ManifestError("feature table header does not match the expected columns")

    rows = []
    seen = set()
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ManifestError(f"line {line_no}: expected {len(header)} columns")
        out = {
            "sample_id": row[0],
            "subject_id": row[1],
            "phq8": _parse_score(row[2], PHQ8_MAX, "phq8", line_no),
            "gad7": _parse_score(row[3], GAD7_MAX, "gad7", line_no),
            "task_type": row[4],
        }
        if out["sample_id"] in seen:
            raise ManifestError(f"line {line_no}: duplicate sample_id {out['sample_id']!r}")
        seen.add(out["sample_id"])
        for name, raw in zip(FEATURE_COLUMNS, row[5:]):
            out[name] = float(raw)
        rows.append(out)
    if not rows:
        raise ManifestError("feature table has no rows")
    return rows
