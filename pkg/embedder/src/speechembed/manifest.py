"""Reader for the screening manifest CSV (the shared dataset contract)."""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import ManifestError

COLUMNS = ("sample_id", "subject_id", "audio_path", "transcript_path", "phq8", "gad7", "task_type")


def load_manifest(path: str | Path) -> list:
    """Rows as dicts; only identity and path fields matter to this package."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("manifest is empty")
    if tuple(header) != COLUMNS:
        raise ManifestError(f"manifest header must be {','.join(COLUMNS)}")
    rows = []
    seen = set()
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise ManifestError(f"line {line_no}: expected {len(COLUMNS)} columns")
        entry = dict(zip(COLUMNS, row))
        if entry["sample_id"] in seen:
            raise ManifestError(f"line {line_no}: duplicate sample_id {entry['sample_id']!r}")
        seen.add(entry["sample_id"])
        rows.append(entry)
    if not rows:
        raise ManifestError("manifest has no rows")
    return rows
