"""Synthetic dataset generation for harness validation.

Produces a feature table whose class signal lives in a small set of named
features, with questionnaire scores drawn consistently with the label, and
optionally paired audio/text embedding sequences whose signal occupies
disjoint subspaces per source.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..config import Config
from .. import embeddings as em
from .manifest import FEATURE_COLUMNS, write_feature_table

# features that carry the synthetic class signal
SIGNAL_FEATURES = (
    "f0_mean_hz",
    "phonation_rate",
    "mean_pause_s",
    "pause_to_speech_ratio",
    "ttr",
    "valence_mean",
    "intensity_mean_db",
    "mattr_50",
)

FLAG_FEATURES = tuple(
    f for f in FEATURE_COLUMNS if f.startswith("absent_") or f in ("ratio_capped", "sentiment_oov")
)

EMBED_DIM = 8
AUDIO_ROWS = 20
TEXT_ROWS = 12


def generate_dataset(
    out_dir: str | Path,
    n_subjects: int,
    samples_per_subject: int,
    positive_rate: float,
    signal_strength: float,
    seed: int,
    cfg: Config,
    with_embeddings: bool = False,
) -> dict:
    """Write features.csv (and optionally embeddings/) under out_dir.

    The number of positive subjects is round(positive_rate * n_subjects), so
    the prevalence is exact and deterministic rather than sampled.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed])))

    n_pos = int(round(positive_rate * n_subjects))
    labels = [1] * n_pos + [0] * (n_subjects - n_pos)
    rng.shuffle(labels)

    rows = []
    embed_entries = []
    for subj in range(n_subjects):
        label = labels[subj]
        subject_id = f"subj{subj:04d}"
        for k in range(samples_per_subject):
            sample_id = f"{subject_id}_s{k:02d}"
            row = {
                "sample_id": sample_id,
                "subject_id": subject_id,
                "phq8": int(rng.integers(10, 25)) if label else int(rng.integers(0, 10)),
                "gad7": int(rng.integers(10, 22)) if label else int(rng.integers(0, 10)),
                "task_type": "synthetic",
            }
            for name in FEATURE_COLUMNS:
                if name in FLAG_FEATURES:
                    row[name] = 0.0
                else:
                    row[name] = float(rng.normal())
            if label:
                for name in SIGNAL_FEATURES:
                    row[name] += signal_strength
            rows.append(row)

            if with_embeddings:
                audio = rng.normal(size=(AUDIO_ROWS, EMBED_DIM))
                text = rng.normal(size=(TEXT_ROWS, EMBED_DIM))
                if label:
                    # disjoint subspaces so each branch has its own signal
                    audio[:, : EMBED_DIM // 2] += 0.5 * signal_strength
                    text[:, EMBED_DIM // 2 :] += 0.5 * signal_strength
                embed_dir = out_dir / "embeddings"
                embed_dir.mkdir(exist_ok=True)
                for src_name, tag, arr in (
                    ("audio", em.SOURCE_AUDIO, audio),
                    ("text", em.SOURCE_TEXT, text),
                ):
                    fname = f"{sample_id}_{src_name}.sbem"
                    em.write_embedding(embed_dir / fname, arr.astype(np.float32), tag)
                    embed_entries.append(
                        {
                            "sample_id": sample_id,
                            "source": src_name,
                            "path": fname,
                            "rows": arr.shape[0],
                            "dim": EMBED_DIM,
                            "valid": arr.shape[0],
                        }
                    )

    write_feature_table(out_dir / "features.csv", rows)
    if with_embeddings:
        em.write_index(out_dir / "embeddings" / "index.csv", embed_entries)
    return {
        "features": str(out_dir / "features.csv"),
        "embeddings": str(out_dir / "embeddings") if with_embeddings else None,
        "n_rows": len(rows),
        "n_positive_subjects": n_pos,
    }
