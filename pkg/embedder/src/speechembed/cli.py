"""Batch embedding extraction.

speechembed --manifest M --out DIR [--audio-model ID] [--text-model ID]
            [--pause-tokens FILE] [--dim N]

Emits one audio and one text embedding file per manifest sample plus an
index.csv; per-sample failures land in errors.csv and make the exit code
nonzero while the remaining samples still process.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import audio as au
from . import sbem
from .encoders import DEFAULT_DIM, AudioEncoder, TextEncoder
from .errors import EmbedError
from .manifest import load_manifest
from .tokenizer import Tokenizer, load_pause_tokens


def process_sample(row, base, out_dir, audio_enc, text_enc):
    """Returns (index entries, error entries) for one manifest row."""
    entries = []
    errors = []
    sid = row["sample_id"]

    try:
        x, rate = au.load_wav(base / row["audio_path"])
        if rate != au.TARGET_RATE:
            x = au.resample(x, rate)
        seq = audio_enc.encode(x)
        name = f"{sid}_audio.sbem"
        sbem.write_sbem(out_dir / name, seq, sbem.SOURCE_AUDIO)
        entries.append({
            "sample_id": sid, "source": "audio", "path": name,
            "rows": seq.shape[0], "dim": seq.shape[1], "valid": seq.shape[0],
        })
    except EmbedError as exc:
        errors.append({"sample_id": sid, "stage": "audio", "message": str(exc)})

    try:
        text = (base / row["transcript_path"]).read_text(encoding="utf-8")
        seq, valid = text_enc.encode(text)
        name = f"{sid}_text.sbem"
        sbem.write_sbem(out_dir / name, seq, sbem.SOURCE_TEXT)
        entries.append({
            "sample_id": sid, "source": "text", "path": name,
            "rows": seq.shape[0], "dim": seq.shape[1], "valid": valid,
        })
    except (EmbedError, OSError) as exc:
        errors.append({"sample_id": sid, "stage": "text", "message": str(exc)})

    return entries, errors


def write_errors(path, errors):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sample_id", "stage", "message"])
    for e in errors:
        writer.writerow([e["sample_id"], e["stage"], e["message"]])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="speechembed",
        description="extract frozen-encoder embedding sequences for a manifest",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--audio-model", default="frozen-speech-v1")
    parser.add_argument("--text-model", default="frozen-text-v1")
    parser.add_argument("--pause-tokens", help="file with one pause marker per line")
    parser.add_argument("--dim", type=int, default=DEFAULT_DIM, help="encoder hidden size")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = load_manifest(args.manifest)
        pause_tokens = load_pause_tokens(args.pause_tokens)
    except (EmbedError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    base = Path(args.manifest).parent
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tokenizer = Tokenizer(pause_tokens)
    audio_enc = AudioEncoder(args.audio_model, args.dim)
    text_enc = TextEncoder(args.text_model, args.dim, tokenizer)

    entries = []
    errors = []
    for row in rows:
        got, bad = process_sample(row, base, out_dir, audio_enc, text_enc)
        entries.extend(got)
        errors.extend(bad)

    sbem.write_index(out_dir / "index.csv", entries)
    write_errors(out_dir / "errors.csv", errors)
    print(f"wrote {len(entries)} embedding files for {len(rows)} samples -> {out_dir}")
    if errors:
        for e in errors:
            print(f"failed {e['sample_id']} ({e['stage']}): {e['message']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
