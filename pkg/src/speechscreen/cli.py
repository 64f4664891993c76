"""Command line interface.

Subcommands: extract, folds, train, evaluate, report, synth. Every command
accepts --config FILE and repeated --set key=value overrides, applied in that
order on top of the defaults.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import audio as au
from . import harness
from .acoustic import extract_acoustic
from .config import load_config, parse_config_text
from .errors import ConfigError
from .harness.folds import read_folds_csv
from .harness.manifest import DISEASES
from .linguistic import extract_linguistic, load_transcript, load_vad_lexicon
from .harness.training import MODEL_KINDS


def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one config key (repeatable)",
    )


def _build_config(args):
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
    overrides = parse_config_text("\n".join(args.overrides))
    return load_config(args.config, overrides)


def cmd_extract(args) -> int:
    cfg = _build_config(args)
    samples = harness.load_manifest(args.manifest)
    base = Path(args.manifest).parent
    vad = load_vad_lexicon(cfg.vad_lexicon_path)

    rows = []
    for s in samples:
        buf = au.load_wav(base / s.audio_path)
        utterances = load_transcript(base / s.transcript_path)
        row = {
            "sample_id": s.sample_id,
            "subject_id": s.subject_id,
            "phq8": s.phq8,
            "gad7": s.gad7,
            "task_type": s.task_type,
        }
        row.update(extract_acoustic(buf, cfg))
        row.update(extract_linguistic(utterances, cfg, vad))
        rows.append(row)
    harness.write_feature_table(args.out, rows)
    print(f"extracted {len(rows)} samples -> {args.out}")
    return 0


def cmd_folds(args) -> int:
    cfg = _build_config(args)
    rows = harness.read_feature_table(args.features)
    assignment = harness.assign_folds(rows, args.disease, cfg.folds, args.seed)
    harness.write_folds_csv(args.out, rows, assignment, args.disease)
    n_folds = max(assignment.values()) + 1
    print(f"assigned {len(assignment)} subjects to {n_folds} folds -> {args.out}")
    return 0


def cmd_train(args) -> int:
    cfg = _build_config(args)
    rows = harness.read_feature_table(args.features)
    assignment = read_folds_csv(args.folds_file) if args.folds_file else None
    out_dir = Path(args.out_dir)
    results = harness.run_cross_validation(
        rows,
        cfg,
        args.disease,
        args.model,
        args.seed,
        out_dir=out_dir,
        embeddings_dir=args.embeddings,
        assignment=assignment,
    )
    harness.write_predictions_csv(out_dir / "predictions.csv", results["predictions"])
    harness.write_metrics_json(out_dir / "metrics.json", results)
    avg = results["average"]
    print(
        f"{args.model} / {args.disease}: macro f1 {avg['macro_f1']:.4f}, "
        f"weighted f1 {avg['weighted_f1']:.4f} over {results['folds']} folds"
    )
    return 0


def cmd_evaluate(args) -> int:
    cfg = _build_config(args)
    rows = harness.read_feature_table(args.features)
    result = harness.evaluate_checkpoint(
        args.checkpoint, rows, cfg, args.disease, embeddings_dir=args.embeddings
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    harness.write_predictions_csv(out_dir / "predictions.csv", result["predictions"])
    harness.write_metrics_json(out_dir / "metrics.json", {"metrics": result["metrics"]})
    m = result["metrics"]
    print(f"evaluated {len(result['predictions'])} samples: macro f1 {m['macro_f1']:.4f}")
    return 0


def cmd_report(args) -> int:
    results = [harness.read_metrics_json(p) for p in args.metrics]
    text = harness.render_report(results)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote report -> {args.out}")
    else:
        print(text)
    return 0


def cmd_synth(args) -> int:
    cfg = _build_config(args)
    info = harness.generate_dataset(
        args.out,
        n_subjects=args.subjects,
        samples_per_subject=args.samples_per_subject,
        positive_rate=args.positive_rate,
        signal_strength=args.signal,
        seed=args.seed,
        cfg=cfg,
        with_embeddings=args.embeddings,
    )
    print(
        f"synthesized {info['n_rows']} samples "
        f"({info['n_positive_subjects']} positive subjects) -> {info['features']}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speechscreen",
        description="speech-based mental health screening pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract features for every manifest sample")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="output feature table CSV")
    _add_config_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("folds", help="assign subject-disjoint stratified folds")
    p.add_argument("--features", required=True)
    p.add_argument("--disease", required=True, choices=DISEASES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_folds)

    p = sub.add_parser("train", help="run cross-validated training")
    p.add_argument("--features", required=True)
    p.add_argument("--disease", required=True, choices=DISEASES)
    p.add_argument("--model", required=True, choices=MODEL_KINDS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--embeddings", help="embedding directory (fusion model)")
    p.add_argument("--folds-file", help="reuse a folds CSV instead of assigning")
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="apply a checkpoint to a feature table")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--disease", required=True, choices=DISEASES)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--embeddings", help="embedding directory (fusion model)")
    _add_config_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render metrics JSON files as a text report")
    p.add_argument("--metrics", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a synthetic labeled dataset")
    p.add_argument("--out", required=True)
    p.add_argument("--subjects", type=int, default=50)
    p.add_argument("--samples-per-subject", type=int, default=2)
    p.add_argument("--positive-rate", type=float, default=0.253)
    p.add_argument("--signal", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--embeddings", action="store_true", help="also write embedding sequences")
    _add_config_args(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
