"""Command-line entry point. Subcommands cover transcript normalization,
pause encoding/statistics, WER scoring, feature extraction, model
training/evaluation, the experiment grid, and fixture synthesis.

The env var ``DSK_LOG`` (debug|info|warning|error) sets log verbosity;
``DSK_BACKEND`` (numba|numpy) picks the kernel backend.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

import dsk
from dsk import alignment, chat, harness, wer
from dsk.classifiers import rfe_rank, select_model, train
from dsk.classifiers.io import ModelBundle, load_model, save_model
from dsk.classifiers.selection import LabeledDataset, default_grid, grid_from_config
from dsk.errors import DskError
from dsk.features import (
    apply_standardizer,
    fit_standardizer,
    matrix_from_vectors,
    read_features_csv,
    write_features_csv,
)
from dsk.fixture import synthesize_fixture
from dsk.harness import ExperimentConfig, build_inputs, load_manifest
from dsk.lexicon import load_lexicon

log = logging.getLogger("dsk")


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_normalize(args) -> int:
    doc = chat.parse_chat(Path(args.cha).read_text(encoding="utf-8"))
    transcripts = chat.normalize_document(doc, args.speaker)
    rendered = chat.render_transcript(transcripts, include_punctuation=args.keep_punct)
    _write_or_print(rendered + "\n", args.out)
    return 0


def _load_track_arg(args) -> alignment.AlignmentTrack:
    data = Path(args.align).read_bytes()
    fmt = args.format
    if fmt == "auto":
        fmt = alignment.sniff_format(args.align)
    return alignment.load_word_timestamps(data, fmt, audio_duration=args.duration)


def cmd_encode_pauses(args) -> int:
    track = _load_track_arg(args)
    text = Path(args.text).read_text(encoding="utf-8")
    tokens = alignment.strip_punct_tokens(text)
    tokens, dropped = alignment.pair_tokens_to_track(tokens, track)
    if dropped:
        log.warning("%d transcript tokens had no aligned word", dropped)
    encoded = alignment.encode_pauses(tokens, alignment.compute_gaps(track))
    _write_or_print(encoded + "\n", args.out)
    return 0


def cmd_pause_stats(args) -> int:
    stats = alignment.pause_statistics(_load_track_arg(args))
    payload = {
        "speech_rate": stats.speech_rate,
        "n_pauses": stats.n_pauses,
        "mean_pause": stats.mean_pause,
        "total_pause": stats.total_pause,
    }
    _write_or_print(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_wer(args) -> int:
    manifest = load_manifest(args.manifest)
    pairs = []
    ids = []
    for sample in manifest.samples:
        ref_path = Path(args.ref_dir) / f"{sample.id}.txt"
        hyp_path = Path(args.hyp_dir) / f"{sample.id}.txt"
        if not ref_path.is_file() or not hyp_path.is_file():
            log.warning("skipping %s: missing ref or hyp file", sample.id)
            continue
        ref = wer.normalize_for_scoring(ref_path.read_text(encoding="utf-8"))
        hyp = wer.normalize_for_scoring(hyp_path.read_text(encoding="utf-8"))
        if not args.keep_fillers:
            ref = wer.drop_fillers(ref)
            hyp = wer.drop_fillers(hyp)
        pairs.append((ref, hyp, sample.group))
        ids.append(sample.id)
    result = wer.corpus_wer(pairs, ids)
    lines = ["id,group,wer_percent"]
    for sid, group, pct in result.per_sample:
        lines.append(f"{sid},{group},{pct!r}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if result.overall is not None:
        print(f"overall: mean {result.overall.mean:.2f}% std {result.overall.std:.2f}%")
    for group, stats in result.by_group.items():
        print(f"{group}: mean {stats.mean:.2f}% std {stats.std:.2f}%")
    for sid, msg in result.errors:
        print(f"error {sid}: {msg}", file=sys.stderr)
    return 0


def cmd_features(args) -> int:
    manifest = load_manifest(args.manifest)
    lexicon = load_lexicon(Path(args.lexicon).read_bytes())
    config = ExperimentConfig(args.source, args.pauses, args.punct, "fe_svm")
    samples = [
        s
        for s in manifest.samples
        if args.split == "all" or s.split == args.split
    ]
    vectors = [build_inputs(s, config, lexicon) for s in samples]
    matrix = matrix_from_vectors([s.id for s in samples], vectors)
    write_features_csv(matrix, args.out)
    print(f"wrote {len(matrix.ids)} rows x {len(matrix.names)} features to {args.out}")
    return 0


def _read_labels(path) -> dict[str, int]:
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    header = [h.strip().lower() for h in lines[0].split(",")]
    if "id" not in header:
        raise DskError("labels file needs an 'id' column")
    id_col = header.index("id")
    if "group" in header:
        col, mapping = header.index("group"), {"AD": 1, "HC": 0}
    elif "label" in header:
        col, mapping = header.index("label"), None
    else:
        raise DskError("labels file needs a 'group' (AD/HC) or 'label' (1/0) column")
    labels = {}
    for ln in lines[1:]:
        fields = [f.strip() for f in ln.split(",")]
        labels[fields[id_col]] = (
            mapping[fields[col]] if mapping else int(fields[col])
        )
    return labels


def _grid_for(args, n_features: int):
    if args.grid:
        cfg = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        return grid_from_config(cfg, n_features)
    return default_grid(n_features)


def cmd_train(args) -> int:
    matrix = read_features_csv(args.features)
    labels = _read_labels(args.labels)
    try:
        y = np.array([labels[sid] for sid in matrix.ids], dtype=np.int64)
    except KeyError as exc:
        raise DskError(f"no label for sample {exc}") from exc
    grid = _grid_for(args, len(matrix.names))
    if args.family != "both":
        grid = [g for g in grid if g.family == args.family]
    scaler = fit_standardizer(matrix)
    X_std = apply_standardizer(scaler, matrix)
    ranking = rfe_rank(X_std.values, y)
    cv_matrix = matrix if not args.global_scaling else X_std
    data = LabeledDataset(cv_matrix, y, matrix.ids)
    selection = select_model(data, ranking, grid, refit_scaler=not args.global_scaling)
    model = train(X_std.values[:, selection.feature_indices], y, selection.spec)
    bundle = ModelBundle(
        spec=selection.spec,
        feature_names=tuple(matrix.names[c] for c in selection.feature_indices),
        standardizer=scaler,
        model=model,
    )
    save_model(bundle, args.out)
    trace_path = Path(args.out).with_suffix(".trace.csv")
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write("n_features,spec,loso_accuracy\n")
        for n, spec, acc in selection.trace:
            fh.write(f"{n},{spec},{acc!r}\n")
    print(
        f"selected {selection.spec.describe()} with N={selection.n_features} "
        f"(LOSO accuracy {selection.cv_accuracy:.4f}); model -> {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    bundle = load_model(args.model)
    matrix = read_features_csv(args.features)
    pred = bundle.predict(matrix)
    if args.labels:
        labels = _read_labels(args.labels)
        truth = np.array([labels[sid] for sid in matrix.ids], dtype=np.int64)
        from dsk.classifiers import evaluate as eval_metrics

        m = eval_metrics(pred, truth)
        payload = {
            "accuracy": m.accuracy,
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "tp": m.tp,
            "fp": m.fp,
            "fn": m.fn,
            "tn": m.tn,
        }
    else:
        log.warning("no --labels given; emitting predictions only")
        payload = {"predictions": {sid: int(p) for sid, p in zip(matrix.ids, pred)}}
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(payload, indent=2))
    return 0


def cmd_grid(args) -> int:
    manifest = load_manifest(args.manifest, allow_missing_asr=bool(args.asr_cmd))
    if args.asr_cmd:
        harness.run_asr_hook(manifest, args.asr_cmd)
    grid = None
    if args.grid:
        cfg = json.loads(Path(args.grid).read_text(encoding="utf-8"))
        # n_features differs per cell; "scale" gammas resolve against the
        # largest feature set, which is close enough for a shared grid
        lexicon = load_lexicon(Path(args.lexicon).read_bytes())
        try:
            probe = ExperimentConfig("manual", True, False, "fe_svm")
            n_probe = len(build_inputs(manifest.samples[0], probe, lexicon))
        except DskError:
            probe = ExperimentConfig("manual", False, True, "fe_svm")
            n_probe = len(build_inputs(manifest.samples[0], probe, lexicon))
        grid = grid_from_config(cfg, n_probe)
    nn_options = {"seeds": args.nn_seeds, "epochs": args.nn_epochs}
    if args.embeddings:
        nn_options["embeddings"] = Path(args.embeddings)
    results = harness.run_grid(
        args.manifest,
        lexicon_path=args.lexicon,
        grid=grid,
        out_dir=args.out,
        nn_options=nn_options,
        jobs=args.jobs,
        refit_scaler=not args.global_scaling,
    )
    print(harness.render_table(results), end="")
    failed = harness.any_hard_failure(results)
    if failed:
        for r in results:
            if r.status == "failed":
                print(f"FAILED {r.config.cell_name()}: {r.message}", file=sys.stderr)
    return 2 if failed else 0


def cmd_fixture(args) -> int:
    manifest_path = synthesize_fixture(
        args.seed, args.n, args.mode, args.out, n_test_per_class=args.n_test
    )
    print(f"fixture manifest: {manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsk",
        description="Speech-transcript AD/HC classification toolkit",
    )
    parser.add_argument("--version", action="version", version=dsk.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="normalize a CHAT transcript to plain text")
    p.add_argument("--cha", required=True)
    p.add_argument("--speaker", default="PAR")
    p.add_argument("--keep-punct", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("encode-pauses", help="insert pause marks into a transcript")
    p.add_argument("--text", required=True)
    p.add_argument("--align", required=True)
    p.add_argument("--format", choices=["whisperx-json", "ctm", "auto"], default="auto")
    p.add_argument("--duration", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_encode_pauses)

    p = sub.add_parser("pause-stats", help="pause statistics for an alignment")
    p.add_argument("--align", required=True)
    p.add_argument("--format", choices=["whisperx-json", "ctm", "auto"], default="auto")
    p.add_argument("--duration", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pause_stats)

    p = sub.add_parser("wer", help="corpus word error rate")
    p.add_argument("--ref-dir", required=True)
    p.add_argument("--hyp-dir", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--keep-fillers", action="store_true")
    p.set_defaults(func=cmd_wer)

    p = sub.add_parser("features", help="extract a feature CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--pauses", action="store_true")
    p.add_argument("--punct", action="store_true")
    p.add_argument("--source", choices=["manual", "asr"], default="manual")
    p.add_argument("--split", choices=["train", "test", "all"], default="all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="feature ranking + LOSO model selection")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--grid")
    p.add_argument("--family", choices=["svm", "knn", "both"], default="both")
    p.add_argument("--global-scaling", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved model on a feature CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--labels")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("grid", help="run the full experiment grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--grid")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--embeddings")
    p.add_argument("--nn-seeds", type=int, default=25)
    p.add_argument("--nn-epochs", type=int)
    p.add_argument("--asr-cmd")
    p.add_argument("--global-scaling", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("fixture", help="synthesize a desk-scale corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=20, help="training samples per class")
    p.add_argument("--n-test", type=int, help="test samples per class (default n//2)")
    p.add_argument(
        "--mode", choices=["pause-signal", "lexical-signal"], default="pause-signal"
    )
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixture)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("DSK_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DskError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
