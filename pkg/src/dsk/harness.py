"""Experiment orchestration: manifest loading, per-cell input assembly,
the full transcript-source x pauses x punctuation x model grid, and
report emission (CSV plus an aligned text table)."""

from __future__ import annotations

import json
import logging
import shlex
import shutil
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from dsk import alignment, chat
from dsk.classifiers.io import ModelBundle
from dsk.classifiers.metrics import EvalMetrics, evaluate
from dsk.classifiers.rfe import rfe_rank
from dsk.classifiers.selection import (
    LabeledDataset,
    ModelSpec,
    SelectionResult,
    default_grid,
    select_model,
    train,
)
from dsk.errors import DskError, ManifestError
from dsk.features import (
    FeatureVector,
    apply_standardizer,
    dictionary_percentages,
    fit_standardizer,
    matrix_from_vectors,
    pause_feature_block,
    structural_features,
)
from dsk.lexicon import CategoryLexicon, load_lexicon

log = logging.getLogger(__name__)

GROUPS = ("AD", "HC")
SPLITS = ("train", "test")
MODELS = ("fe_svm", "fe_knn", "we_nn")
MODEL_LABELS = {"fe_svm": "FE + SVM", "fe_knn": "FE + KNN", "we_nn": "WE + NN"}


@dataclass(frozen=True)
class Sample:
    id: str
    group: str
    split: str
    cha: Path | None = None
    asr_text: Path | None = None
    manual_align: Path | None = None
    asr_align: Path | None = None
    audio_duration: float | None = None
    audio: Path | None = None


@dataclass(frozen=True)
class Manifest:
    samples: tuple[Sample, ...]
    root: Path

    def split(self, which: str) -> list[Sample]:
        return [s for s in self.samples if s.split == which]


_PATH_FIELDS = ("cha", "asr_text", "manual_align", "asr_align", "audio")


def load_manifest(path, allow_missing_asr: bool = False) -> Manifest:
    """Load and validate a manifest; paths resolve against its directory.

    allow_missing_asr defers the existence check for asr_text files, for
    runs that generate them through the --asr-cmd hook first.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"invalid manifest JSON: {exc}") from exc
    if not isinstance(payload, dict) or "samples" not in payload:
        raise ManifestError("manifest must be an object with a 'samples' list")
    root = path.parent
    samples = []
    seen: dict[str, str] = {}
    for rec in payload["samples"]:
        sid = rec.get("id")
        if not sid:
            raise ManifestError("sample without an id")
        if sid in seen:
            if seen[sid] != rec.get("split"):
                raise ManifestError(f"sample {sid!r} appears in both train and test")
            raise ManifestError(f"duplicate sample id {sid!r}")
        seen[sid] = rec.get("split")
        if rec.get("group") not in GROUPS:
            raise ManifestError(f"sample {sid!r}: unknown group {rec.get('group')!r}")
        if rec.get("split") not in SPLITS:
            raise ManifestError(f"sample {sid!r}: unknown split {rec.get('split')!r}")
        kwargs = {}
        for name in _PATH_FIELDS:
            value = rec.get(name)
            if value is None:
                kwargs[name] = None
                continue
            resolved = root / value
            deferred = name == "audio" or (name == "asr_text" and allow_missing_asr)
            if not deferred and not resolved.is_file():
                raise ManifestError(f"sample {sid!r}: missing file {value!r}")
            kwargs[name] = resolved
        duration = rec.get("audio_duration")
        samples.append(
            Sample(
                id=sid,
                group=rec["group"],
                split=rec["split"],
                audio_duration=float(duration) if duration is not None else None,
                **kwargs,
            )
        )
    return Manifest(tuple(samples), root)


@dataclass(frozen=True)
class ExperimentConfig:
    source: str  # manual | asr
    pauses: bool
    punctuation: bool
    model: str  # fe_svm | fe_knn | we_nn

    def __post_init__(self):
        if self.source not in ("manual", "asr"):
            raise ManifestError(f"unknown source {self.source!r}")
        if self.model not in MODELS:
            raise ManifestError(f"unknown model {self.model!r}")
        if self.pauses and self.punctuation:
            # pause marks replace punctuation; the combination is undefined
            object.__setattr__(self, "punctuation", False)

    def cell_name(self) -> str:
        return (
            f"{self.source}_pauses{int(self.pauses)}"
            f"_punct{int(self.punctuation)}_{self.model}"
        )


def grid_configs() -> list[ExperimentConfig]:
    """All 18 grid cells in report order."""
    out = []
    for source in ("manual", "asr"):
        for pauses, punct in ((False, False), (False, True), (True, False)):
            for model in MODELS:
                out.append(ExperimentConfig(source, pauses, punct, model))
    return out


# --- per-sample input assembly ------------------------------------------


def _require(sample: Sample, field: str) -> Path:
    value = getattr(sample, field)
    if value is None:
        raise ManifestError(f"sample {sample.id!r} has no {field} entry")
    return value


def _manual_texts(sample: Sample, speaker: str = "PAR") -> tuple[list[str], str, str]:
    doc = chat.parse_chat(_require(sample, "cha").read_text(encoding="utf-8"))
    transcripts = chat.normalize_document(doc, speaker)
    words = [t.word for tr in transcripts for t in tr.tokens if t.kind != chat.PUNCT]
    with_punct = chat.render_transcript(transcripts, include_punctuation=True)
    bare = chat.render_transcript(transcripts, include_punctuation=False)
    return words, with_punct, bare


def _asr_texts(sample: Sample) -> tuple[list[str], str, str]:
    raw = _require(sample, "asr_text").read_text(encoding="utf-8")
    with_punct = " ".join(raw.split())
    words = alignment.strip_punct_tokens(with_punct)
    return words, with_punct, " ".join(words)


def _texts(sample: Sample, source: str) -> tuple[list[str], str, str]:
    return _manual_texts(sample) if source == "manual" else _asr_texts(sample)


def _load_track(sample: Sample, source: str) -> alignment.AlignmentTrack:
    if source == "manual":
        path, fmt = _require(sample, "manual_align"), "ctm"
    else:
        path, fmt = _require(sample, "asr_align"), "whisperx-json"
    return alignment.load_word_timestamps(
        path.read_bytes(), fmt, audio_duration=sample.audio_duration
    )


def build_inputs(
    sample: Sample,
    config: ExperimentConfig,
    lexicon: CategoryLexicon | None = None,
) -> FeatureVector | str:
    """Feature vector (fe models) or model-input text (we_nn) per config."""
    words, with_punct, bare = _texts(sample, config.source)
    if config.model == "we_nn":
        if config.pauses:
            track = _load_track(sample, config.source)
            tokens, _ = alignment.pair_tokens_to_track(words, track)
            return alignment.encode_pauses(tokens, alignment.compute_gaps(track))
        return with_punct if config.punctuation else bare
    if lexicon is None:
        raise ManifestError("fe models need a lexicon")
    feats = dictionary_percentages(words, lexicon)
    feats.update(
        structural_features(
            words,
            rendered_text_with_punct=with_punct,
            include_punct=config.punctuation,
        )
    )
    if config.pauses:
        stats = alignment.pause_statistics(_load_track(sample, config.source))
        feats.update(pause_feature_block(stats))
    return feats


# --- classical cells ------------------------------------------------------


def _fe_matrices(manifest: Manifest, config: ExperimentConfig, lexicon):
    data = {}
    for split in SPLITS:
        samples = manifest.split(split)
        vectors = [build_inputs(s, config, lexicon) for s in samples]
        matrix = matrix_from_vectors([s.id for s in samples], vectors)
        y = np.array([1 if s.group == "AD" else 0 for s in samples], dtype=np.int64)
        data[split] = (matrix, y)
    return data["train"], data["test"]


def fit_cell_model(
    manifest: Manifest,
    config: ExperimentConfig,
    grid: list[ModelSpec],
    lexicon: CategoryLexicon,
    refit_scaler: bool = True,
) -> tuple[ModelBundle, SelectionResult]:
    """Standardize, rank, select and train on the training split only."""
    (train_matrix, y_train), _ = _fe_matrices(manifest, config, lexicon)
    scaler = fit_standardizer(train_matrix)
    X_std = apply_standardizer(scaler, train_matrix)
    ranking = rfe_rank(X_std.values, y_train)
    # per-fold mode standardizes inside each fold from raw features;
    # global mode reuses the once-fitted scaling everywhere
    cv_matrix = train_matrix if refit_scaler else X_std
    dataset = LabeledDataset(cv_matrix, y_train, train_matrix.ids)
    selection = select_model(dataset, ranking, grid, refit_scaler)
    model = train(
        X_std.values[:, selection.feature_indices], y_train, selection.spec
    )
    bundle = ModelBundle(
        spec=selection.spec,
        feature_names=tuple(train_matrix.names[c] for c in selection.feature_indices),
        standardizer=scaler,
        model=model,
    )
    return bundle, selection


@dataclass
class CellResult:
    config: ExperimentConfig
    status: str  # ok | skipped | failed
    n_features: int | None = None
    metrics: EvalMetrics | None = None
    message: str = ""


def _family(model: str) -> str:
    return "svm" if model == "fe_svm" else "knn"


def run_cell(
    manifest: Manifest,
    config: ExperimentConfig,
    grid: list[ModelSpec] | None = None,
    lexicon: CategoryLexicon | None = None,
    nn_options: dict | None = None,
    refit_scaler: bool = True,
    trace_dir=None,
) -> CellResult:
    """Fit on the train split, evaluate once on the test split."""
    if config.model == "we_nn":
        return _run_nn_cell(manifest, config, nn_options or {})
    try:
        if lexicon is None:
            raise ManifestError("fe models need a lexicon")
        family = _family(config.model)
        if grid is None:
            n_probe = len(build_inputs(manifest.samples[0], config, lexicon))
            grid = default_grid(n_probe)
        specs = [s for s in grid if s.family == family]
        bundle, selection = fit_cell_model(
            manifest, config, specs, lexicon, refit_scaler
        )
        if trace_dir is not None:
            _write_trace(Path(trace_dir), config, selection)
        _, (test_matrix, y_test) = _fe_matrices(manifest, config, lexicon)
        pred = bundle.predict(test_matrix)
        metrics = evaluate(pred, y_test)
        return CellResult(config, "ok", selection.n_features, metrics)
    except DskError as exc:
        log.error("cell %s failed: %s", config.cell_name(), exc)
        return CellResult(config, "failed", message=str(exc))


def _write_trace(trace_dir: Path, config: ExperimentConfig, selection) -> None:
    trace_dir.mkdir(parents=True, exist_ok=True)
    lines = ["n_features,spec,loso_accuracy"]
    for n, spec, acc in selection.trace:
        lines.append(f"{n},{spec},{acc!r}")
    path = trace_dir / f"{config.cell_name()}.trace.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _run_nn_cell(
    manifest: Manifest, config: ExperimentConfig, options: dict
) -> CellResult:
    """Drive the secondary component through its CLI, if installed."""
    exe = shutil.which("nn-train")
    embeddings = options.get("embeddings")
    manifest_path = options.get("manifest_path")
    out_root = options.get("out_dir")
    if exe is None:
        return CellResult(
            config,
            "skipped",
            message="unsupported model: secondary component (nn-train) not installed",
        )
    if not (embeddings and manifest_path and out_root):
        return CellResult(
            config, "skipped", message="neural cells need --embeddings and --out"
        )
    try:
        cell_dir = Path(out_root) / "nn" / config.cell_name()
        texts_dir = cell_dir / "texts"
        texts_dir.mkdir(parents=True, exist_ok=True)
        for sample in manifest.samples:
            text = build_inputs(sample, config)
            (texts_dir / f"{sample.id}.txt").write_text(
                str(text) + "\n", encoding="utf-8"
            )
        cmd = [
            exe,
            "--manifest",
            str(manifest_path),
            "--texts",
            str(texts_dir),
            "--embeddings",
            str(embeddings),
            "--seeds",
            str(options.get("seeds", 25)),
            "--out",
            str(cell_dir),
        ]
        for key, flag in (
            ("epochs", "--epochs"),
            ("batch_size", "--batch-size"),
            ("max_len", "--max-len"),
        ):
            if options.get(key) is not None:
                cmd += [flag, str(options[key])]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            raise ManifestError(f"nn-train failed: {proc.stderr.strip()[:500]}")
        voted = _read_voted_labels(cell_dir / "voted_labels.csv")
        test = manifest.split("test")
        pred = np.array([voted[s.id] for s in test], dtype=np.int64)
        truth = np.array([1 if s.group == "AD" else 0 for s in test], dtype=np.int64)
        return CellResult(config, "ok", None, evaluate(pred, truth))
    except (DskError, OSError, KeyError, ValueError) as exc:
        log.error("neural cell %s failed: %s", config.cell_name(), exc)
        return CellResult(config, "failed", message=str(exc))


def _read_voted_labels(path: Path) -> dict[str, int]:
    voted = {}
    lines = path.read_text(encoding="utf-8").splitlines()
    for ln in lines[1:]:
        if not ln.strip():
            continue
        sid, label = ln.split(",")[:2]
        voted[sid] = int(label)
    return voted


# --- the grid -------------------------------------------------------------


def _cell_worker(args) -> CellResult:
    manifest_path, config, grid_blob, lexicon_path, nn_options, refit, trace_dir = args
    manifest = load_manifest(manifest_path)
    lexicon = None
    if lexicon_path is not None:
        lexicon = load_lexicon(Path(lexicon_path).read_bytes())
    grid = [ModelSpec(**kw) for kw in grid_blob] if grid_blob else None
    return run_cell(manifest, config, grid, lexicon, nn_options, refit, trace_dir)


def run_grid(
    manifest_path,
    lexicon_path=None,
    grid: list[ModelSpec] | None = None,
    out_dir=None,
    nn_options: dict | None = None,
    jobs: int = 1,
    refit_scaler: bool = True,
) -> list[CellResult]:
    """Run all 18 cells; per-cell failures are recorded, not raised."""
    manifest_path = Path(manifest_path)
    nn_options = dict(nn_options or {})
    nn_options.setdefault("manifest_path", manifest_path)
    if out_dir is not None:
        nn_options.setdefault("out_dir", out_dir)
    grid_blob = (
        [
            {
                "family": s.family,
                "kernel": s.kernel,
                "C": s.C,
                "gamma": s.gamma,
                "k": s.k,
            }
            for s in grid
        ]
        if grid
        else None
    )
    configs = grid_configs()
    trace_dir = Path(out_dir) / "traces" if out_dir is not None else None
    work = [
        (manifest_path, cfg, grid_blob, lexicon_path, nn_options, refit_scaler, trace_dir)
        for cfg in configs
    ]
    if jobs > 1:
        fe_work = [w for w in work if w[1].model != "we_nn"]
        nn_work = [w for w in work if w[1].model == "we_nn"]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            fe_results = list(pool.map(_cell_worker, fe_work))
        nn_results = [_cell_worker(w) for w in nn_work]
        by_config = {r.config: r for r in fe_results + nn_results}
        results = [by_config[cfg] for cfg in configs]
    else:
        results = [_cell_worker(w) for w in work]
    if out_dir is not None:
        emit_report(results, out_dir)
    return results


# --- reports ---------------------------------------------------------------


def results_to_csv(results: list[CellResult]) -> str:
    lines = [
        "source,pauses,punctuation,model,status,n_features,accuracy,precision,recall,f1"
    ]
    for r in results:
        cfg = r.config
        punct = "-" if cfg.pauses else ("yes" if cfg.punctuation else "no")
        metric_fields = ["", "", "", ""]
        if r.metrics is not None:
            metric_fields = [
                repr(r.metrics.accuracy),
                repr(r.metrics.precision),
                repr(r.metrics.recall),
                repr(r.metrics.f1),
            ]
        lines.append(
            ",".join(
                [
                    cfg.source,
                    "yes" if cfg.pauses else "no",
                    punct,
                    cfg.model,
                    r.status,
                    "" if r.n_features is None else str(r.n_features),
                ]
                + metric_fields
            )
        )
    return "\n".join(lines) + "\n"


def parse_results_csv(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split(",")
    rows = []
    for ln in lines[1:]:
        fields = ln.split(",")
        rec = dict(zip(header, fields))
        for key in ("accuracy", "precision", "recall", "f1"):
            rec[key] = float(rec[key]) if rec[key] else None
        rec["n_features"] = int(rec["n_features"]) if rec["n_features"] else None
        rows.append(rec)
    return rows


def render_table(results: list[CellResult]) -> str:
    """Aligned text table with one row block per (pauses, punct, model)."""
    by_key = {
        (r.config.source, r.config.pauses, r.config.punctuation, r.config.model): r
        for r in results
    }
    header_rows = (
        ("No", "No"),
        ("No", "Yes"),
        ("Yes", "-"),
    )
    lines = []
    title = f"{'Pauses':<7} {'Punct.':<7} {'Model':<9}"
    cols = f"{'N':>5} {'Acc':>6} {'Precision':>9} {'Recall':>6} {'F1':>6}"
    width = len(cols)
    lines.append(f"{'':<25} | {'Manual transcriptions':^{width}} | {'ASR-based transcriptions':^{width}}")
    lines.append(f"{title} | {cols} | {cols}")
    for pauses_label, punct_label in header_rows:
        pauses = pauses_label == "Yes"
        punct = punct_label == "Yes"
        for model in MODELS:
            cells = []
            for source in ("manual", "asr"):
                r = by_key[(source, pauses, punct, model)]
                if r.status != "ok":
                    cells.append(f"{r.status:^{width}}")
                    continue
                n = "-" if r.n_features is None else str(r.n_features)
                m = r.metrics
                cells.append(
                    f"{n:>5} {m.accuracy:>6.3f} {m.precision:>9.3f} "
                    f"{m.recall:>6.3f} {m.f1:>6.3f}"
                )
            lines.append(
                f"{pauses_label:<7} {punct_label:<7} {MODEL_LABELS[model]:<9} | "
                f"{cells[0]} | {cells[1]}"
            )
    return "\n".join(lines) + "\n"


def emit_report(results: list[CellResult], out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(results_to_csv(results), encoding="utf-8")
    (out / "report.txt").write_text(render_table(results), encoding="utf-8")


def any_hard_failure(results: list[CellResult]) -> bool:
    return any(r.status == "failed" for r in results)


def run_asr_hook(manifest: Manifest, asr_cmd: str) -> None:
    """Run an external transcription command for missing asr_text files.

    The shell template gets {audio} and {out} substitutions and runs once
    per sample whose listed asr_text does not exist yet.
    """
    for sample in manifest.samples:
        if sample.asr_text is None or sample.asr_text.is_file():
            continue
        if sample.audio is None:
            raise ManifestError(
                f"sample {sample.id!r}: asr_text missing and no audio to transcribe"
            )
        cmd = asr_cmd.format(
            audio=shlex.quote(str(sample.audio)),
            out=shlex.quote(str(sample.asr_text)),
        )
        log.info("asr hook for %s: %s", sample.id, cmd)
        subprocess.run(cmd, shell=True, check=True)
        if not sample.asr_text.is_file():
            raise ManifestError(
                f"asr hook did not produce {sample.asr_text} for {sample.id!r}"
            )
