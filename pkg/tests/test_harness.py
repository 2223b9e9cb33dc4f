import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from dsk import harness
from dsk.alignment import load_word_timestamps, pause_statistics
from dsk.classifiers import LabeledDataset, ModelSpec, loso_cv
from dsk.classifiers.io import save_model
from dsk.errors import ManifestError
from dsk.features import apply_standardizer, fit_standardizer
from dsk.fixture import synthesize_fixture
from dsk.harness import (
    ExperimentConfig,
    build_inputs,
    fit_cell_model,
    grid_configs,
    load_manifest,
    parse_results_csv,
    results_to_csv,
    run_cell,
    run_grid,
)
from dsk.lexicon import load_lexicon

SMALL_GRID = [
    ModelSpec("svm", kernel="linear", C=1.0),
    ModelSpec("svm", kernel="rbf", C=10.0, gamma=0.1),
    ModelSpec("knn", k=1),
    ModelSpec("knn", k=3),
]


def tree_digest(root: Path) -> dict[str, str]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(
                path.read_bytes()
            ).hexdigest()
    return out


@pytest.fixture(scope="module")
def fixture_env(small_fixture):
    manifest = load_manifest(small_fixture)
    lexicon_path = small_fixture.parent / "lexicon.dic"
    lexicon = load_lexicon(lexicon_path.read_bytes())
    return manifest, small_fixture, lexicon_path, lexicon


class TestManifest:
    def test_valid_manifest_loads(self, fixture_env):
        manifest, *_ = fixture_env
        assert len(manifest.samples) == 16
        assert len(manifest.split("train")) == 10
        assert len(manifest.split("test")) == 6

    def _write(self, tmp_path, samples):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps({"samples": samples}))
        return path

    def test_duplicate_id(self, tmp_path):
        rec = {"id": "s1", "group": "AD", "split": "train"}
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(self._write(tmp_path, [rec, dict(rec)]))

    def test_train_test_overlap(self, tmp_path):
        a = {"id": "s1", "group": "AD", "split": "train"}
        b = {"id": "s1", "group": "AD", "split": "test"}
        with pytest.raises(ManifestError, match="both train and test"):
            load_manifest(self._write(tmp_path, [a, b]))

    def test_missing_file(self, tmp_path):
        rec = {"id": "s1", "group": "AD", "split": "train", "cha": "nope.cha"}
        with pytest.raises(ManifestError, match="missing file"):
            load_manifest(self._write(tmp_path, [rec]))

    def test_unknown_group_and_split(self, tmp_path):
        with pytest.raises(ManifestError, match="group"):
            load_manifest(
                self._write(tmp_path, [{"id": "a", "group": "MCI", "split": "train"}])
            )
        with pytest.raises(ManifestError, match="split"):
            load_manifest(
                self._write(tmp_path, [{"id": "a", "group": "AD", "split": "dev"}])
            )


class TestExperimentConfig:
    def test_pauses_force_punct_off(self):
        cfg = ExperimentConfig("manual", True, True, "fe_svm")
        assert cfg.punctuation is False

    def test_grid_has_all_18_cells_once(self):
        configs = grid_configs()
        assert len(configs) == 18
        assert len(set(configs)) == 18
        for source in ("manual", "asr"):
            for model in ("fe_svm", "fe_knn", "we_nn"):
                combos = {
                    (c.pauses, c.punctuation)
                    for c in configs
                    if c.source == source and c.model == model
                }
                assert combos == {(False, False), (False, True), (True, False)}


class TestBuildInputs:
    def test_fe_plain_features(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        sample = manifest.samples[0]
        cfg = ExperimentConfig("manual", False, False, "fe_svm")
        feats = build_inputs(sample, cfg, lexicon)
        assert "WC" in feats and "Sixltr" in feats
        assert "objects" in feats and "actions" in feats
        assert "speech_rate" not in feats and "AllPunc" not in feats

    def test_fe_with_pauses(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        sample = manifest.samples[0]
        cfg = ExperimentConfig("manual", True, False, "fe_knn")
        feats = build_inputs(sample, cfg, lexicon)
        for name in ("speech_rate", "n_pauses", "mean_pause", "total_pause"):
            assert name in feats
        stats = pause_statistics(
            load_word_timestamps(
                sample.manual_align.read_bytes(), "ctm", sample.audio_duration
            )
        )
        assert feats["speech_rate"] == pytest.approx(stats.speech_rate)

    def test_fe_with_punct(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        cfg = ExperimentConfig("asr", False, True, "fe_svm")
        feats = build_inputs(manifest.samples[0], cfg, lexicon)
        assert feats["Period"] > 0  # fixture ASR text carries sentence periods

    def test_we_nn_text_variants(self, fixture_env):
        manifest, *_ = fixture_env
        sample = manifest.samples[0]
        bare = build_inputs(sample, ExperimentConfig("manual", False, False, "we_nn"))
        punct = build_inputs(sample, ExperimentConfig("manual", False, True, "we_nn"))
        paused = build_inputs(sample, ExperimentConfig("manual", True, False, "we_nn"))
        assert "." not in bare
        assert "." in punct
        assert punct.replace(" .", "") == bare
        marks = [t for t in paused.split() if t in (",", ".", "...")]
        words = [t for t in paused.split() if t not in (",", ".", "...")]
        assert words == bare.split()
        assert marks, "pause-signal fixture must produce pause marks"

    def test_fe_needs_lexicon(self, fixture_env):
        manifest, *_ = fixture_env
        cfg = ExperimentConfig("manual", False, False, "fe_svm")
        with pytest.raises(ManifestError):
            build_inputs(manifest.samples[0], cfg, None)


class TestRunCell:
    def test_separable_fixture_knn(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        cfg = ExperimentConfig("manual", True, False, "fe_knn")
        result = run_cell(manifest, cfg, SMALL_GRID, lexicon)
        assert result.status == "ok"
        assert result.metrics.accuracy == 1.0
        assert result.n_features >= 1

    def test_we_nn_unavailable_is_skipped(self, fixture_env, monkeypatch):
        manifest, *_ = fixture_env
        monkeypatch.setattr(harness.shutil, "which", lambda _: None)
        cfg = ExperimentConfig("manual", True, False, "we_nn")
        result = run_cell(manifest, cfg)
        assert result.status == "skipped"

    def test_failure_is_recorded_not_raised(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        cfg = ExperimentConfig("manual", False, False, "fe_svm")
        result = run_cell(manifest, cfg, grid=None, lexicon=None)
        assert result.status == "failed"
        assert "lexicon" in result.message


class TestGlobalScaling:
    def test_selection_sees_standardized_features(self, fixture_env):
        manifest, _, _, lexicon = fixture_env
        cfg = ExperimentConfig("manual", True, False, "fe_knn")
        grid = [ModelSpec("knn", k=1)]
        _, sel = fit_cell_model(manifest, cfg, grid, lexicon, refit_scaler=False)
        # recompute by hand: standardize once, restrict, LOSO without refit
        (train_matrix, y), _ = harness._fe_matrices(manifest, cfg, lexicon)
        scaler = fit_standardizer(train_matrix)
        X_std = apply_standardizer(scaler, train_matrix)
        restricted = X_std.select(sel.feature_indices)
        data = LabeledDataset(restricted, y, train_matrix.ids)
        assert loso_cv(data, sel.spec, refit_scaler=False) == sel.cv_accuracy


class TestNoLeakage:
    def test_dropping_test_rows_changes_nothing(self, fixture_env, tmp_path):
        manifest, manifest_path, _, lexicon = fixture_env
        cfg = ExperimentConfig("manual", True, False, "fe_svm")
        bundle_full, _ = fit_cell_model(manifest, cfg, SMALL_GRID, lexicon)
        train_only = harness.Manifest(
            tuple(s for s in manifest.samples if s.split == "train"), manifest.root
        )
        bundle_train, _ = fit_cell_model(train_only, cfg, SMALL_GRID, lexicon)
        p1, p2 = tmp_path / "full.bin", tmp_path / "train.bin"
        save_model(bundle_full, p1)
        save_model(bundle_train, p2)
        assert p1.read_bytes() == p2.read_bytes()


@pytest.fixture(scope="module")
def results(fixture_env):
    _, manifest_path, lexicon_path, _ = fixture_env
    return run_grid(manifest_path, lexicon_path=lexicon_path, grid=SMALL_GRID)


class TestGridAndReports:
    def test_every_cell_present_once(self, results):
        assert [r.config for r in results] == grid_configs()

    def test_neural_cells_skipped_without_embeddings(self, results):
        nn = [r for r in results if r.config.model == "we_nn"]
        assert len(nn) == 6
        assert all(r.status == "skipped" for r in nn)

    def test_classical_cells_ok(self, results):
        fe = [r for r in results if r.config.model != "we_nn"]
        assert all(r.status == "ok" for r in fe)
        assert not harness.any_hard_failure(results)

    def test_csv_round_trip(self, results):
        text = results_to_csv(results)
        rows = parse_results_csv(text)
        assert len(rows) == 18
        for row, result in zip(rows, results):
            assert row["source"] == result.config.source
            assert row["model"] == result.config.model
            if result.metrics is not None:
                assert row["accuracy"] == result.metrics.accuracy
                assert row["f1"] == result.metrics.f1
            if result.config.pauses:
                assert row["punctuation"] == "-"

    def test_report_table_structure(self, results):
        table = harness.render_table(results)
        lines = table.splitlines()
        assert "Manual transcriptions" in lines[0]
        assert "ASR-based transcriptions" in lines[0]
        # column order mirrors the published table
        header = lines[1]
        positions = [header.index(c) for c in ("N", "Acc", "Precision", "Recall", "F1")]
        assert positions == sorted(positions)
        assert sum(1 for ln in lines if "FE + SVM" in ln) == 3

    def test_emit_report_files(self, results, tmp_path):
        harness.emit_report(results, tmp_path / "out")
        assert (tmp_path / "out" / "results.csv").is_file()
        assert (tmp_path / "out" / "report.txt").is_file()


class TestAsrHook:
    def test_generates_missing_asr_texts(self, tmp_path):
        audio = tmp_path / "rec1.wav"
        audio.write_text("fake audio")
        (tmp_path / "manifest.json").write_text(
            json.dumps(
                {
                    "samples": [
                        {
                            "id": "s1",
                            "group": "AD",
                            "split": "train",
                            "audio": "rec1.wav",
                            "asr_text": "rec1.txt",
                        }
                    ]
                }
            )
        )
        with pytest.raises(ManifestError, match="missing file"):
            load_manifest(tmp_path / "manifest.json")
        manifest = load_manifest(tmp_path / "manifest.json", allow_missing_asr=True)
        harness.run_asr_hook(manifest, "echo transcribed {audio} > {out}")
        assert (tmp_path / "rec1.txt").is_file()
        # idempotent: existing outputs are left alone
        before = (tmp_path / "rec1.txt").read_text()
        harness.run_asr_hook(manifest, "echo SHOULD-NOT-RUN > {out}")
        assert (tmp_path / "rec1.txt").read_text() == before

    def test_hook_without_audio_fails(self, tmp_path):
        (tmp_path / "manifest.json").write_text(
            json.dumps(
                {
                    "samples": [
                        {
                            "id": "s1",
                            "group": "HC",
                            "split": "train",
                            "asr_text": "rec1.txt",
                        }
                    ]
                }
            )
        )
        manifest = load_manifest(tmp_path / "manifest.json", allow_missing_asr=True)
        with pytest.raises(ManifestError, match="no audio"):
            harness.run_asr_hook(manifest, "echo x > {out}")


class TestParallelGrid:
    def test_jobs_two_matches_serial(self, fixture_env, results):
        _, manifest_path, lexicon_path, _ = fixture_env
        parallel = run_grid(
            manifest_path, lexicon_path=lexicon_path, grid=SMALL_GRID, jobs=2
        )
        assert results_to_csv(parallel) == results_to_csv(results)


class TestFixtureGeneration:
    def test_seeded_corpus_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        synthesize_fixture(7, 4, "pause-signal", a, n_test_per_class=2)
        synthesize_fixture(7, 4, "pause-signal", b, n_test_per_class=2)
        assert tree_digest(a) == tree_digest(b)
        c = tmp_path / "c"
        synthesize_fixture(8, 4, "pause-signal", c, n_test_per_class=2)
        assert tree_digest(a) != tree_digest(c)

    def test_pause_signal_separates_mean_pause(self, small_fixture):
        manifest = load_manifest(small_fixture)
        means = {"AD": [], "HC": []}
        for sample in manifest.samples:
            stats = pause_statistics(
                load_word_timestamps(
                    sample.manual_align.read_bytes(), "ctm", sample.audio_duration
                )
            )
            means[sample.group].append(stats.mean_pause)
        assert min(means["AD"]) > max(means["HC"])

    def test_lexical_signal_separates_dictionary(self, tmp_path):
        manifest_path = synthesize_fixture(11, 4, "lexical-signal", tmp_path / "lex")
        manifest = load_manifest(manifest_path)
        lexicon = load_lexicon((tmp_path / "lex" / "lexicon.dic").read_bytes())
        cfg = ExperimentConfig("manual", False, False, "fe_svm")
        vectors = [build_inputs(s, cfg, lexicon) for s in manifest.samples]
        for sample, vec in zip(manifest.samples, vectors):
            if sample.group == "AD":
                assert vec["objects"] > 0 and vec["actions"] == 0
            else:
                assert vec["actions"] > 0 and vec["objects"] == 0

    def test_run_grid_is_deterministic(self, fixture_env, tmp_path):
        _, manifest_path, lexicon_path, _ = fixture_env
        outs = []
        for name in ("o1", "o2"):
            out = tmp_path / name
            run_grid(
                manifest_path, lexicon_path=lexicon_path, grid=SMALL_GRID, out_dir=out
            )
            outs.append((out / "results.csv").read_bytes())
        assert outs[0] == outs[1]
