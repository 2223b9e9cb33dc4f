from pathlib import Path

import pytest

from dsk.fixture import synthesize_fixture

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def sample_lexicon_path() -> Path:
    return DATA_DIR / "sample.dic"


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return DATA_DIR / "chat_golden"


@pytest.fixture(scope="session")
def pause_fixture(tmp_path_factory):
    """Seed-7 pause-signal corpus: 20+20 train, 10+10 test."""
    root = tmp_path_factory.mktemp("pause_fixture")
    manifest = synthesize_fixture(7, 20, "pause-signal", root, n_test_per_class=10)
    return manifest


@pytest.fixture(scope="session")
def small_fixture(tmp_path_factory):
    """Small pause-signal corpus for fast structural tests."""
    root = tmp_path_factory.mktemp("small_fixture")
    manifest = synthesize_fixture(3, 5, "pause-signal", root, n_test_per_class=3)
    return manifest
