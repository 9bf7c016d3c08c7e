# tests/conftest.py

from pathlib import Path
from tempfile import TemporaryDirectory

import pytest

from app.session import TraceSession
from app.system_file import load_system
from app.trace_config import TraceConfig

CORPUS_DIR = Path(__file__).resolve().parent.parent / "corpus"
GOLDEN_DIR = CORPUS_DIR / "golden"


def corpus_path(name: str) -> Path:
    return CORPUS_DIR / f"{name}.sys"


@pytest.fixture
def running_nd():
    return load_system(corpus_path("running-nd"))


@pytest.fixture
def running_prob():
    return load_system(corpus_path("running-prob"))


@pytest.fixture
def peano():
    return load_system(corpus_path("peano-cfg"))


@pytest.fixture
def classic():
    return load_system(corpus_path("classic"))


@pytest.fixture
def lift_trio():
    return load_system(corpus_path("lift-trio"))


@pytest.fixture
def config():
    with TemporaryDirectory() as temp_dir:
        yield TraceConfig(base_dir=Path(temp_dir), law_samples=20)


@pytest.fixture
def session(config):
    yield TraceSession(config=config)
