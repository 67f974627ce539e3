from pathlib import Path

import pytest

from restart_reasoner.corpus import CorpusParams, generate_labeled
from restart_reasoner.level import load_level

FIXTURES = Path(__file__).parent / "fixtures"
CONFIGS = Path(__file__).parent / "configs"


def fixture_level(name, **kwargs):
    return load_level(FIXTURES / f"{name}.json", **kwargs)


@pytest.fixture(scope="session")
def small_corpus():
    return generate_labeled(CorpusParams(count=24), seed=42)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
