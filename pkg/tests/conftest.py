import sys
from functools import lru_cache
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
sys.path.insert(0, str(Path(__file__).resolve().parent))

ACCEPTANCE_LINES = []


@lru_cache(maxsize=None)
def load(name):
    from overlapgifs.config import parse_config
    return parse_config(CONFIGS / f"{name}.json")


@lru_cache(maxsize=None)
def pipeline(name, stages=("dim",)):
    from overlapgifs.cli import run_pipeline
    return run_pipeline(load(name), stages)


@pytest.fixture
def golden():
    return load("golden_triangle")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
