from __future__ import annotations

from importlib import resources as importlib_resources
from pathlib import Path

import pytest

from kmorph.link import compile_lexicon
from kmorph.resources import load_resources


def toy_dir() -> Path:
    return Path(str(importlib_resources.files("kmorph") / "data" / "toy"))


@pytest.fixture(scope="session")
def toy_path() -> Path:
    return toy_dir()


@pytest.fixture(scope="session")
def toy():
    return load_resources(toy_dir())


@pytest.fixture(scope="session")
def toy_lex(toy):
    return compile_lexicon(toy)


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
