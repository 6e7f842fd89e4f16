from pathlib import Path

import pytest

from epc.speclang import Spec

CORPUS = Path(__file__).resolve().parents[1] / "src" / "epc" / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def listing():
    cache = {}

    def load(n: int) -> Spec:
        if n not in cache:
            cache[n] = Spec.from_path(CORPUS / f"listing{n}.eps")
        return cache[n]

    return load


# -- acceptance report ---------------------------------------------------------

_ACCEPTANCE: dict = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion.

    ``acceptance(n, ok, detail)`` prints the line immediately (visible with
    ``-s``) and again in the terminal summary, ordered by criterion number.
    """

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
