from pathlib import Path

import pytest

from ilc.frontend import parse

PROGRAMS = Path(__file__).resolve().parents[1] / "programs"


def load(name: str):
    return parse((PROGRAMS / f"{name}.il").read_text()).term


@pytest.fixture
def fig1a():
    return load("fig1a")


@pytest.fixture
def fig1b():
    return load("fig1b")


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record():
    def _record(criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE[criterion] = line
        print(line)

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
