import numpy as np
import pytest

from allencahn.grid import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid2():
    return GridSpec.box((32, 32))


@pytest.fixture
def grid3():
    return GridSpec.box((12, 12, 12))


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report(capsys):
    """Record one pass/fail line per acceptance criterion and echo it live."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"CRITERION {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
