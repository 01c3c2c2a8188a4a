import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_CRITERIA: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def criterion():
    """Record one acceptance line; returns ``ok`` so callers can assert on it."""

    def report(number: int, name: str, ok: bool, detail: str) -> bool:
        _CRITERIA.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_CRITERIA, key=lambda s: int(s.split(".")[0].split()[-1])):
            terminalreporter.write_line(line)
