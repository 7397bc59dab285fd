from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


# {{{ acceptance report

_ACCEPTANCE: list[str] = []


class AcceptanceReport:
    def __call__(self, criterion: int, ok: bool, detail: str) -> None:
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line


@pytest.fixture
def report() -> AcceptanceReport:
    """Record one pass/fail line for an acceptance criterion and assert it."""
    return AcceptanceReport()


def pytest_terminal_summary(terminalreporter: pytest.TerminalReporter) -> None:
    if not _ACCEPTANCE:
        return

    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


# }}}
