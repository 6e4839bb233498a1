from __future__ import annotations

import logging

import pytest

RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture(autouse=True)
def _quiet_domain_warnings():
    logging.getLogger("abplan.domain").setLevel(logging.ERROR)
    yield


def record(criterion: str, ok: bool, detail: str = "") -> None:
    RESULTS[criterion] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(RESULTS, key=lambda k: int(k.split()[0])):
        ok, detail = RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
