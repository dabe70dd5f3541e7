"""Shared fixtures and the per-criterion summary printed after the run."""

from __future__ import annotations

import pytest

from sparsesums import make_field_ctx

ACCEPTANCE_LINES: list[str] = []

_CTX_CACHE: dict = {}


def ctx_for(p: int):
    if p not in _CTX_CACHE:
        _CTX_CACHE[p] = make_field_ctx(p)
    return _CTX_CACHE[p]


@pytest.fixture
def ctx13():
    return ctx_for(13)


@pytest.fixture
def ctx31():
    return ctx_for(31)


@pytest.fixture
def ctx101():
    return ctx_for(101)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
