import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from wavecut.netgraph import build_preset  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion number and summary")


@pytest.fixture
def nested():
    return build_preset("nested")


@pytest.fixture
def simple():
    return build_preset("simple")


@pytest.fixture
def double_nested():
    return build_preset("double_nested")


_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, text = marker.args
    if report.when == "call" or (report.when == "setup" and report.failed):
        prev = _results.get(n, (text, True))
        _results[n] = (text, prev[1] and report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        text, ok = _results[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {text}")
