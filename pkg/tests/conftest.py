"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import time
from collections import defaultdict

import pytest

_outcomes: dict[str, list[str]] = defaultdict(list)
_durations: dict[str, float] = defaultdict(float)
_blocked: dict[str, str] = {}

PROPERTY_MARK = "property_suite"


def pytest_configure(config):
    config.addinivalue_line("markers", f"{PROPERTY_MARK}: randomized property suite (criterion 5)")


def pytest_collection_modifyitems(items):
    # tag every criterion-5 property test outside the acceptance module so it can be run as one group
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker and marker.args[0].startswith("5.") and item.module.__name__ != "test_acceptance":
            item.add_marker(PROPERTY_MARK)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _outcomes[name].append(report.outcome)
        _durations[name] += report.duration
    elif report.when == "setup" and report.skipped:
        _outcomes[name].append("skipped")
        _blocked[name] = str(report.longrepr[-1]) if isinstance(report.longrepr, tuple) else "skipped"


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_outcomes):
        results = _outcomes[name]
        if "failed" in results:
            status = "FAIL"
        elif all(r == "skipped" for r in results):
            status = "BLOCKED"
        else:
            status = "PASS"
        line = f"criterion {name:<34} {status:<8} ({len(results)} test(s), {_durations[name]:.1f}s)"
        if status == "BLOCKED":
            line += f"  {_blocked.get(name, '')}"
        terminalreporter.write_line(line)
