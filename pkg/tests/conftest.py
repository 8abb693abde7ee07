"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import time
from collections import defaultdict

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_CRITERIA: dict[int, dict] = defaultdict(lambda: {"title": "", "outcomes": [], "seconds": 0.0})


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("call_seconds", time.perf_counter() - start))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when != "call" and not (rep.when == "setup" and rep.outcome != "passed"):
        return
    number, title = mark.args
    entry = _CRITERIA[number]
    entry["title"] = title
    seconds = dict(item.user_properties).get("call_seconds", 0.0)
    entry["seconds"] += seconds
    if hasattr(rep, "wasxfail"):
        entry["outcomes"].append(("FAIL", f"{item.name}: expected failure ({rep.wasxfail})"))
    elif rep.passed:
        entry["outcomes"].append(("PASS", item.name))
    else:
        entry["outcomes"].append(("FAIL", item.name))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        failed = [note for status, note in entry["outcomes"] if status == "FAIL"]
        status = "FAIL" if failed else "PASS"
        line = f"criterion {number:2d} {status}  {entry['title']}  ({entry['seconds']:.1f} s)"
        tr.write_line(line)
        for note in failed:
            tr.write_line(f"    {note}")
