"""Shared pytest configuration: per-criterion acceptance summary."""

import pytest

_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        detail = dict(item.user_properties).get("detail", "")
        prev = _ACCEPTANCE.get(number)
        passed = not failed and (prev is None or prev[1])
        _ACCEPTANCE[number] = (title, passed, detail if detail else (prev[2] if prev else ""))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance checks")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, passed, detail = _ACCEPTANCE[number]
        line = f"{'PASS' if passed else 'FAIL'}  {number:2d}. {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
