from hypothesis import settings
import pytest

# Same examples on every run, so failures and timings reproduce.
settings.register_profile("repo", derandomize=True)
settings.load_profile("repo")

_outcomes = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed and not rep.skipped):
        return
    number, title = mark.args
    if rep.when == "call" or number not in _outcomes:
        _outcomes[number] = (title, rep.outcome, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, outcome, secs = _outcomes[number]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({secs:.1f}s)")
