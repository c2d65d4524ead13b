"""Per-criterion PASS/FAIL summary for tests marked ``criterion(n, title)``."""
import pytest

_OUTCOMES: dict = {}
_TITLES: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    _TITLES[n] = title
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _OUTCOMES.setdefault(n, []).append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _TITLES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_TITLES):
        results = _OUTCOMES.get(n, [])
        failed = [name for name, o in results if o != "passed"]
        if not results:
            status, note = "FAIL", " (not run)"
        elif failed:
            status, note = "FAIL", f" ({', '.join(failed)})"
        else:
            status, note = "PASS", f" ({len(results)} tests)"
        terminalreporter.write_line(f"{status} criterion {n}: {_TITLES[n]}{note}")
