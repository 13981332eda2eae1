import pytest

# Criterion label -> True while every test carrying it has passed.
_criteria: dict[str, bool] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(name): acceptance criterion this test verifies"
    )


def _record(name: str, ok: bool) -> None:
    _criteria[name] = _criteria.get(name, True) and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _record(name, report.passed)
    elif not report.passed:
        _record(name, False)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok in _criteria.items():
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[PRIMARY] {name}: {status}")
