import pytest

_ACCEPTANCE: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): an acceptance criterion; summarized at the end of the run")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m:
            _ACCEPTANCE.setdefault(m.args[0], [])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m and (rep.when == "call" or rep.failed):
        _ACCEPTANCE[m.args[0]].append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, results in _ACCEPTANCE.items():
        verdict = "PASS" if results and all(results) else ("NOT RUN" if not results else "FAIL")
        terminalreporter.write_line(f"{verdict:7} {label}")
