import pytest

_LINES = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_LINES] = {}
    config.addinivalue_line("markers", "criterion(number): acceptance criterion covered by the test")


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for the acceptance criterion of the calling test."""
    number = request.node.get_closest_marker("criterion").args[0]

    def record(ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config.stash[_LINES][number] = line
        print(line)
        return ok

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker and report.when == "call" and report.failed:
        lines = item.config.stash[_LINES]
        number = marker.args[0]
        if number not in lines:
            lines[number] = f"criterion {number:2d}: FAIL  raised {call.excinfo.typename}"


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_LINES]
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
