from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

# criterion number -> [label, passed, detail]
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion")


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture
def report(request):
    """Attach a measured-value description to the running criterion."""
    marker = request.node.get_closest_marker("criterion")

    def record(detail):
        _CRITERIA[marker.args[0]][2] = detail

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, label = marker.args
    entry = _CRITERIA.setdefault(number, [label, None, ""])
    if rep.when == "setup" and rep.failed:
        entry[1] = False
        entry[2] = "setup error: " + (call.excinfo.exconly().splitlines()[0][:200] if call.excinfo else "")
    elif rep.when == "call":
        entry[1] = rep.passed
        if rep.failed and not entry[2]:
            entry[2] = call.excinfo.exconly().splitlines()[0][:200] if call.excinfo else "failed"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, passed, detail = _CRITERIA[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{status} criterion {number:>2} {label}: {detail}")
