import pytest

_ACCEPTANCE = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion under ``label``."""
    def record(label):
        _ACCEPTANCE[request.node.nodeid] = label
    return record


def pytest_runtest_logreport(report):
    if report.when == "call" and report.nodeid in _ACCEPTANCE:
        label = _ACCEPTANCE[report.nodeid]
        _ACCEPTANCE[report.nodeid] = (label, report.passed, report.duration)


def pytest_terminal_summary(terminalreporter):
    rows = [v for v in _ACCEPTANCE.values() if isinstance(v, tuple)]
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, duration in sorted(rows):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  ({duration:.1f}s)")
