import pytest

_CRITERIA = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CRITERIA] = []


@pytest.fixture
def criterion(request):
    """Record an acceptance criterion outcome for the end-of-run summary."""
    log = request.config.stash[_CRITERIA]

    def record(label: str, ok: bool, detail: str = "") -> bool:
        log.append((label, bool(ok), detail))
        return bool(ok)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash[_CRITERIA]
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in log:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}".rstrip())
