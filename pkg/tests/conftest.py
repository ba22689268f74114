import pytest

_VERDICTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        cid, title = marker.args
        _VERDICTS[cid] = (title, "PASS" if report.passed else "FAIL", report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")

    def key(cid):
        num = "".join(c for c in cid if c.isdigit())
        return int(num), cid

    for cid in sorted(_VERDICTS, key=key):
        title, verdict, secs = _VERDICTS[cid]
        terminalreporter.write_line(f"criterion {cid:<3} {verdict}  ({secs:6.1f}s)  {title}")
