import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n, title = int(m.group(1)), m.group(2).replace("_", " ")
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _results[n] = ("PASS" if report.passed else "FAIL", title)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        verdict, title = _results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {title}")
