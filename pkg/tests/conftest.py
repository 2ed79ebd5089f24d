import pytest

from hosc import dts_catalog, kernels


def pytest_sessionstart(session):
    problems = dts_catalog.verify_catalog()
    if problems:
        raise pytest.UsageError(f"embedded catalog failed validation: {problems}")


def pytest_report_header(config):
    return f"hosc kernel backend: {kernels.BACKEND}"


def backends():
    names = ["python"]
    try:
        kernels.backend("cython")
        names.append("cython")
    except ImportError:
        pass
    return names


ACCEPTANCE: dict[int, str] = {}


def record(number: int, line: str) -> None:
    ACCEPTANCE[number] = line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
