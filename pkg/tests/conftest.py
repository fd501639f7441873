from __future__ import annotations

import pytest

from multistage_gt import PoolMatrix, compute_params, generate_matrix

_ACCEPTANCE: list[tuple[int, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE.append((number, title, status, report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, duration in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} ({duration:.1f}s)")


def identity_matrix(t: int, s: int = 2) -> PoolMatrix:
    return PoolMatrix.from_columns(["".join("1" if i == j else "0" for i in range(t)) for j in range(t)], s=s)


@pytest.fixture(scope="session")
def matrix_64_s2():
    return generate_matrix(compute_params(64, 2))


@pytest.fixture(scope="session")
def matrix_64_s3():
    return generate_matrix(compute_params(64, 3))
