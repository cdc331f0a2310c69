import pytest

from cvlab.geom import build_round_sphere, curvature_pack


@pytest.fixture(scope="session")
def s3_coarse():
    """Round S^3 on a 16^3 grid with its curvature pack."""
    chart, g = build_round_sphere(3, 1.0, 16)
    return chart, g, curvature_pack(g)


@pytest.fixture(scope="session")
def s3_medium():
    chart, g = build_round_sphere(3, 1.0, 24)
    return chart, g, curvature_pack(g)


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
