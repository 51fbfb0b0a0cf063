import pytest

from partlim.limitlaw import density_grid, vstar_grid

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def grid2():
    return density_grid(2, 8192, 40)


@pytest.fixture(scope="session")
def vgrid2():
    return vstar_grid(2, 8192, 40)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
