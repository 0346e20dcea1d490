import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_terms(rng, m, k, scale=1.0):
    from tagsurface.optimizer import ElementTerms

    y0 = complex(rng.standard_normal(), rng.standard_normal())
    table = scale * (rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k)))
    return ElementTerms(y0, table)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
