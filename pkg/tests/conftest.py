import numpy as np
import pytest

from convalg import graph


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_symmetric_system(rng, n, lo=-1.0, hi=1.0):
    s = rng.uniform(lo, hi, size=(n, n))
    s = (s + s.T) / 2.0
    return graph.build_shift(graph.Graph(n), "custom", custom=s)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
