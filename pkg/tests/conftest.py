import numpy as np
import pytest

from rankdistort import DesignMatrix, compute_hat_matrix, equispaced, polynomial_design


def poly_hat(n, degree, a=0.0, b=1.0):
    return compute_hat_matrix(polynomial_design(equispaced(n, a, b), degree))


def random_design(rng, n, p, intercept=True):
    cols = rng.standard_normal((n, p))
    if intercept:
        cols[:, 0] = 1.0
    return DesignMatrix(cols)


def normal_equations_hat(d):
    """Independent oracle: H from the normal equations."""
    d = np.asarray(d, dtype=float)
    return d @ np.linalg.solve(d.T @ d, d.T)


def design_battery(count=20, seed=2012):
    """Random tie-free designs with n <= 12 and p <= 4."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        n = int(rng.integers(5, 13))
        p = int(rng.integers(1, 5))
        d = random_design(rng, n, p, intercept=bool(rng.integers(0, 2)))
        out.append(d)
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20120201)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    if call.when == "call" and outcome.get_result().failed:
        item._failed = True
