import numpy as np
import pytest

from maxconf import StateEnsemble, build_symmetric_ensemble

# one line per acceptance criterion, filled in by test_acceptance and
# printed after the test run (pytest captures stdout at the fd level, so
# ordinary prints would be invisible on passing runs)
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_pure(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density(rng, dim, rank=None):
    """Unit-trace PSD matrix with the given rank (full by default)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    s = g @ g.conj().T
    return s / np.trace(s).real


def random_ensemble(rng, dim, n_states, mixed=True):
    priors = rng.dirichlet(np.ones(n_states))
    if mixed:
        states = [random_density(rng, dim) for _ in range(n_states)]
    else:
        states = [np.outer(v, v.conj()) for v in (random_pure(rng, dim) for _ in range(n_states))]
    return StateEnsemble(dim=dim, priors=tuple(priors), states=tuple(states))


def random_coefficients(rng, dim, floor=0.05):
    """Normalized coefficient vector with every |c_l| >= floor."""
    while True:
        c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        c /= np.linalg.norm(c)
        if np.min(np.abs(c)) >= floor:
            return c


@pytest.fixture
def trine():
    # three equiangular pure qubit states, the standard symmetric ensemble
    return build_symmetric_ensemble(np.array([1.0, 1.0]) / np.sqrt(2.0), 3)
