import numpy as np
import pytest
from hypothesis import strategies as st

from spdmeans.linalg import EigenDecomposition, SpdMatrix
from spdmeans.search import SamplerConfig, random_orthogonal, random_pair, trial_rng

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        passed, line = results[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {line}")


@pytest.fixture
def record_criterion(request):
    """Record one pass/fail line for the acceptance summary."""
    store = request.config.stash[ACCEPTANCE_KEY]

    def record(number, passed, line):
        store[number] = (bool(passed), line)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {line}")

    return record


def spd_from(log_eigs, seed):
    w = np.exp(np.asarray(log_eigs, dtype=float))
    Q = random_orthogonal(len(w), np.random.default_rng(seed))
    return SpdMatrix(EigenDecomposition(w, Q).reconstruct())


@st.composite
def spd_matrices(draw, dim=None, max_log=2.0):
    n = dim if dim is not None else draw(st.integers(1, 5))
    logs = draw(st.lists(st.floats(-max_log, max_log), min_size=n, max_size=n))
    seed = draw(st.integers(0, 2**32 - 1))
    return spd_from(logs, seed)


@st.composite
def spd_pairs(draw, max_log=2.0):
    n = draw(st.integers(1, 5))
    return draw(spd_matrices(n, max_log)), draw(spd_matrices(n, max_log))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def pairs():
    """A fixed batch of moderately conditioned random pairs, dims 2 to 6."""
    config = SamplerConfig(dim_range=(2, 6), cond_range=(1.0, 1e3), seed=11)
    return [random_pair(config, trial_rng(config.seed, i)) for i in range(40)]


def rel_err(X, Y):
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    return float(np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1e-300))
