import pytest

from p4lab.fastpath import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_numba():
    # Compile the fast kernels once so per-test timings reflect steady state.
    warm_up()
