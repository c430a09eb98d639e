import numpy as np
import pytest

from skplane import kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure compute, not compile."""
    win = np.array([[1.0, 2.0, 4.0, 0.5, 3.0]])
    kernels.batch_moments(win, np.array([5]))
