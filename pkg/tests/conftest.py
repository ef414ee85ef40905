import math

import numpy as np
import pytest

from gausschan.channel import GaussianChannel
from gausschan.symplectic2 import det2, rotation_matrix, squeeze_matrix


def random_physical_channel(rng, scale=3.0):
    """Rejection-sample (X, Y) with entries in [-scale, scale] until physical and full rank."""
    while True:
        X = rng.uniform(-scale, scale, (2, 2))
        A = rng.uniform(-scale, scale, (2, 2))
        Y = A @ A.T / scale
        tau = det2(X)
        y = math.sqrt(det2(Y))
        if np.max(np.abs(Y)) <= scale and y >= abs(tau - 1) / 2 and abs(tau) > 1e-6 and y > 1e-6:
            return GaussianChannel(X, Y)


def random_symplectic(rng, smax=1.0):
    return rotation_matrix(rng.uniform(-math.pi, math.pi)) @ squeeze_matrix(rng.uniform(-smax, smax)) @ rotation_matrix(
        rng.uniform(-math.pi, math.pi)
    )


def random_fiducial_params(rng, tau_range=(-2.5, 2.5), smax=0.8):
    tau = rng.uniform(*tau_range)
    y = abs(tau - 1) / 2 + rng.exponential(0.5)
    return tau, y, rng.uniform(-smax, smax)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {line}")
