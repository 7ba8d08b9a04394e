import numpy as np
import pytest

from hilbert_dyn import kernels
from hilbert_dyn._accel import HAS_NUMBA

pytestmark = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def _pairs(rng, n, dim):
    X = rng.uniform(-0.5, 0.5, (n, dim))
    return X, X + rng.normal(0, 0.2, (n, dim))


def test_slack_interval_parity():
    rng = np.random.default_rng(0)
    for _ in range(5):
        A = rng.normal(size=(7, 3))
        A /= np.linalg.norm(A, axis=1)[:, None]
        X, Y = _pairs(rng, 200, 3)
        SX, SY = 1.0 - X @ A.T, 1.0 - Y @ A.T
        for a, b in zip(kernels.slack_intervals_numpy(SX, SY), kernels.slack_intervals_jit(SX, SY)):
            np.testing.assert_allclose(a, b, rtol=1e-13)


def test_quadric_interval_parity():
    rng = np.random.default_rng(1)
    Q = np.array([[2.0, 0.3], [0.3, 1.0]])
    c = np.array([0.1, -0.2])
    X, Y = _pairs(rng, 300, 2)
    X, Y = 0.3 * X + c, 0.3 * Y + c
    for a, b in zip(kernels.quadric_intervals_numpy(X, Y, c, Q), kernels.quadric_intervals_jit(X, Y, c, Q)):
        np.testing.assert_allclose(a, b, rtol=1e-13)


def test_simplex_spread_parity():
    rng = np.random.default_rng(2)
    X, Y = rng.dirichlet(np.ones(4), 500), rng.dirichlet(np.ones(4), 500)
    np.testing.assert_allclose(kernels.simplex_spread_numpy(X, Y), kernels.simplex_spread_jit(X, Y), rtol=1e-14)


def test_fallback_selected_by_env(monkeypatch):
    import importlib

    from hilbert_dyn import _accel

    monkeypatch.setenv("HILBERT_DYN_DISABLE_NUMBA", "1")
    try:
        assert importlib.reload(_accel).USE_NUMBA is False
        assert importlib.reload(kernels).slack_intervals is kernels.slack_intervals_numpy
    finally:
        monkeypatch.delenv("HILBERT_DYN_DISABLE_NUMBA")
        importlib.reload(_accel)
        importlib.reload(kernels)
