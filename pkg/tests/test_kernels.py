import numpy as np
import pytest

from conftest import inside_w
from ruledform import kernels
from ruledform import _kernels_py


def _inputs(family, rng, n=200):
    s = rng.uniform(-2, 2, n)
    d, ds, dss = family.evaluate_many(s)
    theta = rng.uniform(0, 2 * np.pi, n)
    w = inside_w(family.cfg, rng, n)
    w[::17] = 0
    cfg = family.cfg
    return d, ds, dss, theta, w, cfg.epsilon, cfg.epsilon_tilde, cfg.r


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_backends_agree(family, rng):
    if kernels.BACKEND != "cython":
        pytest.skip("compiled extension not built")
    args = _inputs(family, rng)
    fast = kernels.frame_batch(*args)
    slow = _kernels_py.frame_batch(*args)
    for a, b in zip(fast, slow):
        assert a.shape == b.shape
        np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-13, equal_nan=True)


def test_fallback_outputs(family, rng):
    z, R, e, sigma, rho, b, alpha, beta = kernels.python_frame_batch(*_inputs(family, rng, 10))
    assert z.shape == (10, 3) and sigma.shape == (10,)
    assert np.all(rho[np.isfinite(sigma)] > 0)


def test_empty_batch(family):
    cfg = family.cfg
    empty = np.zeros((0, 3), complex)
    out = kernels.frame_batch(empty, empty, empty, np.zeros(0), np.zeros(0, complex),
                              cfg.epsilon, cfg.epsilon_tilde, cfg.r)
    assert all(len(x) == 0 for x in out)


def test_forced_fallback_runs_suite():
    import os
    import subprocess
    import sys

    code = ("import ruledform, ruledform.verify as v; assert ruledform.BACKEND == 'python'; "
            "r = v.run_suite(v.default_families()[:2], v.FdConfig(samples=10)); assert r.ok")
    env = dict(os.environ, RULEDFORM_BACKEND="python")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
