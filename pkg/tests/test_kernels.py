import os
import subprocess
import sys

import numpy as np
import pytest

from geotransit import _kernels as K
from geotransit.geom import random_arrays


@pytest.mark.parametrize("s", [1.0, 0.5, 0.0, -0.5, -1.0])
def test_jit_matches_numpy(s, rng):
    k2 = -np.sign(s) * s * s
    are, aim = random_arrays(rng, s, 500)
    bre, bim = random_arrays(rng, s, 500)
    c1 = K.bmatmul(are, aim, bre, bim, k2, use_jit=True)
    c2 = K.bmatmul(are, aim, bre, bim, k2, use_jit=False)
    for x, y in zip(c1, c2):
        assert np.abs(x - y).max() < 1e-12 * max(1.0, np.abs(y).max())
    p1 = K.projective4(are, aim, k2, use_jit=True)
    p2 = K.projective4(are, aim, k2, use_jit=False)
    assert np.abs(p1 - p2).max() < 1e-11 * max(1.0, np.abs(p2).max())
    x = rng.normal(size=(500, 4))
    assert np.allclose(K.herm_act(are, aim, k2, x, True), K.herm_act(are, aim, k2, x, False))


def test_disable_flag_switches_backend():
    code = "from geotransit import _kernels as K; print(K.JIT_ENABLED)"
    env = dict(os.environ, GEOTRANSIT_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "False"


def test_numpy_backend_runs_verify():
    env = dict(os.environ, GEOTRANSIT_DISABLE_JIT="1")
    out = subprocess.run([sys.executable, "-m", "geotransit.cli", "verify"], env=env,
                         capture_output=True, text=True)
    assert out.returncode == 0, out.stderr
