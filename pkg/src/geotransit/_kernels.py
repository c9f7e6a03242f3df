"""Batch kernels for 2x2 matrices over B_s.

Every kernel has a compiled loop version and a vectorised numpy version.
The loop versions are compiled with numba unless the environment variable
``GEOTRANSIT_DISABLE_JIT`` is set to a true value (or numba is missing),
in which case the numpy versions are used.  Both produce the same numbers
to rounding.

Arrays follow one layout throughout: a batch of matrices over B_s is a pair
``(re, im)`` of float64 arrays of shape ``(n, 2, 2)`` and the algebra enters
only through ``k2 = kappa_s**2``.
"""
import os

import numpy as np

_FLAG = os.environ.get("GEOTRANSIT_DISABLE_JIT", "").strip().lower()
_WANT_JIT = _FLAG in ("", "0", "false", "no", "off")

try:
    if not _WANT_JIT:
        raise ImportError
    from numba import njit
    JIT_ENABLED = True
except ImportError:
    JIT_ENABLED = False

    def njit(func=None, **kwargs):
        if func is not None:
            return func

        def wrapper(f):
            return f

        return wrapper


# --------------------------------------------------------------------------
# loop kernels (compiled when numba is active)

@njit(cache=True)
def _bmatmul_loop(are, aim, bre, bim, k2):
    n = are.shape[0]
    cre = np.empty((n, 2, 2))
    cim = np.empty((n, 2, 2))
    for k in range(n):
        for i in range(2):
            for j in range(2):
                sr = 0.0
                si = 0.0
                for m in range(2):
                    ar = are[k, i, m]
                    ai = aim[k, i, m]
                    br = bre[k, m, j]
                    bi = bim[k, m, j]
                    sr += ar * br + k2 * ai * bi
                    si += ar * bi + ai * br
                cre[k, i, j] = sr
                cim[k, i, j] = si
    return cre, cim


@njit(cache=True)
def _proj4_loop(are, aim, k2):
    n = are.shape[0]
    out = np.empty((n, 4, 4))
    xr = np.zeros((2, 2))
    xi = np.zeros((2, 2))
    mr = np.zeros((2, 2))
    mi = np.zeros((2, 2))
    for k in range(n):
        p00 = are[k, 0, 0]
        p01 = are[k, 0, 1]
        p10 = are[k, 1, 0]
        p11 = are[k, 1, 1]
        q00 = aim[k, 0, 0]
        q01 = aim[k, 0, 1]
        q10 = aim[k, 1, 0]
        q11 = aim[k, 1, 1]
        for col in range(4):
            xr[:, :] = 0.0
            xi[:, :] = 0.0
            if col == 0:
                xr[0, 0] = 1.0
                xr[1, 1] = 1.0
            elif col == 1:
                xr[0, 0] = 1.0
                xr[1, 1] = -1.0
            elif col == 2:
                xr[0, 1] = 1.0
                xr[1, 0] = 1.0
            else:
                xi[0, 1] = -1.0
                xi[1, 0] = 1.0
            # M = A X
            for i in range(2):
                pi0 = p00 if i == 0 else p10
                pi1 = p01 if i == 0 else p11
                qi0 = q00 if i == 0 else q10
                qi1 = q01 if i == 0 else q11
                for j in range(2):
                    mr[i, j] = (pi0 * xr[0, j] + pi1 * xr[1, j]
                                + k2 * (qi0 * xi[0, j] + qi1 * xi[1, j]))
                    mi[i, j] = (pi0 * xi[0, j] + pi1 * xi[1, j]
                                + qi0 * xr[0, j] + qi1 * xr[1, j])
            # Y = M A^*, A^* = P^T - kappa Q^T
            y00 = mr[0, 0] * p00 + mr[0, 1] * p01 - k2 * (mi[0, 0] * q00 + mi[0, 1] * q01)
            y11 = mr[1, 0] * p10 + mr[1, 1] * p11 - k2 * (mi[1, 0] * q10 + mi[1, 1] * q11)
            y10 = mr[1, 0] * p00 + mr[1, 1] * p01 - k2 * (mi[1, 0] * q00 + mi[1, 1] * q01)
            yi10 = mi[1, 0] * p00 + mi[1, 1] * p01 - (mr[1, 0] * q00 + mr[1, 1] * q01)
            out[k, 0, col] = 0.5 * (y00 + y11)
            out[k, 1, col] = 0.5 * (y00 - y11)
            out[k, 2, col] = y10
            out[k, 3, col] = yi10
    return out


# --------------------------------------------------------------------------
# numpy kernels

def _bmatmul_numpy(are, aim, bre, bim, k2):
    cre = are @ bre + k2 * (aim @ bim)
    cim = are @ bim + aim @ bre
    return cre, cim


_BASIS_RE = np.array([
    [[1.0, 0.0], [0.0, 1.0]],
    [[1.0, 0.0], [0.0, -1.0]],
    [[0.0, 1.0], [1.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0]],
])
_BASIS_IM = np.array([
    [[0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0]],
    [[0.0, 0.0], [0.0, 0.0]],
    [[0.0, -1.0], [1.0, 0.0]],
])


def _proj4_numpy(are, aim, k2):
    p = are[:, None]
    q = aim[:, None]
    pt = np.swapaxes(p, -1, -2)
    qt = np.swapaxes(q, -1, -2)
    mr = p @ _BASIS_RE + k2 * (q @ _BASIS_IM)
    mi = p @ _BASIS_IM + q @ _BASIS_RE
    yr = mr @ pt - k2 * (mi @ qt)
    yi = mi @ pt - mr @ qt
    out = np.empty((are.shape[0], 4, 4))
    out[:, 0, :] = 0.5 * (yr[..., 0, 0] + yr[..., 1, 1])
    out[:, 1, :] = 0.5 * (yr[..., 0, 0] - yr[..., 1, 1])
    out[:, 2, :] = yr[..., 1, 0]
    out[:, 3, :] = yi[..., 1, 0]
    return out


# --------------------------------------------------------------------------
# dispatch

def _prep(*arrs):
    return tuple(np.ascontiguousarray(a, dtype=np.float64) for a in arrs)


def bmatmul(are, aim, bre, bim, k2, use_jit=None):
    """Batched product of matrices over B_s, shapes (n, 2, 2)."""
    are, aim, bre, bim = _prep(are, aim, bre, bim)
    jit = JIT_ENABLED if use_jit is None else (use_jit and JIT_ENABLED)
    if jit:
        return _bmatmul_loop(are, aim, bre, bim, float(k2))
    return _bmatmul_numpy(are, aim, bre, bim, float(k2))


def projective4(are, aim, k2, use_jit=None):
    """Batched 4x4 matrices of X -> A X A^* in Hermitian coordinates."""
    are, aim = _prep(are, aim)
    jit = JIT_ENABLED if use_jit is None else (use_jit and JIT_ENABLED)
    if jit:
        return _proj4_loop(are, aim, float(k2))
    return _proj4_numpy(are, aim, float(k2))


def herm_act(are, aim, k2, x, use_jit=None):
    """Batched action on coordinate vectors x of shape (n, 4)."""
    m = projective4(are, aim, k2, use_jit=use_jit)
    return np.einsum("nij,nj->ni", m, np.asarray(x, dtype=np.float64))
