"""Closed-form exp/log for traceless 2x2 matrices (real or complex) and
small helpers on SL(2) lifts shared by the solvers.
"""
import numpy as np

from .errors import ContractError

I2 = np.eye(2)
# basis of sl(2, R): H, E, F
SL2_BASIS = np.array([
    [[1.0, 0.0], [0.0, -1.0]],
    [[0.0, 1.0], [0.0, 0.0]],
    [[0.0, 0.0], [1.0, 0.0]],
])


def sl2_vec(X):
    X = np.asarray(X)
    return np.array([X[0, 0], X[0, 1], X[1, 0]])


def sl2_mat(v):
    return np.tensordot(np.asarray(v), SL2_BASIS, axes=1)


def _cosh_sinhc(delta):
    """(cosh r, sinh r / r) with r = sqrt(delta), analytic in delta."""
    if abs(delta) < 1e-6:
        c = 1 + delta / 2 + delta ** 2 / 24 + delta ** 3 / 720
        sh = 1 + delta / 6 + delta ** 2 / 120 + delta ** 3 / 5040
        return c, sh
    r = np.emath.sqrt(delta)
    return np.cosh(r), np.sinh(r) / r


def expm_sl2(X):
    """exp of a traceless 2x2: X^2 = delta I with delta = -det X."""
    X = np.asarray(X)
    delta = -(X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0])
    c, sh = _cosh_sinhc(delta)
    out = c * I2 + sh * X
    if np.isrealobj(X):
        return np.real(out)
    return out


def logm_sl2(g):
    """Principal log of g in SL(2); defined away from tr g = -2."""
    g = np.asarray(g)
    d = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(d - 1) > 1e-8:
        raise ContractError("logm_sl2 expects determinant 1")
    half = 0.5 * (g[0, 0] + g[1, 1])
    if abs(half + 1) < 1e-10:
        raise ContractError("log is not defined near -I")
    if abs(half - 1) < 1e-6:
        # r ~ sqrt(2 (half - 1)); sinh(r)/r from the series
        delta = 2 * (half - 1) - (half - 1) ** 2 / 3
        _, sh = _cosh_sinhc(delta)
        out = (g - half * I2) / sh
    else:
        r = np.arccosh(half + 0j)
        out = (g - half * I2) * (r / np.sinh(r))
    if np.isrealobj(g) and np.abs(np.imag(out)).max() < 1e-12:
        return np.real(out)
    return out


def sl_normalize(M):
    """Scale a 2x2 to determinant 1 (principal square root)."""
    M = np.asarray(M)
    d = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if np.isrealobj(M):
        if d <= 0:
            raise ContractError("real matrix with det <= 0 has no SL(2, R) scaling")
        return M / np.sqrt(d)
    return M / np.sqrt(d + 0j)


def inv2(M):
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / (
        M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
