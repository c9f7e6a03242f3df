"""Half-pipe structure: product coordinates (X, L), fibers and the
semidirect decomposition (A, a) -> A + A a sigma of PSL(2, R + R sigma).
"""
from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraTag
from .errors import ContractError, NotInterior
from .geom import INTERIOR, GroupElem, ModelPoint, classify_point

B0 = AlgebraTag(0.0)
J = np.array([[0.0, -1.0], [1.0, 0.0]])
ROT_GENERATOR = 0.5 * J


def sqrtm_pd(X):
    """Principal square root of a positive-definite symmetric 2x2."""
    X = np.asarray(X, dtype=float)
    if abs(X[0, 1] - X[1, 0]) > 1e-12 * max(1.0, np.abs(X).max()):
        raise ContractError("matrix is not symmetric")
    d = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
    tr = X[0, 0] + X[1, 1]
    if d <= 0 or tr <= 0:
        raise NotInterior("matrix is not positive definite")
    sd = np.sqrt(d)
    return (X + sd * np.eye(2)) / np.sqrt(tr + 2.0 * sd)


def normalize_base(X):
    X = np.asarray(X, dtype=float)
    d = X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0]
    if d <= 0 or X[0, 0] + X[1, 1] <= 0:
        raise NotInterior("base point is not positive definite")
    return X / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class HPPoint:
    base: np.ndarray
    L: float

    @classmethod
    def of(cls, base, L):
        b = normalize_base(base)
        b = 0.5 * (b + b.T)
        b.setflags(write=False)
        return cls(b, float(L))

    def to_json(self):
        return {"base": self.base.tolist(), "L": self.L}


@dataclass(frozen=True, eq=False)
class HPIsometry:
    finite: np.ndarray
    inf: np.ndarray

    @classmethod
    def of(cls, finite, inf):
        A = np.array(finite, dtype=float)
        a = np.array(inf, dtype=float)
        if abs(np.trace(a)) > 1e-12 * max(1.0, np.abs(a).max()):
            raise ContractError("infinitesimal part must be traceless")
        d = np.linalg.det(A)
        if abs(d) < 1e-300:
            raise ContractError("finite part is singular")
        A = A / np.sqrt(abs(d))
        return cls(A, a)

    @property
    def det_sign(self):
        return int(np.sign(np.linalg.det(self.finite)))

    def __matmul__(self, other):
        # (A, a)(B, b) = (AB, B^{-1} a B + b)
        B = other.finite
        return HPIsometry.of(self.finite @ B, np.linalg.solve(B, self.inf @ B) + other.inf)

    def inv(self):
        Ai = np.linalg.inv(self.finite)
        return HPIsometry.of(Ai, -self.finite @ self.inf @ Ai)

    def to_json(self):
        return {"finite": self.finite.tolist(), "inf": self.inf.tolist()}


def rot(a, X):
    """Infinitesimal rotation of a at X, in units of the generator J/2."""
    a = np.asarray(a, dtype=float)
    X = np.asarray(X, dtype=float)
    if abs(np.trace(a)) > 1e-10 * max(1.0, np.abs(a).max()):
        raise ContractError("a must be traceless")
    S = sqrtm_pd(X)
    Si = np.linalg.inv(S)
    M = Si @ (0.5 * (a - X @ a.T @ np.linalg.inv(X))) @ S
    scale = max(1.0, np.abs(M).max())
    if abs(M[0, 0]) + abs(M[1, 1]) + abs(M[0, 1] + M[1, 0]) > 1e-10 * scale:
        raise ContractError("conjugated skew part is not antisymmetric")
    return float(M[1, 0] - M[0, 1])


def hp_act(g, p):
    """(A, a).(X, L) = (A X A^T, det(A) (L + rot(a, X)))."""
    A = g.finite
    X = p.base
    return HPPoint.of(A @ X @ A.T, g.det_sign * (p.L + rot(g.inf, X)))


def hp_to_groupelem(g):
    return GroupElem.from_arrays(g.finite, g.finite @ g.inf, B0)


def groupelem_to_hp(G):
    if G.s != 0.0:
        raise ContractError("expected an element over B_0")
    A = np.array(G.re)
    return HPIsometry.of(A, np.linalg.solve(A, G.im))


def hp_point_to_model(p):
    X = p.base
    x1 = 0.5 * (X[0, 0] + X[1, 1])
    x2 = 0.5 * (X[0, 0] - X[1, 1])
    x3 = X[1, 0]
    sd = np.sqrt(X[0, 0] * X[1, 1] - X[0, 1] * X[1, 0])
    return ModelPoint.of([x1, x2, x3, p.L * sd], B0)


def fiber_length_L(x):
    v = np.asarray(x.x if isinstance(x, ModelPoint) else x, dtype=float)
    if classify_point(ModelPoint.of(v, B0)) != INTERIOR:
        raise NotInterior("fiber coordinate needs an interior point")
    if v[0] < 0:
        v = -v
    x1, x2, x3, x4 = v
    return float(x4 / (x1 * np.sqrt(1.0 - (x2 / x1) ** 2 - (x3 / x1) ** 2)))


def model_to_hp_point(x):
    v = np.asarray(x.x, dtype=float)
    if v[0] < 0:
        v = -v
    x1, x2, x3, _ = v
    base = np.array([[x1 + x2, x3], [x3, x1 - x2]])
    return HPPoint.of(base, fiber_length_L(v))


def projection_pi(x):
    v = np.asarray(x.x if isinstance(x, ModelPoint) else x, dtype=float)
    if classify_point(ModelPoint.of(v, B0)) != INTERIOR:
        raise NotInterior("projection needs an interior point")
    return v[:3].copy()


def pi_star(m):
    arr = m.m if hasattr(m, "m") else np.asarray(m, dtype=float)
    return arr[:3, :3].copy()


def fiber_flag(m):
    """Sign of the corner entry: +1 when the fiber direction is preserved."""
    arr = m.m if hasattr(m, "m") else np.asarray(m, dtype=float)
    return int(np.sign(arr[-1, -1]))


def inf_commutator_distance(a, b):
    """d((1 + a sigma)(1 + b sigma), (1 + b sigma)(1 + a sigma))."""
    from .geom import group_distance
    ga = GroupElem.from_arrays(np.eye(2), a, B0)
    gb = GroupElem.from_arrays(np.eye(2), b, B0)
    return group_distance(ga @ gb, gb @ ga)
