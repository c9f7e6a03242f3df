"""Model spaces X_s and their isometry groups.

Group elements are 2x2 matrices over B_s stored as two real arrays
(``re``, ``im``) so that the element is ``re + kappa_s * im``.  The
projective picture is the 4x4 real matrix of X -> A X A^* written in the
Hermitian coordinates

    X = [[x1 + x2, x3 - x4 kappa], [x3 + x4 kappa, x1 - x2]],

for which <X, X> = -det X = x^T eta_s x with eta_s = diag(-1, 1, 1, -kappa_s^2).
Dimension 2 is the slice x3 = 0, coordinates (x1, x2, x4).
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .algebra import AlgebraTag, BElem
from .errors import ContractError, InvalidRescale, NotInGroup, NotInterior

DIM2_INDEX = (0, 1, 3)


def _tag(s):
    return s if isinstance(s, AlgebraTag) else AlgebraTag(s)


def eta(s, dim=3):
    tag = _tag(s)
    d = np.array([-1.0, 1.0, 1.0, -tag.kappa_sq])
    if dim == 2:
        d = d[list(DIM2_INDEX)]
    return np.diag(d)


# --------------------------------------------------------------------------
# B_s matrix arithmetic on raw arrays (leading batch axes allowed)

def bdet(re, im, k2):
    a, b, c, d = re[..., 0, 0], re[..., 0, 1], re[..., 1, 0], re[..., 1, 1]
    ai, bi, ci, di = im[..., 0, 0], im[..., 0, 1], im[..., 1, 0], im[..., 1, 1]
    d0 = a * d + k2 * ai * di - b * c - k2 * bi * ci
    d1 = a * di + ai * d - b * ci - bi * c
    return d0, d1


def bmul(are, aim, bre, bim, k2):
    return are @ bre + k2 * (aim @ bim), are @ bim + aim @ bre


def normalize_arrays(re, im, s):
    """Scale to det = +-1.  Returns (re, im, det_sign) with batch support."""
    tag = _tag(s)
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    k2 = tag.kappa_sq
    d0, d1 = bdet(re, im, k2)
    d0 = np.asarray(d0, dtype=float)
    d1 = np.asarray(d1, dtype=float)
    if tag.s > 0:
        big = np.sqrt(d0 * d0 + (tag.s * d1) ** 2)
        if np.any(big <= 1e-300):
            raise NotInGroup("singular matrix")
        lam = 1.0 / np.sqrt(d0 + 1j * tag.s * d1)
        lr, li = lam.real, lam.imag / tag.s
        sign = np.ones_like(d0)
    elif tag.s == 0:
        if np.any(d0 == 0):
            raise NotInGroup("determinant has zero real part over B_0")
        lr = 1.0 / np.sqrt(np.abs(d0))
        li = -lr * d1 / (2.0 * d0)
        sign = np.sign(d0)
    else:
        a = abs(tag.s)
        dp, dm = d0 + a * d1, d0 - a * d1
        if np.any(dp * dm <= 0):
            raise NotInGroup("|det|^2 <= 0: not in PGL+(2, B_s)")
        lp, lm = 1.0 / np.sqrt(np.abs(dp)), 1.0 / np.sqrt(np.abs(dm))
        lr, li = 0.5 * (lp + lm), 0.5 * (lp - lm) / a
        sign = np.sign(dp)
    lr = np.asarray(lr)[..., None, None]
    li = np.asarray(li)[..., None, None]
    return lr * re + k2 * li * im, lr * im + li * re, sign


def unit_scalars(s):
    """Unit scalars lambda with lambda^2 = 1, as (re, im) pairs."""
    tag = _tag(s)
    units = [(1.0, 0.0), (-1.0, 0.0)]
    if tag.s < 0:
        a = 1.0 / abs(tag.s)
        units += [(0.0, a), (0.0, -a)]
    return units


def _scale(lr, li, re, im, k2):
    return lr * re + k2 * li * im, lr * im + li * re


def canonical_arrays(re, im, s):
    """Pick the canonical unit-scalar multiple of a det-normalized matrix."""
    tag = _tag(s)
    k2 = tag.kappa_sq
    flat = [(re.flat[i], im.flat[i]) for i in range(4)]
    for a, b in flat:
        sq = a * a - k2 * b * b
        if abs(sq) > 1e-12:
            break
    else:
        return re, im
    if tag.s < 0 and abs(b) * abs(tag.s) > abs(a):
        # multiply by kappa/|s| so the real part dominates
        u = 1.0 / abs(tag.s)
        re, im = _scale(0.0, u, re, im, k2)
        a, b = k2 * u * b, u * a
    if a < 0 or (a == 0 and b < 0):
        re, im = -re, -im
    return re, im


@dataclass(frozen=True, eq=False)
class GroupElem:
    """A normalized representative of a class in PGL+(2, B_s)."""

    re: np.ndarray
    im: np.ndarray
    tag: AlgebraTag
    det_sign: int = field(default=1)

    @classmethod
    def from_arrays(cls, re, im=None, s=1.0):
        tag = _tag(s)
        re = np.array(re, dtype=float).reshape(2, 2)
        im = np.zeros((2, 2)) if im is None else np.array(im, dtype=float).reshape(2, 2)
        nre, nim, sign = normalize_arrays(re, im, tag)
        nre, nim = canonical_arrays(nre, nim, tag)
        nre.setflags(write=False)
        nim.setflags(write=False)
        return cls(nre, nim, tag, int(sign))

    @classmethod
    def from_complex(cls, z, s=1.0):
        """From a complex matrix, kappa_s = s*i for s > 0."""
        tag = _tag(s)
        if tag.s <= 0:
            raise ContractError("complex input needs s > 0")
        z = np.asarray(z, dtype=complex)
        return cls.from_arrays(z.real, z.imag / tag.s, tag)

    @classmethod
    def from_split(cls, mp, mm, s=-1.0):
        """From idempotent components (e+ part, e- part), s < 0."""
        tag = _tag(s)
        if tag.s >= 0:
            raise ContractError("split input needs s < 0")
        mp = np.asarray(mp, dtype=float)
        mm = np.asarray(mm, dtype=float)
        return cls.from_arrays(0.5 * (mp + mm), 0.5 * (mp - mm) / abs(tag.s), tag)

    @classmethod
    def identity(cls, s=1.0):
        return cls.from_arrays(np.eye(2), None, s)

    @property
    def s(self):
        return self.tag.s

    @property
    def entries(self):
        return [[BElem(self.re[i, j], self.im[i, j], self.tag) for j in range(2)]
                for i in range(2)]

    def det(self):
        d0, d1 = bdet(self.re, self.im, self.tag.kappa_sq)
        return BElem(d0, d1, self.tag)

    def _same(self, other):
        if not isinstance(other, GroupElem):
            raise ContractError("expected a GroupElem")
        if other.tag != self.tag:
            raise ContractError(f"algebra tags differ: s={self.s} vs s={other.s}")

    def __matmul__(self, other):
        self._same(other)
        re, im = bmul(self.re, self.im, other.re, other.im, self.tag.kappa_sq)
        return GroupElem.from_arrays(re, im, self.tag)

    def inv(self):
        adj_re = np.array([[self.re[1, 1], -self.re[0, 1]], [-self.re[1, 0], self.re[0, 0]]])
        adj_im = np.array([[self.im[1, 1], -self.im[0, 1]], [-self.im[1, 0], self.im[0, 0]]])
        return GroupElem.from_arrays(adj_re, adj_im, self.tag)

    def __pow__(self, n):
        n = int(n)
        base = self if n >= 0 else self.inv()
        out = GroupElem.identity(self.tag)
        for _ in range(abs(n)):
            out = out @ base
        return out

    def complex(self):
        if self.s <= 0:
            raise ContractError("complex form needs s > 0")
        return self.re + 1j * self.s * self.im

    def split(self):
        if self.s >= 0:
            raise ContractError("idempotent split needs s < 0")
        a = abs(self.s)
        return self.re + a * self.im, self.re - a * self.im

    def retag(self, s):
        """Same (re, im) arrays over another algebra (used for limits)."""
        return GroupElem.from_arrays(self.re, self.im, s)

    def to_json(self):
        return {"det_sign": int(self.det_sign),
                "entries": [[[float(self.re[i, j]), float(self.im[i, j])] for j in range(2)]
                            for i in range(2)]}

    @classmethod
    def from_json(cls, obj, s):
        ent = np.asarray(obj["entries"], dtype=float)
        if ent.shape != (2, 2, 2):
            raise ContractError("GroupElem entries must be 2x2 pairs")
        return cls.from_arrays(ent[..., 0], ent[..., 1], s)

    def __repr__(self):
        return f"GroupElem(s={self.s}, re={self.re.tolist()}, im={self.im.tolist()})"


def group_distance(g, h):
    """min over unit scalars of the max-abs difference of (re, im) arrays."""
    g._same(h)
    k2 = g.tag.kappa_sq
    best = np.inf
    for lr, li in unit_scalars(g.tag):
        re, im = _scale(lr, li, h.re, h.im, k2)
        best = min(best, max(np.abs(g.re - re).max(), np.abs(g.im - im).max()))
    return float(best)


def random_arrays(rng, s, n):
    """n random normalized matrices over B_s as raw arrays."""
    tag = _tag(s)
    out_re = np.empty((n, 2, 2))
    out_im = np.empty((n, 2, 2))
    filled = 0
    while filled < n:
        re = rng.standard_normal((n, 2, 2))
        im = rng.standard_normal((n, 2, 2))
        d0, d1 = bdet(re, im, tag.kappa_sq)
        if tag.s < 0:
            a = abs(tag.s)
            ok = (d0 + a * d1) * (d0 - a * d1) > 1e-2
        else:
            ok = np.abs(d0) > 1e-2
        re, im = re[ok], im[ok]
        take = min(n - filled, re.shape[0])
        if take:
            nre, nim, _ = normalize_arrays(re[:take], im[:take], tag)
            out_re[filled:filled + take] = nre
            out_im[filled:filled + take] = nim
            filled += take
    return out_re, out_im


def random_group_elem(rng, s):
    re, im = random_arrays(rng, s, 1)
    return GroupElem.from_arrays(re[0], im[0], s)


# --------------------------------------------------------------------------
# points

@dataclass(frozen=True, eq=False)
class ModelPoint:
    """A point of X_s as coordinates (x1, x2, x3, x4), up to real scale."""

    x: np.ndarray
    tag: AlgebraTag

    @classmethod
    def of(cls, x, s=1.0):
        x = np.array(x, dtype=float).reshape(-1)
        if x.size == 3:
            x = np.array([x[0], x[1], 0.0, x[2]])
        if x.size != 4:
            raise ContractError("a model point has 4 coordinates (or 3 in dimension 2)")
        x.setflags(write=False)
        return cls(x, _tag(s))

    @classmethod
    def from_hermitian(cls, re, im, s=1.0):
        re = np.asarray(re, dtype=float)
        im = np.asarray(im, dtype=float)
        x1 = 0.5 * (re[0, 0] + re[1, 1])
        x2 = 0.5 * (re[0, 0] - re[1, 1])
        return cls.of([x1, x2, re[1, 0], im[1, 0]], s)

    def hermitian(self):
        x1, x2, x3, x4 = self.x
        re = np.array([[x1 + x2, x3], [x3, x1 - x2]])
        im = np.array([[0.0, -x4], [x4, 0.0]])
        return re, im

    def to_json(self):
        return [float(v) for v in self.x]


def herm_inner(X, Y):
    if X.tag != Y.tag:
        raise ContractError("points over different algebras")
    return float(X.x @ eta(X.tag) @ Y.x)


def to_projective4_arrays(re, im, s, use_jit=None):
    re = np.asarray(re, dtype=float)
    im = np.asarray(im, dtype=float)
    single = re.ndim == 2
    if single:
        re, im = re[None], im[None]
    m = _kernels.projective4(re, im, _tag(s).kappa_sq, use_jit=use_jit)
    return m[0] if single else m


@dataclass(frozen=True, eq=False)
class Projective4:
    """A real (dim+1)x(dim+1) matrix up to sign."""

    m: np.ndarray
    tag: AlgebraTag
    dim: int = 3

    def __matmul__(self, other):
        return Projective4(self.m @ other.m, self.tag, self.dim)

    def distance(self, other):
        return float(min(np.abs(self.m - other.m).max(), np.abs(self.m + other.m).max()))

    def to_json(self):
        return {"dim": self.dim, "m": [float(v) for v in self.m.reshape(-1)]}


def to_projective4(A, dim=3):
    m = to_projective4_arrays(A.re, A.im, A.tag)
    if dim == 2:
        idx = list(DIM2_INDEX)
        leak = max(np.abs(np.delete(m[2], 2)).max(), np.abs(np.delete(m[:, 2], 2)).max())
        if leak > 1e-9 * max(1.0, np.abs(m).max()):
            raise ContractError("element does not preserve the slice x3 = 0")
        m = m[np.ix_(idx, idx)]
    return Projective4(m, A.tag, dim)


def act(A, X):
    if A.tag != X.tag:
        raise ContractError("group element and point over different algebras")
    m = to_projective4_arrays(A.re, A.im, A.tag)
    return ModelPoint.of(m @ X.x, X.tag)


def hp_v_row(A, B):
    """Closed-form bottom row v(A, B) and corner c(A, B) for A + B sigma."""
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    e, f, g, h = B[0, 0], B[0, 1], B[1, 0], B[1, 1]
    v = np.array([-c * e - d * f + a * g + b * h,
                  -c * e + d * f + a * g - b * h,
                  -c * f - d * e + a * h + b * g])
    return v, a * d - b * c


def rescaling_matrix(s, dim=3):
    s = float(s)
    if s == 0.0:
        raise InvalidRescale("no rescaling map at s = 0")
    return np.diag([1.0] * dim + [1.0 / abs(s)])


def conjugate_by_rescaling(m, s):
    """r_s m r_s^{-1}; accepts a Projective4 or a bare square array."""
    arr = m.m if isinstance(m, Projective4) else np.asarray(m, dtype=float)
    dim = arr.shape[0] - 1
    r = rescaling_matrix(s, dim)
    out = r @ arr @ np.linalg.inv(r)
    if isinstance(m, Projective4):
        return Projective4(out, AlgebraTag(s), dim)
    return out


def path_rescaling_matrix(t, dim=3):
    """diag(1, ..., 1, 1/t) with the sign of t kept.

    For t < 0 this is the |t| rescaling composed with x_last -> -x_last; it is
    the normalization in which one-sided limits over t < 0 are taken.
    """
    t = float(t)
    if t == 0.0:
        raise InvalidRescale("no rescaling map at t = 0")
    return np.diag([1.0] * dim + [1.0 / t])


def conjugate_by_path_rescaling(m, t):
    arr = m.m if isinstance(m, Projective4) else np.asarray(m, dtype=float)
    dim = arr.shape[0] - 1
    r = path_rescaling_matrix(t, dim)
    out = r @ arr @ np.linalg.inv(r)
    if isinstance(m, Projective4):
        return Projective4(out, AlgebraTag(t), dim)
    return out


INTERIOR, IDEAL, EXTERIOR = "Interior", "Ideal", "Exterior"


def _quad(x, tag):
    x = x.x if isinstance(x, ModelPoint) else np.asarray(x, dtype=float)
    if x.size == 3:
        return x, float(x @ eta(tag, 2) @ x)
    return x, float(x @ eta(tag) @ x)


def classify_point(x, s=None):
    tag = x.tag if isinstance(x, ModelPoint) else _tag(s)
    v, q = _quad(x, tag)
    nrm = float(v @ v)
    if nrm == 0:
        raise ContractError("zero vector is not a projective point")
    if abs(q) <= 1e-12 * nrm:
        return IDEAL
    return INTERIOR if q < 0 else EXTERIOR


def normalize_hyperboloid(x, s=None):
    tag = x.tag if isinstance(x, ModelPoint) else _tag(s)
    if classify_point(x, tag) != INTERIOR:
        raise NotInterior("only interior points lie on the hyperboloid")
    v, q = _quad(x, tag)
    v = v / np.sqrt(-q)
    if v[0] < 0:
        v = -v
    return ModelPoint.of(v, tag) if isinstance(x, ModelPoint) else v
