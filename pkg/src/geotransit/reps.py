"""Finitely presented groups, representations over B_s, group cohomology,
singularity invariants and the regeneration engine.

Words are tuples of signed 1-based generator indices (-k is the inverse of
generator k).  Representations store normalized GroupElem images; the
solvers work with SL(2) lifts as plain complex arrays.
"""
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraTag
from .errors import (AmbiguousRank, ContractError, NoRealPath, NotAxial,
                     NotInfinitesimal, NotRepresentation, Obstructed, StepTooLarge)
from .geom import (GroupElem, Projective4, eta, group_distance, to_projective4,
                   to_projective4_arrays)
from .linalg2 import SL2_BASIS, expm_sl2, inv2, logm_sl2, sl2_mat, sl2_vec

RANK_REL = 1e-8
RANK_GAP = 1e3

B0 = AlgebraTag(0.0)
HYP, HP, ADS = "Hyperbolic", "HP", "AdS"


# --------------------------------------------------------------------------
# presentations and representations

@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple = ()

    def __post_init__(self):
        gens = tuple(str(g) for g in self.generators)
        if not gens:
            raise ContractError("a presentation needs at least one generator")
        if len(set(gens)) != len(gens):
            raise ContractError("generator names must be distinct")
        rels = tuple(tuple(int(k) for k in r) for r in self.relators)
        for r in rels:
            self.check_word(r, len(gens))
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "relators", rels)

    @staticmethod
    def check_word(w, n):
        for k in w:
            if k == 0 or abs(k) > n:
                raise ContractError(f"word letter {k} out of range for {n} generators")

    @property
    def rank(self):
        return len(self.generators)

    def index(self, name):
        return self.generators.index(name) + 1

    def word(self, text):
        """Parse 'a b A^-1 b^3' (or 'a B' with upper case for inverses when
        the upper-case letter is not itself a generator)."""
        out = []
        for tok in text.replace("*", " ").split():
            power = 1
            if "^" in tok:
                tok, p = tok.split("^")
                power = int(p)
            if tok in self.generators:
                k = self.index(tok)
            elif tok.lower() in self.generators and tok != tok.lower():
                k = -self.index(tok.lower())
            else:
                raise ContractError(f"unknown generator {tok!r}")
            out.extend([k if power > 0 else -k] * abs(power))
        return tuple(out)

    def to_json(self):
        return {"generators": list(self.generators), "relators": [list(r) for r in self.relators]}


def invert_word(w):
    return tuple(-k for k in reversed(w))


def commutator(u, v):
    return tuple(u) + tuple(v) + invert_word(u) + invert_word(v)


@dataclass(frozen=True, eq=False)
class Representation:
    presentation: Presentation
    tag: AlgebraTag
    images: dict
    dim: int = 3

    def __post_init__(self):
        imgs = dict(self.images)
        if set(imgs) != set(self.presentation.generators):
            raise ContractError("images must be given for exactly the generators")
        for g in imgs.values():
            if g.tag != self.tag:
                raise ContractError("image over the wrong algebra")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def from_matrices(cls, pres, s, mats, ims=None, dim=3):
        tag = s if isinstance(s, AlgebraTag) else AlgebraTag(s)
        out = {}
        for i, name in enumerate(pres.generators):
            im = None if ims is None else ims[i]
            out[name] = GroupElem.from_arrays(mats[i], im, tag)
        return cls(pres, tag, out, dim)

    def image(self, k):
        name = self.presentation.generators[abs(k) - 1]
        g = self.images[name]
        return g if k > 0 else g.inv()

    def ordered(self):
        return [self.images[n] for n in self.presentation.generators]

    def retag(self, s):
        return Representation(self.presentation, AlgebraTag(s),
                              {n: g.retag(s) for n, g in self.images.items()}, self.dim)

    def is_valid(self, tol):
        return relation_residual(self) < tol

    def to_json(self):
        return {"algebra": self.tag.to_json(), "dim": self.dim,
                "generators": list(self.presentation.generators),
                "relators": [list(r) for r in self.presentation.relators],
                "images": {n: self.images[n].to_json() for n in self.presentation.generators}}

    @classmethod
    def from_json(cls, obj):
        tag = AlgebraTag.from_json(obj["algebra"])
        pres = Presentation(tuple(obj["generators"]), tuple(tuple(r) for r in obj["relators"]))
        imgs = {n: GroupElem.from_json(obj["images"][n], tag) for n in pres.generators}
        return cls(pres, tag, imgs, int(obj.get("dim", 3)))


def evaluate_word(rep, w):
    Presentation.check_word(w, rep.presentation.rank)
    out = GroupElem.identity(rep.tag)
    for k in w:
        out = out @ rep.image(k)
    return out


def relation_residual(rep):
    ident = GroupElem.identity(rep.tag)
    res = [group_distance(evaluate_word(rep, r), ident) for r in rep.presentation.relators]
    return max(res, default=0.0)


# --------------------------------------------------------------------------
# SL(2) lifts

def _lifts(rep):
    """Complex SL(2) lifts of the images (s > 0 uses kappa = s i)."""
    out = []
    for g in rep.ordered():
        if rep.tag.s > 0:
            m = g.complex()
        else:
            m = np.array(g.re, dtype=complex)
        d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        out.append(m / np.sqrt(d + 0j))
    return out


def _real_lifts(rep):
    out = []
    for g in rep.ordered():
        if np.abs(g.im).max() > 0:
            raise ContractError("expected a representation with real images")
        m = np.array(g.re)
        if np.linalg.det(m) < 0:
            raise ContractError("real images must have positive determinant")
        out.append(m / np.sqrt(np.linalg.det(m)))
    return out


def word_matrix(mats, w):
    out = np.eye(2, dtype=np.result_type(*mats) if mats else float)
    for k in w:
        m = mats[abs(k) - 1]
        out = out @ (m if k > 0 else inv2(m))
    return out


# --------------------------------------------------------------------------
# cocycles

def _ad(g, X):
    return g @ X @ inv2(g)


@dataclass(frozen=True, eq=False)
class Cocycle:
    base: Representation
    values: dict

    def __post_init__(self):
        vals = {}
        for n in self.base.presentation.generators:
            v = np.array(self.values.get(n, np.zeros((2, 2))), dtype=float)
            if abs(np.trace(v)) > 1e-10 * max(1.0, np.abs(v).max()):
                raise ContractError(f"cocycle value on {n} is not traceless")
            vals[n] = v
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_vector(cls, base, vec):
        vec = np.asarray(vec, dtype=float)
        names = base.presentation.generators
        return cls(base, {n: sl2_mat(vec[3 * i:3 * i + 3]) for i, n in enumerate(names)})

    def vector(self):
        return np.concatenate([sl2_vec(self.values[n]) for n in self.base.presentation.generators])

    def __add__(self, other):
        return Cocycle(self.base, {n: self.values[n] + other.values[n] for n in self.values})

    def __mul__(self, c):
        return Cocycle(self.base, {n: c * v for n, v in self.values.items()})

    __rmul__ = __mul__

    def to_json(self):
        return {n: v.tolist() for n, v in self.values.items()}


def cocycle_extend(z, w):
    """z(xy) = z(x) + Ad_x z(y), with z(g^-1) = -Ad_{g^-1} z(g)."""
    mats = _real_lifts(z.base)
    names = z.base.presentation.generators
    total = np.zeros((2, 2))
    prefix = np.eye(2)
    for k in w:
        g = mats[abs(k) - 1]
        v = z.values[names[abs(k) - 1]]
        if k > 0:
            val = v
            step = g
        else:
            step = inv2(g)
            val = -_ad(step, v)
        total = total + _ad(prefix, val)
        prefix = prefix @ step
    return total


def coboundary(base, u):
    u = np.asarray(u, dtype=float)
    mats = _real_lifts(base)
    names = base.presentation.generators
    return Cocycle(base, {n: u - _ad(mats[i], u) for i, n in enumerate(names)})


def _relator_operator(base):
    """Matrix of z -> (z(r))_r in sl(2) coordinates, shape (3 #rel, 3 #gen)."""
    n = base.presentation.rank
    cols = []
    for j in range(3 * n):
        e = np.zeros(3 * n)
        e[j] = 1.0
        z = Cocycle.from_vector(base, e)
        col = [sl2_vec(cocycle_extend(z, r)) for r in base.presentation.relators]
        cols.append(np.concatenate(col) if col else np.zeros(0))
    return np.array(cols).T.reshape(-1, 3 * n)


def numeric_rank(sv, scale=None):
    sv = np.asarray(sv, dtype=float)
    if sv.size == 0:
        return 0
    top = sv.max() if scale is None else scale
    if top == 0:
        return 0
    thr = RANK_REL * top
    kept = sv[sv > thr]
    dropped = sv[sv <= thr]
    if kept.size and dropped.size and kept.min() / max(dropped.max(), 1e-300) < RANK_GAP:
        raise AmbiguousRank("singular-value gap below 1e3", sv)
    return int(kept.size)


def _require_valid(base, tol):
    res = relation_residual(base)
    if res > tol:
        raise NotRepresentation(f"base representation has relator residual {res:.3e}")


@dataclass(frozen=True, eq=False)
class SpaceResult:
    basis: list
    dim: int
    singular_values: np.ndarray


def cocycle_space(pres, rho0, tol=1e-8):
    if rho0.presentation != pres:
        raise ContractError("representation is for a different presentation")
    _require_valid(rho0, tol)
    n = pres.rank
    M = _relator_operator(rho0)
    if M.shape[0] == 0:
        return SpaceResult([Cocycle.from_vector(rho0, e) for e in np.eye(3 * n)], 3 * n,
                           np.zeros(0))
    _, sv, vt = np.linalg.svd(M)
    scale = max(1.0, sv.max())
    r = numeric_rank(sv, scale)
    null = vt[r:]
    return SpaceResult([Cocycle.from_vector(rho0, v) for v in null], 3 * n - r, sv)


def coboundary_matrix(rho0):
    cols = [coboundary(rho0, E).vector() for E in SL2_BASIS]
    return np.array(cols).T


def coboundary_space(pres, rho0, tol=1e-8):
    if rho0.presentation != pres:
        raise ContractError("representation is for a different presentation")
    C = coboundary_matrix(rho0)
    u, sv, _ = np.linalg.svd(C, full_matrices=False)
    r = numeric_rank(sv, max(1.0, sv.max()))
    return SpaceResult([Cocycle.from_vector(rho0, u[:, k]) for k in range(r)], r, sv)


@dataclass(frozen=True, eq=False)
class H1Result:
    dim: int
    z1: int
    b1: int
    singular_values_z: np.ndarray
    singular_values_b: np.ndarray
    caveat: str = ""

    def __int__(self):
        return self.dim


def h1_dimension(pres, rho0, tol=1e-8, caveat=""):
    z = cocycle_space(pres, rho0, tol)
    b = coboundary_space(pres, rho0, tol)
    return H1Result(z.dim - b.dim, z.dim, b.dim, z.singular_values, b.singular_values, caveat)


def cocycle_residual(z):
    return max((np.abs(cocycle_extend(z, r)).max() for r in z.base.presentation.relators),
               default=0.0)


def hp_from_cocycle(rho0, z, tol=1e-8):
    """rho_HP(g) = (1 + z(g) sigma) rho0(g) over B_0."""
    res = cocycle_residual(z)
    if res > tol:
        raise NotRepresentation(f"z is not a cocycle (residual {res:.3e})")
    mats = _real_lifts(rho0)
    names = rho0.presentation.generators
    imgs = {n: GroupElem.from_arrays(mats[i], z.values[n] @ mats[i], B0)
            for i, n in enumerate(names)}
    return Representation(rho0.presentation, B0, imgs, rho0.dim)


def hp_split(rho_hp):
    """Inverse of hp_from_cocycle: (rho0 over B_1 with real images, z)."""
    names = rho_hp.presentation.generators
    base = {}
    vals = {}
    for n in names:
        g = rho_hp.images[n]
        A = np.array(g.re)
        base[n] = GroupElem.from_arrays(A, None, 1.0)
        vals[n] = g.im @ np.linalg.inv(A)
    rho0 = Representation(rho_hp.presentation, AlgebraTag(1.0), base, rho_hp.dim)
    return rho0, Cocycle(rho0, vals)


# --------------------------------------------------------------------------
# rescaled limits

@dataclass(frozen=True, eq=False)
class LimitReport:
    passed: bool
    order: float
    ts: list
    residuals: list
    per_generator: list

    def to_json(self):
        return {"passed": self.passed, "order": self.order, "t": list(self.ts),
                "residuals": list(self.residuals), "per_generator": self.per_generator}


def rescaled_distance(g, t, h):
    """Componentwise distance of (re, im / t) of g to the B_0 element h."""
    best = np.inf
    for sgn in (1.0, -1.0):
        d = max(np.abs(sgn * g.re - h.re).max(), np.abs(sgn * g.im / t - h.im).max())
        best = min(best, d)
    return float(best)


def rescaled_limit_check(path, rho_hp, ts=(1e-2, 1e-3, 1e-4), min_order=0.9, floor=1e-13):
    """Check d(rescaled rho_t, rho_HP) <= C |t| on a one-sided grid.

    ``path`` maps t to a Representation over B_{sign t}.  The rescaling
    divides the imaginary parts by t itself, so for t < 0 it is the |t|
    rescaling followed by kappa -> -kappa.
    """
    ts = [float(t) for t in ts]
    if len({np.sign(t) for t in ts}) != 1 or 0.0 in ts:
        raise ContractError("grid must be one-sided and avoid 0")
    names = rho_hp.presentation.generators
    residuals, per_gen = [], []
    for t in ts:
        rep = path(t)
        row = {n: rescaled_distance(rep.images[n], t, rho_hp.images[n]) for n in names}
        per_gen.append(row)
        residuals.append(max(row.values()))
    r = np.array(residuals)
    a = np.abs(np.array(ts))
    if np.all(r < floor):
        return LimitReport(True, float("inf"), ts, residuals, per_gen)
    rr = np.maximum(r, floor)
    order = float(np.polyfit(np.log(a), np.log(rr), 1)[0])
    passed = order >= min_order and r[np.argmin(a)] < r[np.argmax(a)] + floor
    return LimitReport(bool(passed), order, ts, residuals, per_gen)


# --------------------------------------------------------------------------
# Newton projection

@dataclass(frozen=True)
class TraceConstraint:
    """tr(rho(word)) = value, or tr^2 = value when ``squared``."""
    word: tuple
    value: complex
    squared: bool = True


def elliptic_constraint(word, angle):
    return TraceConstraint(tuple(word), 4 * np.cos(angle / 2) ** 2, True)


def boost_constraint(word, mass):
    return TraceConstraint(tuple(word), 4 * np.cosh(mass / 2) ** 2, True)


@dataclass
class NewtonResult:
    mats: list
    converged: bool
    residual: float
    iterations: int
    trace: list = field(default_factory=list)
    correction: float = 0.0


def _word_derivs(mats, w, n):
    """d word / d(left perturbation exp(eps E_k) g_j) for every (j, k)."""
    invs = [inv2(m) for m in mats]
    letters = [mats[abs(k) - 1] if k > 0 else invs[abs(k) - 1] for k in w]
    L = len(letters)
    pre = [np.eye(2, dtype=complex)]
    for m in letters:
        pre.append(pre[-1] @ m)
    suf = [np.eye(2, dtype=complex)] * (L + 1)
    for i in range(L - 1, -1, -1):
        suf[i] = letters[i] @ suf[i + 1]
    out = np.zeros((n, 3, 2, 2), dtype=complex)
    for i, k in enumerate(w):
        j = abs(k) - 1
        for b in range(3):
            E = SL2_BASIS[b]
            d = E @ mats[j] if k > 0 else -invs[j] @ E
            out[j, b] += pre[i] @ d @ suf[i + 1]
    return pre[-1], out


class _System:
    def __init__(self, relators, constraints, n, complex_mode):
        self.relators = [tuple(r) for r in relators]
        self.constraints = list(constraints)
        self.n = n
        self.complex_mode = complex_mode
        self.signs = None

    def evaluate(self, mats, jac=True):
        res, cols = [], []
        n = self.n
        if self.signs is None:
            self.signs = [np.sign(np.real(np.trace(word_matrix(mats, r)))) or 1.0
                          for r in self.relators]
        for r, sgn in zip(self.relators, self.signs):
            W, D = _word_derivs(mats, r, n) if jac else (word_matrix(mats, r), None)
            res.append((W - sgn * np.eye(2)).reshape(-1))
            if jac:
                cols.append(D.reshape(n * 3, 4))
        for c in self.constraints:
            W, D = _word_derivs(mats, c.word, n) if jac else (word_matrix(mats, c.word), None)
            tr = np.trace(W)
            if c.squared:
                res.append(np.array([tr * tr - c.value]))
                if jac:
                    cols.append((2 * tr * np.trace(D, axis1=2, axis2=3)).reshape(n * 3, 1))
            else:
                res.append(np.array([tr - c.value]))
                if jac:
                    cols.append(np.trace(D, axis1=2, axis2=3).reshape(n * 3, 1))
        r = np.concatenate(res) if res else np.zeros(0, dtype=complex)
        if not jac:
            return self._real_res(r), None
        Jc = np.concatenate(cols, axis=1).T if cols else np.zeros((0, 3 * n), dtype=complex)
        return self._real_res(r), self._real_jac(Jc)

    def _real_res(self, r):
        if self.complex_mode:
            return np.concatenate([r.real, r.imag])
        return np.real(r)

    def _real_jac(self, Jc):
        if self.complex_mode:
            top = np.concatenate([Jc.real, -Jc.imag], axis=1)
            bot = np.concatenate([Jc.imag, Jc.real], axis=1)
            return np.concatenate([top, bot], axis=0)
        return np.real(Jc)

    def gauge_basis(self, mats):
        """Orthonormal basis of the conjugation directions X - Ad(g_j) X."""
        cols = []
        scalars = (1.0, 1j) if self.complex_mode else (1.0,)
        for c in scalars:
            for E in SL2_BASIS:
                parts = [c * (E - m @ E @ inv2(m)) for m in mats]
                v = np.concatenate([sl2_vec(u) for u in parts])
                cols.append(np.concatenate([v.real, v.imag]) if self.complex_mode
                            else np.real(v))
        q, sv, _ = np.linalg.svd(np.column_stack(cols), full_matrices=False)
        return q[:, sv > 1e-10 * max(1.0, sv[0])]

    def apply(self, mats, delta):
        n = self.n
        out = []
        for j in range(n):
            X = sl2_mat(delta[3 * j:3 * j + 3])
            if self.complex_mode:
                X = X + 1j * sl2_mat(delta[3 * n + 3 * j:3 * n + 3 * j + 3])
            out.append(expm_sl2(X) @ mats[j])
        return out


def newton_project(mats, relators, constraints=(), complex_mode=True, tol=1e-12,
                   max_iter=50, stall_level=1e-8, stall_iters=10, scale=1.0, cap=None,
                   max_step=1.0, rcond=1e-10, gauge_fix=True):
    """Gauss-Newton projection of SL(2) lifts onto {relators = +-1, constraints}.

    Corrections act on the left, g -> exp(u) g, and with ``gauge_fix`` each
    step is projected off the conjugation directions.  With ``cap`` set, the summed
    corrections divided by ``scale`` are kept inside a ball of that radius
    (used to test whether a prescribed first-order direction integrates).
    """
    n = len(mats)
    dtype = complex if complex_mode else float
    mats = [np.array(m, dtype=complex) for m in mats]
    sys = _System(relators, constraints, n, complex_mode)
    r, J = sys.evaluate(mats)
    res = float(np.abs(r).max()) if r.size else 0.0
    trace = [res]
    total = np.zeros(J.shape[1])
    best = res
    since = 0
    it = 0
    while res >= tol and it < max_iter:
        it += 1
        delta = np.linalg.lstsq(J, -r, rcond=rcond)[0]
        if gauge_fix:
            G = sys.gauge_basis(mats)
            delta = delta - G @ (G.T @ delta)
        nrm = np.abs(delta).max()
        if nrm > max_step:
            delta *= max_step / nrm
        if cap is not None:
            proposed = total + delta / scale
            size = np.linalg.norm(proposed)
            if size > cap:
                delta = (proposed * (cap / size) - total) * scale
        alpha = 1.0
        accepted = False
        for _ in range(12):
            trial = sys.apply(mats, alpha * delta)
            rt, _ = sys.evaluate(trial, jac=False)
            rt_res = float(np.abs(rt).max())
            if rt_res < res or alpha < 1e-3:
                accepted = rt_res < res
                break
            alpha *= 0.5
        if accepted:
            mats = trial
            total = total + alpha * delta / scale
            r, J = sys.evaluate(mats)
            res = float(np.abs(r).max())
        trace.append(res)
        if res < best * (1 - 1e-3):
            best = res
            since = 0
        else:
            since += 1
        if res > stall_level and since >= stall_iters:
            break
        if not accepted and res > stall_level:
            since += 1
    out = [np.real(m) if not complex_mode else m for m in mats]
    return NewtonResult([np.asarray(m, dtype=dtype) for m in out], res < tol, res, it, trace,
                        float(np.linalg.norm(total)))


# --------------------------------------------------------------------------
# regeneration

def _cocycle_list(z):
    return [z.values[n] for n in z.base.presentation.generators]


def first_order_guess(rho0, z, t, imaginary=True, real_dir=None):
    mats = _real_lifts(rho0)
    zs = _cocycle_list(z)
    ws = [np.zeros((2, 2))] * len(zs) if real_dir is None else _cocycle_list(real_dir)
    out = []
    for g, zz, ww in zip(mats, zs, ws):
        X = t * (ww + 1j * zz) if imaginary else t * zz
        out.append(expm_sl2(X) @ g)
    return out


def _constraint_list(constraints, t, kind):
    out = []
    for c in constraints or ():
        if isinstance(c, TraceConstraint):
            out.append(c)
            continue
        word, omega = c
        if kind == "elliptic":
            out.append(elliptic_constraint(word, omega * t))
        else:
            out.append(boost_constraint(word, omega * t))
    return out


def regenerate_hyp(rho0, z, t, constraints=(), real_dir=None, cap=None, tol=1e-12,
                   return_info=False):
    """Hyperbolic representation near exp(t (w + i z)) rho0, over B_1.

    ``constraints`` holds TraceConstraint objects or (meridian word, omega)
    pairs; a pair asks for an elliptic meridian rotating by omega t.
    """
    if t <= 0:
        raise ContractError("regenerate_hyp needs t > 0")
    pres = rho0.presentation
    guess = first_order_guess(rho0, z, t, True, real_dir)
    cons = _constraint_list(constraints, t, "elliptic")
    out = newton_project(guess, pres.relators, cons, True, tol=tol, scale=t * t, cap=cap)
    if not out.converged:
        raise Obstructed(f"hyperbolic Newton projection stalled at residual {out.residual:.3e}",
                         out.residual, out.trace)
    rep = Representation(pres, AlgebraTag(1.0),
                         {n: GroupElem.from_complex(m, 1.0)
                          for n, m in zip(pres.generators, out.mats)}, rho0.dim)
    return (rep, out) if return_info else rep


def real_path(rho0, z, s, constraints=(), tol=1e-12):
    """Real representation near exp(s z) rho0; constraints as (word, omega)
    ask for a hyperbolic meridian of translation length |omega s|."""
    pres = rho0.presentation
    guess = [np.real(m) for m in first_order_guess(rho0, z, s, False)]
    cons = _constraint_list(constraints, s, "boost")
    out = newton_project(guess, pres.relators, cons, False, tol=tol)
    if not out.converged:
        raise NoRealPath(f"real Newton projection failed at residual {out.residual:.3e}",
                         out.trace)
    return [np.real(m) for m in out.mats]


def combine_idempotent(plus, minus, pres, s=-1.0, dim=3):
    """e+ plus + e- minus from two lists of real SL(2) matrices."""
    tag = AlgebraTag(s)
    imgs = {n: GroupElem.from_split(p, m, tag) for n, p, m in zip(pres.generators, plus, minus)}
    return Representation(pres, tag, imgs, dim)


def regenerate_ads(rho0, z, t, constraints=(), path=None, tol=1e-12):
    """AdS representation e+ phi_t + e- phi_{-t} over B_{-1} for t < 0.

    ``path`` may supply the real path phi directly (a callable s -> list of
    SL(2, R) matrices); otherwise it is found by Newton projection of
    exp(s z) rho0 with boost-type meridian constraints.
    """
    if t >= 0:
        raise ContractError("regenerate_ads needs t < 0")
    pres = rho0.presentation
    if path is None:
        def path(s):
            return real_path(rho0, z, s, constraints, tol)
    rep = combine_idempotent(path(t), path(-t), pres, -1.0, rho0.dim)
    return rep


# --------------------------------------------------------------------------
# singularity invariants

@dataclass(frozen=True)
class RotationAngle:
    angle: float
    elliptic: bool = True

    def __float__(self):
        return self.angle


def _as_matrix(g, dim=None):
    if isinstance(g, Projective4):
        return g.m, g.tag
    if isinstance(g, GroupElem):
        p = to_projective4(g, dim or 3)
        return p.m, p.tag
    arr = np.asarray(g, dtype=float)
    return arr, AlgebraTag(1.0)


def _orthonormal_complement(F, Q):
    """Q-orthonormal basis of the Q-orthogonal complement of span(F)."""
    n = Q.shape[0]
    basis = []
    for v in np.eye(n):
        w = v.copy()
        for f in list(F.T) + basis:
            q = f @ Q @ f
            w = w - (f @ Q @ w) / q * f
        if np.linalg.norm(w) > 1e-8:
            q = w @ Q @ w
            if abs(q) > 1e-10:
                basis.append(w / np.sqrt(abs(q)))
        if len(basis) == n - F.shape[1]:
            break
    return basis


def _fixed_frame(m, Q, axis=None):
    """Timelike fixed vector and (optional) fixed spacelike axis direction."""
    for sgn in (1.0, -1.0):
        M = sgn * m
        _, sv, vt = np.linalg.svd(M - np.eye(M.shape[0]))
        k = int(np.sum(sv < 1e-8 * max(1.0, np.abs(M).max())))
        if k:
            F = vt[-k:].T
            break
    else:
        return None, None
    # timelike vector inside F
    G = F.T @ Q @ F
    w, V = np.linalg.eigh(G)
    if w[0] >= -1e-12:
        return None, M
    x = F @ V[:, 0]
    x = x / np.sqrt(-(x @ Q @ x))
    if x[0] < 0:
        x = -x
    cols = [x]
    if F.shape[1] >= 2:
        if axis is not None:
            a = np.asarray(axis, dtype=float)
        else:
            a = F @ V[:, 1]
        a = a - (a @ Q @ x) / (x @ Q @ x) * x
        a = a / np.sqrt(abs(a @ Q @ a))
        if axis is None and a[np.argmax(np.abs(a))] < 0:
            a = -a
        cols.append(a)
    return np.array(cols).T, M


def _plane_angle(M, frame, Q):
    f1, f2 = _orthonormal_complement(frame, Q)[:2]
    if np.linalg.det(np.column_stack([frame, f1, f2])) < 0:
        f2 = -f2
    return float(np.arctan2(f2 @ Q @ M @ f1, f1 @ Q @ M @ f1)), (f1, f2)


def transvection(x, y, Q):
    """The pure translation of the model taking unit timelike x to y."""
    c = -(x @ Q @ y)
    s = x + y
    n = Q.shape[0]
    return np.eye(n) + np.outer(s, s @ Q) / (1 + c) - 2 * np.outer(y, x @ Q)


def rotation_angle(g=None, path=None, base_point=None, axis=None, dim=None):
    """Rotation angle of an elliptic isometry, or lifted total angle of a path.

    Unlifted: returns the angle in (-pi, pi] about the fixed point/axis, with
    the rotation plane oriented so that (fixed frame, f1, f2) is positive.
    Lifted: ``path`` is a sequence of isometries starting at the identity and
    the rotational part about ``base_point`` is tracked continuously.
    """
    if path is None:
        m, tag = _as_matrix(g, dim)
        Q = eta(tag, m.shape[0] - 1)
        frame, M = _fixed_frame(m, Q, axis)
        if frame is None:
            return RotationAngle(0.0, False)
        ang, _ = _plane_angle(M, frame, Q)
        if np.isclose(ang, -np.pi):
            ang = np.pi
        return RotationAngle(ang, True)
    mats = [_as_matrix(p, dim) for p in path]
    tag = mats[0][1]
    n = mats[0][0].shape[0]
    Q = eta(tag, n - 1)
    x = np.asarray(base_point, dtype=float)
    x = x / np.sqrt(-(x @ Q @ x))
    cols = [x]
    if n == 4:
        if axis is None:
            raise ContractError("lifted rotation in dimension 3 needs an axis direction")
        a = np.asarray(axis, dtype=float)
        a = a - (a @ Q @ x) / (x @ Q @ x) * x
        cols.append(a / np.sqrt(abs(a @ Q @ a)))
    frame = np.array(cols).T
    total = 0.0
    prev = None
    for m, _ in mats:
        if m[0] @ x < 0 or (m @ x)[0] < 0:
            m = -m
        y = m @ x
        R = np.linalg.solve(transvection(x, y, Q), m)
        ang, _ = _plane_angle(R, frame, Q)
        if prev is None:
            if abs(ang) > 1e-9:
                raise ContractError("lifted path must start at the identity")
        else:
            step = (ang - prev + np.pi) % (2 * np.pi) - np.pi
            if abs(step) >= np.pi / 2:
                raise StepTooLarge(f"angle step {step:.3f} exceeds pi/2")
            total += step
        prev = ang
    return RotationAngle(total, True)


def tachyon_mass(g, axis):
    """Boost parameter phi about a fixed space-like axis: cosh phi = v^T eta A v."""
    m, tag = _as_matrix(g)
    if tag.s >= 0:
        raise ContractError("tachyon mass needs an AdS element (s < 0)")
    Q = eta(tag, m.shape[0] - 1)
    A = np.atleast_2d(np.asarray(axis, dtype=float))
    if A.shape[0] != m.shape[0]:
        A = A.T
    err = min(np.abs(m @ A - A).max(), np.abs(m @ A + A).max())
    if err > 1e-9 * max(1.0, np.abs(A).max()):
        raise NotAxial(f"axis moved by {err:.3e}")
    M = m if np.abs(m @ A - A).max() <= np.abs(m @ A + A).max() else -m
    comp = _orthonormal_complement(A, Q)
    qs = [c @ Q @ c for c in comp]
    v = comp[int(np.argmax(qs))]
    w = comp[int(np.argmin(qs))]
    if np.linalg.det(np.column_stack([A, v, w])) < 0:
        w = -w
    Av = M @ v
    c = v @ Q @ Av
    sh = -(w @ Q @ Av)
    return float(np.arctanh(sh / c)) if abs(c) > 0 else float("nan")


def _hp_matrix(g):
    if isinstance(g, GroupElem):
        return to_projective4_arrays(g.re, g.im, g.tag)
    if isinstance(g, Projective4):
        return g.m
    return np.asarray(g, dtype=float)


def infinitesimal_cone_angle(g, meridian=None, longitude=None, axis_direction=None):
    """omega of a pure infinitesimal rotation [[I, 0], [v, 1]].

    ``g`` is a Representation over B_0 (with ``meridian``/``longitude`` words)
    or a single element.  The axis in H^2 is {v . x = 0}; its direction f2 is
    taken from the longitude (translation direction), from ``axis_direction``,
    or by the largest-positive-component rule.  Then omega = v . f3 where
    (f1, f2, f3) is a positive frame, f1 on the axis.
    """
    lon_m = None
    if hasattr(g, "presentation"):
        if g.tag.s != 0:
            raise ContractError("infinitesimal cone angle needs an HP representation")
        m = _hp_matrix(evaluate_word(g, meridian))
        if longitude is not None:
            lon_m = _hp_matrix(evaluate_word(g, longitude))
    else:
        m = _hp_matrix(g)
        if longitude is not None:
            lon_m = _hp_matrix(longitude)
    if m[-1, -1] < 0:
        m = -m
    k = m.shape[0] - 1
    fin = m[:k, :k]
    if np.abs(fin - np.eye(k)).max() > 1e-10 * max(1.0, np.abs(m).max()):
        raise NotInfinitesimal("finite part of the meridian is not the identity")
    v = m[k, :k]
    if np.abs(v).max() < 1e-14:
        return 0.0
    Q = eta(1.0, k)[:k, :k]
    f3 = Q @ v
    f3 = f3 / np.sqrt(f3 @ Q @ f3)
    # axis: Q-orthogonal complement of f3 in H^2
    if lon_m is not None:
        if lon_m[-1, -1] < 0:
            lon_m = -lon_m
        Lf = lon_m[:k, :k]
        w, V = np.linalg.eig(Lf)
        i = int(np.argmax(np.real(w)))
        j = int(np.argmin(np.real(w)))
        fwd = np.real(V[:, i])
        back = np.real(V[:, j])
        if fwd[0] < 0:
            fwd = -fwd
        if back[0] < 0:
            back = -back
        f1 = fwd / abs(fwd[0]) + back / abs(back[0])
        f1 = f1 / np.sqrt(-(f1 @ Q @ f1))
        f2 = fwd / abs(fwd[0]) - back / abs(back[0])
    else:
        basis = _orthonormal_complement(f3[:, None], Q)
        f1 = next(b for b in basis if b @ Q @ b < 0)
        if f1[0] < 0:
            f1 = -f1
        if k == 2:
            f2 = None
        elif axis_direction is not None:
            f2 = np.asarray(axis_direction, dtype=float)
        else:
            f2 = next(b for b in basis if b @ Q @ b > 0)
            if f2[np.argmax(np.abs(f2))] < 0:
                f2 = -f2
    if k == 3:
        f2 = f2 - (f2 @ Q @ f1) / (f1 @ Q @ f1) * f1 - (f2 @ Q @ f3) * f3
        f2 = f2 / np.sqrt(f2 @ Q @ f2)
        if np.linalg.det(np.column_stack([f1, f2, f3])) < 0:
            f3 = -f3
    else:
        if np.linalg.det(np.column_stack([f1, f3])) < 0:
            f3 = -f3
    return float(v @ f3)


def meridian_invariant(mer, lon):
    """Uniform singularity invariant of a commuting (meridian, longitude) pair.

    In the eigenbasis of the longitude (forward eigenvector first) the
    meridian is diag(lam, 1/lam) with lam = exp((d - theta khat)/2),
    khat = kappa/|s|.  Returns (kind, value): cone angle 2 pi + theta for
    s > 0, tachyon mass theta for s < 0, infinitesimal cone angle for s = 0.
    """
    s = mer.s
    if s > 0:
        G = mer.complex()
        Lm = lon.complex()
        w, P = np.linalg.eig(Lm)
        order = np.argsort(-np.abs(w))
        P = P[:, order]
        D = np.linalg.solve(P, G @ P)
        lam = D[0, 0] / np.sqrt(np.linalg.det(G) + 0j)
        theta = -2 * np.angle(lam)
        theta = (theta + np.pi) % (2 * np.pi) - np.pi
        if np.isclose(theta, -np.pi):
            theta = np.pi
        return "cone_angle", float(2 * np.pi + theta)
    if s < 0:
        ell = []
        for G, Lm in zip(mer.split(), lon.split()):
            w, P = np.linalg.eig(Lm)
            order = np.argsort(-np.abs(w))
            P = np.real(P[:, order])
            D = np.linalg.solve(P, G @ P)
            lam = D[0, 0] / np.sqrt(abs(np.linalg.det(G)))
            ell.append(2 * np.log(abs(lam)))
        return "tachyon_mass", float(0.5 * (ell[1] - ell[0]))
    A = np.array(mer.re)
    h = np.linalg.solve(A, mer.im)
    w, P = np.linalg.eig(np.array(lon.re))
    order = np.argsort(-np.abs(w))
    P = np.real(P[:, order])
    hd = np.linalg.solve(P, h @ P)
    return "inf_cone_angle", float(-2 * hd[0, 0])


def model_cone_generators(geometry, omega, d, mu_param=0.0, t=0.0, sign=1.0):
    """Standard meridian/longitude pair (4x4) for the model families."""
    ch, sh = np.cosh(d), np.sinh(d)
    mer = np.eye(4)
    lon = np.eye(4)
    lon[:2, :2] = [[ch, sh], [sh, ch]]
    if geometry in ("Hyp", HYP):
        c, s_ = np.cos(omega * t), np.sin(omega * t)
        mer[2:, 2:] = [[c, -s_], [s_, c]]
        c, s_ = np.cos(mu_param * t), np.sin(mu_param * t)
        lon[2:, 2:] = [[sign * c, -s_], [s_, sign * c]]
        tag = AlgebraTag(1.0)
    elif geometry == ADS:
        c, s_ = np.cosh(omega * t), np.sinh(omega * t)
        mer[2:, 2:] = [[c, s_], [s_, c]]
        c, s_ = np.cosh(mu_param * t), np.sinh(mu_param * t)
        lon[2:, 2:] = [[sign * c, s_], [s_, sign * c]]
        tag = AlgebraTag(-1.0)
    elif geometry == HP:
        mer[3, 2] = omega
        lon[2:, 2:] = [[sign, 0.0], [mu_param, sign]]
        tag = B0
    else:
        raise ContractError(f"unknown geometry {geometry!r}")
    return Projective4(mer, tag, 3), Projective4(lon, tag, 3)


# --------------------------------------------------------------------------
# transition reports

@dataclass(frozen=True, eq=False)
class TransitionRow:
    t: float
    s: float
    residual: float
    kind: str
    value: float
    classification: str
    rep: object = None

    def to_json(self):
        out = {"t": self.t, "s": self.s, "residual": self.residual,
               "classification": self.classification,
               "invariant": {"kind": self.kind, "value": self.value}}
        if self.rep is not None:
            out["representation"] = self.rep.to_json()
        return out


def classify_t(t):
    return HYP if t > 0 else (ADS if t < 0 else HP)


@dataclass(frozen=True, eq=False)
class TransitionReport:
    rows: list
    extra: dict = field(default_factory=dict)

    @property
    def ts(self):
        return [r.t for r in self.rows]

    def to_json(self):
        return [r.to_json() for r in self.rows]


def lift_path(rep, word, steps=64):
    """Sampled path of isometries from 1 to rho(word): concatenation of
    exp(u log g) for the letters, giving the developed holonomy along a loop.
    Returns SL(2) (complex) matrices."""
    mats = _lifts(rep)
    out = [np.eye(2, dtype=complex)]
    cur = np.eye(2, dtype=complex)
    for k in word:
        g = mats[abs(k) - 1]
        if k < 0:
            g = inv2(g)
        X = logm_sl2(g)
        for u in np.linspace(0, 1, steps + 1)[1:]:
            out.append(cur @ expm_sl2(u * X))
        cur = cur @ g
    return out
