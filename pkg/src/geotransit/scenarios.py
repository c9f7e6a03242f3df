"""Worked constructions: the singular torus, the (2, m, m) half-pipe
structure with its regeneration, and the Borromean-rings flexibility example.
"""
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraTag
from .errors import (ConstructionFailed, ContractError, NoParabolicAngle, Obstructed,
                     RightAngleImpossible, SmoothnessGateFailed)
from .geom import (GroupElem, conjugate_by_path_rescaling, conjugate_by_rescaling, eta,
                   group_distance, to_projective4)
from .halfpipe import fiber_length_L, rot, sqrtm_pd
from .reps import (ADS, HP, HYP, Cocycle, Presentation, Representation, TraceConstraint,
                   TransitionReport, TransitionRow, combine_idempotent, commutator,
                   evaluate_word, h1_dimension, hp_from_cocycle, infinitesimal_cone_angle,
                   invert_word, meridian_invariant, regenerate_ads, regenerate_hyp,
                   relation_residual, rescaled_limit_check, rotation_angle, tachyon_mass)
from .reps import _orthonormal_complement

B0 = AlgebraTag(0.0)
J = np.array([[0.0, -1.0], [1.0, 0.0]])


def rot2(a):
    return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])


def _projdist(P, Q):
    """Distance between two subspaces given by basis columns (projectors)."""
    def proj(M):
        q, _ = np.linalg.qr(M)
        return q @ q.T
    return float(np.abs(proj(P) - proj(Q)).max())


# --------------------------------------------------------------------------
# singular torus

TORUS = Presentation(("a", "b"))
TORUS_COMMUTATOR = commutator((1,), (2,))
_UA = np.arccosh(3.0)


def torus_printed(t):
    """The displayed 3x3 matrices: (rho_t(a), rho_t(b)) for t > 0 and
    (sigma_t(a), sigma_t(b)) for t < 0."""
    a = np.array([[3.0, 2 * np.sqrt(2), 0.0], [2 * np.sqrt(2), 3.0, 0.0], [0.0, 0.0, 1.0]])
    if t >= 0:
        c = np.sqrt(1 + t * t)
        b = np.array([[c, 0.0, t], [0.0, 1.0, 0.0], [t, 0.0, c]])
    else:
        c = np.sqrt(1 - t * t)
        b = np.array([[c, 0.0, -t], [0.0, 1.0, 0.0], [t, 0.0, c]])
    return a, b


def torus_printed_rescaled(t):
    """The displayed rescaled rho_t(b) for t > 0."""
    c = np.sqrt(1 + t * t)
    return np.array([[c, 0.0, t * t], [0.0, 1.0, 0.0], [1.0, 0.0, c]])


TORUS_HP_B = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
TORUS_HP_COMMUTATOR = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0, -2 * np.sqrt(2), 1.0]])


def torus_rep(t):
    """rho_t over B_1 (t > 0), sigma_t over B_-1 (t < 0), the HP limit at t = 0."""
    a = np.diag([np.exp(_UA / 2), np.exp(-_UA / 2)])
    if t > 0:
        v = np.arcsinh(t)
        s = 1.0
        b_re, b_im = np.cosh(v / 2) * np.eye(2), np.sinh(v / 2) * J
    elif t < 0:
        v = np.arcsin(t)
        s = -1.0
        b_re, b_im = np.cos(v / 2) * np.eye(2), np.sin(v / 2) * J
    else:
        s = 0.0
        b_re, b_im = np.eye(2), 0.5 * J
    return Representation.from_matrices(TORUS, s, [a, b_re], [None, b_im], dim=2)


def torus_real_path(s):
    """Real path phi_s with rho_t = e+ phi_t + e- phi_-t for the AdS family."""
    a = np.diag([np.exp(_UA / 2), np.exp(-_UA / 2)])
    return [a, rot2(np.arcsin(s) / 2)]


def _fixed_timelike(m):
    _, _, vt = np.linalg.svd(m - np.eye(3))
    x = vt[-1]
    return x if x[0] > 0 else -x


def polygon_angle_sum(verts, Q):
    """Sum of interior angles of a closed geodesic polygon (unit timelike vertices)."""
    def tangent(x, y):
        u = y + (x @ Q @ y) * x
        return u / np.sqrt(u @ Q @ u)
    n = len(verts)
    total = 0.0
    for i in range(n):
        u = tangent(verts[i], verts[i - 1])
        w = tangent(verts[i], verts[(i + 1) % n])
        total += np.arccos(np.clip(u @ Q @ w, -1.0, 1.0))
    return float(total)


def torus_quadrilateral(t):
    """Fundamental quadrilateral P, b^-1 P, a^-1 b^-1 P, b a^-1 b^-1 P around the
    cone point P = Fix[a, b]; a and b pair its opposite sides."""
    if t <= 0:
        raise ContractError("the cone-angle polygon needs t > 0")
    rep = torus_rep(t)
    A = to_projective4(rep.images["a"], 2).m
    B = to_projective4(rep.images["b"], 2).m
    Ai, Bi = np.linalg.inv(A), np.linalg.inv(B)
    Q = eta(1.0, 2)
    P = _fixed_timelike(A @ B @ Ai @ Bi)
    verts = []
    for v in (P, Bi @ P, Ai @ Bi @ P, B @ Ai @ Bi @ P):
        v = v / np.sqrt(-(v @ Q @ v))
        verts.append(v if v[0] > 0 else -v)
    return verts, Q


def _rotation_about(x, theta, Q):
    f1, f2 = _orthonormal_complement(x[:, None], Q)[:2]
    if np.linalg.det(np.column_stack([x, f1, f2])) < 0:
        f2 = -f2
    c, s = np.cos(theta), np.sin(theta)
    P1 = np.outer(f1, f1 @ Q) + np.outer(f2, f2 @ Q)
    Rt = np.outer(f2, f1 @ Q) - np.outer(f1, f2 @ Q)
    return np.eye(len(x)) + (c - 1) * P1 + s * Rt


def torus_lifted_rotation(t, steps=64):
    """Lifted rotational part of the commutator around the cone point.

    The developed meridian turns through the corners of the fundamental
    quadrilateral, so the rotation about P runs continuously from 0 to the
    corner-angle sum; the end of that path must be the commutator itself.
    """
    verts, Q = torus_quadrilateral(t)
    P = verts[0]
    total = polygon_angle_sum(verts, Q)
    com = to_projective4(evaluate_word(torus_rep(t), TORUS_COMMUTATOR), 2).m
    path = [_rotation_about(P, u * total, Q) for u in np.linspace(0.0, 1.0, steps + 1)]
    end_err = _signed_err(path[-1], com)
    if end_err > 1e-8:
        raise ConstructionFailed(f"rotation path misses the commutator by {end_err:.3e}",
                                 ("commutator", end_err))
    return rotation_angle(path=path, base_point=P), end_err


def torus_invariant(t, rep=None):
    rep = torus_rep(t) if rep is None else rep
    com = evaluate_word(rep, TORUS_COMMUTATOR)
    if t > 0:
        return "cone_angle", torus_lifted_rotation(t)[0].angle
    p = to_projective4(com, 2)
    if t < 0:
        return "tachyon_mass", tachyon_mass(p, _fixed_timelike(p.m))
    return "inf_cone_angle", infinitesimal_cone_angle(p.m)


def _order(ts, errs):
    return float(np.polyfit(np.log(np.abs(ts)), np.log(np.maximum(errs, 1e-300)), 1)[0])


def torus_scenario(t_grid=(-1e-2, -1e-3, 0.0, 1e-3, 1e-2)):
    if not (min(t_grid) < 0 < max(t_grid)):
        raise ContractError("torus grid must straddle 0")
    rows = []
    for t in t_grid:
        rep = torus_rep(t)
        kind, val = torus_invariant(t, rep)
        rows.append(TransitionRow(float(t), float(np.sign(t)), relation_residual(rep), kind,
                                  float(val), HYP if t > 0 else (ADS if t < 0 else HP), rep))
    hp = torus_rep(0.0)
    small = (1e-2, 1e-3, 1e-4)
    hyp_check = rescaled_limit_check(torus_rep, hp, small)
    ads_check = rescaled_limit_check(torus_rep, hp, tuple(-t for t in small))
    com_hp = to_projective4(evaluate_word(hp, TORUS_COMMUTATOR), 2).m
    errs_h, errs_a = [], []
    for t in small:
        com = to_projective4(evaluate_word(torus_rep(t), TORUS_COMMUTATOR), 2)
        errs_h.append(_signed_err(conjugate_by_rescaling(com.m, t), TORUS_HP_COMMUTATOR))
        com = to_projective4(evaluate_word(torus_rep(-t), TORUS_COMMUTATOR), 2)
        errs_a.append(_signed_err(conjugate_by_path_rescaling(com.m, -t), TORUS_HP_COMMUTATOR))
    theta = torus_invariant(1e-4)[1]
    principal = rotation_angle(evaluate_word(torus_rep(1e-4), TORUS_COMMUTATOR), dim=2).angle
    extra = {
        "hp_b": to_projective4(hp.images["b"], 2).m.tolist(),
        "hp_commutator": com_hp.tolist(),
        "hp_commutator_error": _signed_err(com_hp, TORUS_HP_COMMUTATOR),
        "commutator_order_hyp": _order(small, errs_h),
        "commutator_order_ads": _order(small, errs_a),
        "angle_rate": float((theta - 2 * np.pi) / 1e-4),
        "lift_vs_principal": float(abs(theta - 2 * np.pi - principal)),
        "limit_hyp": hyp_check.to_json(),
        "limit_ads": ads_check.to_json(),
    }
    return TransitionReport(rows, extra)


def _signed_err(a, b):
    a = np.asarray(a)
    return float(min(np.abs(a - b).max(), np.abs(a + b).max()))


# --------------------------------------------------------------------------
# (2, m, m)

TWO_MM_GENERATORS = ("alpha", "beta", "mu")


def _free_reduce(w):
    out = []
    for k in w:
        if out and out[-1] == -k:
            out.pop()
        else:
            out.append(k)
    return tuple(out)


def two_mm_gluing_relators(m):
    """The gluing conditions as words in alpha, beta~, mu.

    g_A = 1, g_D = mu, g_B = t = (beta~ alpha)^-1, g_C = alpha^-1 mu alpha t.
    Order-two fiber conditions first, then the four meridian conditions.
    """
    al, be, mu = (1,), (2,), (3,)
    inv = invert_word
    gD, gB = mu, inv(be + al)
    gC = inv(al) + mu + al + gB
    bm, am = be * m, al * m
    words = [
        inv(gC) + gD + inv(bm) + inv(gB),
        gD + inv(gC) + inv(am) + inv(gB),
        gD + inv(bm) + inv(gB) + inv(gC),
        inv(gB) + gD + inv(gC) + inv(am),
        gD + inv(al + gC + inv(gB) + inv(al)),
        gD + inv(bm) + am + inv(al + gC + inv(bm) + inv(gB) + am + inv(al)),
        inv(gB) + gC + inv(am + gC + inv(bm) + inv(gB)),
        gD + inv(bm) + inv(gB) + am + gC + inv(gD) + inv(gC + inv(gB)),
    ]
    return tuple(_free_reduce(w) for w in words)


def two_mm_presentation(m):
    return Presentation(TWO_MM_GENERATORS, two_mm_gluing_relators(m))


def longitude_word():
    return (-1, -2, 1, 2)


@dataclass(frozen=True, eq=False)
class TwoMMReport:
    m: int
    theta_dot: float
    R: float
    alpha: GroupElem
    beta: GroupElem
    mu: GroupElem
    residuals: dict
    phi: float
    phi_formula: float
    epsilon: float
    lines: dict
    fiber_coords: dict
    ordering: dict
    rep: Representation = None
    extra: dict = field(default_factory=dict)

    @property
    def valid(self):
        return max(self.residuals.values()) < 1e-8 and all(self.ordering.values())

    def worst(self):
        name = max(self.residuals, key=self.residuals.get)
        return name, self.residuals[name]

    def to_json(self):
        return {"m": self.m, "theta_dot": self.theta_dot, "R": self.R, "phi": self.phi,
                "phi_formula": self.phi_formula, "epsilon": self.epsilon,
                "residuals": dict(self.residuals),
                "fiber_coords": dict(self.fiber_coords),
                "ordering": {k: bool(v) for k, v in self.ordering.items()},
                "representation": self.rep.to_json()}


def _hp(A, a):
    """A + A a sigma as a GroupElem over B_0."""
    return GroupElem.from_arrays(A, A @ a, B0)


def _pt(d, psi):
    c, s = np.cosh(d), np.sinh(d)
    return np.array([[c + s * np.cos(psi), s * np.sin(psi)],
                     [s * np.sin(psi), c - s * np.cos(psi)]])


def _inf_part(g):
    return np.linalg.solve(np.array(g.re), g.im)


def _fixed_lines(g4):
    """2-plane spanned by the eigenvectors of eigenvalues e^{+-d} (d > 0)."""
    w, V = np.linalg.eig(g4)
    w = np.real(w)
    i, j = int(np.argmax(w)), int(np.argmin(np.abs(w)))
    return np.real(np.column_stack([V[:, i], V[:, j]]))


def build_2mm(m, theta_dot=1.0, rate_factor=1.0, strict=True):
    """Assemble the (2, m, m) half-pipe holonomy and verify its equations.

    alpha rotates by 2 pi/m about p (the origin) with infinitesimal
    eigen-angle rate theta_dot.  beta~ is conjugate to alpha by an order-two
    element about the edge midpoint u whose infinitesimal displacement is
    solved from the rate relation 2 thdot_{ba} = m cosh R thdot (scaled by
    ``rate_factor`` to break it on purpose).  mu is the square root of the
    pure infinitesimal alpha^-m beta~^m.
    """
    m = int(m)
    if m < 5:
        raise RightAngleImpossible("a right-angled regular m-gon needs m >= 5 (cot(pi/m) > 1)")
    if theta_dot <= 0:
        raise ContractError("theta_dot must be positive")
    R = float(np.arccosh(1 / np.tan(np.pi / m)))
    r_in = float(np.arccosh(np.cos(np.pi / 4) / np.sin(np.pi / m)))
    A = rot2(np.pi / m)
    r = _pt(R, 0.0)
    u = _pt(r_in, np.pi / m)
    K = sqrtm_pd(u)
    Ki = np.linalg.inv(K)
    Ru = K @ rot2(np.pi / 2) @ Ki
    T = K @ np.diag([0.5, -0.5]) @ Ki
    alpha = _hp(A, theta_dot * J)

    def beta_of(eps):
        Rr = _hp(Ru, eps * T)
        return Rr @ alpha @ Rr.inv()

    def thdot(g, X=r):
        # eigen-angle rate of the infinitesimal part at the fixed point X
        return 0.5 * rot(_inf_part(g), X)

    target = rate_factor * m * np.cosh(R) * theta_dot / 2
    f0 = thdot(beta_of(0.0) @ alpha) - target
    f1 = thdot(beta_of(1.0) @ alpha) - target
    eps = -f0 / (f1 - f0)
    beta = beta_of(eps)
    q = alpha ** (-m) @ beta ** m
    if np.abs(np.abs(q.re) - np.eye(2)).max() > 1e-9:
        raise ConstructionFailed("alpha^-m beta^m is not a pure infinitesimal", ("mu", 1.0))
    mu = _hp(np.eye(2), 0.5 * _inf_part(q))
    one = GroupElem.identity(B0)
    pres = two_mm_presentation(m)
    rep = Representation(pres, B0, {"alpha": alpha, "beta": beta, "mu": mu}, 3)

    # gluing maps with g_A = 1
    t_el = (beta @ alpha).inv()
    gA, gD, gB = one, mu, t_el
    gC = alpha.inv() @ mu @ alpha @ t_el
    bm = beta ** m
    am = alpha ** m
    d = group_distance
    res = {
        "eq8_1": d(gA @ gC.inv() @ gD @ bm.inv() @ gB.inv(), one),
        "eq8_2": d(gD @ gC.inv() @ am.inv() @ gA @ gB.inv(), one),
        "eq8_3": d(gD @ bm.inv() @ gB.inv() @ gA @ gC.inv(), one),
        "eq8_4": d(gA @ gB.inv() @ gD @ gC.inv() @ am.inv(), one),
        "eq9_1": d(gD @ gA.inv(), alpha @ gC @ gB.inv() @ alpha.inv()),
        "eq9_2": d(gD @ bm.inv() @ gA.inv() @ am, alpha @ gC @ bm.inv() @ gB.inv() @ am @ alpha.inv()),
        "eq9_3": d(gA @ gB.inv() @ gC @ gA.inv(), am @ gC @ bm.inv() @ gB.inv()),
        "eq9_4": d(gD @ bm.inv() @ gB.inv() @ am @ gC @ gD.inv(), gC @ gB.inv()),
        "eq10_1": d(alpha @ gB @ beta @ gA.inv(), one),
        "eq10_2": d(alpha @ gC @ beta @ gD.inv(), one),
        "reduced_1": d((beta @ alpha) ** 2, bm @ mu.inv() @ alpha.inv() @ mu @ alpha),
        "reduced_2": d((alpha @ beta) ** 2, am @ mu @ beta.inv() @ mu.inv() @ beta),
        "meridian_square": d(mu @ mu, q),
    }
    res["rate_beta_alpha"] = abs(2 * thdot(beta @ alpha) - m * np.cosh(R) * theta_dot)
    ar = A @ r @ A.T
    res["rate_alpha_beta"] = abs(2 * thdot(alpha @ beta, ar) - m * np.cosh(R) * theta_dot)

    # lines
    lon = evaluate_word(rep, longitude_word())
    P4 = {name: to_projective4(g).m for name, g in
          (("alpha", alpha), ("beta", beta), ("mu", mu), ("t", t_el), ("gC", gC), ("lon", lon))}

    def act(g4, L):
        return g4 @ L

    pa, pb, pmu, pt_, pgc = P4["alpha"], P4["beta"], P4["mu"], P4["t"], P4["gC"]
    pam = np.linalg.matrix_power(pa, m)
    pbm = np.linalg.matrix_power(pb, m)
    L2 = _fixed_lines(P4["lon"])
    L1 = act(pb @ pa, L2)
    L4 = act(pb, L2)
    L3 = act(np.linalg.inv(pam), L1)
    L5 = act(pt_, L4)
    H3 = act(np.linalg.inv(pmu), L3)
    H6 = act(np.linalg.inv(pmu), L5)
    L6 = act(pgc, H6)
    lines = {"L1": L1, "L2": L2, "L3": L3, "L4": L4, "L5": L5, "L6": L6, "H3": H3, "H6": H6}
    line_res = {
        "line_mu_L2": _projdist(act(pmu, L2), L2),
        "line_L4": _projdist(L4, act(pt_ @ pb, L1)),
        "line_L5": _projdist(L5, act(pgc, L4)),
        "line_L3": _projdist(L3, act(pgc, L2)),
        "line_alpha_L4": _projdist(act(pa, L4), L1),
        "line_alpha_L5": _projdist(act(pa, L5), L2),
        "line_alpha_L6": _projdist(act(pa, L6), L3),
        "line_beta_H3": _projdist(act(pb, H3), H6),
        "line_alpha_m_L6": _projdist(act(pam, L6), L4),
        "line_beta_m_H3": _projdist(act(pbm, H3), L1),
        "line_beta_m_H6": _projdist(act(pbm, H6), act(pb, L1)),
    }
    res.update(line_res)

    phi = infinitesimal_cone_angle(rep, (3,), longitude_word())
    phi_formula = -np.sqrt(2) * m * theta_dot * np.sqrt(1 / np.tan(np.pi / m) ** 2 - 1)
    res["phi_vs_formula"] = abs(phi - phi_formula)

    # fiber coordinates of the lines where they cross the fiber over r
    rhat = np.array([np.cosh(R), np.sinh(R), 0.0, 0.0])
    fib = np.column_stack([rhat, [0.0, 0.0, 0.0, 1.0]])
    coords = {}
    for name in ("L1", "L2", "L3", "L4", "L5"):
        Lb = lines[name]
        ns = np.linalg.svd(np.column_stack([Lb, -fib]))[2][-1]
        p = Lb @ ns[:2]
        coords[name] = fiber_length_L(p if p[0] > 0 else -p)
    x1, x2, x3 = coords["L1"], coords["L2"], coords["L3"]
    y1, y2 = coords["L4"], coords["L5"]
    gaps = np.array([y2 - x3, x2 - y2, y1 - x2, x1 - y1])
    ordering = {
        "x3<y2<x2<y1<x1": bool(np.all(gaps > 0)),
        "L2_between_L1_L3": bool(min(x1, x3) < x2 < max(x1, x3)),
        "L4_between_L1_L2": bool(min(x1, x2) < y1 < max(x1, x2)),
        "equal_spacing": bool(np.ptp(gaps) < 1e-8 * max(1.0, abs(gaps).max())),
    }
    report = TwoMMReport(m, float(theta_dot), R, alpha, beta, mu, res, float(phi),
                         float(phi_formula), float(eps), lines, coords, ordering, rep,
                         {"gaps": gaps.tolist()})
    if strict:
        name, val = report.worst()
        if val >= 1e-8:
            raise ConstructionFailed(f"equation {name} has residual {val:.3e}", (name, val))
    return report


def two_mm_base(report):
    """(rho0, z) of the HP representation."""
    rep = report.rep
    pres = rep.presentation
    base = {}
    vals = {}
    for n in pres.generators:
        g = rep.images[n]
        A = np.array(g.re)
        base[n] = GroupElem.from_arrays(A, None, 1.0)
        vals[n] = g.im @ np.linalg.inv(A)
    rho0 = Representation(pres, AlgebraTag(1.0), base, 3)
    return rho0, Cocycle(rho0, vals)


def transition_2mm(report, t_grid=(-1e-3, 0.0, 1e-3), check_gate=True, tol=1e-10,
                   limit_ts=(1e-2, 1e-3, 1e-4)):
    rho0, z = two_mm_base(report)
    pres = rho0.presentation
    if check_gate:
        h1 = h1_dimension(pres, rho0)
        if h1.dim != 1:
            raise SmoothnessGateFailed(f"H^1 of the assembled presentation is {h1.dim}, not 1")
    phi = report.phi
    cons = [((3,), phi)]
    rows = []
    lon = longitude_word()
    for t in t_grid:
        t = float(t)
        if t > 0:
            rep = regenerate_hyp(rho0, z, t, cons, tol=tol)
        elif t < 0:
            rep = regenerate_ads(rho0, z, t, cons, tol=tol)
        else:
            rep = report.rep
        kind, val = meridian_invariant(evaluate_word(rep, (3,)), evaluate_word(rep, lon))
        rows.append(TransitionRow(t, float(np.sign(t)), relation_residual(rep), kind, val,
                                  HYP if t > 0 else (ADS if t < 0 else HP), rep))
    extra = {"phi": phi, "m": report.m, "theta_dot": report.theta_dot}
    if limit_ts:
        def hyp(t):
            return regenerate_hyp(rho0, z, t, cons, tol=tol)

        def ads(t):
            return regenerate_ads(rho0, z, t, cons, tol=tol)
        extra["limit_hyp"] = rescaled_limit_check(hyp, report.rep, tuple(limit_ts)).to_json()
        extra["limit_ads"] = rescaled_limit_check(
            ads, report.rep, tuple(-t for t in limit_ts)).to_json()
    return TransitionReport(rows, extra)


# --------------------------------------------------------------------------
# Borromean rings

BORROMEAN = Presentation(("a", "b", "c"), (
    commutator(commutator((1,), (2,)), (3,)),
    commutator(commutator((3,), (-2,)), (1,)),
))
RECT_LENGTH = float(2 * np.arcsinh(1.0))


@dataclass(frozen=True, eq=False)
class BorromeanRep:
    l_a: float
    l_b: float
    phi_angle: float
    branch: str
    x: float
    rep: Representation
    mats: tuple

    def to_json(self):
        return {"l_a": self.l_a, "l_b": self.l_b, "phi": self.phi_angle, "branch": self.branch,
                "x": self.x, "representation": self.rep.to_json()}


def borromean_x(l_a, l_b, phi, branch):
    if branch == "T":
        return 0.0
    c = np.cos(phi)
    if abs(c) < 1e-14:
        # rectangular locus: cot(phi) = 0 exactly
        return 0.0
    return 0.5 / (np.cosh(l_a / 2) * np.cosh(l_b / 2)) * c / np.sin(phi)


def _borromean_mats(l_a, l_b, phi, x):
    A = np.diag([np.exp(l_a / 2), np.exp(-l_a / 2)])
    B = rot2(phi / 2) @ np.diag([np.exp(l_b / 2), np.exp(-l_b / 2)]) @ rot2(-phi / 2)
    C = A @ B @ np.linalg.inv(A) @ np.linalg.inv(B)
    N = C + np.eye(2)
    # kernel of the nilpotent part, then f orthogonal to it
    _, _, vt = np.linalg.svd(N)
    k = vt[-1]
    f = np.array([-k[1], k[0]])
    e = N @ f
    Q = np.column_stack([e, f])
    Q = Q / np.sqrt(abs(np.linalg.det(Q)))
    Qi = np.linalg.inv(Q)
    a, b = Qi @ A @ Q, Qi @ B @ Q
    c = np.array([[-1.0, x], [0.0, -1.0]])
    return [a, b, c]


def _borromean_residual(mats):
    from .reps import word_matrix
    out = 0.0
    for r in BORROMEAN.relators:
        W = word_matrix(mats, r)
        out = max(out, min(np.abs(W - np.eye(2)).max(), np.abs(W + np.eye(2)).max()))
    return out


def borromean_rep_phi(l_a, phi, branch="R", polish=True):
    """Chart (l_a, phi): l_b is fixed by sinh(l_a/2) sinh(l_b/2) sin(phi) = 1."""
    if branch not in ("T", "R"):
        raise ContractError("branch must be 'T' or 'R'")
    prod = np.sinh(l_a / 2) * np.sin(phi)
    if prod <= 0:
        raise NoParabolicAngle("no parabolic commutator for these parameters")
    l_b = float(2 * np.arcsinh(1 / prod))
    return _borromean(l_a, l_b, phi, branch, polish)


def borromean_rep(l_a, l_b, branch="R", polish=True):
    p = np.sinh(l_a / 2) * np.sinh(l_b / 2)
    if p < 1:
        raise NoParabolicAngle(f"sinh(l_a/2) sinh(l_b/2) = {p:.6g} < 1")
    phi = float(np.arcsin(1 / p)) if 1 / p < 1 - 1e-15 else np.pi / 2
    return _borromean(l_a, l_b, phi, branch, polish)


def _borromean(l_a, l_b, phi, branch, polish):
    x = borromean_x(l_a, l_b, phi, branch)
    mats = _borromean_mats(l_a, l_b, phi, x)
    if branch == "R" and polish and x != 0.0:
        # secant polish of x on the second relator
        def f(xx):
            from .reps import word_matrix
            W = word_matrix(_borromean_mats(l_a, l_b, phi, xx), BORROMEAN.relators[1])
            W = W if np.trace(W) > 0 else -W
            return W[0, 1] if abs(W[0, 1]) > abs(W[1, 0]) else W[0, 1] + W[1, 0]
        x0, x1 = x, x * (1 + 1e-6)
        f0, f1 = f(x0), f(x1)
        for _ in range(20):
            if f1 == f0 or abs(f1) < 1e-15:
                break
            x0, x1, f0 = x1, x1 - f1 * (x1 - x0) / (f1 - f0), f1
            f1 = f(x1)
        x = float(x1)
        mats = _borromean_mats(l_a, l_b, phi, x)
    rep = Representation.from_matrices(BORROMEAN, 1.0, mats)
    return BorromeanRep(float(l_a), float(l_b), float(phi), branch, float(x), rep, tuple(mats))


@dataclass(frozen=True, eq=False)
class FlexibilityReport:
    eps: float
    ts: list
    ads_residuals: list
    ads_limit: dict
    hyp: list
    hyp_converged_eps0: bool
    obstructed_all: bool

    def to_json(self):
        return {"eps": self.eps, "t": self.ts, "ads_residuals": self.ads_residuals,
                "ads_limit": self.ads_limit, "hyp": self.hyp,
                "obstructed_all": self.obstructed_all}


def borromean_tangents(l_a=RECT_LENGTH, phi0=np.pi / 2, h=1e-5):
    """Central differences along each branch in the (l_a, phi) chart."""
    def d(branch):
        p = borromean_rep_phi(l_a, phi0 + h, branch).mats
        q = borromean_rep_phi(l_a, phi0 - h, branch).mats
        return [(x - y) / (2 * h) for x, y in zip(p, q)]
    base = borromean_rep_phi(l_a, phi0, "T")
    return base, d("R"), d("T")


def _tangent_cocycle(rho0, mats0, tangent):
    vals = {n: tv @ np.linalg.inv(m0)
            for n, m0, tv in zip(rho0.presentation.generators, mats0, tangent)}
    for v in vals.values():
        v -= 0.5 * np.trace(v) * np.eye(2)
    return Cocycle(rho0, vals)


OBSTRUCTION_CAP = 10.0


def borromean_flexibility(eps, t_grid=(-1e-2, -1e-3, -1e-4, 1e-3), w_grid=None,
                          cap=OBSTRUCTION_CAP):
    base, vR, uT = borromean_tangents()
    rho0 = base.rep
    mats0 = list(base.mats)
    v = _tangent_cocycle(rho0, mats0, vR)
    u = _tangent_cocycle(rho0, mats0, uT)
    Z = v + eps * u
    rho_hp = hp_from_cocycle(rho0, Z)
    l_a, phi0 = base.l_a, base.phi_angle

    def ads(t):
        sig = borromean_rep_phi(l_a, phi0 + 2 * t, "R").mats
        mu = borromean_rep_phi(l_a, phi0 - 2 * eps * t, "T").mats
        return combine_idempotent(sig, mu, BORROMEAN, -1.0)

    neg = [t for t in t_grid if t < 0]
    pos = [t for t in t_grid if t > 0]
    ads_res = [relation_residual(ads(t)) for t in neg]
    ads_limit = rescaled_limit_check(ads, rho_hp, tuple(neg)).to_json() if len(neg) >= 2 else {}
    if w_grid is None:
        w_grid = [(a, b) for a in (-1.0, 0.0, 1.0) for b in (-1.0, 0.0, 1.0)]
    cusp = TraceConstraint(commutator((1,), (2,)), -2.0, squared=False)
    hyp = []
    for t in pos:
        for a, b in w_grid:
            w = a * v + b * u
            try:
                rep, info = regenerate_hyp(rho0, Z, t, [cusp], real_dir=w, cap=cap,
                                           return_info=True)
                hyp.append({"t": t, "w": [a, b], "converged": True,
                            "residual": info.residual, "correction": info.correction})
            except Obstructed as exc:
                hyp.append({"t": t, "w": [a, b], "converged": False,
                            "residual": exc.residual})
    eps0 = [h for h in hyp if h["w"] == [0.0, 0.0]]
    return FlexibilityReport(float(eps), list(t_grid), ads_res, ads_limit, hyp,
                             bool(eps0 and all(h["converged"] for h in eps0)),
                             bool(hyp and all(not h["converged"] for h in hyp)))
