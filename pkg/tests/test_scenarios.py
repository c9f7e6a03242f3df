import numpy as np
import pytest

from geotransit.errors import ContractError, NoParabolicAngle, RightAngleImpossible
from geotransit.geom import to_projective4
from geotransit.reps import ADS, HP, HYP, evaluate_word, h1_dimension, relation_residual
from geotransit.scenarios import (BORROMEAN, RECT_LENGTH, TORUS_COMMUTATOR,
                                  TORUS_HP_COMMUTATOR, borromean_flexibility, borromean_rep,
                                  borromean_rep_phi, borromean_x, build_2mm, polygon_angle_sum,
                                  torus_lifted_rotation, torus_printed, torus_printed_rescaled,
                                  torus_quadrilateral, torus_rep, torus_scenario, transition_2mm,
                                  two_mm_base, two_mm_presentation)


def phi_closed_form(m, thdot=1.0):
    return -np.sqrt(2) * m * thdot * np.sqrt(1 / np.tan(np.pi / m) ** 2 - 1)


@pytest.fixture(scope="module")
def mm5():
    return build_2mm(5, 1.0)


@pytest.fixture(scope="module")
def torus_report():
    return torus_scenario()


# ---------------------------------------------------------------- torus

@pytest.mark.parametrize("t", [0.3, 1e-2, -1e-2, -0.4])
def test_torus_matches_displayed_matrices(t):
    a, b = torus_printed(t)
    rep = torus_rep(t)
    assert np.abs(to_projective4(rep.images["a"], 2).m - a).max() < 1e-12
    assert np.abs(to_projective4(rep.images["b"], 2).m - b).max() < 1e-12


def test_torus_rescaled_b():
    from geotransit.geom import conjugate_by_rescaling
    for t in (0.2, 1e-3):
        _, b = torus_printed(t)
        assert np.abs(conjugate_by_rescaling(b, t) - torus_printed_rescaled(t)).max() < 1e-12


def test_torus_report(torus_report):
    ex = torus_report.extra
    assert np.allclose(ex["hp_b"], [[1, 0, 0], [0, 1, 0], [1, 0, 1]], atol=1e-14)
    assert ex["hp_commutator_error"] < 1e-12
    assert np.allclose(ex["hp_commutator"], TORUS_HP_COMMUTATOR, atol=1e-12)
    assert ex["commutator_order_hyp"] >= 0.9 and ex["commutator_order_ads"] >= 0.9
    assert abs(ex["angle_rate"] + 2) < 1e-3
    assert ex["limit_hyp"]["passed"] and ex["limit_ads"]["passed"]
    kinds = {r.classification: r.invariant_kind if hasattr(r, "invariant_kind") else r.kind
             for r in torus_report.rows}
    assert kinds == {HYP: "cone_angle", HP: "inf_cone_angle", ADS: "tachyon_mass"}


def test_torus_invariants_linear_in_t(torus_report):
    for row in torus_report.rows:
        if row.t > 0:
            assert abs(row.value - (2 * np.pi - 2 * row.t)) < 10 * row.t ** 2
        elif row.t < 0:
            assert abs(row.value - (-2.0) * row.t) < 10 * row.t ** 2
        else:
            assert row.value == pytest.approx(-2.0, abs=1e-12)


def test_torus_lifted_angle_is_near_two_pi():
    for t in (1e-1, 1e-2):
        ang, end_err = torus_lifted_rotation(t)
        assert end_err < 1e-12
        assert abs(ang.angle - 2 * np.pi) < 3 * t
        verts, Q = torus_quadrilateral(t)
        assert ang.angle == pytest.approx(polygon_angle_sum(verts, Q), abs=1e-12)


def test_torus_contract():
    with pytest.raises(ContractError):
        torus_scenario((1e-3, 1e-2))
    with pytest.raises(ContractError):
        torus_quadrilateral(-1e-2)
    assert relation_residual(torus_rep(0.2)) == 0.0
    com = evaluate_word(torus_rep(0.0), TORUS_COMMUTATOR)
    assert np.abs(to_projective4(com, 2).m - TORUS_HP_COMMUTATOR).max() < 1e-12


# ---------------------------------------------------------------- (2, m, m)

def test_2mm_m5_values(mm5):
    assert mm5.R == pytest.approx(np.arccosh(1 / np.tan(np.pi / 5)), abs=1e-15)
    assert mm5.R == pytest.approx(0.84248, abs=1e-5)
    assert mm5.phi == pytest.approx(-6.6873, abs=5e-4)
    assert abs(mm5.phi - phi_closed_form(5)) < 1e-10
    assert mm5.residuals["meridian_square"] < 1e-10
    assert np.sinh(mm5.R) == pytest.approx(np.sqrt(1 / np.tan(np.pi / 5) ** 2 - 1), abs=1e-14)


@pytest.mark.parametrize("m", range(5, 13))
def test_2mm_all_m(m):
    rpt = build_2mm(m, 1.0)
    name, worst = rpt.worst()
    assert worst < 1e-8, name
    assert abs(rpt.phi - phi_closed_form(m)) < 1e-10
    assert rpt.phi < 0
    assert all(rpt.ordering.values()), rpt.ordering
    assert rpt.valid


def test_2mm_theta_dot_scaling():
    rpt = build_2mm(6, 2.5)
    assert abs(rpt.phi - phi_closed_form(6, 2.5)) < 1e-9


def test_2mm_broken_rate_is_detected():
    rpt = build_2mm(5, 1.0, rate_factor=1.1, strict=False)
    assert rpt.worst()[1] > 1e-4
    assert not rpt.valid


def test_2mm_contract():
    with pytest.raises(RightAngleImpossible):
        build_2mm(4)
    with pytest.raises(ContractError):
        build_2mm(5, -1.0)


def test_2mm_json(mm5):
    doc = mm5.to_json()
    assert {"m", "theta_dot", "R", "phi", "residuals"} <= set(doc)
    assert doc["m"] == 5


def test_2mm_h1_on_gluing_presentation(mm5):
    rho0, z = two_mm_base(mm5)
    h = h1_dimension(two_mm_presentation(5), rho0)
    assert (h.dim, h.z1, h.b1) == (1, 4, 3)


def test_2mm_transition(mm5):
    phi = mm5.phi
    tr = transition_2mm(mm5, (-1e-3, 0.0, 1e-3))
    rows = {r.classification: r for r in tr.rows}
    assert rows[HP].kind == "inf_cone_angle" and rows[HP].value == pytest.approx(phi, abs=1e-9)
    hyp = rows[HYP]
    assert abs((2 * np.pi - hyp.value) / hyp.t - abs(phi)) < 0.05 * abs(phi)
    ads = rows[ADS]
    assert abs(ads.value - phi * ads.t) < 1e-8
    for r in tr.rows:
        assert r.residual < 1e-9
    assert tr.extra["limit_hyp"]["passed"] and tr.extra["limit_ads"]["passed"]


# ---------------------------------------------------------------- Borromean

def test_borromean_rectangular_locus():
    T = borromean_rep(RECT_LENGTH, RECT_LENGTH, "T")
    R = borromean_rep(RECT_LENGTH, RECT_LENGTH, "R")
    assert T.x == 0.0 and R.x == 0.0
    assert T.phi_angle == pytest.approx(np.pi / 2)
    for a, b in zip(T.mats, R.mats):
        assert np.array_equal(a, b)


def test_borromean_branch_T_identity_offset():
    b = borromean_rep(2.0, 2.2, "T")
    assert b.x == 0.0
    assert relation_residual(b.rep) < 1e-12


def test_borromean_branch_R_formula():
    b = borromean_rep(2.0, 2.2, "R")
    x0 = borromean_x(2.0, 2.2, b.phi_angle, "R")
    assert x0 == pytest.approx(0.5 / (np.cosh(1.0) * np.cosh(1.1)) / np.tan(b.phi_angle))
    assert abs(b.x - x0) < 1e-9 * max(1.0, abs(x0))
    assert b.x != 0.0
    assert relation_residual(b.rep) < 1e-10


def test_borromean_grid():
    worst = 0.0
    for la in np.linspace(1.8, 3.5, 10):
        for lb in np.linspace(1.8, 3.5, 10):
            for br in ("T", "R"):
                b = borromean_rep(la, lb, br)
                prod = np.sinh(la / 2) * np.sinh(lb / 2) * np.sin(b.phi_angle)
                assert abs(prod - 1) < 1e-10
                worst = max(worst, relation_residual(b.rep))
    assert worst < 1e-10


def test_borromean_contract():
    with pytest.raises(NoParabolicAngle):
        borromean_rep(1.0, 1.0)
    with pytest.raises(ContractError):
        borromean_rep_phi(2.0, 1.0, "Q")
    rep = borromean_rep_phi(2.0, 1.2, "R")
    assert abs(np.sinh(1.0) * np.sinh(rep.l_b / 2) * np.sin(1.2) - 1) < 1e-12


def test_flexibility_eps0_converges():
    rpt = borromean_flexibility(0.0, (-1e-3, -1e-4, 1e-3), w_grid=[(0.0, 0.0)])
    assert rpt.hyp_converged_eps0
    assert rpt.hyp[0]["residual"] < 1e-12
    assert max(rpt.ads_residuals) < 1e-9


def test_flexibility_eps_tenth_obstructed():
    rpt = borromean_flexibility(0.1, (-1e-2, -1e-3, -1e-4, 1e-3))
    assert rpt.obstructed_all
    assert all(h["residual"] > 1e-6 for h in rpt.hyp)
    assert max(rpt.ads_residuals) < 1e-9
    assert rpt.ads_limit["passed"]
    assert len(rpt.hyp) == 9
    assert BORROMEAN.rank == 3
