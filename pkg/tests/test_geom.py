import numpy as np
import pytest

from geotransit.algebra import AlgebraTag, BElem, rescale_algebra
from geotransit.errors import ContractError, InvalidRescale, NotInterior
from geotransit.geom import (IDEAL, INTERIOR, EXTERIOR, GroupElem, ModelPoint, act,
                             classify_point, conjugate_by_path_rescaling,
                             conjugate_by_rescaling, eta, group_distance, herm_inner, hp_v_row,
                             normalize_hyperboloid, random_group_elem, rescaling_matrix,
                             to_projective4)

S_NONZERO = (1.0, 0.5, -0.5, -1.0)


def proj_err(a, b):
    return min(np.abs(a - b).max(), np.abs(a + b).max())


def test_herm_inner_examples():
    assert herm_inner(ModelPoint.of([1, 0, 0, 0]), ModelPoint.of([1, 0, 0, 0])) == -1
    assert herm_inner(ModelPoint.of([0, 1, 0, 0]), ModelPoint.of([0, 1, 0, 0])) == 1
    X = ModelPoint.from_hermitian(np.diag([2.0, 0.0]), np.zeros((2, 2)))
    assert herm_inner(X, X) == 0


def test_herm_inner_is_minus_det(rng):
    for s in S_NONZERO + (0.0,):
        x = ModelPoint.of(rng.normal(size=4), s)
        re, im = x.hermitian()
        k2 = AlgebraTag(s).kappa_sq
        det = re[0, 0] * re[1, 1] - (re[0, 1] * re[1, 0] + k2 * im[0, 1] * im[1, 0])
        assert herm_inner(x, x) == pytest.approx(-det, abs=1e-12)


def test_act_examples():
    X = ModelPoint.of([1, 0, 0, 0], 1.0)
    assert np.allclose(act(GroupElem.identity(1.0), X).x, X.x)
    t = 0.7
    A = GroupElem.from_arrays(np.diag([np.exp(t / 2), np.exp(-t / 2)]), None, 1.0)
    re, _ = act(A, X).hermitian()
    assert np.allclose(re, np.diag([np.exp(t), np.exp(-t)]))
    a = np.array([[0, -0.5], [0.5, 0]])
    g = GroupElem.from_arrays(np.eye(2), a, 0.0)
    assert np.allclose(act(g, ModelPoint.of([1, 0, 0, 0], 0.0)).x, [1, 0, 0, 1])


@pytest.mark.parametrize("s", S_NONZERO)
def test_isomorphism_and_homomorphism(s, rng):
    Q = eta(s)
    for _ in range(200):
        A, B = random_group_elem(rng, s), random_group_elem(rng, s)
        m = to_projective4(A).m
        assert np.abs(m.T @ Q @ m - Q).max() < 1e-9 * max(1.0, np.abs(m).max() ** 2)
        assert proj_err(to_projective4(A @ B).m, m @ to_projective4(B).m) < 1e-9 * max(
            1.0, np.abs(m).max() * np.abs(to_projective4(B).m).max())


def test_hp_block_form_and_v_row(rng):
    Q3 = np.diag([-1.0, 1.0, 1.0])
    for _ in range(200):
        g = random_group_elem(rng, 0.0)
        m = to_projective4(g).m
        assert np.abs(m[:3, 3]).max() < 1e-12
        Phi = m[:3, :3]
        assert np.abs(Phi.T @ Q3 @ Phi - Q3).max() < 1e-9 * max(1.0, np.abs(Phi).max() ** 2)
        v, c = hp_v_row(g.re, g.im)
        sgn = np.sign(m[3, 3] * c)
        assert np.abs(m[3, :3] - sgn * v).max() < 1e-9 * max(1.0, np.abs(v).max())
        assert abs(abs(m[3, 3]) - abs(c)) < 1e-12


def test_v_row_of_pure_infinitesimal():
    e, f, g_, h = 0.3, -1.1, 0.7, -0.3
    G = GroupElem.from_arrays(np.eye(2), [[e, f], [g_, h]], 0.0)
    v, c = hp_v_row(np.eye(2), np.array([[e, f], [g_, h]]))
    assert np.allclose(to_projective4(G).m[3, :3], v)
    assert c == 1.0


def test_identity_maps():
    for s in S_NONZERO + (0.0,):
        assert np.allclose(to_projective4(GroupElem.identity(s)).m, np.eye(4))


def test_rescaling_matrix_examples():
    assert np.allclose(rescaling_matrix(1.0), np.eye(4))
    assert np.allclose(rescaling_matrix(0.5), np.diag([1, 1, 1, 2.0]))
    assert np.allclose(rescaling_matrix(-2.0), np.diag([1, 1, 1, 0.5]))
    assert np.allclose(rescaling_matrix(0.5, dim=2), np.diag([1, 1, 2.0]))
    with pytest.raises(InvalidRescale):
        rescaling_matrix(0.0)


def test_torus_rescaled_generator():
    for t in (0.3, 1e-2, 1e-4):
        c = np.sqrt(1 + t * t)
        m = np.array([[c, 0, t], [0, 1, 0], [t, 0, c]])
        out = conjugate_by_rescaling(m, t)
        assert np.abs(out - [[c, 0, t * t], [0, 1, 0], [1, 0, c]]).max() < 1e-12
    assert np.allclose(conjugate_by_rescaling(np.eye(4), 0.3), np.eye(4))


def test_path_rescaling_keeps_sign():
    m = np.array([[1.0, 0, 0.2], [0, 1, 0], [0.3, 0, 1]])
    out = conjugate_by_path_rescaling(m, -0.1)
    assert np.allclose(out[2, 0], -3.0) and np.allclose(out[0, 2], -0.02)


@pytest.mark.parametrize("s", [0.5, 2.0, -0.5, -2.0])
def test_commutative_square(s, rng):
    unit = float(np.sign(s))
    for _ in range(100):
        A = random_group_elem(rng, unit)
        B = GroupElem.from_arrays(A.re, A.im / abs(s), s)
        lhs = to_projective4(B).m
        rhs = conjugate_by_rescaling(to_projective4(A).m, s)
        assert proj_err(lhs, rhs) < 1e-9 * max(1.0, np.abs(rhs).max())
        z = rescale_algebra(BElem(A.re[0, 1], A.im[0, 1], AlgebraTag(unit)), s)
        assert np.isclose(z.im, A.im[0, 1] / abs(s))


@pytest.mark.parametrize("s", S_NONZERO + (0.0,))
def test_act_preserves_inner_and_class(s, rng):
    for _ in range(200):
        A = random_group_elem(rng, s)
        x = ModelPoint.of(rng.normal(size=4), s)
        y = ModelPoint.of(rng.normal(size=4), s)
        ax, ay = act(A, x), act(A, y)
        scale = max(1.0, np.linalg.norm(ax.x) * np.linalg.norm(ay.x))
        assert abs(herm_inner(ax, ay) - herm_inner(x, y)) < 1e-10 * scale
        if abs(herm_inner(x, x)) > 1e-6 * np.dot(x.x, x.x):
            assert classify_point(ax) == classify_point(x)


def test_classify_examples():
    for s in S_NONZERO + (0.0,):
        assert classify_point(ModelPoint.of([1, 0, 0, 0], s)) == INTERIOR
        assert classify_point(ModelPoint.of([1, 1, 0, 0], s)) == IDEAL
    assert classify_point(ModelPoint.of([0, 0, 0, 1], -1.0)) == INTERIOR
    assert classify_point(ModelPoint.of([0, 1, 0, 0], 1.0)) == EXTERIOR
    with pytest.raises(ContractError):
        classify_point(ModelPoint.of([0, 0, 0, 0], 1.0))


def test_normalize_hyperboloid_examples():
    assert np.allclose(normalize_hyperboloid(ModelPoint.of([2, 0, 0, 0])).x, [1, 0, 0, 0])
    assert np.allclose(normalize_hyperboloid(ModelPoint.of([2, 1, 0, 0])).x,
                       np.array([2, 1, 0, 0]) / np.sqrt(3))
    with pytest.raises(NotInterior):
        normalize_hyperboloid(ModelPoint.of([1, 0, 0, 1], 1.0))


def test_canonical_representative_and_distance(rng):
    for s in S_NONZERO + (0.0,):
        A = random_group_elem(rng, s)
        B = GroupElem.from_arrays(-3.0 * A.re, -3.0 * A.im, s)
        assert np.allclose(A.re, B.re) and np.allclose(A.im, B.im)
        assert group_distance(A, B) < 1e-13
        assert group_distance(A @ A.inv(), GroupElem.identity(s)) < 1e-12


def test_singular_det_rejected():
    with pytest.raises(Exception):
        GroupElem.from_arrays([[1, 1], [1, 1]], None, 1.0)


def test_group_elem_json_round_trip(rng):
    A = random_group_elem(rng, -0.5)
    obj = A.to_json()
    assert set(obj) == {"det_sign", "entries"}
    B = GroupElem.from_json(obj, -0.5)
    assert group_distance(A, B) < 1e-14


def test_dim2_slice():
    A = GroupElem.from_arrays(np.diag([2.0, 0.5]), None, 1.0)
    m = to_projective4(A, dim=2).m
    assert m.shape == (3, 3)
    with pytest.raises(ContractError):
        to_projective4(GroupElem.from_arrays([[1, 1], [0, 1]], None, 1.0), dim=2)
