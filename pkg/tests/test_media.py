import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from complex_em.balance import em_tensor4
from complex_em.fields import ComplexPair, FieldPoint, build_P, build_Q
from complex_em.lorentz import BoostSpec, boost_matrix
from complex_em.media import (
    MediumSpec, constitutive_R, field_tensor, fields_from_R, inverse_identity_check, minkowski_constitutive,
    moving_em_tensor, permeability_tensor, qp_from_F, random_media, rest_constitutive,
)

from conftest import max_abs
from helpers import EPS_UP, F_literal, G, textbook_boost

media_st = st.builds(
    lambda e, m, v: MediumSpec(epsilon=e, mu=m, v=v),
    st.floats(1.0, 5.0), st.floats(1.0, 5.0),
    hnp.arrays(np.float64, 3, elements=st.floats(-0.5, 0.5)),
)


def hand_permeability(m):
    u = m.u_up
    k = m.epsilon * m.mu - 1
    a = G + k * np.outer(u, u)
    return np.einsum("ls,nt->lnst", a, a) / m.mu


def D_H_from_R(R):
    D = -R[0, 1:]
    H = -np.array([R[2, 3], R[3, 1], R[1, 2]])
    return D, H


def test_medium_spec_validation_and_four_velocity():
    m = MediumSpec(2.0, 3.0, v=np.array([0, 0.5, 0]))
    assert abs(m.kappa - 5.0) == 0.0
    u = m.u_up
    assert abs(u @ G @ u - 1) <= 1e-13
    with pytest.raises(ValueError):
        MediumSpec(0.0, 1.0)
    with pytest.raises(ValueError):
        MediumSpec(1.0, 1.0, v=np.array([1.0, 0, 0]))
    with pytest.raises(ValueError):
        MediumSpec(1.0, 1.0, sigma=-1.0)


@given(media_st)
def test_four_velocity_normalised(m):
    assert abs(m.u_up @ G @ m.u_up - 1) <= 1e-13


def test_rest_constitutive_examples():
    m = MediumSpec(epsilon=2.0, sigma=0.0)
    D, B, j = rest_constitutive(np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), m)
    assert np.array_equal(D, [2.0, 0, 0]) and np.array_equal(B, [0, 1.0, 0]) and max_abs(j) == 0.0
    D, B, j = rest_constitutive(np.array([1.0, 2, 3]), np.array([3.0, 2, 1]), MediumSpec(sigma=0.5))
    assert np.array_equal(D, [1.0, 2, 3]) and np.array_equal(B, [3.0, 2, 1]) and np.array_equal(j, [0.5, 1, 1.5])
    with pytest.raises(ValueError):
        rest_constitutive(np.ones(3), np.ones(3), MediumSpec(v=np.array([0.1, 0, 0])))


def test_minkowski_limits(rng):
    E, B = rng.normal(size=(2, 3))
    D, H = minkowski_constitutive(E, B, MediumSpec(epsilon=2.0, mu=4.0))
    assert max_abs(D - 2 * E) <= 1e-15 * 10 and max_abs(H - B / 4) <= 1e-15 * 10
    D, H = minkowski_constitutive(E, B, MediumSpec(v=np.array([0.3, -0.2, 0.5])))
    assert max_abs(D - E) <= 1e-15 * 10 and max_abs(H - B) <= 1e-15 * 10


@given(media_st, st.integers(0, 2 ** 31 - 1))
def test_minkowski_matches_boosted_rest_fields(m, seed):
    E0, H0 = np.random.default_rng(seed).normal(size=(2, 3))
    rest = FieldPoint(E0, m.epsilon * E0, H0, m.mu * H0)
    lab = textbook_boost(rest, -m.v, m.c)
    D, H = minkowski_constitutive(lab.E, lab.B, m)
    scale = max(max_abs(v) for v in (lab.E, lab.D, lab.H, lab.B))
    assert max_abs(D - lab.D) <= 1e-11 * scale
    assert max_abs(H - lab.H) <= 1e-11 * scale


@given(media_st, st.integers(0, 2 ** 31 - 1), st.floats(-3, 3))
def test_minkowski_is_linear(m, seed, a):
    E1, B1, E2, B2 = np.random.default_rng(seed).normal(size=(4, 3))
    D1, H1 = minkowski_constitutive(E1, B1, m)
    D2, H2 = minkowski_constitutive(E2, B2, m)
    D, H = minkowski_constitutive(a * E1 + E2, a * B1 + B2, m)
    assert max_abs(D - (a * D1 + D2)) <= 1e-12 * 100
    assert max_abs(H - (a * H1 + H2)) <= 1e-12 * 100


@given(media_st)
def test_permeability_tensor(m):
    eps = permeability_tensor(m).components
    assert max_abs(eps - hand_permeability(m)) <= 1e-13 * max_abs(eps)
    assert np.array_equal(eps, np.transpose(eps, (1, 0, 3, 2)))


def test_permeability_vacuum_and_rest():
    eps = permeability_tensor(MediumSpec()).components
    assert np.array_equal(eps, np.einsum("ls,nt->lnst", G, G))
    m = MediumSpec(epsilon=2.0, mu=3.0)
    eps = permeability_tensor(m).components
    for k in range(1, 4):
        for l in range(1, 4):
            assert abs(eps[0, k, 0, l] - (-m.epsilon if k == l else 0.0)) <= 1e-15


def test_R_path_matches_3d_on_1000_samples():
    ms = random_media(1000, seed=9)
    rng = np.random.default_rng(9)
    worst = 0.0
    for m in ms:
        E, B = rng.normal(size=(2, 3))
        f = F_literal(E, B)
        assert np.array_equal(field_tensor(E, B), f)
        R = constitutive_R(f, m)
        R_hand = np.einsum("lnst,st->ln", hand_permeability(m), f)
        D, H = minkowski_constitutive(E, B, m)
        Dr, Hr = D_H_from_R(R_hand)
        scale = max(max_abs(D), max_abs(H), 1.0)
        worst = max(worst, max_abs(R - R_hand) / scale, max_abs(Dr - D) / scale, max_abs(Hr - H) / scale)
        D2, H2 = fields_from_R(R)
        worst = max(worst, max_abs(D2 - D) / scale, max_abs(H2 - H) / scale)
    assert worst <= 1e-11


@given(media_st, st.integers(0, 2 ** 31 - 1))
def test_constitutive_forms_agree(m, seed):
    E, B = np.random.default_rng(seed).normal(size=(2, 3))
    f = field_tensor(E, B)
    R = constitutive_R(f, m)
    for form in ("two", "four"):
        assert max_abs(constitutive_R(f, m, form=form) - R) <= 1e-12 * max_abs(R)


@given(media_st, hnp.arrays(np.float64, 3, elements=st.floats(-0.6, 0.6)), st.integers(0, 2 ** 31 - 1))
def test_R_is_covariant_under_boosts(m, w, seed):
    E, B = np.random.default_rng(seed).normal(size=(2, 3))
    f = field_tensor(E, B)
    R = constitutive_R(f, m)
    L = boost_matrix(BoostSpec(w)).matrix
    Linv = np.linalg.inv(L)
    f_new = Linv.T @ f @ Linv
    # the medium four-velocity transforms as a vector; read its new 3-velocity back out
    u = L @ m.u_up
    m_new = MediumSpec(m.epsilon, m.mu, v=u[1:] / u[0] * m.c, c=m.c)
    R_new = constitutive_R(f_new, m_new)
    assert max_abs(R_new - L @ R @ L.T) <= 1e-11 * max(max_abs(R), 1.0) * 10


def test_inverse_identity():
    assert inverse_identity_check(MediumSpec()) == 0.0
    assert inverse_identity_check(MediumSpec(2.0, 3.0, v=np.array([0, 0.5, 0]))) <= 1e-13
    for m in random_media(200, seed=4):
        assert inverse_identity_check(m) <= 1e-13
        u_low = G @ m.u_up
        k = m.kappa
        lhs = (G - k / (1 + k) * np.outer(u_low, u_low)) @ (G + k * np.outer(m.u_up, m.u_up))
        assert max_abs(lhs - np.eye(4)) <= 1e-13 * max(1.0, k * m.gamma ** 2) * 10


@given(media_st, st.integers(0, 2 ** 31 - 1))
def test_qp_from_F_matches_field_route(m, seed):
    E, B = np.random.default_rng(seed).normal(size=(2, 3))
    f = field_tensor(E, B)
    Q, P = qp_from_F(f, m)
    D, H = minkowski_constitutive(E, B, m)
    c = ComplexPair(E + 1j * H, D + 1j * B)
    scale = max(max_abs(Q.components), 1.0)
    assert max_abs(Q.components - build_Q(c).components) <= 1e-12 * scale
    assert max_abs(P.components - build_P(c).components) <= 1e-12 * scale


def test_qp_vacuum_is_self_dual_combination(rng):
    E, B = rng.normal(size=(2, 3))
    f = field_tensor(E, B)
    Q, _ = qp_from_F(f, MediumSpec())
    f_up = G @ f @ G
    ref = f_up - 0.5j * np.einsum("mnst,st->mn", EPS_UP, f)
    assert max_abs(Q.components - ref) <= 1e-13 * 10


def test_qp_zero_and_validation():
    Q, P = qp_from_F(np.zeros((4, 4)), MediumSpec(2.0))
    assert max_abs(Q.components) == 0.0 and max_abs(P.components) == 0.0
    with pytest.raises(ValueError):
        qp_from_F(np.ones((4, 4)), MediumSpec())


def test_moving_em_tensor_rest_limits(rng):
    assert max_abs(moving_em_tensor(np.zeros((4, 4)), MediumSpec(2.0)).components) == 0.0
    m = MediumSpec(epsilon=2.5)
    E = np.array([0.3, -1.0, 0.5])
    t = moving_em_tensor(field_tensor(E, np.zeros(3)), m).components
    assert abs(t[0, 0] - m.epsilon * (E @ E) / (8 * np.pi)) <= 1e-15 * 10
    for _ in range(20):
        m = MediumSpec(*rng.uniform(1, 4, size=2))
        E, B = rng.normal(size=(2, 3))
        D, H = minkowski_constitutive(E, B, m)
        ref = em_tensor4(FieldPoint(E, D, H, B)).components
        t = moving_em_tensor(field_tensor(E, B), m).components
        assert max_abs(t - ref) <= 1e-12 * max(max_abs(ref), 1e-3)
