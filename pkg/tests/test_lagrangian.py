import numpy as np
import pytest
from hypothesis import given

from complex_em import maxwell
from complex_em.fields import ComplexPair, FieldPoint, p_array, q_array, random_pairs, to_complex
from complex_em.grid_fd import AffineField, Deriv, random_trig_field
from complex_em.lagrangian import (
    complex_lagrangian_residual, conjugate_momentum, conjugate_momentum_check, density_L0, density_L1,
    euler_lagrange_residual, formal_derivative, formal_derivative_check, formal_gradient,
    lagrangian_densities, real_lagrangian,
)
from complex_em.lorentz import random_boosts, tensor_route
from complex_em.media import MediumSpec
from complex_em.potentials import FourPotential, potential_configuration
from complex_em.scenarios import hertz_plane_wave, trig_random

from conftest import max_abs
from helpers import EPS_UP, F_literal, random_pair, vec3

E1 = np.array([1.0, 0.0, 0.0])
Z3 = np.zeros(3)
MOVING = MediumSpec(2.0, 1.5, 0.0, np.array([0.2, -0.3, 0.1]))


def pair(E, D, H, B):
    return to_complex(FieldPoint(np.asarray(E, float), np.asarray(D, float),
                                 np.asarray(H, float), np.asarray(B, float)))


def test_worked_examples():
    a = lagrangian_densities(pair(E1, E1, Z3, Z3))
    assert abs(a.L0 - 4.0) <= 1e-14 and abs(a.L1) <= 1e-14
    b = lagrangian_densities(pair(E1, Z3, Z3, E1))
    assert abs(b.L0) <= 1e-14 and abs(b.L1 - 4j) <= 1e-14


@given(vec3, vec3, vec3, vec3)
def test_three_vector_forms(E, D, H, B):
    lv = lagrangian_densities(pair(E, D, H, B))
    sc = max(1.0, max_abs([E, D, H, B])) ** 2
    assert abs(lv.L0 - 4 * (E @ D - H @ B)) <= 1e-12 * sc
    assert abs(lv.L1 - 4j * (E @ B - H @ D)) <= 1e-12 * sc
    assert lv.reality_residual() <= 1e-13 * sc


def test_all_printed_forms_agree():
    c = random_pairs(200, seed=4)
    lv = lagrangian_densities(c)
    sc = max_abs(np.concatenate([c.F, c.G])) ** 2
    for key in ("L0", "L1"):
        ref = lv.forms[f"{key}.3d"]
        for name, val in lv.forms.items():
            if name.startswith(key + "."):
                assert max_abs(val - ref) <= 1e-12 * sc, name


def test_densities_against_hand_contraction(rng):
    F, G_ = random_pair(rng)
    P = p_array(F, G_)
    Pc = P.conj()
    hand0 = 0.25j * (np.einsum("abcd,ab,cd", EPS_UP, P, P) - np.einsum("abcd,ab,cd", EPS_UP, Pc, Pc))
    hand1 = 0.5j * np.einsum("abcd,ab,cd", EPS_UP, P, Pc)
    assert abs(density_L0(P, Pc) - hand0) <= 1e-12 * abs(hand0)
    assert abs(density_L1(P, Pc) - hand1) <= 1e-12 * abs(hand1)


def test_formal_derivative_relations(rng):
    for _ in range(5):
        F, G_ = random_pair(rng)
        out = formal_derivative_check(ComplexPair(F, G_))
        for tag, val in out.items():
            assert val <= (1e-12 if tag == "closed_form" else 1e-6), tag


def test_formal_derivative_linear_response(rng):
    F, G_ = random_pair(rng)
    P, Q = p_array(F, G_), q_array(F, G_)
    # L0 is quadratic, so its pair derivative is linear in P: compare to a finite step by hand
    hand = 0.5j * np.einsum("kr,kr", EPS_UP[0, 1], P)
    assert abs(formal_derivative("L0", P, P.conj(), 0, 1) - hand) <= 1e-6 * abs(hand)
    assert abs(hand - Q[1, 0]) <= 1e-12 * abs(hand)
    assert max_abs(formal_gradient(P) - 0.5j * np.einsum("abkr,kr->ab", EPS_UP, P)) <= 1e-14 * max_abs(P)


def test_formal_derivative_argument_checks(rng):
    P = p_array(*random_pair(rng))
    with pytest.raises(ValueError):
        formal_derivative("L0", P, P.conj(), 2, 2)
    with pytest.raises(ValueError):
        formal_derivative("L0", P, P.conj(), 0, 1, wrt="Q")
    with pytest.raises(ValueError):
        formal_derivative_check(ComplexPair(np.zeros((2, 3)), np.zeros((2, 3))))


def test_boost_invariance(rng):
    c = random_pairs(40, seed=8)
    for k, b in enumerate(random_boosts(40, seed=9)):
        one = ComplexPair(c.F[k], c.G[k])
        a = lagrangian_densities(one)
        bb = lagrangian_densities(tensor_route(one, b))
        size = max(abs(a.L0), abs(a.L1))
        assert abs(a.L0 - bb.L0) <= 1e-11 * size
        assert abs(a.L1 - bb.L1) <= 1e-11 * size


# ---------------------------------------------------------------- real Lagrangian

def test_real_lagrangian_at_rest(rng):
    m = MediumSpec(2.5, 1.7)
    assert real_lagrangian(np.zeros((4, 4)), m) == 0.0
    E, B = rng.normal(size=3), rng.normal(size=3)
    f = F_literal(E, B)
    expect = 0.5 * (m.epsilon * E @ E - B @ B / m.mu)
    assert abs(real_lagrangian(f, m) - expect) <= 1e-12 * abs(expect)


def test_real_lagrangian_source_coupling(rng):
    m = MediumSpec(c=2.0)
    A, j = rng.normal(size=4), rng.normal(size=4)
    out = real_lagrangian(np.zeros((4, 4)), m, A, j)
    assert abs(out + 4 * np.pi / 2.0 * (j @ A)) <= 1e-13 * abs(out)


def test_real_lagrangian_rejects_bad_tensors(rng):
    with pytest.raises(ValueError):
        real_lagrangian(np.eye(4), MOVING)
    with pytest.raises(ValueError):
        real_lagrangian(F_literal(rng.normal(size=3), rng.normal(size=3)) * 1j, MOVING)


def test_conjugate_momentum_is_R(rng):
    m = MediumSpec(2.0, 3.0)
    M = rng.normal(size=(4, 4))
    g = M.copy()      # g[mu, nu] = d_nu A_mu
    num = conjugate_momentum(g, m)
    f = M.T - M
    E = f[0, 1:]
    B = -np.array([f[2, 3], f[3, 1], f[1, 2]])
    D, H = m.epsilon * E, B / m.mu
    R = np.zeros((4, 4))
    R[0, 1:], R[1:, 0] = -D, D
    R[2, 3], R[3, 1], R[1, 2] = -H
    R[3, 2], R[1, 3], R[2, 1] = H
    assert max_abs(num - R) <= 1e-6 * max_abs(R)
    A = FourPotential(AffineField(np.zeros(4), M))
    assert conjugate_momentum_check(A, m, rng.normal(size=(3, 4))) <= 1e-6
    Ar = FourPotential(random_trig_field(rng, (4,)))
    assert conjugate_momentum_check(Ar, MOVING, rng.uniform(-3, 3, size=(8, 4))) <= 1e-6


# ---------------------------------------------------------------- Euler-Lagrange

def test_euler_lagrange_matches_maxwell(rng):
    A = FourPotential(random_trig_field(rng, (4,)))
    j = random_trig_field(rng, (4,))
    x = rng.uniform(-np.pi, np.pi, size=(12, 4))
    el = euler_lagrange_residual(A, MOVING, j, x)
    r, _ = maxwell.residual_real_split(potential_configuration(A, MOVING, j), x)
    assert max_abs(el - r) <= 1e-12 * max_abs(el)


def test_euler_lagrange_vanishes_on_hertz_mode():
    s = hertz_plane_wave()
    A = s.params["potential"]
    x = s.sample_events(16, seed=3)
    el = euler_lagrange_residual(A, s.medium, None, x)
    assert max_abs(el) <= 1e-10 * max_abs(Deriv().hess(A.field, x))


def test_complex_lagrangian_equations_reproduce_maxwell():
    s = trig_random(seed=5)
    x = s.sample_events(12, seed=1)
    jet = maxwell.field_jet(s.configuration, x)
    res = complex_lagrangian_residual(jet)
    cov = maxwell.residual_covariant(jet)
    sc = max_abs(jet.dF)
    assert max_abs(res["L0"] - cov) <= 1e-12 * sc
    assert max_abs(res["L1"] + np.conj(cov)) <= 1e-12 * sc
