import numpy as np
from hypothesis import given

from complex_em.fields import (
    ComplexPair, FieldPoint, appendix_b_suite, build_P, build_Q, cofactor_check, convenience_products,
    from_complex, invariant_FG, random_pairs, real_tensors, scalar_identity_suite, to_complex,
)
from complex_em.tensor_core import Variance

from conftest import max_abs
from helpers import EPS_DOWN, F_literal, P_literal, Q_literal, random_pair, vec3

E1 = np.array([1.0, 0.0, 0.0])
Z3 = np.zeros(3)


def test_to_complex_example():
    c = to_complex(FieldPoint(E=E1, D=E1, H=np.array([0.0, 1.0, 0.0]), B=np.array([0.0, 1.0, 0.0])))
    assert np.array_equal(c.F, [1, 1j, 0])
    assert np.array_equal(c.G, [1, 1j, 0])


def test_zero_point_maps_to_zero_pair():
    c = to_complex(FieldPoint(Z3, Z3, Z3, Z3))
    assert max_abs(c.F) == 0.0 and max_abs(c.G) == 0.0


@given(vec3, vec3, vec3, vec3)
def test_complex_round_trip(E, D, H, B):
    p = from_complex(to_complex(FieldPoint(E, D, H, B)))
    for a, b in ((p.E, E), (p.D, D), (p.H, H), (p.B, B)):
        assert np.array_equal(a, b)


def test_build_Q_readoffs():
    q = build_Q(ComplexPair(np.zeros(3, complex), np.array([1.0, 0, 0], complex)))
    expect = np.zeros((4, 4), complex)
    expect[0, 1], expect[1, 0] = -1, 1
    assert q.variance is Variance.UPUP
    assert np.array_equal(q.components, expect)
    q = build_Q(ComplexPair(np.array([0, 0, 1.0], complex), np.zeros(3, complex)))
    expect = np.zeros((4, 4), complex)
    expect[1, 2], expect[2, 1] = 1j, -1j
    assert np.array_equal(q.components, expect)


def test_build_P_readoff():
    p = build_P(ComplexPair(np.array([1.0, 0, 0], complex), np.zeros(3, complex)))
    expect = np.zeros((4, 4), complex)
    expect[0, 1], expect[1, 0] = 1, -1
    assert p.variance is Variance.DOWNDOWN
    assert np.array_equal(p.components, expect)


def test_Q_P_match_literal_matrices(rng):
    for _ in range(20):
        F, G = random_pair(rng)
        c = ComplexPair(F, G)
        assert max_abs(build_Q(c).components - Q_literal(F, G)) == 0.0
        assert max_abs(build_P(c).components - P_literal(F, G)) == 0.0


def test_real_part_of_Q_is_D_H_block(rng):
    E, D, H, B = rng.normal(size=(4, 3))
    q = build_Q(to_complex(FieldPoint(E, D, H, B))).components
    # R holds (D, -H): R^{0k} = -D_k, R^{pq} = -e_pqr H_r
    R = np.array([
        [0, -D[0], -D[1], -D[2]],
        [D[0], 0, -H[2], H[1]],
        [D[1], H[2], 0, -H[0]],
        [D[2], -H[1], H[0], 0],
    ])
    assert max_abs(q.real - R) <= 1e-15
    f_mn, g_mn, r, s = real_tensors(FieldPoint(E, D, H, B))
    assert max_abs(r - R) <= 1e-15
    assert max_abs(f_mn - F_literal(E, B)) <= 1e-15


def test_duality_on_random_pairs():
    c = random_pairs(1000, seed=3)
    q = build_Q(c).components
    p = build_P(c).components
    lhs = np.einsum("mnst,...st->...mn", EPS_DOWN, q)
    scale = np.maximum(np.abs(q).max(axis=(-1, -2)), 1e-300)
    assert (np.abs(lhs - 2j * p).max(axis=(-1, -2)) / scale).max() <= 1e-13


def test_vacuum_self_duality(rng):
    F, _ = random_pair(rng)
    q = build_Q(ComplexPair(F, F)).components
    g = np.diag([1.0, -1, -1, -1])
    q_low = g @ q @ g
    lhs = np.einsum("mnst,st->mn", EPS_DOWN, q)
    assert max_abs(lhs - 2j * q_low) <= 1e-13 * max_abs(q)


def test_invariant_examples():
    assert invariant_FG(to_complex(FieldPoint(E1, E1, Z3, Z3))) == 1.0
    E = np.array([1.0, 0, 0])
    H = np.array([0, 1.0, 0])
    assert abs(invariant_FG(to_complex(FieldPoint(E, E, H, H)))) == 0.0


@given(vec3, vec3, vec3, vec3)
def test_invariant_decomposition(E, D, H, B):
    fg = invariant_FG(to_complex(FieldPoint(E, D, H, B)))
    oracle = (E @ D - H @ B) + 1j * (E @ B + H @ D)
    scale = max(np.linalg.norm(E), np.linalg.norm(H), 1e-300) * max(np.linalg.norm(D), np.linalg.norm(B), 1e-300)
    assert abs(fg - oracle) <= 1e-13 * scale


def test_cofactor_zero_fields():
    z = ComplexPair(np.zeros(3, complex), np.zeros(3, complex))
    rep = cofactor_check(z)
    assert all(v == 0.0 for v in rep.values())


def test_cofactor_against_numpy(rng):
    for _ in range(50):
        F, G = random_pair(rng)
        p, q = P_literal(F, G), Q_literal(F, G)
        fg = F @ G
        assert max_abs(p @ q - fg * np.eye(4)) <= 1e-12 * np.linalg.norm(F) * np.linalg.norm(G)
        assert abs(np.linalg.det(p) + fg ** 2) <= 1e-11 * abs(fg) ** 2
        assert abs(np.linalg.det(q) + fg ** 2) <= 1e-11 * abs(fg) ** 2
    rep = cofactor_check(random_pairs(1000, seed=1))
    assert max(rep.values()) <= 1e-11


def test_scalar_identities_zero_fields():
    z = ComplexPair(np.zeros(3, complex), np.zeros(3, complex))
    assert all(v == 0.0 for v in scalar_identity_suite(z).values())


def test_pure_electric_FR():
    f_mn, _, r, _ = real_tensors(FieldPoint(E1, E1, Z3, Z3))
    total = sum(f_mn[m, n] * r[m, n] for m in range(4) for n in range(4))
    assert total == -2.0


def test_scalar_identities_explicit_loops(rng):
    # B7 and B8 by explicit index loops, independent of the library contractions
    E, D, H, B = rng.normal(size=(4, 3))
    f_mn, _, r, _ = real_tensors(FieldPoint(E, D, H, B))
    fr = sum(f_mn[m, n] * r[m, n] for m in range(4) for n in range(4))
    assert abs(fr - 2 * (H @ B - E @ D)) <= 1e-13 * 10
    e_up = -EPS_DOWN
    eff = sum(e_up[a, b, c, d] * f_mn[a, b] * f_mn[c, d]
              for a in range(4) for b in range(4) for c in range(4) for d in range(4))
    assert abs(eff - 8 * E @ B) <= 1e-12 * 10
    err = sum(EPS_DOWN[a, b, c, d] * r[a, b] * r[c, d]
              for a in range(4) for b in range(4) for c in range(4) for d in range(4))
    assert abs(err - 8 * H @ D) <= 1e-12 * 10


def test_appendix_b_suite_on_1000_pairs():
    rep = appendix_b_suite(random_pairs(1000, seed=0))
    assert rep["B01"] == rep["B02"] == rep["B03"] == 0
    assert rep["B03.full"] == 0
    assert max(v for k, v in rep.items()) <= 1e-12


def test_B10a_value_is_twice_not_half(rng):
    # PQ + P*Q* is 2(E.D - H.B) times the identity
    E, D, H, B = rng.normal(size=(4, 3))
    c = to_complex(FieldPoint(E, D, H, B))
    p, q = P_literal(c.F, c.G), Q_literal(c.F, c.G)
    lhs = p @ q + p.conj() @ q.conj()
    assert max_abs(lhs - 2 * (E @ D - H @ B) * np.eye(4)) <= 1e-13 * max_abs(lhs)
    assert max_abs(lhs - 0.5 * (E @ D - H @ B) * np.eye(4)) > 1e-3 * max_abs(lhs)


def test_B10_left_side_is_real(rng):
    F, G = random_pair(rng)
    p, q = P_literal(F, G), Q_literal(F, G)
    lhs = p.conj() @ q + p @ q.conj()
    assert max_abs(lhs.imag) <= 1e-13 * max_abs(lhs)


def test_convenience_products_example():
    c = to_complex(FieldPoint(E1, Z3, np.array([0, 1.0, 0]), Z3))
    (ff, gg, s), _ = convenience_products(c)
    assert np.allclose(ff, [0, 0, 2], atol=0)
    c = to_complex(FieldPoint(np.array([1.0, 2, 3]), Z3, Z3, Z3))
    (ff, _, _), _ = convenience_products(c)
    assert max_abs(ff) == 0.0


@given(vec3, vec3, vec3, vec3)
def test_convenience_products_identities(E, D, H, B):
    c = to_complex(FieldPoint(E, D, H, B))
    (a, b, s), _ = convenience_products(c)
    scale = max(np.linalg.norm(v) for v in (E, D, H, B)) ** 2 + 1e-300
    assert max_abs(a - 2 * np.cross(E, H)) <= 1e-13 * scale
    assert max_abs(b - 2 * np.cross(D, B)) <= 1e-13 * scale
    assert abs(s - 2 * (E @ D + H @ B)) <= 1e-13 * scale
