"""Small independent oracles shared by the test modules."""

import itertools

import numpy as np
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from complex_em.fields import FieldPoint

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vec3 = hnp.arrays(np.float64, 3, elements=finite)
mat4 = hnp.arrays(np.float64, (4, 4), elements=finite)


def perm_sign(idx) -> int:
    """Sign of a permutation by counting inversions; 0 for repeats."""
    idx = list(idx)
    if len(set(idx)) < len(idx):
        return 0
    inv = sum(1 for a, b in itertools.combinations(range(len(idx)), 2) if idx[a] > idx[b])
    return -1 if inv % 2 else 1


EPS_DOWN = np.zeros((4, 4, 4, 4))
for _p in itertools.permutations(range(4)):
    EPS_DOWN[_p] = perm_sign(_p)
EPS_UP = -EPS_DOWN
G = np.diag([1.0, -1.0, -1.0, -1.0])


def Q_literal(F, G_):
    """Q^{mu nu} written out entry by entry."""
    F1, F2, F3 = F
    G1, G2, G3 = G_
    return np.array([
        [0, -G1, -G2, -G3],
        [G1, 0, 1j * F3, -1j * F2],
        [G2, -1j * F3, 0, 1j * F1],
        [G3, 1j * F2, -1j * F1, 0],
    ], dtype=complex)


def P_literal(F, G_):
    F1, F2, F3 = F
    G1, G2, G3 = G_
    return np.array([
        [0, F1, F2, F3],
        [-F1, 0, 1j * G3, -1j * G2],
        [-F2, -1j * G3, 0, 1j * G1],
        [-F3, 1j * G2, -1j * G1, 0],
    ], dtype=complex)


def F_literal(E, B):
    """F_{mu nu} with F_{0k} = E_k, F_{pq} = -e_pqr B_r."""
    return np.array([
        [0, E[0], E[1], E[2]],
        [-E[0], 0, -B[2], B[1]],
        [-E[1], B[2], 0, -B[0]],
        [-E[2], -B[1], B[0], 0],
    ], dtype=float)


def random_pair(rng, n=None):
    shape = (3,) if n is None else (n, 3)
    F = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    G_ = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    return F, G_


def textbook_boost(p, v, c=1.0):
    """Real-field transformation into the frame moving with velocity v."""
    v = np.asarray(v, float)
    b2 = v @ v / c ** 2
    if b2 == 0:
        return p
    gam = 1 / np.sqrt(1 - b2)
    n = v / np.linalg.norm(v)

    def split(a, b, sign):
        par = (a @ n) * n
        perp = gam * (a + sign * np.cross(v, b) / c)
        perp = perp - (perp @ n) * n
        return par + perp

    return FieldPoint(E=split(p.E, p.B, +1), D=split(p.D, p.H, +1),
                      H=split(p.H, p.D, -1), B=split(p.B, p.E, -1))
