"""Complex field pairs and the dual four-tensors built from them.

``F = E + iH`` and ``G = D + iB`` pack the four real field vectors into two
complex ones.  ``Q^{mu nu}`` (contravariant) and ``P_{mu nu}`` (covariant)
are the two antisymmetric tensors assembled from them::

    Q^{0k} = -G_k,  Q^{pq} = i e_{pqr} F_r      (Q = R + iS)
    P_{0k} =  F_k,  P_{pq} = i e_{pqr} G_r      (P = F + iG)

All functions broadcast over leading batch axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import (
    CTensor2,
    Variance,
    antisymmetrize3,
    contract_levi_civita,
    dual_rank3,
    levi_civita3,
    levi_civita_array,
    undual_rank3,
)

__all__ = [
    "FieldPoint",
    "ComplexPair",
    "to_complex",
    "from_complex",
    "q_array",
    "p_array",
    "build_Q",
    "build_P",
    "real_tensors",
    "invariant_FG",
    "cofactor_check",
    "scalar_identity_suite",
    "dual_identity_suite",
    "appendix_b_suite",
    "convenience_products",
    "field_scale",
    "random_pairs",
]

_EPS3 = levi_civita3().astype(float)
_E_UP = levi_civita_array("up").astype(float)
_E_DOWN = levi_civita_array("down").astype(float)


@dataclass(frozen=True)
class FieldPoint:
    """Real field vectors ``E, D, H, B`` (Gaussian units), shape ``(..., 3)`` each."""

    E: np.ndarray
    D: np.ndarray
    H: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        for name in ("E", "D", "H", "B"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape[-1:] != (3,):
                raise ValueError(f"{name} must have a trailing axis of length 3")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite components")
            object.__setattr__(self, name, arr)

    @classmethod
    def from_array(cls, arr) -> "FieldPoint":
        """Build from a ``(..., 4, 3)`` stack ordered ``E, D, H, B``."""
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0, :], arr[..., 1, :], arr[..., 2, :], arr[..., 3, :])

    def as_array(self) -> np.ndarray:
        return np.stack([self.E, self.D, self.H, self.B], axis=-2)


@dataclass(frozen=True)
class ComplexPair:
    F: np.ndarray
    G: np.ndarray

    def __post_init__(self):
        for name in ("F", "G"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.shape[-1:] != (3,):
                raise ValueError(f"{name} must have a trailing axis of length 3")
            object.__setattr__(self, name, arr)


def to_complex(p: FieldPoint) -> ComplexPair:
    return ComplexPair(p.E + 1j * p.H, p.D + 1j * p.B)


def from_complex(c: ComplexPair) -> FieldPoint:
    return FieldPoint(c.F.real, c.G.real, c.F.imag, c.G.imag)


def _block(time_row, spatial_vec, row_sign):
    """Antisymmetric 4x4 with ``T^{0k} = row_sign * time_row_k`` and
    ``T^{pq} = e_{pqr} spatial_vec_r``."""
    time_row = np.asarray(time_row)
    spatial_vec = np.asarray(spatial_vec)
    shape = np.broadcast_shapes(time_row.shape, spatial_vec.shape)[:-1]
    dtype = np.result_type(time_row, spatial_vec)
    out = np.zeros(shape + (4, 4), dtype=dtype)
    out[..., 0, 1:] = row_sign * time_row
    out[..., 1:, 0] = -row_sign * time_row
    out[..., 1:, 1:] = np.einsum("pqr,...r->...pq", _EPS3, spatial_vec)
    return out


def q_array(F, G) -> np.ndarray:
    """Raw components of ``Q^{mu nu}`` from complex ``F, G``."""
    return _block(G, 1j * np.asarray(F), -1)


def p_array(F, G) -> np.ndarray:
    """Raw components of ``P_{mu nu}`` from complex ``F, G``."""
    return _block(F, 1j * np.asarray(G), +1)


def build_Q(c: ComplexPair) -> CTensor2:
    return CTensor2(q_array(c.F, c.G), Variance.UPUP)


def build_P(c: ComplexPair) -> CTensor2:
    return CTensor2(p_array(c.F, c.G), Variance.DOWNDOWN)


def real_tensors(p: FieldPoint):
    """Real tensors ``(Fmn, Gmn, R, S)`` with ``P = Fmn + i Gmn`` and ``Q = R + iS``.

    Built straight from the real block layout, independently of
    :func:`q_array` / :func:`p_array`.
    """
    f_mn = _block(p.E, -p.B, +1)  # standard field tensor, E and B
    g_mn = _block(p.H, p.D, +1)
    r = _block(p.D, -p.H, -1)
    s = _block(p.B, p.E, -1)
    return f_mn, g_mn, r, s


def invariant_FG(c: ComplexPair) -> np.ndarray:
    """``F.G = (E.D - H.B) + i(E.B + H.D)``; Lorentz invariant."""
    return np.einsum("...k,...k->...", c.F, c.G)


def field_scale(c: ComplexPair) -> np.ndarray:
    """``max(|F|, |G|)`` per sample, floored to avoid division by zero."""
    nf = np.linalg.norm(c.F, axis=-1)
    ng = np.linalg.norm(c.G, axis=-1)
    return np.maximum(np.maximum(nf, ng), 1e-300)


def _maxrel(diff, scale) -> float:
    diff = np.abs(np.asarray(diff))
    # quadratic scales of all-zero samples underflow to 0; floor them again
    scale = np.maximum(np.asarray(scale, dtype=float), 1e-300)
    extra = diff.ndim - scale.ndim
    rel = diff / scale.reshape(scale.shape + (1,) * extra)
    return float(rel.max(initial=0.0))


def cofactor_check(c: ComplexPair) -> dict:
    """Relative residuals of the Minkowski cofactor and determinant relations.

    * ``CofactorMinkowski``: ``P Q - (F.G) I`` and ``P Q - 1/4 Tr(PQ) I``,
      scaled by ``|F||G|``;
    * ``B18``: ``QP - (F.G) I``;
    * ``B19``: ``det P + (F.G)^2`` and ``det Q + (F.G)^2``, relative to
      ``|F.G|^2``.
    """
    P = p_array(c.F, c.G)
    Q = q_array(c.F, c.G)
    fg = invariant_FG(c)
    eye = np.eye(4)
    pq = P @ Q
    qp = Q @ P
    quad = np.maximum(np.linalg.norm(c.F, axis=-1) * np.linalg.norm(c.G, axis=-1), 1e-300)
    quart = np.maximum(np.abs(fg) ** 2, 1e-300)
    trace = np.einsum("...st,...ts->...", P, Q)
    return {
        "CofactorMinkowski": max(
            _maxrel(pq - fg[..., None, None] * eye, quad),
            _maxrel(pq - 0.25 * trace[..., None, None] * eye, quad),
        ),
        "B18": _maxrel(qp - fg[..., None, None] * eye, quad),
        "B19": max(
            _maxrel(np.linalg.det(P) + fg**2, quart),
            _maxrel(np.linalg.det(Q) + fg**2, quart),
        ),
    }


def scalar_identity_suite(c: ComplexPair) -> dict:
    """Relative residuals of the quadratic contraction identities B6-B17.

    Every entry is ``max |lhs - rhs| / max(|F|,|G|)^2`` over the batch.
    Contractions are written with explicit einsum index strings rather than
    matrix shortcuts so they are independent of the matrix-form checks.
    """
    p = from_complex(c)
    f_mn, g_mn, r, s = real_tensors(p)
    P = p_array(c.F, c.G)
    Q = q_array(c.F, c.G)
    scale = field_scale(c) ** 2
    ed = np.einsum("...k,...k->...", p.E, p.D)
    hb = np.einsum("...k,...k->...", p.H, p.B)
    eb = np.einsum("...k,...k->...", p.E, p.B)
    hd = np.einsum("...k,...k->...", p.H, p.D)
    eye = np.eye(4)

    def full(a, b):
        return np.einsum("...mn,...mn->...", a, b)

    fr = full(f_mn, r)
    eff = np.einsum("mnst,...mn,...st->...", _E_UP, f_mn, f_mn)
    err = np.einsum("mnst,...mn,...st->...", _E_DOWN, r, r)
    pq_full = full(P, Q)
    res = {}
    res["B6"] = _maxrel(pq_full - (2 * fr - 0.5j * (eff + err)), scale)
    res["B7"] = _maxrel(fr - 2 * (hb - ed), scale)
    res["B8"] = max(_maxrel(eff - 8 * eb, scale), _maxrel(err - 8 * hd, scale))
    res["B9"] = _maxrel(0.25 * pq_full - (hb - ed - 1j * (eb + hd)), scale)

    Pc, Qc = np.conj(P), np.conj(Q)
    lhs10 = np.einsum("...ml,...ln->...mn", Pc, Q) + np.einsum("...ml,...ln->...mn", P, Qc)
    fr_mat = np.einsum("...ml,...ln->...mn", f_mn, r)
    gs_mat = np.einsum("...ml,...ln->...mn", g_mn, s)
    form1 = 2 * (fr_mat + gs_mat)
    form2 = 4 * fr_mat + fr[..., None, None] * eye
    form3 = 4 * fr_mat - 2 * (ed - hb)[..., None, None] * eye
    res["B10"] = max(_maxrel(lhs10 - form1, scale), _maxrel(lhs10 - form2, scale),
                     _maxrel(lhs10 - form3, scale))
    res["B10.imag"] = _maxrel(lhs10.imag, scale)

    lhs10a = np.einsum("...ml,...ln->...mn", P, Q) + np.einsum("...ml,...ln->...mn", Pc, Qc)
    tr = np.einsum("...st,...ts->...", P, Q) + np.einsum("...st,...ts->...", Pc, Qc)
    res["B10a"] = _maxrel(lhs10a - 0.25 * tr[..., None, None] * eye, scale)
    # the printed closed-form value is 1/2 (E.D - H.B); the contraction equals 2 (E.D - H.B)
    res["B10a.value"] = _maxrel(lhs10a - 2 * (ed - hb)[..., None, None] * eye, scale)

    fs_mat = np.einsum("...ml,...ln->...mn", f_mn, s)
    gr_mat = np.einsum("...ml,...ln->...mn", g_mn, r)
    res["B11"] = _maxrel(np.einsum("...ml,...ln->...mn", P, Q)
                         - ((fr_mat - gs_mat) + 1j * (fs_mat + gr_mat)), scale)
    res["B12"] = _maxrel(np.einsum("...ml,...ln->...mn", Pc, Q)
                         - ((fr_mat + gs_mat) + 1j * (fs_mat - gr_mat)), scale)

    def trace(m):
        return np.einsum("...mm->...", m)

    res["B13"] = max(_maxrel(fs_mat - 0.25 * trace(fs_mat)[..., None, None] * eye, scale),
                     _maxrel(fs_mat - eb[..., None, None] * eye, scale))
    res["B14"] = max(_maxrel(gr_mat - 0.25 * trace(gr_mat)[..., None, None] * eye, scale),
                     _maxrel(gr_mat - hd[..., None, None] * eye, scale))
    res["B15"] = max(
        _maxrel(fr_mat - gs_mat - 0.5 * trace(fr_mat)[..., None, None] * eye, scale),
        _maxrel(fr_mat - gs_mat - (ed - hb)[..., None, None] * eye, scale),
    )
    res["B16"] = max(
        _maxrel(fr_mat + gs_mat - (2 * fr_mat - 0.5 * trace(fr_mat)[..., None, None] * eye), scale),
        _maxrel(fr_mat + gs_mat - (2 * fr_mat - (ed - hb)[..., None, None] * eye), scale),
    )
    res["B17"] = _maxrel(trace(fr_mat + gs_mat), scale)
    fg = invariant_FG(c)
    res["B20"] = _maxrel(fg - ((ed - hb) + 1j * (eb + hd)), scale)
    return res


def dual_identity_suite(c: ComplexPair) -> dict:
    """Relative residuals of the linear duality relations B04, B1-B5, PQdual,
    SelfDual and DualVacuum, scaled by ``max(|F|,|G|)``."""
    p = from_complex(c)
    f_mn, g_mn, r, s = real_tensors(p)
    P = p_array(c.F, c.G)
    Q = q_array(c.F, c.G)
    scale = field_scale(c)

    def up(a):
        return np.einsum("mnst,...st->...mn", _E_UP, a)

    def down(a):
        return np.einsum("mnst,...st->...mn", _E_DOWN, a)

    res = {}
    # generic pair (A, B) with A = P, B = 1/2 e^{..} A
    b = 0.5 * up(P)
    res["B04"] = _maxrel(down(b) - (np.swapaxes(P, -1, -2) - P), scale)
    res["B1"] = max(_maxrel(Q - (r + 1j * s), scale), _maxrel(Q - (r - 0.5j * up(f_mn)), scale))
    res["B2"] = max(_maxrel(P - (f_mn + 1j * g_mn), scale),
                    _maxrel(P - (f_mn - 0.5j * down(r)), scale))
    res["B3"] = max(_maxrel(down(Q) - 2j * P, scale), _maxrel(2j * Q - up(P), scale))
    res["PQdual"] = res["B3"]
    res["B4"] = max(_maxrel(2 * r - up(g_mn), scale), _maxrel(-2 * s - up(f_mn), scale))
    res["B5"] = max(_maxrel(2 * g_mn + down(r), scale), _maxrel(2 * f_mn - down(s), scale))

    # vacuum: G = F
    vac = ComplexPair(c.F, c.F)
    Qv = q_array(vac.F, vac.G)
    fv, _, _, _ = real_tensors(from_complex(vac))
    g = np.diag([1.0, -1.0, -1.0, -1.0])
    Qv_low = g @ Qv @ g
    fv_up = g @ fv @ g
    res["DualVacuum"] = max(_maxrel(down(Qv) - 2j * Qv_low, scale),
                            _maxrel(2j * Qv - up(Qv_low), scale))
    res["SelfDual"] = _maxrel(Qv - (fv_up - 0.5j * up(fv)), scale)

    # rank-3 duality on a totally antisymmetric tensor built from P
    w = np.concatenate([np.ones(P.shape[:-2] + (1,)), p.E / scale[..., None]], axis=-1)
    a3 = antisymmetrize3(np.einsum("...mn,...l->...mnl", P, w))
    b3 = dual_rank3(a3)
    res["B20a"] = max(
        _maxrel(np.einsum("mnst,...nst->...m", _E_UP, a3) - 6 * b3, scale),
        _maxrel(undual_rank3(b3) - a3, scale),
    )
    return res


def appendix_b_suite(c: ComplexPair) -> dict:
    """Every algebraic identity of the complex field tensors for the batch ``c``.

    Symbol contractions (B01-B03) are integer residuals; everything else is
    relative to the field scale.
    """
    res = {
        "B01": float(contract_levi_civita(1)),
        "B02": float(contract_levi_civita(2)),
        "B03": float(contract_levi_civita(3)),
        "B03.full": float(contract_levi_civita(4)),
    }
    res.update(dual_identity_suite(c))
    res.update(scalar_identity_suite(c))
    res.update(cofactor_check(c))
    return res


def convenience_products(c: ComplexPair):
    """``(i F x F*, i G x G*, F.G* + F*.G)`` together with the real forms they
    equal: ``2 E x H``, ``2 D x B`` and ``2 (E.D + H.B)``."""
    p = from_complex(c)
    ifxf = 1j * np.cross(c.F, np.conj(c.F))
    igxg = 1j * np.cross(c.G, np.conj(c.G))
    sym = np.einsum("...k,...k->...", c.F, np.conj(c.G)) + np.einsum(
        "...k,...k->...", np.conj(c.F), c.G
    )
    real = (
        2 * np.cross(p.E, p.H),
        2 * np.cross(p.D, p.B),
        2 * (np.einsum("...k,...k->...", p.E, p.D) + np.einsum("...k,...k->...", p.H, p.B)),
    )
    return (ifxf, igxg, sym), real


def random_pairs(n: int, seed: int = 0, scale: float = 1.0) -> ComplexPair:
    """``n`` reproducible random complex pairs with log-uniform magnitudes."""
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(n, 4, 3))
    mags = scale * 10.0 ** rng.uniform(-2, 2, size=(n, 1, 1))
    return to_complex(FieldPoint.from_array(raw * mags))
