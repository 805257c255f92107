"""Stress tensors, the four-tensor ``T_mu^nu``, ponderomotive force and balance residuals.

Quantities quadratic in the fields are differentiated with the product rule
from a :class:`~complex_em.maxwell.FieldJet`, so every residual below uses
exactly the same first derivatives as the Maxwell residuals.  Spatial
indices ``p, q`` refer to ``d/dx^p``; the time slot of a gradient holds
``d/dx^0 = (1/c) d/dt``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .fields import ComplexPair, FieldPoint, p_array, q_array, real_tensors
from .grid_fd import Deriv, SampledField
from .maxwell import (
    FieldJet,
    field_jet,
    residual_complex3d,
    residual_covariant,
    tensor_grad,
)
from .tensor_core import METRIC, CTensor2, Variance, levi_civita3, levi_civita_array

__all__ = [
    "StressKind",
    "StressTensor3",
    "EMTensor4",
    "PonderomotiveForce",
    "hertz_stress",
    "hertz_stress_complex",
    "mh_stress",
    "em_tensor4",
    "em_tensor4_complex",
    "ponderomotive",
    "ponderomotive_Z",
    "pforce_closed_form",
    "energy_balance_residual",
    "momentum_balance_residual",
    "divergence_two_tensors",
    "covariant_balance_residual",
    "angular_momentum_residual",
    "angular_proof_identity",
    "reduction_4d_to_3d",
    "proof_chain_identities",
    "appendix_c_suite",
    "balance_scale",
]

_EPS3 = levi_civita3().astype(float)
_E_UP = levi_civita_array("up").astype(float)
_E_DOWN = levi_civita_array("down").astype(float)
_PI = np.pi


class StressKind(str, enum.Enum):
    HERTZ = "Hertz"
    MAXWELL_HEAVISIDE = "MaxwellHeaviside"


@dataclass(frozen=True)
class StressTensor3:
    components: np.ndarray
    kind: StressKind


@dataclass(frozen=True)
class EMTensor4:
    """``T_mu^nu`` (first index down, second up)."""

    components: np.ndarray
    variance: Variance = Variance.MIXED

    def as_ctensor(self) -> CTensor2:
        return CTensor2(self.components, Variance.MIXED)


@dataclass(frozen=True)
class PonderomotiveForce:
    """Covariant components ``X_mu``."""

    components: np.ndarray
    variance: Variance = Variance.DOWN


def _dot(a, b):
    return np.einsum("...k,...k->...", a, b)


# ---------------------------------------------------------------- pointwise tensors

def hertz_stress(p: FieldPoint) -> StressTensor3:
    E, D, H, B = p.E, p.D, p.H, p.B
    outer = np.einsum("...p,...q->...pq", E, D) + np.einsum("...p,...q->...pq", H, B)
    trace = (_dot(E, D) + _dot(H, B))[..., None, None] * np.eye(3)
    t = (outer + np.swapaxes(outer, -1, -2) - trace) / (8 * _PI)
    return StressTensor3(t, StressKind.HERTZ)


def hertz_stress_complex(c: ComplexPair) -> StressTensor3:
    F, G = c.F, c.G
    Fc, Gc = np.conj(F), np.conj(G)
    o = (np.einsum("...p,...q->...pq", F, Gc) + np.einsum("...p,...q->...pq", Fc, G))
    tr = (_dot(F, Gc) + _dot(Fc, G))[..., None, None] * np.eye(3)
    t = (o + np.swapaxes(o, -1, -2) - tr) / (16 * _PI)
    return StressTensor3(t.real, StressKind.HERTZ)


def mh_stress(p: FieldPoint) -> StressTensor3:
    E, D, H, B = p.E, p.D, p.H, p.B
    outer = np.einsum("...p,...q->...pq", E, D) + np.einsum("...p,...q->...pq", H, B)
    trace = (_dot(E, D) + _dot(H, B))[..., None, None] * np.eye(3)
    return StressTensor3(outer / (4 * _PI) - trace / (8 * _PI), StressKind.MAXWELL_HEAVISIDE)


def _t4_bilinear(a, b):
    """Bilinear form whose diagonal ``_t4_bilinear(v, v)`` is ``T_mu^nu``.

    ``a`` and ``b`` are stacked ``(E, D, H, B)`` arrays of shape ``(..., 4, 3)``.
    """
    E1, D1, H1, B1 = (a[..., k, :] for k in range(4))
    E2, D2, H2, B2 = (b[..., k, :] for k in range(4))
    w = _dot(E1, D2) + _dot(H1, B2)
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape)[:-2] + (4, 4))
    out[..., 0, 0] = w / 2
    out[..., 0, 1:] = np.cross(E1, H2)
    out[..., 1:, 0] = -np.cross(D1, B2)
    out[..., 1:, 1:] = (np.einsum("...p,...q->...pq", E1, D2) + np.einsum("...p,...q->...pq", H1, B2)
                        - (w / 2)[..., None, None] * np.eye(3))
    return out / (4 * _PI)


def em_tensor4(p: FieldPoint) -> EMTensor4:
    """Real form: ``4 pi T_0^0 = (E.D + H.B)/2``, ``4 pi T_0^q = (E x H)_q``, ..."""
    return EMTensor4(_t4_bilinear(p.as_array(), p.as_array()))


def em_tensor4_complex(c: ComplexPair) -> EMTensor4:
    """``16 pi T = P* Q + P Q*`` as matrix products ``P_{mu lambda} Q^{lambda nu}``."""
    P = p_array(c.F, c.G)
    Q = q_array(c.F, c.G)
    t = np.conj(P) @ Q + P @ np.conj(Q)
    return EMTensor4((t / (16 * _PI)).real)


# ---------------------------------------------------------------- jets

def _parts(jet: FieldJet):
    v, g = jet.values, jet.grads
    return [v[..., k, :] for k in range(4)], [g[..., k, :, :] for k in range(4)]


def _t4_grad(jet: FieldJet) -> np.ndarray:
    """``dT[mu, nu, lam] = d_lam T_mu^nu`` by the product rule."""
    v = jet.values
    g = np.moveaxis(jet.grads, -1, 0)
    dt = _t4_bilinear(g, v) + _t4_bilinear(v, g)
    return np.moveaxis(dt, 0, -1)


def _div_t4(jet: FieldJet) -> np.ndarray:
    return np.einsum("...mnn->...m", _t4_grad(jet))


def ponderomotive_Z(jet: FieldJet) -> np.ndarray:
    """``Z_mu = F* . d_mu G - G* . d_mu F`` (complex)."""
    return (np.einsum("...k,...km->...m", np.conj(jet.F), jet.dG)
            - np.einsum("...k,...km->...m", np.conj(jet.G), jet.dF))


def ponderomotive(cfg, at=None, d: Deriv = Deriv()) -> PonderomotiveForce:
    """``X_mu = (Z_mu + Z_mu*) / 16 pi``."""
    jet = cfg if isinstance(cfg, FieldJet) else field_jet(cfg, at, d)
    z = ponderomotive_Z(jet)
    return PonderomotiveForce(((z + np.conj(z)) / (16 * _PI)).real)


def _x_real(jet: FieldJet) -> np.ndarray:
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    ein = "...k,...km->...m"
    return (np.einsum(ein, E, dD) - np.einsum(ein, D, dE)
            + np.einsum(ein, H, dB) - np.einsum(ein, B, dH)) / (8 * _PI)


def pforce_closed_form(eps: SampledField, mu: SampledField, E, H, at, d: Deriv = Deriv()) -> np.ndarray:
    """``X_mu = ((d_mu eps) E^2 + (d_mu mu) H^2) / 8 pi`` for ``D = eps E, B = mu H``."""
    ge = d.grad(eps, at).reshape(np.shape(E)[:-1] + (4,))
    gm = d.grad(mu, at).reshape(np.shape(E)[:-1] + (4,))
    return (ge * _dot(E, E)[..., None] + gm * _dot(H, H)[..., None]) / (8 * _PI)


# ---------------------------------------------------------------- 3D balances

def _jet(cfg, at, d):
    return cfg if isinstance(cfg, FieldJet) else field_jet(cfg, at, d)


def energy_balance_residual(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    jet = _jet(cfg, at, d)
    c = jet.c
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    t = lambda a: c * a[..., 0]  # noqa: E731  d/dt
    du_dt = (_dot(t(dE), D) + _dot(E, t(dD)) + _dot(t(dH), B) + _dot(H, t(dB))) / (8 * _PI)
    # div(E x H) = H . curl E - E . curl H
    curl_e = np.einsum("pqr,...rq->...p", _EPS3, dE[..., 1:])
    curl_h = np.einsum("pqr,...rq->...p", _EPS3, dH[..., 1:])
    flux = c / (4 * _PI) * (_dot(H, curl_e) - _dot(E, curl_h))
    joule = _dot(jet.source[..., 1:], E)
    pond = (_dot(E, t(dD)) - _dot(D, t(dE)) + _dot(H, t(dB)) - _dot(B, t(dH))) / (8 * _PI)
    return du_dt + flux + joule + pond


def _lorentz_force(jet: FieldJet):
    (E, D, H, B), _ = _parts(jet)
    rho, j = jet.source[..., 0], jet.source[..., 1:]
    return rho[..., None] * E + np.cross(j, B) / jet.c


def _d_cross(a, b, da, db):
    """``d_n (a x b)`` with derivative index last."""
    return (np.einsum("pqr,...qn,...r->...pn", _EPS3, da, b)
            + np.einsum("pqr,...q,...rn->...pn", _EPS3, a, db))


def _curl_of(djac):
    return np.einsum("pqr,...rq->...p", _EPS3, djac[..., 1:])


def _div_stress(jet: FieldJet, kind: StressKind) -> np.ndarray:
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    sp = slice(1, None)
    # d_q (E_p D_q) etc.
    ed = np.einsum("...pq,...q->...p", dE[..., sp], D) + E * np.trace(dD[..., sp], axis1=-2, axis2=-1)[..., None]
    hb = np.einsum("...pq,...q->...p", dH[..., sp], B) + H * np.trace(dB[..., sp], axis1=-2, axis2=-1)[..., None]
    # d_p (E.D + H.B)
    grad_w = (np.einsum("...qp,...q->...p", dE[..., sp], D) + np.einsum("...q,...qp->...p", E, dD[..., sp])
              + np.einsum("...qp,...q->...p", dH[..., sp], B) + np.einsum("...q,...qp->...p", H, dB[..., sp]))
    if kind is StressKind.HERTZ:
        # d_q (E_q D_p + H_q B_p)
        sym = (np.einsum("...qq,...p->...p", dE[..., sp], D) + np.einsum("...q,...pq->...p", E, dD[..., sp])
               + np.einsum("...qq,...p->...p", dH[..., sp], B) + np.einsum("...q,...pq->...p", H, dB[..., sp]))
        return (ed + hb + sym - grad_w) / (8 * _PI)
    return (ed + hb) / (4 * _PI) - grad_w / (8 * _PI)


def _x_spatial_3d(jet):
    return _x_real(jet)[..., 1:]


def momentum_balance_residual(cfg, at=None, d: Deriv = Deriv(), kind: str = "hertz") -> np.ndarray:
    """Residual of the momentum balance.

    ``kind``: ``"hertz"`` (symmetric stress plus the curl term),
    ``"mh"`` (non-symmetric Maxwell-Heaviside stress), or ``"complex"``
    (left minus right side of the complex-field form).
    """
    jet = _jet(cfg, at, d)
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    d_dxb = _d_cross(D, B, dD, dB)
    dg_dt = d_dxb[..., 0] / (4 * _PI)  # d/dt [(D x B) / 4 pi c]
    lorentz = _lorentz_force(jet)
    if kind == "hertz":
        curl_term = _curl_of(_d_cross(E, D, dE, dD) + _d_cross(H, B, dH, dB)) / (8 * _PI)
        return -dg_dt + _div_stress(jet, StressKind.HERTZ) - lorentz + curl_term + _x_spatial_3d(jet)
    if kind == "mh":
        return -dg_dt + _div_stress(jet, StressKind.MAXWELL_HEAVISIDE) - lorentz + _x_spatial_3d(jet)
    if kind == "complex":
        F, G, dF, dG = jet.F, jet.G, jet.dF, jet.dG
        Fc, Gc, dFc, dGc = np.conj(F), np.conj(G), np.conj(dF), np.conj(dG)
        curl_term = _curl_of(_d_cross(F, Gc, dF, dGc) + _d_cross(Fc, G, dFc, dG)) / (16 * _PI)
        sp = slice(1, None)
        ein = "...q,...qp->...p"
        grad_term = (np.einsum(ein, F, dGc[..., sp]) - np.einsum(ein, G, dFc[..., sp])
                     + np.einsum(ein, Fc, dG[..., sp]) - np.einsum(ein, Gc, dF[..., sp])) / (16 * _PI)
        lhs = lorentz + dg_dt
        rhs = _div_stress_complex(jet) + curl_term + grad_term
        return (lhs - rhs).real
    raise ValueError(f"unknown momentum balance kind {kind!r}")


def _div_stress_complex(jet: FieldJet) -> np.ndarray:
    """``d_q T_pq`` from the complex symmetric form."""
    F, G, dF, dG = jet.F, jet.G, jet.dF[..., 1:], jet.dG[..., 1:]
    Fc, Gc, dFc, dGc = np.conj(F), np.conj(G), np.conj(dF), np.conj(dG)

    def d_outer(a, b, da, db):
        # d_q (a_p b_q) and d_q (a_q b_p)
        first = np.einsum("...pq,...q->...p", da, b) + a * np.trace(db, axis1=-2, axis2=-1)[..., None]
        second = np.trace(da, axis1=-2, axis2=-1)[..., None] * b + np.einsum("...q,...pq->...p", a, db)
        return first + second

    def grad_dot(a, b, da, db):
        return np.einsum("...qp,...q->...p", da, b) + np.einsum("...q,...qp->...p", a, db)

    total = (d_outer(F, Gc, dF, dGc) + d_outer(Fc, G, dFc, dG)
             - grad_dot(F, Gc, dF, dGc) - grad_dot(Fc, G, dFc, dG))
    return total / (16 * _PI)


def divergence_two_tensors(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    """``8 pi d_q (T~_pq - T_pq) - [curl(E x D + H x B)]_p`` (an identity)."""
    jet = _jet(cfg, at, d)
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    lhs = 8 * _PI * (_div_stress(jet, StressKind.MAXWELL_HEAVISIDE) - _div_stress(jet, StressKind.HERTZ))
    return lhs - _curl_of(_d_cross(E, D, dE, dD) + _d_cross(H, B, dH, dB))


# ---------------------------------------------------------------- covariant balances

def covariant_balance_residual(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    """``d_nu T_mu^nu + X_mu + (1/c) F_{mu lambda} j^lambda`` (covariant index)."""
    jet = _jet(cfg, at, d)
    (E, D, H, B), _ = _parts(jet)
    f_mn, _, _, _ = real_tensors(FieldPoint(E, D, H, B))
    force = np.einsum("...ml,...l->...m", f_mn, jet.j_up) / jet.c
    return _div_t4(jet) + ponderomotive(jet).components + force


def _x_lower(at):
    return np.asarray(at, dtype=float) @ METRIC


_ANGULAR_FORMS = {"3d": "3d", "covariant": "covariant", "dual": "dual", "dual-covariant": "dual"}


def angular_momentum_residual(cfg, at, d: Deriv = Deriv(), form: str = "3d") -> np.ndarray:
    """Angular-momentum balance residual.

    ``"3d"``: ``d_q M_pq - (r x net force)_p - d_t (r x G)_p`` with
    ``M_pq = e_prs x_r T_sq`` (Hertz stress).  ``"covariant"``: the
    antisymmetric rank-2 residual ``d_nu(x_l T_m^nu - x_m T_l^nu) - (T_ml - T_lm)
    + (x_l X_m - x_m X_l) + (1/c)(x_l F_mn - x_m F_ln) j^n``.  ``"dual"`` (or
    ``"dual-covariant"``): the
    rank-2 residual of the Levi-Civita contracted form.
    """
    form = _ANGULAR_FORMS.get(form.lower()) if isinstance(form, str) else None
    if form is None:
        raise ValueError("angular momentum form must be '3d', 'covariant' or 'dual'")
    jet = _jet(cfg, at, d)
    x_up = np.asarray(at, dtype=float)
    if form == "3d":
        (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
        r = x_up[..., 1:]
        t = hertz_stress(FieldPoint(E, D, H, B)).components
        div_t = _div_stress(jet, StressKind.HERTZ)
        # d_q (e_prs x_r T_sq) = e_pqs T_sq + e_prs x_r d_q T_sq
        div_m = np.einsum("pqs,...sq->...p", _EPS3, t) + np.cross(r, div_t)
        net = (_lorentz_force(jet)
               - _curl_of(_d_cross(E, D, dE, dD) + _d_cross(H, B, dH, dB)) / (8 * _PI)
               - _x_spatial_3d(jet))
        dg_dt = _d_cross(D, B, dD, dB)[..., 0] / (4 * _PI)
        return div_m - np.cross(r, net) - np.cross(r, dg_dt)

    T = _t4_bilinear(jet.values, jet.values)
    dT = _t4_grad(jet)
    div_T = np.einsum("...mnn->...m", dT)
    x = _x_lower(x_up)
    X = ponderomotive(jet).components
    (E, D, H, B), _ = _parts(jet)
    f_mn, _, _, _ = real_tensors(FieldPoint(E, D, H, B))
    fj = np.einsum("...mn,...n->...m", f_mn, jet.j_up) / jet.c
    t_low = T @ METRIC  # T_{mu lambda} = T_mu^nu g_{nu lambda}
    if form == "covariant":
        # d_nu (x_l T_m^nu) = g_{l nu} T_m^nu + x_l d_nu T_m^nu = T_{m l} + x_l div_T_m
        d_xt = t_low + np.einsum("...l,...m->...ml", x, div_T)
        lhs = d_xt - np.swapaxes(d_xt, -1, -2)
        torque = t_low - np.swapaxes(t_low, -1, -2)
        xx = np.einsum("...l,...m->...ml", x, X)
        xf = np.einsum("...l,...m->...ml", x, fj)
        return lhs - torque + (xx - np.swapaxes(xx, -1, -2)) + (xf - np.swapaxes(xf, -1, -2))
    if form == "dual":
        # d_nu (e^{ml s t} x_s T_t^nu) = e^{ml s t} (T_{t s} + x_s div_T_t)
        d_term = np.einsum("mlst,...ts->...ml", _E_UP, t_low) + np.einsum("mlst,...s,...t->...ml", _E_UP, x, div_T)
        torque = np.einsum("mlst,...st->...ml", _E_UP, t_low)
        rest = np.einsum("mlst,...s,...t->...ml", _E_UP, x, X + fj)
        return d_term + torque + rest


def angular_proof_identity(cfg, at, d: Deriv = Deriv()) -> np.ndarray:
    """``3d residual - e_prs T_sr - r x (Hertz momentum residual)``: zero for any fields."""
    jet = _jet(cfg, at, d)
    (E, D, H, B), _ = _parts(jet)
    t = hertz_stress(FieldPoint(E, D, H, B)).components
    r = np.asarray(at, dtype=float)[..., 1:]
    return (angular_momentum_residual(jet, at, form="3d")
            - np.einsum("prs,...sr->...p", _EPS3, t)
            - np.cross(r, momentum_balance_residual(jet, kind="hertz")))


def reduction_4d_to_3d(cfg, at, d: Deriv = Deriv()) -> np.ndarray:
    """3D expression obtained from the ``(0, p)`` rows of the dual form.

    ``-(1/4 pi c) d_t[e_pqr x_q (D x B)_r] + d_s(e_pqr x_q T~_rs) + e_pqr T~_qr
    + e_pqr x_q (X_r + Y_r)`` with ``-Y`` the Lorentz force density.
    """
    jet = _jet(cfg, at, d)
    c = jet.c
    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    r = np.asarray(at, dtype=float)[..., 1:]
    tt = mh_stress(FieldPoint(E, D, H, B)).components
    div_tt = _div_stress(jet, StressKind.MAXWELL_HEAVISIDE)
    d_dxb_dt = c * _d_cross(D, B, dD, dB)[..., 0]
    term_t = -np.cross(r, d_dxb_dt) / (4 * _PI * c)
    # d_s (e_pqr x_q T~_rs) = e_psr T~_rs + e_pqr x_q d_s T~_rs
    term_s = np.einsum("psr,...rs->...p", _EPS3, tt) + np.cross(r, div_tt)
    torque = np.einsum("pqr,...qr->...p", _EPS3, tt)
    xy = _x_spatial_3d(jet) - _lorentz_force(jet)
    return term_t + term_s + torque + np.cross(r, xy)


# ---------------------------------------------------------------- proof chain

def proof_chain_identities(cfg, at=None, d: Deriv = Deriv()) -> dict:
    """Residual arrays of the intermediate steps of the 3D momentum derivation.

    ``IdentityI`` and ``FactI`` are identities.  ``FactII`` requires Maxwell's
    equations; the Maxwell residuals are added back so that the check is an
    identity on arbitrary fields.  ``FactsI&II`` is checked in its
    identity form (the last equality of the chain).
    """
    jet = _jet(cfg, at, d)
    c = jet.c
    F, G = jet.F, jet.G
    Fc, Gc = np.conj(F), np.conj(G)
    dF, dG = jet.dF, jet.dG
    dFc, dGc = np.conj(dF), np.conj(dG)
    sp = slice(1, None)
    div = lambda dj: np.trace(dj[..., sp], axis1=-2, axis2=-1)[..., None]  # noqa: E731
    curl = _curl_of

    # d_q (a_p b_q + a_q b_p - delta_pq a.b)
    def d_sym(a, b, da, db):
        return (np.einsum("...pq,...q->...p", da[..., sp], b) + a * div(db)
                + div(da) * b + np.einsum("...q,...pq->...p", a, db[..., sp])
                - np.einsum("...qp,...q->...p", da[..., sp], b) - np.einsum("...q,...qp->...p", a, db[..., sp]))

    identity_i = d_sym(F, Gc, dF, dGc) - (F * div(dGc) - np.cross(Gc, curl(dF))
                                          + Gc * div(dF) - np.cross(F, curl(dGc)))

    x1 = 0.5 * (F * div(dGc) - np.cross(Gc, curl(dF)) + Fc * div(dG) - np.cross(G, curl(dFc)))
    x2 = 0.5 * (G * div(dFc) - np.cross(Fc, curl(dG)) + Gc * div(dF) - np.cross(F, curl(dGc)))
    lhs_i = 0.5 * (d_sym(F, Gc, dF, dGc) + d_sym(Fc, G, dFc, dG))
    fact_i = lhs_i - (x1 + x2)

    (E, D, H, B), (dE, dD, dH, dB) = _parts(jet)
    curl_res, div_res = residual_complex3d(jet)
    lorentz = _lorentz_force(jet)
    d_dxb_dt = c * _d_cross(D, B, dD, dB)[..., 0]
    correction = (F * np.conj(div_res)[..., None] + np.cross(Gc, curl_res)).real
    fact_ii = x1 - (4 * _PI * lorentz + d_dxb_dt / c) - correction

    div_t = _div_stress_complex(jet)
    quarter_div = 0.25 * (F * div(dGc) - Gc * div(dF) + Fc * div(dG) - G * div(dFc))
    quarter_curl = 0.25 * (np.cross(F, curl(dGc)) - np.cross(Gc, curl(dF))
                           + np.cross(Fc, curl(dG)) - np.cross(G, curl(dFc)))
    facts = x1 - (4 * _PI * div_t + quarter_div + quarter_curl)
    return {
        "IdentityI": identity_i,
        "FactI": fact_i,
        "FactII": fact_ii,
        "FactsI&II": facts,
    }


def appendix_c_suite(cfg, at=None, d: Deriv = Deriv()) -> dict:
    """The four expressions of ``Z_mu`` and the intermediate relation ``C1``.

    Returns a dict of complex arrays; pairwise differences of the ``Z.*``
    entries vanish for arbitrary smooth fields.
    """
    jet = _jet(cfg, at, d)
    P = p_array(jet.F, jet.G)
    Q = q_array(jet.F, jet.G)
    dP = tensor_grad(p_array, jet.dF, jet.dG)  # dP[m, n, l] = d_l P_{mn}
    dQ = tensor_grad(q_array, jet.dF, jet.dG)
    divQ = np.einsum("...lnn->...l", dQ)
    z1 = (np.einsum("...ml,...l->...m", np.conj(P), divQ)
          - np.einsum("...mln,...ln->...m", dP, np.conj(Q)))
    z2 = 0.5 * np.einsum("...st,...tsm->...m", np.conj(P), dQ)
    z3 = -0.5 * np.einsum("...st,...tsm->...m", np.conj(Q), dP)
    z4 = ponderomotive_Z(jet)
    # C1 contracted with Q*^{l n}: cyclic sum of dP versus i e d Q
    cyc = dP + np.einsum("...nlm->...mnl", dP) + np.einsum("...lmn->...mnl", dP)
    cov_div = residual_covariant(jet) - 4 * _PI / jet.c * jet.j_up  # d_tau Q^{s tau}
    c1_lhs = np.einsum("...mnl,...ln->...m", cyc, np.conj(Q))
    c1_rhs = 1j * np.einsum("mnls,...s,...ln->...m", _E_DOWN, cov_div, np.conj(Q))
    return {"Z.PQ": z1, "Z.PdQ": z2, "Z.QdP": z3, "Z.FG": z4, "C1": c1_lhs - c1_rhs}


def balance_scale(jet: FieldJet) -> float:
    """``max|field| * max(|field|, |d field|, |source|)``: the size of each balance term."""
    v = float(np.abs(jet.values).max(initial=0.0))
    g = float(np.abs(jet.grads).max(initial=0.0)) * max(jet.c, 1.0)
    s = float(np.abs(jet.source).max(initial=0.0)) * 4 * _PI * max(jet.c, 1.0)
    return max(v * max(g, s, v), 1e-300) / (4 * _PI)
