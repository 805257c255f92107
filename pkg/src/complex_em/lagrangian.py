"""Complex and real Lagrangian densities, formal derivatives and Euler-Lagrange residuals.

Formal derivatives treat ``P`` and ``P*`` as independent variables.  With
respect to an antisymmetric component the six pairs ``alpha < beta`` are the
coordinates: moving ``P_{ab}`` by ``+d`` moves ``P_{ba}`` by ``-d``, and the
resulting pair derivative is divided by two so that it equals the derivative
with respect to ``P_{ab}`` taken as one of sixteen free entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import ComplexPair, from_complex, p_array, q_array, real_tensors
from .grid_fd import Deriv
from .maxwell import tensor_grad, _jet
from .media import MediumSpec, constitutive_R
from .potentials import _f_from_grad, _field_of, _four_current
from .tensor_core import levi_civita_array

__all__ = [
    "LagrangianValue",
    "density_L0",
    "density_L1",
    "lagrangian_densities",
    "formal_derivative",
    "formal_gradient",
    "formal_derivative_check",
    "real_lagrangian",
    "conjugate_momentum",
    "conjugate_momentum_check",
    "euler_lagrange_residual",
    "complex_lagrangian_residual",
]

_E_UP = levi_civita_array("up").astype(float)
_FOUR_PI = 4.0 * np.pi
_PAIRS = [(a, b) for a in range(4) for b in range(a + 1, 4)]


@dataclass(frozen=True)
class LagrangianValue:
    L0: np.ndarray
    L1: np.ndarray
    forms: dict = field(default_factory=dict)
    L_real: np.ndarray | None = None

    def reality_residual(self) -> float:
        """Largest ``|Im L0|`` or ``|Re L1|``."""
        return float(max(np.abs(np.imag(self.L0)).max(initial=0.0),
                         np.abs(np.real(self.L1)).max(initial=0.0)))


def density_L0(P, Pc):
    """``(i/4) e^{stkr} (P_st P_kr - Pc_st Pc_kr)`` with ``Pc`` independent of ``P``."""
    return 0.25j * (np.einsum("stkr,...st,...kr->...", _E_UP, P, P)
                    - np.einsum("stkr,...st,...kr->...", _E_UP, Pc, Pc))


def density_L1(P, Pc):
    """``(i/2) e^{stkr} P_st Pc_kr``."""
    return 0.5j * np.einsum("stkr,...st,...kr->...", _E_UP, P, Pc)


def _density_L1_conj(P, Pc):
    # complex conjugate of L1 written as a function of (P, Pc)
    return -density_L1(P, Pc)


_DENSITIES = {"L0": density_L0, "L1": density_L1, "L1*": _density_L1_conj}


def lagrangian_densities(c: ComplexPair) -> LagrangianValue:
    """All printed forms of both densities, keyed ``L0.<form>`` / ``L1.<form>``."""
    F = np.asarray(c.F, dtype=complex)
    G = np.asarray(c.G, dtype=complex)
    P = p_array(F, G)
    Q = q_array(F, G)
    Pc, Qc = P.conj(), Q.conj()
    fp = from_complex(ComplexPair(F, G))
    f_mn, g_mn, r, s = real_tensors(fp)

    def tr(a, b):
        return np.einsum("...st,...ts->...", a, b)

    forms = {
        "L0.PQ": 0.5 * (tr(P, Q) + tr(Pc, Qc)),
        "L0.e": density_L0(P, Pc),
        "L0.FR-GS": tr(f_mn, r) - tr(g_mn, s),
        "L0.2FR": 2.0 * tr(f_mn, r),
        "L0.3d": 4.0 * (_dot(fp.E, fp.D) - _dot(fp.H, fp.B)),
        "L1.PQ": tr(Pc, Q),
        "L1.half": 0.5 * (tr(Pc, Q) - tr(P, Qc)),
        "L1.e": density_L1(P, Pc),
        "L1.3d": 4j * (_dot(fp.E, fp.B) - _dot(fp.H, fp.D)),
    }
    return LagrangianValue(forms["L0.PQ"], forms["L1.PQ"], forms)


def _dot(a, b):
    return np.einsum("...k,...k->...", a, b)


def formal_derivative(name: str, P, Pc, alpha: int, beta: int, wrt: str = "P",
                      step: float = 1e-6) -> np.ndarray:
    """Central-difference ``dL/dP_{alpha beta}`` (or ``dL/dP*_{alpha beta}``).

    The step is relative to the largest entry of ``P``; the antisymmetric
    partner moves oppositely and the pair derivative is halved.
    """
    if alpha == beta:
        raise ValueError("diagonal components of an antisymmetric tensor are not free")
    fn = _DENSITIES[name]
    P = np.asarray(P, dtype=complex)
    Pc = np.asarray(Pc, dtype=complex)
    h = step * max(float(np.abs(P).max(initial=0.0)), 1.0)
    e = np.zeros((4, 4))
    e[alpha, beta], e[beta, alpha] = 1.0, -1.0
    if wrt == "P":
        up, down = fn(P + h * e, Pc), fn(P - h * e, Pc)
    elif wrt == "Pconj":
        up, down = fn(P, Pc + h * e), fn(P, Pc - h * e)
    else:
        raise ValueError("wrt must be 'P' or 'Pconj'")
    return (up - down) / (2.0 * h) / 2.0


def formal_gradient(P) -> np.ndarray:
    """Closed form of ``d L0 / d P_{ab}``: ``(i/2) e^{abkr} P_kr``."""
    return 0.5j * np.einsum("abkr,...kr->...ab", _E_UP, np.asarray(P))


def formal_derivative_check(c: ComplexPair, step: float = 1e-6) -> dict:
    """Relative residuals of the formal derivative relations, keyed by tag.

    ``MaxwellLagrangian.order`` compares the transposed index order used in
    the complex Maxwell form against the sign flip of the antisymmetric pair,
    and ``MaxwellLagrangian.L1`` checks ``dL1/dP_{nu mu} = -Q*^{mu nu}``.
    """
    F = np.asarray(c.F, dtype=complex)
    G = np.asarray(c.G, dtype=complex)
    if F.shape != (3,):
        raise ValueError("formal_derivative_check takes a single field pair")
    P, Q = p_array(F, G), q_array(F, G)
    Pc, Qc = P.conj(), Q.conj()
    scale = max(float(np.abs(Q).max()), 1e-300)
    out = {k: 0.0 for k in ("DiffZero.P", "DiffZero.Pconj", "DiffOne.Pconj", "DiffOne.conjP",
                            "MaxwellLagrangian.order", "MaxwellLagrangian.L1", "closed_form")}

    def upd(tag, val):
        out[tag] = max(out[tag], float(np.abs(val)) / scale)

    for a, b in _PAIRS:
        d0 = formal_derivative("L0", P, Pc, a, b, "P", step)
        upd("DiffZero.P", d0 - Q[b, a])
        upd("DiffZero.Pconj", formal_derivative("L0", P, Pc, a, b, "Pconj", step) - Qc[b, a])
        upd("DiffOne.Pconj", formal_derivative("L1", P, Pc, a, b, "Pconj", step) - Q[b, a])
        upd("DiffOne.conjP", formal_derivative("L1*", P, Pc, a, b, "P", step) - Qc[b, a])
        upd("MaxwellLagrangian.order", formal_derivative("L0", P, Pc, b, a, "P", step) + d0)
        # d L1 / d P_{nu mu} with (nu, mu) = (a, b) should be -Q*^{mu nu} = -Qc[b, a]
        upd("MaxwellLagrangian.L1", formal_derivative("L1", P, Pc, a, b, "P", step) + Qc[b, a])
    out["closed_form"] = float(np.abs(formal_gradient(P) - Q.T).max()) / scale
    return out


def real_lagrangian(f_dd, m: MediumSpec, A=None, j=None) -> np.ndarray:
    """``1/4 F_{st} eps^{ts l r} F_{lr} - (4 pi/c) j^s A_s``; ``A`` lower, ``j`` upper."""
    f = np.asarray(f_dd)
    if np.iscomplexobj(f):
        raise ValueError("the real Lagrangian takes a real field tensor")
    if np.abs(f + np.swapaxes(f, -1, -2)).max(initial=0.0) > 1e-13 * max(np.abs(f).max(initial=0.0), 1e-300):
        raise ValueError("field tensor must be antisymmetric")
    r = constitutive_R(f, m)
    out = 0.25 * np.einsum("...st,...ts->...", f, r)
    if A is not None and j is not None:
        out = out - _FOUR_PI / m.c * np.einsum("...s,...s->...", np.asarray(j), np.asarray(A))
    return out


def conjugate_momentum(grad_a, m: MediumSpec, step: float = 1e-6) -> np.ndarray:
    """``dL/d(d_nu A_mu)`` by central differences over the 16 gradient entries.

    ``grad_a[mu, nu] = d_nu A_mu``; returns an array indexed ``[mu, nu]``.
    """
    g = np.asarray(grad_a, dtype=float)
    h = step * max(float(np.abs(g).max(initial=0.0)), 1.0)
    out = np.zeros(g.shape)
    for mu in range(4):
        for nu in range(4):
            e = np.zeros((4, 4))
            e[mu, nu] = h
            out[..., mu, nu] = (real_lagrangian(_f_from_grad(g + e), m)
                                - real_lagrangian(_f_from_grad(g - e), m)) / (2.0 * h)
    return out


def conjugate_momentum_check(A, m: MediumSpec, at, d: Deriv = Deriv(), step: float = 1e-6) -> float:
    """Max relative deviation of the numerical conjugate momentum from ``R^{mu nu}``."""
    g = d.grad(_field_of(A), at)
    r = constitutive_R(_f_from_grad(g), m)
    num = conjugate_momentum(g, m, step)
    scale = max(float(np.abs(r).max(initial=0.0)), 1e-300)
    return float(np.abs(num - r).max(initial=0.0)) / scale


def euler_lagrange_residual(A, m: MediumSpec, j, at, d: Deriv = Deriv()) -> np.ndarray:
    """``d_nu R^{mu nu} + (4 pi/c) j^mu`` from the second derivatives of ``A``.

    ``j`` samples ``(rho, j)`` like the Maxwell source samplers, or is ``None``.
    """
    h = d.hess(_field_of(A), at)      # h[tau, sigma, nu] = d_nu d_sigma A_tau
    df = np.swapaxes(h, -2, -3) - h   # d_nu F_{sigma tau}, indexed [sigma, tau, nu]
    dr = constitutive_R(np.moveaxis(df, -1, -3), m)   # [nu, mu, rho] = d_nu R^{mu rho}
    res = np.einsum("...nmn->...m", dr)
    jup = _four_current(j, at, m.c)
    return res if jup is None else res + _FOUR_PI / m.c * jup


def complex_lagrangian_residual(cfg, at=None, d: Deriv = Deriv()) -> dict:
    """Complex Maxwell equations written through the formal derivatives.

    ``L0``: ``d_nu (dL0/dP_{nu mu}) + (4 pi/c) j^mu``;
    ``L1``: ``d_nu (dL1/dP_{nu mu}) - (4 pi/c) j^mu`` with
    ``dL1/dP_{nu mu} = -conj(dL0/dP_{nu mu})``.
    """
    jet = _jet(cfg, at, d)
    dp = tensor_grad(p_array, jet.dF, jet.dG)               # [k, r, x] = d_x P_kr
    dgrad = 0.5j * np.einsum("abkr,...krx->...abx", _E_UP, dp)  # d_x (dL0/dP_ab)
    src = _FOUR_PI / jet.c * jet.j_up
    r0 = np.einsum("...nmn->...m", dgrad) + src
    r1 = np.einsum("...nmn->...m", -dgrad.conj()) - src
    return {"L0": r0, "L1": r1}
