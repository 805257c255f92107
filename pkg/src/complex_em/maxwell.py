"""Pointwise Maxwell residuals in complex 3D, covariant, dual and real forms.

A :class:`FieldConfiguration` bundles a field sampler returning the stacked
``(E, D, H, B)`` array of shape ``(..., 4, 3)``, an optional source sampler
returning ``(rho, j_x, j_y, j_z)``, the light speed and a singular-set
predicate.  Every residual takes a derivative channel (:class:`Deriv`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fields import q_array, p_array
from .grid_fd import Deriv, SampledField
from .tensor_core import METRIC, levi_civita3, levi_civita_array

__all__ = [
    "SourceDensity",
    "FieldConfiguration",
    "SingularEventError",
    "FieldJet",
    "field_jet",
    "residual_complex3d",
    "residual_covariant",
    "residual_dual",
    "dual_contraction",
    "residual_real_split",
    "residual_continuity",
    "vacuum_rank3_check",
    "implied_sources",
    "maxwell_form_consistency",
    "tensor_grad",
]

_EPS3 = levi_civita3().astype(float)
_E_DOWN = levi_civita_array("down").astype(float)
_E_UP = levi_civita_array("up").astype(float)
_FOUR_PI = 4.0 * np.pi


class SingularEventError(ValueError):
    """An event lies inside a configuration's singular set."""


@dataclass(frozen=True)
class SourceDensity:
    rho: np.ndarray
    j: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho)
        j = np.asarray(self.j)
        if np.iscomplexobj(rho) or np.iscomplexobj(j):
            raise ValueError("charge and current densities must be real")
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(j))):
            raise ValueError("source densities must be finite")
        object.__setattr__(self, "rho", rho.astype(float))
        object.__setattr__(self, "j", j.astype(float))

    def four_current(self, c: float = 1.0) -> np.ndarray:
        """``j^mu = (c rho, j)``."""
        return np.concatenate([(c * self.rho)[..., None], self.j], axis=-1)


@dataclass(frozen=True)
class FieldConfiguration:
    fields: SampledField
    sources: SampledField | None = None
    c: float = 1.0
    singular: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if tuple(self.fields.shape) != (4, 3):
            raise ValueError("fields sampler must return (E, D, H, B) stacked as (..., 4, 3)")
        if self.sources is not None and tuple(self.sources.shape) != (4,):
            raise ValueError("sources sampler must return (rho, jx, jy, jz)")
        if not self.c > 0:
            raise ValueError("c must be positive")

    def check_events(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.singular is not None and np.any(self.singular(x)):
            raise SingularEventError("event inside the configuration's singular set")
        return x


@dataclass(frozen=True)
class FieldJet:
    """Field values, first derivatives ``d/dx^nu`` (last axis) and sources."""

    values: np.ndarray  # (..., 4, 3)
    grads: np.ndarray  # (..., 4, 3, 4)
    source: np.ndarray  # (..., 4): rho, j
    source_grads: np.ndarray  # (..., 4, 4)
    c: float

    @property
    def F(self):
        return self.values[..., 0, :] + 1j * self.values[..., 2, :]

    @property
    def G(self):
        return self.values[..., 1, :] + 1j * self.values[..., 3, :]

    @property
    def dF(self):
        return self.grads[..., 0, :, :] + 1j * self.grads[..., 2, :, :]

    @property
    def dG(self):
        return self.grads[..., 1, :, :] + 1j * self.grads[..., 3, :, :]

    @property
    def j_up(self):
        return np.concatenate([self.c * self.source[..., :1], self.source[..., 1:]], axis=-1)


def field_jet(cfg: FieldConfiguration, at, d: Deriv = Deriv()) -> FieldJet:
    x = cfg.check_events(at)
    vals = cfg.fields.value(x)
    grads = d.grad(cfg.fields, x)
    if cfg.sources is None:
        src = np.zeros(x.shape[:-1] + (4,))
        dsrc = np.zeros(x.shape[:-1] + (4, 4))
    else:
        src = cfg.sources.value(x)
        dsrc = d.grad(cfg.sources, x)
    return FieldJet(vals, grads, src, dsrc, cfg.c)


def _jet(cfg_or_jet, at, d):
    return cfg_or_jet if isinstance(cfg_or_jet, FieldJet) else field_jet(cfg_or_jet, at, d)


def _curl(jac):
    # jac[..., i, q] = d_q f_i over spatial q
    return np.einsum("pqr,...rq->...p", _EPS3, jac)


def residual_complex3d(cfg, at=None, d: Deriv = Deriv()):
    """``((i/c)(dG/dt + 4 pi j) - curl F, div G - 4 pi rho)``."""
    jet = _jet(cfg, at, d)
    c = jet.c
    dG, dF = jet.dG, jet.dF
    dG_dt = c * dG[..., 0]
    curl_res = 1j / c * (dG_dt + _FOUR_PI * jet.source[..., 1:]) - _curl(dF[..., 1:])
    div_res = np.trace(dG[..., 1:], axis1=-2, axis2=-1) - _FOUR_PI * jet.source[..., 0]
    return curl_res, div_res


def tensor_grad(builder, dF, dG):
    """Apply a linear tensor builder to each derivative slice; derivative index last."""
    return np.moveaxis(builder(np.moveaxis(dF, -1, 0), np.moveaxis(dG, -1, 0)), 0, -1)


def residual_covariant(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    """``d_nu Q^{mu nu} + (4 pi / c) j^mu``."""
    jet = _jet(cfg, at, d)
    dq = tensor_grad(q_array, jet.dF, jet.dG)
    return np.einsum("...mnn->...m", dq) + _FOUR_PI / jet.c * jet.j_up


def residual_dual(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    """Rank-3 residual ``d_l P_{mn} + d_m P_{nl} + d_n P_{lm} + (4 pi i/c) e_{mnls} j^s``."""
    jet = _jet(cfg, at, d)
    dp = tensor_grad(p_array, jet.dF, jet.dG)  # dp[m, n, l] = d_l P_{mn}
    cyc = dp + np.einsum("...nlm->...mnl", dp) + np.einsum("...lmn->...mnl", dp)
    return cyc + 4j * np.pi / jet.c * np.einsum("mnls,...s->...mnl", _E_DOWN, jet.j_up)


def dual_contraction(t: np.ndarray) -> np.ndarray:
    """``e^{kappa mu nu lambda} T_{mu nu lambda}``; equals ``6i`` times the covariant residual."""
    return np.einsum("kmnl,...mnl->...k", _E_UP, t)


def residual_real_split(cfg, at=None, d: Deriv = Deriv()):
    """``(d_nu R^{mu nu} + (4 pi/c) j^mu, d_nu S^{mu nu})`` built from real tensors.

    ``R`` holds ``(D, -H)`` and ``S`` holds ``(B, E)``; the blocks are
    assembled here from the real fields rather than taken from ``Q``.
    """
    jet = _jet(cfg, at, d)
    g = jet.grads  # (..., 4 fields, 3, 4)
    dE, dD, dH, dB = (g[..., k, :, :] for k in range(4))

    def div_block(time_vec_grad, spatial_vec_grad):
        # T^{0k} = -t_k, T^{pq} = -e_{pqr} s_r ; divergence over the second index
        row0 = -np.trace(time_vec_grad[..., :, 1:], axis1=-2, axis2=-1)
        rows = time_vec_grad[..., :, 0] - np.einsum("pqr,...rq->...p", _EPS3, spatial_vec_grad[..., :, 1:])
        return np.concatenate([row0[..., None], rows], axis=-1)

    r_res = div_block(dD, dH) + _FOUR_PI / jet.c * jet.j_up
    s_res = div_block(dB, -dE)
    return r_res, s_res


def residual_continuity(cfg, at=None, d: Deriv = Deriv()) -> np.ndarray:
    """``d rho / dt + div j``."""
    jet = _jet(cfg, at, d)
    ds = jet.source_grads
    return jet.c * ds[..., 0, 0] + np.trace(ds[..., 1:, 1:], axis1=-2, axis2=-1)


def vacuum_rank3_check(cfg, at, alpha: int, beta: int, d: Deriv = Deriv(),
                       vacuum_rtol: float = 1e-12, second_metric: str = "beta") -> np.ndarray:
    """Residual (per ``mu``) of the rank-3 vacuum identity at fixed ``alpha, beta``.

    Evaluates ``g^{aa} e_{a mu nu tau} d^nu Q^{tau b} - g^{bb} e_{b mu nu tau}
    d^nu Q^{tau a} + i d_mu Q^{ab}`` with no summation over ``a, b``.
    ``second_metric="alpha"`` puts ``g^{aa}`` on the second term instead; that
    variant only holds when ``alpha`` and ``beta`` are both spatial or both 0.
    Requires ``D = E``, ``B = H`` and vanishing sources.
    """
    if second_metric not in ("alpha", "beta"):
        raise ValueError("second_metric must be 'alpha' or 'beta'")
    if alpha not in range(4) or beta not in range(4):
        raise ValueError("alpha and beta must be in 0..3")
    jet = _jet(cfg, at, d)
    v = jet.values
    scale = max(float(np.abs(v).max(initial=0.0)), 1e-300)
    if (np.abs(v[..., 0, :] - v[..., 1, :]).max(initial=0.0) > vacuum_rtol * scale
            or np.abs(v[..., 2, :] - v[..., 3, :]).max(initial=0.0) > vacuum_rtol * scale
            or np.abs(jet.source).max(initial=0.0) > 0.0):
        raise ValueError("vacuum_rank3_check needs a source-free vacuum configuration")
    dq = tensor_grad(q_array, jet.dF, jet.dG)  # dq[s, t, n] = d_n Q^{st}
    dq_up = np.einsum("...stn,nm->...stm", dq, METRIC)  # d^m Q^{st}
    ga = METRIC[alpha, alpha]
    gb = METRIC[beta, beta] if second_metric == "beta" else ga
    t1 = ga * np.einsum("mnt,...tn->...m", _E_DOWN[alpha], dq_up[..., :, beta, :])
    t2 = gb * np.einsum("mnt,...tn->...m", _E_DOWN[beta], dq_up[..., :, alpha, :])
    return t1 - t2 + 1j * dq[..., alpha, beta, :]


def implied_sources(cfg, at=None, d: Deriv = Deriv()) -> SourceDensity:
    """Diagnostic ``(rho, j)`` implied by ``div G`` and ``curl F`` (real parts)."""
    jet = _jet(cfg, at, d)
    c = jet.c
    rho = np.trace(jet.dG[..., 1:], axis1=-2, axis2=-1) / _FOUR_PI
    j = (c / 1j * _curl(jet.dF[..., 1:]) - c * jet.dG[..., 0]) / _FOUR_PI
    return SourceDensity(rho.real, j.real)


def maxwell_form_consistency(cfg, at, d: Deriv = Deriv()) -> dict:
    """Rearrangement residuals between the four residual forms (same jet)."""
    jet = field_jet(cfg, at, d)
    curl_res, div_res = residual_complex3d(jet)
    cov = residual_covariant(jet)
    dual = residual_dual(jet)
    r_res, s_res = residual_real_split(jet)
    scale = max(float(np.abs(jet.grads).max(initial=0.0)),
                _FOUR_PI / jet.c * float(np.abs(jet.j_up).max(initial=0.0)), 1e-300)

    def mx(a):
        return float(np.abs(a).max(initial=0.0))

    undual = 1j * np.einsum("mnls,...s->...mnl", _E_DOWN, cov)
    return {
        "CMProof.time": (mx(cov[..., 0] + div_res), scale),
        "CMProof.space": (mx(cov[..., 1:] + 1j * curl_res), scale),
        "MaxwellReal.R.form": (mx(cov.real - r_res), scale),
        "MaxwellReal.S.form": (mx(cov.imag - s_res), scale),
        "MaxwellI.form": (mx(dual - undual), scale),
        "QPIdentity": (mx(dual_contraction(dual) - 6j * cov), scale),
    }
