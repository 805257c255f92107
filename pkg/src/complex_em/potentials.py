"""Four-potential and Hertz-tensor layer for uniformly moving media.

Potentials are :class:`SampledField` objects with the derivative axis
``x^0 = ct`` first.  Built on :class:`ExpField` they keep exact derivatives
of every order, so single Fourier modes give machine-precision solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid_fd import Deriv, ExpField, LinearMap, SampledField, first_order_map
from .maxwell import FieldConfiguration, SourceDensity
from .media import MediumSpec, constitutive_R, fields_from_R
from .tensor_core import METRIC, CTensor2, FourVector, Variance, levi_civita3

__all__ = [
    "FourPotential",
    "HertzTensor",
    "PolarizationTensor",
    "F_from_A",
    "potential_fields",
    "potential_configuration",
    "gauge_residual",
    "wave_operator",
    "A_wave_residual",
    "A_from_Z",
    "A_from_Z_3d",
    "potential_from_hertz",
    "hertz_wave_residual",
    "hertz_vector_residual",
    "hertz_current_residual",
    "sources_from_p",
    "sources_from_p_3d",
    "source_field",
    "wave_symbol",
    "dispersion_omega",
    "plane_wave",
    "gauge_polarization",
    "matched_hertz_amplitude",
    "transform_wavevector",
]

_EPS3 = levi_civita3().astype(float)
_FOUR_PI = 4.0 * np.pi


def _block_matrix(time_sign: float, space_sign: float) -> np.ndarray:
    """Linear map from stacked ``(a, b)`` (6,) to ``T^{0k} = time_sign a_k``,
    ``T^{pq} = space_sign e_{pqr} b_r`` (16,)."""
    out = np.zeros((4, 4, 2, 3))
    for k in range(3):
        out[0, k + 1, 0, k] = time_sign
        out[k + 1, 0, 0, k] = -time_sign
    out[1:, 1:, 1, :] = space_sign * _EPS3
    return out.reshape(16, 6)


_Z_LAYOUT = _block_matrix(1.0, -1.0)   # Z^{0k} = Z(e)_k, Z^{pq} = -e_pqr Z(m)_r
_P_LAYOUT = _block_matrix(-1.0, 1.0)   # p^{0k} = -p_k,   p^{pq} =  e_pqr m_r


def _split(t, layout):
    """Inverse of a block layout on the trailing ``(4, 4)`` axes."""
    t = np.asarray(t)
    flat = t.reshape(t.shape[:-2] + (16,))
    return (flat @ np.linalg.pinv(layout).T).reshape(t.shape[:-2] + (2, 3))


@dataclass(frozen=True)
class FourPotential:
    """Covariant ``A_lambda = (phi, -A)`` as a sampler of shape (4,)."""

    field: SampledField

    def __post_init__(self):
        if tuple(self.field.shape) != (4,):
            raise ValueError("a four-potential sampler must return shape (4,)")


@dataclass(frozen=True)
class HertzTensor:
    """Antisymmetric ``Z^{lambda nu}`` sampler of shape (4, 4)."""

    field: SampledField

    def __post_init__(self):
        if tuple(self.field.shape) != (4, 4):
            raise ValueError("a Hertz tensor sampler must return shape (4, 4)")

    @classmethod
    def from_vectors(cls, ze_zm: SampledField) -> "HertzTensor":
        """From a (2, 3) sampler holding ``(Z(e), Z(m))``."""
        return cls(LinearMap(_Z_LAYOUT, ze_zm, (4, 4)))

    @staticmethod
    def vectors(z) -> np.ndarray:
        return _split(z, _Z_LAYOUT)


@dataclass(frozen=True)
class PolarizationTensor:
    """Antisymmetric ``p^{lambda nu}`` sampler built from ``(p, m)``."""

    field: SampledField

    def __post_init__(self):
        if tuple(self.field.shape) != (4, 4):
            raise ValueError("a polarization tensor sampler must return shape (4, 4)")

    @classmethod
    def from_vectors(cls, p_m: SampledField) -> "PolarizationTensor":
        return cls(LinearMap(_P_LAYOUT, p_m, (4, 4)))

    @staticmethod
    def vectors(p) -> np.ndarray:
        return _split(p, _P_LAYOUT)


def _field_of(obj) -> SampledField:
    return obj.field if isinstance(obj, (FourPotential, HertzTensor, PolarizationTensor)) else obj


def _f_from_grad(g):
    # g[..., tau, sigma] = d_sigma A_tau
    return np.swapaxes(g, -1, -2) - g


def F_from_A(A, at, d: Deriv = Deriv()) -> CTensor2:
    """``F_{sigma tau} = d_sigma A_tau - d_tau A_sigma``."""
    return CTensor2(_f_from_grad(d.grad(_field_of(A), at)), Variance.DOWNDOWN)


def _linear_coeff(fn, n_out: int, n_in: int) -> np.ndarray:
    """Coefficient array ``C[i, j, nu]`` of a map linear in ``d_nu f_j``."""
    coeff = np.zeros((n_out, n_in, 4))
    for j in range(n_in):
        for nu in range(4):
            g = np.zeros((n_in, 4))
            g[j, nu] = 1.0
            coeff[:, j, nu] = np.asarray(fn(g)).reshape(n_out)
    return coeff


def potential_fields(A, m: MediumSpec, d: Deriv = Deriv()) -> SampledField:
    """``(E, D, H, B)`` sampler of the fields derived from ``A`` in medium ``m``."""

    def fields(g):
        f = _f_from_grad(g)
        E = f[0, 1:]
        B = -0.5 * np.einsum("rpq,pq->r", _EPS3, f[1:, 1:])
        D, H = fields_from_R(constitutive_R(f, m))
        return np.stack([E, D, H, B])

    return first_order_map(_field_of(A), _linear_coeff(fields, 12, 4), (4, 3), d)


def potential_configuration(A, m: MediumSpec, sources=None, d: Deriv = Deriv()) -> FieldConfiguration:
    return FieldConfiguration(potential_fields(A, m, d), sources, m.c)


def gauge_residual(A, m: MediumSpec, at, d: Deriv = Deriv()) -> np.ndarray:
    """``(g^{nu tau} + kappa u^nu u^tau) d_nu A_tau``."""
    g = d.grad(_field_of(A), at)
    return np.einsum("nt,...tn->...", m.a_up(), g)


def wave_operator(field, m: MediumSpec, at, d: Deriv = Deriv()) -> np.ndarray:
    """``[d^tau d_tau + kappa (u^tau d_tau)^2]`` applied componentwise."""
    h = d.hess(_field_of(field), at)
    return np.einsum("ab,...ab->...", m.a_up(), h)


def _four_current(sources, at, c) -> np.ndarray | None:
    if sources is None:
        return None
    s = np.asarray(sources.value(at) if isinstance(sources, SampledField) else sources, dtype=float)
    return np.concatenate([c * s[..., :1], s[..., 1:]], axis=-1)


def A_wave_residual(A, sources, m: MediumSpec, at, d: Deriv = Deriv(),
                    form: str = "covariant") -> FourVector:
    """Residual of the moving-medium potential equation.

    ``form="covariant"`` gives the lower-index equation solved for the wave
    operator; ``form="pre_inverse"`` gives the upper-index form before the
    inverse of ``g + kappa u u`` is applied.  ``sources`` returns
    ``(rho, j)`` like the Maxwell source samplers, or is ``None``.
    """
    f = _field_of(A)
    a_up = m.a_up()
    h = d.hess(f, at)
    box = np.einsum("ab,...tab->...t", a_up, h)
    grad_gauge = np.einsum("nt,...tns->...s", a_up, h)
    lhs = box - grad_gauge
    j = _four_current(sources, at, m.c)
    coef = _FOUR_PI * m.mu / m.c
    if form == "covariant":
        res = lhs if j is None else lhs - coef * np.einsum("sl,...l->...s", m.a_inv_down(), j)
        return FourVector(res, Variance.DOWN)
    if form == "pre_inverse":
        res = -np.einsum("ls,...s->...l", a_up, lhs)
        if j is not None:
            res = res + coef * j
        return FourVector(res, Variance.UP)
    raise ValueError(f"unknown form {form!r}; use 'covariant' or 'pre_inverse'")


def _hertz_coeff(m: MediumSpec) -> np.ndarray:
    """``M^mu_lambda = kappa/(1 + kappa) u^mu u_lambda - delta^mu_lambda``."""
    k = m.kappa
    return k / (1.0 + k) * np.outer(m.u_up, m.u_down) - np.eye(4)


def A_from_Z(Z, m: MediumSpec, at, d: Deriv = Deriv()) -> FourVector:
    """Contravariant ``A^mu`` from the Hertz tensor."""
    g = d.grad(_field_of(Z), at)
    div = np.einsum("...lss->...l", g)
    return FourVector(np.einsum("ml,...l->...m", _hertz_coeff(m), div), Variance.UP)


def potential_from_hertz(Z, m: MediumSpec, d: Deriv = Deriv()) -> FourPotential:
    """``A_lambda`` as a sampler (exact to all orders for exponential ``Z``)."""
    lower = METRIC @ _hertz_coeff(m)
    coeff = np.zeros((4, 16, 4))
    for lam in range(4):
        for s in range(4):
            coeff[:, lam * 4 + s, s] = lower[:, lam]
    return FourPotential(first_order_map(_field_of(Z), coeff, (4,), d))


def A_from_Z_3d(Z, m: MediumSpec, at, d: Deriv = Deriv()):
    """``(phi, A)`` through the 3-vector Hertz potentials ``Z(e)``, ``Z(m)``."""
    g = d.grad(_field_of(Z), at)
    gv = np.moveaxis(HertzTensor.vectors(np.moveaxis(g, -1, -3)), -3, -1)
    ze, zm = gv[..., 0, :, :], gv[..., 1, :, :]       # [..., component, deriv]
    c, v = m.c, m.v
    div_e = np.einsum("...kk->...", ze[..., 1:])
    dt_e = ze[..., 0]                                 # (1/c) d_t Z(e)
    curl_m = np.einsum("ijk,...kj->...i", _EPS3, zm[..., 1:])
    w = m.kappa * m.gamma**2 / (1.0 + m.kappa)
    s = dt_e + curl_m
    phi = -(1.0 - w) * div_e + w / c * (s @ v)
    A = s + (w / c**2) * (c * div_e + dt_e @ v + curl_m @ v)[..., None] * v
    return phi, A


def hertz_wave_residual(Z, p, m: MediumSpec, at, d: Deriv = Deriv()) -> np.ndarray:
    """``[d^2 + kappa (u d)^2] Z^{lambda nu} + 4 pi mu p^{lambda nu}``."""
    res = wave_operator(Z, m, at, d)
    if p is not None:
        res = res + _FOUR_PI * m.mu * _field_of(p).value(at)
    return res


def hertz_vector_residual(Z, p, m: MediumSpec, at, d: Deriv = Deriv()) -> np.ndarray:
    """``(box Z(e) - 4 pi mu p, box Z(m) - 4 pi mu m)`` stacked as (..., 2, 3)."""
    box = HertzTensor.vectors(wave_operator(Z, m, at, d))
    if p is None:
        return box
    return box - _FOUR_PI * m.mu * PolarizationTensor.vectors(_field_of(p).value(at))


def _divergence_field(T, d: Deriv) -> SampledField:
    coeff = np.zeros((4, 16, 4))
    for lam in range(4):
        for s in range(4):
            coeff[lam, lam * 4 + s, s] = 1.0
    return first_order_map(_field_of(T), coeff, (4,), d)


def hertz_current_residual(Z, p, m: MediumSpec, at, d: Deriv = Deriv()) -> np.ndarray:
    """``[d^2 + kappa (u d)^2] d_sigma Z^{lambda sigma} + (4 pi mu / c) j^lambda``."""
    res = wave_operator(_divergence_field(Z, d), m, at, d)
    if p is not None:
        j = sources_from_p(p, at, d, c=m.c).four_current(m.c)
        res = res + _FOUR_PI * m.mu / m.c * j
    return res


def source_field(p, d: Deriv = Deriv(), c: float = 1.0) -> SampledField:
    """``(rho, j)`` sampler with ``j^lambda = c d_sigma p^{lambda sigma}``."""
    coeff = np.zeros((4, 16, 4))
    for lam in range(4):
        scale = 1.0 if lam == 0 else c     # j^0 = c rho
        for s in range(4):
            coeff[lam, lam * 4 + s, s] = scale
    return first_order_map(_field_of(p), coeff, (4,), d)


def sources_from_p(p, at, d: Deriv = Deriv(), c: float = 1.0) -> SourceDensity:
    g = d.grad(_field_of(p), at)
    j = c * np.einsum("...lss->...l", g)
    return SourceDensity(j[..., 0] / c, j[..., 1:])


def sources_from_p_3d(p, at, d: Deriv = Deriv(), c: float = 1.0) -> SourceDensity:
    """``rho = -div p``, ``j = dp/dt + c curl m`` from the vector blocks."""
    g = d.grad(_field_of(p), at)
    gv = np.moveaxis(PolarizationTensor.vectors(np.moveaxis(g, -1, -3)), -3, -1)
    pv, mv = gv[..., 0, :, :], gv[..., 1, :, :]
    rho = -np.einsum("...kk->...", pv[..., 1:])
    curl_m = np.einsum("ijk,...kj->...i", _EPS3, mv[..., 1:])
    return SourceDensity(rho, c * pv[..., 0] + c * curl_m)


def wave_symbol(K, m: MediumSpec) -> np.ndarray:
    """Multiplier of the wave operator on ``exp(i K_nu x^nu)``: ``-A^{ab} K_a K_b``.

    With ``K = (-omega/c, k)`` this is
    ``|k|^2 - omega^2/c^2 - kappa gamma^2 (omega/c - beta.k)^2``.
    """
    K = np.asarray(K)
    return -np.einsum("ab,...a,...b->...", m.a_up(), K, K)


def dispersion_omega(k, m: MediumSpec) -> np.ndarray:
    """Both roots ``omega`` (ascending) of the moving-medium dispersion relation."""
    k = np.asarray(k, dtype=float)
    kg = m.kappa * m.gamma**2
    b = float(m.beta @ k)
    # (1 + kg) w^2 - 2 kg b w + kg b^2 - |k|^2 = 0 with w = omega/c
    roots = np.roots([1.0 + kg, -2.0 * kg * b, kg * b * b - float(k @ k)])
    return np.sort(roots.real) * m.c


def plane_wave(amp, k, omega: complex, c: float = 1.0) -> ExpField:
    """``Re amp exp(i(k.r - omega t))``."""
    amp = np.asarray(amp, dtype=complex)
    K = np.concatenate([[-omega / c], np.asarray(k, dtype=complex)])
    return ExpField(amp[None], K[None])


def gauge_polarization(K, m: MediumSpec, seed: int = 0) -> np.ndarray:
    """A covariant amplitude ``a_tau`` with ``A^{nu tau} K_nu a_tau = 0``."""
    rng = np.random.default_rng(seed)
    w = np.asarray(K, dtype=float) @ m.a_up()
    a = rng.normal(size=4)
    return a - (w @ a) / (w @ w) * w


def matched_hertz_amplitude(p_amp, K, m: MediumSpec) -> np.ndarray:
    """``Z`` amplitude solving the Hertz equation for a single source mode."""
    s = wave_symbol(K, m)
    if abs(s) < 1e-12 * max(1.0, float(np.abs(K) @ np.abs(K))):
        raise ValueError("source mode sits on the dispersion surface; no bounded response")
    return -_FOUR_PI * m.mu * np.asarray(p_amp) / s


def transform_wavevector(K, L) -> np.ndarray:
    """Covariant wavevector in the boosted frame: ``K'_a = K_b (L^{-1})^b_a``."""
    return np.asarray(K) @ L.inverse().matrix
