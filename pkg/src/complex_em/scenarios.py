"""Analytic field configurations with exact derivatives.

Every builder returns a :class:`Scenario`: the configuration, its medium, a
sampling box and a normalisation scale.  Solutions are built from single
Fourier modes (or their Lorentz images), so residuals sit at rounding level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .fields import ComplexPair
from .grid_fd import (
    BilinearField,
    ExpField,
    FunctionField,
    LinearMap,
    SampledField,
    SumField,
    random_trig_field,
    reexpress,
)
from .lorentz import BoostSpec, boost_matrix, transform_fields_3d
from .maxwell import FieldConfiguration
from .media import MediumSpec
from .potentials import HertzTensor, dispersion_omega, potential_fields, potential_from_hertz

__all__ = [
    "Scenario",
    "vacuum_plane_wave",
    "rest_medium_plane_wave",
    "conducting_plane_wave",
    "boosted_medium_plane_wave",
    "hertz_plane_wave",
    "coulomb_static",
    "trig_random",
    "inhomogeneous_medium",
    "SCENARIOS",
    "build_scenario",
]


@dataclass(frozen=True)
class Scenario:
    name: str
    configuration: FieldConfiguration
    medium: MediumSpec
    is_maxwell_solution: bool
    center: np.ndarray
    half_width: float
    h: float
    scale: float = 1.0
    params: dict = field(default_factory=dict)

    @property
    def singular(self) -> Callable | None:
        return self.configuration.singular

    def sample_events(self, n: int, seed: int = 0) -> np.ndarray:
        """``n`` reproducible events in the box, avoiding the singular set."""
        rng = np.random.default_rng(seed)
        out = np.empty((0, 4))
        while len(out) < n:
            x = self.center + rng.uniform(-self.half_width, self.half_width, size=(2 * n, 4))
            if self.singular is not None:
                x = x[~np.asarray(self.singular(x), dtype=bool)]
            out = np.concatenate([out, x])
        return out[:n]


def _measure_scale(fields: SampledField, center, half_width) -> float:
    rng = np.random.default_rng(12345)
    x = np.asarray(center) + rng.uniform(-half_width, half_width, size=(64, 4))
    return max(float(np.abs(fields.value(x)).max()), 1e-300)


def _unit_polarization(k, polarization) -> tuple[np.ndarray, np.ndarray]:
    k = np.asarray(k, dtype=float)
    e = np.asarray(polarization, dtype=float)
    nk, ne = np.linalg.norm(k), np.linalg.norm(e)
    if nk == 0 or ne == 0:
        raise ValueError("wave vector and polarization must be non-zero")
    if abs(k @ e) > 1e-12 * nk * ne:
        raise ValueError("polarization must be orthogonal to the wave vector")
    return k / nk, e / ne


def _mode(E0, D0, H0, B0, K) -> ExpField:
    amp = np.stack([np.asarray(a, dtype=complex) for a in (E0, D0, H0, B0)])
    return ExpField(amp[None], np.asarray(K, dtype=complex)[None])


def _box_for(K, c: float) -> tuple[np.ndarray, float, float]:
    kmax = float(np.abs(np.real(K)).max())
    wavelength = 2.0 * np.pi / kmax if kmax > 0 else 1.0
    return np.zeros(4), wavelength, 1e-2 * wavelength


def vacuum_plane_wave(k=(0.0, 0.0, 1.0), polarization=(1.0, 0.0, 0.0), amplitude: float = 1.0,
                      c: float = 1.0) -> Scenario:
    """``E = a cos(k.r - omega t) e``, ``H = k^ x E``, ``omega = c|k|``."""
    return rest_medium_plane_wave(MediumSpec(1.0, 1.0, 0.0, np.zeros(3), c), k, polarization,
                                  amplitude, name="vacuum_plane_wave")


def rest_medium_plane_wave(m: MediumSpec | None = None, k=(0.0, 0.0, 1.0), polarization=(1.0, 0.0, 0.0),
                           amplitude: float = 1.0, name: str = "rest_medium_plane_wave",
                           c: float = 1.0) -> Scenario:
    """Plane wave in a lossless medium at rest, ``omega = c|k|/sqrt(eps mu)``."""
    m = m if m is not None else MediumSpec(2.0, 1.0, c=c)
    if not m.at_rest:
        raise ValueError("rest_medium_plane_wave needs a medium at rest")
    if m.sigma:
        raise ValueError("use conducting_plane_wave for a conducting medium")
    khat, e = _unit_polarization(k, polarization)
    k = np.asarray(k, dtype=float)
    omega = dispersion_omega(k, m)[1]
    E0 = amplitude * e
    H0 = np.sqrt(m.epsilon / m.mu) * np.cross(khat, E0)
    K = np.concatenate([[-omega / m.c], k])
    f = _mode(E0, m.epsilon * E0, H0, m.mu * H0, K)
    center, hw, h = _box_for(K, m.c)
    return Scenario(name, FieldConfiguration(f, None, m.c), m, True, center, hw, h,
                    _measure_scale(f, center, hw), {"omega": float(omega), "k": k})


def conducting_plane_wave(m: MediumSpec | None = None, omega: float = 1.0, direction=(0.0, 0.0, 1.0),
                          polarization=(1.0, 0.0, 0.0), amplitude: float = 1.0, c: float = 1.0) -> Scenario:
    """Damped wave with ``k^2 = mu omega (eps omega + 4 pi i sigma) / c^2`` and ``j = sigma E``."""
    m = m if m is not None else MediumSpec(2.0, 1.0, 0.1, c=c)
    if not m.at_rest:
        raise ValueError("conducting_plane_wave needs a medium at rest")
    n, e = _unit_polarization(direction, polarization)
    kc = np.sqrt(m.mu * omega * (m.epsilon * omega + 4j * np.pi * m.sigma)) / m.c
    if kc.imag < 0:
        kc = -kc
    E0 = amplitude * e
    H0 = m.c * kc / (m.mu * omega) * np.cross(n, E0)
    K = np.concatenate([[-omega / m.c], kc * n])
    f = _mode(E0, m.epsilon * E0, H0, m.mu * H0, K)
    current = np.zeros((4, 12))
    current[1:, :3] = m.sigma * np.eye(3)
    src = LinearMap(current, f, (4,))
    center, hw, h = _box_for(K, m.c)
    return Scenario("conducting_plane_wave", FieldConfiguration(f, src, m.c), m, True, center, hw, h,
                    _measure_scale(f, center, hw), {"omega": omega, "k": kc})


def _field_boost_matrix(b: BoostSpec) -> np.ndarray:
    """Real 12x12 map of stacked ``(E, D, H, B)`` under a boost."""
    out = np.zeros((12, 12))
    for col in range(12):
        v = np.zeros((4, 3))
        v.flat[col] = 1.0
        pair = transform_fields_3d(ComplexPair(v[0] + 1j * v[2], v[1] + 1j * v[3]), b)
        out[:, col] = np.stack([pair.F.real, pair.G.real, pair.F.imag, pair.G.imag]).ravel()
    return out


def boosted_medium_plane_wave(m: MediumSpec | None = None, v=(0.3, 0.0, 0.0), k=(0.0, 0.0, 1.0),
                              polarization=(1.0, 0.0, 0.0), amplitude: float = 1.0,
                              c: float = 1.0) -> Scenario:
    """A rest-medium plane wave seen from a frame boosted by ``v``.

    ``v`` is in units of ``c``-scaled velocity (``|v| < c``); the medium then
    moves with velocity ``-v`` in the new frame.
    """
    m = m if m is not None else MediumSpec(2.0, 1.5, c=c)
    rest = rest_medium_plane_wave(m, k, polarization, amplitude)
    b = BoostSpec(np.asarray(v, dtype=float), m.c)
    L = boost_matrix(b)
    f = reexpress(rest.configuration.fields, L.inverse().matrix, _field_boost_matrix(b), (4, 3))
    moving = MediumSpec(m.epsilon, m.mu, 0.0, -b.v, m.c)
    center, hw, h = _box_for(f.waves[0], m.c)
    return Scenario("boosted_medium_plane_wave", FieldConfiguration(f, None, m.c), moving, True,
                    center, hw, h, _measure_scale(f, center, hw), {"boost": b.v})


def hertz_plane_wave(m: MediumSpec | None = None, k=(1.0, 0.5, -0.25), seed: int = 0,
                     c: float = 1.0) -> Scenario:
    """Fields of a single Hertz-tensor mode on the moving-medium dispersion surface."""
    m = m if m is not None else MediumSpec(2.0, 1.5, 0.0, c * np.array([0.2, -0.3, 0.1]), c)
    k = np.asarray(k, dtype=float)
    omega = dispersion_omega(k, m)[1]
    K = np.concatenate([[-omega / m.c], k])
    rng = np.random.default_rng(seed)
    z0 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    Z = HertzTensor(ExpField((z0 - z0.T)[None], K[None]))
    A = potential_from_hertz(Z, m)
    f = potential_fields(A, m)
    center, hw, h = _box_for(K, m.c)
    return Scenario("hertz_plane_wave", FieldConfiguration(f, None, m.c), m, True, center, hw, h,
                    _measure_scale(f, center, hw),
                    {"omega": float(omega), "k": k, "hertz": Z, "potential": A})


def _coulomb_parts(q: float):
    def value(x):
        r = x[..., 1:]
        n = np.linalg.norm(r, axis=-1)[..., None]
        E = q * r / n**3
        z = np.zeros_like(E)
        return np.stack([E, E, z, z], axis=-2)

    def grad(x):
        r = x[..., 1:]
        n = np.linalg.norm(r, axis=-1)[..., None, None]
        jac = q * (np.eye(3) / n**3 - 3.0 * r[..., :, None] * r[..., None, :] / n**5)
        g = np.zeros(x.shape[:-1] + (4, 3, 4))
        g[..., 0, :, 1:] = jac
        g[..., 1, :, 1:] = jac
        return g

    def hess(x):
        r = x[..., 1:]
        n = np.linalg.norm(r, axis=-1)[..., None, None, None]
        I = np.eye(3)
        term = (np.einsum("ij,...k->...ijk", I, r) + np.einsum("ik,...j->...ijk", I, r)
                + np.einsum("jk,...i->...ijk", I, r))
        rrr = np.einsum("...i,...j,...k->...ijk", r, r, r)
        h3 = q * (-3.0 * term / n**5 + 15.0 * rrr / n**7)
        h = np.zeros(x.shape[:-1] + (4, 3, 4, 4))
        h[..., 0, :, 1:, 1:] = h3
        h[..., 1, :, 1:, 1:] = h3
        return h

    return value, grad, hess


def coulomb_static(q: float = 1.0, exclusion_radius: float = 0.1, c: float = 1.0) -> Scenario:
    """Point charge at the origin; events within ``exclusion_radius`` are rejected."""
    if not exclusion_radius > 0:
        raise ValueError("exclusion radius must be positive")
    R = float(exclusion_radius)
    value, grad, hess = _coulomb_parts(q)
    f = FunctionField((4, 3), value, grad, hess, h=1e-2 * R)

    def singular(x):
        # the sampling margin keeps finite-difference stencils outside the ball
        return np.linalg.norm(np.asarray(x)[..., 1:], axis=-1) < R

    cfg = FieldConfiguration(f, None, c, singular)
    hw = 5.0 * R
    sc = Scenario("coulomb_static", cfg, MediumSpec(c=c), True, np.zeros(4), hw, 1e-2 * R,
                  abs(q) / R**2, {"q": q, "exclusion_radius": R})
    return sc


def trig_random(seed: int = 0, degree: int = 2, scale: float = 1.0, c: float = 1.0) -> Scenario:
    """Independent random trigonometric ``E, D, H, B`` and sources (not a solution)."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = np.random.default_rng(seed)
    f = random_trig_field(rng, (4, 3), degree=degree, scale=scale)
    src = random_trig_field(rng, (4,), degree=degree, scale=scale)
    hw = np.pi
    return Scenario("trig_random", FieldConfiguration(f, src, c), MediumSpec(c=c), False, np.zeros(4),
                    hw, f.default_h, _measure_scale(f, np.zeros(4), hw),
                    {"seed": seed, "degree": degree})


def _embed(slot: int) -> np.ndarray:
    out = np.zeros((12, 3))
    out[3 * slot: 3 * slot + 3] = np.eye(3)
    return out


def _scale_field(slot: int) -> np.ndarray:
    coeff = np.zeros((12, 1, 3))
    coeff[3 * slot: 3 * slot + 3, 0, :] = np.eye(3)
    return coeff


def _default_profile(base: float, ripple: float, wave, time_rate: float) -> ExpField:
    # base + ripple cos(wave.x) + (ripple/2) cos(time_rate x^0)
    waves = np.array([np.zeros(4), np.concatenate([[0.0], wave]), [time_rate, 0.0, 0.0, 0.0]])
    return ExpField(np.array([base, ripple, 0.5 * ripple]), waves)


def inhomogeneous_medium(epsilon_profile: SampledField | None = None, mu_profile: SampledField | None = None,
                         seed: int = 0, c: float = 1.0) -> Scenario:
    """``D = eps(r, t) E``, ``B = mu(r, t) H`` with smooth random ``E``, ``H``."""
    if epsilon_profile is None:
        epsilon_profile = _default_profile(2.0, 0.5, np.array([1.0, -1.0, 2.0]), 1.0)
    if mu_profile is None:
        mu_profile = _default_profile(1.5, 0.3, np.array([0.0, 2.0, -1.0]), 2.0)
    hw = np.pi
    rng = np.random.default_rng(seed)
    probe = rng.uniform(-hw, hw, size=(256, 4))
    for name, prof in (("epsilon", epsilon_profile), ("mu", mu_profile)):
        if tuple(prof.shape) not in ((), (1,)):
            raise ValueError(f"{name} profile must be scalar-valued")
        if np.min(prof.value(probe)) <= 0:
            raise ValueError(f"{name} profile must stay positive")
    eps1 = LinearMap(np.eye(1), epsilon_profile, (1,))
    mu1 = LinearMap(np.eye(1), mu_profile, (1,))
    E = random_trig_field(rng, (3,))
    H = random_trig_field(rng, (3,))
    f = SumField([
        LinearMap(_embed(0), E, (4, 3)),
        BilinearField(_scale_field(1), eps1, E, (4, 3)),
        LinearMap(_embed(2), H, (4, 3)),
        BilinearField(_scale_field(3), mu1, H, (4, 3)),
    ])
    return Scenario("inhomogeneous_medium", FieldConfiguration(f, None, c), MediumSpec(c=c), False,
                    np.zeros(4), hw, min(E.default_h, H.default_h), _measure_scale(f, np.zeros(4), hw),
                    {"epsilon": epsilon_profile, "mu": mu_profile, "E": E, "H": H})


SCENARIOS = {
    "vacuum_plane_wave": vacuum_plane_wave,
    "rest_medium_plane_wave": rest_medium_plane_wave,
    "conducting_plane_wave": conducting_plane_wave,
    "boosted_medium_plane_wave": boosted_medium_plane_wave,
    "hertz_plane_wave": hertz_plane_wave,
    "coulomb_static": coulomb_static,
    "trig_random": trig_random,
    "inhomogeneous_medium": inhomogeneous_medium,
}


def build_scenario(name: str, **params) -> Scenario:
    try:
        builder = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None
    return builder(**params)
