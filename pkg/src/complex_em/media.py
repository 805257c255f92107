"""Isotropic media at rest and in uniform motion.

The moving-medium closure is available in two independent forms: the 3D
Minkowski relations for ``(D, H)`` and the rank-4 permeability tensor acting
on the field tensor ``F_{sigma tau}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .balance import EMTensor4
from .tensor_core import METRIC, CTensor2, Variance, is_antisymmetric, levi_civita3, levi_civita_array

__all__ = [
    "MediumSpec",
    "PermeabilityTensor",
    "rest_constitutive",
    "minkowski_constitutive",
    "field_tensor",
    "fields_from_R",
    "permeability_tensor",
    "constitutive_R",
    "inverse_identity_check",
    "qp_from_F",
    "moving_em_tensor",
    "random_media",
]

_EPS3 = levi_civita3().astype(float)
_E_UP = levi_civita_array("up").astype(float)
_E_DOWN = levi_civita_array("down").astype(float)


@dataclass(frozen=True)
class MediumSpec:
    epsilon: float = 1.0
    mu: float = 1.0
    sigma: float = 0.0
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    c: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (3,):
            raise ValueError("medium velocity must be a 3-vector")
        object.__setattr__(self, "v", v)
        if not (self.epsilon > 0 and self.mu > 0):
            raise ValueError("epsilon and mu must be positive (kappa = -1 is rejected)")
        if self.sigma < 0:
            raise ValueError("conductivity must be non-negative")
        if not self.c > 0:
            raise ValueError("c must be positive")
        if not np.linalg.norm(v) < self.c:
            raise ValueError("medium speed must be below c")

    @property
    def kappa(self) -> float:
        return self.epsilon * self.mu - 1.0

    @property
    def beta(self) -> np.ndarray:
        return self.v / self.c

    @property
    def gamma(self) -> float:
        return 1.0 / np.sqrt(1.0 - float(self.beta @ self.beta))

    @property
    def u_up(self) -> np.ndarray:
        """Four-velocity ``u^lambda = (gamma, gamma v / c)``."""
        return self.gamma * np.concatenate([[1.0], self.beta])

    @property
    def u_down(self) -> np.ndarray:
        return METRIC @ self.u_up

    @property
    def at_rest(self) -> bool:
        return not np.any(self.v)

    def a_up(self) -> np.ndarray:
        """``A^{lambda sigma} = g^{lambda sigma} + kappa u^lambda u^sigma``."""
        return METRIC + self.kappa * np.outer(self.u_up, self.u_up)

    def a_inv_down(self) -> np.ndarray:
        """``g_{lambda rho} - kappa/(1 + kappa) u_lambda u_rho``."""
        k = self.kappa
        return METRIC - k / (1.0 + k) * np.outer(self.u_down, self.u_down)


@dataclass(frozen=True)
class PermeabilityTensor:
    components: np.ndarray  # eps^{lambda nu sigma tau}

    def pair_symmetry_residual(self) -> float:
        e = self.components
        return float(np.abs(e - np.transpose(e, (1, 0, 3, 2))).max())


def rest_constitutive(E, H, m: MediumSpec):
    """``D = eps E``, ``B = mu H``, ``j = sigma E`` for a medium at rest."""
    if not m.at_rest:
        raise ValueError("rest_constitutive needs a medium at rest")
    E = np.asarray(E, dtype=float)
    H = np.asarray(H, dtype=float)
    return m.epsilon * E, m.mu * H, m.sigma * E


def minkowski_constitutive(E, B, m: MediumSpec):
    """``(D, H)`` from ``(E, B)`` in a uniformly moving isotropic medium."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    v, c = m.v, m.c
    b2 = float(m.beta @ m.beta)
    k = m.kappa * m.gamma**2 / m.mu
    vE = (E @ v)[..., None]
    vB = (B @ v)[..., None]
    D = m.epsilon * E + k * (b2 * E - v * vE / c**2 + np.cross(v, B) / c)
    H = B / m.mu + k * (-b2 * B + v * vB / c**2 + np.cross(v, E) / c)
    return D, H


def field_tensor(E, B) -> np.ndarray:
    """Covariant ``F_{mu nu}``: ``F_{0k} = E_k``, ``F_{pq} = -e_{pqr} B_r``."""
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    out = np.zeros(np.broadcast_shapes(E.shape, B.shape)[:-1] + (4, 4))
    out[..., 0, 1:] = E
    out[..., 1:, 0] = -E
    out[..., 1:, 1:] = -np.einsum("pqr,...r->...pq", _EPS3, B)
    return out


def fields_from_R(r) -> tuple:
    """Read ``(D, H)`` from ``R^{mu nu}`` with ``R^{0k} = -D_k``, ``R^{pq} = -e_{pqr} H_r``."""
    r = np.asarray(r)
    D = -r[..., 0, 1:]
    H = -0.5 * np.einsum("rpq,...pq->...r", _EPS3, r[..., 1:, 1:])
    return D, H


def permeability_tensor(m: MediumSpec) -> PermeabilityTensor:
    a = m.a_up()
    return PermeabilityTensor(np.einsum("ls,nt->lnst", a, a) / m.mu)


def constitutive_R(f_dd, m: MediumSpec, form: str = "direct") -> np.ndarray:
    """``R^{lambda nu} = eps^{lambda nu sigma tau} F_{sigma tau}``.

    ``form`` selects the printed variant: ``"direct"``, the two-term
    antisymmetrized ``"two"`` or the four-term ``"four"`` average.
    """
    e = permeability_tensor(m).components
    if form == "two":
        e = 0.5 * (e - np.transpose(e, (0, 1, 3, 2)))
    elif form == "four":
        e = 0.25 * (e - np.transpose(e, (0, 1, 3, 2))
                    + np.transpose(e, (1, 0, 3, 2)) - np.transpose(e, (1, 0, 2, 3)))
    elif form != "direct":
        raise ValueError(f"unknown constitutive form {form!r}")
    return np.einsum("lnst,...st->...ln", e, np.asarray(f_dd))


def inverse_identity_check(m: MediumSpec) -> float:
    """Max deviation of ``(g - k/(1+k) u u)_{lambda rho} (g + k u u)^{lambda sigma}`` from ``delta``."""
    prod = m.a_inv_down() @ m.a_up()
    return float(np.abs(prod - np.eye(4)).max())


def qp_from_F(f_dd, m: MediumSpec):
    """Complex ``(Q^{mu nu}, P_{mu nu})`` from the real field tensor of a medium."""
    f = np.asarray(f_dd)
    if np.iscomplexobj(f) or not is_antisymmetric(f):
        raise ValueError("qp_from_F needs a real antisymmetric field tensor")
    e = permeability_tensor(m).components
    q = np.einsum("mnst,...st->...mn", e - 0.5j * _E_UP, f)
    delta = np.einsum("ml,nr->mnlr", np.eye(4), np.eye(4))
    kernel = delta - 0.5j * np.einsum("mnst,stlr->mnlr", _E_DOWN, e)
    p = np.einsum("mnlr,...lr->...mn", kernel, f)
    return CTensor2(q, Variance.UPUP), CTensor2(p, Variance.DOWNDOWN)


def moving_em_tensor(f_dd, m: MediumSpec) -> EMTensor4:
    """``4 pi T_mu^nu = F_{mu l} eps^{l nu s t} F_{st} + 1/4 delta F_{st} eps^{st l r} F_{lr}``."""
    f = np.asarray(f_dd, dtype=float)
    e = permeability_tensor(m).components
    r = np.einsum("lnst,...st->...ln", e, f)
    first = np.einsum("...ml,...ln->...mn", f, r)
    inv = np.einsum("...st,...st->...", f, r)
    return EMTensor4((first + 0.25 * inv[..., None, None] * np.eye(4)) / (4 * np.pi))


def random_media(n: int, seed: int = 0, beta_max: float = 0.9, c: float = 1.0):
    """Reproducible media with ``eps, mu`` in [1, 4] and isotropic velocities."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        v = c * rng.uniform(0.0, beta_max) * d
        out.append(MediumSpec(rng.uniform(1.0, 4.0), rng.uniform(1.0, 4.0), 0.0, v, c))
    return out
