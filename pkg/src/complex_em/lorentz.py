"""Lorentz boosts of events and of the complex field pair.

Three independent routes transform ``(F, G)`` under a boost: the tensor
similarity ``Q' = L Q L^T``, the closed 3D vector formula, and (for
axis-aligned boosts) a complex rotation acting on a 6-component vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import ComplexPair, q_array
from .tensor_core import METRIC, CTensor2, FourVector, Variance, VarianceError, is_antisymmetric

__all__ = [
    "BETA_GUARD",
    "BoostSpec",
    "LorentzMatrix",
    "boost_matrix",
    "transform_event",
    "transform_tensor",
    "transform_fields_3d",
    "fields_from_Q",
    "tensor_route",
    "c6_rotation_matrix",
    "c6_pack",
    "c6_unpack",
    "c6_transform",
    "random_boosts",
    "x_boost_components",
]

BETA_GUARD = 0.999
# below this |beta| the (gamma - 1)/v^2 factor uses its series expansion
_SMALL_BETA = 1e-8


@dataclass(frozen=True)
class BoostSpec:
    """Boost velocity ``v`` (3-vector) in a frame where light speed is ``c``."""

    v: np.ndarray
    c: float = 1.0
    guard: float = BETA_GUARD

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.shape != (3,):
            raise ValueError(f"boost velocity must be a 3-vector, got shape {v.shape}")
        if not self.c > 0:
            raise ValueError("c must be positive")
        object.__setattr__(self, "v", v)
        if np.linalg.norm(v) / self.c > self.guard:
            raise ValueError(
                f"|v|/c = {np.linalg.norm(v) / self.c:.6g} exceeds the guard {self.guard}"
            )

    @property
    def beta(self) -> np.ndarray:
        return self.v / self.c

    @property
    def gamma(self) -> float:
        b2 = float(self.beta @ self.beta)
        return 1.0 / np.sqrt(1.0 - b2)

    def gamma_minus_one_over_beta2(self) -> float:
        """``(gamma - 1) / beta^2`` without the 0/0 at rest."""
        b2 = float(self.beta @ self.beta)
        if np.sqrt(b2) < _SMALL_BETA:
            return 0.5 + 0.375 * b2
        return (self.gamma - 1.0) / b2

    def reversed(self) -> "BoostSpec":
        return BoostSpec(-self.v, self.c, self.guard)


@dataclass(frozen=True)
class LorentzMatrix:
    """``Lambda^mu_nu`` acting on contravariant components: ``x' = Lambda x``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError("Lorentz matrix must be 4x4")
        object.__setattr__(self, "matrix", m)

    def metric_residual(self) -> float:
        m = self.matrix
        return float(np.abs(m.T @ METRIC @ m - METRIC).max())

    def inverse(self) -> "LorentzMatrix":
        # Lambda^{-1} = g Lambda^T g for any Lorentz matrix
        return LorentzMatrix(METRIC @ self.matrix.T @ METRIC)


def boost_matrix(b: BoostSpec) -> LorentzMatrix:
    beta = b.beta
    gamma = b.gamma
    m = np.empty((4, 4))
    m[0, 0] = gamma
    m[0, 1:] = -gamma * beta
    m[1:, 0] = -gamma * beta
    m[1:, 1:] = np.eye(3) + b.gamma_minus_one_over_beta2() * np.outer(beta, beta)
    return LorentzMatrix(m)


def transform_event(x: FourVector, b: BoostSpec) -> FourVector:
    """Boost ``x^mu = (ct, r)`` using the closed 3D formulas for ``t'`` and ``r'``."""
    if x.variance is not Variance.UP:
        raise VarianceError("transform_event needs contravariant components")
    comps = np.asarray(x.components, dtype=float)
    c = b.c
    t = comps[..., 0] / c
    r = comps[..., 1:]
    v = b.v
    vr = r @ v
    gamma = b.gamma
    t_new = gamma * (t - vr / c**2)
    # (gamma - 1)/v^2 = gm1 / c^2
    gm1 = b.gamma_minus_one_over_beta2() / c**2
    r_new = r + ((gm1 * vr - gamma * t)[..., None]) * v
    return FourVector(np.concatenate([(c * t_new)[..., None], r_new], axis=-1), Variance.UP)


def transform_tensor(q: CTensor2, L: LorentzMatrix) -> CTensor2:
    """``Q'^{mu nu} = L^mu_sigma L^nu_tau Q^{sigma tau}``."""
    if q.variance is not Variance.UPUP:
        raise VarianceError("transform_tensor expects a contravariant (UpUp) tensor")
    if not is_antisymmetric(q.components):
        raise ValueError("transform_tensor expects an antisymmetric tensor")
    m = L.matrix
    t = m @ q.components @ m.T
    # rounding in the two products breaks the exact sign symmetry; restore it
    return CTensor2(0.5 * (t - np.swapaxes(t, -1, -2)), Variance.UPUP)


def fields_from_Q(q: np.ndarray) -> ComplexPair:
    """Read ``(F, G)`` back out of raw ``Q^{mu nu}`` components."""
    q = np.asarray(q)
    G = q[..., 1:, 0]
    F = -1j * np.stack([q[..., 2, 3], q[..., 3, 1], q[..., 1, 2]], axis=-1)
    return ComplexPair(F, G)


def transform_fields_3d(c: ComplexPair, b: BoostSpec) -> ComplexPair:
    """``F' = gamma (F - (i/c) v x G) - (gamma - 1) (v.F / v^2) v`` and the
    same with ``F`` and ``G`` exchanged."""
    v = b.v.astype(complex)
    gamma = b.gamma
    k = b.gamma_minus_one_over_beta2() / b.c**2
    vxg = np.cross(v, c.G)
    vxf = np.cross(v, c.F)
    F = gamma * (c.F - 1j / b.c * vxg) - k * (c.F @ v)[..., None] * v
    G = gamma * (c.G - 1j / b.c * vxf) - k * (c.G @ v)[..., None] * v
    return ComplexPair(F, G)


# component order of the 6-vector for a boost along axis 0 (x); the other
# axes use the cyclic relabelling 1 -> 2 -> 3 -> 1
_C6_ORDER = [("F", 0), ("F", 1), ("G", 2), ("G", 1), ("F", 2), ("G", 0)]


def _c6_order(axis: int):
    return [(name, (k + axis) % 3) for name, k in _C6_ORDER]


def _axis_of(b: BoostSpec) -> int:
    nz = np.flatnonzero(b.v != 0.0)
    if nz.size == 0:
        return 0
    if nz.size > 1:
        raise ValueError("C6 rotation form needs a velocity along one coordinate axis")
    return int(nz[0])


def c6_rotation_matrix(b: BoostSpec) -> np.ndarray:
    """6x6 complex-orthogonal matrix with ``cos(i theta) = gamma`` and
    ``sin(i theta) = i beta gamma``, acting on :func:`c6_pack` vectors."""
    axis = _axis_of(b)
    beta = float(b.beta[axis])
    gamma = b.gamma
    ch = gamma
    sh = 1j * beta * gamma
    m = np.eye(6, dtype=complex)
    for i, j in ((1, 2), (3, 4)):
        m[i, i] = ch
        m[i, j] = sh
        m[j, i] = -sh
        m[j, j] = ch
    return m


def c6_pack(c: ComplexPair, axis: int = 0) -> np.ndarray:
    src = {"F": c.F, "G": c.G}
    return np.stack([src[name][..., k] for name, k in _c6_order(axis)], axis=-1)


def c6_unpack(vec: np.ndarray, axis: int = 0) -> ComplexPair:
    vec = np.asarray(vec)
    F = np.zeros(vec.shape[:-1] + (3,), dtype=complex)
    G = np.zeros_like(F)
    dst = {"F": F, "G": G}
    for slot, (name, k) in enumerate(_c6_order(axis)):
        dst[name][..., k] = vec[..., slot]
    return ComplexPair(F, G)


def c6_transform(c: ComplexPair, b: BoostSpec) -> ComplexPair:
    axis = _axis_of(b)
    m = c6_rotation_matrix(b)
    return c6_unpack(np.einsum("ij,...j->...i", m, c6_pack(c, axis)), axis)


def tensor_route(c: ComplexPair, b: BoostSpec) -> ComplexPair:
    """Boost ``(F, G)`` through ``Q' = L Q L^T``."""
    q = CTensor2(q_array(c.F, c.G), Variance.UPUP)
    return fields_from_Q(transform_tensor(q, boost_matrix(b)).components)


def random_boosts(n: int, seed: int = 0, beta_max: float = 0.99, c: float = 1.0):
    """``n`` reproducible boosts, isotropic directions, ``|beta|`` uniform in [0, beta_max]."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    speeds = rng.uniform(0.0, beta_max, size=n)
    return [BoostSpec(c * s * d, c) for s, d in zip(speeds, dirs)]


def x_boost_components(c: ComplexPair, beta: float) -> ComplexPair:
    """Component formulas for a boost with ``v = beta c e_1``.

    ``G_2' = gamma (G_2 + i beta F_3)``, ``G_3' = gamma (G_3 - i beta F_2)``
    and the same with ``F`` and ``G`` exchanged; ``F_1``, ``G_1`` unchanged.
    """
    if not abs(beta) < 1:
        raise ValueError("|beta| must be below 1")
    g = 1.0 / np.sqrt(1.0 - beta * beta)
    F, G = np.asarray(c.F, dtype=complex), np.asarray(c.G, dtype=complex)

    def mix(a, b):
        return np.stack([a[..., 0],
                         g * a[..., 1] + 1j * beta * g * b[..., 2],
                         g * a[..., 2] - 1j * beta * g * b[..., 1]], axis=-1)

    return ComplexPair(mix(F, G), mix(G, F))
