"""Minkowski metric, Levi-Civita symbol and antisymmetric four-tensor algebra.

Index conventions used throughout the package:

* metric ``g = diag(1, -1, -1, -1)``, identical for upper and lower indices;
* coordinates ``x^mu = (ct, x, y, z)``;
* covariant Levi-Civita symbol with ``e_{0123} = +1`` and contravariant
  symbol ``e^{mu nu sigma tau} = -e_{mu nu sigma tau}``.

Arrays may carry arbitrary leading batch dimensions; tensor indices are
always the trailing axes.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "METRIC",
    "Variance",
    "VarianceError",
    "FourVector",
    "CTensor2",
    "levi_civita",
    "levi_civita_array",
    "levi_civita3",
    "permutation_sign",
    "contract_levi_civita",
    "full_contraction",
    "lower_index",
    "raise_index",
    "lower_tensor",
    "raise_tensor",
    "dual_map",
    "dual_rank3",
    "undual_rank3",
    "antisymmetrize3",
    "is_antisymmetric",
    "matmul",
    "EXACT_RTOL",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
METRIC.setflags(write=False)

# "exact" checks: double rounding only, relative to the largest input entry
EXACT_RTOL = 1e-13
_ABS_FLOOR = 1e-300


class VarianceError(ValueError):
    """Raised when index placement does not match the requested operation."""


class Variance(str, enum.Enum):
    UP = "Up"
    DOWN = "Down"
    UPUP = "UpUp"
    DOWNDOWN = "DownDown"
    MIXED = "Mixed"  # first index down, second up: T_mu^nu


def permutation_sign(indices) -> int:
    """Sign of the permutation given by ``indices`` (0 if any index repeats)."""
    idx = list(indices)
    if len(set(idx)) < len(idx):
        return 0
    sign = 1
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if idx[a] > idx[b]:
                sign = -sign
    return sign


def levi_civita(mu: int, nu: int, sigma: int, tau: int) -> int:
    """Covariant symbol ``e_{mu nu sigma tau}`` with ``e_{0123} = +1``."""
    for i in (mu, nu, sigma, tau):
        if not (isinstance(i, (int, np.integer)) and 0 <= i <= 3):
            raise IndexError(f"Levi-Civita index out of range 0..3: {i!r}")
    return permutation_sign((mu, nu, sigma, tau))


@lru_cache(maxsize=None)
def _lc_down() -> np.ndarray:
    arr = np.zeros((4, 4, 4, 4), dtype=np.int64)
    for idx in itertools.product(range(4), repeat=4):
        arr[idx] = permutation_sign(idx)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _lc3() -> np.ndarray:
    arr = np.zeros((3, 3, 3), dtype=np.int64)
    for idx in itertools.product(range(3), repeat=3):
        arr[idx] = permutation_sign(idx)
    arr.setflags(write=False)
    return arr


def levi_civita_array(variance: str = "down") -> np.ndarray:
    """Full 4x4x4x4 integer symbol; ``variance`` is ``"down"`` or ``"up"``."""
    if variance == "down":
        return _lc_down()
    if variance == "up":
        return -_lc_down()
    raise VarianceError(f"unknown Levi-Civita variance {variance!r}")


def levi_civita3() -> np.ndarray:
    """Three-dimensional symbol ``e_{pqr}`` with ``e_{123} = +1`` (0-based)."""
    return _lc3()


def _delta_det(rows, cols) -> int:
    """Brute-force determinant of the Kronecker-delta matrix ``delta^{rows}_{cols}``."""
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        term = permutation_sign(perm)
        for i, j in enumerate(perm):
            term *= int(rows[i] == cols[j])
        total += term
    return total


def contract_levi_civita(level: int) -> int:
    """Max absolute difference between the two sides of a symbol contraction.

    ``level`` counts contracted index pairs: 1, 2 and 3 check the
    generalized-delta forms (one, two and three shared indices); 4 checks the
    full contraction against ``-24``.  Everything is integer arithmetic, so a
    correct symbol gives exactly 0.
    """
    up = levi_civita_array("up")
    down = levi_civita_array("down")
    r = range(4)
    if level == 1:
        lhs = np.einsum("mnst,mklr->nstklr", up, down)
        worst = 0
        for n, s, t, k, l, q in itertools.product(r, repeat=6):
            rhs = -_delta_det((n, s, t), (k, l, q))
            worst = max(worst, abs(int(lhs[n, s, t, k, l, q]) - rhs))
        return worst
    if level == 2:
        lhs = np.einsum("mnst,mnlr->stlr", up, down)
        worst = 0
        for s, t, l, q in itertools.product(r, repeat=4):
            rhs = -2 * (int(s == l) * int(t == q) - int(s == q) * int(t == l))
            worst = max(worst, abs(int(lhs[s, t, l, q]) - rhs))
        return worst
    if level == 3:
        lhs = np.einsum("mnst,mnsr->tr", up, down)
        rhs = -6 * np.eye(4, dtype=np.int64)
        return int(np.abs(lhs - rhs).max())
    if level == 4:
        return abs(full_contraction() - (-24))
    raise ValueError(f"contraction level must be 1..4, got {level!r}")


def full_contraction() -> int:
    """``e^{mu nu sigma tau} e_{mu nu sigma tau}`` by summing all 4^4 tuples."""
    up = levi_civita_array("up")
    down = levi_civita_array("down")
    total = 0
    for idx in itertools.product(range(4), repeat=4):
        total += int(up[idx]) * int(down[idx])
    return total


@dataclass(frozen=True)
class FourVector:
    """Four-vector components with an explicit index position."""

    components: np.ndarray
    variance: Variance = Variance.UP

    def __post_init__(self):
        comps = np.asarray(self.components)
        if comps.shape[-1:] != (4,):
            raise ValueError(f"four-vector needs trailing axis of length 4, got {comps.shape}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variance", Variance(self.variance))
        if self.variance not in (Variance.UP, Variance.DOWN):
            raise VarianceError(f"four-vector variance must be Up or Down, got {self.variance}")


@dataclass(frozen=True)
class CTensor2:
    """Rank-2 four-tensor (complex or real) with an index-variance tag."""

    components: np.ndarray
    variance: Variance

    def __post_init__(self):
        comps = np.asarray(self.components)
        if comps.shape[-2:] != (4, 4):
            raise ValueError(f"rank-2 four-tensor needs trailing 4x4 axes, got {comps.shape}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variance", Variance(self.variance))
        if self.variance not in (Variance.UPUP, Variance.DOWNDOWN, Variance.MIXED):
            raise VarianceError(f"invalid rank-2 variance {self.variance}")

    @property
    def real(self) -> "CTensor2":
        return CTensor2(self.components.real, self.variance)

    @property
    def imag(self) -> "CTensor2":
        return CTensor2(self.components.imag, self.variance)

    def conj(self) -> "CTensor2":
        return CTensor2(np.conj(self.components), self.variance)


def _expect(obj, *allowed):
    if obj.variance not in allowed:
        names = ", ".join(v.value for v in allowed)
        raise VarianceError(f"expected variance {names}, got {obj.variance.value}")


def lower_index(v: FourVector) -> FourVector:
    _expect(v, Variance.UP)
    return FourVector(v.components @ METRIC, Variance.DOWN)


def raise_index(v: FourVector) -> FourVector:
    _expect(v, Variance.DOWN)
    return FourVector(v.components @ METRIC, Variance.UP)


def lower_tensor(t: CTensor2) -> CTensor2:
    """Lower both indices: ``T_{mu nu} = g_{mu a} g_{nu b} T^{ab}``."""
    _expect(t, Variance.UPUP)
    return CTensor2(METRIC @ t.components @ METRIC, Variance.DOWNDOWN)


def raise_tensor(t: CTensor2) -> CTensor2:
    _expect(t, Variance.DOWNDOWN)
    return CTensor2(METRIC @ t.components @ METRIC, Variance.UPUP)


def is_antisymmetric(a: np.ndarray, rtol: float = EXACT_RTOL) -> bool:
    a = np.asarray(a)
    scale = max(float(np.abs(a).max(initial=0.0)), _ABS_FLOOR)
    return float(np.abs(a + np.swapaxes(a, -1, -2)).max(initial=0.0)) <= rtol * scale


def dual_map(t: CTensor2, *, check: bool = True) -> CTensor2:
    """Levi-Civita dual of an antisymmetric tensor.

    ``DownDown -> UpUp``: ``B^{mu nu} = 1/2 e^{mu nu sigma tau} A_{sigma tau}``.
    ``UpUp -> DownDown``: ``A_{mu nu} = 1/2 e_{mu nu sigma tau} B^{sigma tau}``.
    With these normalizations applying the map twice gives ``-A``.
    """
    _expect(t, Variance.DOWNDOWN, Variance.UPUP)
    if check and not is_antisymmetric(t.components):
        raise ValueError("dual_map requires an antisymmetric tensor")
    if t.variance is Variance.DOWNDOWN:
        out = 0.5 * np.einsum("mnst,...st->...mn", levi_civita_array("up"), t.components)
        return CTensor2(out, Variance.UPUP)
    out = 0.5 * np.einsum("mnst,...st->...mn", levi_civita_array("down"), t.components)
    return CTensor2(out, Variance.DOWNDOWN)


def antisymmetrize3(a: np.ndarray) -> np.ndarray:
    """Total antisymmetrization over the last three axes (sum over S3 / 6)."""
    a = np.asarray(a)
    out = np.zeros_like(a)
    for perm in itertools.permutations(range(3)):
        axes = list(range(a.ndim - 3)) + [a.ndim - 3 + p for p in perm]
        out = out + permutation_sign(perm) * np.transpose(a, axes)
    return out / 6.0


def dual_rank3(a: np.ndarray) -> np.ndarray:
    """``B^mu = 1/6 e^{mu nu sigma tau} A_{nu sigma tau}`` for covariant rank-3 ``A``."""
    a = np.asarray(a)
    return np.einsum("mnst,...nst->...m", levi_civita_array("up"), a) / 6.0


def undual_rank3(b: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dual_rank3`: ``A_{mu nu lambda} = e_{mu nu lambda sigma} B^sigma``."""
    return np.einsum("mnls,...s->...mnl", levi_civita_array("down"), np.asarray(b))


_PRODUCT_VARIANCE = {
    (Variance.DOWNDOWN, Variance.UPUP): Variance.MIXED,
    (Variance.UPUP, Variance.DOWNDOWN): Variance.MIXED,  # T^mu_nu, stored as Mixed
    (Variance.MIXED, Variance.MIXED): Variance.MIXED,
    (Variance.MIXED, Variance.UPUP): Variance.UPUP,
    (Variance.DOWNDOWN, Variance.MIXED): Variance.DOWNDOWN,
}


def matmul(a: CTensor2, b: CTensor2) -> CTensor2:
    """Row-by-column product ``a_{mu lambda} b^{lambda nu}``.

    The inner index must be contracted down-against-up; anything else is a
    :class:`VarianceError` rather than a silent metric insertion.
    """
    key = (a.variance, b.variance)
    if key not in _PRODUCT_VARIANCE:
        raise VarianceError(f"cannot contract {a.variance.value} with {b.variance.value}")
    return CTensor2(a.components @ b.components, _PRODUCT_VARIANCE[key])
