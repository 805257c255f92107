"""Sampled spacetime fields, derivative channels and vector-calculus checks.

Events are arrays with trailing axis ``(x^0, x, y, z)`` where ``x^0 = ct``;
batches of events have shape ``(N, 4)``.  A field evaluated on ``N`` events
returns ``(N, *shape)``; its gradient appends one axis of length 4 holding
``d/dx^nu`` (so the time slot is ``(1/c) d/dt``) and the Hessian appends two.

Two derivative channels exist.  ``exact`` uses the closed-form derivatives a
field provides, ``fd2``/``fd4`` use central differences of its values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensor_core import levi_civita3

__all__ = [
    "CHANNELS",
    "Grid4",
    "SampledField",
    "ExpField",
    "AffineField",
    "FunctionField",
    "LinearMap",
    "SumField",
    "BilinearField",
    "Boosted",
    "reexpress",
    "CurlField",
    "first_order_map",
    "as_expfield",
    "cross_field",
    "scalar_times",
    "Deriv",
    "partial",
    "grad",
    "div",
    "curl",
    "random_trig_field",
    "vector_identity_suite",
    "ConvergenceResult",
    "convergence_order",
]

CHANNELS = ("exact", "fd2", "fd4")
_EPS3 = levi_civita3().astype(float)

# central-difference weights (offset, weight) before division by h
_STENCILS = {
    2: ((1, 0.5), (-1, -0.5)),
    4: ((2, -1.0 / 12.0), (1, 8.0 / 12.0), (-1, -8.0 / 12.0), (-2, 1.0 / 12.0)),
}


def _events(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError(f"events need a trailing axis of length 4, got {x.shape}")
    return x


@dataclass(frozen=True)
class Grid4:
    """Regular box of events ``origin + i * spacing`` for ``0 <= i < extent``."""

    origin: Sequence[float]
    spacing: Sequence[float]
    extent: Sequence[int]

    def __post_init__(self):
        o = np.asarray(self.origin, dtype=float)
        s = np.asarray(self.spacing, dtype=float)
        e = tuple(int(n) for n in self.extent)
        if o.shape != (4,) or s.shape != (4,) or len(e) != 4:
            raise ValueError("Grid4 needs 4 origin, spacing and extent entries")
        if not np.all(s > 0):
            raise ValueError("grid spacings must be positive")
        if min(e) < 1:
            raise ValueError("grid extents must be at least 1")
        object.__setattr__(self, "origin", o)
        object.__setattr__(self, "spacing", s)
        object.__setattr__(self, "extent", e)

    @property
    def size(self) -> int:
        return int(np.prod(self.extent))

    def events(self) -> np.ndarray:
        axes = [self.origin[k] + self.spacing[k] * np.arange(self.extent[k]) for k in range(4)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    @classmethod
    def cube(cls, center, half_width: float, n: int) -> "Grid4":
        center = np.asarray(center, dtype=float)
        step = 2.0 * half_width / max(n - 1, 1)
        return cls(center - half_width, np.full(4, step), (n, n, n, n))


class SampledField:
    """A smooth function of the event with optional closed-form derivatives."""

    shape: tuple = ()

    def value(self, x) -> np.ndarray:
        raise NotImplementedError

    def grad(self, x) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no exact first derivative")

    def hess(self, x) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} has no exact second derivative")

    @property
    def default_h(self) -> float:
        return 1e-3

    def __add__(self, other: "SampledField") -> "SampledField":
        return SumField([self, other])


class ExpField(SampledField):
    """``sum_m a_m exp(i K_m . x)`` with complex ``K_m``; real part by default.

    Real ``K`` gives trigonometric polynomials and plane waves, complex ``K``
    gives exponentially decaying waves.  The dot product is the plain sum
    ``K_nu x^nu``, so ``d/dx^nu`` multiplies each term by ``i K_nu``.
    """

    def __init__(self, amps, waves, real: bool = True):
        amps = np.asarray(amps, dtype=complex)
        waves = np.asarray(waves, dtype=complex)
        if waves.ndim != 2 or waves.shape[1] != 4 or amps.shape[0] != waves.shape[0]:
            raise ValueError("ExpField needs amps (M, ...) and waves (M, 4)")
        self.amps = amps
        self.waves = waves
        self.real = real
        self.shape = amps.shape[1:]

    def _phase(self, x):
        x = _events(x)
        return np.exp(1j * (x @ self.waves.T))

    def _out(self, z):
        return z.real if self.real else z

    def value(self, x):
        return self._out(np.tensordot(self._phase(x), self.amps, axes=(-1, 0)))

    def grad(self, x):
        ph = self._phase(x)[..., :, None] * (1j * self.waves)
        # (..., M, 4) x (M, *shape) -> (..., *shape, 4)
        out = np.tensordot(ph, self.amps, axes=(-2, 0))
        return self._out(np.moveaxis(out, ph.ndim - 2, -1))

    def hess(self, x):
        ik = 1j * self.waves
        ph = self._phase(x)[..., :, None, None] * (ik[:, :, None] * ik[:, None, :])
        out = np.tensordot(ph, self.amps, axes=(-3, 0))
        lead = ph.ndim - 3
        return self._out(np.moveaxis(np.moveaxis(out, lead, -1), lead, -1))

    @property
    def default_h(self) -> float:
        kmax = float(np.abs(self.waves.real).max(initial=0.0))
        if kmax == 0.0:
            return 1e-2
        return 1e-2 * 2.0 * np.pi / kmax


class AffineField(SampledField):
    """``offset + matrix . x``; ``matrix`` has shape ``(*shape, 4)``."""

    def __init__(self, offset, matrix):
        self.offset = np.asarray(offset, dtype=float)
        self.matrix = np.asarray(matrix, dtype=float)
        if self.matrix.shape != self.offset.shape + (4,):
            raise ValueError("AffineField matrix must have shape offset.shape + (4,)")
        self.shape = self.offset.shape

    def value(self, x):
        x = _events(x)
        return self.offset + np.tensordot(x, self.matrix, axes=(-1, -1))

    def grad(self, x):
        x = _events(x)
        return np.broadcast_to(self.matrix, x.shape[:-1] + self.matrix.shape).copy()

    def hess(self, x):
        x = _events(x)
        return np.zeros(x.shape[:-1] + self.matrix.shape + (4,))


class FunctionField(SampledField):
    """Wrap plain callables ``value(x)``, ``grad(x)``, ``hess(x)``."""

    def __init__(self, shape, value_fn, grad_fn=None, hess_fn=None, h: float = 1e-3):
        self.shape = tuple(shape)
        self._value = value_fn
        self._grad = grad_fn
        self._hess = hess_fn
        self._h = h

    def value(self, x):
        return self._value(_events(x))

    def grad(self, x):
        if self._grad is None:
            return super().grad(x)
        return self._grad(_events(x))

    def hess(self, x):
        if self._hess is None:
            return super().hess(x)
        return self._hess(_events(x))

    @property
    def default_h(self):
        return self._h


class LinearMap(SampledField):
    """Constant linear map on the flattened value: ``out = M @ vec(f)``."""

    def __init__(self, matrix, f: SampledField, shape=None):
        self.f = f
        self.matrix = np.asarray(matrix)
        n_in = int(np.prod(f.shape)) if f.shape else 1
        if self.matrix.ndim != 2 or self.matrix.shape[1] != n_in:
            raise ValueError("LinearMap matrix does not match the field size")
        self.shape = tuple(shape) if shape is not None else (self.matrix.shape[0],)

    def _apply(self, arr, extra):
        lead = arr.shape[: arr.ndim - len(self.f.shape) - extra]
        tail = arr.shape[arr.ndim - extra :]
        flat = arr.reshape(lead + (-1,) + tail)
        out = np.moveaxis(np.tensordot(self.matrix, flat, axes=(1, len(lead))), 0, len(lead))
        return out.reshape(lead + self.shape + tail)

    def value(self, x):
        return self._apply(self.f.value(x), 0)

    def grad(self, x):
        return self._apply(self.f.grad(x), 1)

    def hess(self, x):
        return self._apply(self.f.hess(x), 2)

    @property
    def default_h(self):
        return self.f.default_h


class SumField(SampledField):
    def __init__(self, fields):
        self.fields = list(fields)
        shapes = {tuple(f.shape) for f in self.fields}
        if len(shapes) != 1:
            raise ValueError(f"cannot add fields of shapes {shapes}")
        self.shape = shapes.pop()

    def value(self, x):
        return sum(f.value(x) for f in self.fields)

    def grad(self, x):
        return sum(f.grad(x) for f in self.fields)

    def hess(self, x):
        return sum(f.hess(x) for f in self.fields)

    @property
    def default_h(self):
        return min(f.default_h for f in self.fields)


class BilinearField(SampledField):
    """``out_k = C_kij a_i b_j`` on flattened values of two fields.

    Derivatives follow the product rule from the factors' own derivatives.
    """

    def __init__(self, coeff, a: SampledField, b: SampledField, shape=None):
        self.coeff = np.asarray(coeff, dtype=float)
        self.a, self.b = a, b
        self.shape = tuple(shape) if shape is not None else (self.coeff.shape[0],)

    @staticmethod
    def _vec(arr, nshape, extra):
        lead = arr.shape[: arr.ndim - nshape - extra]
        return arr.reshape(lead + (-1,) + arr.shape[arr.ndim - extra :])

    def _reshape(self, out, extra):
        lead = out.shape[: out.ndim - 1 - extra]
        return out.reshape(lead + self.shape + out.shape[out.ndim - extra :])

    def value(self, x):
        a = self._vec(self.a.value(x), len(self.a.shape), 0)
        b = self._vec(self.b.value(x), len(self.b.shape), 0)
        return self._reshape(np.einsum("kij,...i,...j->...k", self.coeff, a, b), 0)

    def grad(self, x):
        na, nb = len(self.a.shape), len(self.b.shape)
        a = self._vec(self.a.value(x), na, 0)
        b = self._vec(self.b.value(x), nb, 0)
        da = self._vec(self.a.grad(x), na, 1)
        db = self._vec(self.b.grad(x), nb, 1)
        out = np.einsum("kij,...in,...j->...kn", self.coeff, da, b)
        out = out + np.einsum("kij,...i,...jn->...kn", self.coeff, a, db)
        return self._reshape(out, 1)

    def hess(self, x):
        na, nb = len(self.a.shape), len(self.b.shape)
        a = self._vec(self.a.value(x), na, 0)
        b = self._vec(self.b.value(x), nb, 0)
        da = self._vec(self.a.grad(x), na, 1)
        db = self._vec(self.b.grad(x), nb, 1)
        ha = self._vec(self.a.hess(x), na, 2)
        hb = self._vec(self.b.hess(x), nb, 2)
        c = self.coeff
        out = np.einsum("kij,...inm,...j->...knm", c, ha, b)
        out = out + np.einsum("kij,...in,...jm->...knm", c, da, db)
        out = out + np.einsum("kij,...im,...jn->...knm", c, da, db)
        out = out + np.einsum("kij,...i,...jnm->...knm", c, a, hb)
        return self._reshape(out, 2)

    @property
    def default_h(self):
        return min(self.a.default_h, self.b.default_h)


def cross_field(a: SampledField, b: SampledField) -> BilinearField:
    return BilinearField(_EPS3, a, b)


def scalar_times(f: SampledField, a: SampledField) -> BilinearField:
    """``f * a`` for a scalar field ``f`` (shape ``()`` or ``(1,)``)."""
    n = int(np.prod(a.shape)) if a.shape else 1
    coeff = np.zeros((n, 1, n))
    coeff[np.arange(n), 0, np.arange(n)] = 1.0
    return BilinearField(coeff, f, a, shape=a.shape)


def reexpress(f: SampledField, coord_map, comp_map=None, shape=None) -> SampledField:
    """``M . f(T x)``; folds into a new :class:`ExpField` when ``f`` is one."""
    T = np.asarray(coord_map, dtype=float)
    if isinstance(f, ExpField):
        n = int(np.prod(f.shape)) if f.shape else 1
        M = np.eye(n) if comp_map is None else np.asarray(comp_map)
        out_shape = tuple(shape) if shape is not None else f.shape
        amps = np.einsum("ij,mj->mi", M, f.amps.reshape(len(f.waves), n))
        return ExpField(amps.reshape((len(f.waves),) + out_shape), f.waves @ T, f.real)
    return Boosted(f, T, comp_map, shape)


class Boosted(SampledField):
    """``value(x) = M . f(T x)``: a field re-expressed in new coordinates.

    ``T`` maps new event coordinates to the old ones, ``M`` (acting on the
    flattened value) transforms components.  Derivatives use the chain rule.
    """

    def __init__(self, f: SampledField, coord_map, comp_map=None, shape=None):
        self.f = f
        self.T = np.asarray(coord_map, dtype=float)
        n = int(np.prod(f.shape)) if f.shape else 1
        self.M = np.eye(n) if comp_map is None else np.asarray(comp_map)
        self._inner = LinearMap(self.M, f, shape=shape if shape is not None else f.shape)
        self.shape = self._inner.shape

    def _old(self, x):
        return _events(x) @ self.T.T

    def value(self, x):
        return self._inner.value(self._old(x))

    def grad(self, x):
        return self._inner.grad(self._old(x)) @ self.T

    def hess(self, x):
        h = self._inner.hess(self._old(x))
        return np.einsum("...ab,an,bm->...nm", h, self.T, self.T)

    @property
    def default_h(self):
        return self.f.default_h / max(1.0, float(np.abs(self.T).max()))


def _fd_first(f: SampledField, x, order: int, h: float) -> np.ndarray:
    if order not in _STENCILS:
        raise ValueError(f"finite-difference order must be 2 or 4, got {order!r}")
    if not h > 0:
        raise ValueError("finite-difference step must be positive")
    x = _events(x)
    cols = []
    for axis in range(4):
        acc = 0.0
        for off, w in _STENCILS[order]:
            xs = x.copy()
            xs[..., axis] += off * h
            sample = f.value(xs)
            if not np.all(np.isfinite(sample)):
                raise FloatingPointError("non-finite field sample in finite difference")
            acc = acc + w * sample
        cols.append(acc / h)
    return np.stack(cols, axis=-1)


class _FDGradient(SampledField):
    def __init__(self, f, order, h):
        self.f, self.order, self.h = f, order, h
        self.shape = tuple(f.shape) + (4,)

    def value(self, x):
        return _fd_first(self.f, x, self.order, self.h)


@dataclass(frozen=True)
class Deriv:
    """Derivative channel: ``exact`` or central differences of order 2/4.

    ``h`` is the first-derivative step (default: ``h_scale`` times the
    field's own ``default_h``); second derivatives nest two stencils with a
    step ``hess_factor`` times coarser to stay clear of the rounding floor.
    """

    channel: str = "exact"
    h: float | None = None
    hess_factor: float = 10.0
    h_scale: float = 1.0

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown derivative channel {self.channel!r}; use one of {CHANNELS}")
        if self.h is not None and not self.h > 0:
            raise ValueError("finite-difference step must be positive")
        if not self.h_scale > 0:
            raise ValueError("h_scale must be positive")

    @property
    def order(self) -> int:
        return {"fd2": 2, "fd4": 4}.get(self.channel, 0)

    def step(self, f: SampledField) -> float:
        return self.h if self.h is not None else self.h_scale * f.default_h

    def grad(self, f: SampledField, x) -> np.ndarray:
        if self.channel == "exact":
            return f.grad(x)
        return _fd_first(f, x, self.order, self.step(f))

    def hess(self, f: SampledField, x) -> np.ndarray:
        if self.channel == "exact":
            return f.hess(x)
        h2 = self.hess_factor * self.step(f)
        return _fd_first(_FDGradient(f, self.order, h2), x, self.order, h2)


def partial(f: SampledField, axis: int, at, order: int | str = 4, h: float | None = None):
    """``d f / d x^axis``; ``order`` is 2, 4 or ``"exact"``."""
    if axis not in (0, 1, 2, 3):
        raise ValueError(f"axis must be 0..3, got {axis!r}")
    channel = "exact" if order == "exact" else f"fd{order}"
    return Deriv(channel, h).grad(f, at)[..., axis]


def grad(f: SampledField, at, d: Deriv = Deriv()) -> np.ndarray:
    """Spatial gradient of a scalar field."""
    g = d.grad(f, at)
    if f.shape == (1,):
        g = g[..., 0, :]
    elif f.shape != ():
        raise ValueError("grad expects a scalar field")
    return g[..., 1:]


def _spatial_jacobian(f, at, d):
    if f.shape != (3,):
        raise ValueError("div/curl expect a 3-vector field")
    return d.grad(f, at)[..., :, 1:]  # J[i, q] = d f_i / d x_q


def div(f: SampledField, at, d: Deriv = Deriv()) -> np.ndarray:
    return np.trace(_spatial_jacobian(f, at, d), axis1=-2, axis2=-1)


def curl(f: SampledField, at, d: Deriv = Deriv()) -> np.ndarray:
    j = _spatial_jacobian(f, at, d)
    return np.einsum("pqr,...rq->...p", _EPS3, j)


class CurlField(SampledField):
    """``curl f`` as a field in its own right (for nested identities)."""

    def __init__(self, f: SampledField, d: Deriv = Deriv()):
        if f.shape != (3,):
            raise ValueError("CurlField expects a 3-vector field")
        self.f, self.d = f, d
        self.shape = (3,)

    def value(self, x):
        return curl(self.f, x, self.d)

    def grad(self, x):
        h = self.f.hess(x)[..., :, 1:, :]  # d_q d_n f_r
        return np.einsum("pqr,...rqn->...pn", _EPS3, h)

    @property
    def default_h(self):
        return self.f.default_h


def as_expfield(f: SampledField) -> ExpField | None:
    """Rewrite linear combinations of exponential fields as one :class:`ExpField`.

    Returns ``None`` when ``f`` is not built from exponentials by real
    linear maps, sums and coordinate re-expressions.
    """
    if isinstance(f, ExpField):
        return f
    if isinstance(f, LinearMap) and not np.iscomplexobj(f.matrix):
        inner = as_expfield(f.f)
        if inner is None:
            return None
        n = int(np.prod(inner.shape)) if inner.shape else 1
        amps = np.einsum("ij,mj->mi", f.matrix, inner.amps.reshape(len(inner.waves), n))
        return ExpField(amps.reshape((len(inner.waves),) + f.shape), inner.waves, inner.real)
    if isinstance(f, Boosted) and not np.iscomplexobj(f.M):
        inner = as_expfield(f.f)
        return None if inner is None else reexpress(inner, f.T, f.M, f.shape)
    if isinstance(f, SumField):
        parts = [as_expfield(g) for g in f.fields]
        if any(p is None for p in parts) or len({p.real for p in parts}) != 1:
            return None
        return ExpField(np.concatenate([p.amps for p in parts]),
                        np.concatenate([p.waves for p in parts]), parts[0].real)
    return None


def first_order_map(f: SampledField, coeff, shape, d: Deriv = Deriv()) -> SampledField:
    """Field ``out_i = C[i, j, nu] d_nu f_j`` on flattened values.

    For an :class:`ExpField` under the exact channel the result is again an
    :class:`ExpField` (so it keeps exact derivatives of every order);
    otherwise values are built from the channel's first derivatives.
    """
    coeff = np.asarray(coeff)
    shape = tuple(shape)
    n_in = int(np.prod(f.shape)) if f.shape else 1
    if coeff.shape != (int(np.prod(shape)) if shape else 1, n_in, 4):
        raise ValueError("first_order_map coefficients must have shape (out, in, 4)")
    e = as_expfield(f) if d.channel == "exact" else None
    if e is not None:
        f = e
        amps = f.amps.reshape(len(f.waves), n_in)
        new = np.einsum("ijn,mj,mn->mi", coeff, amps, 1j * f.waves)
        return ExpField(new.reshape((len(f.waves),) + shape), f.waves, f.real)

    def value(x):
        g = d.grad(f, x)
        lead = g.shape[: g.ndim - len(f.shape) - 1]
        g = g.reshape(lead + (n_in, 4))
        return np.einsum("ijn,...jn->...i", coeff, g).reshape(lead + shape)

    return FunctionField(shape, value, h=f.default_h)


def random_trig_field(rng: np.random.Generator, shape, degree: int = 2, k0: float = 1.0,
                      scale: float = 1.0, terms: int | None = None) -> ExpField:
    """Random real trigonometric polynomial with integer wave numbers.

    Wave vectors have integer entries in ``[-degree, degree]`` times ``k0``
    (rational frequency ratios); amplitudes are complex Gaussian.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    shape = tuple(shape)
    m = terms if terms is not None else 2 * degree + 2
    waves = rng.integers(-degree, degree + 1, size=(m, 4)).astype(float) * k0
    amps = (rng.normal(size=(m,) + shape) + 1j * rng.normal(size=(m,) + shape)) * scale
    return ExpField(amps, waves)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def vector_identity_suite(A: SampledField, B: SampledField, f: SampledField, at,
                          d: Deriv = Deriv(), floor: float = 1e-6) -> dict:
    """Residuals of the vector-calculus identities, each as (residual, scale).

    Both sides are evaluated independently: products are differentiated as
    fields of their own, never expanded by hand.  The two ratio sums of the
    ``A5`` tag are only defined where every component of ``A`` and ``B`` is
    non-zero; events with a component below ``floor * scale`` are skipped and
    the number of used events is reported under ``A5.events``.
    """
    at = _events(at)
    fs = LinearMap(np.eye(1), f, shape=(1,)) if f.shape == () else f
    a, b = A.value(at), B.value(at)
    fv = fs.value(at)[..., 0]
    curl_a, curl_b = curl(A, at, d), curl(B, at, d)
    div_a, div_b = div(A, at, d), div(B, at, d)
    grad_f = grad(fs, at, d)
    axb = cross_field(A, B)
    fa = scalar_times(fs, A)
    out = {}

    def put(tag, lhs, rhs, scale):
        out[tag] = (float(np.abs(np.asarray(lhs) - np.asarray(rhs)).max(initial=0.0)), float(scale))

    sa = float(np.abs(a).max(initial=0.0))
    sb = float(np.abs(b).max(initial=0.0))
    sf = float(np.abs(fv).max(initial=0.0))

    put("A1", div(axb, at, d), _dot(b, curl_a) - _dot(a, curl_b), max(sa * sb, 1e-300))
    put("A2", div(fa, at, d), _dot(grad_f, a) + fv * div_a, max(sf * sa, 1e-300))
    put("A3", curl(fa, at, d), np.cross(grad_f, a) + fv[..., None] * curl_a, max(sf * sa, 1e-300))

    f_curl_b = scalar_times(fs, CurlField(B, d))
    f_curl_a = scalar_times(fs, CurlField(A, d))
    lhs4 = _dot(a, curl(f_curl_b, at, d)) - _dot(b, curl(f_curl_a, at, d))
    inner = SumField([
        cross_field(B, f_curl_a),
        LinearMap(-np.eye(3), cross_field(A, f_curl_b)),
    ])
    put("A4", lhs4, div(inner, at, d), max(sf * sa * sb, 1e-300))

    lhs5 = (a * div_b[..., None] - b * div_a[..., None]
            + np.cross(a, curl_b) - np.cross(b, curl_a) - curl(axb, at, d))
    ja = d.grad(A, at)[..., :, 1:]
    jb = d.grad(B, at)[..., :, 1:]
    # A_a^2 grad(B_a/A_a) = A_a grad B_a - B_a grad A_a
    ratio_ab = np.einsum("...a,...aq->...q", a, jb) - np.einsum("...a,...aq->...q", b, ja)
    put("A5", lhs5, ratio_ab, max(sa * sb, 1e-300))
    ok = np.all(np.abs(a) > floor * max(sa, 1e-300), axis=-1) & np.all(
        np.abs(b) > floor * max(sb, 1e-300), axis=-1)
    if np.any(ok):
        sum_ab = np.zeros(at.shape[:-1] + (3,))
        sum_ba = np.zeros_like(sum_ab)
        for alpha in range(3):
            # quotient rule on channel derivatives: grad(B_a/A_a) = (A_a grad B_a - B_a grad A_a)/A_a^2
            g_ba = (jb[..., alpha, :] * a[..., alpha, None]
                    - b[..., alpha, None] * ja[..., alpha, :]) / a[..., alpha, None] ** 2
            g_ab = (ja[..., alpha, :] * b[..., alpha, None]
                    - a[..., alpha, None] * jb[..., alpha, :]) / b[..., alpha, None] ** 2
            sum_ab = sum_ab + a[..., alpha, None] ** 2 * g_ba
            sum_ba = sum_ba - b[..., alpha, None] ** 2 * g_ab
        put("A5.sumA", lhs5[ok], sum_ab[ok], max(sa * sb, 1e-300))
        put("A5.sumB", lhs5[ok], sum_ba[ok], max(sa * sb, 1e-300))
    out["A5.events"] = (float(np.count_nonzero(ok)), float(ok.size))

    # curl(A x B)_p = d_q (A_p B_q - A_q B_p)
    outer = BilinearField(np.eye(9).reshape(9, 3, 3), A, B, shape=(3, 3))
    d_outer = d.grad(outer, at)[..., :, :, 1:]  # d_n (A_p B_q)
    div_ab = np.einsum("...pqq->...p", d_outer)
    div_ba = np.einsum("...qpq->...p", d_outer)
    curl_axb = curl(axb, at, d)
    put("CurlIdentity", curl_axb, div_ab - div_ba, max(sa * sb, 1e-300))
    put("CurlIdentityTwo", 2 * div_ab, div_ab + div_ba + curl_axb, max(sa * sb, 1e-300))
    # (A x curl B)_p = A_q (d_p B_q - d_q B_p)
    put("AcrossBcurl", np.cross(a, curl_b),
        np.einsum("...q,...qp->...p", a, jb) - np.einsum("...q,...pq->...p", a, jb),
        max(sa * sb, 1e-300))
    return out


@dataclass(frozen=True)
class ConvergenceResult:
    slope: float
    steps: tuple
    residuals: tuple
    converged: bool


def convergence_order(residual_at: Callable[[float], float], h0: float, levels: int = 3,
                      ratio: float = 2.0) -> ConvergenceResult:
    """Least-squares slope of ``log residual`` against ``log h`` over ``h0 / ratio^k``.

    Non-positive or non-decreasing residuals mark the fit as not converged.
    """
    if levels < 3:
        raise ValueError("convergence fit needs at least 3 levels")
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    steps = tuple(h0 / ratio**k for k in range(levels))
    res = tuple(float(residual_at(h)) for h in steps)
    if any(not (r > 0 and np.isfinite(r)) for r in res):
        return ConvergenceResult(float("nan"), steps, res, False)
    slope = float(np.polyfit(np.log(steps), np.log(res), 1)[0])
    decreasing = all(res[k + 1] < res[k] for k in range(levels - 1))
    return ConvergenceResult(slope, steps, res, decreasing)
