"""Batch verification runner.

``verify`` samples each selected scenario, evaluates the residual checks of
the requested suites and writes one record per (suite, scenario, tag).  Tags
are the equation labels of the source derivation, used as stable strings.

Exit status: 0 when every record passes, 1 when any fails, 2 for an invalid
configuration.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import metadata
from typing import Callable, Iterable

import numpy as np

from . import balance, fields, lagrangian, lorentz, maxwell, media, potentials
from .grid_fd import Deriv, ExpField, Grid4, convergence_order, random_trig_field, vector_identity_suite
from .scenarios import SCENARIOS, Scenario, build_scenario
from .tensor_core import METRIC, FourVector

__all__ = ["RunConfig", "Record", "Report", "ConfigError", "load_config", "run", "emit", "main"]

SUITES = ("identities", "maxwell", "balance", "angular", "boost", "media", "potentials", "lagrangian")
CHANNELS = ("exact", "fd2", "fd4")
FORMATS = ("json", "csv")

# seeded sample families that are not field configurations
SAMPLES = ("random_pairs", "random_fields", "random_media", "random_hertz", "random_potential")

_SOLUTIONS = ("vacuum_plane_wave", "rest_medium_plane_wave", "conducting_plane_wave",
              "boosted_medium_plane_wave", "hertz_plane_wave", "coulomb_static")
# media whose Hertz stress is symmetric (D parallel to E, B parallel to H)
_ISOTROPIC_REST = ("vacuum_plane_wave", "rest_medium_plane_wave", "conducting_plane_wave", "coulomb_static")

DEFAULT_SCENARIOS = {
    "identities": ("random_pairs", "random_fields"),
    "maxwell": _SOLUTIONS + ("trig_random",),
    "balance": _SOLUTIONS + ("trig_random", "inhomogeneous_medium"),
    "angular": _ISOTROPIC_REST + ("trig_random",),
    "boost": ("random_pairs",),
    "media": ("random_media", "boosted_medium_plane_wave", "hertz_plane_wave"),
    "potentials": ("random_hertz", "hertz_plane_wave"),
    "lagrangian": ("random_pairs", "random_potential", "trig_random", "hertz_plane_wave"),
}

# truncation tolerance for derivative-based checks in the FD channels
FD_TOLERANCE = {"fd2": 1e-2, "fd4": 1e-5}
# checks built on second derivatives (nested stencils) take a finer base step
HESS_STEP_SCALE = 0.1
SLOPE_WINDOW = 0.3


class ConfigError(ValueError):
    """Invalid run configuration (exit status 2)."""


@dataclass(frozen=True)
class RunConfig:
    suites: tuple = ("all",)
    scenarios: tuple = ()
    channel: str = "exact"
    seed: int = 0
    c: float = 1.0
    grid_n: int = 9
    n_random: int = 1000
    n_events: int = 64
    tolerances: dict = field(default_factory=dict)
    out: str = "-"
    format: str = "json"

    def __post_init__(self):
        suites = tuple(self.suites)
        if not suites:
            raise ConfigError("at least one suite is required")
        bad = [s for s in suites if s not in SUITES + ("all",)]
        if bad:
            raise ConfigError(f"unknown suite(s) {bad}; choose from {SUITES + ('all',)}")
        object.__setattr__(self, "suites", SUITES if "all" in suites else tuple(dict.fromkeys(suites)))
        scen = tuple(self.scenarios)
        bad = [s for s in scen if s not in tuple(SCENARIOS) + SAMPLES]
        if bad:
            raise ConfigError(f"unknown scenario(s) {bad}")
        object.__setattr__(self, "scenarios", scen)
        if self.channel not in CHANNELS:
            raise ConfigError(f"channel must be one of {CHANNELS}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        for name, val, low in (("grid_n", self.grid_n, 2), ("n_random", self.n_random, 1),
                               ("n_events", self.n_events, 1)):
            if int(val) != val or val < low:
                raise ConfigError(f"{name} must be an integer >= {low}")
        for tag, tol in self.tolerances.items():
            if not (isinstance(tol, float) and tol > 0 and math.isfinite(tol)):
                raise ConfigError(f"tolerance for {tag!r} must be a positive number")

    def echo(self) -> dict:
        d = asdict(self)
        d["suites"] = list(self.suites)
        d["scenarios"] = list(self.scenarios)
        d["tolerances"] = dict(sorted(self.tolerances.items()))
        return d


@dataclass(frozen=True)
class Record:
    suite: str
    scenario: str
    tag: str
    residual: float
    scale: float
    tolerance: float
    passed: bool
    expect: str = "zero"          # "zero" or "non-solution sanity"
    slope: float | None = None

    @property
    def key(self):
        return (self.suite, self.scenario, self.tag)


@dataclass
class Report:
    config: dict
    records: list
    version: str
    timestamp: dict

    @property
    def summary(self) -> dict:
        passed = sum(1 for r in self.records if r.passed)
        return {"total": len(self.records), "passed": passed, "failed": len(self.records) - passed}

    @property
    def exit_code(self) -> int:
        return 0 if all(r.passed for r in self.records) else 1

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "records": [_record_dict(r) for r in self.records],
            "timestamp": self.timestamp,
        }


_FIELDS = ("suite", "scenario", "tag", "residual", "scale", "tolerance", "passed", "expect", "slope")


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _record_dict(r: Record) -> dict:
    d = {k: getattr(r, k) for k in _FIELDS}
    for k in ("residual", "scale", "tolerance", "slope"):
        d[k] = _num(d[k])
    return d


# ---------------------------------------------------------------- run context

class _Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.deriv = Deriv(cfg.channel)
        self.deriv2 = Deriv(cfg.channel, h_scale=HESS_STEP_SCALE)
        self.records: list[Record] = []
        self._scen: dict[str, Scenario] = {}

    @property
    def fd(self) -> bool:
        return self.cfg.channel != "exact"

    def scenario(self, name: str) -> Scenario:
        if name not in self._scen:
            self._scen[name] = build_scenario(name, c=self.cfg.c)
        return self._scen[name]

    def deriv_for(self, s: Scenario) -> Deriv:
        return Deriv(self.cfg.channel, s.h) if self.fd else self.deriv

    def grid(self, s: Scenario) -> np.ndarray:
        x = Grid4.cube(s.center, s.half_width, self.cfg.grid_n).events()
        if s.singular is not None:
            x = x[~np.asarray(s.singular(x), dtype=bool)]
        return x

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, salt])

    def tolerance(self, suite: str, tag: str, default: float, fd_sensitive: bool) -> float:
        t = self.cfg.tolerances
        for key in (f"{suite}.{tag}", tag):
            if key in t:
                return t[key]
        if fd_sensitive and self.fd:
            return max(default, FD_TOLERANCE[self.cfg.channel])
        return default

    def add(self, suite, scenario, tag, residual, scale, default_tol, fd_sensitive=False,
            sanity=False, slope=None):
        tol = self.tolerance(suite, tag, default_tol, fd_sensitive)
        residual = float(residual)
        scale = float(scale)
        if sanity:
            passed = bool(residual > tol * scale)
        else:
            passed = bool(residual <= tol * scale)
        self.records.append(Record(suite, scenario, tag, residual, scale, tol, passed,
                                   "non-solution sanity" if sanity else "zero", slope))


def _mx(a) -> float:
    return float(np.abs(np.asarray(a)).max(initial=0.0))


def _deriv_scale(jet) -> float:
    return max(_mx(jet.grads), 4 * np.pi / jet.c * _mx(jet.j_up), 1e-300)


def _slope(ctx: _Context, s: Scenario, evaluate: Callable[[Deriv], float]) -> float | None:
    """Convergence slope of an FD residual over ``h, h/2, h/4`` (None in the exact channel)."""
    if not ctx.fd:
        return None
    res = convergence_order(lambda h: evaluate(Deriv(ctx.cfg.channel, h)), s.h)
    return res.slope if res.converged else float("nan")


# ---------------------------------------------------------------- suites

def _suite_identities(ctx: _Context, name: str):
    S = "identities"
    if name == "random_pairs":
        c = fields.random_pairs(ctx.cfg.n_random, seed=ctx.cfg.seed)
        for tag, val in fields.appendix_b_suite(c).items():
            if tag in ("B01", "B02", "B03", "B03.full"):
                ctx.add(S, name, tag, val, 1.0, 0.0)
            elif tag in ("CofactorMinkowski", "B18", "B19"):
                ctx.add(S, name, tag, val, 1.0, 1e-11)
            else:
                ctx.add(S, name, tag, val, 1.0, 1e-12)
        (a, b, s_), (ra, rb, rs) = fields.convenience_products(c)
        sc = float(fields.field_scale(c).max()) ** 2
        ctx.add(S, name, "ProductOne", max(_mx(a - ra), _mx(b - rb)), sc, 1e-12)
        ctx.add(S, name, "ProductTwo", _mx(s_ - rs), sc, 1e-12)
        return
    if name == "random_fields":
        rng = ctx.rng(11)
        A = random_trig_field(rng, (3,))
        B = random_trig_field(rng, (3,))
        f = random_trig_field(rng, ())
        x = rng.uniform(-np.pi, np.pi, size=(ctx.cfg.n_events, 4))
        h = HESS_STEP_SCALE * min(A.default_h, B.default_h, f.default_h)
        d = Deriv(ctx.cfg.channel, h) if ctx.fd else ctx.deriv
        for tag, val in vector_identity_suite(A, B, f, x, d).items():
            if tag == "A5.events":
                continue
            res, scale = val
            ctx.add(S, name, tag, res, scale, 1e-11, fd_sensitive=True)
        return
    _suite_maxwell_forms(ctx, S, name)


def _suite_maxwell_forms(ctx: _Context, S: str, name: str):
    s = ctx.scenario(name)
    x = ctx.grid(s)
    for tag, (res, scale) in maxwell.maxwell_form_consistency(s.configuration, x, ctx.deriv_for(s)).items():
        ctx.add(S, name, tag, res, scale, 1e-12 if tag == "QPIdentity" else 1e-13)


def _suite_maxwell(ctx: _Context, name: str):
    S = "maxwell"
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    x = ctx.grid(s)
    cfg = s.configuration
    d = ctx.deriv_for(s)
    jet = maxwell.field_jet(cfg, x, d)
    scale = _deriv_scale(jet)
    _suite_maxwell_forms(ctx, S, name)

    def residuals(jt):
        curl_res, div_res = maxwell.residual_complex3d(jt)
        r_res, s_res = maxwell.residual_real_split(jt)
        return {
            "MaxwellComplexHom": _mx(curl_res),
            "MaxwellComplexNotHom": _mx(div_res),
            "CovariantMaxwell": _mx(maxwell.residual_covariant(jt)),
            "MaxwellI": _mx(maxwell.residual_dual(jt)),
            "MaxwellReal.R": _mx(r_res),
            "MaxwellReal.S": _mx(s_res),
        }

    res = residuals(jet)
    if not s.is_maxwell_solution:
        ctx.add(S, name, "CovariantMaxwell", res["CovariantMaxwell"], scale, 1e-3, sanity=True)
        return
    sub = x[:: max(1, len(x) // 32)]
    for tag, val in res.items():
        slope = _slope(ctx, s, lambda dd, t=tag: residuals(maxwell.field_jet(cfg, sub, dd))[t])
        ctx.add(S, name, tag, val, scale, 1e-10, fd_sensitive=True, slope=slope)
    ctx.add(S, name, "CovariantContinuity", _mx(maxwell.residual_continuity(jet)), scale, 1e-10,
            fd_sensitive=True)
    # exact-vs-FD derivative convergence of the scenario fields
    if ctx.fd:
        exact = cfg.fields.grad(sub)
        conv = convergence_order(lambda h: _mx(Deriv(ctx.cfg.channel, h).grad(cfg.fields, sub) - exact), s.h)
        order = Deriv(ctx.cfg.channel).order
        ctx.add(S, name, "Deriv.convergence", abs(conv.slope - order) if conv.converged else float("inf"),
                1.0, SLOPE_WINDOW, slope=conv.slope)
    v = jet.values
    is_vacuum = (np.allclose(v[..., 0, :], v[..., 1, :], rtol=0, atol=1e-14 * _mx(v))
                 and np.allclose(v[..., 2, :], v[..., 3, :], rtol=0, atol=1e-14 * _mx(v))
                 and not np.any(jet.source))
    if is_vacuum:
        worst = 0.0
        for a in range(4):
            for b in range(4):
                worst = max(worst, _mx(maxwell.vacuum_rank3_check(jet, x, a, b)))
        ctx.add(S, name, "MaxwellPauliLubanskii", worst, scale, 1e-10, fd_sensitive=True)


def _suite_balance(ctx: _Context, name: str):
    S = "balance"
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    x = ctx.grid(s)
    d = ctx.deriv_for(s)
    jet = maxwell.field_jet(s.configuration, x, d)
    scale = balance.balance_scale(jet)
    if name == "inhomogeneous_medium":
        p = s.params
        X = balance.ponderomotive(jet).components
        closed = balance.pforce_closed_form(p["epsilon"], p["mu"], p["E"].value(x), p["H"].value(x), x, d)
        ctx.add(S, name, "PForce", _mx(X - closed), scale, 1e-11, fd_sensitive=True)
        return
    # identities that hold for any fields (same jet, rearrangement only)
    ctx.add(S, name, "DivergenceTwoTensors", _mx(balance.divergence_two_tensors(jet)), scale, 1e-12)
    for tag, arr in balance.proof_chain_identities(jet).items():
        ctx.add(S, name, tag, _mx(arr), scale, 1e-12)
    zs = balance.appendix_c_suite(jet)
    keys = ["Z.PQ", "Z.PdQ", "Z.QdP", "Z.FG"]
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            ctx.add(S, name, f"C2.{a[2:]}-{b[2:]}", _mx(zs[a] - zs[b]), scale, 1e-12)
    ctx.add(S, name, "C1", _mx(zs["C1"]), scale, 1e-12)
    if not s.is_maxwell_solution:
        ctx.add(S, name, "EnergyBalance", _mx(balance.energy_balance_residual(jet)), scale, 1e-3, sanity=True)
        return
    ctx.add(S, name, "EnergyBalance", _mx(balance.energy_balance_residual(jet)), scale, 1e-10, True)
    ctx.add(S, name, "MomentumBalancedReal",
            _mx(balance.momentum_balance_residual(jet, kind="hertz")), scale, 1e-10, True)
    ctx.add(S, name, "MomentumBalancedRealNonsymmetric",
            _mx(balance.momentum_balance_residual(jet, kind="mh")), scale, 1e-10, True)
    ctx.add(S, name, "CovariantEMBalanceCompact",
            _mx(balance.covariant_balance_residual(jet)), scale, 1e-10, True)


def _suite_angular(ctx: _Context, name: str):
    S = "angular"
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    x = ctx.grid(s)
    jet = maxwell.field_jet(s.configuration, x, ctx.deriv_for(s))
    scale = balance.balance_scale(jet) * max(1.0, float(np.abs(x).max()))
    ctx.add(S, name, "AngularMomentumProof", _mx(balance.angular_proof_identity(jet, x)), scale, 1e-12)
    dual = balance.angular_momentum_residual(jet, x, form="dual")
    ctx.add(S, name, "4Dto3DAngMom", _mx(dual[..., 0, 1:] - balance.reduction_4d_to_3d(jet, x)), scale, 1e-12)
    if not s.is_maxwell_solution:
        return
    for tag, form in (("VectorMomentumBalance", "3d"), ("CovariantMomentumBalance", "covariant"),
                      ("CovariantAngularMomentum", "dual")):
        ctx.add(S, name, tag, _mx(balance.angular_momentum_residual(jet, x, form=form)), scale, 1e-10, True)


def _suite_boost(ctx: _Context, name: str):
    S = "boost"
    if name != "random_pairs":
        return
    n = ctx.cfg.n_random
    c = fields.random_pairs(n, seed=ctx.cfg.seed)
    scale = float(fields.field_scale(c).max())
    b = lorentz.BoostSpec(np.array([0.6 * ctx.cfg.c, 0.0, 0.0]), ctx.cfg.c)
    comp = lorentz.x_boost_components(c, 0.6)
    tens = lorentz.tensor_route(c, b)
    vec3 = lorentz.transform_fields_3d(c, b)
    c6 = lorentz.c6_transform(c, b)
    ctx.add(S, name, "G2G3", _mx(comp.G - tens.G), scale, 1e-13)
    ctx.add(S, name, "F2F3", _mx(comp.F - tens.F), scale, 1e-13)

    def gap(p, q):
        return max(_mx(p.F - q.F), _mx(p.G - q.G))

    ctx.add(S, name, "ComplexFieldTransform", gap(tens, vec3), scale, 1e-12)
    ctx.add(S, name, "EMfieldsTransformMatrix", gap(tens, c6), scale, 1e-12)
    ctx.add(S, name, "LorentzFTransform", gap(vec3, c6), scale, 1e-12)
    fg = fields.invariant_FG(c)
    worst = metric = events = 0.0
    rng = ctx.rng(3)
    for k, bb in enumerate(lorentz.random_boosts(n, seed=ctx.cfg.seed, beta_max=0.99, c=ctx.cfg.c)):
        one = fields.ComplexPair(c.F[k], c.G[k])
        moved = lorentz.tensor_route(one, bb)
        worst = max(worst, abs(fields.invariant_FG(moved) - fg[k]) / max(abs(fg[k]), 1e-300))
        L = lorentz.boost_matrix(bb)
        metric = max(metric, L.metric_residual())
        xe = rng.normal(size=4)
        via_formula = lorentz.transform_event(FourVector(xe), bb).components
        events = max(events, _mx(via_formula - L.matrix @ xe) / max(_mx(xe), 1e-300))
    ctx.add(S, name, "FGcomplex.invariant", worst, 1.0, 1e-12)
    ctx.add(S, name, "LorentzBoost", metric, 1.0, 1e-12)
    ctx.add(S, name, "LorentzCoordinateTransformShort", events, 1.0, 1e-13)


def _suite_media(ctx: _Context, name: str):
    S = "media"
    if name == "random_media":
        rng = ctx.rng(5)
        worst = two = four = inv = sym = rest = 0.0
        for m in media.random_media(ctx.cfg.n_random, seed=ctx.cfg.seed, c=ctx.cfg.c):
            E, B = rng.normal(size=3), rng.normal(size=3)
            f = media.field_tensor(E, B)
            r = media.constitutive_R(f, m)
            D, H = media.minkowski_constitutive(E, B, m)
            D2, H2 = media.fields_from_R(r)
            sc = max(_mx(D), _mx(H), 1e-300)
            worst = max(worst, max(_mx(D - D2), _mx(H - H2)) / sc)
            two = max(two, _mx(media.constitutive_R(f, m, "two") - r) / sc)
            four = max(four, _mx(media.constitutive_R(f, m, "four") - r) / sc)
            inv = max(inv, media.inverse_identity_check(m))
            sym = max(sym, media.permeability_tensor(m).pair_symmetry_residual())
        for eps, mu in rng.uniform(1.0, 4.0, size=(8, 2)):
            m0 = media.MediumSpec(eps, mu, 0.0, np.zeros(3), ctx.cfg.c)
            E, H = rng.normal(size=3), rng.normal(size=3)
            fp = fields.FieldPoint(E, eps * E, H, mu * H)
            direct = balance.em_tensor4(fp).components
            moving = media.moving_em_tensor(media.field_tensor(E, mu * H), m0).components
            rest = max(rest, _mx(direct - moving) / max(_mx(direct), 1e-300))
        ctx.add(S, name, "FourPermeabilityTensor", worst, 1.0, 1e-11)
        ctx.add(S, name, "CovariantMaterialEqs.two", two, 1.0, 1e-12)
        ctx.add(S, name, "CovariantMaterialEqs.four", four, 1.0, 1e-12)
        ctx.add(S, name, "InverseA", inv, 1.0, 1e-13)
        ctx.add(S, name, "FourPermeabilityTensor.symmetry", sym, 1.0, 1e-13)
        ctx.add(S, name, "CovariantEMTensorMoving.rest", rest, 1.0, 1e-12)
        return
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    x = ctx.grid(s)
    v = s.configuration.fields.value(x)
    D, H = media.minkowski_constitutive(v[..., 0, :], v[..., 3, :], s.medium)
    ctx.add(S, name, "3DMaterialEqs", max(_mx(D - v[..., 1, :]), _mx(H - v[..., 2, :])), _mx(v), 1e-11)


def _random_medium(ctx: _Context, salt: int) -> media.MediumSpec:
    return media.random_media(1, seed=ctx.cfg.seed + salt, c=ctx.cfg.c)[0]


def _suite_potentials(ctx: _Context, name: str):
    S = "potentials"
    d = ctx.deriv2
    if name == "random_hertz":
        rng = ctx.rng(7)
        m = _random_medium(ctx, 7)
        Z = potentials.HertzTensor.from_vectors(random_trig_field(rng, (2, 3)))
        x = rng.uniform(-np.pi, np.pi, size=(ctx.cfg.n_events, 4))
        A = potentials.potential_from_hertz(Z, m, d)
        gA = d.grad(A.field, x)
        ctx.add(S, name, "CovariantAuGauge", _mx(potentials.gauge_residual(A, m, x, d)), _mx(gA), 1e-11, True)
        cfg = potentials.potential_configuration(A, m, None, d)
        jet = maxwell.field_jet(cfg, x, d)
        _, s_res = maxwell.residual_real_split(jet)
        ctx.add(S, name, "4VectorPotential", _mx(s_res), _deriv_scale(jet), 1e-11, True)
        up = potentials.A_from_Z(Z, m, x, d).components
        phi, vec = potentials.A_from_Z_3d(Z, m, x, d)
        sc = max(_mx(up), 1e-300)
        ctx.add(S, name, "AZHertz", _mx(up @ METRIC - A.field.value(x)), sc, 1e-12, True)
        ctx.add(S, name, "phiZ", _mx(phi - up[..., 0]), sc, 1e-12)
        ctx.add(S, name, "AZ", _mx(vec - up[..., 1:]), sc, 1e-12)
        # equivalence of the two forms of the potential equation on an arbitrary A
        Ar = potentials.FourPotential(random_trig_field(rng, (4,)))
        j = random_trig_field(rng, (4,))
        cov = potentials.A_wave_residual(Ar, j, m, x, d).components
        pre = potentials.A_wave_residual(Ar, j, m, x, d, form="pre_inverse").components
        ctx.add(S, name, "CovariantAu", _mx(pre + cov @ m.a_up().T), max(_mx(pre), _mx(cov)), 1e-12)
        # single-mode source and its Hertz response
        K = np.concatenate([[rng.uniform(0.5, 1.5)], rng.uniform(-2, 2, size=3)])
        p0 = rng.normal(size=(4, 4))
        p0 = p0 - p0.T
        P = potentials.PolarizationTensor(ExpField(p0[None], K[None]))
        Zm = potentials.HertzTensor(ExpField(potentials.matched_hertz_amplitude(p0, K, m)[None], K[None]))
        psc = 4 * np.pi * m.mu * _mx(P.field.value(x))
        ctx.add(S, name, "ZpHertz", _mx(potentials.hertz_wave_residual(Zm, P, m, x, d)), psc, 1e-10, True)
        ctx.add(S, name, "ZEMpm", _mx(potentials.hertz_vector_residual(Zm, P, m, x, d)), psc, 1e-10, True)
        ctx.add(S, name, "dZjHertzEquation", _mx(potentials.hertz_current_residual(Zm, P, m, x, d)),
                psc * float(np.abs(K).max()), 1e-10, True)
        s1 = potentials.sources_from_p(P, x, d, m.c)
        s2 = potentials.sources_from_p_3d(P, x, d, m.c)
        ssc = max(_mx(s1.j), _mx(s1.rho), 1e-300)
        ctx.add(S, name, "rhojpm", max(_mx(s1.rho - s2.rho), _mx(s1.j - s2.j)), ssc, 1e-12)
        src_cfg = maxwell.FieldConfiguration(ExpField(np.zeros((1, 4, 3)), K[None]),
                                             potentials.source_field(P, d, m.c), m.c)
        ctx.add(S, name, "pHertz", _mx(maxwell.residual_continuity(src_cfg, x, d)),
                ssc * float(np.abs(K).max()) * m.c, 1e-11, True)
        # dispersion: phase speed at rest and boost invariance of the symbol
        kv = rng.normal(size=3)
        m0 = media.MediumSpec(m.epsilon, m.mu, 0.0, np.zeros(3), m.c)
        w = potentials.dispersion_omega(kv, m0)[1]
        speed = w / np.linalg.norm(kv)
        ctx.add(S, name, "CovariantAuj.phase_speed", abs(speed * np.sqrt(m.epsilon * m.mu) / m.c - 1.0),
                1.0, 1e-12)
        kw = np.concatenate([[-potentials.dispersion_omega(kv, m)[1] / m.c], kv])
        worst = 0.0
        for b in lorentz.random_boosts(16, seed=ctx.cfg.seed, beta_max=0.9, c=m.c):
            L = lorentz.boost_matrix(b)
            u = L.matrix @ m.u_up
            moved = media.MediumSpec(m.epsilon, m.mu, 0.0, m.c * u[1:] / u[0], m.c)
            K2 = potentials.transform_wavevector(kw, L)
            worst = max(worst, abs(potentials.wave_symbol(K2, moved)) / float(K2 @ K2 + 2 * K2[0] ** 2))
        ctx.add(S, name, "CovariantAuj.boost_invariance", worst, 1.0, 1e-10)
        return
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    if name != "hertz_plane_wave":
        return
    m = s.medium
    Z = s.params["hertz"]
    A = potentials.potential_from_hertz(Z, m, d)
    x = ctx.grid(s)
    sc = _mx(d.hess(A.field, x))
    ctx.add(S, name, "CovariantAuj", _mx(potentials.A_wave_residual(A, None, m, x, d).components), sc, 1e-10,
            True)
    ctx.add(S, name, "ZpHertz", _mx(potentials.hertz_wave_residual(Z, None, m, x, d)),
            _mx(d.hess(Z.field, x)), 1e-10, True)


def _suite_lagrangian(ctx: _Context, name: str):
    S = "lagrangian"
    d = ctx.deriv2
    if name == "random_pairs":
        c = fields.random_pairs(ctx.cfg.n_random, seed=ctx.cfg.seed)
        lv = lagrangian.lagrangian_densities(c)
        sc = float(fields.field_scale(c).max()) ** 2
        for key in ("L0", "L1"):
            ref = lv.forms[f"{key}.3d"]
            label = "Lagrangian0" if key == "L0" else "Lagrangian1"
            for form, val in lv.forms.items():
                if form.startswith(key + ".") and form != f"{key}.3d":
                    ctx.add(S, name, f"{label}.{form[3:]}", _mx(val - ref), sc, 1e-12)
        ctx.add(S, name, "Lagrangian0.reality", lv.reality_residual(), sc, 1e-13)
        worst: dict = {}
        for k in range(min(50, ctx.cfg.n_random)):
            for tag, val in lagrangian.formal_derivative_check(fields.ComplexPair(c.F[k], c.G[k])).items():
                worst[tag] = max(worst.get(tag, 0.0), val)
        for tag, val in worst.items():
            ctx.add(S, name, tag, val, 1.0, 1e-12 if tag == "closed_form" else 1e-6)
        inv = 0.0
        for k, b in enumerate(lorentz.random_boosts(min(200, ctx.cfg.n_random), seed=ctx.cfg.seed + 1)):
            one = fields.ComplexPair(c.F[k], c.G[k])
            a = lagrangian.lagrangian_densities(one)
            bb = lagrangian.lagrangian_densities(lorentz.tensor_route(one, b))
            size = max(abs(a.L0), abs(a.L1), 1e-300)
            inv = max(inv, abs(a.L0 - bb.L0) / size, abs(a.L1 - bb.L1) / size)
        ctx.add(S, name, "Lagrangian0.invariance", inv, 1.0, 1e-11)
        return
    if name == "random_potential":
        rng = ctx.rng(9)
        m = _random_medium(ctx, 9)
        A = potentials.FourPotential(random_trig_field(rng, (4,)))
        j = random_trig_field(rng, (4,))
        x = rng.uniform(-np.pi, np.pi, size=(ctx.cfg.n_events, 4))
        ctx.add(S, name, "ConjugateMomentum", lagrangian.conjugate_momentum_check(A, m, x, d), 1.0, 1e-6)
        el = lagrangian.euler_lagrange_residual(A, m, j, x, d)
        r_res, _ = maxwell.residual_real_split(potentials.potential_configuration(A, m, j, d), x, d)
        sc = max(_mx(el), 1e-300)
        ctx.add(S, name, "EulerLagrangeReal", _mx(el - r_res), sc, 1e-12, True)
        cov = potentials.A_wave_residual(A, j, m, x, d).components
        ctx.add(S, name, "EulerLagrangeReal.CovariantAuj", _mx(cov + m.mu * el @ m.a_inv_down().T),
                max(_mx(cov), 1e-300), 1e-12)
        return
    if name in SAMPLES:
        return
    s = ctx.scenario(name)
    x = ctx.grid(s)
    if s.is_maxwell_solution:
        return
    jet = maxwell.field_jet(s.configuration, x, ctx.deriv_for(s))
    res = lagrangian.complex_lagrangian_residual(jet)
    cov = maxwell.residual_covariant(jet)
    sc = _deriv_scale(jet)
    ctx.add(S, name, "MaxwellLagrangian.L0", _mx(res["L0"] - cov), sc, 1e-12)
    ctx.add(S, name, "MaxwellLagrangian.L1", _mx(res["L1"] + np.conj(cov)), sc, 1e-12)


_SUITE_FUNCS = {
    "identities": _suite_identities,
    "maxwell": _suite_maxwell,
    "balance": _suite_balance,
    "angular": _suite_angular,
    "boost": _suite_boost,
    "media": _suite_media,
    "potentials": _suite_potentials,
    "lagrangian": _suite_lagrangian,
}


def _hertz_plane_lagrangian(ctx: _Context):
    s = ctx.scenario("hertz_plane_wave")
    m = s.medium
    A = s.params["potential"]
    x = ctx.grid(s)
    el = lagrangian.euler_lagrange_residual(A, m, None, x, ctx.deriv2)
    ctx.add("lagrangian", "hertz_plane_wave", "EulerLagrangeReal", _mx(el), _mx(ctx.deriv2.hess(A.field, x)),
            1e-10, True)


# ---------------------------------------------------------------- entry points

def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


def run(cfg: RunConfig) -> Report:
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    ctx = _Context(cfg)
    np.seterr(all="ignore")
    for suite in cfg.suites:
        names = DEFAULT_SCENARIOS[suite]
        if cfg.scenarios:
            names = tuple(n for n in cfg.scenarios if n in names or n in SCENARIOS)
        for name in names:
            _SUITE_FUNCS[suite](ctx, name)
            if suite == "lagrangian" and name == "hertz_plane_wave":
                _hertz_plane_lagrangian(ctx)
    records = sorted(ctx.records, key=lambda r: r.key)
    stamp = {"started": started.isoformat(), "wall_time_s": time.perf_counter() - t0}
    return Report(cfg.echo(), records, _version(), stamp)


def emit(report: Report, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report.as_dict(), indent=2, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_FIELDS)
        for r in report.records:
            d = _record_dict(r)
            w.writerow(["" if d[k] is None else (repr(d[k]) if isinstance(d[k], float) else d[k])
                        for k in _FIELDS])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _split_list(text: str) -> tuple:
    return tuple(t for t in text.replace(",", " ").split() if t)


def load_config(path: str | None) -> dict:
    """Read an INI file into ``RunConfig`` keyword arguments.

    ``[run]`` holds the global keys; a ``[tolerances]`` section maps tags
    (optionally ``suite.tag``) to tolerance overrides.  Any other section is
    named after a suite and may hold ``tolerance.<tag>`` overrides.
    """
    if path is None:
        return {}
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    out: dict = {}
    tolerances: dict = {}
    converters = {"seed": int, "grid_n": int, "n_random": int, "n_events": int, "c": float}
    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "run":
            for key, raw in items.items():
                if key in ("suites", "scenarios"):
                    out[key] = _split_list(raw)
                elif key in converters:
                    try:
                        out[key] = converters[key](raw)
                    except ValueError:
                        raise ConfigError(f"[run] {key} = {raw!r} is not a valid number") from None
                elif key in ("channel", "out", "format"):
                    out[key] = raw.strip()
                else:
                    raise ConfigError(f"unknown key [run] {key}")
        elif section == "tolerances" or section in SUITES:
            for key, raw in items.items():
                tag = key
                if section != "tolerances":
                    if not key.startswith("tolerance."):
                        raise ConfigError(f"unknown key [{section}] {key}")
                    tag = f"{section}.{key[len('tolerance.'):]}"
                try:
                    tolerances[tag] = float(raw)
                except ValueError:
                    raise ConfigError(f"tolerance {key} = {raw!r} is not a number") from None
        else:
            raise ConfigError(f"unknown config section [{section}]")
    if tolerances:
        out["tolerances"] = tolerances
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="verify", description="Residual checks of the complex covariant "
                                "formulation of macroscopic electrodynamics.")
    p.add_argument("--config", help="INI file; command-line flags override it")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}, all (repeatable)")
    p.add_argument("--scenario", action="append", help="restrict to these scenarios (repeatable)")
    p.add_argument("--channel", choices=CHANNELS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--format", choices=FORMATS)
    return p


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(message)


def build_config(argv: Iterable[str] | None = None) -> RunConfig:
    parser = _parser()
    parser.__class__ = _Parser
    try:
        ns = parser.parse_args(None if argv is None else list(argv))
    except _ArgError as exc:
        raise ConfigError(str(exc)) from None
    kw = load_config(ns.config)
    if ns.suite:
        kw["suites"] = tuple(s for item in ns.suite for s in _split_list(item))
    if ns.scenario:
        kw["scenarios"] = tuple(s for item in ns.scenario for s in _split_list(item))
    for key in ("channel", "seed", "out", "format"):
        val = getattr(ns, key)
        if val is not None:
            kw[key] = val
    try:
        return RunConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def main(argv: Iterable[str] | None = None) -> int:
    try:
        cfg = build_config(argv)
    except ConfigError as exc:
        print(f"verify: invalid configuration: {exc}", file=sys.stderr)
        return 2
    report = run(cfg)
    data = emit(report, cfg.format)
    try:
        if cfg.out == "-":
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
        else:
            with open(cfg.out, "wb") as fh:
                fh.write(data)
    except OSError as exc:
        print(f"verify: cannot write report: {exc}", file=sys.stderr)
        return 2
    s = report.summary
    print(f"verify: {s['passed']}/{s['total']} checks passed", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
