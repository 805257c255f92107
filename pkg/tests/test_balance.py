import numpy as np
import pytest
from hypothesis import given, strategies as st

from complex_em.balance import (
    StressKind, angular_momentum_residual, angular_proof_identity, appendix_c_suite, balance_scale,
    covariant_balance_residual, divergence_two_tensors, em_tensor4, em_tensor4_complex, energy_balance_residual,
    hertz_stress, hertz_stress_complex, mh_stress, momentum_balance_residual, pforce_closed_form, ponderomotive,
    proof_chain_identities, reduction_4d_to_3d,
)
from complex_em.fields import FieldPoint, to_complex
from complex_em.grid_fd import AffineField, Deriv
from complex_em.maxwell import FieldConfiguration, field_jet
from complex_em.media import MediumSpec
from complex_em import scenarios

from conftest import max_abs
from helpers import vec3

PI8 = 8 * np.pi
Z3 = np.zeros(3)
E1 = np.array([1.0, 0, 0])


def hand_hertz(E, D, H, B):
    t = np.outer(E, D) + np.outer(D, E) + np.outer(H, B) + np.outer(B, H)
    return (t - np.eye(3) * (E @ D + H @ B)) / PI8


def test_hertz_stress_examples():
    t = hertz_stress(FieldPoint(E1, E1, Z3, Z3))
    assert t.kind is StressKind.HERTZ
    assert max_abs(t.components - np.diag([1.0, -1, -1]) / PI8) <= 1e-16
    assert max_abs(hertz_stress(FieldPoint(Z3, Z3, Z3, Z3)).components) == 0.0


@given(vec3, vec3, vec3, vec3)
def test_hertz_stress_forms(E, D, H, B):
    p = FieldPoint(E, D, H, B)
    t = hertz_stress(p).components
    assert np.array_equal(t, t.T)
    scale = max(max_abs(v) for v in (E, D, H, B)) ** 2 + 1e-300
    assert max_abs(t - hand_hertz(E, D, H, B)) <= 1e-13 * scale
    assert max_abs(hertz_stress_complex(to_complex(p)).components - t) <= 1e-13 * scale


@given(vec3, vec3, vec3, vec3)
def test_mh_stress(E, D, H, B):
    p = FieldPoint(E, D, H, B)
    tt = mh_stress(p).components
    scale = max(max_abs(v) for v in (E, D, H, B)) ** 2 + 1e-300
    ref = (np.outer(E, D) + np.outer(H, B)) / (4 * np.pi) - np.eye(3) * (E @ D + H @ B) / PI8
    assert max_abs(tt - ref) <= 1e-13 * scale
    assert max_abs(0.5 * (tt + tt.T) - hertz_stress(p).components) <= 1e-13 * scale


def test_mh_equals_hertz_in_isotropic_medium(rng):
    E, H = rng.normal(size=(2, 3))
    p = FieldPoint(E, 2.5 * E, H, 1.5 * H)
    assert max_abs(mh_stress(p).components - hertz_stress(p).components) <= 1e-15 * 10


def test_em_tensor4_example_and_zero():
    t = em_tensor4(FieldPoint(E1, E1, Z3, Z3)).components
    assert abs(t[0, 0] - 1 / PI8) <= 1e-17
    assert max_abs(t[0, 1:]) == 0.0
    assert max_abs(em_tensor4(FieldPoint(Z3, Z3, Z3, Z3)).components) == 0.0


@given(vec3, vec3, vec3, vec3)
def test_em_tensor4_forms(E, D, H, B):
    p = FieldPoint(E, D, H, B)
    t = em_tensor4(p).components
    ref = np.zeros((4, 4))
    ref[0, 0] = (E @ D + H @ B) / 2
    ref[0, 1:] = np.cross(E, H)
    ref[1:, 0] = -np.cross(D, B)
    ref[1:, 1:] = np.outer(E, D) + np.outer(H, B) - np.eye(3) * (E @ D + H @ B) / 2
    ref /= 4 * np.pi
    scale = max(max_abs(v) for v in (E, D, H, B)) ** 2 + 1e-300
    assert max_abs(t - ref) <= 1e-13 * scale
    assert max_abs(em_tensor4_complex(to_complex(p)).components - t) <= 1e-13 * scale
    # spatial block is the Maxwell-Heaviside stress with this index placement
    assert max_abs(t[1:, 1:] - mh_stress(p).components) <= 1e-13 * scale


def test_coulomb_radial_tension():
    q, r = 1.7, 0.8
    s = scenarios.coulomb_static(q=q, exclusion_radius=0.1)
    x = np.array([[0.0, r, 0.0, 0.0]])
    E, D, H, B = s.configuration.fields.value(x)[0]
    t = hertz_stress(FieldPoint(E, D, H, B)).components
    assert abs(t[0, 0] - q ** 2 / (PI8 * r ** 4)) <= 1e-13 * q ** 2 / r ** 4


def _static_linear(eps):
    e = np.array([[1.0, 0.5, -0.2]])
    off = np.concatenate([e, eps * e, np.zeros((2, 3))])
    return FieldConfiguration(AffineField(off, np.zeros((4, 3, 4))))


def test_homogeneous_medium_has_no_ponderomotive_force(rng):
    cfg = _static_linear(2.0)
    x = rng.normal(size=(4, 4))
    assert max_abs(ponderomotive(cfg, x).components) == 0.0
    r = momentum_balance_residual(cfg, x)
    assert max_abs(r) == 0.0


def test_pforce_against_hand_closed_form():
    s = scenarios.inhomogeneous_medium(seed=3)
    x = s.sample_events(32, 0)
    p = s.params
    d = Deriv()
    E, H = p["E"].value(x), p["H"].value(x)
    hand = (d.grad(p["epsilon"], x) * (E * E).sum(-1)[..., None]
            + d.grad(p["mu"], x) * (H * H).sum(-1)[..., None]) / PI8
    X = ponderomotive(s.configuration, x).components
    jet = field_jet(s.configuration, x)
    scale = balance_scale(jet)
    assert max_abs(X - hand) <= 1e-11 * scale
    assert max_abs(pforce_closed_form(p["epsilon"], p["mu"], E, H, x) - hand) <= 1e-13 * scale
    assert max_abs(X.imag if np.iscomplexobj(X) else 0.0) <= 1e-13 * scale


def test_pforce_static_eps_profile():
    """eps = 2 + 0.1 sin(x), mu = 1, static E: spatial X = E^2 grad(eps) / 8 pi."""
    from complex_em.grid_fd import ExpField
    eps = ExpField(np.array([2.0, -0.05j, 0.05j]), np.array([[0, 0, 0, 0], [0, 1.0, 0, 0], [0, -1.0, 0, 0]]))
    mu = ExpField(np.array([1.0]), np.zeros((1, 4)))
    s = scenarios.inhomogeneous_medium(eps, mu, seed=1)
    x = s.sample_events(16, 0)
    X = ponderomotive(s.configuration, x).components
    e2 = (s.params["E"].value(x) ** 2).sum(-1)
    ref = np.zeros_like(X)
    ref[..., 1] = 0.1 * np.cos(x[..., 1]) * e2 / PI8
    assert max_abs(X - ref) <= 1e-11 * balance_scale(field_jet(s.configuration, x))


def test_vacuum_has_no_ponderomotive_force():
    s = scenarios.vacuum_plane_wave(k=(0.3, -0.4, 1.0), polarization=(1.0, 0.0, -0.3))
    x = s.sample_events(16, 0)
    assert max_abs(ponderomotive(s.configuration, x).components) <= 1e-12 * s.scale ** 2


def hand_energy_residual(cfg, x):
    jet = field_jet(cfg, x)
    (E, D, H, B) = [jet.values[..., i, :] for i in range(4)]
    g = jet.grads
    c = cfg.c
    dt = lambda i: c * g[..., i, :, 0]  # noqa: E731
    u_t = (np.einsum("...k,...k", dt(0), D) + np.einsum("...k,...k", E, dt(1))
           + np.einsum("...k,...k", dt(2), B) + np.einsum("...k,...k", H, dt(3))) / PI8
    S = lambda i: g[..., i, :, 1:]  # noqa: E731
    # div(E x H) = H.curl E - E.curl H
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    curl = lambda m: np.einsum("ijk,...kj->...i", eps, m)  # noqa: E731
    div_s = c / (4 * np.pi) * (np.einsum("...k,...k", H, curl(S(0))) - np.einsum("...k,...k", E, curl(S(2))))
    j = jet.source[..., 1:]
    ext = (np.einsum("...k,...k", E, dt(1)) - np.einsum("...k,...k", D, dt(0))
           + np.einsum("...k,...k", H, dt(3)) - np.einsum("...k,...k", B, dt(2))) / PI8
    return u_t + div_s + np.einsum("...k,...k", j, E) + ext


@pytest.mark.parametrize("seed", [0, 5])
def test_energy_residual_against_hand_formula(seed):
    s = scenarios.trig_random(seed, c=1.5)
    x = s.sample_events(8, seed)
    jet = field_jet(s.configuration, x)
    assert max_abs(energy_balance_residual(s.configuration, x) - hand_energy_residual(s.configuration, x)) \
        <= 1e-12 * balance_scale(jet)


@pytest.mark.parametrize("name", ["vacuum_plane_wave", "rest_medium_plane_wave", "conducting_plane_wave",
                                  "coulomb_static", "boosted_medium_plane_wave", "hertz_plane_wave"])
def test_balance_closes_on_solutions(name):
    s = scenarios.build_scenario(name)
    x = s.sample_events(64, 4)
    jet = field_jet(s.configuration, x)
    scale = balance_scale(jet)
    assert max_abs(energy_balance_residual(jet)) <= 1e-10 * scale
    assert max_abs(covariant_balance_residual(jet)) <= 1e-10 * scale
    assert max_abs(momentum_balance_residual(jet, kind="hertz")) <= 1e-10 * scale
    assert max_abs(momentum_balance_residual(jet, kind="mh")) <= 1e-10 * scale


def test_zero_fields_balance():
    cfg = FieldConfiguration(AffineField(np.zeros((4, 3)), np.zeros((4, 3, 4))))
    x = np.zeros((2, 4)) + 1.0
    assert max_abs(energy_balance_residual(cfg, x)) == 0.0
    assert max_abs(covariant_balance_residual(cfg, x)) == 0.0


@given(st.integers(0, 2 ** 31 - 1), st.floats(0.5, 3.0))
def test_covariant_rows_rearrange_3d_balances(seed, c):
    s = scenarios.trig_random(seed, c=c)
    x = s.sample_events(4, seed)
    jet = field_jet(s.configuration, x)
    scale = balance_scale(jet)
    cov = covariant_balance_residual(jet)
    assert max_abs(cov[..., 0] - energy_balance_residual(jet) / c) <= 1e-12 * scale
    assert max_abs(cov[..., 1:] - momentum_balance_residual(jet, kind="hertz")) <= 1e-12 * scale
    assert max_abs(momentum_balance_residual(jet, kind="hertz")
                   - momentum_balance_residual(jet, kind="mh")) <= 1e-12 * scale
    assert max_abs(momentum_balance_residual(jet, kind="complex")
                   + momentum_balance_residual(jet, kind="hertz")) <= 1e-12 * scale


@given(st.integers(0, 2 ** 31 - 1))
def test_identities_hold_on_arbitrary_fields(seed):
    s = scenarios.trig_random(seed)
    x = s.sample_events(4, seed)
    jet = field_jet(s.configuration, x)
    scale = balance_scale(jet)
    assert max_abs(divergence_two_tensors(jet)) <= 1e-12 * scale
    for tag, arr in proof_chain_identities(jet).items():
        assert max_abs(arr) <= 1e-12 * scale, tag
    zs = appendix_c_suite(jet)
    keys = ["Z.PQ", "Z.PdQ", "Z.QdP", "Z.FG"]
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            assert max_abs(zs[a] - zs[b]) <= 1e-12 * scale
    ext = scale * max(1.0, max_abs(x))
    assert max_abs(angular_proof_identity(jet, x)) <= 1e-12 * ext
    dual = angular_momentum_residual(jet, x, form="dual")
    assert max_abs(dual[..., 0, 1:] - reduction_4d_to_3d(jet, x)) <= 1e-12 * ext


def test_non_solutions_fail_energy_balance():
    hits = 0
    for seed in range(40):
        s = scenarios.trig_random(seed)
        jet = field_jet(s.configuration, s.sample_events(16, seed))
        hits += max_abs(energy_balance_residual(jet)) > 1e3 * 1e-10 * balance_scale(jet)
    assert hits >= 38


def test_z_expressions_zero_fields():
    cfg = FieldConfiguration(AffineField(np.zeros((4, 3)), np.zeros((4, 3, 4))))
    zs = appendix_c_suite(cfg, np.zeros((2, 4)))
    assert all(max_abs(v) == 0.0 for v in zs.values())


@pytest.mark.parametrize("name", ["vacuum_plane_wave", "rest_medium_plane_wave", "coulomb_static"])
def test_angular_balance_on_isotropic_solutions(name):
    s = scenarios.build_scenario(name)
    x = s.sample_events(32, 2)
    jet = field_jet(s.configuration, x)
    scale = balance_scale(jet) * max(1.0, max_abs(x))
    for form in ("3d", "covariant", "dual", "dual-covariant", "3D"):
        assert max_abs(angular_momentum_residual(jet, x, form=form)) <= 1e-10 * scale
    with pytest.raises(ValueError):
        angular_momentum_residual(jet, x, form="spinor")


def test_angular_at_origin_reduces_to_stress_torque():
    s = scenarios.trig_random(2)
    x = np.zeros((3, 4))
    x[:, 0] = [0.1, 0.5, 1.0]
    jet = field_jet(s.configuration, x)
    res = angular_momentum_residual(jet, x, form="3d")
    (E, D, H, B) = [jet.values[..., i, :] for i in range(4)]
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1
    torque = np.stack([np.einsum("prs,sr->p", eps, hand_hertz(*(v[k] for v in (E, D, H, B))))
                       for k in range(3)])
    # the Hertz stress is symmetric, so the torque term itself is zero
    assert max_abs(torque) <= 1e-15 * balance_scale(jet)
    assert max_abs(res) <= 1e-12 * balance_scale(jet)


def test_fd_balance_converges():
    from complex_em.grid_fd import convergence_order
    s = scenarios.rest_medium_plane_wave(MediumSpec(epsilon=2.0))
    x = s.sample_events(8, 0)
    res = convergence_order(lambda h: max_abs(energy_balance_residual(s.configuration, x, Deriv("fd4", h))), s.h * 4)
    assert abs(res.slope - 4.0) <= 0.3
