"""Tests for the shooting solver.

Frozen angles come from an independent oracle: a hand-rolled fixed-step
classical RK4 integrator with per-step sign checks, bisected to 1e-11 and
confirmed unchanged under step halving (h = 5e-4 vs 2.5e-4).
"""

import math

import numpy as np
import pytest

from nucleon_nls.scalar_model import Params, hamiltonian
from nucleon_nls.shooting import (
    SMINUS,
    SPLUS,
    SZERO,
    BracketError,
    GroundState,
    RegimeError,
    ShootControls,
    classify_portrait,
    decay_fit,
    energy_via_gradient_quotient,
    find_ground_state,
    mass_and_energy,
    rescale_to_unit_mass,
    shoot,
    taylor_coefficients,
)

P413 = Params(4.0, 1.0, 3)

ORACLE_YBAR_413 = 1.4725843490899746  # frozen: independent RK4 bisection
ORACLE_YBAR_313 = 1.5547720466132415  # frozen: independent RK4 bisection
ORACLE_MASS_413 = 95.74504803887318  # frozen: Simpson quadrature, grid_n 4001 vs 8001
ORACLE_ENERGY_413 = -28.06331052978563


def test_shoot_below_threshold_is_splus():
    traj, cls = shoot(0.3, P413)
    assert cls.tag == SPLUS
    assert cls.certificate["H_at_turn"] < 0
    assert cls.certificate["u_at_turn"] > 0
    assert cls.r_event is not None and cls.r_event > 0


def test_shoot_near_top_is_sminus():
    traj, cls = shoot(1.5, P413)
    assert cls.tag == SMINUS
    assert cls.certificate["du_at_zero"] < 0
    # event polish: the interpolated angle at the crossing is tiny
    u_ev = float(traj.interp(cls.r_event)[0])
    assert abs(u_ev) < 1e-10


def test_shoot_d1_separatrix_is_szero_candidate():
    traj, cls = shoot(math.pi / 4, Params(4.0, 1.0, 1))
    assert cls.tag == SZERO
    assert cls.certificate["reason"] == "separatrix-funnel"
    assert np.all(np.diff(traj.u) < 0)  # monotone slide toward zero
    assert traj.u[-1] < 1e-5


def test_shoot_input_validation():
    with pytest.raises(ValueError):
        shoot(0.0, P413)
    with pytest.raises(ValueError):
        shoot(math.pi / 2, P413)
    with pytest.raises(ValueError):
        shoot(P413.stationary_angle, P413)
    with pytest.raises(ValueError):
        shoot(P413.stationary_angle + 5e-13, P413)


def test_taylor_start_consistency():
    y = 1.1
    c = ShootControls()
    traj, _ = shoot(y, P413, c)
    c2, c4 = taylor_coefficients(y, P413)
    r0 = c.r_start
    assert traj.u[0] == pytest.approx(y + c2 * r0**2 + c4 * r0**4, abs=1e-15)
    # series truncation at the start radius is far below integrator tolerance
    assert abs(traj.u[0] - y - c2 * r0**2) < 1e-17


def test_ground_state_413_bracket(gs413):
    assert gs413.bracket_width <= 1e-12
    assert math.pi / 4 < gs413.y_lo and gs413.y_hi < math.pi / 2
    assert gs413.lo_certificate.tag == SPLUS
    assert gs413.hi_certificate.tag == SMINUS
    assert gs413.y_bar == pytest.approx(ORACLE_YBAR_413, abs=1e-9)


def test_ground_state_313_oracle(gs313):
    assert gs313.y_bar == pytest.approx(ORACLE_YBAR_313, abs=1e-9)
    assert P413.threshold_angle < gs313.y_bar < math.pi / 2


def test_ground_state_d1_closed_form(gs411):
    assert abs(gs411.y_bar - math.pi / 4) <= 1e-8


def test_regime_refusal():
    for a in (2.0, 1.9):
        with pytest.raises(RegimeError, match="a <= 2b"):
            find_ground_state(Params(a, 1.0, 3))


def test_portrait_partition(gs413):
    ys = np.linspace(0.05, math.pi / 2 - 0.02, 50)
    res = classify_portrait(P413, ys)
    tags = [c.tag for _, c in res]
    for (y, c) in res:
        if y < gs413.y_bar:
            assert c.tag == SPLUS, (y, c)
        else:
            assert c.tag == SMINUS, (y, c)
    flips = sum(1 for t1, t2 in zip(tags, tags[1:]) if t1 != t2)
    assert flips == 1


def test_portrait_no_decay_regime():
    ys = np.linspace(0.05, math.pi / 2 - 0.02, 50)
    for a in (2.0, 1.9):
        res = classify_portrait(Params(a, 1.0, 3), ys)
        assert all(c.tag not in (SMINUS, SZERO) for _, c in res)


def test_decay_rates_within_two_percent(gs413, gs412, gs622, gs623):
    for gs in (gs413, gs412, gs622, gs623):
        sqrt_b = math.sqrt(gs.params.b)
        assert abs(gs.decay_rate - sqrt_b) <= 0.02 * sqrt_b, gs.params


def test_decay_fit_window_too_short(gs413):
    from nucleon_nls.shooting import Trajectory

    t = gs413.traj
    short = Trajectory(r=t.r[:40], u=t.u[:40], du=t.du[:40], H=t.H[:40], y=t.y)
    with pytest.raises(RuntimeError, match="window too short"):
        decay_fit(short, gs413.params)


def test_energy_monotone_d2(gs413, gs412):
    c = ShootControls()
    for gs in (gs413, gs412):
        assert np.max(np.diff(gs.traj.H)) <= 10 * c.abs_tol


def test_energy_conserved_d1(gs411):
    c = ShootControls()
    drift = np.max(np.abs(gs411.traj.H - gs411.traj.H[0]))
    assert drift <= 10 * c.abs_tol


def test_dissipation_rate_law(gs413):
    # dH/dr = -((d-1)/r) (u')^2 with second-order central differences on a
    # uniform resample; residual must shrink ~4x when the spacing halves
    res = []
    for n in (2001, 4001):
        r = np.linspace(1.0, 8.0, n)
        u, du = gs413.evaluator.evaluate(r)
        H = hamiltonian(u, du, gs413.params)
        h = r[1] - r[0]
        dH = (H[2:] - H[:-2]) / (2 * h)
        expect = -(gs413.params.d - 1) / r[1:-1] * du[1:-1] ** 2
        res.append(np.max(np.abs(dH - expect)))
    assert res[1] < res[0] / 3.0
    assert res[1] < 1e-5


def test_profile_monotone_decreasing(gs413, gs412, gs622):
    for gs in (gs413, gs412, gs622):
        assert np.all(gs.dQ[1:] < 0)
        assert np.all(np.diff(gs.Q) < 0)


def test_profile_matches_trajectory_samples(gs413):
    # in the dense region the evaluator must reproduce the accepted steps
    ev = gs413.evaluator
    m = (gs413.traj.r > ev.r_start) & (gs413.traj.r < ev.blend_lo)
    u, du = ev.evaluate(gs413.traj.r[m])
    assert np.max(np.abs(u - gs413.traj.u[m])) < 1e-12
    assert np.max(np.abs(du - gs413.traj.du[m])) < 1e-12


def test_profile_blend_is_smooth(gs413):
    ev = gs413.evaluator
    # value agreement between the two branches at the blend edges
    for r_edge in (ev.blend_lo, ev.blend_hi):
        lo, _ = ev.evaluate(r_edge - 1e-9)
        hi, _ = ev.evaluate(r_edge + 1e-9)
        assert abs(lo - hi) < 1e-10
    # derivative consistency: finite difference of value vs reported deriv
    r = np.linspace(ev.blend_lo - 0.2, ev.blend_hi + 0.2, 2001)
    u, du = ev.evaluate(r)
    fd = np.gradient(u, r)
    assert np.max(np.abs(fd[5:-5] - du[5:-5])) < 1e-6 * np.max(np.abs(du))


def test_profile_tail_follows_decay_law(gs413):
    r = np.array([25.0, 30.0, 35.0])
    u = gs413.profile(r)
    law = gs413.decay_C * np.exp(-r) / r
    assert np.allclose(u, law, rtol=1e-12)


def test_mass_energy_frozen(gs413):
    m, e = mass_and_energy(gs413)
    assert m == pytest.approx(ORACLE_MASS_413, rel=1e-6)
    assert e == pytest.approx(ORACLE_ENERGY_413, rel=1e-6)


def test_mass_energy_two_resolution(gs413):
    gs8 = find_ground_state(P413, ShootControls(grid_n=8001))
    m4, e4 = mass_and_energy(gs413)
    m8, e8 = mass_and_energy(gs8)
    assert abs(m4 - m8) / m8 < 1e-6
    assert abs(e4 - e8) / abs(e8) < 1e-6


def test_energy_identity_cross_check(gs413):
    _, e = mass_and_energy(gs413)
    e2 = energy_via_gradient_quotient(gs413)
    assert abs(e - e2) / abs(e) < 1e-8


def test_mass_energy_zero_profile():
    grid = np.linspace(0.0, 10.0, 101)
    gs = GroundState(
        params=P413, y_bar=0.0, traj=None, decay_C=0.0, decay_rate=1.0,
        grid=grid, Q=np.zeros_like(grid), dQ=np.zeros_like(grid),
        y_lo=0.0, y_hi=0.0, lo_certificate=None, hi_certificate=None,
        decay_window=(0.0, 0.0), decay_C_free=0.0,
    )
    m, e = mass_and_energy(gs)
    assert m == 0.0 and e == 0.0


def test_rescale_to_unit_mass(gs413):
    gs2, p2 = rescale_to_unit_mass(gs413)
    m2, e2 = mass_and_energy(gs2)
    assert m2 == pytest.approx(1.0, rel=1e-9)
    assert p2.a / p2.b == pytest.approx(gs413.params.a / gs413.params.b, rel=1e-12)
    lam = mass_and_energy(gs413)[0] ** (1.0 / 3.0)
    assert p2.a == pytest.approx(lam**2 * gs413.params.a, rel=1e-12)
    # strongly bound unit-mass profile has negative energy
    assert e2 < 0


def test_rescale_reshoot_oracle(gs413):
    # shooting directly at the effective couplings must reproduce the dilated
    # profile
    gs2, p2 = rescale_to_unit_mass(gs413)
    gs_direct = find_ground_state(p2)
    r = np.linspace(0.1, 2.5, 200)
    u_dilated = gs2.profile(r)
    u_direct = gs_direct.profile(r)
    assert np.max(np.abs(u_dilated - u_direct)) < 1e-6


def test_scaling_covariance_of_shoot():
    # u(lam r) at couplings (a, b) equals the shot at (lam^2 a, lam^2 b);
    # compare on radii both dense outputs cover (events end the domains)
    y = 1.3
    tight = ShootControls(rel_tol=1e-12, abs_tol=1e-14)
    traj1, cls1 = shoot(y, Params(3.0, 1.0, 3), tight)
    traj2, cls2 = shoot(y, Params(6.0, 2.0, 3), tight)
    r_hi = 0.95 * min(cls2.r_event, cls1.r_event / math.sqrt(2.0))
    r = np.linspace(0.01, r_hi, 300)
    u1 = traj1.interp(r * math.sqrt(2.0))[0]
    u2 = traj2.interp(r)[0]
    assert np.max(np.abs(u1 - u2)) < 1e-8


def test_scaling_covariance_of_y_bar(gs313, gs623):
    assert gs623.y_bar == pytest.approx(gs313.y_bar, abs=1e-10)


def test_bracket_error_on_bad_controls():
    # a truncation radius too small to resolve anything breaks the bracket
    with pytest.raises((BracketError, RuntimeError)):
        find_ground_state(P413, ShootControls(r_max=0.5, h_max=0.05))
