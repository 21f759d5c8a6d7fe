"""Acceptance suite: every headline guarantee at its stated tolerance.

Each test prints exactly one [PASS]/[FAIL] line (visible even under output
capture) and then asserts, so a plain pytest run doubles as a checklist.
"""

import math
import time

import numpy as np
import pytest

from nucleon_nls import spectra as sp
from nucleon_nls.linearization import (
    linearized_vs_fd,
    solve_linearized,
    wronskian_checks,
)
from nucleon_nls.scalar_model import Params
from nucleon_nls.shooting import (
    SMINUS,
    SPLUS,
    RegimeError,
    ShootControls,
    classify_portrait,
    find_ground_state,
    shoot,
)
from nucleon_nls.sigma_omega import (
    RadialGrid,
    _d1,
    continue_branch,
    discrete_norm,
    newton_solve,
    resolvent_bound_check,
    state_distance,
)


@pytest.fixture
def report(capsys):
    def _report(label, ok, detail):
        with capsys.disabled():
            print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return _report


def test_a01_ground_state_bracket(report):
    t0 = time.perf_counter()
    gs = find_ground_state(Params(4.0, 1.0, 3))
    wall = time.perf_counter() - t0
    width = gs.bracket_width
    inside = math.pi / 4 < gs.y_lo and gs.y_hi < math.pi / 2
    certified = (gs.lo_certificate.tag == SPLUS
                 and gs.hi_certificate.tag == SMINUS)
    ok = width <= 1e-12 and inside and certified and wall < 30.0
    report("A01 certified ground-state bracket", ok,
           f"width={width:.2e}, bracket=({gs.y_lo:.12f}, {gs.y_hi:.12f}), "
           f"tags=({gs.lo_certificate.tag}, {gs.hi_certificate.tag}), "
           f"wall={wall:.1f}s")


def test_a02_d1_closed_form(gs411, report):
    gap = abs(gs411.y_bar - math.pi / 4)
    report("A02 one-dimensional closed-form angle", gap <= 1e-8,
           f"|y_bar - pi/4| = {gap:.2e}")


def test_a03_non_existence_regime(report):
    ys = np.linspace(0.05, math.pi / 2 - 1e-3, 50)
    details = []
    ok = True
    for a in (2.0, 1.9):
        p = Params(a, 1.0, 3)
        verdicts = classify_portrait(p, ys)
        n_minus = sum(1 for _, cls in verdicts if cls.tag == SMINUS)
        try:
            find_ground_state(p)
            refused = False
        except RegimeError:
            refused = True
        ok = ok and n_minus == 0 and refused
        details.append(f"a={a}: SMinus={n_minus}, refused={refused}")
    report("A03 no ground state below coupling threshold", ok,
           "; ".join(details))


def test_a04_decay_rate(gs413, gs412, gs622, gs623, report):
    details = []
    ok = True
    for gs in (gs413, gs412, gs622, gs623):
        target = math.sqrt(gs.params.b)
        rel = abs(gs.decay_rate - target) / target
        ok = ok and rel <= 0.02
        details.append(
            f"(a={gs.params.a:g},b={gs.params.b:g},d={gs.params.d}): "
            f"rate={gs.decay_rate:.4f} ({100 * rel:.2f}%)")
    report("A04 exponential decay rate within 2% of sqrt(b)", ok,
           "; ".join(details))


def test_a05_local_energy_monotonicity(report):
    bound = 10.0 * ShootControls().abs_tol
    worst_up = 0.0
    for d in (2, 3):
        for a, b in ((4.0, 1.0), (6.0, 2.0)):
            for y in (0.3, 1.0, 1.5):
                traj, _ = shoot(y, Params(a, b, d))
                worst_up = max(worst_up, float(np.max(np.diff(traj.H))))
    drift = 0.0
    for y in (0.3, 1.0, 1.5):
        traj, _ = shoot(y, Params(4.0, 1.0, 1))
        drift = max(drift, float(np.max(np.abs(traj.H - traj.H[0]))))
    ok = worst_up <= bound and drift <= bound
    report("A05 local energy dissipated (d>=2) / conserved (d=1)", ok,
           f"max increment={worst_up:.2e}, d=1 drift={drift:.2e}, "
           f"bound={bound:.1e}")


def test_a06_wronskian_identities(gs413, report):
    rep = wronskian_checks(gs413)
    residuals = {k: rep[k]["max_rel_residual"]
                 for k in ("Q", "rQprime", "Qprime")}
    ok = all(v < 1e-5 for v in residuals.values())
    report("A06 closed-form identity residuals", ok,
           ", ".join(f"{k}={v:.2e}" for k, v in residuals.items()))


def test_a07_linearized_solution(gs413, report):
    lin = solve_linearized(gs413.traj, gs413.params)
    one_zero = len(lin.sign_change_radii) == 1
    grows = lin.divergence_flag and lin.growth_rate is not None \
        and lin.growth_rate > 0.5 * math.sqrt(gs413.params.b)
    errs = [linearized_vs_fd(gs413.y_bar, gs413.params, d)
            for d in (3e-3, 3e-4)]
    order = math.log10(errs[0] / errs[1])
    ok = one_zero and grows and order > 1.9
    report("A07 variational solution: one zero, certified growth, O(delta^2)",
           ok,
           f"zeros={len(lin.sign_change_radii)}, growth={lin.growth_rate}, "
           f"fd errors=({errs[0]:.2e}, {errs[1]:.2e}), order={order:.2f}")


def test_a08_kernel_census(gs413, report):
    census = sp.kernel_census(gs413)
    repA1 = census["A"][1]
    lamA1 = repA1.eigenvalues[0]
    corrA1 = repA1.correlations["dprofile"][0]
    lamA0 = census["A"][0].eigenvalues[0]
    lamA2 = census["A"][2].eigenvalues[0]
    lamA3 = census["A"][3].eigenvalues[0]
    repL2 = census["L2"][0]
    corrL2 = repL2.correlations["profile_sine"][0]
    richardson = []
    for N in (4000, 8000):
        op = sp.assemble_sector_A(gs413, 1, N=N)
        richardson.append(abs(sp.lowest_eigenpairs(op, 1).eigenvalues[0]))
    ratio = richardson[0] / richardson[1]
    ok = (abs(lamA1) < 1e-6 and corrA1 > 0.999
          and abs(lamA0) > 1e-3 and lamA2 > 0.0 and lamA3 > 0.0
          and len(repL2.kernel_candidates) == 1 and corrL2 > 0.999
          and 3.0 < ratio < 5.0)
    report("A08 kernel census across angular sectors", ok,
           f"|lam_A1|={abs(lamA1):.1e} (corr {corrA1:.5f}), "
           f"lam_A0={lamA0:.4f}, lam_A2={lamA2:.4f}, lam_A3={lamA3:.4f}, "
           f"L2 corr={corrL2:.5f}, h^2 ratio={ratio:.2f}")


def test_a09_conjugation_identity(gs413, report):
    opA = sp.assemble_sector_A(gs413, 1, N=4000)
    opL = sp.assemble_L1_direct(gs413, N=4000)
    main, off = sp.conjugated_form(opA, gs413)
    gap_main = float(np.max(np.abs(main - opL.main_diag)))
    gap_off = float(np.max(np.abs(off - opL.off_diag)))
    ok = gap_main < 1e-8 and gap_off < 1e-8
    report("A09 conjugated operator matches direct assembly entrywise", ok,
           f"diag gap={gap_main:.2e}, offdiag gap={gap_off:.2e}")


def test_a10_field_multiplier_bounds(cp_default, report):
    rep = resolvent_bound_check(cp_default)
    n_grid = (len(rep.eps_samples), len(rep.x_samples))
    ok = (n_grid == (50, 50) and rep.norm_bound_ok and rep.eigenvalue_ok
          and rep.max_inverse_norm <= 1.0 + 1e-12
          and rep.max_eigenvalue_error <= 1e-12)
    report("A10 screened-field multiplier bounds on a 50x50 grid", ok,
           f"max inverse norm={rep.max_inverse_norm:.15f}, "
           f"max eigenvalue error={rep.max_eigenvalue_error:.1e}")


def test_a11_branch_convergence(cp_default, report):
    t0 = time.perf_counter()
    gs = find_ground_state(cp_default.nls_params())
    grid = RadialGrid.default(cp_default)
    eps_pos = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1]
    branch = continue_branch([0.0] + eps_pos, cp_default, grid=grid, gs=gs)
    wall = time.perf_counter() - t0

    worst_res = max(pt.state.residual_norm for pt in branch[1:])
    dists = np.array([pt.distance_to_limit for pt in branch[1:]])
    slope = float(np.polyfit(np.log(eps_pos), np.log(dists), 1)[0])
    limit = branch[0].state
    pred = (_d1(grid.n, grid.h, 1) @ limit.phi) / (1.0 - limit.phi**2)
    chi_gap = float(np.max(np.abs(branch[1].state.chi - pred)))
    ok = (worst_res < 1e-10 and 0.8 <= slope <= 1.2
          and chi_gap <= 5.0 * eps_pos[0] and wall < 300.0)
    report("A11 relativistic branch convergence", ok,
           f"max residual={worst_res:.2e}, distance slope={slope:.3f}, "
           f"chi gap at eps=1e-3: {chi_gap:.2e} (<= 5e-3), wall={wall:.1f}s")


def test_a12_local_uniqueness(cp_default, so_branch, report):
    base = next(pt.state for pt in so_branch if pt.eps == pytest.approx(1e-2))
    rng = np.random.default_rng(17)
    noise = rng.standard_normal((4, base.grid.n))
    noise *= 1e-3 / discrete_norm(noise, base.grid.h)
    perturbed = base.replace_fields(base.fields() + noise, base.eps,
                                    float("nan"))
    recovered = newton_solve(base.eps, perturbed, cp_default)
    dist = state_distance(recovered, base)
    report("A12 noise-perturbed re-convergence", dist <= 1e-8,
           f"distance after re-convergence={dist:.2e} (noise 1e-3)")
