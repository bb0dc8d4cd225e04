"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines.  Tolerances are pinned here and nowhere else.
"""

import math
import time

import numpy as np

from noslip.billiards import (
    Billiard2D,
    BilliardCylinder3D,
    NoSlipState2D,
    NoSlipState3D,
    billiard_trajectory,
    collide_2d,
    collide_3d,
    collide_general,
    collide_general_batch,
    project_axis,
    spin_matrix_3d,
)
from noslip.experiments import ExperimentSpec, cluster_radii, run_experiment
from noslip.geometry import DiscSection, StripSection, stadium_profile
from noslip.inertia import InertiaParams, eta_from_noslip_gamma, match_inertia
from noslip.integrate import IntegratorConfig, energy_monitor, integrate_to_event
from noslip.rolling import (
    RollState,
    _phi_events,
    _rhs_curved,
    edge_rotation,
    noslip_limit_check,
    roll3d_trajectory,
    roll4d_trajectory,
    strip_closed_form,
)

RNG = np.random.default_rng(20240117)
GAMMA_HALF = InertiaParams.from_gamma(1.0 / math.sqrt(2.0))


def _report(num, ok, detail):
    print(f"ACCEPTANCE {num:2d} {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def _random_batch(n, N):
    A = RNG.normal(size=(N, n, n))
    S = A - np.transpose(A, (0, 2, 1))
    u = RNG.normal(size=(N, n))
    nu = RNG.normal(size=(N, n))
    nu /= np.linalg.norm(nu, axis=1, keepdims=True)
    return S, u, nu


def _norms(S, u):
    return np.sqrt(0.5 * np.einsum("kij,kij->k", S, S) + np.einsum("ki,ki->k", u, u))


def test_criterion_01_collision_map_algebra():
    N = 10_000
    iner = InertiaParams.from_gamma(0.8)
    t0 = time.perf_counter()
    worst = {"involution": 0.0, "energy": 0.0, "fixity": 0.0, "block": 0.0}
    for n in (2, 3, 4):
        S, u, nu = _random_batch(n, N)
        S1, u1 = collide_general_batch(S, u, nu, iner)
        S2, u2 = collide_general_batch(S1, u1, nu, iner)
        worst["involution"] = max(
            worst["involution"], float(np.max(np.abs(S2 - S))), float(np.max(np.abs(u2 - u)))
        )
        worst["energy"] = max(worst["energy"], float(np.max(np.abs(_norms(S1, u1) - _norms(S, u)))))
        # rolling states u = r U nu = (S nu)/gamma are fixed points
        u_roll = np.einsum("kij,kj->ki", S, nu) / iner.gamma
        S3, u3 = collide_general_batch(S, u_roll, nu, iner)
        worst["fixity"] = max(
            worst["fixity"], float(np.max(np.abs(S3 - S))), float(np.max(np.abs(u3 - u_roll)))
        )
    M = np.array([[iner.c_beta, iner.s_beta], [iner.s_beta, -iner.c_beta]])
    worst["block"] = max(
        float(np.max(np.abs(M.T @ M - np.eye(2)))), abs(float(np.linalg.det(M)) + 1.0)
    )
    elapsed = time.perf_counter() - t0
    ok = all(v < 1e-12 for v in worst.values()) and elapsed < 1.0
    _report(1, ok, f"collision algebra over 3x{N} states: {worst}, runtime {elapsed:.2f}s")


def test_criterion_02_dimensional_consistency():
    iner = InertiaParams.from_gamma(0.65)
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    worst = 0.0
    for _ in range(1000):
        nu = RNG.normal(size=2)
        nu /= np.linalg.norm(nu)
        u = RNG.normal(size=2)
        u = u - max(u @ nu, 0.1) * 2 * nu if u @ nu > -0.05 else u
        s = RNG.normal()
        Sg, ug = collide_general(s * J, u, nu, iner)
        st = collide_2d(NoSlipState2D([0, 0], u, s), nu, iner, require_incoming=False)
        worst = max(worst, float(np.max(np.abs(ug - st.u))), abs(Sg[1, 0] - st.s))
    for _ in range(1000):
        nu = RNG.normal(size=3)
        nu /= np.linalg.norm(nu)
        A = RNG.normal(size=(3, 3))
        st3 = NoSlipState3D([0, 0, 0], RNG.normal(size=3), A - A.T)
        Sg, ug = collide_general(st3.S, st3.u, nu, iner)
        out = collide_3d(st3, nu, iner, require_incoming=False)
        worst = max(worst, float(np.max(np.abs(ug - out.u))), float(np.max(np.abs(Sg - out.S))))
    _report(2, worst < 1e-12, f"general vs dimension-specific maps: max diff {worst:.2e}")


def test_criterion_03_projection_theorem():
    sec = DiscSection(1.0)
    st3 = NoSlipState3D([0.2, 0.1, 0.0], [0.7, 0.4, -0.3], spin_matrix_3d(0.3, -0.2, 0.5))
    st2 = project_axis(st3)
    ev2, _, _ = billiard_trajectory(st2, Billiard2D(sec, g=0.0), GAMMA_HALF, 50)
    worst = 0.0
    for g in (0.0, 1.0):
        ev3, _, _ = billiard_trajectory(st3.copy(), BilliardCylinder3D(sec, g=g), GAMMA_HALF, 50)
        assert len(ev3) == 50
        for e3, e2 in zip(ev3, ev2):
            worst = max(
                worst,
                abs(e3["t"] - e2["t"]),
                float(np.max(np.abs(e3["x"][:2] - e2["x"]))),
                float(np.max(np.abs(e3["u"][:2] - e2["u"]))),
                abs(e3["S"][1, 0] - e2["s"]),
            )
    _report(3, worst < 1e-9, f"50-collision projection (g=0 and g=1): max error {worst:.2e}")


def test_criterion_04_equivariance():
    iner = InertiaParams.from_gamma(0.9)
    worst = 0.0
    # disc: rotations and reflections
    for _ in range(500):
        theta = RNG.uniform(0, 2 * math.pi)
        a = np.array([math.cos(theta), math.sin(theta)])
        nu = -a
        phi = RNG.uniform(0, 2 * math.pi)
        R = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
        F = R if RNG.random() < 0.5 else R @ np.diag([1.0, -1.0])
        st = NoSlipState2D(a, RNG.normal(size=2), RNG.normal())
        out = collide_2d(st, nu, iner, require_incoming=False)
        lhs_u, lhs_s = F @ out.u, float(np.linalg.det(F)) * out.s
        st_f = NoSlipState2D(F @ a, F @ st.u, float(np.linalg.det(F)) * st.s)
        rhs = collide_2d(st_f, F @ nu, iner, require_incoming=False)
        worst = max(worst, float(np.max(np.abs(lhs_u - rhs.u))), abs(lhs_s - rhs.s))
    # strip: translations along the walls and the two reflections
    for _ in range(500):
        side = 1.0 if RNG.random() < 0.5 else -1.0
        a = np.array([0.5 * side, RNG.normal()])
        nu = np.array([-side, 0.0])
        F = [np.eye(2), np.diag([-1.0, 1.0]), np.diag([1.0, -1.0])][RNG.integers(0, 3)]
        b = np.array([0.0, RNG.normal()])  # translation along the walls
        st = NoSlipState2D(a, RNG.normal(size=2), RNG.normal())
        out = collide_2d(st, nu, iner, require_incoming=False)
        lhs_u, lhs_s = F @ out.u, float(np.linalg.det(F)) * out.s
        st_f = NoSlipState2D(F @ a + b, F @ st.u, float(np.linalg.det(F)) * st.s)
        rhs = collide_2d(st_f, F @ nu, iner, require_incoming=False)
        worst = max(worst, float(np.max(np.abs(lhs_u - rhs.u))), abs(lhs_s - rhs.s))
    _report(4, worst < 1e-12, f"equivariance over 1000 sampled states: max error {worst:.2e}")


def test_criterion_05_closed_form_vs_numeric():
    profile = stadium_profile(1.0, 0.5)
    iner = InertiaParams.from_eta(0.577)
    y0 = [0.3, 0.0, 1.0, -1.0, -0.5]
    t_eval = np.linspace(0.0, 50.0, 501)
    ts, ys = roll3d_trajectory(y0, profile, iner, g=5.0, t_final=50.0, t_eval=t_eval)
    sup = 0.0
    for t, y in zip(ts, ys):
        ref = strip_closed_form(t, y0, profile, iner, g=5.0)
        sup = max(sup, abs(y[3] - ref[3]), abs(y[4] - ref[4]))
    # full-arc homogeneous part equals the rotation by pi*eta
    worst_rot = 0.0
    for eta in (0.2, 0.577, 0.9):
        ii = InertiaParams.from_eta(eta)
        u, r = 1.3, 0.5
        y = strip_closed_form(math.pi * r / u, [1.0, 0.0, u, 0.37, -0.83], profile, ii, g=0.0)
        vr, wr = edge_rotation(0.37, -0.83, eta)
        worst_rot = max(worst_rot, abs(y[3] - vr), abs(y[4] - wr))
    ok = sup < 1e-8 and worst_rot < 1e-12
    _report(5, ok, f"closed form vs numeric sup {sup:.2e} on [0,50]; arc rotation {worst_rot:.2e}")


def test_criterion_06_conservation_4d():
    # curved-part orbit near the rim equilibrium stays on the chart >= 10 units
    g = 1.0
    y0 = np.array([0.0, math.pi / 2, 0.0, 0.05, 0.8, 0.1, 0.0, 0.2, -0.1])
    res = integrate_to_event(
        lambda t, y: _rhs_curved(t, y, -1.0, 0.5, 0.5, g),
        y0, _phi_events(), IntegratorConfig(), t_max=10.0,
    )
    assert res.timed_out, "orbit unexpectedly left the curved part"
    e0 = energy_monitor(y0[3:6], y0[6:9], y0[2], g)
    e1 = energy_monitor(res.y[3:6], res.y[6:9], res.y[2], g)
    d_e1 = abs(e1[0] - e0[0])
    d_h = abs(e1[3] - e0[3])
    ok = d_e1 < 1e-9 and d_h < 1e-9
    _report(6, ok, f"per 10 time units: |dE1| = {d_e1:.2e}, |d(E+g x3)| = {d_h:.2e}")


def test_criterion_07_time_reversibility():
    # no-slip flow (event-wise), 10 units out and back
    dom = Billiard2D(StripSection(1.0), g=2.0)
    st = NoSlipState2D([0.1, 0.0], [0.8, 0.3], -0.2)
    _, _, fin = billiard_trajectory(st, dom, GAMMA_HALF, 10**6, max_time=10.0)
    _, _, fin_b = billiard_trajectory(fin.reversed(), dom, GAMMA_HALF, 10**6, max_time=10.0)
    back = fin_b.reversed()
    err_ns = max(
        float(np.max(np.abs(back.x - st.x))),
        float(np.max(np.abs(back.u - st.u))),
        abs(back.s - st.s),
    )
    # rolling flow across junctions
    sec = DiscSection(1.0)
    iner = InertiaParams.from_eta(0.5)
    st_r = RollState.flat(1, [0.0, 0.1], 0.0, [0.6, 0.2], -0.3, [0.3, -0.2, 0.1])
    _, _, _, fin_r = roll4d_trajectory(st_r, sec, 0.3, iner, g=1.0, max_time=10.0)
    _, _, _, fin_r2 = roll4d_trajectory(fin_r.reversed(), sec, 0.3, iner, g=1.0, max_time=10.0)
    back_r = fin_r2.reversed()
    err_roll = max(
        float(np.max(np.abs(back_r.p - st_r.p))),
        abs(back_r.x3 - st_r.x3),
        float(np.max(np.abs(back_r.v - st_r.v))),
        float(np.max(np.abs(back_r.S - st_r.S))),
    )
    ok = err_ns < 1e-7 and err_roll < 1e-7
    _report(7, ok, f"reversal after 10 units: no-slip {err_ns:.2e}, rolling {err_roll:.2e}")


def test_criterion_08_limit_theorem():
    t0 = time.perf_counter()
    eta = eta_from_noslip_gamma(1.0 / math.sqrt(2.0))  # ~0.39183
    assert abs(match_inertia(eta) - 1.0 / math.sqrt(2.0)) < 1e-13
    rs = [0.2, 0.1, 0.05, 0.025]
    rows = noslip_limit_check(eta, (-1.0, 0.7, 0.3), rs, DiscSection(1.0))
    errs = [r["error"] for r in rows]
    elapsed = time.perf_counter() - t0
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    slope = float(np.polyfit(np.log(rs), np.log(errs), 1)[0])
    ok = decreasing and slope >= 0.8 and elapsed < 60.0
    _report(
        8, ok,
        f"edge-pass errors {['%.3e' % e for e in errs]}, order {slope:.2f}, {elapsed:.1f}s",
    )


def test_criterion_09_two_plates_regimes():
    # eta = 0: exact parabola.  The 1e-12 tolerance is absolute, which pins a
    # 10-unit comparison window (the 200-unit horizon applies to boundedness).
    spec0 = ExperimentSpec(sweep={"eta": [0.0]}, horizon=10.0, sample_dt=0.05)
    tr0, _ = run_experiment("two_plates_height", spec0)
    t = tr0.column("t")
    parab_err = float(np.max(np.abs(tr0.column("x3") - (-t - 2.5 * t * t))))
    results = {}
    spec = ExperimentSpec(sweep={"eta": [0.3, 0.577, 0.9]}, horizon=200.0, sample_dt=0.05)
    _, summary = run_experiment("two_plates_height", spec)
    for eta, rep in summary.items():
        results[eta] = rep["bounded"] and math.isfinite(rep["period"]) and rep["period"] > 0
    ok = parab_err < 1e-12 and all(results.values())
    _report(
        9, ok,
        f"eta=0 parabola error {parab_err:.2e}; bounded+periodic over 200 units: {results}",
    )


def test_criterion_10_radius_limit_convergence():
    _, summary = run_experiment("radius_limit", ExperimentSpec())
    d = summary["sup_diffs"]
    ok = len(d) == 3 and d[0] > d[1] > d[2]
    _report(10, ok, f"sup-norm height differences over r=(0.4,0.2,0.1,0.05): {['%.3f' % x for x in d]}")


def test_criterion_11_circular_cylinder_regimes():
    _, s_top = run_experiment("caustic_and_height", ExperimentSpec(horizon=120.0))
    top_ok = s_top["caustic_count"] == 1 and s_top["height"]["bounded"]
    _, s_pert = run_experiment(
        "caustic_and_height", ExperimentSpec(initial={"S12": -0.2}, horizon=120.0)
    )
    pert_ok = s_pert["caustic_count"] == 2 and not s_pert["height"]["bounded"]
    ok = top_ok and pert_ok
    _report(
        11, ok,
        "paper initial condition: caustics=%d bounded=%s; perturbed: caustics=%d bounded=%s"
        % (s_top["caustic_count"], s_top["height"]["bounded"],
           s_pert["caustic_count"], s_pert["height"]["bounded"]),
    )


def test_criterion_12_disc_double_caustic():
    dom = Billiard2D(DiscSection(1.0), g=0.0)
    st = NoSlipState2D([0.3, 0.0], [0.5, 0.61], 0.37)
    events, _, _ = billiard_trajectory(st, dom, GAMMA_HALF, 200)
    d = np.array([e["chord_d"] for e in events[1:]])
    count, centers, spreads = cluster_radii(d, merge_tol=1e-3)
    ev0, _, _ = billiard_trajectory(st.copy(), dom, InertiaParams.from_gamma(0.0), 200)
    d0 = np.array([e["chord_d"] for e in ev0[1:]])
    count0, _, spreads0 = cluster_radii(d0, merge_tol=1e-3)
    ok = count == 2 and max(spreads) < 1e-8 and count0 == 1 and max(spreads0) < 1e-8
    _report(
        12, ok,
        f"no-slip: {count} clusters (spreads {['%.1e' % s for s in spreads]}); "
        f"gamma=0 control: {count0} cluster",
    )
