import math

import numpy as np

from noslip.billiards import (
    Billiard2D,
    BilliardCylinder3D,
    NoSlipState2D,
    NoSlipState3D,
    billiard_trajectory,
    make_rolling_impact_state,
    project_axis,
    rolling_impact,
    spin_matrix_3d,
)
from noslip.experiments import cluster_radii, detect_bounded
from noslip.geometry import DiscSection, StripSection
from noslip.inertia import InertiaParams

GAMMA_HALF = InertiaParams.from_gamma(1 / math.sqrt(2))


def test_strip_period_two_orbit():
    dom = Billiard2D(StripSection(1.0), g=0.0)
    st = NoSlipState2D([0.0, 0.0], [1.0, 0.0], 0.0)
    events, terminal, _ = billiard_trajectory(st, dom, GAMMA_HALF, 8)
    xs = [e["x"] for e in events]
    assert np.allclose(xs[0], [0.5, 0.0], atol=1e-14)
    assert np.allclose(xs[1], [-0.5, 0.0], atol=1e-14)
    assert np.allclose(xs[2], xs[0], atol=1e-13)
    us = [e["u"] for e in events]
    assert np.allclose(us[2], us[0], atol=1e-13)


def test_disc_gamma0_ordinary_billiard_single_caustic():
    dom = Billiard2D(DiscSection(1.0), g=0.0)
    iner0 = InertiaParams.from_gamma(0.0)
    st = NoSlipState2D([0.2, 0.1], [0.9, 0.35], 0.3)
    events, _, _ = billiard_trajectory(st, dom, iner0, 150)
    d = np.array([e["chord_d"] for e in events[1:]])
    assert float(np.max(d) - np.min(d)) < 1e-12
    # spin never changes magnitude pattern: |s| alternates sign only
    ss = np.array([e["s"] for e in events])
    assert np.allclose(np.abs(ss), abs(st.s), atol=1e-13)


def test_disc_double_caustic_alternates():
    dom = Billiard2D(DiscSection(1.0), g=0.0)
    st = NoSlipState2D([0.3, 0.0], [0.5, 0.61], 0.37)
    events, _, _ = billiard_trajectory(st, dom, GAMMA_HALF, 200)
    d = np.array([e["chord_d"] for e in events[1:]])
    count, centers, spreads = cluster_radii(d, merge_tol=1e-3)
    assert count == 2
    assert max(spreads) < 1e-8


def test_energy_conserved_along_flow():
    dom = Billiard2D(DiscSection(1.0), g=0.0)
    st = NoSlipState2D([0.3, 0.0], [0.5, 0.61], 0.37)
    events, _, _ = billiard_trajectory(st, dom, GAMMA_HALF, 300)
    E = np.array([e["E"] for e in events])
    assert float(np.max(np.abs(E - E[0]))) < 1e-13


def test_energy_with_gravity_uses_potential():
    dom = Billiard2D(StripSection(1.0), g=3.0)
    st = NoSlipState2D([0.0, 0.0], [0.7, 0.2], -0.1)
    events, _, _ = billiard_trajectory(st, dom, GAMMA_HALF, 200)
    H = np.array([e["E"] + 3.0 * e["x"][1] for e in events])
    assert float(np.max(np.abs(H - H[0]))) < 1e-10


def test_time_reversibility_flow():
    for dom, st in (
        (Billiard2D(StripSection(1.0), g=2.0), NoSlipState2D([0.1, 0.0], [0.8, 0.3], -0.2)),
        (
            BilliardCylinder3D(DiscSection(1.0), g=1.0),
            NoSlipState3D([0.2, 0.1, 0.0], [0.7, 0.4, -0.3], spin_matrix_3d(0.3, -0.2, 0.5)),
        ),
    ):
        ev, _, fin = billiard_trajectory(st, dom, GAMMA_HALF, 10**6, max_time=25.0)
        assert len(ev) >= 8
        _, _, fin_b = billiard_trajectory(fin.reversed(), dom, GAMMA_HALF, 10**6, max_time=25.0)
        back = fin_b.reversed()
        assert np.max(np.abs(back.x - st.x)) < 1e-8
        assert np.max(np.abs(back.u - st.u)) < 1e-8


def test_rolling_impact_examples():
    nu = np.array([-1.0, 0.0, 0.0])
    tau = np.array([0.0, -1.0, 0.0])
    iner = InertiaParams.from_gamma(0.6)
    # purely vertical velocity, no spin: contact velocity vertical
    st = NoSlipState3D([1, 0, 0], [0.0, 0.0, -1.0], np.zeros((3, 3)))
    assert rolling_impact(st, nu, tau, iner.gamma)
    # tangential velocity, no spin: slipping
    st2 = NoSlipState3D([1, 0, 0], [0.0, 1.0, 0.0], np.zeros((3, 3)))
    assert not rolling_impact(st2, nu, tau, iner.gamma)
    # spin tuned to cancel the tangential component
    st3 = make_rolling_impact_state([1, 0, 0], [0.0, 1.0, -0.5], nu, tau, iner.gamma)
    assert rolling_impact(st3, nu, tau, iner.gamma)


def test_rolling_impact_start_is_bounded():
    sec = DiscSection(1.0)
    dom = BilliardCylinder3D(sec, g=1.0)
    iner = InertiaParams.from_gamma(math.sqrt(0.4))  # uniform 3D ball
    nu = np.array([-1.0, 0.0, 0.0])
    tau = np.array([0.0, -1.0, 0.0])
    st = make_rolling_impact_state([1.0, 0, 0], 0.8 * tau + 0.3 * nu, nu, tau, iner.gamma)
    events, terminal, _ = billiard_trajectory(st, dom, iner, 10**6, max_time=60.0)
    t = np.array([e["t"] for e in events])
    z = np.array([e["x"][2] for e in events])
    rep = detect_bounded(t, z)
    assert rep["bounded"]


def test_skipping_tracks_rolling_solution():
    # rolling-impact skipping converges to the 3D rolling ball as the bounce
    # steps shrink; the rolling side runs at the constraint-rescaled gravity
    # g/(1+gamma^2) since billiard flight feels the raw g
    from noslip.geometry import ArclengthProfile
    from noslip.rolling import roll3d_trajectory

    iner = InertiaParams.from_gamma(math.sqrt(0.4))
    dom = BilliardCylinder3D(DiscSection(1.0), g=1.0)
    nu = np.array([-1.0, 0.0, 0.0])
    tau = np.array([0.0, -1.0, 0.0])
    profile = ArclengthProfile([(2 * math.pi, 1.0)])
    g_roll = 1.0 / (1.0 + iner.gamma**2)
    devs = []
    for u_hat in (0.3, 0.15, 0.05):
        st = make_rolling_impact_state([1.0, 0, 0], 0.8 * tau + u_hat * nu, nu, tau, iner.gamma)
        ev, _, _ = billiard_trajectory(st, dom, iner, 10**6, max_time=30.0)
        t = np.array([e["t"] for e in ev])
        z = np.array([e["x"][2] for e in ev])
        ts, ys = roll3d_trajectory([0.0, 0.0, 0.8, 0.0, 0.0], profile, iner,
                                   g=g_roll, t_final=30.0, t_eval=t)
        devs.append(float(np.max(np.abs(z - ys[: len(z), 1]))))
    assert devs[0] > devs[1] > devs[2]
    assert devs[2] < 0.5  # within 5% of the ~7.8 oscillation amplitude


def test_non_rolling_start_falls():
    sec = DiscSection(1.0)
    dom = BilliardCylinder3D(sec, g=1.0)
    iner = InertiaParams.from_gamma(math.sqrt(0.4))
    nu = np.array([-1.0, 0.0, 0.0])
    tau = np.array([0.0, -1.0, 0.0])
    st = NoSlipState3D([1.0, 0, 0], 0.8 * tau + 0.4 * nu, np.zeros((3, 3)))
    assert not rolling_impact(st, nu, tau, iner.gamma)
    events, _, _ = billiard_trajectory(st, dom, iner, 10**6, max_time=60.0)
    z = np.array([e["x"][2] for e in events])
    assert z[-1] < -30.0  # secular fall


def test_project_axis_stationary_for_axial_motion():
    st = NoSlipState3D([0.1, 0.2, 3.0], [0.0, 0.0, -2.0], spin_matrix_3d(0.5, 0.1, -0.2))
    p = project_axis(st)
    assert np.allclose(p.u, 0.0)
    assert abs(p.s - st.S[1, 0]) < 1e-15


def test_projection_theorem_event_by_event():
    sec = DiscSection(1.0)
    iner = GAMMA_HALF
    st3 = NoSlipState3D([0.2, 0.1, 0.0], [0.7, 0.4, -0.3], spin_matrix_3d(0.3, -0.2, 0.5))
    st2 = project_axis(st3)
    dom2 = Billiard2D(sec, g=0.0)
    ev2, _, _ = billiard_trajectory(st2, dom2, iner, 50)
    for g in (0.0, 1.0):
        dom3 = BilliardCylinder3D(sec, g=g)
        ev3, _, _ = billiard_trajectory(st3.copy(), dom3, iner, 50)
        assert len(ev3) == 50
        for e3, e2 in zip(ev3, ev2):
            assert abs(e3["t"] - e2["t"]) < 1e-9
            assert np.max(np.abs(e3["x"][:2] - e2["x"])) < 1e-9
            assert np.max(np.abs(e3["u"][:2] - e2["u"])) < 1e-9
            assert abs(e3["S"][1, 0] - e2["s"]) < 1e-9


def test_projection_intertwines_collision_maps():
    # map-level check: project(collide3d) == collide2d(project)
    from noslip.billiards import collide_2d, collide_3d

    rng = np.random.default_rng(3)
    iner = InertiaParams.from_gamma(0.8)
    for _ in range(100):
        theta = rng.uniform(0, 2 * math.pi)
        a = np.array([math.cos(theta), math.sin(theta), rng.normal()])
        nu3 = np.array([-a[0], -a[1], 0.0])
        A = rng.normal(size=(3, 3))
        st3 = NoSlipState3D(a, rng.normal(size=3), A - A.T)
        out3 = collide_3d(st3, nu3, iner, require_incoming=False)
        lhs = project_axis(out3)
        p = project_axis(st3)
        rhs = collide_2d(p, nu3[:2], iner, require_incoming=False)
        assert np.allclose(lhs.u, rhs.u, atol=1e-13)
        assert abs(lhs.s - rhs.s) < 1e-13
