"""Nonholonomic rolling flows on tube hypersurfaces.

Three systems share the frame conventions of :mod:`noslip.geometry`:

* the 4D ball on a 3D cylinder (6 velocity ODEs on the curved chart, exact
  parabolic propagation on the flat sheets),
* the 3D ball on a flat strip (stadium tube; matrix-exponential closed form),
* the flat-edge rolling map (half-turn around a straight edge).

Flat-sheet states carry Cartesian components; the spin components are
functional, c_ij = x_i . (S x_j).  Crossing a junction re-expresses the state
in the chart frame (X1 = +-e1, X2 = e2, X3), which absorbs every
sheet-dependent sign.  The billiard dictionary used by the radius-limit check
is then uniform: an incoming billiard state (u_hat, u_bar, s) at a wall with
inward normal -e1 enters the tube as a flat state with
u.e1 = -u_hat, u.e2 = -u_bar, Sigma12 = s, and the same reading decodes the
exit.  Getting a sign wrong here makes the limit check diverge, which is the
guard for this block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .billiards import _first_wall_hit
from .errors import DomainError, FocalPointError
from .geometry import ArclengthProfile, TubeChart, curvature_factors
from .inertia import InertiaParams, match_inertia
from .integrate import IntegratorConfig, energy_monitor, integrate_to_event

__all__ = [
    "RollState",
    "cylinder4d_rhs",
    "flat_to_chart",
    "chart_to_flat",
    "roll4d_trajectory",
    "RollSamples",
    "cylinder3d_rhs",
    "roll3d_trajectory",
    "strip_closed_form",
    "edge_rotation",
    "edge_map_flat",
    "curved_edge_pass",
    "noslip_limit_check",
]


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass
class RollState:
    """State of the 4D rolling ball on the tube around P = C x R.

    region "flat+"/"flat-": ``p`` is the in-plane center position, ``v`` the
    Cartesian velocity (u1, u2, u3) and ``S`` the Cartesian spin components
    (Sigma12, Sigma13, Sigma23).
    region "curved": ``s``, ``phi`` are chart coordinates on wall
    ``wall_index``; ``v`` and ``S`` are frame components (v1, v2, v3) and
    (S12, S13, S23).
    """

    region: str
    x3: float
    v: np.ndarray
    S: np.ndarray
    p: np.ndarray | None = None
    s: float = math.nan
    phi: float = math.nan
    wall_index: int | None = None

    def __post_init__(self):
        self.v = np.asarray(self.v, float).reshape(3)
        self.S = np.asarray(self.S, float).reshape(3)
        if self.p is not None:
            self.p = np.asarray(self.p, float).reshape(2)

    @classmethod
    def flat(cls, sheet, p, x3, u_xy, u3, Sigma):
        region = "flat+" if sheet > 0 else "flat-"
        v = np.array([u_xy[0], u_xy[1], u3], float)
        return cls(region, float(x3), v, np.asarray(Sigma, float), p=np.asarray(p, float))

    @classmethod
    def curved(cls, wall_index, s, phi, x3, v, S):
        return cls(
            "curved", float(x3), np.asarray(v, float), np.asarray(S, float),
            s=float(s), phi=float(phi), wall_index=wall_index,
        )

    @property
    def sheet(self) -> int:
        if self.region == "flat+":
            return 1
        if self.region == "flat-":
            return -1
        raise DomainError("sheet is defined only on the flat parts")

    def energies(self, g=0.0):
        """(E1, E2, E_total, E_total + g*x3); valid in both regions.

        On flat sheets the in-plane speed and Sigma12 are rotation invariants,
        so the same formulas apply to Cartesian components.
        """
        if self.region == "curved":
            return energy_monitor(self.v, self.S, self.x3, g)
        e1 = 0.5 * (self.v[0] ** 2 + self.v[1] ** 2 + self.S[0] ** 2)
        e2 = 0.5 * (self.v[2] ** 2 + self.S[1] ** 2 + self.S[2] ** 2)
        return e1, e2, e1 + e2, e1 + e2 + g * self.x3

    def reversed(self) -> "RollState":
        out = RollState(self.region, self.x3, -self.v, -self.S, p=self.p,
                        s=self.s, phi=self.phi, wall_index=self.wall_index)
        return out


# ---------------------------------------------------------------------------
# Curved-part right-hand side (4D ball on a 3D cylinder)
# ---------------------------------------------------------------------------


def _rhs_curved(t, y, kappa, r, eta, g):
    s, phi, x3, v1, v2, v3, S12, S13, S23 = y
    den = 1.0 - r * kappa * math.sin(phi)
    f_c = kappa * math.cos(phi) / den
    f_s = kappa * math.sin(phi) / den
    return (
        v2 / den,
        v1 / r,
        v3,
        -f_c * v2 * v2 - eta * f_s * v2 * S12,
        f_c * v1 * v2 - (eta / r) * v1 * S12,
        eta * (f_s * v2 * S23 - (1.0 / r) * v1 * S13) - g,
        eta * (f_s + 1.0 / r) * v1 * v2,
        -f_c * v2 * S23 + (eta / r) * v1 * v3,
        f_c * v2 * S13 - eta * f_s * v2 * v3,
    )


def cylinder4d_rhs(state: RollState, inertia: InertiaParams, g, chart: TubeChart):
    """Time derivative of a curved-region RollState (frame components).

    phi' = v1/r, s' = v2/(1 - r*kappa*sin(phi)), x3' = v3, and the six
    velocity equations of the tube system.  Flat-part motion is parabolic
    with constant S and is propagated in closed form, not through here.
    """
    if state.region != "curved":
        raise DomainError("cylinder4d_rhs applies to curved-region states")
    kappa = chart.kappa(state.s)
    den = 1.0 - chart.r * kappa * math.sin(state.phi)
    if den <= 1e-14:
        raise FocalPointError(f"focal point at s={state.s}, phi={state.phi}")
    y = (state.s, state.phi, state.x3, *state.v, *state.S)
    return np.array(_rhs_curved(0.0, y, kappa, chart.r, inertia.eta, g))


# ---------------------------------------------------------------------------
# Junction conversions (the frames coincide at phi in {0, pi})
# ---------------------------------------------------------------------------


def flat_to_chart(section, wall_index, s, sheet, u_xy, u3, Sigma):
    """Re-express a flat-sheet state in the curved chart frame at a junction.

    Returns (phi0, v, S) with phi0 = 0 on the + sheet and pi on the - sheet.
    """
    e1, e2 = section.walls[wall_index].frame(s)
    sg = 1.0 if sheet > 0 else -1.0
    v1 = sg * float(u_xy @ e1)
    v2 = float(u_xy @ e2)
    S12 = sg * Sigma[0]
    S13 = sg * (e1[0] * Sigma[1] + e1[1] * Sigma[2])
    S23 = e2[0] * Sigma[1] + e2[1] * Sigma[2]
    phi0 = 0.0 if sheet > 0 else math.pi
    return phi0, np.array([v1, v2, u3]), np.array([S12, S13, S23])


def chart_to_flat(section, wall_index, s, phi_exit, v, S):
    """Inverse junction conversion; snaps phi_exit to the nearer junction.

    Returns (sheet, p, u_xy, u3, Sigma).
    """
    sheet = 1 if phi_exit < math.pi / 2 else -1
    e1, e2 = section.walls[wall_index].frame(s)
    sg = float(sheet)
    v1, v2, v3 = v
    u_xy = (sg * v1) * e1 + v2 * e2
    Sigma12 = sg * S[0]
    w = (sg * S[1]) * e1 + S[2] * e2
    p = section.walls[wall_index].point(s)
    return sheet, p, u_xy, float(v3), np.array([Sigma12, w[0], w[1]])


# ---------------------------------------------------------------------------
# 4D trajectory driver
# ---------------------------------------------------------------------------


@dataclass
class RollSamples:
    """Uniformly sampled trajectory monitors plus per-phase event records."""

    t: list = field(default_factory=list)
    region: list = field(default_factory=list)  # +1/-1 flat sheets, 0 curved
    x1: list = field(default_factory=list)
    x2: list = field(default_factory=list)
    x3: list = field(default_factory=list)
    E1: list = field(default_factory=list)
    E2: list = field(default_factory=list)
    E: list = field(default_factory=list)
    H: list = field(default_factory=list)  # E + g*x3

    def append(self, t, region, x1, x2, x3, e1, e2, g):
        self.t.append(t)
        self.region.append(region)
        self.x1.append(x1)
        self.x2.append(x2)
        self.x3.append(x3)
        self.E1.append(e1)
        self.E2.append(e2)
        self.E.append(e1 + e2)
        self.H.append(e1 + e2 + g * x3)

    def arrays(self):
        return {k: np.array(getattr(self, k)) for k in
                ("t", "region", "x1", "x2", "x3", "E1", "E2", "E", "H")}


def _phi_events():
    return [
        (lambda t, y: y[1], -1.0),            # exit through phi = 0 (+ sheet)
        (lambda t, y: y[1] - math.pi, 1.0),   # exit through phi = pi (- sheet)
    ]


def roll4d_trajectory(
    state: RollState,
    section,
    r,
    inertia: InertiaParams,
    g=0.0,
    max_time=100.0,
    config: IntegratorConfig | None = None,
    sample_dt=None,
    max_passes=100_000,
):
    """Event-driven flow of the 4D rolling ball on the tube around C x R.

    Alternates closed-form flat-sheet propagation with adaptive integration
    of the curved chart, switching at the phi in {0, pi} junctions.
    Returns (samples, phases, terminal, final_state); ``phases`` is a list of
    per-phase records (flat segments carry chord endpoints, curved passes the
    dwell and rim travel).  terminal: "time", "timeout", or "passes".
    """
    config = config or IntegratorConfig()
    samples = RollSamples()
    phases = []
    t = 0.0
    eta = inertia.eta
    next_k = 0  # next uniform sample index

    def sample_upto(t_limit, evaluator, region_code):
        nonlocal next_k
        if sample_dt is None:
            return
        while next_k * sample_dt <= t_limit + 1e-12:
            tk = next_k * sample_dt
            x1, x2, x3v, e1, e2 = evaluator(tk)
            samples.append(tk, region_code, x1, x2, x3v, e1, e2, g)
            next_k += 1

    terminal = "time"
    for _ in range(max_passes):
        remaining = max_time - t
        if remaining <= 1e-14:
            terminal = "time"
            break

        if state.region.startswith("flat"):
            sheet = state.sheet
            p0, w = state.p.copy(), state.v[:2].copy()
            u3_0, x3_0 = state.v[2], state.x3
            e1t, e2t, _, _ = state.energies(g)

            def flat_eval(tk, t0=t, p0=p0, w=w, x3_0=x3_0, u3_0=u3_0, e1t=e1t,
                          Sig=state.S.copy()):
                dt = tk - t0
                pos = p0 + w * dt
                x3v = x3_0 + u3_0 * dt - 0.5 * g * dt * dt
                u3v = u3_0 - g * dt
                e2v = 0.5 * (u3v * u3v + Sig[1] ** 2 + Sig[2] ** 2)
                return pos[0], pos[1], x3v, e1t, e2v

            speed = float(np.hypot(w[0], w[1]))
            hit = None
            if speed > 0.0:
                hit = _first_wall_hit(section, p0, w, np.zeros(2), remaining)
            if hit is None:
                sample_upto(t + remaining, flat_eval, sheet)
                t += remaining
                dt = remaining
                state = RollState.flat(
                    sheet, p0 + w * dt, x3_0 + u3_0 * dt - 0.5 * g * dt * dt,
                    w, u3_0 - g * dt, state.S,
                )
                terminal = "time" if speed > 0.0 else "timeout"
                break
            th, wi, p_hit = hit
            sample_upto(t + th, flat_eval, sheet)
            wall = section.walls[wi]
            s_star, _ = wall.locate(p_hit)
            phases.append(
                {"phase": "flat", "sheet": sheet, "t0": t, "t1": t + th,
                 "p0": p0, "p1": wall.point(s_star), "wall": wi, "s": s_star}
            )
            t += th
            x3_in = x3_0 + u3_0 * th - 0.5 * g * th * th
            u3_in = u3_0 - g * th
            phi0, v_c, S_c = flat_to_chart(section, wi, s_star, sheet, w, u3_in, state.S)
            state = RollState.curved(wi, s_star, phi0, x3_in, v_c, S_c)
            continue

        # curved pass
        chart = TubeChart(section, state.wall_index, r)
        kappa = chart.kappa(state.s)
        y0 = np.array([state.s, state.phi, state.x3, *state.v, *state.S])
        t_eval = None
        if sample_dt is not None:
            grid = []
            k = next_k
            while k * sample_dt <= t + remaining + 1e-12:
                if k * sample_dt >= t - 1e-12:
                    grid.append(k * sample_dt - t)
                k += 1
            t_eval = np.array(grid) if grid else None
            if t_eval is not None and len(t_eval):
                t_eval = t_eval[t_eval >= 0]
                if not len(t_eval):
                    t_eval = None

        res = integrate_to_event(
            lambda tt, y: _rhs_curved(tt, y, kappa, r, eta, g),
            y0,
            _phi_events(),
            config,
            t_max=remaining,
            t_eval=t_eval,
        )
        if sample_dt is not None and len(res.t_grid):
            for tk, yk in zip(res.t_grid, res.y_grid):
                pos = chart.embed(yk[0], yk[1], yk[2])
                e1v, e2v, _, _ = energy_monitor(yk[3:6], yk[6:9], yk[2], g)
                samples.append(t + tk, 0, pos[0], pos[1], yk[2], e1v, e2v, g)
                next_k += 1
        if res.timed_out:
            t += res.t
            y = res.y
            state = RollState.curved(state.wall_index, y[0], y[1], y[2], y[3:6], y[6:9])
            terminal = "time"
            break
        y = res.y
        phi_exit = 0.0 if res.event_id == 0 else math.pi
        phases.append(
            {"phase": "curved", "wall": state.wall_index, "t0": t, "t1": t + res.t,
             "s_in": state.s, "s_out": y[0], "phi_in": state.phi, "phi_out": phi_exit,
             "dwell": res.t}
        )
        t += res.t
        sheet, p, u_xy, u3, Sigma = chart_to_flat(
            section, state.wall_index, y[0], phi_exit, y[3:6], y[6:9]
        )
        state = RollState.flat(sheet, p, y[2], u_xy, u3, Sigma)
    else:
        terminal = "passes"

    return samples, phases, terminal, state


# ---------------------------------------------------------------------------
# 3D ball on a strip: stadium tube system
# ---------------------------------------------------------------------------


def cylinder3d_rhs(t, y, kappa, eta, g):
    """RHS of the 3D tube system; y = (ell, z, v1, v2, spin).

    v1 (transversal speed) is conserved; (v2, spin) rotate at rate
    eta*v1*kappa with the gravity drive -g on v2.
    """
    ell, z, v1, v2, spin = y
    return (v1, v2, 0.0, -eta * v1 * kappa * spin - g, eta * v1 * kappa * v2)


def _directed_segments(profile: ArclengthProfile, ell0, v1, t_final):
    """kappa pieces encountered from ell0 over time t_final at signed speed v1.

    For v1 < 0 the profile is walked backward: equivalent to walking the
    reversed-piece profile forward from total - ell0.
    """
    speed = abs(v1)
    if v1 > 0:
        return profile.segments(ell0 % profile.total_length, speed * t_final)
    rev = ArclengthProfile(tuple(reversed(profile.pieces)))
    return rev.segments((profile.total_length - ell0) % profile.total_length, speed * t_final)


def roll3d_trajectory(y0, profile: ArclengthProfile, inertia: InertiaParams,
                      g=0.0, t_final=10.0, t_eval=None,
                      config: IntegratorConfig | None = None):
    """Adaptive integration of the 3D tube system, split exactly at kappa breaks.

    y0 = (ell, z, v1, v2, spin); requires v1 != 0 so the kappa profile is
    traversed.  Returns (t_array, y_array[len, 5]).
    """
    config = config or IntegratorConfig()
    y = np.asarray(y0, float).copy()
    v1 = y[2]
    if v1 == 0.0:
        raise DomainError("v1 = 0: the ball never traverses the profile")
    ts = [0.0]
    ys = [y.copy()]
    t = 0.0
    eta = inertia.eta
    speed = abs(v1)
    for a, b, kappa in _directed_segments(profile, y[0], v1, t_final):
        dt = (b - a) / speed
        t_end = t + dt
        grid = None
        if t_eval is not None:
            grid = t_eval[(t_eval > t + 1e-15) & (t_eval <= t_end + 1e-15)] - t
            grid = np.clip(grid, 0.0, dt)
            if not len(grid):
                grid = None
        sol = solve_ivp(
            cylinder3d_rhs, (0.0, dt), y, args=(kappa, eta, g),
            method=config.method, rtol=config.rel_tol, atol=config.abs_tol,
            t_eval=grid, dense_output=True,
        )
        if t_eval is not None and grid is not None:
            for tk, yk in zip(sol.t, sol.y.T):
                ts.append(t + tk)
                ys.append(yk.copy())
        y = sol.sol(dt) if sol.sol is not None else sol.y[:, -1]
        t = t_end
    if t_eval is None:
        ts.append(t)
        ys.append(y.copy())
    return np.array(ts), np.array(ys)


def strip_closed_form(t, y0, profile: ArclengthProfile, inertia: InertiaParams, g=0.0):
    """Exact solution of the 3D tube system at time t (piecewise propagator).

    y0 = (ell, z, v1, v2, spin).  Per kappa piece the homogeneous part is the
    rotation exp(N J) with N = eta*v1*kappa*dt and the gravity term has
    sine/cosine (arcs) or linear (flats) primitives.  v1 must be nonzero.
    """
    ell0, z0, v1, v2, spin = np.asarray(y0, float)
    if v1 == 0.0:
        raise DomainError("v1 = 0: the ball never traverses the profile")
    if t < 0:
        raise DomainError("t must be nonnegative")
    eta = inertia.eta
    speed = abs(v1)
    z = z0
    for a, b, kappa in _directed_segments(profile, ell0, v1, t):
        dt = (b - a) / speed
        omega = eta * v1 * kappa
        if omega == 0.0:
            z += v2 * dt - 0.5 * g * dt * dt
            v2 = v2 - g * dt
        else:
            # X' = omega J X - G with X = (v2, spin), G = (g, 0)
            xp = np.array([0.0, -g / omega])  # steady state: omega J xp = G
            a0, b0 = v2 - xp[0], spin - xp[1]
            c, s = math.cos(omega * dt), math.sin(omega * dt)
            v2 = c * a0 - s * b0 + xp[0]
            spin = s * a0 + c * b0 + xp[1]
            # z accumulates the v2 primitive
            z += (a0 * s + b0 * (c - 1.0)) / omega + xp[0] * dt
    return np.array([ell0 + v1 * t, z, v1, v2, spin])


# ---------------------------------------------------------------------------
# Flat-edge rolling map and the no-slip limit check
# ---------------------------------------------------------------------------


def edge_rotation(v_bar, W, eta):
    """Homogeneous full-arc transport: rotation by pi*eta in each (v_i, W_i) plane.

    (v, W) -> (cos(pi eta) v + sin(pi eta) W, -sin(pi eta) v + cos(pi eta) W);
    equals integrating the straight-edge system over the half turn.
    """
    c, s = math.cos(math.pi * eta), math.sin(math.pi * eta)
    v_bar = np.asarray(v_bar, float)
    W = np.asarray(W, float)
    return c * v_bar + s * W, -s * v_bar + c * W


def edge_map_flat(v_bar, W, v_n, inertia: InertiaParams, r):
    """Rolling half-turn around a straight edge, in collision form.

    Requires incoming normal speed v_n > 0.  Returns (v_bar', W', T) with
    T = pi*r/v_n, where the exit is re-read against the flat-wall normal:
      v_hat -> -v_hat,
      v_bar' = cos(pi eta) v_bar + sin(pi eta) W,
      W'     = sin(pi eta) v_bar - cos(pi eta) W.
    With beta = pi*eta this is exactly the no-slip collision block.
    """
    v_n = float(v_n)
    if v_n <= 0.0:
        raise DomainError(f"edge map needs v_n > 0, got {v_n}")
    vr, Wr = edge_rotation(v_bar, W, inertia.eta)
    return vr, -Wr, math.pi * r / v_n


def curved_edge_pass(section, wall_index, s0, u_hat, u_bar, spin, r,
                     inertia: InertiaParams, config: IntegratorConfig | None = None,
                     max_time=1e4):
    """One rolling pass around a (possibly curved) edge, in billiard variables.

    The incoming no-slip state (u_hat < 0, u_bar, spin) at boundary point
    gamma(s0) enters the curved tube part from the + sheet; the pass is
    integrated until re-entry into a flat sheet.  Returns a dict with the
    exit billiard variables, dwell time, rim travel, and a ``friendly`` flag
    (exited back to the entry sheet).
    """
    if u_hat >= 0:
        raise DomainError("incoming state must have u_hat < 0")
    config = config or IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    chart = TubeChart(section, wall_index, r)
    kappa = chart.kappa(s0)
    wall = section.walls[wall_index]
    e1, e2 = wall.frame(s0)
    u_xy = (-u_hat) * e1 + (-u_bar) * e2
    phi0, v_c, S_c = flat_to_chart(section, wall_index, s0, 1, u_xy, 0.0, (spin, 0.0, 0.0))
    y0 = np.array([s0, phi0, 0.0, *v_c, *S_c])
    res = integrate_to_event(
        lambda tt, y: _rhs_curved(tt, y, kappa, r, inertia.eta, 0.0),
        y0,
        _phi_events(),
        config,
        t_max=max_time,
    )
    if res.timed_out:
        return {"exited": False, "friendly": False, "T": res.t, "ds": math.nan,
                "u_hat": math.nan, "u_bar": math.nan, "spin": math.nan}
    y = res.y
    phi_exit = 0.0 if res.event_id == 0 else math.pi
    sheet, p, u_out, _, Sigma = chart_to_flat(section, wall_index, y[0], phi_exit, y[3:6], y[6:9])
    e1x, e2x = wall.frame(y[0])
    ds = y[0] - s0
    period = getattr(wall, "period", None)
    if period:
        ds = (ds + period / 2) % period - period / 2
    return {
        "exited": True,
        "friendly": sheet == 1,
        "T": res.t,
        "ds": float(ds),
        "u_hat": -float(u_out @ e1x),
        "u_bar": -float(u_out @ e2x),
        "spin": float(Sigma[0]),
        "E1_drift": abs(
            0.5 * (y[3] ** 2 + y[4] ** 2 + y[6] ** 2)
            - 0.5 * (v_c[0] ** 2 + v_c[1] ** 2 + S_c[0] ** 2)
        ),
    }


def noslip_limit_check(eta_roll, incoming, r_list, section, wall_index=0,
                       s0=0.0, config: IntegratorConfig | None = None):
    """Convergence of edge-pass exits to the matched no-slip collision map.

    ``incoming`` is the billiard state (u_hat < 0, u_bar, spin) at
    gamma(s0); the no-slip target uses gamma_n = match_inertia(eta_roll).
    Returns a list of rows {r, error, T, ds, friendly}; friendly rolls are
    flagged and excluded from convergence fits.
    """
    u_hat, u_bar, spin = incoming
    inertia_roll = InertiaParams.from_eta(eta_roll)
    gamma_n = match_inertia(eta_roll)
    iner_n = InertiaParams.from_gamma(gamma_n)
    target = (
        -u_hat,
        iner_n.c_beta * u_bar + iner_n.s_beta * spin,
        iner_n.s_beta * u_bar - iner_n.c_beta * spin,
    )
    rows = []
    for r in r_list:
        out = curved_edge_pass(section, wall_index, s0, u_hat, u_bar, spin, r,
                               inertia_roll, config=config)
        if not out["exited"] or out["friendly"]:
            rows.append({"r": r, "error": math.nan, "T": out["T"], "ds": out["ds"],
                         "friendly": out["friendly"], "exited": out["exited"]})
            continue
        err = max(
            abs(out["u_hat"] - target[0]),
            abs(out["u_bar"] - target[1]),
            abs(out["spin"] - target[2]),
        )
        rows.append({"r": r, "error": err, "T": out["T"], "ds": out["ds"],
                     "friendly": False, "exited": True})
    return rows
