"""No-slip collision maps and event-driven billiard flows (m = 1 throughout).

Orientation note (pinned once, used everywhere):

* nu is the INWARD unit normal of the billiard domain; incoming states have
  u_hat = u . nu < 0.
* 2D: J is the positive (counterclockwise) quarter turn, the spin matrix is
  S = s J, and the collision tangent is tau = J nu (the clockwise-oriented
  boundary tangent of a convex table; the oriented tangent returned by
  geometry.boundary_data is -J nu).  In (u_hat, u_bar, s) these conventions
  realize the collision block
      u_hat -> -u_hat,  (u_bar, s) -> (c u_bar + s_b s, s_b u_bar - c s).
* 3D: J_a is the positive quarter turn of the wall tangent plane V_a defined
  by the OUTWARD normal and the right-hand rule; S_bar = s_bar * hat(-nu).

A sign error here silently breaks the equivariance and projection tests,
which act as the guard suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CornerEventError, DomainError, GrazingEventError
from .geometry import CrossSection, CircleArc, LineWall, rot90
from .inertia import InertiaParams

__all__ = [
    "NoSlipState2D",
    "NoSlipState3D",
    "spin_matrix_3d",
    "collide_2d",
    "collide_3d",
    "collide_general",
    "collide_general_batch",
    "wedge",
    "hat",
    "kinetic_energy",
    "decompose_3d",
    "Billiard2D",
    "BilliardCylinder3D",
    "FlightOutcome",
    "flight",
    "billiard_trajectory",
    "project_axis",
    "rolling_impact",
    "make_rolling_impact_state",
    "chord_distance",
]

GRAZING_TOL = 1e-12


# ---------------------------------------------------------------------------
# Kinetic states
# ---------------------------------------------------------------------------


@dataclass
class NoSlipState2D:
    """Planar ball state: center position, velocity, scalar spin (S = s J)."""

    x: np.ndarray
    u: np.ndarray
    s: float

    def __post_init__(self):
        self.x = np.asarray(self.x, float).reshape(2)
        self.u = np.asarray(self.u, float).reshape(2)
        self.s = float(self.s)

    def energy(self) -> float:
        return 0.5 * (self.u @ self.u + self.s * self.s)

    def copy(self) -> "NoSlipState2D":
        return NoSlipState2D(self.x.copy(), self.u.copy(), self.s)

    def reversed(self) -> "NoSlipState2D":
        return NoSlipState2D(self.x.copy(), -self.u, -self.s)


@dataclass
class NoSlipState3D:
    """Spatial ball state: center position, velocity, scaled spin matrix S.

    S is stored as the full 3x3 skew matrix because flight preserves S while
    the (s_bar, u_hat, u_bar, W) decomposition is boundary-point-dependent.
    """

    x: np.ndarray
    u: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, float).reshape(3)
        self.u = np.asarray(self.u, float).reshape(3)
        self.S = np.asarray(self.S, float).reshape(3, 3)
        if np.max(np.abs(self.S + self.S.T)) > 1e-9:
            raise DomainError("S must be skew-symmetric")

    def energy(self) -> float:
        return 0.5 * (self.u @ self.u + 0.5 * float(np.sum(self.S * self.S)))

    def copy(self) -> "NoSlipState3D":
        return NoSlipState3D(self.x.copy(), self.u.copy(), self.S.copy())

    def reversed(self) -> "NoSlipState3D":
        return NoSlipState3D(self.x.copy(), -self.u, -self.S)


def spin_matrix_3d(S12: float, S13: float, S23: float) -> np.ndarray:
    """Skew matrix with components S_ij = x_i . (S x_j)."""
    return np.array([[0.0, S12, S13], [-S12, 0.0, S23], [-S13, -S23, 0.0]])


def kinetic_energy(S: np.ndarray, u: np.ndarray) -> float:
    """(1/2)(|u|^2 + (1/2) Tr(S S^T)), the kinetic-metric energy with m = 1."""
    S = np.asarray(S, float)
    u = np.asarray(u, float)
    return 0.5 * (u @ u + 0.5 * float(np.sum(S * S)))


# ---------------------------------------------------------------------------
# Collision maps
# ---------------------------------------------------------------------------


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Generalized cross product: (a ^ b) w = (a.w) b - (b.w) a."""
    return np.outer(b, a) - np.outer(a, b)


def hat(w: np.ndarray) -> np.ndarray:
    """3D cross-product matrix: hat(w) v = w x v."""
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def _check_incoming(u_hat: float, require_incoming: bool):
    if not require_incoming:
        return
    if abs(u_hat) < GRAZING_TOL:
        raise GrazingEventError(f"tangential event: u_hat = {u_hat:.3e}")
    if u_hat > 0:
        raise DomainError(f"state is outgoing (u_hat = {u_hat:.3e} > 0)")


def collide_2d(state: NoSlipState2D, nu, inertia: InertiaParams, require_incoming=True):
    """No-slip collision in the plane at a wall with inward normal nu.

    (u_hat, u_bar, s) -> (-u_hat, c u_bar + s_b s, s_b u_bar - c s) with
    u_bar measured along tau = J nu.  Energy-preserving involution.
    """
    nu = np.asarray(nu, float)
    tau = rot90(nu)
    u_hat = float(state.u @ nu)
    u_bar = float(state.u @ tau)
    _check_incoming(u_hat, require_incoming)
    c, sb = inertia.c_beta, inertia.s_beta
    u_bar_new = c * u_bar + sb * state.s
    s_new = sb * u_bar - c * state.s
    u_new = -u_hat * nu + u_bar_new * tau
    return NoSlipState2D(state.x.copy(), u_new, s_new)


def _tangent_basis_3d(nu: np.ndarray):
    """Deterministic orthonormal basis (t1, t2) of the wall tangent plane.

    Chosen so that (t1, t2, nu_out) is right-handed, i.e. t2 = (-nu) x t1.
    """
    nu_out = -nu
    seed = np.array([0.0, 0.0, 1.0])
    if abs(nu_out @ seed) > 0.9:
        seed = np.array([1.0, 0.0, 0.0])
    t1 = seed - (seed @ nu_out) * nu_out
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(nu_out, t1)
    return t1, t2


def decompose_3d(state: NoSlipState3D, nu, basis=None):
    """Boundary decomposition (s_bar, u_hat, u_bar, W) of a 3D state.

    W = S nu and u_bar are the tangential 2-vectors in the given orthonormal
    basis of V_a (built deterministically when omitted); s_bar is the scalar
    of S_bar = Pi S Pi with respect to J_a (positive rotation about the
    outward normal).
    """
    nu = np.asarray(nu, float)
    t1, t2 = basis if basis is not None else _tangent_basis_3d(nu)
    u_hat = float(state.u @ nu)
    u_bar = np.array([state.u @ t1, state.u @ t2])
    Wv = state.S @ nu
    W = np.array([Wv @ t1, Wv @ t2])
    S_bar = state.S - wedge(nu, Wv)
    nu_out = -nu
    s_bar = float((S_bar @ t1) @ np.cross(nu_out, t1))
    return s_bar, u_hat, u_bar, W


def collide_3d(state: NoSlipState3D, nu, inertia: InertiaParams, require_incoming=True):
    """No-slip collision in space, via the boundary block decomposition.

    s_bar is fixed, u_hat flips, and (u_bar, W) undergo the
    [[c, s],[s, -c]] block componentwise.  The state is reassembled from the
    decomposition; agreement with :func:`collide_general` is a test contract.
    """
    nu = np.asarray(nu, float)
    basis = _tangent_basis_3d(nu)
    t1, t2 = basis
    s_bar, u_hat, u_bar, W = decompose_3d(state, nu, basis)
    _check_incoming(u_hat, require_incoming)
    c, sb = inertia.c_beta, inertia.s_beta
    u_bar_new = c * u_bar + sb * W
    W_new = sb * u_bar - c * W
    u_new = -u_hat * nu + u_bar_new[0] * t1 + u_bar_new[1] * t2
    Wv_new = W_new[0] * t1 + W_new[1] * t2
    S_new = s_bar * hat(-nu) + wedge(nu, Wv_new)
    return NoSlipState3D(state.x.copy(), u_new, S_new)


def collide_general(S, u, nu, inertia: InertiaParams, require_incoming=False):
    """No-slip collision map on (S, u) in any dimension n >= 2.

    C(S, u) = (S_bar + nu ^ (s_b u_bar - c W), -u_hat nu + c u_bar + s_b W)
    with W = S nu, u_bar the tangential part of u, S_bar = S - nu ^ W.
    """
    S = np.asarray(S, float)
    u = np.asarray(u, float)
    nu = np.asarray(nu, float)
    if abs(nu @ nu - 1.0) > 1e-12:
        raise DomainError("nu must be a unit vector")
    u_hat = float(u @ nu)
    _check_incoming(u_hat, require_incoming)
    u_bar = u - u_hat * nu
    W = S @ nu
    S_bar = S - wedge(nu, W)
    c, sb = inertia.c_beta, inertia.s_beta
    S_new = S_bar + wedge(nu, sb * u_bar - c * W)
    u_new = -u_hat * nu + c * u_bar + sb * W
    return S_new, u_new


def collide_general_batch(S, u, nu, inertia: InertiaParams):
    """Vectorized :func:`collide_general` over leading batch axes."""
    S = np.asarray(S, float)
    u = np.asarray(u, float)
    nu = np.asarray(nu, float)
    u_hat = np.einsum("...i,...i->...", u, nu)[..., None]
    u_bar = u - u_hat * nu
    W = np.einsum("...ij,...j->...i", S, nu)
    wedge_nu_W = np.einsum("...i,...j->...ji", nu, W) - np.einsum("...i,...j->...ij", nu, W)
    S_bar = S - wedge_nu_W
    c, sb = inertia.c_beta, inertia.s_beta
    y = sb * u_bar - c * W
    wedge_nu_y = np.einsum("...i,...j->...ji", nu, y) - np.einsum("...i,...j->...ij", nu, y)
    return S_bar + wedge_nu_y, -u_hat * nu + c * u_bar + sb * W


# ---------------------------------------------------------------------------
# Free flight with exact boundary-event detection
# ---------------------------------------------------------------------------


@dataclass
class FlightOutcome:
    """Result of one flight segment.

    kind: "wall" (t, x, u at the wall; wall_index set), or "timeout".
    Corner and grazing conditions raise instead.
    """

    kind: str
    t: float
    x: np.ndarray
    u: np.ndarray
    wall_index: int | None = None


def _real_roots(coeffs):
    """Real roots of a polynomial given lowest-order-first coefficients."""
    coeffs = np.asarray(coeffs, float)
    scale = np.max(np.abs(coeffs))
    if scale == 0.0:
        return np.empty(0)
    c = np.trim_zeros(coeffs / scale, "b")
    if len(c) <= 1:
        return np.empty(0)
    roots = P.polyroots(c)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return np.sort(real)


def _polish_root(coeffs, t):
    """A few Newton steps on the polynomial; deterministic."""
    dcoeffs = P.polyder(coeffs)
    for _ in range(4):
        f = P.polyval(t, coeffs)
        df = P.polyval(t, dcoeffs)
        if df == 0.0:
            break
        t = t - f / df
    return t


def _wall_gap_poly(wall, x0, u, acc):
    """Coefficients (lowest first) of the signed gap f(t); f < 0 inside the region."""
    if isinstance(wall, LineWall):
        return np.array(
            [
                float((x0 - wall.p0) @ wall.e1),
                float(u @ wall.e1),
                0.5 * float(acc @ wall.e1),
            ]
        )
    # circle: sigma * (|x(t) - c|^2 - R^2)
    d0 = x0 - wall.center
    out = P.polymul([-wall.radius**2], [1.0])
    for i in range(2):
        comp = np.array([d0[i], u[i], 0.5 * acc[i]])
        out = P.polyadd(out, P.polymul(comp, comp))
    return wall.orientation * out


def _timeout_outcome(x, u, acc, max_time) -> FlightOutcome:
    """Flight outcome when no wall is reached; state evaluated at a finite horizon."""
    if not math.isfinite(max_time):
        return FlightOutcome("timeout", math.inf, np.array(x, float), np.array(u, float))
    t = max_time
    return FlightOutcome("timeout", t, x + u * t + 0.5 * acc * t * t, u + acc * t)


def _first_wall_hit(section: CrossSection, x0, u, acc, horizon, t_floor=1e-12):
    """Earliest boundary crossing among all walls; None if none before horizon.

    Returns (t, wall_index, hit_point).  Crossings require the gap function
    to increase through zero (leaving the region).  Raises CornerEventError
    for hits at segment corners.
    """
    best = None
    for i, w in enumerate(section.walls):
        coeffs = _wall_gap_poly(w, x0, u, acc)
        dcoeffs = P.polyder(coeffs)
        for t in _real_roots(coeffs):
            if t <= t_floor or t > horizon:
                continue
            t = _polish_root(coeffs, t)
            if t <= t_floor or t > horizon:
                continue
            if P.polyval(t, dcoeffs) <= 0.0:
                continue  # re-entering crossing, not a collision
            hit = x0 + u * t + 0.5 * acc * t * t
            if isinstance(w, LineWall) and w.span is not None:
                s, _ = w.locate(hit)
                if not w.in_span(s):
                    continue
            if best is None or t < best[0]:
                best = (t, i, hit)
            break  # roots sorted: first valid crossing per wall
    if best is None:
        return None
    t, i, hit = best
    w = section.walls[i]
    if isinstance(w, LineWall) and w.span is not None:
        s, _ = w.locate(hit)
        ctol = 1e-9 * max(1.0, w.span[1] - w.span[0])
        if s - w.span[0] < ctol or w.span[1] - s < ctol:
            raise CornerEventError(f"trajectory hit a corner at {hit}")
    return best


def _torus_wall_hit(section: CrossSection, x0, u, horizon):
    """Scatterer hit for the torus variant: straight flight with cell wrapping."""
    A = section.periodic_cell
    scat = section.walls[0]
    x = np.array(x0, float)
    base = 0.0
    speed = float(np.hypot(u[0], u[1]))
    if speed == 0.0:
        return None
    guard = 0
    while base < horizon and guard < 100000:
        guard += 1
        # time to leave the current cell
        t_cell = math.inf
        for k in range(2):
            if u[k] > 0:
                t_cell = min(t_cell, (A - x[k]) / u[k])
            elif u[k] < 0:
                t_cell = min(t_cell, (-A - x[k]) / u[k])
        hit = _first_wall_hit(
            CrossSection([scat]), x, u, np.zeros(2), min(t_cell, horizon - base)
        )
        if hit is not None:
            t, _, p = hit
            return base + t, 0, p, x + u * t  # unwrapped hit point also returned
        if t_cell >= horizon - base or not math.isfinite(t_cell):
            return None
        base += t_cell
        x = x + u * t_cell
        for k in range(2):
            if x[k] >= A:
                x[k] -= 2 * A
            elif x[k] <= -A:
                x[k] += 2 * A
    return None


class Billiard2D:
    """No-slip billiard in a planar cross-section, gravity g along -x2."""

    dim = 2

    def __init__(self, section: CrossSection, g: float = 0.0):
        self.section = section
        self.g = float(g)
        if section.periodic_cell is not None and g != 0.0:
            raise DomainError("gravity is not supported on the torus table")

    @property
    def acc(self):
        return np.array([0.0, -self.g])

    def boundary_normal(self, wall_index: int, a):
        e1, e2 = self.section.walls[wall_index].frame(self.section.walls[wall_index].locate(a)[0])
        return -e1

    def flight(self, state: NoSlipState2D, max_time: float) -> FlightOutcome:
        if self.section.periodic_cell is not None:
            hit = _torus_wall_hit(self.section, state.x, state.u, max_time)
            if hit is None:
                return _timeout_outcome(state.x, state.u, np.zeros(2), max_time)
            t, wi, p_wrapped, _ = hit
            return FlightOutcome("wall", t, p_wrapped, state.u.copy(), wi)
        hit = _first_wall_hit(self.section, state.x, state.u, self.acc, max_time)
        if hit is None:
            return _timeout_outcome(state.x, state.u, self.acc, max_time)
        t, wi, p = hit
        return FlightOutcome("wall", t, p, state.u + self.acc * t, wi)

    def collide(self, state: NoSlipState2D, wall_index: int, inertia: InertiaParams):
        nu = self.boundary_normal(wall_index, state.x)
        return collide_2d(state, nu, inertia), nu


class BilliardCylinder3D:
    """No-slip billiard in the cylinder C x R, gravity g along -x3.

    Axial gravity leaves the transversal flight untouched, so event times are
    those of the 2D cross-section problem.
    """

    dim = 3

    def __init__(self, section: CrossSection, g: float = 0.0):
        self.section = section
        self.g = float(g)

    def flight(self, state: NoSlipState3D, max_time: float) -> FlightOutcome:
        x2, u2 = state.x[:2], state.u[:2]
        if self.section.periodic_cell is not None:
            hit2 = _torus_wall_hit(self.section, x2, u2, max_time)
            hit = None if hit2 is None else (hit2[0], hit2[1], hit2[2])
        else:
            hit = _first_wall_hit(self.section, x2, u2, np.zeros(2), max_time)
        g = self.g
        if hit is None:
            return _timeout_outcome(state.x, state.u, np.array([0.0, 0.0, -g]), max_time)
        t, wi, p = hit
        x = np.array([p[0], p[1], state.x[2] + state.u[2] * t - 0.5 * g * t * t])
        u = np.array([u2[0], u2[1], state.u[2] - g * t])
        return FlightOutcome("wall", t, x, u, wi)

    def boundary_normal(self, wall_index: int, a):
        w = self.section.walls[wall_index]
        s, _ = w.locate(np.asarray(a, float)[:2])
        e1, _ = w.frame(s)
        return np.array([-e1[0], -e1[1], 0.0])

    def collide(self, state: NoSlipState3D, wall_index: int, inertia: InertiaParams):
        nu = self.boundary_normal(wall_index, state.x)
        return collide_3d(state, nu, inertia), nu


def flight(state, domain, max_time: float) -> FlightOutcome:
    """Free/parabolic flight to the first boundary event (or timeout)."""
    return domain.flight(state, max_time)


def chord_distance(a, b, origin=None) -> float:
    """Perpendicular distance of the line through a, b from the origin."""
    a = np.asarray(a, float)[:2]
    b = np.asarray(b, float)[:2]
    if origin is not None:
        a = a - np.asarray(origin, float)
        b = b - np.asarray(origin, float)
    chord = b - a
    norm = float(np.hypot(chord[0], chord[1]))
    if norm == 0.0:
        return float(np.hypot(a[0], a[1]))
    return abs(float(a[0] * b[1] - a[1] * b[0])) / norm


def billiard_trajectory(
    state,
    domain,
    inertia: InertiaParams,
    n_events: int,
    max_time: float = math.inf,
    t0: float = 0.0,
):
    """Alternate flight and collision for up to ``n_events`` boundary events.

    Returns (events, terminal) where each event is a dict with the event time,
    post-collision state, boundary decomposition magnitudes, energy, and the
    chord distance from the axis/origin.  ``terminal`` is one of
    "events", "time", "grazing", "corner".
    """
    events = []
    t = t0
    prev_x = state.x.copy()
    current = state.copy()
    terminal = "events"
    for k in range(n_events):
        horizon = max_time - (t - t0)
        if horizon <= 0:
            terminal = "time"
            break
        try:
            out = domain.flight(current, horizon)
        except CornerEventError:
            terminal = "corner"
            break
        if out.kind == "timeout":
            if math.isfinite(out.t):
                # ran out the clock mid-flight; keep the state at the horizon
                t += out.t
                current = type(current)(out.x, out.u, current.s if domain.dim == 2 else current.S)
                terminal = "time" if events else "timeout"
            else:
                terminal = "timeout"
            break
        t += out.t
        at_wall = type(current)(out.x, out.u, current.s if domain.dim == 2 else current.S)
        try:
            nu = domain.boundary_normal(out.wall_index, out.x)
            if domain.dim == 2:
                u_hat_in = float(out.u @ nu)
                if abs(u_hat_in) < GRAZING_TOL:
                    raise GrazingEventError(f"u_hat = {u_hat_in:.3e}")
                new = collide_2d(at_wall, nu, inertia)
                tau = rot90(nu)
                rec = {
                    "t": t,
                    "event": k,
                    "x": new.x.copy(),
                    "u": new.u.copy(),
                    "s": new.s,
                    "u_hat": float(new.u @ nu),
                    "u_bar_abs": abs(float(new.u @ tau)),
                    "W_abs": abs(new.s),
                    "s_bar": 0.0,
                    "E": new.energy(),
                    "wall": out.wall_index,
                    "chord_d": chord_distance(prev_x, out.x),
                }
            else:
                u_hat_in = float(out.u @ nu)
                if abs(u_hat_in) < GRAZING_TOL:
                    raise GrazingEventError(f"u_hat = {u_hat_in:.3e}")
                new = collide_3d(at_wall, nu, inertia)
                s_bar, u_hat, u_bar, W = decompose_3d(new, nu)
                rec = {
                    "t": t,
                    "event": k,
                    "x": new.x.copy(),
                    "u": new.u.copy(),
                    "S": new.S.copy(),
                    "u_hat": u_hat,
                    "u_bar_abs": float(np.linalg.norm(u_bar)),
                    "W_abs": float(np.linalg.norm(W)),
                    "s_bar": s_bar,
                    "E": new.energy(),
                    "wall": out.wall_index,
                    "chord_d": chord_distance(prev_x, out.x),
                }
        except GrazingEventError:
            terminal = "grazing"
            break
        except CornerEventError:
            terminal = "corner"
            break
        events.append(rec)
        prev_x = out.x.copy()
        current = new
    return events, terminal, current


# ---------------------------------------------------------------------------
# Projection and rolling-impact utilities
# ---------------------------------------------------------------------------


def project_axis(state: NoSlipState3D) -> NoSlipState2D:
    """Orthogonal projection of a cylinder state along the axis.

    Drops the axial components: (Pi u, Pi S Pi); the 2D spin scalar is the
    in-plane component of S.
    """
    s2 = float(state.S[1, 0])
    return NoSlipState2D(state.x[:2].copy(), state.u[:2].copy(), s2)


def rolling_impact(state: NoSlipState3D, nu, tau, gamma: float, tol: float = 1e-10) -> bool:
    """Rolling-impact test at a cylinder wall contact.

    True iff the contact-point velocity u - (S nu)/gamma has zero component
    along the cross-sectional tangent direction tau.  For gamma = 0 the spin
    carries no constraint and the test reduces to u . tau = 0.
    """
    nu = np.asarray(nu, float)
    tau = np.asarray(tau, float)
    if gamma == 0.0:
        return abs(float(state.u @ tau)) < tol
    v_c = state.u - (state.S @ nu) / gamma
    return abs(float(v_c @ tau)) < tol


def make_rolling_impact_state(x, u, nu, tau, gamma: float, s_bar: float = 0.0, W_axial: float = 0.0):
    """Build a 3D state satisfying the rolling-impact condition at (x, nu).

    The tangential component of W = S nu is forced to gamma * (u . tau); the
    axial W component and s_bar remain free parameters.
    """
    nu = np.asarray(nu, float)
    tau = np.asarray(tau, float)
    e3 = np.cross(-nu, tau)  # axis direction completing the V_a frame
    Wv = gamma * float(np.asarray(u, float) @ tau) * tau + W_axial * e3
    S = s_bar * hat(-nu) + wedge(nu, Wv)
    return NoSlipState3D(np.asarray(x, float), np.asarray(u, float), S)
