"""Adaptive explicit Runge-Kutta stepping with event localization.

Thin, deterministic wrapper over scipy's Dormand-Prince pairs (RK45 = 5(4),
DOP853 = 8(5,3)).  Event times are localized on the dense output by scipy's
bracketing root finder; conservation is monitored, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StiffnessError

__all__ = ["IntegratorConfig", "EventResult", "integrate_to_event", "energy_monitor"]


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and limits shared by all flows.

    ``method`` must be an explicit adaptive Dormand-Prince pair; identical
    inputs give bit-identical trajectories on one platform.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = np.inf
    event_tol: float = 1e-12
    max_events: int = 10_000
    max_time: float = 1e6
    method: str = "DOP853"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_step <= 0:
            raise DomainError("max_step must be positive")
        if self.method not in ("RK45", "DOP853"):
            raise DomainError(f"unsupported method {self.method!r}")

    def with_(self, **kw) -> "IntegratorConfig":
        return replace(self, **kw)


@dataclass
class EventResult:
    """Outcome of :func:`integrate_to_event`.

    ``event_id`` is the index of the triggered crossing function, or None on
    timeout (integration ran to ``t_span`` end without an event).
    ``sol`` is the dense-output solution over [t0, t]; ``t_grid``/``y_grid``
    hold optional uniform samples collected along the way.
    """

    t: float
    y: np.ndarray
    event_id: int | None
    sol: object = None
    t_grid: np.ndarray = field(default_factory=lambda: np.empty(0))
    y_grid: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    @property
    def timed_out(self) -> bool:
        return self.event_id is None


def integrate_to_event(rhs, y0, events, config=None, t0=0.0, t_max=None, t_eval=None):
    """Integrate y' = rhs(t, y) until the first event crossing.

    ``events`` is a sequence of (g, direction) pairs; g(t, y) is a scalar
    crossing function and direction in {-1, 0, +1} restricts the sign change
    (scipy semantics).  Deterministic for fixed inputs.

    Returns an :class:`EventResult`; ``event_id`` None means no event fired
    before ``t_max`` (timeout).  Raises StiffnessError if the stepper fails.
    """
    config = config or IntegratorConfig()
    if t_max is None:
        t_max = t0 + config.max_time
    if t_max <= t0:
        raise DomainError("t_max must exceed t0")

    ev_funcs = []
    for g, direction in events:
        def wrapped(t, y, _g=g):
            return _g(t, y)

        wrapped.terminal = True
        wrapped.direction = direction
        ev_funcs.append(wrapped)

    sol = solve_ivp(
        rhs,
        (t0, t_max),
        np.asarray(y0, float),
        method=config.method,
        rtol=config.rel_tol,
        atol=config.abs_tol,
        max_step=config.max_step,
        events=ev_funcs,
        dense_output=True,
        t_eval=t_eval,
    )
    if not sol.success and sol.status != 1:
        raise StiffnessError(f"integrator failed: {sol.message}")

    t_grid = sol.t if t_eval is not None else np.empty(0)
    y_grid = sol.y.T if t_eval is not None else np.empty((0, 0))

    if sol.status == 1:  # an event fired
        for k, (te, ye) in enumerate(zip(sol.t_events, sol.y_events)):
            if len(te):
                return EventResult(float(te[0]), np.array(ye[0]), k, sol.sol, t_grid, y_grid)
    return EventResult(float(sol.t[-1]), np.array(sol.y[:, -1]), None, sol.sol, t_grid, y_grid)


def energy_monitor(v, S, x3=0.0, g=0.0):
    """Energy split of a rolling state in frame components (m = 1).

    v = (v1, v2, v3), S = (S12, S13, S23).  Returns
    (E1, E2, E_total, E_total + g*x3): transversal energy, longitudinal
    energy, their sum, and the conserved total including potential.
    """
    v1, v2, v3 = v
    s12, s13, s23 = S
    e1 = 0.5 * (v1 * v1 + v2 * v2 + s12 * s12)
    e2 = 0.5 * (v3 * v3 + s13 * s13 + s23 * s23)
    return e1, e2, e1 + e2, e1 + e2 + g * x3
