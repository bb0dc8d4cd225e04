"""Moment-of-inertia parametrizations and conversions between them.

Three equivalent dimensionless parameters describe a rotationally symmetric
mass distribution of a rolling/bouncing ball:

* ``gamma >= 0``      -- canonical parameter; gamma = 0 is the point-mass
  (slippery) limit.
* ``beta in [0, pi)`` -- characteristic collision angle, with
  cos(beta) = (1 - gamma^2)/(1 + gamma^2) and sin(beta) = 2*gamma/(1 + gamma^2),
  i.e. gamma = tan(beta/2).
* ``eta in [0, 1)``   -- rolling deformation parameter,
  eta = gamma / sqrt(1 + gamma^2).

A uniform ball in dimension n has gamma = sqrt(2/(n+2)); a thin shell has
eta = sqrt(2/(2+n)).  Values of eta above the thin-shell bound are physical
only for yo-yo-like mass distributions; they are accepted but flagged by the
configuration layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "InertiaParams",
    "beta_from_gamma",
    "eta_from_gamma",
    "gamma_from_eta",
    "match_inertia",
    "eta_from_noslip_gamma",
    "uniform_ball_gamma",
    "thin_shell_eta",
]


def _check_finite_nonneg(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {x!r}")
    return x


def beta_from_gamma(gamma: float) -> tuple[float, float]:
    """Return (cos(beta), sin(beta)) for the characteristic collision angle.

    The pair lies on the unit circle to machine precision.
    """
    gamma = _check_finite_nonneg(gamma, "gamma")
    d = 1.0 + gamma * gamma
    return (1.0 - gamma * gamma) / d, 2.0 * gamma / d


def eta_from_gamma(gamma: float) -> float:
    """eta = gamma / sqrt(1 + gamma^2), strictly increasing onto [0, 1)."""
    gamma = _check_finite_nonneg(gamma, "gamma")
    return gamma / math.hypot(1.0, gamma)


def gamma_from_eta(eta: float) -> float:
    """Inverse of :func:`eta_from_gamma`; requires eta in [0, 1)."""
    eta = float(eta)
    if not (0.0 <= eta < 1.0) or not math.isfinite(eta):
        raise DomainError(f"eta must lie in [0, 1), got {eta!r}")
    return eta / math.sqrt(1.0 - eta * eta)


def match_inertia(eta_roll: float) -> float:
    """Inertia matching between a rolling ball and the no-slip billiard one
    dimension lower.

    Solves cos(beta(gamma_n)) = cos(pi * eta_roll) for the unique
    gamma_n >= 0, i.e. beta = pi * eta_roll, gamma_n = tan(pi*eta_roll/2).
    """
    eta_roll = float(eta_roll)
    if not (0.0 <= eta_roll < 1.0) or not math.isfinite(eta_roll):
        raise DomainError(f"eta_roll must lie in [0, 1), got {eta_roll!r}")
    return math.tan(0.5 * math.pi * eta_roll)


def eta_from_noslip_gamma(gamma_noslip: float) -> float:
    """Inverse direction of :func:`match_inertia`: eta = beta/pi = 2*atan(gamma)/pi."""
    gamma_noslip = _check_finite_nonneg(gamma_noslip, "gamma_noslip")
    return 2.0 * math.atan(gamma_noslip) / math.pi


def uniform_ball_gamma(n: int) -> float:
    """gamma of a uniform mass distribution for a ball in dimension n."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return math.sqrt(2.0 / (n + 2.0))


def thin_shell_eta(n: int) -> float:
    """eta of a thin-shell mass distribution for a ball in dimension n."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    return math.sqrt(2.0 / (2.0 + n))


@dataclass(frozen=True)
class InertiaParams:
    """Immutable bundle of the three equivalent inertia parameters.

    ``gamma`` is canonical; ``c_beta``, ``s_beta`` and ``eta`` are derived on
    construction and kept for traceability in serialized output.
    """

    gamma: float
    c_beta: float
    s_beta: float
    eta: float

    @classmethod
    def from_gamma(cls, gamma: float) -> "InertiaParams":
        c, s = beta_from_gamma(gamma)
        return cls(float(gamma), c, s, eta_from_gamma(gamma))

    @classmethod
    def from_eta(cls, eta: float) -> "InertiaParams":
        return cls.from_gamma(gamma_from_eta(eta))

    @classmethod
    def from_beta(cls, beta: float) -> "InertiaParams":
        beta = float(beta)
        if not (0.0 <= beta < math.pi) or not math.isfinite(beta):
            raise DomainError(f"beta must lie in [0, pi), got {beta!r}")
        return cls.from_gamma(math.tan(0.5 * beta))

    @property
    def beta(self) -> float:
        return math.atan2(self.s_beta, self.c_beta)

    def as_dict(self) -> dict:
        return {"gamma": self.gamma, "beta": self.beta, "eta": self.eta}
