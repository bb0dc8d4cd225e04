"""Run configuration: JSON parsing, validation, and canonical serialization.

The configuration is a nested key/value document.  Unknown keys are rejected
with their full path; exactly one of gamma/beta/eta may be given, and the
resolved configuration carries all three for traceability.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

from .errors import ConfigError
from .geometry import make_section
from .inertia import InertiaParams, thin_shell_eta
from .integrate import IntegratorConfig

__all__ = ["RunConfig", "parse_config", "serialize_config"]

log = logging.getLogger("noslip")

_MODES = ("noslip", "roll3d", "roll4d", "experiment")

_GEOMETRY_KEYS = {
    "disc": {"R"},
    "strip": {"L"},
    "sinai": {"A", "scatter_radius", "scatter_center"},
    "sinai_torus": {"A", "scatter_radius"},
}

_INTEGRATOR_KEYS = {"rel_tol", "abs_tol", "max_step", "event_tol", "max_events",
                    "max_time", "method"}

_TOP_KEYS = {"mode", "geometry", "inertia", "inertia_resolved", "gravity", "initial",
             "integrator", "experiment", "sampling", "output"}

_BALL_DIM = {"noslip2d": 2, "noslip3d": 3, "roll3d": 3, "roll4d": 4}


def _reject_unknown(block: dict, allowed, path: str):
    for k in block:
        if k not in allowed:
            raise ConfigError(f"unknown key {path}.{k!r} (allowed: {sorted(allowed)})")


def _finite(x, path):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{path} must be a number, got {x!r}") from None
    if not math.isfinite(x):
        raise ConfigError(f"{path} must be finite, got {x!r}")
    return x


@dataclass
class RunConfig:
    """Validated, fully resolved run configuration."""

    mode: str
    geometry: dict
    inertia: InertiaParams
    gravity: float
    initial: dict
    integrator: IntegratorConfig
    experiment: dict = field(default_factory=dict)
    sample_dt: float | None = None
    out_dir: str = "."

    def section(self):
        geo = dict(self.geometry)
        geo.pop("cylinder", None)
        geo.pop("r", None)
        kind = geo.pop("kind")
        return make_section(kind, **geo)

    @property
    def ball_radius(self) -> float | None:
        return self.geometry.get("r")

    @property
    def effective_mode(self) -> str:
        if self.mode == "noslip":
            return "noslip3d" if self.geometry.get("cylinder") else "noslip2d"
        return self.mode

    def to_dict(self) -> dict:
        idict = {
            k: v
            for k, v in (
                ("rel_tol", self.integrator.rel_tol),
                ("abs_tol", self.integrator.abs_tol),
                ("max_step", self.integrator.max_step),
                ("event_tol", self.integrator.event_tol),
                ("max_events", self.integrator.max_events),
                ("max_time", self.integrator.max_time),
                ("method", self.integrator.method),
            )
            if v is not None and not (isinstance(v, float) and math.isinf(v))
        }
        out = {
            "mode": self.mode,
            "geometry": self.geometry,
            "inertia": {"gamma": self.inertia.gamma},
            "inertia_resolved": self.inertia.as_dict(),
            "gravity": self.gravity,
            "initial": self.initial,
            "integrator": idict,
        }
        if self.experiment:
            out["experiment"] = self.experiment
        if self.sample_dt is not None:
            out["sampling"] = {"dt": self.sample_dt}
        if self.out_dir != ".":
            out["output"] = {"dir": self.out_dir}
        return out


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "$")

    mode = doc.get("mode")
    if mode not in _MODES:
        raise ConfigError(f"$.mode must be one of {_MODES}, got {mode!r}")

    # geometry
    geo = dict(doc.get("geometry") or {})
    kind = geo.get("kind")
    if kind not in _GEOMETRY_KEYS:
        raise ConfigError(
            f"$.geometry.kind must be one of {sorted(_GEOMETRY_KEYS)}, got {kind!r}"
        )
    allowed = _GEOMETRY_KEYS[kind] | {"kind"}
    if mode == "noslip":
        allowed = allowed | {"cylinder"}
    if mode in ("roll3d", "roll4d", "experiment"):
        allowed = allowed | {"r"}
    _reject_unknown(geo, allowed, "$.geometry")
    for k, v in geo.items():
        if k in ("kind", "cylinder", "scatter_center"):
            continue
        geo[k] = _finite(v, f"$.geometry.{k}")
    if mode in ("roll3d", "roll4d") and "r" not in geo:
        raise ConfigError(f"$.geometry.r (ball radius) is required for mode {mode!r}")

    # inertia: exactly one of gamma/beta/eta
    iblock = doc.get("inertia") or {}
    _reject_unknown(iblock, {"gamma", "beta", "eta"}, "$.inertia")
    given = [k for k, v in iblock.items() if v is not None]
    if len(given) != 1:
        raise ConfigError(
            f"$.inertia must give exactly one of gamma/beta/eta, got {sorted(given)}"
        )
    key = given[0]
    inertia = getattr(InertiaParams, f"from_{key}")(_finite(iblock[key], f"$.inertia.{key}"))

    resolved = doc.get("inertia_resolved") or {}
    _reject_unknown(resolved, {"gamma", "beta", "eta"}, "$.inertia_resolved")
    for k, v in resolved.items():
        want = {"gamma": inertia.gamma, "beta": inertia.beta, "eta": inertia.eta}[k]
        if abs(_finite(v, f"$.inertia_resolved.{k}") - want) > 1e-12:
            raise ConfigError(
                f"$.inertia_resolved.{k} = {v!r} is inconsistent with $.inertia ({want!r})"
            )

    gravity = _finite(doc.get("gravity", 0.0), "$.gravity")
    if gravity < 0:
        raise ConfigError("$.gravity must be >= 0 (acceleration magnitude)")

    initial = doc.get("initial") or {}
    if mode != "experiment" and not initial:
        raise ConfigError(f"$.initial block is required for mode {mode!r}")

    iraw = dict(doc.get("integrator") or {})
    _reject_unknown(iraw, _INTEGRATOR_KEYS, "$.integrator")
    try:
        integ = IntegratorConfig(**iraw)
    except Exception as e:
        raise ConfigError(f"$.integrator: {e}") from None

    sampling = doc.get("sampling") or {}
    _reject_unknown(sampling, {"dt"}, "$.sampling")
    sample_dt = None
    if "dt" in sampling:
        sample_dt = _finite(sampling["dt"], "$.sampling.dt")
        if sample_dt <= 0:
            raise ConfigError("$.sampling.dt must be positive")

    experiment = dict(doc.get("experiment") or {})
    if mode == "experiment":
        _reject_unknown(experiment, {"name", "sweep", "horizon", "sample_dt", "skip_chords"},
                        "$.experiment")
        if "name" not in experiment:
            raise ConfigError("$.experiment.name is required for mode 'experiment'")

    outblock = doc.get("output") or {}
    _reject_unknown(outblock, {"dir"}, "$.output")
    out_dir = outblock.get("dir", ".")

    cfg = RunConfig(mode, geo, inertia, gravity, initial, integ, experiment,
                    sample_dt, out_dir)

    dim = _BALL_DIM.get(cfg.effective_mode)
    if dim is not None and inertia.eta > thin_shell_eta(dim) + 1e-12:
        log.warning(
            "eta=%.6g exceeds the thin-shell bound %.6g for a dimension-%d ball "
            "(yo-yo mass distribution)", inertia.eta, thin_shell_eta(dim), dim,
        )
    # geometry is constructible (raises DomainError otherwise)
    cfg.section()
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    """Canonical JSON form; parse(serialize(cfg)) resolves identically."""
    return json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"
