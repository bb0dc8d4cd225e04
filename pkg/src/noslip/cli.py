"""Command-line entry point.

Subcommands: ``simulate <config>``, ``experiment <name> <config>``,
``check <config>``, ``plot <csv>``.  Exit codes: 0 success, 2 configuration
errors, 3 dynamics errors (corner/grazing/focal/stiffness), 4 timeouts.
The pipeline is deterministic: no randomness is used anywhere (--seedless
documents this), and CSV headers reproduce the resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .billiards import (
    Billiard2D,
    BilliardCylinder3D,
    NoSlipState2D,
    NoSlipState3D,
    billiard_trajectory,
    collide_general_batch,
    spin_matrix_3d,
)
from .config import RunConfig, parse_config, serialize_config
from .errors import ConfigError, NoSlipError
from .experiments import EXPERIMENTS, ExperimentSpec, run_experiment
from .geometry import TubeChart, stadium_profile, ArclengthProfile
from .integrate import energy_monitor
from .rolling import RollState, roll3d_trajectory, roll4d_trajectory
from .trace import EventTrace, events_to_trace, write_trace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DYNAMICS = 3
EXIT_TIMEOUT = 4

_DYNAMIC_TERMINALS = {"grazing", "corner"}


def _out_dir(cfg_dir: str, cli_dir: str | None) -> Path:
    # precedence: CLI flag > env var > config block
    d = cli_dir or os.environ.get("NOSLIP_OUT_DIR") or cfg_dir
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_config(path: str, tol: str | None) -> RunConfig:
    cfg = parse_config(Path(path).read_text())
    if tol:
        try:
            rel, abs_ = (float(x) for x in tol.split(","))
        except ValueError:
            raise ConfigError(f"--tol expects REL,ABS, got {tol!r}") from None
        cfg.integrator = cfg.integrator.with_(rel_tol=rel, abs_tol=abs_)
    return cfg


def _simulate(cfg: RunConfig, out_dir: Path) -> int:
    meta = cfg.to_dict()
    mode = cfg.effective_mode
    section = cfg.section()
    code = EXIT_OK

    if mode in ("noslip2d", "noslip3d"):
        init = cfg.initial
        if mode == "noslip2d":
            domain = Billiard2D(section, g=cfg.gravity)
            state = NoSlipState2D(init["x"], init["u"], init.get("s", 0.0))
        else:
            domain = BilliardCylinder3D(section, g=cfg.gravity)
            S = spin_matrix_3d(*init.get("S", (0.0, 0.0, 0.0)))
            state = NoSlipState3D(init["x"], init["u"], S)
        events, terminal, _ = billiard_trajectory(
            state, domain, cfg.inertia, cfg.integrator.max_events,
            max_time=cfg.integrator.max_time,
        )
        trace = events_to_trace(events, domain.dim, meta, terminal)
    elif mode == "roll4d":
        init = cfg.initial
        if init.get("region", "flat+") == "curved":
            state = RollState.curved(init.get("wall", 0), init["s"], init["phi"],
                                     init.get("x3", 0.0), init["v"], init["S"])
        else:
            sheet = 1 if init.get("region", "flat+") == "flat+" else -1
            state = RollState.flat(sheet, init["p"], init.get("x3", 0.0),
                                   init["u"], init.get("u3", 0.0),
                                   init.get("S", (0.0, 0.0, 0.0)))
        samples, phases, terminal, _ = roll4d_trajectory(
            state, section, cfg.ball_radius, cfg.inertia, g=cfg.gravity,
            max_time=cfg.integrator.max_time, config=cfg.integrator,
            sample_dt=cfg.sample_dt or 0.01,
        )
        a = samples.arrays()
        trace = EventTrace(["t", "region", "x1", "x2", "x3", "E1", "E2", "E", "H"],
                           meta, terminal)
        for i in range(len(a["t"])):
            trace.append([a[k][i] for k in ("t", "region", "x1", "x2", "x3",
                                            "E1", "E2", "E", "H")])
    elif mode == "roll3d":
        init = cfg.initial
        if section.kind == "strip":
            profile = stadium_profile(section.L, cfg.ball_radius)
        elif section.kind == "disc":
            # tube cross-section around the disc rim at distance r
            R = section.R + cfg.ball_radius
            profile = ArclengthProfile([(2 * np.pi * R, -1.0 / R)])
        else:
            raise ConfigError(f"roll3d supports strip/disc sections, not {section.kind}")
        y0 = [init.get("ell", 0.0), init.get("z", 0.0), init["v1"],
              init.get("v2", 0.0), init.get("spin", 0.0)]
        dt = cfg.sample_dt or 0.01
        t_eval = np.arange(0.0, cfg.integrator.max_time + dt / 2, dt)
        ts, ys = roll3d_trajectory(y0, profile, cfg.inertia, g=cfg.gravity,
                                   t_final=cfg.integrator.max_time,
                                   t_eval=t_eval, config=cfg.integrator)
        trace = EventTrace(["t", "ell", "z", "v1", "v2", "spin", "E"], meta, "time")
        for t, y in zip(ts, ys):
            E = 0.5 * (y[2] ** 2 + y[3] ** 2 + y[4] ** 2)
            trace.append([t, y[0], y[1], y[2], y[3], y[4], E])
    else:
        raise ConfigError(f"mode {cfg.mode!r} is not runnable by 'simulate'")

    path = out_dir / f"{mode}.csv"
    write_trace(trace, path)
    print(f"wrote {path} ({len(trace)} rows, terminal={trace.terminal})")
    if trace.terminal in _DYNAMIC_TERMINALS:
        code = EXIT_DYNAMICS
    elif trace.terminal == "timeout":
        code = EXIT_TIMEOUT
    return code


def _experiment(name: str, cfg: RunConfig, out_dir: Path) -> int:
    exp = dict(cfg.experiment)
    exp.pop("name", None)
    spec = ExperimentSpec(
        name=name,
        geometry=cfg.geometry,
        inertia={"gamma": cfg.inertia.gamma},
        g=cfg.gravity,
        initial=cfg.initial,
        sweep=exp.get("sweep", {}),
        horizon=exp.get("horizon"),
        sample_dt=exp.get("sample_dt", cfg.sample_dt),
    )
    trace, summary = run_experiment(name, spec)
    path = out_dir / f"{name}.csv"
    write_trace(trace, path)
    print(f"wrote {path} ({len(trace)} rows)")
    print(json.dumps(_jsonable(summary), indent=2, sort_keys=True, default=str))
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _check(cfg: RunConfig) -> int:
    """Invariant suite on the configured inertia and geometry."""
    rng = np.random.default_rng(20240117)  # fixed seed: deterministic sampling
    iner = cfg.inertia
    ok = True

    def report(name, err, tol):
        nonlocal ok
        good = err < tol
        ok = ok and good
        print(f"{'PASS' if good else 'FAIL'} {name}: max residual {err:.3e} (tol {tol:.1e})")

    for n in (2, 3, 4):
        N = 2000
        A = rng.normal(size=(N, n, n))
        S = A - np.transpose(A, (0, 2, 1))
        u = rng.normal(size=(N, n))
        nu = rng.normal(size=(N, n))
        nu /= np.linalg.norm(nu, axis=1, keepdims=True)
        S2, u2 = collide_general_batch(S, u, nu, iner)
        S3, u3 = collide_general_batch(S2, u2, nu, iner)
        inv = max(np.max(np.abs(S3 - S)), np.max(np.abs(u3 - u)))
        report(f"involution n={n}", inv, 1e-12)
        e_in = 0.5 * np.einsum("kij,kij->k", S, S) + np.einsum("ki,ki->k", u, u)
        e_out = 0.5 * np.einsum("kij,kij->k", S2, S2) + np.einsum("ki,ki->k", u2, u2)
        report(f"energy n={n}", float(np.max(np.abs(e_out - e_in))), 1e-12)

    if cfg.effective_mode in ("roll3d", "roll4d") and cfg.ball_radius:
        section = cfg.section()
        chart = TubeChart(section, 0, cfg.ball_radius)
        res = chart.frame_check(0.1, 1.0, 0.0, h=1e-4)
        report("frame calculus", max(res.values()), 1e-6)
    print("all checks passed" if ok else "some checks FAILED")
    return EXIT_OK if ok else 1


def _plot(csv_path: str, out: str | None) -> int:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .trace import read_trace

    tr = read_trace(csv_path)
    out = out or str(Path(csv_path).with_suffix(".svg"))
    fig, ax = plt.subplots(figsize=(7, 4.2))
    cols = tr.columns
    if {"w", "s", "T"} <= set(cols):  # edge portrait heat map
        w, s, T = tr.column("w"), tr.column("s"), tr.column("T")
        sc = ax.scatter(w, s, c=T, s=14, cmap="viridis", marker="s")
        fig.colorbar(sc, ax=ax, label="dwell time")
        ax.set_xlabel("tangential velocity")
        ax.set_ylabel("tangential spin")
    else:
        t = tr.column("t")
        ycol = next((c for c in ("x3", "z", "x2", "E") if c in cols), cols[-1])
        sweep = next((c for c in ("eta", "r", "scale") if c in cols), None)
        if sweep:
            vals = np.unique(tr.column(sweep))
            for v in vals:
                m = tr.column(sweep) == v
                ax.plot(t[m], tr.column(ycol)[m], lw=0.9, label=f"{sweep}={v:g}")
            ax.legend(fontsize=8)
        else:
            ax.plot(t, tr.column(ycol), lw=0.9)
        ax.set_xlabel("t")
        ax.set_ylabel(ycol)
    ax.set_title(tr.meta.get("experiment", Path(csv_path).stem))
    fig.tight_layout()
    fig.savefig(out)
    print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="noslip",
        description="No-slip billiard and nonholonomic rolling simulations",
    )
    parser.add_argument("--version", action="version", version=f"noslip {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", help="output directory (overrides config and env)")
        p.add_argument("--tol", help="REL,ABS integrator tolerance override")
        p.add_argument("--seedless", action="store_true",
                       help="assert the run uses no randomness (always true; documents determinism)")

    p_sim = sub.add_parser("simulate", help="run one trajectory from a config file")
    p_sim.add_argument("config")
    add_common(p_sim)

    p_exp = sub.add_parser("experiment", help="run a named experiment")
    p_exp.add_argument("name", choices=sorted(EXPERIMENTS))
    p_exp.add_argument("config")
    add_common(p_exp)

    p_chk = sub.add_parser("check", help="run the invariant suite on a config")
    p_chk.add_argument("config")
    add_common(p_chk)

    p_plot = sub.add_parser("plot", help="render a static SVG from a result CSV")
    p_plot.add_argument("csv")
    p_plot.add_argument("--out", help="output SVG path")

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")

    try:
        if args.command == "plot":
            return _plot(args.csv, args.out)
        cfg = _load_config(args.config, getattr(args, "tol", None))
        if args.command == "check":
            return _check(cfg)
        out_dir = _out_dir(cfg.out_dir, args.out)
        (out_dir / "resolved_config.json").write_text(serialize_config(cfg))
        if args.command == "simulate":
            return _simulate(cfg, out_dir)
        return _experiment(args.name, cfg, out_dir)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NoSlipError as e:
        print(f"dynamics error: {e}", file=sys.stderr)
        return EXIT_DYNAMICS


if __name__ == "__main__":
    sys.exit(main())
