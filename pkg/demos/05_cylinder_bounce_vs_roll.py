"""3D no-slip ball in a vertical circular cylinder under gravity.

Left: a first collision satisfying the rolling-impact condition produces a
skipping motion whose height tracks the harmonic vertical oscillation of the
classical rolling ball.  Right: without that condition the height falls in a
zig-zag; shrinking the bounce steps accelerates the descent and shrinks the
wiggle (the conjectured dissipative limit).
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from noslip import (
    BilliardCylinder3D,
    DiscSection,
    InertiaParams,
    billiard_trajectory,
    make_rolling_impact_state,
)
from noslip.experiments import ExperimentSpec, run_experiment
from noslip.geometry import ArclengthProfile
from noslip.rolling import roll3d_trajectory

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

iner = InertiaParams.from_gamma(np.sqrt(0.4))  # uniform 3D ball
dom = BilliardCylinder3D(DiscSection(1.0), g=1.0)
nu = np.array([-1.0, 0.0, 0.0])
tau = np.array([0.0, -1.0, 0.0])

# rolling-impact start with a small normal component: skipping that tracks rolling
st = make_rolling_impact_state([1.0, 0.0, 0.0], 0.8 * tau + 0.15 * nu, nu, tau, iner.gamma)
events, _, _ = billiard_trajectory(st, dom, iner, 10**6, max_time=60.0)
t_b = np.array([e["t"] for e in events])
z_b = np.array([e["x"][2] for e in events])

# the classical rolling ball on the same wall (transversal speed 0.8).  The
# billiard flight feels the raw gravity g; in the rolling equations the
# constraint rescales the tangential force by 1/(1+gamma^2), so the matched
# run uses that effective value.
profile = ArclengthProfile([(2 * np.pi, 1.0)])  # center circle radius 1, concave wall
t_eval = np.linspace(0.0, 60.0, 1201)
ts, ys = roll3d_trajectory([0.0, 0.0, 0.8, 0.0, 0.0], profile, iner,
                           g=1.0 / (1.0 + iner.gamma**2),
                           t_final=60.0, t_eval=t_eval)

fig, axes = plt.subplots(1, 2, figsize=(10, 4.2))
axes[0].plot(t_b, z_b, ".", ms=2.5, label="no-slip bounces (rolling impact)")
axes[0].plot(ts, ys[:, 1], lw=1.0, label="rolling ball")
axes[0].set_title("bounded: skipping tracks rolling")
axes[0].set_xlabel("t")
axes[0].set_ylabel("x3")
axes[0].legend(fontsize=8)

_, summary = run_experiment("zigzag_fall", ExperimentSpec(horizon=40.0))
trace, _ = run_experiment("zigzag_fall", ExperimentSpec(horizon=40.0))
sc, tt, zz = trace.column("scale"), trace.column("t"), trace.column("x3")
for scale in summary["scale"]:
    m = sc == scale
    axes[1].plot(tt[m], zz[m], lw=0.8, label=f"normal speed x {scale}")
axes[1].set_title("no rolling impact: accelerated zig-zag fall")
axes[1].set_xlabel("t")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "cylinder_bounce_vs_roll.svg")

print("zig-zag sequence (smaller steps fall faster with smaller wiggle):")
for s, r, a in zip(summary["scale"], summary["descent_rate"], summary["amplitude"]):
    print(f"  scale={s}: mean descent rate {r:.3f}, wiggle amplitude {a:.4f}")
print(f"wrote {OUT / 'cylinder_bounce_vs_roll.svg'}")
