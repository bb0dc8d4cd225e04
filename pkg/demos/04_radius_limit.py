"""Convergence of the rolling system to its no-slip billiard as r -> 0.

Parameters: L = 1, eta = 0.39, g = 1, v1(0) = 1, v3(0) = -1, shrinking ball
radius.  The height series stabilize; the sup-norm differences of successive
series decrease monotonically.  The limit system is the planar no-slip
billiard between two plates with the matched parameter gamma = tan(pi*eta/2).
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from noslip.experiments import ExperimentSpec, run_experiment
from noslip.inertia import match_inertia
from noslip.trace import write_trace

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

spec = ExperimentSpec(sweep={"r": [0.4, 0.2, 0.1, 0.05, 0.025]}, horizon=20.0)
trace, summary = run_experiment("radius_limit", spec)
write_trace(trace, OUT / "radius_limit.csv")

print("pairwise sup-norm differences of successive height series:")
for (ra, rb), d in zip(zip(summary["r"][:-1], summary["r"][1:]), summary["sup_diffs"]):
    print(f"  |x3(r={ra}) - x3(r={rb})|_inf = {d:.4f}")
print(f"matched no-slip parameter gamma = {match_inertia(0.39):.5f}")

fig, ax = plt.subplots(figsize=(8, 4.2))
r_col, t_col, x3_col = trace.column("r"), trace.column("t"), trace.column("x3")
for r in summary["r"]:
    m = r_col == r
    ax.plot(t_col[m], x3_col[m], lw=0.8, label=f"r = {r}")
ax.set_xlabel("t")
ax.set_ylabel("x3")
ax.legend(fontsize=8)
ax.set_title("height series stabilize as the ball radius shrinks")
fig.tight_layout()
fig.savefig(OUT / "radius_limit.svg")
print(f"wrote {OUT / 'radius_limit.csv'} and .svg")
