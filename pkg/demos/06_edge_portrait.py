"""Time and distance portraits of rolling around a circular edge (r = R = 1).

Each cell fixes the tangential center velocity w and the tangential spin s at
the moment the ball crosses from a flat face onto the rim; the normal entry
speed follows from the conserved transversal energy.  The fields show the
dwell time on the rim and the rim distance between entry and exit, including
the cells that return to the entry face (friendly rolls).
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from noslip.experiments import ExperimentSpec, run_experiment
from noslip.trace import write_trace

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

spec = ExperimentSpec(sweep={"n_grid": 41}, horizon=60.0)
trace, summary = run_experiment("edge_portrait", spec)
write_trace(trace, OUT / "edge_portrait.csv")
print(f"cells: {summary['through']} pass through, {summary['friendly']} friendly rolls, "
      f"{summary['stuck']} non-exiting")

w, s = trace.column("w"), trace.column("s")
T, ds, code = trace.column("T"), np.abs(trace.column("ds")), trace.column("exit")

fig, axes = plt.subplots(1, 2, figsize=(10.5, 4.6))
for ax, field, label in ((axes[0], ds, "rim distance to reentry"),
                         (axes[1], T, "time on the rim")):
    sc = ax.scatter(w, s, c=field, s=9, cmap="viridis", marker="s")
    friendly = code == 0
    ax.scatter(w[friendly], s[friendly], s=2, c="red", marker=".")
    fig.colorbar(sc, ax=ax, label=label)
    ax.set_xlabel("tangential velocity at crossing")
    ax.set_ylabel("tangential spin at crossing")
    ax.set_aspect("equal")
axes[0].set_title("red dots: friendly rolls (exit to entry face)")
fig.tight_layout()
fig.savefig(OUT / "edge_portrait.svg")
print(f"wrote {OUT / 'edge_portrait.csv'} and .svg")
