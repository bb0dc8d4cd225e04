"""Height of a 4D ball rolling between two vertical plates, per inertia value.

Parameters: L = 1, r = 0.5, g = 5, v1(0) = 1, v3(0) = -1, S13(0) = -0.5.
With eta = 0 the height is the free-fall parabola; for any positive eta the
fall eventually rebounds and the height is periodic.  Near eta = 1 the period
grows beyond the plotted window.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from noslip.experiments import ExperimentSpec, run_experiment
from noslip.trace import write_trace

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

spec = ExperimentSpec(sweep={"eta": [0.0, 0.3, 0.577, 0.9, 0.999]}, horizon=60.0)
trace, summary = run_experiment("two_plates_height", spec)
write_trace(trace, OUT / "two_plates_height.csv")

fig, axes = plt.subplots(2, 3, figsize=(11, 5.5), sharex=True)
eta_col, t_col, x3_col = trace.column("eta"), trace.column("t"), trace.column("x3")
for ax, eta in zip(axes.flat, [0.0, 0.3, 0.577, 0.9, 0.999]):
    m = eta_col == eta
    ax.plot(t_col[m], x3_col[m], lw=0.8)
    rep = summary[eta]
    tag = "unbounded" if not rep["bounded"] else f"period ~ {rep['period']:.1f}"
    ax.set_title(f"eta = {eta} ({tag})", fontsize=9)
    print(f"eta={eta}: bounded={rep['bounded']} period={rep['period']:.3f} "
          f"envelope=({rep['envelope'][0]:.2f}, {rep['envelope'][1]:.2f})")
axes.flat[-1].axis("off")
for ax in axes[1]:
    ax.set_xlabel("t")
for ax in axes[:, 0]:
    ax.set_ylabel("x3")
fig.tight_layout()
fig.savefig(OUT / "two_plates_height.svg")
print(f"wrote {OUT / 'two_plates_height.csv'} and .svg")
