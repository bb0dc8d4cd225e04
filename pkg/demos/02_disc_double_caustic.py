"""Double caustic of the no-slip billiard in a disc.

Chords of an ordinary billiard in a disc are all tangent to one circle.  The
no-slip coupling makes the chord-to-chord map an involution on (tangential
velocity, spin), so the chords alternate between two tangent circles.  The
gamma = 0 control recovers the single caustic.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from noslip import Billiard2D, DiscSection, InertiaParams, NoSlipState2D, billiard_trajectory

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

dom = Billiard2D(DiscSection(1.0), g=0.0)
start = NoSlipState2D([0.3, 0.0], [0.5, 0.61], 0.37)

fig, axes = plt.subplots(1, 2, figsize=(9, 4.6))
for ax, gamma in zip(axes, (1.0 / np.sqrt(2.0), 0.0)):
    iner = InertiaParams.from_gamma(gamma)
    events, _, _ = billiard_trajectory(start.copy(), dom, iner, 120)
    pts = np.array([start.x] + [e["x"] for e in events])
    d = np.array([e["chord_d"] for e in events[1:]])
    ax.plot(pts[:, 0], pts[:, 1], lw=0.5, color="k")
    th = np.linspace(0, 2 * np.pi, 400)
    ax.plot(np.cos(th), np.sin(th), color="tab:blue")
    for radius, color in zip(sorted(set(np.round(d, 9))), ("tab:red", "tab:orange")):
        ax.plot(radius * np.cos(th), radius * np.sin(th), color=color, ls="--", lw=1.2)
    ax.set_aspect("equal")
    ax.set_title(f"gamma = {gamma:.3f}: {len(set(np.round(d, 9)))} caustic circle(s)")
    print(f"gamma={gamma:.3f}: chord distances cluster at {sorted(set(np.round(d, 6)))}")

fig.tight_layout()
fig.savefig(OUT / "disc_double_caustic.svg")
print(f"wrote {OUT / 'disc_double_caustic.svg'}")
