"""The no-slip collision map and its structure.

A ball with moment-of-inertia parameter gamma bounces off a wall: the normal
velocity flips, while the tangential velocity and the matching spin components
mix through a rotation-like block controlled by the characteristic angle beta.
This script prints the block for a few gamma values and verifies the defining
properties numerically.
"""

import numpy as np

from noslip import InertiaParams, collide_general
from noslip.billiards import collide_general_batch

rng = np.random.default_rng(1)

print("collision block [[c, s], [s, -c]] per gamma:")
for gamma in (0.0, 0.5, 1.0 / np.sqrt(2.0), 1.0, 2.0):
    p = InertiaParams.from_gamma(gamma)
    print(f"  gamma={gamma:.4f}  beta={p.beta:.4f}  c={p.c_beta:+.4f}  s={p.s_beta:+.4f}"
          f"  eta={p.eta:.4f}")

print("\nproperties on 10000 random 3D states (gamma = 0.8):")
iner = InertiaParams.from_gamma(0.8)
A = rng.normal(size=(10000, 3, 3))
S = A - np.transpose(A, (0, 2, 1))
u = rng.normal(size=(10000, 3))
nu = rng.normal(size=(10000, 3))
nu /= np.linalg.norm(nu, axis=1, keepdims=True)

S1, u1 = collide_general_batch(S, u, nu, iner)
S2, u2 = collide_general_batch(S1, u1, nu, iner)
print("  involution C(C(x)) = x:     ", np.max(np.abs(S2 - S)), np.max(np.abs(u2 - u)))

norm = lambda S_, u_: np.sqrt(0.5 * np.einsum("kij,kij->k", S_, S_) + np.einsum("ki,ki->k", u_, u_))
print("  kinetic-norm preservation:  ", np.max(np.abs(norm(S1, u1) - norm(S, u))))

u_roll = np.einsum("kij,kj->ki", S, nu) / iner.gamma  # contact point at rest
S3, u3 = collide_general_batch(S, u_roll, nu, iner)
print("  rolling states are fixed:   ", np.max(np.abs(u3 - u_roll)))

print("\nsingle collision, head-on with no spin (specular, no spin generated):")
S0 = np.zeros((3, 3))
nu0 = np.array([0.0, 0.0, 1.0])
S_out, u_out = collide_general(S0, np.array([0.0, 0.0, -2.0]), nu0, iner)
print("  u:", u_out, " S:", np.max(np.abs(S_out)))
