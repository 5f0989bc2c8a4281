"""Discrete gradient-ascent learning with asymmetric memories.

Both players repeatedly probe their stationary payoff with normalized
finite differences and apply multiplicative updates.  With X holding one
round of memory and Y none, the run converges to the game's mixed
equilibrium; the script prints the KL distance as it collapses.
"""

import numpy as np

from memgame import (
    GameSpec,
    LearnConfig,
    MemoryConfig,
    concavity_indicator,
    run_discretized,
    sample_interior_strategy,
)

matching_pennies = GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))
mem = MemoryConfig(1, 0)

rng = np.random.default_rng(42)
x0 = sample_interior_strategy(rng, 4, 2)
y0 = sample_interior_strategy(rng, 1, 2)
print("initial x table:\n", x0)
print("initial y:", y0[0])

cfg = LearnConfig(eta=1e-3, gamma=1e-6, steps=60_000, record_every=5_000)
traj = run_discretized(x0, y0, matching_pennies, mem, cfg)

print("\n step      u_st          KL-to-equilibrium   indicator")
for i in range(len(traj)):
    print(f"{int(traj.times[i]):>6d}  {traj.u_st[i]:+.6e}   {traj.kl[i]:.6e}   "
          f"{traj.indicator[i]:+.4f}")

print("\nfinal marginals:", traj.x_marg[-1], traj.y_marg[-1])
print("final indicator (positive = stable equilibrium reached):",
      concavity_indicator(traj.final_x[:, 0]))
