"""Escape from an unstable fixed point under the continuous-time dynamics.

Fixed points of the learning flow come in stable and unstable flavors
distinguished by the sign of the concavity indicator.  Starting at an
unstable one (indicator < 0) with Y nudged by 0.01, the trajectory first
moves away, drifts along the fixed-point manifold while the indicator
grows, and finally settles on a stable fixed point.
"""

import numpy as np

from memgame import (
    GameSpec,
    LearnConfig,
    MemoryConfig,
    Payoff4,
    classify_fixed_point,
    run_continuous,
)
from memgame.analytic_2x2 import table_profile

matching_pennies = GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))
u = Payoff4.from_spec(matching_pennies)

x_star = [0.2, 0.3, 0.7, 0.8]
print("starting point classification:",
      classify_fixed_point(x_star, 0.5, u).classification)

x0, y0 = table_profile(x_star, 0.5 + 1e-2)
cfg = LearnConfig(rk4_h=2e-2, t_end=400.0, record_every=200)
traj = run_continuous(x0, y0, matching_pennies, MemoryConfig(1, 0), cfg)

print("\n   t        KL            indicator")
for i in range(len(traj)):
    print(f"{traj.times[i]:6.1f}   {traj.kl[i]:.6e}   {traj.indicator[i]:+.4f}")

final = classify_fixed_point(traj.final_x[:, 0], traj.final_y[0, 0], u, tol=1e-6)
print("\nKL first grew from", f"{traj.kl[0]:.2e}", "to a peak of",
      f"{traj.kl.max():.2e}", "before collapsing to", f"{traj.final_kl:.2e}")
print("final point classification:", final.classification)
