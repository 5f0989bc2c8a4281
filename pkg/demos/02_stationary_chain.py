"""The Markov chain induced by conditional strategies, and its stationary state.

Shows the transition matrix of a (1,0)-memory profile, the factorization
of its stationary distribution, and the marginalized strategies for a
two-memory player.
"""

import numpy as np

from memgame import (
    GameSpec,
    MemoryConfig,
    analyze_stationary,
    build_transition_matrix,
    conditional_marginalized_x,
    current_pair_marginal,
    marginal_formula,
    sample_interior_strategy,
    stationary_distribution,
)

matching_pennies = GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))

print("== one-memory X against a memoryless Y ==")
mem = MemoryConfig(1, 0)
xv = np.array([0.8, 0.6, 0.4, 0.2])
x = np.column_stack([xv, 1 - xv])
y = np.array([[0.5, 0.5]])
M = build_transition_matrix(x, y, matching_pennies, mem)
print("transition matrix (columns = from-state a1b1, a1b2, a2b1, a2b2):")
print(M)
p = stationary_distribution(M)
xs = marginal_formula(xv, 0.5)
print(f"stationary distribution p = {p}")
print(f"factorization (x_st, 1-x_st) x (y, 1-y) with x_st = {xs}:")
print(np.outer([xs, 1 - xs], [0.5, 0.5]).ravel())

print("\n== a two-memory X: the chain has 16 states ==")
rng = np.random.default_rng(0)
mem2 = MemoryConfig(2, 1)
x2 = sample_interior_strategy(rng, 16, 2)
y2 = sample_interior_strategy(rng, 4, 2)
res = analyze_stationary(x2, y2, matching_pennies, mem2)
print(f"stationary payoff u_st = {res.u_st:+.6f} (and v_st = {res.v_st:+.6f})")
print(f"X's marginalized strategy: {res.x_marg}")
print(f"Y's marginalized strategy: {res.y_marg}")
print("X's strategy marginalized to Y's one-round memory resolution:")
print(conditional_marginalized_x(x2, res.p_st, mem2, 2))
print("stationary distribution of the newest action pair:")
print(current_pair_marginal(res.p_st, mem2, 2))
