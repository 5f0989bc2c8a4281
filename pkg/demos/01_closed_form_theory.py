"""Closed-form theory of the 2-action game with memory lengths (1, 0).

Walks through the exact objects the library provides for this setting:
the memoryless equilibrium, the stationary marginal of a one-memory
strategy, the learning vector field, and the stability classification of
fixed points.
"""

import numpy as np

from memgame import (
    GameSpec,
    Payoff4,
    classify_fixed_point,
    concavity_indicator,
    marginal_formula,
    numeric_jacobian,
    original_nash,
    vector_field,
)

matching_pennies = GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))
u = Payoff4.from_spec(matching_pennies)

print("== memoryless equilibrium ==")
nash = original_nash(u)
print(f"matching pennies: x_o={nash.x_o}, y_o={nash.y_o}, value={nash.u_o}")
nash2 = original_nash(Payoff4(2.0, -1.0, -1.0, 0.0))
print(f"payoffs (2,-1,-1,0): x_o={nash2.x_o}, y_o={nash2.y_o}, value={nash2.u_o}")

print("\n== stationary marginal of a one-memory strategy ==")
x = [0.8, 0.6, 0.4, 0.2]   # P(first action | last round was a1b1, a1b2, a2b1, a2b2)
y = 0.5
print(f"x = {x}, y = {y} -> marginal x_st = {marginal_formula(x, y)}")
print("(the conditional structure hides a plain 50/50 coin at stationarity)")

print("\n== learning field away from equilibrium ==")
xdot, ydot = vector_field([0.5] * 4, 0.6, u)
print(f"uniform x against y=0.6: xdot = {xdot}, ydot = {ydot}")

print("\n== stability of two fixed points with the same marginals ==")
for xv in ([0.8, 0.7, 0.3, 0.2], [0.2, 0.3, 0.7, 0.8]):
    rep = classify_fixed_point(xv, 0.5, u)
    lam = rep.eigenvalues[np.abs(rep.eigenvalues) > 1e-12]
    print(f"x* = {xv}: indicator = {rep.indicator:+.2f} -> {rep.classification}; "
          f"nonzero eigenvalues {np.round(lam, 4)}")

print("\n== numeric Jacobian cross-check at the stable point ==")
eig = np.linalg.eigvals(numeric_jacobian([0.8, 0.7, 0.3, 0.2], 0.5, u))
print("eigenvalues of the finite-difference Jacobian:", np.round(np.sort_complex(eig), 4))
print("concavity indicator:", concavity_indicator([0.8, 0.7, 0.3, 0.2]))
