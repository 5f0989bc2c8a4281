"""Compiled inner loops for the discrete learning algorithm.

One learning step needs the exact stationary payoff of every single-entry
perturbation of both strategy tables.  Perturbing one of X's rows changes
exactly one column of the transition matrix, so each of X's |S|*m probes
is a rank-one update of the same linear system and can reuse one matrix
inverse per step (Sherman-Morrison); the result is the same forward
difference a fresh solve would give, without the per-probe O(n^3) cost.
Y's probes touch a whole group of columns and get a fresh solve, set up
for the payoff difference so the forward quotient stays cancellation-free.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _build_transition(x, y, succ, proj):
    n, m = x.shape
    M = np.zeros((n, n))
    for s in range(n):
        sig = proj[s]
        for a in range(m):
            xa = x[s, a]
            for b in range(m):
                M[succ[s, a, b], s] += xa * y[sig, b]
    return M


@njit(cache=True)
def _gradients(x, y, succ, proj, u_vec, gamma):
    """Forward-difference payoff gradients of both players at (x, y).

    Returns (dx, dy, p, u_base) where dx[s, a] is X's gradient of its own
    stationary payoff for the probe direction (a|s), dy[sig, b] is Y's
    gradient of v_st = -u_st, p is the stationary distribution, and u_base
    the unperturbed stationary payoff.  Requires n_x >= 1.
    """
    n, m = x.shape
    ny = y.shape[0]
    r = n - 1
    scale = 1.0 / (1.0 + gamma)

    M = _build_transition(x, y, succ, proj)
    A = M - np.eye(n)
    for j in range(n):
        A[r, j] = 1.0
    Ainv = np.linalg.inv(A)
    p = Ainv[:, r].copy()
    u_base = np.dot(u_vec, p)
    w = np.dot(u_vec, Ainv)

    # X probes: Norm(x + gamma e_{a|s}) changes column s of M by c; with
    # q = Ainv c the perturbed payoff is u_base - (w c) p_s / (1 + q_s).
    # Row r of the system is the normalization row, so c's r-entry is zero.
    dx = np.zeros((n, m))
    for s in range(n):
        sig = proj[s]
        ps = p[s]
        for a in range(m):
            alpha = 0.0
            beta = 0.0
            for a2 in range(m):
                d = ((1.0 if a2 == a else 0.0) - x[s, a2]) * scale
                for b in range(m):
                    sp = succ[s, a2, b]
                    if sp == r:
                        continue
                    cc = d * y[sig, b]
                    alpha += w[sp] * cc
                    beta += Ainv[s, sp] * cc
            dx[s, a] = -alpha * ps / (1.0 + gamma * beta)

    # Y probes: Norm(y + gamma e_{b|sig}) touches every column in sig's
    # group.  Solving A2 (p2 - p) = -(A2 - A) p for the payoff *difference*
    # keeps the forward quotient free of catastrophic cancellation:
    # dy = (v2 - v)/gamma = u_vec . A2^{-1} ((A2 - A)/gamma) p.
    dy = np.zeros((ny, m))
    for sig in range(ny):
        for bb in range(m):
            M2 = M.copy()
            rhs = np.zeros(n)
            for s in range(n):
                if proj[s] != sig:
                    continue
                ps = p[s]
                for a in range(m):
                    xa = x[s, a]
                    for b2 in range(m):
                        dyhat = ((1.0 if b2 == bb else 0.0) - y[sig, b2]) * scale
                        sp = succ[s, a, b2]
                        M2[sp, s] = xa * (y[sig, b2] + (gamma if b2 == bb else 0.0)) * scale
                        if sp != r:
                            rhs[sp] += xa * dyhat * ps
            A2 = M2 - np.eye(n)
            for j in range(n):
                A2[r, j] = 1.0
            z = np.linalg.solve(A2, rhs)
            dy[sig, bb] = np.dot(u_vec, z)
    return dx, dy, p, u_base


@njit(cache=True)
def _apply_update(table, grad, eta, eps):
    """Multiplicative update t <- Norm(t * (1 + eta * grad)), clamped interior.

    Returns the number of non-positive multiplicative factors that had to
    be clamped (a sign that eta is too large for the payoff scale).
    """
    rows, m = table.shape
    clamped = 0
    for s in range(rows):
        tot = 0.0
        for a in range(m):
            f = 1.0 + eta * grad[s, a]
            if f <= 0.0:
                f = eps
                clamped += 1
            v = table[s, a] * f
            table[s, a] = v
            tot += v
        t2 = 0.0
        for a in range(m):
            v = table[s, a] / tot
            if v < eps:
                v = eps
            elif v > 1.0 - eps:
                v = 1.0 - eps
            table[s, a] = v
            t2 += v
        for a in range(m):
            table[s, a] /= t2
    return clamped


@njit(cache=True)
def _step(x, y, succ, proj, u_vec, gamma, eta, eps):
    """One simultaneous learning step; returns (x', y', clamp_count)."""
    dx, dy, _p, _u = _gradients(x, y, succ, proj, u_vec, gamma)
    xn = x.copy()
    yn = y.copy()
    clamped = _apply_update(xn, dx, eta, eps)
    clamped += _apply_update(yn, dy, eta, eps)
    return xn, yn, clamped


@njit(cache=True)
def _run(x0, y0, succ, proj, u_vec, gamma, eta, eps, steps, rec_steps, xs_out, ys_out):
    """Iterate ``steps`` learning steps, snapshotting at the given step indices.

    ``rec_steps`` must be strictly increasing and end at ``steps``; the
    snapshot at index t is the strategy pair *before* step t runs.
    """
    x = x0.copy()
    y = y0.copy()
    clamped = 0
    k = 0
    for t in range(steps + 1):
        if k < rec_steps.size and rec_steps[k] == t:
            xs_out[k] = x
            ys_out[k] = y
            k += 1
        if t == steps:
            break
        x, y, c = _step(x, y, succ, proj, u_vec, gamma, eta, eps)
        clamped += c
    return clamped
