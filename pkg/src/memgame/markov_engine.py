"""Controlled Markov chain of a with-memory game and its stationary analysis.

The chain's state is X's memory string; one round of play moves state s to
successor(s, a, b) with probability x[s, a] * y[proj(s), b].  Everything
here is dense linear algebra: the paper-scale experiments stay at or below
a few hundred states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import game_core
from .game_core import GameSpec, MemoryConfig

DEFAULT_TOL = 1e-12
POWER_ITER_CAP = 1_000_000


class ConvergenceError(RuntimeError):
    """Stationary solve failed; the chain is numerically near-reducible."""


@dataclass
class StationaryResult:
    """Stationary distribution of a strategy profile plus derived quantities."""

    p_st: np.ndarray       # stationary distribution over X-states
    u_st: float            # X's stationary payoff
    v_st: float            # Y's stationary payoff, always -u_st
    x_marg: np.ndarray     # stationary probability of each of X's actions
    y_marg: np.ndarray     # stationary probability of each of Y's actions
    residual: float        # ||M p - p||_inf of the returned distribution


def payoff_by_state(spec: GameSpec, mem: MemoryConfig) -> np.ndarray:
    """X's payoff at each state's newest action pair, shape (|S|,).  Needs n_x >= 1."""
    if mem.n_x == 0:
        raise ValueError("states carry no action pair when n_x = 0")
    codes = game_core.enumerate_states(mem, spec.m)
    return spec.payoff.ravel()[codes % (spec.m * spec.m)]


def bilinear_payoff(x_row: np.ndarray, y_row: np.ndarray, spec: GameSpec) -> float:
    """Expected one-round payoff of memoryless play, x . U y."""
    return float(np.asarray(x_row) @ spec.payoff @ np.asarray(y_row))


def build_transition_matrix(x, y, spec: GameSpec, mem: MemoryConfig) -> np.ndarray:
    """Dense column-stochastic transition matrix M[s', s] of the profile (x, y)."""
    game_core.validate_profile(x, y, spec, mem)
    m = spec.m
    n = game_core.state_count(mem.n_x, m)
    succ = game_core.successor_table(mem, m)
    proj = game_core.projection_table(mem, m)
    M = np.zeros((n, n))
    probs = np.asarray(x)[:, :, None] * np.asarray(y)[proj][:, None, :]
    cols = np.broadcast_to(np.arange(n)[:, None, None], succ.shape)
    # distinct successors per column when n_x >= 1; collisions (n_x = 0) sum
    np.add.at(M, (succ.ravel(), cols.ravel()), probs.ravel())
    return M


def _check_column_stochastic(M: np.ndarray):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"transition matrix must be square, got {M.shape}")
    if np.any(M < 0):
        raise ValueError("transition matrix has negative entries")
    if np.abs(M.sum(axis=0) - 1.0).max() > 1e-9:
        raise ValueError("transition matrix columns must sum to 1")


def stationary_residual(M: np.ndarray, p: np.ndarray) -> float:
    return float(np.abs(M @ p - p).max())


def stationary_distribution_power(M: np.ndarray, tol: float = DEFAULT_TOL,
                                  max_iter: int = POWER_ITER_CAP) -> np.ndarray:
    """Stationary distribution by plain power iteration from the uniform vector."""
    _check_column_stochastic(M)
    n = M.shape[0]
    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = M @ p
        nxt /= nxt.sum()
        # ||nxt - p|| is the residual of p, so this is the true stop test
        if np.abs(nxt - p).max() <= tol and stationary_residual(M, nxt) <= tol:
            return nxt
        p = nxt
    raise ConvergenceError(
        f"power iteration did not reach residual {tol} in {max_iter} steps; "
        "strategies are too close to the simplex boundary"
    )


def stationary_distribution(M: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Stationary distribution p with M p = p, sum p = 1, p >= 0.

    Solves the dense linear system (M - I) p = 0 with the normalization
    row substituted in; falls back to power iteration when the solve is
    ill-conditioned.
    """
    _check_column_stochastic(M)
    n = M.shape[0]
    if n == 1:
        return np.ones(1)
    A = M - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        p = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        p = None
    if p is not None and p.min() > -1e-9:
        p = np.maximum(p, 0.0)
        p = p / p.sum()
        if stationary_residual(M, p) <= tol:
            return p
    return stationary_distribution_power(M, tol)


def stationary_payoffs(p: np.ndarray, spec: GameSpec, mem: MemoryConfig) -> tuple[float, float]:
    """Stationary payoffs (u_st, v_st): expectation of the newest pair's payoff."""
    u_st = float(payoff_by_state(spec, mem) @ np.asarray(p))
    return u_st, -u_st


def marginalized_strategies(x, y, p, spec: GameSpec, mem: MemoryConfig):
    """Stationary action marginals (x_marg, y_marg) of both players."""
    x = np.asarray(x)
    y = np.asarray(y)
    p = np.asarray(p)
    x_marg = x.T @ p
    if mem.n_y == 0:
        y_marg = y[0].copy()
    else:
        proj = game_core.projection_table(mem, spec.m)
        y_marg = y[proj].T @ p
    return x_marg, y_marg


def conditional_marginalized_x(x, p, mem: MemoryConfig, m: int) -> np.ndarray:
    """X's stationary strategy as seen at Y's memory resolution.

    Row sigma is the stationary conditional expectation of x[s] given that
    the newest n_y pairs of s equal sigma; with n_y = 0 this is the single
    row of marginals.
    """
    x = np.asarray(x)
    p = np.asarray(p)
    proj = game_core.projection_table(mem, m)
    n_groups = game_core.state_count(mem.n_y, m)
    mass = np.bincount(proj, weights=p, minlength=n_groups)
    if mass.min() < 1e-300:
        raise ValueError("a memory group has (numerically) zero stationary mass")
    weighted = np.zeros((n_groups, m))
    np.add.at(weighted, proj, x * p[:, None])
    return weighted / mass[:, None]


def current_pair_marginal(p, mem: MemoryConfig, m: int) -> np.ndarray:
    """Stationary distribution of the newest action pair, shape (m*m,)."""
    if mem.n_x == 0:
        raise ValueError("states carry no action pair when n_x = 0")
    p = np.asarray(p)
    pair = game_core.enumerate_states(mem, m) % (m * m)
    return np.bincount(pair, weights=p, minlength=m * m)


def analyze_stationary(x, y, spec: GameSpec, mem: MemoryConfig,
                       tol: float = DEFAULT_TOL) -> StationaryResult:
    """Full stationary summary of a strategy profile.

    With empty memories the chain is the trivial one-state process and the
    payoff reduces to the normal-form bilinear expectation.
    """
    game_core.validate_profile(x, y, spec, mem)
    if mem.n_x == 0:
        u_st = bilinear_payoff(np.asarray(x)[0], np.asarray(y)[0], spec)
        return StationaryResult(
            p_st=np.ones(1), u_st=u_st, v_st=-u_st,
            x_marg=np.asarray(x)[0].copy(), y_marg=np.asarray(y)[0].copy(),
            residual=0.0,
        )
    M = build_transition_matrix(x, y, spec, mem)
    p = stationary_distribution(M, tol)
    u_st, v_st = stationary_payoffs(p, spec, mem)
    x_marg, y_marg = marginalized_strategies(x, y, p, spec, mem)
    return StationaryResult(
        p_st=p, u_st=u_st, v_st=v_st, x_marg=x_marg, y_marg=y_marg,
        residual=stationary_residual(M, p),
    )
