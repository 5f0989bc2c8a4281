"""Games, memory configurations, state-string algebra, and strategy tables.

A state is the string of the last ``n_x`` joint actions (a, b), newest
first.  States are packed into integer codes in base m*m where the newest
pair occupies the least-significant digit, so dropping old history is a
modulus and appending a round is a shift-and-add.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Interiority clamp applied after every normalization; keeps strategies off
# the simplex boundary so the induced Markov chain stays irreducible.
INTERIOR_EPS = 1e-12

# Dense linear algebra only: configurations beyond this state count fail fast.
MAX_STATES = 65_536


class StateSpaceError(ValueError):
    """Memory/action configuration produces an infeasibly large state space."""


@dataclass(frozen=True, eq=False)
class GameSpec:
    """A two-player zero-sum game with m actions per player.

    ``payoff[a, b]`` is X's payoff when X plays action ``a`` and Y plays
    action ``b``.  Y's payoff is structurally the negation and is never
    stored.
    """

    payoff: np.ndarray

    def __post_init__(self):
        payoff = np.asarray(self.payoff, dtype=float)
        if payoff.ndim != 2 or payoff.shape[0] != payoff.shape[1]:
            raise ValueError(f"payoff must be square, got shape {payoff.shape}")
        if payoff.shape[0] < 2:
            raise ValueError("need at least 2 actions per player")
        if not np.all(np.isfinite(payoff)):
            raise ValueError("payoff entries must be finite")
        payoff.setflags(write=False)
        object.__setattr__(self, "payoff", payoff)

    @property
    def m(self) -> int:
        return self.payoff.shape[0]

    @property
    def payoff_y(self) -> np.ndarray:
        """Y's payoff matrix, derived as the negation (zero-sum)."""
        return -self.payoff

    def require_interior_equilibrium(self):
        """Check the 2-action interior-equilibrium condition.

        For m = 2 the mixed equilibrium is interior exactly when the two
        diagonal payoffs both exceed the two off-diagonal ones; otherwise a
        dominant strategy exists and the equilibrium sits on the boundary.
        """
        if self.m != 2:
            raise ValueError("interior-equilibrium validation is defined for m = 2 only")
        u = self.payoff
        diag_min = min(u[0, 0], u[1, 1])
        off_max = max(u[0, 1], u[1, 0])
        if not diag_min > off_max:
            raise ValueError(
                "payoffs admit a boundary/dominant-strategy equilibrium: "
                f"need min(u11, u22)={diag_min} > max(u12, u21)={off_max}"
            )


@dataclass(frozen=True)
class MemoryConfig:
    """Memory lengths (n_x, n_y) of the two players.

    X is canonically the longer-memory player (n_x >= n_y).  Equal memories
    are permitted for the symmetric-memory divergence experiment.
    """

    n_x: int
    n_y: int = 0

    def __post_init__(self):
        if self.n_x < 0 or self.n_y < 0:
            raise ValueError("memory lengths must be non-negative")
        if self.n_y > self.n_x:
            raise ValueError(f"n_y={self.n_y} exceeds n_x={self.n_x}; X holds the longer memory")


def state_count(n: int, m: int) -> int:
    """Number of length-n memory states, m**(2n); the empty memory has one."""
    count = (m * m) ** n
    if count > MAX_STATES:
        raise StateSpaceError(
            f"state space m**(2n) = {count} exceeds the cap {MAX_STATES} "
            f"(m={m}, n={n})"
        )
    return count


def enumerate_states(mem: MemoryConfig, m: int) -> np.ndarray:
    """All state codes for X's memory, ascending.  Single sentinel 0 if n_x = 0."""
    if m < 2:
        raise ValueError("need m >= 2")
    return np.arange(state_count(mem.n_x, m), dtype=np.int64)


def encode_state(pairs, m: int) -> int:
    """Pack a newest-first sequence of (a, b) pairs into a state code."""
    code = 0
    for a, b in reversed(list(pairs)):
        if not (0 <= a < m and 0 <= b < m):
            raise ValueError(f"action pair ({a}, {b}) out of range for m={m}")
        code = code * (m * m) + (a * m + b)
    return code


def decode_state(code: int, n: int, m: int) -> list[tuple[int, int]]:
    """Unpack a state code into its newest-first list of n (a, b) pairs."""
    if not 0 <= code < state_count(n, m):
        raise ValueError(f"code {code} out of range for n={n}, m={m}")
    pairs = []
    for _ in range(n):
        digit = code % (m * m)
        pairs.append((digit // m, digit % m))
        code //= m * m
    return pairs


def successor(code: int, a: int, b: int, mem: MemoryConfig, m: int) -> int:
    """State reached from ``code`` after the players play (a, b).

    The new pair is prepended and the oldest pair dropped; with the
    empty memory every play returns the sentinel state 0.
    """
    if mem.n_x == 0:
        return 0
    size = state_count(mem.n_x, m)
    if not 0 <= code < size:
        raise ValueError(f"code {code} out of range")
    if not (0 <= a < m and 0 <= b < m):
        raise ValueError(f"action pair ({a}, {b}) out of range for m={m}")
    return (code * (m * m) + (a * m + b)) % size


def project(code: int, n: int, mem: MemoryConfig, m: int) -> int:
    """The newest-n substring of a state, as a code in the length-n space."""
    if not 0 <= n <= mem.n_x:
        raise ValueError(f"projection length {n} outside [0, {mem.n_x}]")
    if not 0 <= code < state_count(mem.n_x, m):
        raise ValueError(f"code {code} out of range")
    return code % ((m * m) ** n)


def projection_table(mem: MemoryConfig, m: int, n: int | None = None) -> np.ndarray:
    """Vector mapping every X-state code to its newest-n projection (default n_y)."""
    if n is None:
        n = mem.n_y
    codes = enumerate_states(mem, m)
    return (codes % ((m * m) ** n)).astype(np.int64)


def successor_table(mem: MemoryConfig, m: int) -> np.ndarray:
    """Array succ[s, a, b] of successor codes, shape (|S|, m, m)."""
    codes = enumerate_states(mem, m)
    if mem.n_x == 0:
        return np.zeros((1, m, m), dtype=np.int64)
    size = codes.size
    pair = np.arange(m * m, dtype=np.int64).reshape(m, m)
    return (codes[:, None, None] * (m * m) + pair[None, :, :]) % size


def normalize_rows(table: np.ndarray) -> np.ndarray:
    """Rescale each row to sum to one (new array)."""
    table = np.asarray(table, dtype=float)
    sums = table.sum(axis=1, keepdims=True)
    if np.any(sums <= 0) or not np.all(np.isfinite(sums)):
        raise ValueError("rows must have positive finite mass")
    return table / sums


def clamp_interior(table: np.ndarray, eps: float = INTERIOR_EPS) -> np.ndarray:
    """Normalize, clip entries into [eps, 1-eps], and renormalize.

    Keeps every row strictly inside its simplex; applied after every
    strategy-producing operation.
    """
    table = normalize_rows(table)
    table = np.clip(table, eps, 1.0 - eps)
    return table / table.sum(axis=1, keepdims=True)


def validate_strategy(table: np.ndarray, rows: int, m: int, name: str = "strategy"):
    """Raise unless ``table`` is a (rows, m) stack of interior simplex rows."""
    table = np.asarray(table)
    if table.shape != (rows, m):
        raise ValueError(f"{name} has shape {table.shape}, expected {(rows, m)}")
    if not np.all(np.isfinite(table)):
        raise ValueError(f"{name} has non-finite entries")
    if np.any(table <= 0.0) or np.any(table >= 1.0):
        raise ValueError(f"{name} must be interior: all entries in (0, 1)")
    sums = table.sum(axis=1)
    if np.abs(sums - 1.0).max() > 1e-12:
        raise ValueError(f"{name} rows must sum to 1 within 1e-12")


def validate_profile(x: np.ndarray, y: np.ndarray, spec: GameSpec, mem: MemoryConfig):
    """Validate an (x, y) strategy pair against a game and memory config."""
    m = spec.m
    validate_strategy(x, state_count(mem.n_x, m), m, name="x")
    validate_strategy(y, state_count(mem.n_y, m), m, name="y")


def sample_interior_strategy(rng: np.random.Generator, rows: int, m: int) -> np.ndarray:
    """Draw ``rows`` strategy rows uniformly from the interior of the simplex.

    Uniform means a symmetric Dirichlet with unit concentration; rows are
    then clamped to the interior and renormalized.
    """
    if rows < 1:
        raise ValueError("need rows >= 1")
    table = rng.dirichlet(np.ones(m), size=rows)
    return clamp_interior(table)
