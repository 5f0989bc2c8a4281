"""Closed-form theory for the 2-action game with memory lengths (1, 0).

X's strategy is the 4-vector x = (x1, x2, x3, x4) of probabilities of
playing the first action after last-round outcomes (a1b1, a1b2, a2b1,
a2b2); Y's strategy is the single probability y of its first action.
This module carries the exact formulas for the memoryless equilibrium,
the stationary marginal x_st, the learning vector field, and the local
stability of its fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game_core import GameSpec

STABLE = "stable-equilibrium"
UNSTABLE = "unstable-fixed-point"
NOT_FIXED_POINT = "not-a-fixed-point"
DEGENERATE = "degenerate-fixed-point"

DEFAULT_FP_TOL = 1e-9


@dataclass(frozen=True)
class Payoff4:
    """2x2 zero-sum payoffs (u1, u2, u3, u4) = (u[a1b1], u[a1b2], u[a2b1], u[a2b2]).

    The diagonal entries must dominate the off-diagonal ones so the mixed
    equilibrium is interior; the denominator D = u1 - u2 - u3 + u4 is then
    strictly positive.
    """

    u1: float
    u2: float
    u3: float
    u4: float

    def __post_init__(self):
        if not (min(self.u1, self.u4) > max(self.u2, self.u3)):
            raise ValueError(
                "need u1 and u4 both larger than u2 and u3 for an interior "
                f"equilibrium, got {(self.u1, self.u2, self.u3, self.u4)}"
            )

    @classmethod
    def from_spec(cls, spec: GameSpec) -> "Payoff4":
        spec.require_interior_equilibrium()
        u = spec.payoff
        return cls(u[0, 0], u[0, 1], u[1, 0], u[1, 1])

    @property
    def D(self) -> float:
        return self.u1 - self.u2 - self.u3 + self.u4


@dataclass(frozen=True)
class OriginalNash:
    """Mixed equilibrium (and its value) of the memoryless 2x2 game."""

    x_o: float
    y_o: float
    u_o: float

    @property
    def v_o(self) -> float:
        return -self.u_o


@dataclass(frozen=True)
class StabilityReport:
    """Classification of a strategy profile under the learning dynamics.

    ``eigenvalues`` holds the full 5-dimensional spectrum at a fixed point
    (a triple zero plus the pair lambda+-); it is empty when the point is
    not a fixed point.
    """

    indicator: float
    eigenvalues: np.ndarray
    classification: str


def original_nash(u: Payoff4) -> OriginalNash:
    """Memoryless mixed equilibrium: x_o = (u4-u3)/D, y_o = (u4-u2)/D."""
    d = u.D
    return OriginalNash(
        x_o=(-u.u3 + u.u4) / d,
        y_o=(-u.u2 + u.u4) / d,
        u_o=(u.u1 * u.u4 - u.u2 * u.u3) / d,
    )


def _split(x) -> tuple[float, float, float, float]:
    x1, x2, x3, x4 = np.asarray(x, dtype=float)
    return float(x1), float(x2), float(x3), float(x4)


def marginal_formula(x, y: float) -> float:
    """Stationary probability x_st that X plays its first action.

    x_st = (x3 y + x4 (1-y)) / ((1-x1) y + (1-x2)(1-y) + x3 y + x4 (1-y)).
    """
    x1, x2, x3, x4 = _split(x)
    yt = 1.0 - y
    num = x3 * y + x4 * yt
    den = (1.0 - x1) * y + (1.0 - x2) * yt + num
    if den <= 0.0:
        raise ValueError("degenerate marginal denominator; inputs must be interior")
    return num / den


def marginal_partials(x, y: float) -> tuple[np.ndarray, float]:
    """Exact partial derivatives (d x_st / d x_i for i=1..4, d x_st / d y)."""
    x1, x2, x3, x4 = _split(x)
    yt = 1.0 - y
    num = x3 * y + x4 * yt
    rest = (1.0 - x1) * y + (1.0 - x2) * yt
    den = rest + num
    if den <= 0.0:
        raise ValueError("degenerate marginal denominator; inputs must be interior")
    d2 = den * den
    grad_x = np.array([num * y, num * yt, y * rest, yt * rest]) / d2
    d_dy = concavity_indicator(x) / d2
    return grad_x, d_dy


def concavity_indicator(x) -> float:
    """-(1-x1) x4 + (1-x2) x3; positive values make Y's payoff strictly concave."""
    x1, x2, x3, x4 = _split(x)
    return -(1.0 - x1) * x4 + (1.0 - x2) * x3


def vector_field(x, y: float, u: Payoff4) -> tuple[np.ndarray, float]:
    """Exact continuous-time learning field (xdot, ydot) at a profile.

    xdot_i = x_i (1-x_i) D (y - y_o) d x_st/d x_i;
    ydot   = -y (1-y) D ((y - y_o) d x_st/d y + (x_st - x_o)).
    The field vanishes exactly on (x_st, y) = (x_o, y_o).
    """
    xv = np.asarray(x, dtype=float)
    nash = original_nash(u)
    grad_x, d_dy = marginal_partials(xv, y)
    x_st = marginal_formula(xv, y)
    d = u.D
    xdot = xv * (1.0 - xv) * d * (y - nash.y_o) * grad_x
    ydot = -y * (1.0 - y) * d * ((y - nash.y_o) * d_dy + (x_st - nash.x_o))
    return xdot, float(ydot)


def classify_fixed_point(x, y: float, u: Payoff4,
                         tol: float = DEFAULT_FP_TOL) -> StabilityReport:
    """Classify a profile: stable / unstable / degenerate fixed point, or neither.

    At a fixed point the Jacobian's spectrum is a triple zero plus
    lambda+- = (J55 +- sqrt(J55^2 + 4 sum_i Ji5 J5i)) / 2; the nonzero pair
    has negative real part exactly when the concavity indicator is positive.
    Indicator magnitudes within ``tol`` are reported as degenerate rather
    than forced into either class.
    """
    xv = np.asarray(x, dtype=float)
    xdot, ydot = vector_field(xv, y, u)
    indicator = concavity_indicator(xv)
    speed = max(np.abs(xdot).max(), abs(ydot))
    if speed > tol:
        return StabilityReport(indicator=indicator,
                               eigenvalues=np.zeros(0, dtype=complex),
                               classification=NOT_FIXED_POINT)
    grad_x, d_dy = marginal_partials(xv, y)
    d = u.D
    yt = 1.0 - y
    j55 = -2.0 * y * yt * d * d_dy
    ji5 = xv * (1.0 - xv) * d * grad_x
    j5i = -y * yt * d * grad_x
    disc = j55 * j55 + 4.0 * float(ji5 @ j5i)
    root = np.sqrt(complex(disc))
    lam = np.array([0.0, 0.0, 0.0, (j55 - root) / 2.0, (j55 + root) / 2.0],
                   dtype=complex)
    if indicator > tol:
        label = STABLE
    elif indicator < -tol:
        label = UNSTABLE
    else:
        label = DEGENERATE
    return StabilityReport(indicator=indicator, eigenvalues=lam, classification=label)


def numeric_jacobian(x, y: float, u: Payoff4, h: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the learning field at (x, y), shape (5, 5)."""

    def field(z):
        xdot, ydot = vector_field(z[:4], float(z[4]), u)
        return np.concatenate([xdot, [ydot]])

    z0 = np.concatenate([np.asarray(x, dtype=float), [float(y)]])
    jac = np.zeros((5, 5))
    for j in range(5):
        zp = z0.copy()
        zm = z0.copy()
        zp[j] += h
        zm[j] -= h
        jac[:, j] = (field(zp) - field(zm)) / (2.0 * h)
    return jac


def equilibrium_x4(x1: float, x2: float, x3: float, u: Payoff4) -> float:
    """The x4 putting (x, y_o) on the fixed-point manifold x_st(x, y_o) = x_o."""
    nash = original_nash(u)
    xo, yo = nash.x_o, nash.y_o
    xot, yot = 1.0 - xo, 1.0 - yo
    return (xo * ((1.0 - x1) * yo + (1.0 - x2) * yot) - xot * x3 * yo) / (xot * yot)


def sample_equilibrium_manifold(rng: np.random.Generator, u: Payoff4, count: int,
                                margin: float = 1e-6) -> np.ndarray:
    """Sample ``count`` points (x1..x4, y_o) of the fixed-point manifold.

    Draws (x1, x2, x3) uniformly on (0, 1)^3 and solves the remaining
    coordinate from x_st(x, y_o) = x_o, rejecting draws whose x4 falls
    outside the interior.
    """
    nash = original_nash(u)
    out = np.empty((count, 5))
    have = 0
    while have < count:
        x1, x2, x3 = rng.uniform(0.0, 1.0, 3)
        x4 = equilibrium_x4(x1, x2, x3, u)
        if margin < x4 < 1.0 - margin:
            out[have] = (x1, x2, x3, x4, nash.y_o)
            have += 1
    return out


def reduced_profile(x_table, y_table) -> tuple[np.ndarray, float]:
    """Extract (x 4-vector, y scalar) from (1,0)-memory strategy tables."""
    x_table = np.asarray(x_table)
    y_table = np.asarray(y_table)
    if x_table.shape != (4, 2) or y_table.shape != (1, 2):
        raise ValueError("expected x of shape (4, 2) and y of shape (1, 2)")
    return x_table[:, 0].copy(), float(y_table[0, 0])


def table_profile(x, y: float) -> tuple[np.ndarray, np.ndarray]:
    """Build (1,0)-memory strategy tables from the reduced coordinates."""
    xv = np.asarray(x, dtype=float)
    x_table = np.column_stack([xv, 1.0 - xv])
    y_table = np.array([[y, 1.0 - y]])
    return x_table, y_table
