"""Multi-memory gradient ascent: discrete steps, continuous flow, KL metric.

The discrete algorithm probes every strategy-table entry with a normalized
finite difference of the stationary payoff and applies a multiplicative
update; both players move simultaneously from the same pre-step profile.
The continuous-time limit replaces the probes with partial derivatives and
is integrated with classical fourth-order Runge-Kutta.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _fastpath, analytic_2x2, game_core, markov_engine
from .game_core import INTERIOR_EPS, GameSpec, MemoryConfig


class DynamicsError(RuntimeError):
    """A learning run produced non-finite values and was aborted."""


@dataclass
class LearnConfig:
    """Hyperparameters of a learning run.

    ``eta``/``gamma``/``steps`` drive the discrete algorithm;
    ``rk4_h``/``t_end`` drive the continuous one.  ``record_every`` is the
    recording stride in steps for either mode.
    """

    eta: float = 1e-3
    gamma: float = 1e-6
    steps: int = 200_000
    record_every: int = 1000
    rk4_h: float = 2e-2
    t_end: float = 180.0

    def __post_init__(self):
        if self.eta <= 0 or self.gamma <= 0:
            raise ValueError("eta and gamma must be positive")
        if self.steps < 0 or self.record_every < 1:
            raise ValueError("need steps >= 0 and record_every >= 1")
        if self.rk4_h <= 0 or self.t_end < 0:
            raise ValueError("need rk4_h > 0 and t_end >= 0")


@dataclass
class Trajectory:
    """Time-indexed record of a learning run.

    ``times`` holds step indices (discrete mode) or times (continuous
    mode).  ``indicator`` is populated only for the 2-action (1,0)-memory
    setting, where the concavity indicator is defined.
    """

    mode: str
    times: np.ndarray
    x_tables: np.ndarray
    y_tables: np.ndarray
    x_marg: np.ndarray
    y_marg: np.ndarray
    u_st: np.ndarray
    kl: np.ndarray
    indicator: np.ndarray | None = None
    clamp_events: int = 0

    def __len__(self) -> int:
        return self.times.size

    @property
    def final_x(self) -> np.ndarray:
        return self.x_tables[-1]

    @property
    def final_y(self) -> np.ndarray:
        return self.y_tables[-1]

    @property
    def final_kl(self) -> float:
        return float(self.kl[-1])


def default_reference(spec: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    """Equilibrium marginals used as the KL reference point.

    For 2-action games this is the closed-form memoryless equilibrium; for
    larger games no closed form is available and the caller must supply the
    reference explicitly.
    """
    if spec.m == 2:
        nash = analytic_2x2.original_nash(analytic_2x2.Payoff4.from_spec(spec))
        return (np.array([nash.x_o, 1.0 - nash.x_o]),
                np.array([nash.y_o, 1.0 - nash.y_o]))
    raise ValueError("no closed-form equilibrium for m > 2; pass reference=(x_ref, y_ref)")


def kl_to_equilibrium(x_marg, y_marg, x_ref, y_ref) -> float:
    """KL divergence from the reference marginals to the current ones.

    Sum over both players of sum_i ref_i * log(ref_i / marginal_i);
    non-negative, and zero exactly at the reference.
    """
    total = 0.0
    for marg, ref in ((x_marg, x_ref), (y_marg, y_ref)):
        marg = np.asarray(marg, dtype=float)
        ref = np.asarray(ref, dtype=float)
        if marg.shape != ref.shape:
            raise ValueError("marginal/reference length mismatch")
        if np.any(marg <= 0.0):
            raise ValueError("marginals on the simplex boundary have infinite KL")
        mask = ref > 0.0
        total += float(np.sum(ref[mask] * np.log(ref[mask] / marg[mask])))
    return max(total, 0.0)


def _chain_arrays(spec: GameSpec, mem: MemoryConfig):
    succ = game_core.successor_table(mem, spec.m)
    proj = game_core.projection_table(mem, spec.m)
    u_vec = markov_engine.payoff_by_state(spec, mem)
    return (np.ascontiguousarray(succ), np.ascontiguousarray(proj),
            np.ascontiguousarray(u_vec))


def _as_tables(x, y):
    return (np.ascontiguousarray(np.asarray(x, dtype=float)),
            np.ascontiguousarray(np.asarray(y, dtype=float)))


def _memoryless_gradients(x, y, spec: GameSpec, gamma: float):
    """Exact forward differences of the one-shot bilinear payoff (n_x = 0)."""
    m = spec.m
    xr = np.asarray(x, dtype=float)[0]
    yr = np.asarray(y, dtype=float)[0]
    u0 = markov_engine.bilinear_payoff(xr, yr, spec)
    dx = np.zeros((1, m))
    dy = np.zeros((1, m))
    for a in range(m):
        probe = xr.copy()
        probe[a] += gamma
        probe /= 1.0 + gamma
        dx[0, a] = (markov_engine.bilinear_payoff(probe, yr, spec) - u0) / gamma
    for b in range(m):
        probe = yr.copy()
        probe[b] += gamma
        probe /= 1.0 + gamma
        dy[0, b] = (u0 - markov_engine.bilinear_payoff(xr, probe, spec)) / gamma
    return dx, dy


def payoff_gradient_x(x, y, spec: GameSpec, mem: MemoryConfig,
                      gamma: float = 1e-6) -> np.ndarray:
    """X's finite-difference gradient table: entry (s, a) is
    [u_st(Norm(x + gamma e_{a|s}), y) - u_st(x, y)] / gamma."""
    game_core.validate_profile(x, y, spec, mem)
    x, y = _as_tables(x, y)
    if mem.n_x == 0:
        return _memoryless_gradients(x, y, spec, gamma)[0]
    succ, proj, u_vec = _chain_arrays(spec, mem)
    dx, _dy, _p, _u = _fastpath._gradients(x, y, succ, proj, u_vec, gamma)
    return dx


def payoff_gradient_y(x, y, spec: GameSpec, mem: MemoryConfig,
                      gamma: float = 1e-6) -> np.ndarray:
    """Y's finite-difference gradient table of its own payoff v_st = -u_st."""
    game_core.validate_profile(x, y, spec, mem)
    x, y = _as_tables(x, y)
    if mem.n_x == 0:
        return _memoryless_gradients(x, y, spec, gamma)[1]
    succ, proj, u_vec = _chain_arrays(spec, mem)
    _dx, dy, _p, _u = _fastpath._gradients(x, y, succ, proj, u_vec, gamma)
    return dy


def _apply_update_np(table, grad, eta, eps=INTERIOR_EPS):
    factor = 1.0 + eta * grad
    bad = factor <= 0.0
    clamped = int(bad.sum())
    factor = np.where(bad, eps, factor)
    out = table * factor
    out /= out.sum(axis=1, keepdims=True)
    out = np.clip(out, eps, 1.0 - eps)
    out /= out.sum(axis=1, keepdims=True)
    return out, clamped


def _warn_clamped(clamped: int, eta: float):
    if clamped:
        warnings.warn(
            f"{clamped} multiplicative factor(s) 1 + eta*grad were non-positive "
            f"and clamped; eta={eta} is too large for this payoff scale",
            RuntimeWarning, stacklevel=3,
        )


def mmga_step(x, y, spec: GameSpec, mem: MemoryConfig,
              cfg: LearnConfig) -> tuple[np.ndarray, np.ndarray]:
    """One simultaneous learning step of both players."""
    game_core.validate_profile(x, y, spec, mem)
    x, y = _as_tables(x, y)
    if mem.n_x == 0:
        dx, dy = _memoryless_gradients(x, y, spec, cfg.gamma)
        xn, c1 = _apply_update_np(x, dx, cfg.eta)
        yn, c2 = _apply_update_np(y, dy, cfg.eta)
        clamped = c1 + c2
    else:
        succ, proj, u_vec = _chain_arrays(spec, mem)
        xn, yn, clamped = _fastpath._step(x, y, succ, proj, u_vec,
                                          cfg.gamma, cfg.eta, INTERIOR_EPS)
    _warn_clamped(clamped, cfg.eta)
    return xn, yn


def _record_steps(steps: int, every: int) -> np.ndarray:
    rec = np.arange(0, steps + 1, every, dtype=np.int64)
    if rec[-1] != steps:
        rec = np.append(rec, steps)
    return rec


def _instrument(mode, times, xs, ys, spec, mem, reference, clamp_events):
    """Build a Trajectory by running the stationary analysis at each record."""
    x_ref, y_ref = reference
    count = len(xs)
    m = spec.m
    x_marg = np.zeros((count, m))
    y_marg = np.zeros((count, m))
    u_st = np.zeros(count)
    kl = np.zeros(count)
    with_indicator = (m, mem.n_x, mem.n_y) == (2, 1, 0)
    indicator = np.zeros(count) if with_indicator else None
    for i in range(count):
        res = markov_engine.analyze_stationary(xs[i], ys[i], spec, mem)
        x_marg[i] = res.x_marg
        y_marg[i] = res.y_marg
        u_st[i] = res.u_st
        kl[i] = kl_to_equilibrium(res.x_marg, res.y_marg, x_ref, y_ref)
        if with_indicator:
            indicator[i] = analytic_2x2.concavity_indicator(xs[i][:, 0])
    if not np.all(np.isfinite(u_st)):
        raise DynamicsError("non-finite stationary payoff along the trajectory")
    return Trajectory(mode=mode, times=times, x_tables=np.asarray(xs),
                      y_tables=np.asarray(ys), x_marg=x_marg, y_marg=y_marg,
                      u_st=u_st, kl=kl, indicator=indicator,
                      clamp_events=clamp_events)


def run_discretized(x0, y0, spec: GameSpec, mem: MemoryConfig, cfg: LearnConfig,
                    reference=None) -> Trajectory:
    """Run the discrete algorithm for cfg.steps steps; deterministic in its inputs."""
    game_core.validate_profile(x0, y0, spec, mem)
    if reference is None:
        reference = default_reference(spec)
    x, y = _as_tables(x0, y0)
    rec = _record_steps(cfg.steps, cfg.record_every)
    if mem.n_x == 0:
        xs = np.zeros((rec.size,) + x.shape)
        ys = np.zeros((rec.size,) + y.shape)
        clamped = 0
        k = 0
        for t in range(cfg.steps + 1):
            if k < rec.size and rec[k] == t:
                xs[k] = x
                ys[k] = y
                k += 1
            if t == cfg.steps:
                break
            dx, dy = _memoryless_gradients(x, y, spec, cfg.gamma)
            x, c1 = _apply_update_np(x, dx, cfg.eta)
            y, c2 = _apply_update_np(y, dy, cfg.eta)
            clamped += c1 + c2
    else:
        succ, proj, u_vec = _chain_arrays(spec, mem)
        xs = np.zeros((rec.size,) + x.shape)
        ys = np.zeros((rec.size,) + y.shape)
        clamped = _fastpath._run(x, y, succ, proj, u_vec, cfg.gamma, cfg.eta,
                                 INTERIOR_EPS, cfg.steps, rec, xs, ys)
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DynamicsError("learning run produced non-finite strategies")
    _warn_clamped(int(clamped), cfg.eta)
    return _instrument("discrete", rec.astype(float), xs, ys, spec, mem,
                       reference, int(clamped))


def continuous_field(x, y, spec: GameSpec, mem: MemoryConfig,
                     probe: float = 1e-7):
    """Continuous-time learning field (xdot table, ydot table).

    The 2-action (1,0)-memory case delegates to the exact closed forms;
    empty memories use the exact bilinear limit; every other configuration
    evaluates the stationary-payoff partials by central differences through
    the same per-state normalization the discrete probes use.
    """
    x, y = _as_tables(x, y)
    m = spec.m
    if mem.n_x == 0:
        xr, yr = x[0], y[0]
        u0 = markov_engine.bilinear_payoff(xr, yr, spec)
        gx = spec.payoff @ yr - u0
        gy = u0 - spec.payoff.T @ xr
        return x * gx[None, :], y * gy[None, :]
    if (m, mem.n_x, mem.n_y) == (2, 1, 0):
        try:
            u4 = analytic_2x2.Payoff4.from_spec(spec)
        except ValueError:
            u4 = None
        if u4 is not None:
            xv, y0 = analytic_2x2.reduced_profile(x, y)
            xd, yd = analytic_2x2.vector_field(xv, y0, u4)
            return (np.column_stack([xd, -xd]), np.array([[yd, -yd]]))
    x = game_core.clamp_interior(x)
    y = game_core.clamp_interior(y)
    succ, proj, u_vec = _chain_arrays(spec, mem)
    dxp, dyp, _, _ = _fastpath._gradients(x, y, succ, proj, u_vec, probe)
    dxm, dym, _, _ = _fastpath._gradients(x, y, succ, proj, u_vec, -probe)
    gx = 0.5 * (dxp + dxm)
    gy = 0.5 * (dyp + dym)
    return x * gx, y * gy


def rk4_step(x, y, h: float, field):
    """Classical four-stage Runge-Kutta step of ``field``; result clamped interior."""
    x, y = _as_tables(x, y)
    k1x, k1y = field(x, y)
    k2x, k2y = field(x + 0.5 * h * k1x, y + 0.5 * h * k1y)
    k3x, k3y = field(x + 0.5 * h * k2x, y + 0.5 * h * k2y)
    k4x, k4y = field(x + h * k3x, y + h * k3y)
    xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
    yn = y + (h / 6.0) * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
    if not (np.all(np.isfinite(xn)) and np.all(np.isfinite(yn))):
        raise DynamicsError("non-finite Runge-Kutta stage")
    return game_core.clamp_interior(xn), game_core.clamp_interior(yn)


def run_continuous(x0, y0, spec: GameSpec, mem: MemoryConfig, cfg: LearnConfig,
                   reference=None) -> Trajectory:
    """Integrate the continuous-time dynamics to cfg.t_end with step cfg.rk4_h."""
    game_core.validate_profile(x0, y0, spec, mem)
    if reference is None:
        reference = default_reference(spec)
    x, y = _as_tables(x0, y0)
    n_steps = int(np.ceil(cfg.t_end / cfg.rk4_h - 1e-12)) if cfg.t_end > 0 else 0
    rec = _record_steps(n_steps, cfg.record_every)

    def field(xx, yy):
        return continuous_field(xx, yy, spec, mem)

    xs = np.zeros((rec.size,) + x.shape)
    ys = np.zeros((rec.size,) + y.shape)
    k = 0
    for t in range(n_steps + 1):
        if k < rec.size and rec[k] == t:
            xs[k] = x
            ys[k] = y
            k += 1
        if t == n_steps:
            break
        x, y = rk4_step(x, y, cfg.rk4_h, field)
    return _instrument("continuous", rec * cfg.rk4_h, xs, ys, spec, mem,
                       reference, 0)
