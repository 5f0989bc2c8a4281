"""Experiment presets, multi-seed sweeps, statistics, and CSV/JSON output.

Each preset fully determines a deterministic experiment: the game, both
memory lengths, the algorithm and its hyperparameters, the sample count,
and the equilibrium reference for the KL convergence metric.  A sweep
writes one trajectory CSV per sample, a pointwise mean/std stats CSV, and
a JSON manifest that is sufficient to re-run the sweep bit-identically.
"""

from __future__ import annotations

import dataclasses
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic_2x2, game_core, mmga
from ._version import __version__
from .game_core import GameSpec, MemoryConfig
from .mmga import LearnConfig, Trajectory


class ConfigurationError(ValueError):
    """Invalid experiment configuration (unknown preset, bad config file entry)."""


CONVERGENCE_KL = 1e-4       # sustained-KL threshold for the converged flag
CONVERGENCE_WINDOW = 10     # number of trailing records that must sit below it
FLOAT_FMT = "%.17g"


# ---------------------------------------------------------------------------
# Built-in games

def _cyclic_game(m: int, beats) -> GameSpec:
    u = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            u[i, j] = beats[(i - j) % m]
    return GameSpec(u)


def builtin_game(name: str) -> GameSpec:
    """Named games: matching-pennies, rps (m=3), erps (m=4).

    rps is the standard cyclic win/lose/tie game.  erps extends the cycle
    to four actions with u[i, j] = f((i - j) mod 4), f = (0, +1, +1, -1);
    the nonzero f(2) keeps the uniform profile the *unique* interior
    equilibrium, which a fair (antisymmetric) four-action cycle cannot do.
    """
    if name == "matching-pennies":
        return GameSpec(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    if name == "rps":
        return _cyclic_game(3, [0.0, 1.0, -1.0])
    if name == "erps":
        return _cyclic_game(4, [0.0, 1.0, 1.0, -1.0])
    raise ConfigurationError(f"unknown builtin game {name!r}")


def uniform_reference(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.full(m, 1.0 / m), np.full(m, 1.0 / m)


def reference_for(spec: GameSpec, game_name: str | None):
    """Equilibrium reference marginals: uniform for the builtin games,
    closed form for other 2-action games, explicit otherwise."""
    if game_name in ("matching-pennies", "rps", "erps"):
        return uniform_reference(spec.m)
    if spec.m == 2:
        return mmga.default_reference(spec)
    return None


# ---------------------------------------------------------------------------
# Configurations

@dataclass
class ExperimentConfig:
    """A fully-resolved experiment: one (game, memory, algorithm) sweep.

    ``cases`` is non-empty only for composite presets, whose member
    experiments run into subdirectories of the output directory.
    """

    name: str
    game: GameSpec
    memory: MemoryConfig
    algorithm: str                      # "discrete" | "continuous"
    learn: LearnConfig
    samples: int = 1
    seed: int = 0
    reference: tuple | None = None      # (x_ref, y_ref); None = resolve at run time
    init: str = "random"                # "random" | "near-unstable"
    game_name: str | None = None
    cases: tuple = ()

    def __post_init__(self):
        if self.algorithm not in ("discrete", "continuous"):
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        if self.init not in ("random", "near-unstable", "near-symmetric"):
            raise ConfigurationError(f"unknown init mode {self.init!r}")
        if self.samples < 0:
            raise ConfigurationError("samples must be >= 0")


def _case(name, game_name, n_x, n_y, *, algorithm="discrete", samples, seed=0,
          init="random", **learn_kw) -> ExperimentConfig:
    spec = builtin_game(game_name)
    return ExperimentConfig(
        name=name, game=spec, memory=MemoryConfig(n_x, n_y),
        algorithm=algorithm, learn=LearnConfig(**learn_kw), samples=samples,
        seed=seed, reference=reference_for(spec, game_name), init=init,
        game_name=game_name,
    )


def _build_presets() -> dict:
    mp = "matching-pennies"
    presets = {
        # qualitative regime triptych: cycling / divergence / convergence
        "fig1_left": _case("fig1_left", mp, 0, 0, algorithm="continuous",
                           samples=1, rk4_h=2e-2, t_end=100.0, record_every=10),
        "fig1_center": _case("fig1_center", mp, 1, 1, algorithm="continuous",
                             samples=1, init="near-symmetric",
                             rk4_h=2e-2, t_end=200.0, record_every=10),
        "fig1_right": _case("fig1_right", mp, 1, 0, algorithm="continuous",
                            samples=1, rk4_h=2e-2, t_end=180.0, record_every=10),
        # escape from an unstable fixed point, then convergence
        "fig3": _case("fig3", mp, 1, 0, algorithm="continuous", samples=1,
                      init="near-unstable", rk4_h=2e-2, t_end=180.0,
                      record_every=10),
        # discrete-algorithm convergence across memory configurations
        "fig4a": _case("fig4a", mp, 1, 0, samples=10,
                       eta=1e-3, gamma=1e-6, steps=200_000, record_every=1000),
        "fig4b": _case("fig4b", mp, 2, 0, samples=10,
                       eta=1e-3, gamma=1e-6, steps=200_000, record_every=1000),
        "fig4c": _case("fig4c", mp, 2, 1, samples=2,
                       eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
        # more actions
        "fig5a": _case("fig5a", "rps", 1, 0, samples=4,
                       eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
        "fig5b": _case("fig5b", "erps", 1, 0, samples=4,
                       eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
    }
    a1_members = (
        _case("figA1_m2_10", mp, 1, 0, samples=50,
              eta=1e-3, gamma=1e-6, steps=200_000, record_every=1000),
        _case("figA1_m2_20", mp, 2, 0, samples=50,
              eta=1e-3, gamma=1e-6, steps=200_000, record_every=1000),
        _case("figA1_m2_21", mp, 2, 1, samples=50,
              eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
        _case("figA1_m3_10", "rps", 1, 0, samples=50,
              eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
        _case("figA1_m4_10", "erps", 1, 0, samples=50,
              eta=1e-3, gamma=1e-6, steps=1_000_000, record_every=5000),
    )
    umbrella = dataclasses.replace(a1_members[0], name="figA1", cases=a1_members)
    presets["figA1"] = umbrella
    for member in a1_members:
        presets[member.name] = member
    return presets


_PRESETS = _build_presets()


def list_presets() -> list[str]:
    return sorted(_PRESETS)


def preset(name: str) -> ExperimentConfig:
    """A fully-populated configuration for a named experiment."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; known: {', '.join(list_presets())}"
        ) from None


def with_overrides(config: ExperimentConfig, *, samples: int | None = None,
                   seed: int | None = None) -> ExperimentConfig:
    """Copy a config with a new sample count and/or seed (cases included)."""
    kw = {}
    if samples is not None:
        kw["samples"] = samples
    if seed is not None:
        kw["seed"] = seed
    if not kw:
        return config
    cases = tuple(with_overrides(c, samples=samples, seed=seed) for c in config.cases)
    return dataclasses.replace(config, cases=cases, **kw)


# ---------------------------------------------------------------------------
# Sweep statistics

@dataclass
class SweepStats:
    """Pointwise KL statistics of a sweep (population std convention)."""

    times: np.ndarray
    kl_mean: np.ndarray
    kl_std: np.ndarray
    n_samples: int
    final_kl: np.ndarray
    converged: np.ndarray


def convergence_flag(kl: np.ndarray, threshold: float = CONVERGENCE_KL,
                     window: int = CONVERGENCE_WINDOW) -> bool:
    """True when the KL stayed below ``threshold`` over the trailing records."""
    kl = np.asarray(kl)
    tail = kl[-min(window, kl.size):]
    return bool(np.all(tail < threshold))


def aggregate_stats(trajectories, reference=None) -> SweepStats:
    """Pointwise mean/std of KL across a sweep's trajectories.

    All trajectories must share the recording grid.  If ``reference`` is
    given, the KL series are recomputed from the recorded marginals against
    it; otherwise the stored series are used.
    """
    trajectories = list(trajectories)
    if not trajectories:
        return SweepStats(times=np.zeros(0), kl_mean=np.zeros(0),
                          kl_std=np.zeros(0), n_samples=0,
                          final_kl=np.zeros(0), converged=np.zeros(0, dtype=bool))
    times = trajectories[0].times
    for traj in trajectories[1:]:
        if traj.times.shape != times.shape or np.any(traj.times != times):
            raise ValueError("trajectories do not share recording times")
    if reference is None:
        kls = np.stack([traj.kl for traj in trajectories])
    else:
        x_ref, y_ref = reference
        kls = np.stack([
            np.array([mmga.kl_to_equilibrium(traj.x_marg[i], traj.y_marg[i],
                                             x_ref, y_ref)
                      for i in range(len(traj))])
            for traj in trajectories
        ])
    return SweepStats(
        times=times.copy(),
        kl_mean=kls.mean(axis=0),
        kl_std=kls.std(axis=0),            # population convention
        n_samples=len(trajectories),
        final_kl=kls[:, -1].copy(),
        converged=np.array([convergence_flag(k) for k in kls]),
    )


# ---------------------------------------------------------------------------
# Initial conditions

def initial_profile(config: ExperimentConfig, rng: np.random.Generator):
    """Draw one sample's initial strategy pair for a configuration."""
    spec, mem = config.game, config.memory
    m = spec.m
    if config.init == "random":
        x = game_core.sample_interior_strategy(rng, game_core.state_count(mem.n_x, m), m)
        y = game_core.sample_interior_strategy(rng, game_core.state_count(mem.n_y, m), m)
        return x, y
    if config.init == "near-symmetric":
        # Start just off the action-swap-symmetric subspace (whose marginals
        # are exactly 1/2): large table amplitude so the symmetric-memory
        # instability acts, tiny initial KL so its growth is unambiguous.
        if (m, mem.n_x, mem.n_y) != (2, 1, 1):
            raise ConfigurationError("near-symmetric init requires the 2-action (1,1) setting")
        a, b, c, d = rng.uniform(0.15, 0.85, 4)
        eps = 0.05
        xv = np.array([a, b, 1.0 - b, 1.0 - a]) + rng.uniform(-eps, eps, 4)
        yv = np.array([c, d, 1.0 - d, 1.0 - c]) + rng.uniform(-eps, eps, 4)
        x = game_core.clamp_interior(np.column_stack([xv, 1.0 - xv]))
        y = game_core.clamp_interior(np.column_stack([yv, 1.0 - yv]))
        return x, y
    # near-unstable: a fixed point with negative concavity indicator, with
    # Y's strategy nudged off the equilibrium value by 1e-2
    if (m, mem.n_x, mem.n_y) != (2, 1, 0):
        raise ConfigurationError("near-unstable init requires the 2-action (1,0) setting")
    u4 = analytic_2x2.Payoff4.from_spec(spec)
    nash = analytic_2x2.original_nash(u4)
    while True:
        point = analytic_2x2.sample_equilibrium_manifold(rng, u4, 1, margin=0.05)[0]
        if analytic_2x2.concavity_indicator(point[:4]) < -0.05:
            break
    y0 = min(max(nash.y_o + 1e-2, 1e-6), 1.0 - 1e-6)
    return analytic_2x2.table_profile(point[:4], y0)


def _resolve_reference(config: ExperimentConfig):
    if config.reference is not None:
        return config.reference
    ref = reference_for(config.game, config.game_name)
    if ref is None:
        raise ConfigurationError(
            "no automatic equilibrium reference for this game; set reference"
        )
    return ref


def run_sample(config: ExperimentConfig, sample_index: int) -> Trajectory:
    """Run one sample of a sweep (deterministic in (config.seed, sample_index))."""
    rng = np.random.default_rng([config.seed, sample_index])
    x0, y0 = initial_profile(config, rng)
    reference = _resolve_reference(config)
    if config.algorithm == "discrete":
        return mmga.run_discretized(x0, y0, config.game, config.memory,
                                    config.learn, reference=reference)
    return mmga.run_continuous(x0, y0, config.game, config.memory,
                               config.learn, reference=reference)


# ---------------------------------------------------------------------------
# Serialization

def trajectory_columns(traj: Trajectory, spec: GameSpec, mem: MemoryConfig):
    """Ordered (name, column) pairs of the trajectory CSV schema."""
    m = spec.m
    cols = [("step" if traj.mode == "discrete" else "t", traj.times)]
    cols.append(("u_st", traj.u_st))
    cols.append(("kl", traj.kl))
    for a in range(m):
        cols.append((f"x_marg_{a}", traj.x_marg[:, a]))
    for b in range(m):
        cols.append((f"y_marg_{b}", traj.y_marg[:, b]))
    for s in range(traj.x_tables.shape[1]):
        for a in range(m):
            cols.append((f"x_s{s}_a{a}", traj.x_tables[:, s, a]))
    for s in range(traj.y_tables.shape[1]):
        for b in range(m):
            cols.append((f"y_s{s}_b{b}", traj.y_tables[:, s, b]))
    # the indicator column is part of the continuous-mode schema only
    if traj.indicator is not None and traj.mode == "continuous":
        cols.append(("indicator", traj.indicator))
    return cols


def write_trajectory_csv(path, traj: Trajectory, spec: GameSpec, mem: MemoryConfig):
    cols = trajectory_columns(traj, spec, mem)
    names = [name for name, _ in cols]
    arrays = [np.asarray(col) for _, col in cols]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(len(traj)):
            fields = []
            for name, arr in zip(names, arrays):
                if name == "step":
                    fields.append(str(int(arr[i])))
                else:
                    fields.append(FLOAT_FMT % arr[i])
            fh.write(",".join(fields) + "\n")


def write_stats_csv(path, stats: SweepStats):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("time,kl_mean,kl_std,n_samples\n")
        for i in range(stats.times.size):
            fh.write(",".join([
                FLOAT_FMT % stats.times[i],
                FLOAT_FMT % stats.kl_mean[i],
                FLOAT_FMT % stats.kl_std[i],
                str(stats.n_samples),
            ]) + "\n")


def _config_dict(config: ExperimentConfig) -> dict:
    x_ref, y_ref = (None, None)
    if config.reference is not None:
        x_ref = [float(v) for v in config.reference[0]]
        y_ref = [float(v) for v in config.reference[1]]
    out = {
        "name": config.name,
        "game": ({"name": config.game_name} if config.game_name
                 else {"matrix": config.game.payoff.tolist()}),
        "memory": {"n_x": config.memory.n_x, "n_y": config.memory.n_y},
        "algorithm": config.algorithm,
        "eta": config.learn.eta,
        "gamma": config.learn.gamma,
        "steps": config.learn.steps,
        "record_every": config.learn.record_every,
        "rk4_h": config.learn.rk4_h,
        "t_end": config.learn.t_end,
        "samples": config.samples,
        "seed": config.seed,
        "init": config.init,
        "reference": {"x": x_ref, "y": y_ref},
    }
    if config.cases:
        out["cases"] = [c.name for c in config.cases]
    return out


_CONFIG_KEYS = {"game", "memory", "algorithm", "eta", "gamma", "steps",
                "rk4_h", "t_end", "samples", "seed", "record_every",
                "reference"}


def load_config(path) -> ExperimentConfig:
    """Build an ExperimentConfig from a JSON config file.

    Recognized keys: game{name|matrix}, memory{n_x, n_y},
    algorithm (discrete|continuous), eta, gamma, steps, rk4_h, t_end,
    samples, seed, record_every, reference ("auto" or {x: [...], y: [...]}).
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError("config file must hold a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")

    game_raw = raw.get("game")
    if not isinstance(game_raw, dict) or not ({"name", "matrix"} & set(game_raw)):
        raise ConfigurationError('config needs game: {"name": ...} or {"matrix": ...}')
    game_name = game_raw.get("name")
    try:
        if game_name is not None:
            spec = builtin_game(game_name)
        else:
            spec = GameSpec(np.asarray(game_raw["matrix"], dtype=float))
        mem_raw = raw.get("memory", {})
        mem = MemoryConfig(int(mem_raw.get("n_x", 0)), int(mem_raw.get("n_y", 0)))
        learn = LearnConfig(
            eta=float(raw.get("eta", 1e-3)),
            gamma=float(raw.get("gamma", 1e-6)),
            steps=int(raw.get("steps", 200_000)),
            record_every=int(raw.get("record_every", 1000)),
            rk4_h=float(raw.get("rk4_h", 2e-2)),
            t_end=float(raw.get("t_end", 180.0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad config value: {exc}") from exc

    ref_raw = raw.get("reference", "auto")
    if ref_raw == "auto":
        reference = reference_for(spec, game_name)
    elif isinstance(ref_raw, dict) and {"x", "y"} <= set(ref_raw):
        reference = (np.asarray(ref_raw["x"], dtype=float),
                     np.asarray(ref_raw["y"], dtype=float))
    else:
        raise ConfigurationError('reference must be "auto" or {"x": [...], "y": [...]}')

    return ExperimentConfig(
        name="custom",
        game=spec,
        memory=mem,
        algorithm=raw.get("algorithm", "discrete"),
        learn=learn,
        samples=int(raw.get("samples", 1)),
        seed=int(raw.get("seed", 0)),
        reference=reference,
        game_name=game_name,
    )


def run_experiment(config: ExperimentConfig, out_dir) -> SweepStats | dict:
    """Run a sweep, writing trajectory CSVs, a stats CSV, and a manifest.

    Composite configs run each member case into a subdirectory and return
    a dict of per-case stats.  Per-sample numerical failures are recorded
    in the manifest without aborting the remaining samples.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.cases:
        results = {}
        for case in config.cases:
            results[case.name] = run_experiment(case, out_dir / case.name)
        manifest = {
            "library_version": __version__,
            "config": _config_dict(config),
            "cases": [c.name for c in config.cases],
        }
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return results

    trajectories = []
    sample_records = []
    for i in range(config.samples):
        entry = {"index": i, "seed": [config.seed, i],
                 "file": f"traj_{i:03d}.csv"}
        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                traj = run_sample(config, i)
            entry["status"] = "ok"
            entry["final_kl"] = float(traj.kl[-1])
            entry["converged"] = convergence_flag(traj.kl)
            entry["clamp_events"] = traj.clamp_events
            entry["warnings"] = [str(w.message) for w in caught]
            write_trajectory_csv(out_dir / entry["file"], traj,
                                 config.game, config.memory)
            trajectories.append(traj)
        except (mmga.DynamicsError, np.linalg.LinAlgError, ValueError,
                RuntimeError) as exc:
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
        sample_records.append(entry)

    stats = aggregate_stats(trajectories)
    write_stats_csv(out_dir / "stats.csv", stats)
    manifest = {
        "library_version": __version__,
        "config": _config_dict(config),
        "std_convention": "population",
        "convergence_flag": {"threshold": CONVERGENCE_KL,
                             "window": CONVERGENCE_WINDOW},
        "samples": sample_records,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return stats
