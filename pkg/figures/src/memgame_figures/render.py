"""Figure renderers for experiment CSVs.

Five kinds are supported:

- ``timeseries``: strategy components and marginals of one run over time.
- ``phase2d``: trajectories in the (x marginal, y marginal) plane, colored
  by time, with an optional reference-point marker.
- ``phase3d``: one run in (x marginal, y marginal, indicator) space with
  the fixed-point line (solid where stable, dashed where unstable).
- ``simplex``: marginal trajectories inside barycentric simplexes for 3-
  or 4-action games (the 3-simplex is drawn as a tetrahedron shadow).
- ``klbands``: mean KL curves with +-1 std bands from stats CSVs.

Rendering is deterministic: fixed canvas, fonts, and colormaps, and no
timestamps in the output metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from .csvio import SchemaError, read_stats, read_trajectory, time_axis

KINDS = ("timeseries", "phase2d", "phase3d", "simplex", "klbands")

TIME_CMAP = "coolwarm"   # blue = old, red = new
FIGSIZE = (7.0, 5.0)
DPI = 130


@dataclass
class PlotJob:
    """One rendering request: inputs, figure kind, output, styling."""

    inputs: list
    kind: str
    out: str
    color_by_time: bool = True
    reference: tuple | None = None   # (x_ref, y_ref) marker for phase plots
    title: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("no input files")


def render(job: PlotJob) -> str:
    """Render a job to its output image path (returned)."""
    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    try:
        _RENDERERS[job.kind](fig, job)
        if job.title:
            fig.suptitle(job.title)
        fig.savefig(job.out, metadata={"Software": "memgame-figures"})
    finally:
        plt.close(fig)
    return job.out


def _timed_segments(ax, xs, ys, ts):
    pts = np.column_stack([xs, ys]).reshape(-1, 1, 2)
    segs = np.concatenate([pts[:-1], pts[1:]], axis=1)
    lc = LineCollection(segs, cmap=TIME_CMAP, linewidths=1.2)
    lc.set_array(ts[:-1])
    ax.add_collection(lc)
    return lc


def _render_timeseries(fig, job: PlotJob):
    table = read_trajectory(job.inputs[0])
    t, tname = time_axis(table)
    ax = fig.add_subplot(111)
    xcols = [c for c in table.columns if c.startswith("x_s") and c.endswith("_a0")]
    for name in xcols:
        ax.plot(t, table[name], linewidth=1.0, label=name.replace("_a0", ""))
    ax.plot(t, table["x_marg_0"], "k-", linewidth=2.0, label="x marginal")
    ax.plot(t, table["y_marg_0"], "k--", linewidth=2.0, label="y marginal")
    ax.set_xlabel(tname)
    ax.set_ylabel("probability of first action")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(loc="upper right", fontsize=7, ncol=2)


def _render_phase2d(fig, job: PlotJob):
    ax = fig.add_subplot(111)
    lc = None
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, path in enumerate(job.inputs):
        table = read_trajectory(path)
        t, _ = time_axis(table)
        xs = table["x_marg_0"]
        ys = table["y_marg_0"]
        if job.color_by_time:
            # normalize each trajectory's own clock for the shared colormap
            span = t[-1] - t[0] if t[-1] > t[0] else 1.0
            lc = _timed_segments(ax, xs, ys, (t - t[0]) / span)
        else:
            ax.plot(xs, ys, linewidth=1.0, color=cycle[i % len(cycle)])
        ax.plot([xs[0]], [ys[0]], marker="o", markersize=3,
                color="tab:blue" if job.color_by_time else cycle[i % len(cycle)])
    if job.color_by_time and lc is not None:
        cbar = fig.colorbar(lc, ax=ax)
        cbar.set_label("time (normalized)")
    if job.reference is not None:
        ax.plot([job.reference[0]], [job.reference[1]], marker="x",
                markersize=10, color="black", markeredgewidth=2)
    ax.set_xlabel("X marginal (first action)")
    ax.set_ylabel("Y marginal (first action)")
    ax.set_xlim(-0.02, 1.02)
    ax.set_ylim(-0.02, 1.02)
    ax.set_aspect("equal")


def _render_phase3d(fig, job: PlotJob):
    table = read_trajectory(job.inputs[0])
    if not table.has("indicator"):
        raise SchemaError(f"{job.inputs[0]}: phase3d needs the indicator column "
                          "(2-action (1,0)-memory continuous runs)")
    t, _ = time_axis(table)
    xs = table["x_marg_0"]
    ys = table["y_marg_0"]
    ind = table["indicator"]
    ax = fig.add_subplot(111, projection="3d")
    span = t[-1] - t[0] if t[-1] > t[0] else 1.0
    colors = plt.get_cmap(TIME_CMAP)((t - t[0]) / span)
    for i in range(len(t) - 1):
        ax.plot(xs[i:i + 2], ys[i:i + 2], ind[i:i + 2],
                color=colors[i], linewidth=1.2)
    ref = job.reference if job.reference is not None else (0.5, 0.5)
    lo = min(ind.min(), -0.25)
    hi = max(ind.max(), 0.25)
    # the fixed-point set projects onto a vertical line through the
    # equilibrium marginals: stable above zero, unstable below
    ax.plot([ref[0]] * 2, [ref[1]] * 2, [0.0, hi], color="gray",
            linestyle="-", linewidth=2.0)
    ax.plot([ref[0]] * 2, [ref[1]] * 2, [lo, 0.0], color="gray",
            linestyle="--", linewidth=2.0)
    ax.plot([ref[0]], [ref[1]], [0.0], marker="x", color="black", markersize=8)
    ax.set_xlabel("X marginal")
    ax.set_ylabel("Y marginal")
    ax.set_zlabel("concavity indicator")


def _simplex_vertices(m: int) -> np.ndarray:
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]])
    if m == 3:
        return tri
    if m == 4:
        # tetrahedron shadow: outer triangle plus its centroid
        centroid = tri.mean(axis=0)
        return np.vstack([tri, centroid])
    raise SchemaError(f"simplex rendering supports m = 3 or 4, got m = {m}")


def _barycentric(points: np.ndarray, vertices: np.ndarray) -> np.ndarray:
    return points @ vertices


def _draw_simplex_frame(ax, vertices, labels):
    m = len(vertices)
    for i in range(m):
        for j in range(i + 1, m):
            ax.plot(*zip(vertices[i], vertices[j]), color="lightgray",
                    linewidth=1.0, zorder=0)
    offsets = {0: (-0.03, -0.04), 1: (0.03, -0.04), 2: (0.0, 0.035), 3: (0.0, 0.03)}
    for i, (vx, vy) in enumerate(vertices):
        dx, dy = offsets.get(i, (0.0, 0.03))
        ax.text(vx + dx, vy + dy, labels[i], ha="center", va="center", fontsize=9)
    ax.set_aspect("equal")
    ax.set_axis_off()


def _render_simplex(fig, job: PlotJob):
    tables = [read_trajectory(p) for p in job.inputs]
    m = tables[0].group("x_marg").shape[1]
    vertices = _simplex_vertices(m)
    ax_x = fig.add_subplot(121)
    ax_y = fig.add_subplot(122)
    for ax, prefix, who in ((ax_x, "x_marg", "a"), (ax_y, "y_marg", "b")):
        _draw_simplex_frame(ax, vertices, [f"{who}{i + 1}" for i in range(m)])
    for table in tables:
        t, _ = time_axis(table)
        span = t[-1] - t[0] if t[-1] > t[0] else 1.0
        for ax, prefix in ((ax_x, "x_marg"), (ax_y, "y_marg")):
            marg = table.group(prefix)
            if marg.shape[1] != m:
                raise SchemaError(f"{table.path}: mixed action counts in inputs")
            pts = _barycentric(marg, vertices)
            if job.color_by_time:
                _timed_segments(ax, pts[:, 0], pts[:, 1], (t - t[0]) / span)
            else:
                ax.plot(pts[:, 0], pts[:, 1], linewidth=1.0)
    if job.reference is not None:
        for ax, ref in ((ax_x, job.reference[0]), (ax_y, job.reference[1])):
            pt = _barycentric(np.asarray(ref)[None, :], vertices)
            ax.plot(pt[:, 0], pt[:, 1], marker="x", color="black", markersize=9)
    ax_x.set_title("X marginalized strategy", fontsize=10)
    ax_y.set_title("Y marginalized strategy", fontsize=10)


def _render_klbands(fig, job: PlotJob):
    ax = fig.add_subplot(111)
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, path in enumerate(job.inputs):
        stats = read_stats(path)
        t = stats["time"]
        mean = stats["kl_mean"]
        std = stats["kl_std"]
        color = cycle[i % len(cycle)]
        label = str(path).rsplit("/", 1)[-1]
        ax.plot(t, mean, color=color, linewidth=1.5, label=label)
        ax.fill_between(t, np.maximum(mean - std, 1e-300), mean + std,
                        color=color, alpha=0.25, linewidth=0)
    ax.set_yscale("log")
    ax.set_xlabel("time")
    ax.set_ylabel("KL divergence to equilibrium")
    ax.legend(loc="upper right", fontsize=7)


_RENDERERS = {
    "timeseries": _render_timeseries,
    "phase2d": _render_phase2d,
    "phase3d": _render_phase3d,
    "simplex": _render_simplex,
    "klbands": _render_klbands,
}
