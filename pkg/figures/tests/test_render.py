"""Render every figure kind from real experiment output, deterministically.

The fixtures produce CSVs by invoking the experiment CLI itself, so these
tests exercise the documented external interfaces end to end.
"""

import hashlib
import subprocess
import sys

import pytest

from memgame_figures import PlotJob, SchemaError, render
from memgame_figures.cli import main as figures_main


def run_primary(args, cwd):
    cmd = [sys.executable, "-m", "memgame.cli"] + args
    proc = subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def runs(tmp_path_factory):
    """CSV bundles from the acceptance presets (reduced sample counts)."""
    base = tmp_path_factory.mktemp("runs")
    run_primary(["run", "--preset", "fig3", "--out", str(base / "fig3")], base)
    run_primary(["run", "--preset", "fig4a", "--samples", "2",
                 "--out", str(base / "fig4a")], base)
    run_primary(["run", "--preset", "fig5a", "--samples", "1",
                 "--out", str(base / "fig5a")], base)
    run_primary(["run", "--preset", "fig5b", "--samples", "1",
                 "--out", str(base / "fig5b")], base)
    run_primary(["run", "--preset", "figA1_m2_10", "--samples", "3",
                 "--out", str(base / "figA1_m2_10")], base)
    return base


def checksum(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def render_twice(job_kwargs, tmp_path, name):
    out1 = tmp_path / f"{name}_1.png"
    out2 = tmp_path / f"{name}_2.png"
    render(PlotJob(out=str(out1), **job_kwargs))
    render(PlotJob(out=str(out2), **job_kwargs))
    assert out1.stat().st_size > 1000
    assert out1.read_bytes() == out2.read_bytes()
    return out1


class TestAllKindsFromAcceptanceRuns:
    def test_acceptance_all_kinds_render_and_repeat_byte_identical(self, runs, tmp_path):
        jobs = {
            "timeseries": dict(inputs=[str(runs / "fig3" / "traj_000.csv")],
                               kind="timeseries"),
            "phase2d": dict(inputs=[str(runs / "fig4a" / f"traj_00{i}.csv")
                                    for i in range(2)],
                            kind="phase2d", reference=(0.5, 0.5)),
            "phase3d": dict(inputs=[str(runs / "fig3" / "traj_000.csv")],
                            kind="phase3d", reference=(0.5, 0.5)),
            "simplex": dict(inputs=[str(runs / "fig5a" / "traj_000.csv")],
                            kind="simplex"),
            "klbands": dict(inputs=[str(runs / "figA1_m2_10" / "stats.csv"),
                                    str(runs / "fig4a" / "stats.csv")],
                            kind="klbands"),
        }
        for name, kwargs in jobs.items():
            render_twice(kwargs, tmp_path, name)
            print(f"PASS: {name} rendered; repeat render byte-identical")

    def test_simplex_four_actions(self, runs, tmp_path):
        render_twice(dict(inputs=[str(runs / "fig5b" / "traj_000.csv")],
                          kind="simplex",
                          reference=([0.25] * 4, [0.25] * 4)),
                     tmp_path, "simplex4")

    def test_inputs_not_mutated(self, runs, tmp_path):
        path = runs / "fig3" / "traj_000.csv"
        before = checksum(path)
        render(PlotJob(inputs=[str(path)], kind="timeseries",
                       out=str(tmp_path / "x.png")))
        assert checksum(path) == before


class TestSchemaValidation:
    def test_phase3d_requires_indicator(self, runs, tmp_path):
        with pytest.raises(SchemaError):
            render(PlotJob(inputs=[str(runs / "fig4a" / "traj_000.csv")],
                           kind="phase3d", out=str(tmp_path / "x.png")))

    def test_klbands_rejects_trajectory(self, runs, tmp_path):
        with pytest.raises(SchemaError):
            render(PlotJob(inputs=[str(runs / "fig3" / "traj_000.csv")],
                           kind="klbands", out=str(tmp_path / "x.png")))

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotJob(inputs=["a.csv"], kind="pie", out=str(tmp_path / "x.png"))

    def test_empty_inputs(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotJob(inputs=[], kind="phase2d", out=str(tmp_path / "x.png"))

    def test_non_csv_rejected(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("step,u_st\n1,notanumber\n")
        with pytest.raises(SchemaError):
            render(PlotJob(inputs=[str(bad)], kind="timeseries",
                           out=str(tmp_path / "x.png")))


class TestZeroExtentData:
    def test_constant_trajectory_renders(self, tmp_path):
        # two identical records: zero-extent axes must not crash rendering
        header = ("t,u_st,kl,x_marg_0,x_marg_1,y_marg_0,y_marg_1,"
                  "x_s0_a0,x_s0_a1,x_s1_a0,x_s1_a1,x_s2_a0,x_s2_a1,"
                  "x_s3_a0,x_s3_a1,y_s0_b0,y_s0_b1,indicator")
        row = "0,0,0.01,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.12"
        row2 = "1," + row.split(",", 1)[1]
        path = tmp_path / "const.csv"
        path.write_text(header + "\n" + row + "\n" + row2 + "\n")
        for kind in ("timeseries", "phase2d", "phase3d"):
            out = tmp_path / f"const_{kind}.png"
            render(PlotJob(inputs=[str(path)], kind=kind, out=str(out)))
            assert out.exists()


class TestCLI:
    def test_render_via_cli(self, runs, tmp_path, capsys):
        out = tmp_path / "cli.png"
        code = figures_main(["render", "--kind", "phase2d",
                             "--in", str(runs / "fig4a" / "traj_000.csv"),
                             str(runs / "fig4a" / "traj_001.csv"),
                             "--out", str(out), "--ref", "0.5", "0.5"])
        assert code == 0
        assert out.exists()
        assert "wrote" in capsys.readouterr().out

    def test_schema_error_exit_1(self, runs, tmp_path):
        code = figures_main(["render", "--kind", "phase3d",
                             "--in", str(runs / "fig4a" / "traj_000.csv"),
                             "--out", str(tmp_path / "x.png")])
        assert code == 1

    def test_bad_arguments_exit_1(self):
        assert figures_main(["render", "--kind", "mystery", "--in", "a",
                             "--out", "b"]) == 1
