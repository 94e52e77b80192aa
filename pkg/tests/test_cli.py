import json

import pytest

from hotcold.cli import main


def run_cli(args):
    return main(list(args))


def test_simulate_writes_trace_and_metrics(tmp_path, capsys):
    out = tmp_path / "run"
    code = run_cli(
        ["--seed", "7", "--out-dir", str(out), "--set", "world.duration_s=20", "simulate"]
    )
    assert code == 0
    trace = (out / "trace.csv").read_text().splitlines()
    assert len(trace) == 41
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["total_cycles"] == 40
    assert "average distance" in capsys.readouterr().out


def test_simulate_rerun_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    args = ["--seed", "11", "--set", "world.duration_s=30", "--set", "channel.shadowing_sigma_db=2"]
    assert run_cli(args + ["--out-dir", str(out_a), "simulate"]) == 0
    assert run_cli(args + ["--out-dir", str(out_b), "simulate"]) == 0
    assert (out_a / "trace.csv").read_bytes() == (out_b / "trace.csv").read_bytes()
    assert (out_a / "metrics.json").read_bytes() == (out_b / "metrics.json").read_bytes()


def test_quick_flag_shrinks_run(tmp_path):
    out = tmp_path / "quick"
    assert run_cli(["--quick", "--seed", "1", "--out-dir", str(out), "simulate"]) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["total_cycles"] == 400  # 200 s at 0.5 s cycles


def test_explicit_set_beats_quick(tmp_path):
    out = tmp_path / "quickset"
    code = run_cli(
        ["--quick", "--seed", "1", "--out-dir", str(out),
         "--set", "world.duration_s=30", "simulate"]
    )
    assert code == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["total_cycles"] == 60


def test_grid_command_with_overrides(tmp_path):
    out = tmp_path / "grid"
    code = run_cli(
        [
            "--seed",
            "5",
            "--out-dir",
            str(out),
            "--runs",
            "1",
            "--set",
            "world.duration_s=10",
            "--set",
            "grid.sws_values=4",
            "--set",
            "grid.sigma_values=0,2",
            "--set",
            "grid.comparison_sws=4",
            "grid",
        ]
    )
    assert code == 0
    for name in ("grid_runs.csv", "fig5.csv", "fig6.csv", "fig7.csv", "fig8.csv", "fig9.csv", "fig10.csv"):
        assert (out / name).exists(), name
    runs = (out / "grid_runs.csv").read_text().splitlines()
    assert len(runs) == 1 + 2 + 2 + 2  # hotcold, trilateration, static x 2 sigmas


def test_rotation_sweep_command(tmp_path, capsys):
    out = tmp_path / "rot"
    assert run_cli(["--out-dir", str(out), "rotation-sweep"]) == 0
    assert "best angle 139" in capsys.readouterr().out
    fig2 = (out / "fig2.csv").read_text().splitlines()
    assert fig2[0].startswith("phi_deg,eps_0,eps_1")
    assert len(fig2) == 1 + 23
    assert "X" in fig2[15]  # phi=135 has unreachable bearings at small eps
    fig3 = (out / "fig3.csv").read_text().splitlines()
    assert fig3[0] == "phi_deg,overall_mean_rotations,percent_valid"


def test_verify_lemmas_command(capsys, tmp_path):
    assert run_cli(["--out-dir", str(tmp_path), "verify-lemmas"]) == 0
    assert "violations 0" in capsys.readouterr().out


def test_scenario_command(tmp_path):
    out = tmp_path / "scen"
    code = run_cli(
        ["--seed", "3", "--runs", "2", "--out-dir", str(out), "scenario", "--preset", "scenario2"]
    )
    assert code == 0
    lines = (out / "fig12_scenario2.csv").read_text().splitlines()
    assert lines[0] == "iteration,time_s,distance_m"
    assert lines[1].startswith("0,0.000000,25.")


def test_report_figures_subset(tmp_path):
    out = tmp_path / "rep"
    code = run_cli(["--out-dir", str(out), "report", "--figures", "fig2,fig3"])
    assert code == 0
    assert (out / "fig2.csv").exists() and (out / "fig3.csv").exists()
    assert not (out / "fig4.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["rotation_sweep"]["best_phi_deg"] == 139
    assert summary["convergence"]["total_violations"] == 0


def test_report_grid_figures(tmp_path):
    out = tmp_path / "repgrid"
    code = run_cli(
        [
            "--seed",
            "2",
            "--runs",
            "1",
            "--out-dir",
            str(out),
            "--set",
            "world.duration_s=10",
            "--set",
            "grid.sws_values=3,4",
            "--set",
            "grid.sigma_values=0",
            "--set",
            "grid.comparison_sws=3,4",
            "report",
            "--figures",
            "fig5,fig8",
        ]
    )
    assert code == 0
    assert (out / "fig5.csv").exists() and (out / "fig8.csv").exists()
    assert not (out / "fig6.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["grid"]["best_sws_by_mean_average_distance"] in (3, 4)


def test_bad_inputs_exit_nonzero(tmp_path):
    assert run_cli(["--out-dir", str(tmp_path), "report", "--figures", "fig99"]) == 2
    assert (
        run_cli(["--out-dir", str(tmp_path), "--set", "world.duration_s=1.3", "simulate"]) == 2
    )
    assert run_cli(["--out-dir", str(tmp_path), "--set", "bogus=1", "simulate"]) == 2
    with pytest.raises(SystemExit):
        run_cli(["no-such-command"])


def test_out_dir_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("HOTCOLD_OUT_DIR", str(tmp_path / "envout"))
    assert run_cli(["--seed", "1", "--set", "world.duration_s=5", "simulate"]) == 0
    assert (tmp_path / "envout" / "trace.csv").exists()
