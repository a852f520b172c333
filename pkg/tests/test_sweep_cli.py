"""Sweep planning/CSV contract and the command-line interface."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from ionres.cli import cli_main
from ionres.model import BathSpec, ChainSpec, DriveSpec, IntegratorSpec, SimulationSpec
from ionres.sweep import (
    CSV_HEADER,
    SweepPlan,
    SweepRow,
    predicted_zeros_in_range,
    read_rows_csv,
    run_sweep,
    write_rows_csv,
)


def small_base(onsite_ratio=0, omega=2e8):
    """Two-site chain, cheap enough for sweeping in tests; resonances at
    zeros of J_0 when onsite_ratio = 0."""
    return SimulationSpec(
        chain=ChainSpec(2, hopping=5e7, onsite_base=onsite_ratio * omega),
        drive=DriveSpec(0.0, omega),
        baths=BathSpec(1e7, 1e7, n_source=1.0, n_drain=0.0),
        integrator=IntegratorSpec(),
    )


SMALL_CONFIG = """\
# two-site chain for fast CLI runs
n_sites = 2
hopping = 5e7
onsite_base = 0
amplitude = 0
angular_frequency = 2e8
gamma_source = 1e7
gamma_drain = 1e7
n_source = 1
n_drain = 0
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.cfg"
    path.write_text(SMALL_CONFIG)
    return str(path)


class TestPlanning:
    def test_predicted_zeros_for_integer_ratio(self):
        zeros = predicted_zeros_in_range(small_base(onsite_ratio=8), 9.5, 18.5)
        assert len(zeros) == 2
        assert zeros[0] == pytest.approx(12.2250922, rel=1e-6)
        assert zeros[1] == pytest.approx(16.0377742, rel=1e-6)

    def test_no_zeros_for_incommensurate_ratio(self):
        base = small_base()
        bad = SimulationSpec(
            ChainSpec(2, hopping=5e7, onsite_base=8.37 * 2e8),
            base.drive, base.baths, base.integrator)
        assert predicted_zeros_in_range(bad, 0.0, 100.0) == ()

    def test_grid_bounds_checked(self):
        plan = SweepPlan(small_base(), amp_min=5.0, amp_max=1.0, amp_points=5,
                         gamma_list=(0.0,))
        with pytest.raises(ValueError):
            plan.grid()

    def test_models_selector(self):
        plan = SweepPlan(small_base(), 0.0, 1.0, 2, (0.0,), models="both")
        assert plan.model_list() == ["quantum", "classical"]
        bad = SweepPlan(small_base(), 0.0, 1.0, 2, (0.0,), models="wrong")
        with pytest.raises(ValueError):
            bad.model_list()


class TestRowsCsv:
    def test_row_format(self):
        row = SweepRow(1.25, 5e5, "quantum", 123.456, True, 17, 0.5)
        assert row.to_csv() == "1.25,500000,quantum,123.456,true,17,0.5"
        classical = SweepRow(1.25, 0.0, "classical", 1e3, False, 99, float("nan"))
        assert classical.to_csv().endswith("false,99,")

    def test_round_trip(self, tmp_path):
        rows = (
            SweepRow(1.0, 0.0, "quantum", 10.0, True, 3, 0.25),
            SweepRow(2.0, 5e5, "classical", 20.0, False, 7, float("nan")),
        )
        path = tmp_path / "rows.csv"
        write_rows_csv(rows, path)
        assert path.read_text().splitlines()[0] == CSV_HEADER
        back = read_rows_csv(path)
        assert back[0] == rows[0]
        assert back[1].model == "classical" and np.isnan(back[1].incoherence)

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            read_rows_csv(path)


class TestRunSweep:
    def test_small_quantum_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        plan = SweepPlan(small_base(), amp_min=1.0, amp_max=3.5, amp_points=15,
                         gamma_list=(0.0,), output=str(out))
        result = run_sweep(plan)
        # 15 grid points + the J_0 zero at 2.405 inserted
        assert len(result.rows) == 16
        assert result.all_converged
        assert result.predicted_zeros == (pytest.approx(2.4048256, rel=1e-6),)
        assert sorted(r.omega1_over_omega for r in result.rows) == [
            r.omega1_over_omega for r in result.rows]
        assert out.exists()
        sidecar = json.loads(
            (tmp_path / "sweep.resonances.json").read_text())
        assert len(sidecar["resonances"]) == 1
        assert sidecar["coherence_fit"] is None  # < 3 gamma values

    def test_deterministic_output_across_worker_counts(self, tmp_path):
        outs = []
        for workers in (1, 2):
            out = tmp_path / f"sweep_w{workers}.csv"
            plan = SweepPlan(small_base(), 1.0, 3.0, 12, (0.0, 1e6),
                             output=str(out), workers=workers)
            run_sweep(plan)
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_classical_rows_have_blank_incoherence(self, tmp_path):
        out = tmp_path / "classical.csv"
        plan = SweepPlan(small_base(), 1.0, 2.0, 3, (0.0,), models="classical",
                         output=str(out))
        run_sweep(plan)
        for line in out.read_text().splitlines()[1:]:
            assert line.endswith(",")  # empty incoherence column
            assert line.split(",")[2] == "classical"


class TestCli:
    def test_bessel_subcommand_prints_zeros(self, capsys):
        assert cli_main(["bessel", "--order", "0", "--count", "2"]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "2.404826"
        assert out[1] == "5.520078"

    def test_usage_error_exits_1(self, capsys):
        assert cli_main(["bessel"]) == 1  # missing required --order
        assert cli_main(["no-such-command"]) == 1

    def test_missing_config_exits_1(self, capsys):
        assert cli_main(["current", "--config", "/nonexistent.cfg"]) == 1
        assert "not found" in capsys.readouterr().err

    def test_config_error_exits_1(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus_key = 1\n")
        assert cli_main(["current", "--config", str(cfg)]) == 1
        assert "bogus_key" in capsys.readouterr().err

    def test_current_single_site_analytic(self, tmp_path, capsys):
        cfg = tmp_path / "one.cfg"
        cfg.write_text(
            "n_sites = 1\nangular_frequency = 2e8\n"
            "gamma_source = 1e8\ngamma_drain = 1e8\nn_source = 1\nn_drain = 0\n"
        )
        assert cli_main(["current", "--config", str(cfg)]) == 0
        value = float(capsys.readouterr().out.strip())
        assert value == pytest.approx(5e7, rel=1e-3)  # Gamma/2

    def test_current_json_and_overrides(self, small_config, capsys):
        code = cli_main(["current", "--config", small_config,
                         "--set", "gamma_drain=2e7", "--json"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["converged"]
        assert payload["current"] > 0

    def test_simulate_writes_trajectory(self, small_config, tmp_path, capsys):
        out = tmp_path / "traj.csv"
        code = cli_main(["simulate", "--config", small_config,
                         "--out", str(out), "--json"])
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "t,pop_1,pop_2,incoherence,p_sink"
        payload = json.loads(capsys.readouterr().out)
        assert payload["samples"] == len(out.read_text().splitlines()) - 1

    def test_baseline_subcommand(self, small_config, capsys):
        assert cli_main(["baseline", "--config", small_config]) == 0
        assert float(capsys.readouterr().out.strip()) > 0

    def test_sweep_subcommand(self, small_config, tmp_path, capsys):
        out = tmp_path / "sweep.csv"
        code = cli_main([
            "sweep", "--config", small_config, "--out", str(out),
            "--set", "amp_min=1", "--set", "amp_max=3", "--set", "amp_points=12",
            "--set", "gamma_list=0", "--workers", "1",
        ])
        assert code == 0
        assert "predicted zeros" in capsys.readouterr().out
        assert out.read_text().splitlines()[0] == CSV_HEADER

    def test_sweep_missing_keys_exits_1(self, small_config, capsys):
        assert cli_main(["sweep", "--config", small_config]) == 1
        assert "amp_min" in capsys.readouterr().err

    def test_estimate_subcommand_json(self, capsys):
        assert cli_main(["estimate", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["tunneling_probability"] == pytest.approx(3.4e-5, rel=0.1)
        assert payload["membrane_capacitance_F"] == pytest.approx(7.85e-15, rel=0.01)

    def test_console_script_entry_point(self, small_config):
        proc = subprocess.run(
            [sys.executable, "-m", "ionres.cli", "bessel", "--order", "8"],
            capture_output=True, text=True, env={**os.environ},
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "12.225092"
