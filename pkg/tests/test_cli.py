"""End-to-end tests for the command-line interface.

Every test drives ``rachload.cli.main`` with an argv list and asserts on the
exit code plus whatever files or stdout the command produces.
"""

from __future__ import annotations

import io
import json
from dataclasses import replace

from rachload.cli import EXIT_INFEASIBLE, EXIT_IO, EXIT_OK, EXIT_USAGE, main
from rachload.estimators import likelihood_surface
from rachload.harness import read_records_csv
from rachload.model import ObservationSet, SelectionProfile, parse_pattern


def run(*argv: str) -> int:
    return main(list(argv))


# ---------------------------------------------------------------- simulate


def test_simulate_stdout(capsys) -> None:
    code = run("simulate", "--m", "2", "--n-high", "1", "--n-low", "1",
               "--t", "3", "--seed", "7")
    assert code == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3
    for line in lines:
        assert parse_pattern(line).num_rbs == 2


def test_simulate_is_reproducible(capsys) -> None:
    argv = ("simulate", "--m", "3", "--n-high", "2", "--n-low", "1",
            "--t", "4", "--seed", "11", "--trial", "2")
    assert run(*argv) == EXIT_OK
    first = capsys.readouterr().out
    assert run(*argv) == EXIT_OK
    assert capsys.readouterr().out == first


def test_simulate_explicit_vectors_match_uniform(capsys) -> None:
    assert run("simulate", "--m", "2", "--n-high", "1", "--n-low", "0",
               "--t", "5", "--seed", "3") == EXIT_OK
    uniform = capsys.readouterr().out
    assert run("simulate", "--p-high", "0.5,0.5", "--p-low", "0.5,0.5",
               "--n-high", "1", "--n-low", "0", "--t", "5", "--seed", "3") == EXIT_OK
    assert capsys.readouterr().out == uniform


def test_simulate_to_file(tmp_path, capsys) -> None:
    out = tmp_path / "patterns.txt"
    code = run("simulate", "--m", "2", "--n-high", "1", "--n-low", "1",
               "--t", "2", "--seed", "1", "--out", str(out))
    assert code == EXIT_OK
    assert "wrote 2 patterns" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 2


def test_simulate_unwritable_path_is_io_error(capsys) -> None:
    code = run("simulate", "--m", "2", "--n-high", "1", "--n-low", "0",
               "--out", "/nonexistent-dir/patterns.txt")
    assert code == EXIT_IO
    assert "error:" in capsys.readouterr().err


def test_simulate_needs_a_profile(capsys) -> None:
    assert run("simulate", "--n-high", "1", "--n-low", "0") == EXIT_USAGE
    assert "either --m" in capsys.readouterr().err


def test_mismatched_m_and_vectors(capsys) -> None:
    code = run("simulate", "--m", "3", "--p-high", "0.5,0.5",
               "--p-low", "0.5,0.5", "--n-high", "1", "--n-low", "0")
    assert code == EXIT_USAGE
    assert "disagrees" in capsys.readouterr().err


def test_p_high_without_p_low(capsys) -> None:
    code = run("simulate", "--p-high", "0.5,0.5", "--n-high", "1", "--n-low", "0")
    assert code == EXIT_USAGE
    assert "must be given together" in capsys.readouterr().err


# ---------------------------------------------------------------- estimate


def test_estimate_single_high_pattern(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("he\n")
    code = run("estimate", "--patterns", str(patterns), "--m", "2",
               "--estimator", "ml")
    assert code == EXIT_OK
    assert "ml: n_high=1 n_low=0" in capsys.readouterr().out


def test_estimate_both_estimators(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("hl\n")
    code = run("estimate", "--patterns", str(patterns), "--m", "2",
               "--estimator", "both")
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "ml: n_high=1 n_low=1" in out
    assert "rcml: n_high=1 n_low=1" in out


def test_estimate_reads_stdin_with_comments(monkeypatch, capsys) -> None:
    monkeypatch.setattr("sys.stdin", io.StringIO("# header comment\n\nhl  # trailing\nlh\n"))
    code = run("estimate", "--patterns", "-", "--m", "2")
    assert code == EXIT_OK
    assert "ml: n_high=1 n_low=1" in capsys.readouterr().out


def test_estimate_surface_outputs_tagged_per_estimator(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("hl\n")
    surface = tmp_path / "surface.csv"
    heatmap = tmp_path / "surface.png"
    code = run("estimate", "--patterns", str(patterns), "--m", "2",
               "--estimator", "both", "--grid-max-high", "3",
               "--grid-max-low", "3", "--surface-csv", str(surface),
               "--heatmap", str(heatmap))
    assert code == EXIT_OK
    for tag in ("ml", "rcml"):
        assert (tmp_path / f"surface.{tag}.csv").exists()
        png = tmp_path / f"surface.{tag}.png"
        assert png.stat().st_size > 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    out = capsys.readouterr().out
    assert "full likelihood surface" in out
    assert "reduced likelihood surface" in out


def test_estimate_single_estimator_surface_untagged(tmp_path) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("he\n")
    surface = tmp_path / "surface.csv"
    code = run("estimate", "--patterns", str(patterns), "--m", "2",
               "--surface-csv", str(surface))
    assert code == EXIT_OK
    assert surface.exists()
    reference = likelihood_surface(
        ObservationSet((parse_pattern("he"),)), SelectionProfile.uniform(2)
    )
    lines = surface.read_text().splitlines()
    assert lines[0].split(",")[0] == "n_high"
    assert len(lines) == reference.values.shape[0] + 1


def test_estimate_width_mismatch(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("he\n")
    code = run("estimate", "--patterns", str(patterns), "--m", "3")
    assert code == EXIT_USAGE
    assert "2 RBs" in capsys.readouterr().err


def test_estimate_bad_pattern_character(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("hq\n")
    assert run("estimate", "--patterns", str(patterns), "--m", "2") == EXIT_USAGE
    assert "position" in capsys.readouterr().err


def test_estimate_empty_pattern_file(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("# nothing here\n\n")
    assert run("estimate", "--patterns", str(patterns), "--m", "2") == EXIT_USAGE
    assert "no patterns" in capsys.readouterr().err


def test_estimate_missing_pattern_file(tmp_path) -> None:
    missing = tmp_path / "nope.txt"
    assert run("estimate", "--patterns", str(missing), "--m", "2") == EXIT_IO


def test_estimate_partial_grid_flags(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("he\n")
    code = run("estimate", "--patterns", str(patterns), "--m", "2",
               "--grid-max-high", "4")
    assert code == EXIT_USAGE
    assert "must be given together" in capsys.readouterr().err


def test_estimate_infeasible_observations(tmp_path, capsys) -> None:
    patterns = tmp_path / "obs.txt"
    patterns.write_text("eh\n")
    code = run("estimate", "--patterns", str(patterns),
               "--p-high", "1,0", "--p-low", "1,0")
    assert code == EXIT_INFEASIBLE
    assert "p_high[1] is 0" in capsys.readouterr().err


# -------------------------------------------------------------- experiment


def _tiny_experiment_args(out_path: str, *extra: str) -> tuple[str, ...]:
    return ("experiment", "--setup", "custom",
            "--p-high", "0.5,0.5", "--p-low", "0.5,0.5",
            "--t", "1", "--n-high", "1", "--n-low-range", "0:1",
            "--trials", "2", "--seed", "5", "--estimator", "ml",
            "--out", out_path, *extra)


def test_experiment_custom_writes_csv_mae_and_figure(tmp_path, capsys) -> None:
    out = tmp_path / "results.csv"
    assert run(*_tiny_experiment_args(str(out))) == EXIT_OK
    stdout = capsys.readouterr().out
    assert "wrote 4 records" in stdout
    records = read_records_csv(out)
    assert len(records) == 4  # 2 true loads x 2 trials x 1 estimator
    assert {r.estimator for r in records} == {"ml"}
    mae = tmp_path / "results_mae.csv"
    figure = tmp_path / "results_mae.png"
    assert mae.exists()
    assert figure.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_experiment_no_plots_skips_figure(tmp_path) -> None:
    out = tmp_path / "results.csv"
    assert run(*_tiny_experiment_args(str(out), "--no-plots")) == EXIT_OK
    assert (tmp_path / "results_mae.csv").exists()
    assert not (tmp_path / "results_mae.png").exists()


def test_experiment_repeat_runs_identical_modulo_runtime(tmp_path) -> None:
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    assert run(*_tiny_experiment_args(str(out_a), "--no-plots")) == EXIT_OK
    assert run(*_tiny_experiment_args(str(out_b), "--no-plots")) == EXIT_OK
    strip = [replace(r, runtime_us=0) for r in read_records_csv(out_a)]
    assert strip == [replace(r, runtime_us=0) for r in read_records_csv(out_b)]


def test_experiment_config_file_with_flag_override(tmp_path) -> None:
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "setup": "custom",
        "p_high": [0.5, 0.5],
        "p_low": [0.5, 0.5],
        "t_values": [1],
        "n_high_values": [1],
        "n_low_range": [0, 1],
        "trials": 2,
        "seed": 5,
        "estimators": ["ml"],
        "out": str(tmp_path / "from_config.csv"),
    }))
    code = run("experiment", "--config", str(config), "--trials", "1",
               "--no-plots")
    assert code == EXIT_OK
    records = read_records_csv(tmp_path / "from_config.csv")
    assert len(records) == 2  # flag override shrank trials to 1
    assert {r.trial for r in records} == {0}


def test_experiment_preset_setup(tmp_path, capsys) -> None:
    out = tmp_path / "setup1.csv"
    code = run("experiment", "--setup", "1", "--t", "1", "--n-low-range", "0:1",
               "--trials", "1", "--estimator", "rcml", "--out", str(out),
               "--no-plots")
    assert code == EXIT_OK
    records = read_records_csv(out)
    assert {r.setup_id for r in records} == {"1"}
    assert {r.n_high_true for r in records} == {2}
    assert {r.estimator for r in records} == {"rcml"}


def test_experiment_custom_needs_vectors(capsys) -> None:
    assert run("experiment", "--setup", "custom", "--trials", "1") == EXIT_USAGE
    assert "need p_high and p_low" in capsys.readouterr().err


def test_experiment_rejects_unknown_config_key(tmp_path, capsys) -> None:
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"setup": "1", "bogus": 3}))
    assert run("experiment", "--config", str(config)) == EXIT_USAGE
    assert "unknown config keys" in capsys.readouterr().err


def test_experiment_rejects_malformed_json(tmp_path, capsys) -> None:
    config = tmp_path / "config.json"
    config.write_text("{not json")
    assert run("experiment", "--config", str(config)) == EXIT_USAGE
    assert "not valid JSON" in capsys.readouterr().err


def test_experiment_rejects_non_object_config(tmp_path, capsys) -> None:
    config = tmp_path / "config.json"
    config.write_text("[1, 2]")
    assert run("experiment", "--config", str(config)) == EXIT_USAGE
    assert "JSON object" in capsys.readouterr().err


def test_experiment_bad_range_syntax(capsys) -> None:
    code = run("experiment", "--setup", "1", "--n-low-range", "0-4")
    assert code == EXIT_USAGE
    assert "expected LO:HI" in capsys.readouterr().err


# ------------------------------------------------------------ oracle-check


def test_oracle_check_passes_on_uniform_instance(capsys) -> None:
    code = run("oracle-check", "--m", "2", "--n-high", "1", "--n-low", "1")
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "agreement: PASS" in out
    assert "checked 16 patterns" in out


def test_oracle_check_single_pattern(capsys) -> None:
    code = run("oracle-check", "--m", "2", "--n-high", "2", "--n-low", "0",
               "--pattern", "xe")
    assert code == EXIT_OK
    assert "checked 1 patterns" in capsys.readouterr().out


def test_oracle_check_reports_failure_exit_code(capsys) -> None:
    code = run("oracle-check", "--m", "2", "--n-high", "1", "--n-low", "1",
               "--tolerance", "-1")
    assert code == EXIT_INFEASIBLE
    assert "agreement: FAIL" in capsys.readouterr().out


def test_oracle_check_budget_exceeded(capsys) -> None:
    code = run("oracle-check", "--m", "4", "--n-high", "3", "--n-low", "3",
               "--budget", "10")
    assert code == EXIT_INFEASIBLE
    assert "error:" in capsys.readouterr().err


def test_oracle_check_pattern_width_mismatch(capsys) -> None:
    code = run("oracle-check", "--m", "3", "--n-high", "1", "--n-low", "0",
               "--pattern", "he")
    assert code == EXIT_USAGE


# ------------------------------------------------------------------ parser


def test_unknown_subcommand_is_usage_error(capsys) -> None:
    assert run("frobnicate") == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_missing_subcommand_is_usage_error(capsys) -> None:
    assert run() == EXIT_USAGE


def test_help_exits_zero(capsys) -> None:
    assert run("--help") == EXIT_OK
    assert "simulate" in capsys.readouterr().out


def test_negative_load_is_usage_error(tmp_path, capsys) -> None:
    code = run("simulate", "--m", "2", "--n-high", "-1", "--n-low", "0")
    assert code == EXIT_USAGE
