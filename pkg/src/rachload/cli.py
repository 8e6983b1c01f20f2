"""Command-line interface.

Subcommands: ``simulate`` (sample slot patterns), ``estimate`` (run the
estimators on observed patterns), ``experiment`` (Monte Carlo sweep with CSV
and figure output), ``oracle-check`` (verify the engine against brute-force
enumeration).

Exit codes: 0 success; 1 usage or input-format error; 2 infeasibility,
verification failure or enumeration budget exceeded; 3 I/O error.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from .engine import pattern_probability
from .estimators import (
    HypothesisGrid,
    NoFeasibleHypothesisError,
    likelihood_surface,
    ml_estimate,
    rcml_estimate,
)
from .harness import (
    ExperimentConfig,
    preset_config,
    preset_profile,
    run_experiment,
    write_mae_csv,
    write_records_csv,
)
from .model import (
    AccessPattern,
    LoadHypothesis,
    ObservationSet,
    PatternFormatError,
    RbEvent,
    SelectionProfile,
    format_pattern,
    parse_pattern,
)
from .oracle import (
    DEFAULT_BUDGET,
    EnumerationBudgetError,
    exhaustive_pattern_distribution,
)
from .simulate import SimulationSeed, sample_observations

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


class UsageError(Exception):
    """Bad flags, bad values or malformed input data."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise UsageError(message)


def _parse_probability_vector(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad probability vector {text!r}: {exc}") from None


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected LO:HI, got {text!r}") from None


def _resolve_profile(args, required: bool = True) -> SelectionProfile | None:
    """Profile from --p-high/--p-low, or uniform over --m."""
    p_high = getattr(args, "p_high", None)
    p_low = getattr(args, "p_low", None)
    m = getattr(args, "m", None)
    if (p_high is None) != (p_low is None):
        raise UsageError("--p-high and --p-low must be given together")
    if p_high is not None:
        profile = SelectionProfile.from_vectors(p_high, p_low)
        if m is not None and m != profile.num_rbs:
            raise UsageError(
                f"--m {m} disagrees with the {profile.num_rbs}-entry vectors"
            )
        return profile
    if m is not None:
        return SelectionProfile.uniform(m)
    if required:
        raise UsageError("give either --m (uniform profile) or --p-high/--p-low")
    return None


def _read_patterns(source: str) -> ObservationSet:
    """One pattern per line; blank lines and '#' comments are skipped."""
    if source == "-":
        lines = sys.stdin.read().splitlines()
    else:
        lines = Path(source).read_text().splitlines()
    patterns = []
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if line:
            patterns.append(parse_pattern(line))
    if not patterns:
        raise UsageError(f"no patterns found in {source!r}")
    return ObservationSet(tuple(patterns))


def _grid_from_args(args) -> HypothesisGrid | None:
    gh, gl = args.grid_max_high, args.grid_max_low
    if gh is None and gl is None:
        return None
    if gh is None or gl is None:
        raise UsageError("--grid-max-high and --grid-max-low must be given together")
    return HypothesisGrid(gh, gl)


def _cmd_simulate(args) -> int:
    profile = _resolve_profile(args)
    truth = LoadHypothesis(args.n_high, args.n_low)
    seed = SimulationSeed(args.seed)
    observations = sample_observations(truth, profile, args.t, seed, args.trial)
    lines = "\n".join(format_pattern(p) for p in observations) + "\n"
    if args.out == "-":
        sys.stdout.write(lines)
    else:
        Path(args.out).write_text(lines)
        print(f"wrote {observations.num_slots} patterns to {args.out}")
    return EXIT_OK


def _with_suffix_tag(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix}"))


def _cmd_estimate(args) -> int:
    observations = _read_patterns(args.patterns)
    profile = _resolve_profile(args)
    if observations.num_rbs != profile.num_rbs:
        raise UsageError(
            f"patterns have {observations.num_rbs} RBs but the profile has "
            f"{profile.num_rbs}"
        )
    grid = _grid_from_args(args)
    names = ("ml", "rcml") if args.estimator == "both" else (args.estimator,)
    for name in names:
        mode = "full" if name == "ml" else "reduced"
        estimate = (ml_estimate if name == "ml" else rcml_estimate)(
            observations, profile, grid
        )
        print(f"{name}: n_high={estimate.n_high} n_low={estimate.n_low}")
        if args.surface_csv or args.heatmap:
            surface = likelihood_surface(observations, profile, grid, mode=mode)
            if args.surface_csv:
                target = (
                    _with_suffix_tag(args.surface_csv, name)
                    if len(names) > 1
                    else args.surface_csv
                )
                surface.write_csv(target)
                print(f"wrote {mode} likelihood surface to {target}")
            if args.heatmap:
                from .plots import save_likelihood_heatmap

                target = (
                    _with_suffix_tag(args.heatmap, name)
                    if len(names) > 1
                    else args.heatmap
                )
                save_likelihood_heatmap(surface, target)
                print(f"wrote {mode} surface heatmap to {target}")
    return EXIT_OK


_CONFIG_KEYS = {
    "setup": str,
    "m": int,
    "t_values": tuple,
    "n_high_values": tuple,
    "n_low_range": tuple,
    "p_high": tuple,
    "p_low": tuple,
    "trials": int,
    "seed": int,
    "estimators": tuple,
    "grid_max_high": int,
    "grid_max_low": int,
    "workers": int,
    "out": str,
}


def _load_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = set(raw) - set(_CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return raw


def _cmd_experiment(args) -> int:
    settings: dict = dict(_load_config_file(args.config)) if args.config else {}
    # flags override file values
    if args.setup is not None:
        settings["setup"] = args.setup
    if args.m is not None:
        settings["m"] = args.m
    if args.t is not None:
        settings["t_values"] = list(args.t)
    if args.n_high is not None:
        settings["n_high_values"] = list(args.n_high)
    if args.n_low_range is not None:
        settings["n_low_range"] = list(args.n_low_range)
    if args.p_high is not None:
        settings["p_high"] = list(args.p_high)
    if args.p_low is not None:
        settings["p_low"] = list(args.p_low)
    for key in ("trials", "seed", "grid_max_high", "grid_max_low", "workers"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if args.estimator is not None:
        settings["estimators"] = (
            ["ml", "rcml"] if args.estimator == "both" else args.estimator.split(",")
        )
    if args.out is not None:
        settings["out"] = args.out

    setup_id = str(settings.get("setup", "custom"))
    out_path = settings.pop("out", "experiment_results.csv")
    has_vectors = "p_high" in settings or "p_low" in settings
    if ("p_high" in settings) != ("p_low" in settings):
        raise UsageError("p_high and p_low must be given together")

    config_kwargs = {}
    for key in ("trials", "seed", "grid_max_high", "grid_max_low", "workers"):
        if key in settings:
            config_kwargs[key] = int(settings[key])
    if "t_values" in settings:
        config_kwargs["t_values"] = tuple(int(v) for v in settings["t_values"])
    if "n_high_values" in settings:
        config_kwargs["n_high_values"] = tuple(int(v) for v in settings["n_high_values"])
    if "n_low_range" in settings:
        lo, hi = settings["n_low_range"]
        config_kwargs["n_low_range"] = (int(lo), int(hi))
    if "estimators" in settings:
        config_kwargs["estimators"] = tuple(settings["estimators"])

    try:
        if setup_id in ("1", "2", "3"):
            if has_vectors:
                profile = SelectionProfile.from_vectors(
                    settings["p_high"], settings["p_low"]
                )
                config_kwargs["profile"] = profile
                config_kwargs.setdefault("m", profile.num_rbs)
            if "m" in settings:
                config_kwargs["m"] = int(settings["m"])
            config = preset_config(setup_id, **config_kwargs)
        else:
            if not has_vectors:
                raise UsageError("custom experiments need p_high and p_low")
            profile = SelectionProfile.from_vectors(
                settings["p_high"], settings["p_low"]
            )
            config = ExperimentConfig(
                setup_id="custom",
                m=int(settings.get("m", profile.num_rbs)),
                profile=profile,
                t_values=config_kwargs.pop("t_values", (1, 3, 10)),
                n_high_values=config_kwargs.pop("n_high_values", (1, 2)),
                n_low_range=config_kwargs.pop("n_low_range", (0, 7)),
                **config_kwargs,
            )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    result = run_experiment(config)
    write_records_csv(result.records, out_path)
    print(f"wrote {len(result.records)} records to {out_path}")
    mae_path = str(Path(out_path).with_name(Path(out_path).stem + "_mae.csv"))
    write_mae_csv(result.mae_rows, mae_path)
    print(f"wrote MAE summary to {mae_path}")
    if not args.no_plots:
        from .plots import save_mae_curves

        fig_path = str(Path(out_path).with_name(Path(out_path).stem + "_mae.png"))
        save_mae_curves(result.mae_rows, fig_path)
        print(f"wrote MAE figure to {fig_path}")
    return EXIT_OK


def _cmd_oracle_check(args) -> int:
    profile = _resolve_profile(args)
    hypothesis = LoadHypothesis(args.n_high, args.n_low)
    distribution = exhaustive_pattern_distribution(hypothesis, profile, args.budget)
    if args.pattern is not None:
        patterns = [parse_pattern(args.pattern)]
        if patterns[0].num_rbs != profile.num_rbs:
            raise UsageError("pattern width disagrees with the profile")
    else:
        patterns = [
            AccessPattern(events)
            for events in itertools.product(RbEvent, repeat=profile.num_rbs)
        ]
    worst_rel = 0.0
    worst_pattern = None
    total = 0.0
    for pattern in patterns:
        engine_value = pattern_probability(pattern, hypothesis, profile).to_float()
        oracle_value = distribution.probability(pattern)
        total += engine_value
        rel = abs(engine_value - oracle_value) / max(oracle_value, 1e-300)
        if rel > worst_rel:
            worst_rel, worst_pattern = rel, pattern
    print(f"checked {len(patterns)} patterns against exhaustive enumeration")
    print(f"max relative difference: {worst_rel:.3e}"
          + (f" (pattern {format_pattern(worst_pattern)})" if worst_pattern else ""))
    if args.pattern is None:
        print(f"engine total probability: {total!r}")
    ok = worst_rel <= args.tolerance and (
        args.pattern is not None or abs(total - 1.0) <= args.tolerance
    )
    print("agreement: PASS" if ok else "agreement: FAIL")
    return EXIT_OK if ok else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rachload", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_profile_flags(p):
        p.add_argument("--m", type=int, help="RB count (uniform profile)")
        p.add_argument("--p-high", type=_parse_probability_vector,
                       help="comma-separated high-class selection probabilities")
        p.add_argument("--p-low", type=_parse_probability_vector,
                       help="comma-separated low-class selection probabilities")

    p_sim = sub.add_parser("simulate", help="sample observed slot patterns")
    add_profile_flags(p_sim)
    p_sim.add_argument("--n-high", type=int, required=True, help="true high-class count")
    p_sim.add_argument("--n-low", type=int, required=True, help="true low-class count")
    p_sim.add_argument("--t", type=int, default=1, help="slots to sample")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--trial", type=int, default=0, help="trial substream index")
    p_sim.add_argument("--out", default="-", help="output file, '-' for stdout")
    p_sim.set_defaults(func=_cmd_simulate)

    p_est = sub.add_parser("estimate", help="estimate per-class counts from patterns")
    add_profile_flags(p_est)
    p_est.add_argument("--patterns", required=True,
                       help="file of pattern lines, '-' for stdin")
    p_est.add_argument("--estimator", choices=("ml", "rcml", "both"), default="ml")
    p_est.add_argument("--grid-max-high", type=int,
                       help="search bound for the high class (default 3*M)")
    p_est.add_argument("--grid-max-low", type=int,
                       help="search bound for the low class (default 3*M)")
    p_est.add_argument("--surface-csv", help="dump the likelihood surface as CSV")
    p_est.add_argument("--heatmap", help="render the likelihood surface as PNG")
    p_est.set_defaults(func=_cmd_estimate)

    p_exp = sub.add_parser("experiment", help="Monte Carlo sweep over true loads")
    add_profile_flags(p_exp)
    p_exp.add_argument("--setup", choices=("1", "2", "3", "custom"))
    p_exp.add_argument("--config", help="JSON config file (flags override it)")
    p_exp.add_argument("--t", type=_parse_int_list, help="comma-separated slot counts")
    p_exp.add_argument("--n-high", type=_parse_int_list,
                       help="comma-separated true high-class counts")
    p_exp.add_argument("--n-low-range", type=_parse_range, help="inclusive LO:HI")
    p_exp.add_argument("--trials", type=int)
    p_exp.add_argument("--seed", type=int)
    p_exp.add_argument("--estimator", help="ml, rcml, both or a comma list")
    p_exp.add_argument("--grid-max-high", type=int,
                       help="search bound for the high class (default: sweep maximum)")
    p_exp.add_argument("--grid-max-low", type=int,
                       help="search bound for the low class (default: sweep maximum)")
    p_exp.add_argument("--workers", type=int)
    p_exp.add_argument("--out", help="records CSV path")
    p_exp.add_argument("--no-plots", action="store_true",
                       help="skip the MAE figure next to the CSV")
    p_exp.set_defaults(func=_cmd_experiment)

    p_chk = sub.add_parser("oracle-check",
                           help="compare the engine against brute-force enumeration")
    add_profile_flags(p_chk)
    p_chk.add_argument("--n-high", type=int, required=True)
    p_chk.add_argument("--n-low", type=int, required=True)
    p_chk.add_argument("--pattern", help="check a single pattern instead of all")
    p_chk.add_argument("--tolerance", type=float, default=1e-9)
    p_chk.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p_chk.set_defaults(func=_cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PatternFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoFeasibleHypothesisError, EnumerationBudgetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
