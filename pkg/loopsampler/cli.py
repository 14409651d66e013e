#!/usr/bin/env python3
"""Command-line pipeline: compile -> dist -> sample -> validate -> track -> rate.

Usage:
  loopsampler example --photons 3 --modes 6 --seed 1 --out work/
  loopsampler compile --schedule work/schedule.json --out work/
  loopsampler run --config experiment.json

Subcommands:
  compile   schedule file -> effective unitary (matrix format) + closure report
  perm      matrix file -> permanent, printed as `re im`
  dist      output distribution CSV for a photon model
  sample    seeded event log CSV drawn from the distribution
  validate  counter trajectory CSV and one-line verdict for aa / bayes / lr
  track     per-loop distributions and fidelity against the final loop
  rate      n-fold coincidence rate table from an efficiency budget
  run       everything above end to end, plus summary.json
  example   write a representative fully connected schedule

Exit Codes:
  0 success; 2 validation-negative verdict; 3 leakage; 4 parse/config error; 1 other.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import config as settings
from .compiler import (
    LoopConfig,
    PulseSchedule,
    RailModeIndex,
    closure_deviation,
    compile_network,
    effective_unitary,
    example_schedule,
    injection_configuration,
    iter_prefixes,
)
from .errors import DomainError, FormatError, LeakageError, LoopSamplerError
from .formats import (
    get_codec,
    parse_configuration,
    read_distribution_csv,
    read_events_csv,
    read_json,
    write_distribution_csv,
    write_events_csv,
    write_json,
    write_table_csv,
    write_trajectory_csv,
)
from .log import configure_logging, get_logger
from .permanent import permanent
from .rates import (
    EfficiencyBudget,
    compare_rates,
    current_budget,
    projected_budget,
    rate_table,
    required_loop_transmission,
)
from .sampling import (
    SamplingInstance,
    collision_probability,
    draw_events,
    empirical_distribution,
    fidelity,
    observed_support,
    output_distribution,
    resolve_model,
)
from .validators import get_router, make_alternative

logger = get_logger("cli")

EXIT_OK = 0
EXIT_NEGATIVE = 2


@dataclass(frozen=True)
class ExperimentConfig:
    schedule: Optional[Path] = None
    unitary: Optional[Path] = None
    input: Optional[Tuple[int, ...]] = None
    model: str = "indistinguishable"
    gram: Optional[Path] = None
    seed: int = 0
    events: int = 0
    out: Path = Path(".")
    alternative: str = "uniform"
    max_loops: Optional[int] = None
    tolerance: float = settings.CLOSURE_TOL

    def require_files(self) -> None:
        for name in ("schedule", "unitary", "gram"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise FormatError(f"{name} file not found: {path}")


def load_experiment(path: Path | str) -> ExperimentConfig:
    """Read an experiment config; relative paths resolve against its directory."""
    path = Path(path)
    record = read_json(path)
    get_codec().require_valid("experiment", record, str(path))
    base = path.parent
    values: Dict[str, Any] = {}
    for key, value in record.items():
        if key in ("schedule", "unitary", "gram", "out"):
            values[key] = base / value
        elif key == "input":
            values[key] = tuple(value)
        else:
            values[key] = value
    return ExperimentConfig(**values)


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_experiment(args.config) if getattr(args, "config", None) else ExperimentConfig()
    overrides: Dict[str, Any] = {}
    for f in fields(ExperimentConfig):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name in ("schedule", "unitary", "gram", "out"):
            value = Path(value)
        elif f.name == "input":
            value = parse_configuration(value)
        overrides[f.name] = value
    cfg = replace(cfg, **overrides)
    cfg = replace(cfg, model=resolve_model(cfg.model))
    cfg.require_files()
    return cfg


# ---------------- Instance assembly -----------------
def _load_schedule(cfg: ExperimentConfig) -> Tuple[LoopConfig, PulseSchedule, Tuple[RailModeIndex, ...]]:
    if cfg.schedule is None:
        raise FormatError("a schedule file is required (--schedule or config 'schedule')")
    return get_codec().record_to_schedule(read_json(cfg.schedule), str(cfg.schedule))


def _single_photon_inputs(inputs: Sequence[int]) -> Tuple[int, ...]:
    inputs = tuple(inputs)
    if any(k not in (0, 1) for k in inputs):
        raise DomainError(f"command-line inputs carry at most one photon per mode, got {inputs}")
    return inputs


def build_instance(cfg: ExperimentConfig) -> SamplingInstance:
    if cfg.unitary is not None:
        record = read_json(cfg.unitary)
        unitary = get_codec().record_to_unitary(record, str(cfg.unitary))
        inputs = cfg.input if cfg.input is not None else record.get("input")
        if inputs is None:
            raise FormatError("an input configuration is required with --unitary")
        return SamplingInstance(unitary, _single_photon_inputs(inputs))
    loop_config, schedule, subset = _load_schedule(cfg)
    unitary = effective_unitary(compile_network(loop_config, schedule), subset, cfg.tolerance)
    inputs = cfg.input if cfg.input is not None else injection_configuration(loop_config, subset)
    return SamplingInstance(unitary, _single_photon_inputs(inputs))


def load_gram(cfg: ExperimentConfig, n: int) -> Optional[np.ndarray]:
    if cfg.model != "partial":
        return None
    if cfg.gram is None:
        raise FormatError("the partial model needs a Gram file (--gram)")
    return get_codec().record_to_gram(read_json(cfg.gram), n, str(cfg.gram))


# ---------------- Subcommands -----------------
def cmd_compile(cfg: ExperimentConfig) -> int:
    loop_config, schedule, subset = _load_schedule(cfg)
    full = compile_network(loop_config, schedule)
    deviation = closure_deviation(full, subset)
    print(f"closure deviation={deviation:.3e} tolerance={cfg.tolerance:.1e} modes={len(subset)}")
    unitary = effective_unitary(full, subset, cfg.tolerance)
    record = get_codec().matrix_to_record(
        unitary.matrix,
        deviation=deviation,
        mode_subset=[{"slot": p.slot, "rail": p.rail.name} for p in subset],
        input=list(injection_configuration(loop_config, subset)),
    )
    path = write_json(cfg.out / "unitary.json", record)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_perm(matrix_path: Path, method: str) -> int:
    matrix = get_codec().record_to_matrix(read_json(matrix_path), str(matrix_path))
    result = permanent(matrix, method=method)
    # + 0.0 folds negative zero
    print(f"{result.value.real + 0.0!r} {result.value.imag + 0.0!r}")
    return EXIT_OK


def cmd_dist(cfg: ExperimentConfig) -> int:
    instance = build_instance(cfg)
    dist = output_distribution(instance, cfg.model, load_gram(cfg, instance.n))
    path = write_distribution_csv(cfg.out / "distribution.csv", dist)
    print(f"wrote {path} ({len(dist)} configurations, model={dist.model})")
    return EXIT_OK


def cmd_sample(cfg: ExperimentConfig, dist_path: Optional[Path]) -> int:
    if dist_path is not None:
        dist = read_distribution_csv(dist_path)
    else:
        instance = build_instance(cfg)
        dist = output_distribution(instance, cfg.model, load_gram(cfg, instance.n))
    events = draw_events(dist, cfg.events, np.random.default_rng(cfg.seed))
    path = write_events_csv(cfg.out / "events.csv", events)
    print(f"wrote {path} ({len(events)} events, seed={cfg.seed})")
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig, events_path: Path, test: str) -> int:
    instance = build_instance(cfg)
    events = read_events_csv(events_path)
    identifier = f"bayes:{cfg.alternative}" if test == "bayes" else test
    trajectory, verdict = get_router().validate(identifier, instance, events)
    name = identifier.split(":")[0]
    write_trajectory_csv(cfg.out / f"trajectory_{name}.csv", trajectory)
    print(verdict)
    return EXIT_OK if verdict.passed else EXIT_NEGATIVE


def cmd_track(cfg: ExperimentConfig, max_loops: Optional[int]) -> int:
    loop_config, schedule, subset = _load_schedule(cfg)
    max_loops = max_loops or cfg.max_loops or loop_config.loops
    if not 1 <= max_loops <= loop_config.loops:
        raise DomainError(f"max_loops must lie in 1..{loop_config.loops}, got {max_loops}")
    inputs = cfg.input if cfg.input is not None else injection_configuration(loop_config, subset)
    inputs = _single_photon_inputs(inputs)
    gram = None
    per_loop = {}
    deviations = {}
    for k, prefix in iter_prefixes(loop_config, schedule):
        if k == 0:
            continue
        deviations[k] = closure_deviation(prefix, subset)
        try:
            unitary = effective_unitary(prefix, subset, cfg.tolerance)
        except LeakageError as e:
            logger.warning("loop %d leaks out of the mode subset (deviation %.3e)", k, e.deviation)
            per_loop[k] = None
            continue
        instance = SamplingInstance(unitary, inputs)
        if gram is None:
            gram = load_gram(cfg, instance.n)
        per_loop[k] = output_distribution(instance, cfg.model, gram)
    reference = per_loop[loop_config.loops]
    rows: List[Tuple[Any, ...]] = []
    for k in range(1, max_loops + 1):
        dist = per_loop[k]
        if dist is None:
            rows.append((k, "", f"{deviations[k]:.6e}", "leakage"))
            continue
        write_distribution_csv(cfg.out / f"loop_{k}.csv", dist)
        value = repr(fidelity(dist, reference)) if reference is not None else ""
        rows.append((k, value, f"{deviations[k]:.6e}", "ok"))
    path = write_table_csv(cfg.out / "fidelity.csv", ("loop", "fidelity", "deviation", "status"), rows)
    for row in rows:
        print(f"loop {row[0]}: fidelity={row[1] or 'n/a'} status={row[3]}")
    print(f"wrote {path}")
    return EXIT_OK


def _budget_from_args(args: argparse.Namespace) -> EfficiencyBudget:
    budget = projected_budget() if args.preset == "projected" else current_budget()
    overrides = {
        name: getattr(args, name)
        for name in (
            "rep_rate",
            "source_eff",
            "loop_transmission",
            "detector_eff",
            "n_loops",
            "bins_per_trial",
            "overhead_loops",
            "trial_period_slots",
        )
        if getattr(args, name) is not None
    }
    return replace(budget, **overrides)


def cmd_rate(args: argparse.Namespace) -> int:
    budget = _budget_from_args(args)
    print(f"trial rate {budget.trial_rate:.6g} Hz, eta_total {budget.eta_total:.6g} (multiplicative model)")
    print(f"{'n':>3}  {'events/s':>12}  {'events/hour':>12}")
    for row in rate_table(budget, range(1, args.max_n + 1)):
        print(f"{row.n:>3}  {row.per_second:>12.4e}  {row.per_hour:>12.4e}")
    needed = required_loop_transmission(budget, args.max_n, args.target_per_hour)
    reach = "" if needed <= 1.0 else " (unreachable)"
    print(f"loop transmission for {args.target_per_hour:g}/hour at n={args.max_n}: {needed:.6f}{reach}")
    if args.compare_source_eff is not None:
        other = replace(budget, source_eff=args.compare_source_eff)
        ratio = compare_rates(budget, other, args.max_n)
        print(f"rate ratio vs source_eff={args.compare_source_eff:g} at n={args.max_n}: {ratio:.6g}")
    return EXIT_OK


def cmd_run(cfg: ExperimentConfig) -> int:
    """End-to-end run; every random draw comes from one generator seeded by cfg.seed."""
    instance = build_instance(cfg)
    gram = load_gram(cfg, instance.n)
    rng = np.random.default_rng(cfg.seed)
    theory = output_distribution(instance, cfg.model, gram)
    write_distribution_csv(cfg.out / "distribution.csv", theory)
    events = draw_events(theory, cfg.events, rng, instance=instance)
    write_events_csv(cfg.out / "events.csv", events)

    summary: Dict[str, Any] = {
        "seed": cfg.seed,
        "model": cfg.model,
        "modes": instance.m,
        "photons": instance.n,
        "input": list(instance.inputs),
        "configurations": len(theory),
        "events": len(events),
        "collision_probability": collision_probability(theory),
        "verdicts": {},
        "alternative_verdicts": {},
    }
    exit_code = EXIT_OK
    if len(events) == 0:
        logger.info("no events requested; validators skipped")
        summary["validators"] = "skipped"
        summary["fidelity"] = None
        summary["observed_support"] = 0
    else:
        summary["fidelity"] = fidelity(empirical_distribution(events, theory), theory)
        summary["observed_support"] = observed_support(events)
        ideal = theory if cfg.model == "indistinguishable" else output_distribution(instance, "indistinguishable")
        router = get_router()
        for identifier in ("aa", f"bayes:{cfg.alternative}", "lr"):
            trajectory, verdict = router.validate(identifier, instance, events, ideal)
            name = identifier.split(":")[0]
            write_trajectory_csv(cfg.out / f"trajectory_{name}.csv", trajectory)
            summary["verdicts"][name] = str(verdict)
            print(verdict)
            if not verdict.passed:
                exit_code = EXIT_NEGATIVE
        # control runs: the same counters on events drawn from each alternative
        for identifier in ("aa", f"bayes:{cfg.alternative}", "lr"):
            name, alternative = router.parse_test_identifier(identifier)
            alt_events = draw_events(make_alternative(alternative, instance), len(events), rng)
            trajectory, verdict = router.validate(identifier, instance, alt_events, ideal)
            write_trajectory_csv(cfg.out / f"trajectory_{name}_alt.csv", trajectory)
            summary["alternative_verdicts"][name] = f"{verdict} alternative={alternative}"
            print(f"alternative data ({alternative}): {verdict}")
    write_json(cfg.out / "summary.json", summary)
    fid = summary["fidelity"]
    print(f"fidelity={fid if fid is None else format(fid, '.6f')} events={len(events)} seed={cfg.seed}")
    return exit_code


def cmd_example(cfg: ExperimentConfig, photons: int, modes: int) -> int:
    circuit = example_schedule(photons, modes, cfg.seed)
    record = get_codec().schedule_to_record(circuit.loop_config, circuit.schedule, circuit.mode_subset)
    path = write_json(cfg.out / "schedule.json", record)
    print(f"wrote {path} ({modes} modes, {photons} photons, seed={cfg.seed})")
    return EXIT_OK


# ---------------- Argument parsing -----------------
class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit 4 like every other parse error, not argparse's 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise FormatError(message)


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Experiment config JSON file")
    parser.add_argument("--schedule", help="Schedule JSON file")
    parser.add_argument("--unitary", help="Unitary matrix JSON file (instead of a schedule)")
    parser.add_argument("--input", help="Input occupations, e.g. 1-1-1-0-0-0")
    parser.add_argument("--model", choices=["ind", "dist", "partial"], help="Photon model")
    parser.add_argument("--gram", help="Gram matrix JSON file for --model partial")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--events", type=int, help="Number of events to draw")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--tolerance", type=float, help="Closure tolerance for the mode subset")
    parser.add_argument("--alternative", choices=["uniform", "distinguishable", "gaussian"],
                        help="Alternative hypothesis for the Bayesian test")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="loopsampler", description="Loop-based boson sampling simulator")
    parser.add_argument("--log-level", default=None, help="Logging level (default from LOOPSAMPLER_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("compile", "dist", "run"):
        _common(sub.add_parser(name))

    p = sub.add_parser("perm")
    p.add_argument("matrix", help="Matrix JSON file")
    p.add_argument("--method", choices=["ryser", "naive"], default="ryser")

    p = sub.add_parser("sample")
    _common(p)
    p.add_argument("--dist", help="Distribution CSV to sample from instead of computing one")

    p = sub.add_parser("validate")
    _common(p)
    p.add_argument("--events-file", required=True, help="Event log CSV")
    p.add_argument("--test", default="aa", help=f"{get_router().describe_tests()}; bayes also takes :alternative")

    p = sub.add_parser("track")
    _common(p)
    p.add_argument("--max-loops", type=int, dest="max_loops", help="Track loops 1..max_loops")

    p = sub.add_parser("rate")
    p.add_argument("--preset", choices=["current", "projected"], default="current")
    p.add_argument("--rep-rate", type=float)
    p.add_argument("--source-eff", type=float)
    p.add_argument("--loop-transmission", type=float)
    p.add_argument("--detector-eff", type=float)
    p.add_argument("--n-loops", type=int)
    p.add_argument("--bins-per-trial", type=int)
    p.add_argument("--overhead-loops", type=int)
    p.add_argument("--trial-period-slots", type=int)
    p.add_argument("--max-n", type=int, default=20)
    p.add_argument("--target-per-hour", type=float, default=100.0)
    p.add_argument("--compare-source-eff", type=float)

    p = sub.add_parser("example")
    _common(p)
    p.add_argument("--photons", type=int, default=3)
    p.add_argument("--modes", type=int, default=6)
    return parser


def dispatch(args: argparse.Namespace) -> int:
    if args.command == "perm":
        return cmd_perm(Path(args.matrix), args.method)
    if args.command == "rate":
        return cmd_rate(args)
    cfg = resolve_config(args)
    if args.command == "compile":
        return cmd_compile(cfg)
    if args.command == "dist":
        return cmd_dist(cfg)
    if args.command == "sample":
        return cmd_sample(cfg, Path(args.dist) if args.dist else None)
    if args.command == "validate":
        return cmd_validate(cfg, Path(args.events_file), args.test)
    if args.command == "track":
        return cmd_track(cfg, args.max_loops)
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "example":
        return cmd_example(cfg, args.photons, args.modes)
    raise DomainError(f"unknown command {args.command}")


def report_error(exc: LoopSamplerError, kind: Optional[str] = None) -> None:
    message = " ".join(str(exc).split())
    kind = kind or type(exc).__name__
    print(f"error code={exc.exit_code} kind={kind} message={message}", file=sys.stderr)
    if isinstance(exc, LeakageError):
        print(f"deviation={exc.deviation:.6e}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.log_level.upper() if args.log_level else None)
        return dispatch(args)
    except LoopSamplerError as exc:
        report_error(exc)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        wrapped = LoopSamplerError(str(exc))
        report_error(wrapped, kind=type(exc).__name__)
        return wrapped.exit_code


if __name__ == "__main__":
    sys.exit(main())
