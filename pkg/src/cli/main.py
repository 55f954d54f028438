"""
resource-forge command-line front end.

Usage:
    resource-forge robustness --kind state|standard|measurement|genpower|channel
                              --model m.json --free f.json --object o.json [--json out.json]
    resource-forge advantage --theorem 1|2|4|5|6|7 --model ... --free ... --object ... [--csv sweep.csv]
    resource-forge discriminate --model ... --object ensemble.json [--free-effects e.json]
    resource-forge convert --model ... --ops ops.json --from a.json --to b.json [--witness out.json]
    resource-forge accinfo --model ... --measurement m.json --free-effects e.json
    resource-forge verify --theorem 1..9|monotones --suite classical|quantum|all
    resource-forge norms --model ... --object x.json [--free f.json] [--free-effects e.json]
    resource-forge library list | export DIR

Exit codes: 0 success, 1 invalid input, 2 solver or internal failure,
3 infeasible, not convertible or not certified.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from src.core.types import ContractViolation, InternalError, ModelError, SolverFailure, UnsupportedOperation
from src.discrimination.advantage import (
    advantage_ratio_channel,
    advantage_ratio_channel_ensemble,
    advantage_ratio_generating,
    advantage_ratio_measurement,
    advantage_ratio_state,
    advantage_ratio_subchannel,
    gain_ratio_standard,
    sweep_channel_tasks,
    sweep_measurement_tasks,
    sweep_state_tasks,
    sweep_subchannel_tasks
)
from src.discrimination.data_hiding import data_hiding_ratio
from src.discrimination.tasks import optimal_p_succ
from src.gpt.model import GptModel
from src.gpt.norms import base_norm, distinguishability_norm, order_unit_norm
from src.infotheory.accessible import accessible_advantage, sweep_accessible_gain
from src.monotones.convertibility import (
    CONCLUSIVE,
    INCONCLUSIVE,
    convertible_ensemble,
    convertible_measurement,
    convertible_state
)
from src.monotones.operations import operations_from_json
from src.robustness.channels import channel_robustness, ensemble_channel_robustness, generating_power
from src.robustness.free_sets import free_channels_from_json, free_effects_from_json, free_set_from_json
from src.robustness.measurements import measurement_robustness
from src.robustness.result import json_number
from src.robustness.states import free_base_norm, generalized_robustness_state, standard_robustness_state
from src.solver.program import SolverSettings
from . import io
from .library import all_examples, export_library
from .verify import SUITES, THEOREMS, run_suite, worker_count

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_NEGATIVE = 3

ROBUSTNESS_KINDS = ("state", "standard", "measurement", "genpower", "channel")
ADVANTAGE_THEOREMS = ("1", "2", "4", "5", "6", "7")
PATH_OPTIONS = ("model", "free", "free_out", "free_effects", "object", "ops", "source", "target",
                "measurement", "restriction")


@dataclass
class RunConfig:
    """
    Parsed command line.

    Attributes:
        command: Subcommand name
        paths: Input files by option name
        seed: Seed of every random generator used
        settings: Solver settings (tolerances, trace file)
        json_path: Report destination besides stdout
        csv_path: Sweep rows destination
        workers: Thread pool size for verify suites
        options: Remaining subcommand options
    """
    command: str
    paths: Dict[str, Path] = field(default_factory=dict)
    seed: int = 1234
    settings: SolverSettings = field(default_factory=SolverSettings)
    json_path: Optional[Path] = None
    csv_path: Optional[Path] = None
    workers: int = 1
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """
        Raises:
            ModelError: A referenced input file does not exist
        """
        paths = {}
        for name in PATH_OPTIONS:
            value = getattr(args, name, None)
            if value is not None:
                path = Path(value)
                if not path.is_file():
                    raise ModelError("no such file", str(path))
                paths[name] = path
        settings = SolverSettings(gap_tol=args.gap_tol, feas_tol=args.feas_tol, max_iters=args.max_iters,
                                  trace_path=args.trace)
        skip = set(PATH_OPTIONS) | {"command", "seed", "json", "csv", "trace", "gap_tol", "feas_tol",
                                    "max_iters", "verbose", "handler"}
        options = {k: v for k, v in vars(args).items() if k not in skip}
        return cls(args.command, paths, args.seed, settings,
                   Path(args.json) if args.json else None,
                   Path(args.csv) if getattr(args, "csv", None) else None,
                   worker_count(), options)

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def _model(config: RunConfig, *fallbacks: str) -> GptModel:
    """The --model file, or the "model" entry of the first fallback input that has one."""
    if "model" in config.paths:
        return io.load_model(config.paths["model"])
    for name in fallbacks:
        path = config.paths.get(name)
        if path is None:
            continue
        data = io.load_json(path)
        if isinstance(data, dict) and "model" in data:
            return io.load_model(path)
    raise ContractViolation("no model given: pass --model or embed a \"model\" entry in the object file")


def _require(config: RunConfig, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if n not in config.paths]
    if missing:
        raise ContractViolation(f"{config.command} needs {', '.join(missing)}")


def _restriction(config: RunConfig, model: GptModel):
    """Restricted measurements: an effect-cone description or a list of measurements."""
    path = config.paths.get("restriction")
    if path is None:
        return None
    data = io.load_json(path)
    if isinstance(data, dict) and "kind" in data:
        return io.load_object(path, free_effects_from_json, model)
    return io.load_object(path, io.parse_measurement_list, model)


def _emit(config: RunConfig, report: Dict[str, Any]) -> None:
    text = io.dumps(report)
    sys.stdout.write(text)
    if config.json_path is not None:
        config.json_path.write_text(text, encoding="utf-8")


def _emit_sweep(config: RunConfig, sweep) -> Dict[str, Any]:
    if config.csv_path is not None:
        io.write_csv(config.csv_path, sweep.rows, ["index", "numerator", "denominator", "ratio"])
        logger.info("wrote %d sweep rows to %s", len(sweep.rows), config.csv_path)
    return sweep.to_json()


# Subcommands


def cmd_robustness(config: RunConfig) -> int:
    _require(config, "free", "object")
    kind = config.options["kind"]
    model = _model(config, "object")
    s = config.settings
    obj = io.load_json(config.paths["object"])
    if kind in ("state", "standard"):
        free = io.load_object(config.paths["free"], free_set_from_json, model)
        state = io.load_object(config.paths["object"], io.parse_state, model)
        fn = generalized_robustness_state if kind == "state" else standard_robustness_state
        result = fn(model, free, state, s)
    elif kind == "measurement":
        free = io.load_object(config.paths["free"], free_effects_from_json, model)
        result = measurement_robustness(model, free, io.load_object(config.paths["object"], io.parse_measurement,
                                                                     model), s)
    elif kind == "genpower":
        channel = io.load_object(config.paths["object"], io.parse_channel, model)
        free_in = io.load_object(config.paths["free"], free_set_from_json, model)
        free_out = free_in
        if channel.model_out != model:
            _require(config, "free_out")
        if "free_out" in config.paths:
            free_out = io.load_object(config.paths["free_out"], free_set_from_json, channel.model_out)
        result = generating_power(model, channel.model_out, free_in, free_out, channel, s,
                                  rng=config.rng)
    else:
        if isinstance(obj, dict) and "channels" in obj:
            probs, channels = io.load_object(config.paths["object"], io.parse_channel_ensemble, model)
            free = io.load_object(config.paths["free"], free_channels_from_json, model, channels[0].model_out)
            result = ensemble_channel_robustness(free, probs, channels, s)
        else:
            channel = io.load_object(config.paths["object"], io.parse_channel, model)
            free = io.load_object(config.paths["free"], free_channels_from_json, model, channel.model_out)
            result = channel_robustness(free, channel, s)
    logger.info("%s robustness %s", kind, json_number(result.value))
    _emit(config, result.to_json())
    return EXIT_OK


def cmd_advantage(config: RunConfig) -> int:
    _require(config, "free", "object")
    theorem = config.options["theorem"]
    model = _model(config, "object")
    s, n_tasks = config.settings, config.options["tasks"]
    path_free, path_obj = config.paths["free"], config.paths["object"]
    sweep = None
    if theorem == "1":
        free = io.load_object(path_free, free_set_from_json, model)
        state = io.load_object(path_obj, io.parse_state, model)
        if config.options["subchannel"]:
            report = advantage_ratio_subchannel(model, free, state, s)
            if config.csv_path is not None:
                sweep = sweep_subchannel_tasks(model, free, state, n_tasks, config.rng, settings=s)
        else:
            report = advantage_ratio_state(model, free, state, settings=s)
            if config.csv_path is not None:
                sweep = sweep_state_tasks(model, free, state, n_tasks, config.rng, settings=s)
    elif theorem == "2":
        free = io.load_object(path_free, free_effects_from_json, model)
        m = io.load_object(path_obj, io.parse_measurement, model)
        report = advantage_ratio_measurement(model, free, m, s)
        if config.csv_path is not None:
            sweep = sweep_measurement_tasks(model, free, m, n_tasks, config.rng, settings=s)
    elif theorem == "4":
        channel = io.load_object(path_obj, io.parse_channel, model)
        free_in = io.load_object(path_free, free_set_from_json, model)
        free_out = free_in
        if "free_out" in config.paths:
            free_out = io.load_object(config.paths["free_out"], free_set_from_json, channel.model_out)
        report = advantage_ratio_generating(model, channel.model_out, free_in, free_out, channel, s)
    elif theorem == "5":
        channel = io.load_object(path_obj, io.parse_channel, model)
        free = io.load_object(path_free, free_channels_from_json, model, channel.model_out)
        report = advantage_ratio_channel(free, channel, s)
        if config.csv_path is not None:
            sweep = sweep_channel_tasks(free, channel, n_tasks, config.rng, settings=s)
    elif theorem == "6":
        probs, channels = io.load_object(path_obj, io.parse_channel_ensemble, model)
        free = io.load_object(path_free, free_channels_from_json, model, channels[0].model_out)
        report = advantage_ratio_channel_ensemble(free, probs, channels, s)
    else:
        free = io.load_object(path_free, free_set_from_json, model)
        state = io.load_object(path_obj, io.parse_state, model)
        report = gain_ratio_standard(model, model, free, state, _restriction(config, model), settings=s)
    if config.csv_path is not None and sweep is None:
        raise ContractViolation(f"theorem {theorem} has no random-task sweep")
    out = report.to_json()
    if sweep is not None:
        out["sweep"] = _emit_sweep(config, sweep)
    _emit(config, out)
    certified = report.certified and (sweep is None or sweep.respects_bound)
    return EXIT_OK if certified else EXIT_NEGATIVE


def cmd_discriminate(config: RunConfig) -> int:
    _require(config, "object")
    model = _model(config, "object")
    ensemble = io.load_object(config.paths["object"], io.parse_ensemble, model)
    restriction = None
    if "free_effects" in config.paths:
        restriction = io.load_object(config.paths["free_effects"], free_effects_from_json, model)
    value, measurement = optimal_p_succ(model, ensemble, restriction, config.settings)
    report: Dict[str, Any] = {"p_succ": value, "measurement": measurement.effects, "n_states": len(ensemble)}
    if len(ensemble) == 2:
        p0, p1 = ensemble.probs
        s0, s1 = ensemble.states
        diff = p0 * s0 - p1 * s1
        norm = (base_norm(model, diff, settings=config.settings) if restriction is None
                else distinguishability_norm(model, restriction, diff, settings=config.settings))
        report["norm_value"] = 0.5 * (norm + 1.0)
    _emit(config, report)
    return EXIT_OK


def cmd_convert(config: RunConfig) -> int:
    _require(config, "ops", "source", "target")
    model = _model(config, "source", "ops")
    ops = io.load_object(config.paths["ops"], lambda data: operations_from_json(data, model))
    source = io.load_json(config.paths["source"])
    kind = io.object_kind(source)
    if kind == "state":
        verdict = convertible_state(ops, io.load_object(config.paths["source"], io.parse_state, model),
                                    io.load_object(config.paths["target"], io.parse_state, model), config.settings)
    elif kind in ("measurement", "matrix"):
        verdict = convertible_measurement(ops, io.load_object(config.paths["source"], io.parse_measurement, model),
                                          io.load_object(config.paths["target"], io.parse_measurement, model),
                                          config.settings)
    elif kind == "ensemble":
        a = io.load_object(config.paths["source"], io.parse_ensemble, model)
        b = io.load_object(config.paths["target"], io.parse_ensemble, model)
        mode = config.options["mode"]
        verdict = convertible_ensemble(ops, a.states, b.states, mode,
                                       a.probs if mode == INCONCLUSIVE else None, config.settings)
    else:
        raise ContractViolation(f"cannot convert objects of kind {kind!r}")
    report = verdict.to_json()
    _emit(config, report)
    if not verdict.feasible and config.options["witness"]:
        io.write_json(config.options["witness"], report["witness"])
        logger.info("wrote witness to %s", config.options["witness"])
    return EXIT_OK if verdict.feasible else EXIT_NEGATIVE


def cmd_accinfo(config: RunConfig) -> int:
    _require(config, "measurement", "free_effects")
    model = _model(config, "measurement")
    m = io.load_object(config.paths["measurement"], io.parse_measurement, model)
    free = io.load_object(config.paths["free_effects"], free_effects_from_json, model)
    result = accessible_advantage(model, free, m, config.settings)
    report = result.to_json()
    respects = True
    if config.options["tasks"] > 0 and config.options["sweep"]:
        sweep = sweep_accessible_gain(model, free, m, config.options["tasks"], rng=config.rng,
                                      bound=result.predicted, settings=config.settings)
        report["sweep"] = {"bound": sweep.bound, "max_gain": sweep.max_gain,
                           "respects_bound": sweep.respects_bound}
        respects = sweep.respects_bound
        if config.csv_path is not None:
            io.write_csv(config.csv_path, [{"index": i, "gain": g} for i, g in enumerate(sweep.gains)])
    _emit(config, report)
    return EXIT_OK if result.certified and respects else EXIT_NEGATIVE


def cmd_verify(config: RunConfig) -> int:
    report = run_suite(config.options["theorem"], config.options["suite"], config.seed,
                       config.options["tasks"], config.workers)
    _emit(config, report.to_json())
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def cmd_norms(config: RunConfig) -> int:
    _require(config, "object")
    model = _model(config, "object")
    data = io.load_json(config.paths["object"])
    x = model.check(data.get("vector", data.get("state")) if isinstance(data, dict) else data)
    s = config.settings
    report: Dict[str, Any] = {"base_norm": base_norm(model, x, settings=s),
                              "order_unit_norm": order_unit_norm(model, x, settings=s)}
    if "free" in config.paths:
        free = io.load_object(config.paths["free"], free_set_from_json, model)
        report["free_base_norm"] = json_number(free_base_norm(model, free, x, s))
    if "free_effects" in config.paths:
        family = io.load_object(config.paths["free_effects"], free_effects_from_json, model)
        report["distinguishability_norm"] = distinguishability_norm(model, family, x, settings=s)
        if config.options["data_hiding"]:
            report["data_hiding"] = data_hiding_ratio(model, family, rng=config.rng, settings=s).to_json()
    _emit(config, report)
    return EXIT_OK


def cmd_library(config: RunConfig) -> int:
    action = config.options["action"]
    if action == "list":
        _emit(config, {"examples": [e.to_json() for e in all_examples()]})
        return EXIT_OK
    if not config.options["directory"]:
        raise ContractViolation("library export needs a target directory")
    paths = export_library(config.options["directory"])
    _emit(config, {"exported": [str(p) for p in paths]})
    return EXIT_OK


# Parser


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--json", metavar="FILE", help="also write the report to FILE")
    parser.add_argument("--seed", type=int, default=1234, help="seed of random sweeps (default 1234)")
    parser.add_argument("--trace", metavar="FILE", help="write solver iterations (iter,primal_res,dual_res,gap)")
    parser.add_argument("--gap-tol", type=float, default=1e-7, help="relative duality gap tolerance")
    parser.add_argument("--feas-tol", type=float, default=1e-7, help="relative residual tolerance")
    parser.add_argument("--max-iters", type=int, default=50000, help="solver iteration budget")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug logging to stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resource-forge",
        description="Robustness measures, discrimination advantages and convertibility "
                    "in general probabilistic theories.",
        epilog="RF_THREADS caps the worker pool of verify. Exit codes: 0 ok, 1 invalid input, "
               "2 solver failure, 3 infeasible / not convertible / not certified."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("robustness", help="robustness of a state, measurement or channel")
    p.add_argument("--kind", choices=ROBUSTNESS_KINDS, required=True)
    p.add_argument("--model", help="model file (or a \"model\" entry in the object file)")
    p.add_argument("--free", required=True, help="free states, free effects or free channels")
    p.add_argument("--free-out", help="free states of the output model (genpower)")
    p.add_argument("--object", required=True, help="state, measurement, channel or channel ensemble")
    p.set_defaults(handler=cmd_robustness)

    p = sub.add_parser("advantage", help="discrimination task attaining the advantage ratio")
    p.add_argument("--theorem", choices=ADVANTAGE_THEOREMS, required=True)
    p.add_argument("--model")
    p.add_argument("--free", required=True)
    p.add_argument("--free-out")
    p.add_argument("--object", required=True)
    p.add_argument("--restriction", help="restricted measurements for theorem 7 (effect cone or list)")
    p.add_argument("--subchannel", action="store_true", help="subchannel discrimination for theorem 1")
    p.add_argument("--csv", metavar="FILE", help="random-task upper-bound sweep rows")
    p.add_argument("--tasks", type=int, default=300, help="random tasks in the sweep")
    p.set_defaults(handler=cmd_advantage)

    p = sub.add_parser("discriminate", help="optimal success probability of a state ensemble")
    p.add_argument("--model")
    p.add_argument("--object", required=True, help="ensemble file")
    p.add_argument("--free-effects", help="restrict to measurements with effects in this cone")
    p.set_defaults(handler=cmd_discriminate)

    p = sub.add_parser("convert", help="convertibility under free operations")
    p.add_argument("--model")
    p.add_argument("--ops", required=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--mode", choices=(CONCLUSIVE, INCONCLUSIVE), default=INCONCLUSIVE,
                   help="witness mode for ensembles")
    p.add_argument("--witness", metavar="FILE", help="write the separating task when not convertible")
    p.set_defaults(handler=cmd_convert)

    p = sub.add_parser("accinfo", help="accessible-information gain over free measurements")
    p.add_argument("--model")
    p.add_argument("--measurement", required=True)
    p.add_argument("--free-effects", required=True)
    p.add_argument("--sweep", action="store_true", help="check the bound on random ensembles")
    p.add_argument("--tasks", type=int, default=200)
    p.add_argument("--csv", metavar="FILE", help="sweep gains")
    p.set_defaults(handler=cmd_accinfo)

    p = sub.add_parser("verify", help="certification suite of one theorem")
    p.add_argument("--theorem", choices=THEOREMS, required=True)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--tasks", type=int, default=300, help="random instances per sweep")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("norms", help="base, order-unit, free and restricted norms of a vector")
    p.add_argument("--model")
    p.add_argument("--object", required=True)
    p.add_argument("--free")
    p.add_argument("--free-effects")
    p.add_argument("--data-hiding", action="store_true", help="data hiding ratio of the free effects")
    p.set_defaults(handler=cmd_norms)

    p = sub.add_parser("library", help="bundled example instances")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("directory", nargs="?")
    p.set_defaults(handler=cmd_library)

    for p in sub.choices.values():
        _common(p)
    return parser


def configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Execute one command line and return its exit code.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    configure_logging(args.verbose)
    try:
        config = RunConfig.from_args(args)
        return args.handler(config)
    except (ContractViolation, UnsupportedOperation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverFailure, InternalError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
