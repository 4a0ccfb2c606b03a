"""Command-line front end.

Subcommands: generate, import, run, certify, flp, sweep.  Every command
reads flags plus files and writes JSON or CSV (stdout by default, a file
with --output); sweep can additionally render figures next to its CSV.
Exit codes: 0 success, 1 bad input, 2 broken internal invariant.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .bounds import certificate_report_to_dict, check_dual_feasibility, solve_flp
from .engine import result_to_dict, simulate
from .errors import InvariantError, ValidationError
from .model import Instance, compute_p, validate_instance
from .report import (
    certified_dual_bound,
    run_comparison,
    sweep,
    sweep_points_to_csv,
)
from .schedulers import (
    ALGORITHM_NAMES,
    capacity_multiplier_for,
    make_policy,
    mode_for,
)
from .workloads import (
    SyntheticParams,
    draw_uniform_weights,
    generate_synthetic,
    import_trace,
    read_instance,
    write_instance,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INVARIANT = 2


class _Parser(argparse.ArgumentParser):
    """argparse that signals usage problems as validation errors (exit 1)."""

    def error(self, message):
        raise ValidationError(f"{self.prog}: {message}")


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    common.add_argument("--output", default="-", help="output path, '-' for stdout (default)")
    common.add_argument(
        "--tolerance", type=float, default=1e-9,
        help="normalized slack tolerance for certificate checks (default 1e-9)",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="blindflow", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="generate a synthetic instance")
    gen.add_argument("-n", "--coflows", type=int, required=True, help="number of coflows")
    gen.add_argument("-m", "--ports", type=int, required=True, help="ports per side")
    gen.add_argument("--p-max", type=int, required=True, help="largest flow count per coflow")
    gen.add_argument("-D", "--max-demand", type=int, required=True, help="largest integer demand")
    gen.add_argument("-T", "--last-release", type=float, required=True, help="releases drawn from [0, T]")
    gen.add_argument(
        "--weights", default="unit",
        help="'unit' (default) or 'uniform:a,b' for integer weights drawn from {a..b}",
    )

    imp = sub.add_parser("import", parents=[common], help="convert a shuffle trace to instance JSON")
    imp.add_argument("--trace", required=True, help="trace file path")
    imp.add_argument("--capacity-mbps", type=float, required=True, help="capacity of every port")
    imp.add_argument("--first", type=int, default=None, help="keep only the first N coflows")

    run = sub.add_parser("run", parents=[common], help="simulate one algorithm on an instance")
    run.add_argument("--instance", required=True, help="instance JSON path")
    run.add_argument("--algorithm", required=True, choices=ALGORITHM_NAMES)
    run.add_argument("--unit-weights", action="store_true", help="override all weights to one")
    run.add_argument("--timeline", action="store_true", help="include the full timeline in the output")

    cert = sub.add_parser("certify", parents=[common], help="build and check a lower-bound certificate")
    cert.add_argument("--instance", required=True, help="instance JSON path")
    cert.add_argument("--unit-weights", action="store_true", help="override all weights to one")

    flp = sub.add_parser("flp", parents=[common], help="solve the time-slotted LP relaxation")
    flp.add_argument("--instance", required=True, help="instance JSON path")
    flp.add_argument("--slot", type=float, required=True, help="slot length")
    flp.add_argument("--horizon", type=int, required=True, help="number of slots")

    sw = sub.add_parser("sweep", parents=[common], help="sweep an axis of synthetic workloads")
    sw.add_argument("--axis", required=True, choices=("p", "n"))
    sw.add_argument("--values", required=True, help="comma-separated axis values, e.g. 20,60,100")
    sw.add_argument("-n", "--coflows", type=int, required=True, help="base number of coflows")
    sw.add_argument("-m", "--ports", type=int, required=True, help="ports per side")
    sw.add_argument("--p-max", type=int, default=None, help="base largest flow count (required for axis n)")
    sw.add_argument("-D", "--max-demand", type=int, required=True, help="largest integer demand")
    sw.add_argument("-T", "--last-release", type=float, required=True, help="releases drawn from [0, T]")
    sw.add_argument("--repetitions", type=int, default=1, help="instances per axis value (default 1)")
    sw.add_argument(
        "--algorithms", default="blindflow,blindflow-max,aalo-like",
        help="comma-separated algorithm names (default blindflow,blindflow-max,aalo-like)",
    )
    sw.add_argument("--json", action="store_true", help="emit rows as JSON instead of CSV")
    sw.add_argument("--plot", action="store_true", help="render figures next to the CSV (needs a file --output)")

    return parser


def _emit(text: str, output: str) -> None:
    if output == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")


def _load_instance(path: str, unit_weights: bool = False) -> Instance:
    instance = read_instance(path)
    if unit_weights:
        instance = dataclasses.replace(
            instance,
            coflows=tuple(dataclasses.replace(cf, weight=1.0) for cf in instance.coflows),
        )
    return validate_instance(instance)


def _parse_weights_spec(spec: str) -> tuple[int, int] | None:
    if spec == "unit":
        return None
    if spec.startswith("uniform:"):
        parts = spec[len("uniform:"):].split(",")
        if len(parts) == 2:
            try:
                return int(parts[0]), int(parts[1])
            except ValueError:
                pass
    raise ValidationError(f"--weights must be 'unit' or 'uniform:a,b', got {spec!r}")


def _cmd_generate(args) -> int:
    params = SyntheticParams(
        num_coflows=args.coflows,
        ports_per_side=args.ports,
        p_max=args.p_max,
        max_demand=args.max_demand,
        last_release=args.last_release,
        seed=args.seed,
    )
    instance = generate_synthetic(params)
    weight_range = _parse_weights_spec(args.weights)
    if weight_range is not None:
        instance = draw_uniform_weights(instance, weight_range[0], weight_range[1], args.seed)
    if args.output == "-":
        from .model import instance_to_dict

        _emit(json.dumps(instance_to_dict(instance), indent=2), "-")
    else:
        write_instance(instance, args.output)
    return EXIT_OK


def _cmd_import(args) -> int:
    instance = import_trace(args.trace, args.capacity_mbps, args.first)
    if args.output == "-":
        from .model import instance_to_dict

        _emit(json.dumps(instance_to_dict(instance), indent=2), "-")
    else:
        write_instance(instance, args.output)
    return EXIT_OK


def _cmd_run(args) -> int:
    instance = _load_instance(args.instance, args.unit_weights)
    p = compute_p(instance) if instance.coflows else 0
    result = simulate(
        instance,
        make_policy(args.algorithm),
        mode_for(args.algorithm),
        capacity_multiplier_for(args.algorithm, p),
        record_timeline=args.timeline,
    )
    _emit(json.dumps(result_to_dict(result, include_timeline=args.timeline), indent=2), args.output)
    return EXIT_OK


def _cmd_certify(args) -> int:
    instance = _load_instance(args.instance, args.unit_weights)
    _, cert = certified_dual_bound(instance, tolerance=args.tolerance)
    report = cert.feasibility
    if report is None:  # pragma: no cover - certified_dual_bound always checks
        check_dual_feasibility(cert, instance, args.tolerance)
    _emit(json.dumps(certificate_report_to_dict(cert), indent=2), args.output)
    return EXIT_OK if cert.feasibility.feasible else EXIT_INVARIANT


def _cmd_flp(args) -> int:
    instance = _load_instance(args.instance)
    value, solution = solve_flp(instance, args.slot, args.horizon)
    payload = {
        "optimal_value": value,
        "slot_length": args.slot,
        "horizon_slots": args.horizon,
        "completion_fractions": {f"{k}:{s}": v for (k, s), v in sorted(solution.f.items())},
        "volumes": {f"{k}:{i}:{j}:{s}": v for (k, i, j, s), v in sorted(solution.x.items())},
    }
    _emit(json.dumps(payload, indent=2), args.output)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"--values must be comma-separated integers, got {args.values!r}") from None
    algorithms = tuple(name for name in args.algorithms.split(",") if name)
    if args.axis == "n" and args.p_max is None:
        raise ValidationError("sweeping over n requires --p-max for the base parameters")
    base = SyntheticParams(
        num_coflows=args.coflows,
        ports_per_side=args.ports,
        p_max=args.p_max if args.p_max is not None else 1,
        max_demand=args.max_demand,
        last_release=args.last_release,
        seed=args.seed,
    )
    points = sweep(args.axis, values, base, args.repetitions, args.seed, algorithms)
    if args.json:
        payload = [dataclasses.asdict(pt) for pt in points]
        _emit(json.dumps(payload, indent=2), args.output)
    else:
        _emit(sweep_points_to_csv(points), args.output)
    if args.plot:
        if args.output == "-":
            raise ValidationError("--plot needs a file --output to place the figures next to")
        from .plotting import save_sweep_figures

        prefix = Path(args.output)
        prefix = prefix.parent / prefix.stem
        save_sweep_figures(points, args.axis, prefix)
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "import": _cmd_import,
    "run": _cmd_run,
    "certify": _cmd_certify,
    "flp": _cmd_flp,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantError as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
