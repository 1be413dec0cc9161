"""Command-line front end.

Every subcommand writes a single JSON document to stdout (diagnostics go
to stderr) with a fixed key order, so repeated runs are diffable; the
only field that varies between identical runs is ``wall_time_ms``.  Exit
codes: 0 success, 1 infeasible, 2 usage or data error, 3 time limit hit
(best incumbent reported), 4 internal error (a solution failed the
independent checker and was refused).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import generator, model, verify
from .conflict import conflicts_of
from .model import DeltaPolicy, Instance
from .parallelism import (
    INCUMBENT_TIMEOUT,
    INFEASIBLE,
    OPTIMAL,
    ParallelismSolution,
    SolveConfig,
    solve_max_parallelism,
)
from .spacing import SpacingProblem, SpacingSolution, solve_spacing

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3
EXIT_INTERNAL = 4


class CliError(Exception):
    """Usage or data error; maps to exit code 2."""


def _read_instance(path: str, delta_pm: int | None) -> Instance:
    policy = (
        DeltaPolicy.symmetric(delta_pm) if delta_pm is not None else DeltaPolicy.explicit()
    )
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read instance file {path}: {exc}") from None
    try:
        return model.parse_instance(text, policy)
    except model.ModelError as exc:
        raise CliError(f"invalid instance {path}: {exc}") from None


def _emit(document: dict, out: str | None) -> None:
    text = json.dumps(document, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _command_echo(args: argparse.Namespace, fields: list[str]) -> dict:
    echo: dict = {"subcommand": args.command}
    for name in fields:
        echo[name] = getattr(args, name.replace("-", "_"))
    echo["delta_policy"] = (
        {"mode": model.SYMMETRIC_HALF_WIDTH, "half_width_pm": args.delta}
        if getattr(args, "delta", None) is not None
        else {"mode": model.EXPLICIT_INTERVALS}
    )
    return echo


def _parallelism_payload(instance: Instance, sol: ParallelismSolution) -> dict:
    rows = []
    for rid in sol.selected_radii:
        noms = instance.entry(rid).nominals()
        picks = sol.selections.get(rid, ())
        rows.append(
            {
                "radius": rid,
                "q": sol.counts.get(rid),
                "indices": list(picks),
                "nominal_pm": [noms[j] for j in picks],
            }
        )
    return {
        "type": "parallelism",
        "status": sol.status,
        "P": sol.parallelism,
        "selected_radii": list(sol.selected_radii),
        "rows": rows,
    }


def _spacing_payload(instance: Instance, problem: SpacingProblem,
                     sol: SpacingSolution) -> dict:
    rows = []
    for rid, row in zip(sol.selected_radii, sol.matrix):
        noms = instance.entry(rid).nominals()
        rows.append(
            {
                "radius": rid,
                "indices": list(row),
                "nominal_pm": [noms[j] for j in row],
            }
        )
    return {
        "type": "spacing",
        "status": sol.status,
        "mode": problem.mode,
        "n_radii": problem.n_radii,
        "n_lambda": problem.n_lambda,
        "dist_pm": sol.dist_pm,
        "selected_radii": list(sol.selected_radii),
        "rows": rows,
    }


def _status_exit(status: str) -> int:
    if status == OPTIMAL:
        return EXIT_OK
    if status == INFEASIBLE:
        return EXIT_INFEASIBLE
    if status == INCUMBENT_TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_INTERNAL


def _solve_config(args: argparse.Namespace) -> SolveConfig:
    return SolveConfig(
        time_limit=args.time_limit,
        method=args.method,
        trim_to_p=getattr(args, "trim", False),
    )


def _checked_parallelism(instance, sol, n_radii) -> None:
    problems = verify.check_parallelism_solution(instance, sol, n_radii)
    if problems:
        raise _InternalError("solution rejected by checker: " + "; ".join(problems))


def _checked_spacing(instance, problem, sol) -> None:
    problems = verify.check_spacing_solution(instance, problem, sol)
    if problems:
        raise _InternalError("solution rejected by checker: " + "; ".join(problems))


class _InternalError(Exception):
    pass


# --- subcommands -----------------------------------------------------------


def _cmd_validate(args) -> int:
    try:
        instance = _read_instance(args.instance, args.delta)
    except CliError as exc:
        _emit({"schema_version": SCHEMA_VERSION, "violations": [str(exc)]}, args.out)
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    document = {
        "schema_version": SCHEMA_VERSION,
        "instance_digest": model.instance_digest(instance),
        "violations": model.validate(instance),
    }
    _emit(document, args.out)
    return EXIT_OK


def _cmd_export(args) -> int:
    instance = _read_instance(args.instance, args.delta)
    if args.format == "asp":
        text = model.export_asp_facts(instance)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    else:
        document = {
            "schema_version": SCHEMA_VERSION,
            "label": instance.label,
            "instance_digest": model.instance_digest(instance),
            "radii": [
                {
                    "id": e.id,
                    "radius_pm": e.radius_pm,
                    "resonances": [
                        {"nominal_pm": r.nominal, "lmin_pm": r.lmin, "lmax_pm": r.lmax}
                        for r in e.resonances
                    ],
                }
                for e in instance.radii
            ],
        }
        _emit(document, args.out)
    return EXIT_OK


def _cmd_conflicts(args) -> int:
    instance = _read_instance(args.instance, args.delta)
    conflicts = conflicts_of(instance)

    def endpoint_doc(endpoint):
        rid, idx = endpoint
        return {
            "radius": rid,
            "index": idx,
            "nominal_pm": instance.entry(rid).resonances[idx].nominal,
        }

    def pair_doc(p):
        return {
            "kind": p.kind,
            "first": endpoint_doc(p.first),
            "second": endpoint_doc(p.second),
        }

    cross = conflicts.cross_pairs()
    within = conflicts.within_pairs()
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo(args, ["instance"]),
        "instance_digest": model.instance_digest(instance),
        "cross_count": len(cross),
        "within_count": len(within),
        "pairs": [pair_doc(p) for p in cross + within],
    }
    if args.table:
        for p in cross + within:
            (r1, i1), (r2, i2) = p.first, p.second
            v1 = instance.entry(r1).resonances[i1].nominal
            v2 = instance.entry(r2).resonances[i2].nominal
            print(
                f"{p.kind:6}  r{r1}[{i1}] {model.pm_to_nm_text(v1)} nm  --  "
                f"r{r2}[{i2}] {model.pm_to_nm_text(v2)} nm",
                file=sys.stderr,
            )
    _emit(document, args.out)
    return EXIT_OK


def _cmd_max_parallelism(args) -> int:
    instance = _read_instance(args.instance, args.delta)
    conflicts = conflicts_of(instance)
    started = time.monotonic()
    sol = solve_max_parallelism(instance, conflicts, args.n_radii, _solve_config(args))
    wall_ms = int((time.monotonic() - started) * 1000)
    _checked_parallelism(instance, sol, args.n_radii)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo(
            args, ["instance", "n_radii", "method", "time_limit", "trim"]
        ),
        "instance_digest": model.instance_digest(instance),
        "status": sol.status,
        "result": _parallelism_payload(instance, sol),
        "wall_time_ms": wall_ms,
    }
    _emit(document, args.out)
    return _status_exit(sol.status)


def _cmd_spacing(args) -> int:
    instance = _read_instance(args.instance, args.delta)
    problem = SpacingProblem(args.n_radii, args.parallelism, args.mode)
    started = time.monotonic()
    sol = solve_spacing(instance, problem, _solve_config(args))
    wall_ms = int((time.monotonic() - started) * 1000)
    _checked_spacing(instance, problem, sol)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo(
            args, ["instance", "n_radii", "parallelism", "mode", "method",
                   "time_limit"]
        ),
        "instance_digest": model.instance_digest(instance),
        "status": sol.status,
        "result": _spacing_payload(instance, problem, sol),
        "wall_time_ms": wall_ms,
    }
    _emit(document, args.out)
    return _status_exit(sol.status)


def _cmd_pipeline(args) -> int:
    instance = _read_instance(args.instance, args.delta)
    conflicts = conflicts_of(instance)
    started = time.monotonic()
    phase1 = solve_max_parallelism(instance, conflicts, args.n_radii, _solve_config(args))
    _checked_parallelism(instance, phase1, args.n_radii)
    phase2_doc = None
    status = phase1.status
    if phase1.status == OPTIMAL and phase1.parallelism:
        problem = SpacingProblem(args.n_radii, phase1.parallelism, args.mode)
        phase2 = solve_spacing(instance, problem, _solve_config(args))
        _checked_spacing(instance, problem, phase2)
        phase2_doc = _spacing_payload(instance, problem, phase2)
        if phase2.status != OPTIMAL:
            status = phase2.status
    wall_ms = int((time.monotonic() - started) * 1000)
    document = {
        "schema_version": SCHEMA_VERSION,
        "command": _command_echo(
            args, ["instance", "n_radii", "mode", "method", "time_limit", "trim"]
        ),
        "instance_digest": model.instance_digest(instance),
        "status": status,
        "result": {
            "type": "pipeline",
            "phase1": _parallelism_payload(instance, phase1),
            "phase2": phase2_doc,
        },
        "wall_time_ms": wall_ms,
    }
    _emit(document, args.out)
    return _status_exit(status)


def _cmd_generate(args) -> int:
    try:
        spec = generator.GenSpec(
            r_min_pm=args.r_min_pm,
            r_max_pm=args.r_max_pm,
            r_step_pm=args.r_step_pm,
            band_lo_pm=args.band_lo_pm,
            band_hi_pm=args.band_hi_pm,
            n_eff_milli=args.n_eff_milli,
            jitter_pm=args.jitter_pm,
            seed=args.seed,
        )
        instance = generator.generate(spec)
    except generator.GeneratorError as exc:
        raise CliError(str(exc)) from None
    text = model.format_instance(instance)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(
            f"wrote {len(instance.radii)} radii, "
            f"{sum(len(e.resonances) for e in instance.radii)} resonances to {args.out}",
            file=sys.stderr,
        )
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _parse_int_list(text: str, flag: str) -> list[int]:
    if text.strip() == "":
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise CliError(f"{flag} expects a comma-separated integer list") from None


def _cmd_bench(args) -> int:
    n_radii_grid = _parse_int_list(args.n_radii, "--n-radii")
    delta_grid = _parse_int_list(args.delta_grid, "--delta")
    phases = _parse_int_list(args.phases, "--phases")
    if any(p not in (1, 2) for p in phases):
        raise CliError("--phases entries must be 1 or 2")
    out_path = Path(args.out) if args.out else None
    stream = out_path.open("w", encoding="utf-8") if out_path else sys.stdout
    try:
        stream.write("instance,n_radii,delta_pm,phase,status,objective,wall_time_ms\n")
        stream.flush()
        for path in args.instance:
            for delta in delta_grid:
                instance = _read_instance(path, delta)
                label = instance.label or Path(path).stem
                conflicts = conflicts_of(instance)
                for n_radii in n_radii_grid:
                    config = SolveConfig(time_limit=args.time_limit)
                    started = time.monotonic()
                    phase1 = solve_max_parallelism(instance, conflicts, n_radii, config)
                    ms = int((time.monotonic() - started) * 1000)
                    if 1 in phases:
                        objective = "" if phase1.parallelism is None else phase1.parallelism
                        stream.write(
                            f"{label},{n_radii},{delta},1,{phase1.status},{objective},{ms}\n"
                        )
                        stream.flush()
                    if 2 in phases:
                        if phase1.status == OPTIMAL and phase1.parallelism:
                            problem = SpacingProblem(
                                n_radii, phase1.parallelism, args.mode
                            )
                            started = time.monotonic()
                            phase2 = solve_spacing(instance, problem, config)
                            ms = int((time.monotonic() - started) * 1000)
                            objective = "" if phase2.dist_pm is None else phase2.dist_pm
                            status = phase2.status
                        else:
                            # No parallelism to feed forward; the cell still
                            # gets its row, carrying the phase-1 outcome.
                            objective, ms, status = "", 0, phase1.status
                        stream.write(
                            f"{label},{n_radii},{delta},2,{status},{objective},{ms}\n"
                        )
                        stream.flush()
    finally:
        if out_path:
            stream.close()
    return EXIT_OK


# --- argument parsing ------------------------------------------------------


def _add_instance_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", required=True, help="instance file path")
    parser.add_argument(
        "--delta",
        type=int,
        default=None,
        metavar="PM",
        help="symmetric uncertainty half-width in pm (two resonances conflict "
        "when their nominals are within 2*delta); omit to honor intervals "
        "stored in the file",
    )
    parser.add_argument("--out", default=None, help="write output here instead of stdout")


def _add_solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--method",
        choices=["bnb", "exhaustive"],
        default="bnb",
        help="search strategy (exhaustive is the oracle-grade enumeration)",
    )
    parser.add_argument(
        "--time-limit",
        type=float,
        default=0.0,
        metavar="SECONDS",
        help="wall-clock budget; 0 disables (default)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wronoc",
        description="Exact radius and carrier-wavelength selection for "
        "wavelength-routed optical networks-on-chip.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse an instance and report violations")
    _add_instance_options(p)

    p = sub.add_parser("export-asp", help="export an instance as ASP facts")
    _add_instance_options(p)
    p.add_argument("--format", choices=["asp", "json"], default="asp")

    p = sub.add_parser("conflicts", help="list conflicting resonance pairs")
    _add_instance_options(p)
    p.add_argument("--table", action="store_true",
                   help="also print a human-readable table on stderr")

    p = sub.add_parser("max-parallelism",
                       help="phase 1: maximise the minimum carriers per radius")
    _add_instance_options(p)
    _add_solver_options(p)
    p.add_argument("--n-radii", type=int, required=True, metavar="K")
    p.add_argument("--trim", action="store_true",
                   help="truncate every selection to exactly P carriers")

    p = sub.add_parser("spacing",
                       help="phase 2: maximise the minimum carrier spacing")
    _add_instance_options(p)
    _add_solver_options(p)
    p.add_argument("--n-radii", type=int, required=True, metavar="K")
    p.add_argument("--parallelism", type=int, required=True, metavar="P",
                   help="carriers per selected radius")
    p.add_argument("--mode", choices=["base", "refined"], default="base")

    p = sub.add_parser("pipeline",
                       help="phase 1 then phase 2 with the optimum as carrier count")
    _add_instance_options(p)
    _add_solver_options(p)
    p.add_argument("--n-radii", type=int, required=True, metavar="K")
    p.add_argument("--mode", choices=["base", "refined"], default="base")
    p.add_argument("--trim", action="store_true")

    p = sub.add_parser("generate", help="write a synthetic instance file")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--r-min-pm", type=int, default=5_000_000)
    p.add_argument("--r-max-pm", type=int, default=30_000_000)
    p.add_argument("--r-step-pm", type=int, default=250_000)
    p.add_argument("--band-lo-pm", type=int, default=1_490_000)
    p.add_argument("--band-hi-pm", type=int, default=1_620_000)
    p.add_argument("--n-eff-milli", type=int, default=2950)
    p.add_argument("--jitter-pm", type=int, default=0)

    p = sub.add_parser("bench", help="run a parameter grid and write a CSV")
    p.add_argument("--instance", action="append", required=True,
                   help="instance file (repeatable)")
    p.add_argument("--n-radii", default="", metavar="LIST",
                   help="comma-separated radius counts, e.g. 2,4,8")
    p.add_argument("--delta", dest="delta_grid", default="0", metavar="LIST",
                   help="comma-separated half-widths in pm, e.g. 0,1000")
    p.add_argument("--phases", default="1", metavar="LIST",
                   help="phases to run per cell: 1, 2 or 1,2")
    p.add_argument("--mode", choices=["base", "refined"], default="base")
    p.add_argument("--time-limit", type=float, default=0.0)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")

    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "export-asp": _cmd_export,
    "conflicts": _cmd_conflicts,
    "max-parallelism": _cmd_max_parallelism,
    "spacing": _cmd_spacing,
    "pipeline": _cmd_pipeline,
    "generate": _cmd_generate,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help; keep its code.
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
