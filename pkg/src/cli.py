"""Command-line interface.

Subcommands:

    codec hat-encode N | hat-decode BITS
    tiling check --group G --n N --window W
    tiling density --group G --k K --n N
    tiling invariance --group G --i I
    extension build --seq h3 --l L --window W
    entropy --spec FILE --n-max N
    complexity --spec FILE --config FILE
    brudno --spec FILE --config FILE [--db PATH --table NAME]

Results go to stdout as CSV or JSON; diagnostics, progress and the echoed
seeds go to stderr. Exit status is 0 on success, 1 on invalid input or any
other library error, and 2 when a search budget runs out.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import Sequence

from rich.console import Console
from rich.logging import RichHandler

from src.brudno import brudno_sweep, entropy_from_count, entropy_kind, mean_complexity
from src.codec import decode_hat_all, encode_hat
from src.config import Budgets, RunConfig, load_run_config
from src.database import save_report
from src.exceptions import *
from src.extension import ExtensionMonotiling, sequence_by_name
from src.monotiling import Monotiling, box_tiling, check_tiling_window, density_report, folner_ratio, invariance_index, normalize, tiling_by_name
from src.subshift import ShiftSpec, count_language, load_shift_spec, sample_configuration

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BUDGET = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors become `ValidationError` (exit 1)."""

    def error(self, message: str) -> None:
        raise ValidationError(f"arguments: {message}")


def _setup_logging(verbose: bool) -> None:
    handler = RichHandler(console=Console(stderr=True), show_path=False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True
    )


def _print_json(document: object, one_line: bool = False) -> None:
    print(json.dumps(document, indent=None if one_line else 2, default=_json_default))


def _json_default(value: object) -> object:
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _tiling_for(group: str, budgets: Budgets, normalized: bool = False) -> Monotiling:
    tiling = tiling_by_name(group, budgets)
    return normalize(tiling, budgets) if normalized else tiling


def _run_codec(args: argparse.Namespace) -> int:
    if args.action == "hat-encode":
        if args.value < 0:
            raise ValidationError(f"N: must be nonnegative, got {args.value}")
        print(encode_hat(args.value).to01())
    else:
        print(" ".join(str(v) for v in decode_hat_all(args.bits)))
    return EXIT_OK


def _run_tiling(args: argparse.Namespace, budgets: Budgets) -> int:
    tiling = _tiling_for(args.group, budgets, args.normalize)
    if args.action == "check":
        report = check_tiling_window(tiling, args.n, args.window, budgets)
        _print_json(report.as_dict(), one_line=True)
    elif args.action == "density":
        _print_json(density_report(tiling, args.k, args.n).as_dict(), one_line=True)
    else:
        _print_json({"group": args.group, "i": args.i, "n": invariance_index(tiling, args.i, budgets)}, one_line=True)
    return EXIT_OK


def _run_extension(args: argparse.Namespace, budgets: Budgets) -> int:
    seq = sequence_by_name(args.seq)
    seq.validate()
    tiling = ExtensionMonotiling(
        seq,
        box_tiling(1, budgets=budgets),
        box_tiling(2, budgets=budgets),
        budgets
    )
    stage = tiling.stage(args.l)
    ratios = {str(g): folner_ratio(tiling, args.l, g) for g in stage.K}
    check = check_tiling_window(tiling, args.l, args.window, budgets)
    mass = stage.interior_mass()
    _print_json({
        "seq": seq.name,
        "l": args.l,
        "m_star": stage.m_star,
        "k_star": stage.k_star,
        "tile_size": stage.tile_size,
        "contains_identity": tiling.tile_contains(args.l, seq.F.identity),
        "invariance_ratios": ratios,
        "invariant": all(r <= Fraction(1, args.l) for r in ratios.values()),
        "interior_mass": mass,
        **check.as_dict(),
    })
    return EXIT_OK


def _run_entropy(args: argparse.Namespace, budgets: Budgets) -> int:
    spec = load_shift_spec(args.spec)
    tiling = _tiling_for(spec.group_name, budgets)
    Console(stderr=True).print(f"# spec={spec.name} entropy_kind={entropy_kind(spec)}")
    print("n,cells,count,entropy_bits")
    for n in range(1, args.n_max + 1):
        window = tiling.tile(n)
        count = count_language(spec, window, budgets)
        entropy = entropy_from_count(spec, count, len(window), n)
        print(f"{n},{len(window)},{count},{entropy:.6f}")
    return EXIT_OK


def _load_inputs(args: argparse.Namespace, budgets: Budgets) -> tuple[ShiftSpec, RunConfig, Monotiling]:
    spec = load_shift_spec(args.spec)
    config = load_run_config(args.config, budgets)
    group = config.group or spec.group_name
    if group != spec.group_name:
        raise ValidationError(f"group: config names {group} but the spec lives on {spec.group_name}")
    return spec, config, _tiling_for(group, config.budgets, config.normalize)


def _run_complexity(args: argparse.Namespace, budgets: Budgets) -> int:
    spec, config, tiling = _load_inputs(args, budgets)
    sampler = config.sampler
    rows = []
    for n in config.n_list:
        omega = sample_configuration(
            spec, sampler.kind, window=tiling.tile(n), seed=sampler.seed,
            period=sampler.period, letter=sampler.letter
        )
        report = mean_complexity(omega, spec, tiling, n, config.k_sweep, config.mode, config.budgets, with_entropy=True)
        rows.append(report)

    if config.output == "json":
        _print_json({
            "spec": spec.name,
            "entropy_kind": entropy_kind(spec),
            "sampler": sampler.kind,
            "seed": sampler.seed,
            "mode": config.mode,
            "rows": [
                {
                    "n": r.n, "cells": r.cells, "best_k": r.best_k,
                    "program_length_bits": r.program_length,
                    "mean_complexity_bits": r.mean_complexity,
                    "entropy_bits": r.entropy,
                    "lengths": {str(k): v for k, v in r.lengths.items()},
                }
                for r in rows
            ],
        })
    else:
        console = Console(stderr=True)
        console.print(f"# spec={spec.name} entropy_kind={entropy_kind(spec)}")
        console.print(f"# sampler={sampler.kind} seed={sampler.seed} mode={config.mode}")
        print("n,cells,best_k,program_length_bits,mean_complexity_bits,entropy_bits")
        for r in rows:
            print(f"{r.n},{r.cells},{r.best_k},{r.program_length},{r.mean_complexity:.6f},{r.entropy:.6f}")
    return EXIT_OK


def _run_brudno(args: argparse.Namespace, budgets: Budgets) -> int:
    spec, config, tiling = _load_inputs(args, budgets)
    frame = brudno_sweep(
        spec, tiling, config.n_list, config.k_sweep, config.sampler,
        config.mode, config.budgets, progress=args.progress
    )
    if args.db is not None:
        save_report(args.table or spec.name, frame, args.db)

    if config.output == "json":
        print(frame.to_report_json(spec=spec.name, sampler=config.sampler.kind, seed=config.sampler.seed, mode=config.mode))
    else:
        labels = ", ".join(f"n={r['n']}:{r['statistic']}/{r['entropy_kind']}" for r in frame.records())
        Console(stderr=True).print(f"# sampler={config.sampler.kind} seed={config.sampler.seed} mode={config.mode} {labels}")
        sys.stdout.write(frame.to_report_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="folner-brudno", description="Følner monotilings, subshift entropy and tiling-dictionary complexity.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    codec = commands.add_parser("codec", help="prefix-free integer codes")
    codec_actions = codec.add_subparsers(dest="action", required=True, parser_class=_Parser)
    encode = codec_actions.add_parser("hat-encode")
    encode.add_argument("value", type=int)
    decode = codec_actions.add_parser("hat-decode")
    decode.add_argument("bits")

    tiling = commands.add_parser("tiling", help="built-in monotilings")
    tiling_actions = tiling.add_subparsers(dest="action", required=True, parser_class=_Parser)
    check = tiling_actions.add_parser("check")
    check.add_argument("--group", required=True)
    check.add_argument("--n", type=int, required=True)
    check.add_argument("--window", type=int, default=1000)
    density = tiling_actions.add_parser("density")
    density.add_argument("--group", required=True)
    density.add_argument("--k", type=int, required=True)
    density.add_argument("--n", type=int, required=True)
    invariance = tiling_actions.add_parser("invariance")
    invariance.add_argument("--group", required=True)
    invariance.add_argument("--i", type=int, required=True)
    for sub in (check, density, invariance):
        sub.add_argument("--normalize", action="store_true", help="use the normalised subsequence")

    extension = commands.add_parser("extension", help="monotilings of group extensions")
    extension_actions = extension.add_subparsers(dest="action", required=True, parser_class=_Parser)
    build = extension_actions.add_parser("build")
    build.add_argument("--seq", default="h3")
    build.add_argument("--l", type=int, required=True)
    build.add_argument("--window", type=int, default=1000)

    entropy = commands.add_parser("entropy", help="pattern-counting entropy estimates")
    entropy.add_argument("--spec", required=True)
    entropy.add_argument("--n-max", type=int, required=True)

    complexity = commands.add_parser("complexity", help="mean complexity of a sampled configuration")
    complexity.add_argument("--spec", required=True)
    complexity.add_argument("--config", required=True)

    brudno = commands.add_parser("brudno", help="entropy against worst mean complexity")
    brudno.add_argument("--spec", required=True)
    brudno.add_argument("--config", required=True)
    brudno.add_argument("--db", default=None, help="SQLite file to append the table to")
    brudno.add_argument("--table", default=None, help="table name; defaults to the spec name")
    brudno.add_argument("--progress", action="store_true", help="progress bar on stderr")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Runs one command and returns its exit status."""

    console = Console(stderr=True)
    try:
        args = build_parser().parse_args(argv)
        _setup_logging(args.verbose)
        budgets = Budgets.from_env()
        if args.command == "codec":
            return _run_codec(args)
        if args.command == "tiling":
            return _run_tiling(args, budgets)
        if args.command == "extension":
            return _run_extension(args, budgets)
        if args.command == "entropy":
            return _run_entropy(args, budgets)
        if args.command == "complexity":
            return _run_complexity(args, budgets)
        return _run_brudno(args, budgets)
    except BudgetExceededError as e:
        console.print(f"budget exceeded: {e}", markup=False, highlight=False)
        return EXIT_BUDGET
    except FolnerBrudnoError as e:
        console.print(f"error: {e}", markup=False, highlight=False)
        return EXIT_ERROR
    except ValueError as e:
        console.print(f"error: {e}", markup=False, highlight=False)
        return EXIT_ERROR
