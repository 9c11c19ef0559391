"""Command-line surface: ``popnas <subcommand> [flags]``.

Exit status: 0 success, 1 usage error, 2 data error, 3 evaluator failure.
Results go to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, TextIO, TypeVar

from pydantic import ValidationError

from src.config import Settings
from src.errors import DataError, EvaluatorError
from src.evaluators import SyntheticOracleParams, build_evaluator
from src.latency.subspace import enumerate_subspace
from src.latency.table import LatencyBand, audit_monotonicity, estimate_latency, load_table, parse_band
from src.search.assumption import check_assumption
from src.search.engine import SearchConfig, SearchResult, pop_search
from src.search.frontier import binned_frontier, frontier
from src.search.records import (
    load_latencies,
    load_records,
    write_file,
    write_history,
    write_json,
    write_records,
)
from src.search.spaces import BackboneSpace, DecoderSpace, SearchSpace
from src.space.arch_space import BlockKind, parse_code
from src.space.decoder_space import parse_decoder_code
from src.space.elements import element_precedes, parse_element
from src.space.partial_order import precedents

logger = logging.getLogger("popnas")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_EVALUATOR = 3

T = TypeVar("T")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; we reserve 2 for data errors."""

    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _flag(name: str, convert: Callable[[], T]) -> T:
    """Run a flag conversion, reporting failures as usage errors."""
    try:
        return convert()
    except (DataError, ValueError) as e:
        raise UsageError(f"invalid {name}: {e}") from None


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return value


def _alphabet(text: str | None, settings: Settings) -> tuple[int, ...]:
    if not text:
        return tuple(settings.width_alphabet)
    try:
        return tuple(_positive_int(w) for w in text.split(","))
    except (ValueError, argparse.ArgumentTypeError) as e:
        raise UsageError(f"invalid --alphabet: {e}") from None


def _band(args: argparse.Namespace) -> LatencyBand:
    if getattr(args, "band", None):
        return _flag("--band", lambda: parse_band(args.band))
    lo = args.min_ms if getattr(args, "min_ms", None) is not None else 0.0
    hi = args.max_ms if getattr(args, "max_ms", None) is not None else float("inf")
    return _flag("band", lambda: LatencyBand(t_min=lo, t_max=hi))


def _output(path: str | None, write: Callable[[TextIO], None]) -> None:
    if path:
        write_file(Path(path), write)
    else:
        write(sys.stdout)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_latency(args: argparse.Namespace, settings: Settings) -> int:
    alphabet = _alphabet(args.alphabet, settings)
    code = _flag("--arch", lambda: parse_code(args.arch, alphabet, tuple(settings.stem_widths)))
    table = load_table(args.table)
    print(repr(estimate_latency(code, table, args.resolution, args.classes)))
    return EXIT_OK


def _enumerate(args: argparse.Namespace, settings: Settings) -> dict:
    table = load_table(args.table)
    return enumerate_subspace(
        _band(args),
        table,
        _alphabet(args.alphabet, settings),
        BlockKind(args.kind),
        args.resolution,
        args.classes,
        args.max_blocks,
        tuple(settings.stem_widths),
    )


def cmd_enumerate(args: argparse.Namespace, settings: Settings) -> int:
    found = _enumerate(args, settings)

    def write(out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("code", "latency_ms"))
        for code, latency in found.items():
            writer.writerow((str(code), repr(latency)))

    _output(args.out, write)
    return EXIT_OK


def cmd_precedes(args: argparse.Namespace, settings: Settings) -> int:
    alphabet = _alphabet(args.alphabet, settings)
    a = _flag("--a", lambda: parse_element(args.a, alphabet, tuple(settings.stem_widths)))
    b = _flag("--b", lambda: parse_element(args.b, alphabet, tuple(settings.stem_widths)))
    print("true" if element_precedes(a, b) else "false")
    return EXIT_OK


def _read_space_file(path: str, alphabet: tuple[int, ...], settings: Settings) -> list:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise DataError(f"cannot read space file {path}: {e}") from None
    codes = []
    for line in lines:
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        # Records-format files carry the code in the first CSV column.
        text = next(csv.reader([text]))[0]
        if text == "code":
            continue
        codes.append(parse_code(text, alphabet, tuple(settings.stem_widths)))
    return codes


def cmd_precedents(args: argparse.Namespace, settings: Settings) -> int:
    alphabet = _alphabet(args.alphabet, settings)
    code = _flag("--arch", lambda: parse_code(args.arch, alphabet, tuple(settings.stem_widths)))
    if args.space_file:
        space = _read_space_file(args.space_file, alphabet, settings)
    elif args.table:
        space = list(_enumerate(args, settings))
    else:
        raise UsageError("precedents needs --space-file or --table with a band")
    found = precedents(code, space)
    print(len(found))
    if args.list:
        for m in found:
            print(m)
    return EXIT_OK


def _search_space(args: argparse.Namespace, settings: Settings) -> SearchSpace:
    band = _band(args)
    if args.space == "decoder":
        if args.latency_file:
            latencies = load_latencies(args.latency_file, parse_decoder_code)
            return DecoderSpace(args.classes, latencies=latencies, band=band)
        if not (args.table and args.backbone):
            raise UsageError("decoder search needs --latency-file, or --table with --backbone")
        alphabet = _alphabet(args.alphabet, settings)
        backbone = _flag("--backbone", lambda: parse_code(args.backbone, alphabet, tuple(settings.stem_widths)))
        return DecoderSpace(args.classes, table=load_table(args.table), backbone=backbone,
                            resolution=args.resolution, band=band)
    if not args.table:
        raise UsageError("backbone search needs --table")
    return BackboneSpace(
        load_table(args.table),
        band,
        _alphabet(args.alphabet, settings),
        BlockKind(args.kind),
        args.resolution,
        args.classes,
        args.max_blocks,
        tuple(settings.stem_widths),
        materialize=not args.sample,
    )


def _write_search(result: SearchResult, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_file(out_dir / "frontier.csv", lambda f: write_records(result.frontier, f))
    write_file(out_dir / "records.csv", lambda f: write_records(result.records, f))
    write_file(out_dir / "history.csv", lambda f: write_history(result.history, f))
    write_file(out_dir / "statistics.json", lambda f: write_json(result.statistics, f))
    if result.binned_frontier is not None:
        write_file(out_dir / "frontier_binned.csv", lambda f: write_records(result.binned_frontier, f))


def cmd_search(args: argparse.Namespace, settings: Settings) -> int:
    space = _search_space(args, settings)
    params = _flag("oracle parameters", lambda: SyntheticOracleParams(
        a_max=args.a_max, gamma=args.gamma, noise_sigma=args.noise_sigma, seed=args.seed,
    ))
    try:
        evaluator = build_evaluator(
            args.evaluator,
            params=params,
            timeout_s=args.eval_timeout if args.eval_timeout is not None else settings.evaluator_timeout_s,
            concurrency_safe=args.eval_concurrent,
            parse=space.parse,
        )
    except DataError:
        raise
    except ValueError as e:
        raise UsageError(f"invalid --evaluator: {e}") from None
    config = _flag("search flags", lambda: SearchConfig(
        seed=args.seed,
        patience=args.patience if args.patience is not None else settings.patience,
        max_evaluations=args.max_evals if args.max_evals is not None else settings.max_evaluations,
        report_bin_ms=args.bin_ms,
        strategy=args.strategy,
        batch_size=args.batch_size,
        sample_retries=settings.sample_retries,
    ))
    result = pop_search(space, evaluator, config)
    _write_search(result, Path(args.out))
    stats = result.statistics
    print(
        f"trained {stats.trained}, pruned "
        f"{'n/a' if stats.pruned is None else stats.pruned}, frontier {stats.frontier_size}, "
        f"stopped: {stats.stop_reason}"
    )
    return EXIT_OK


def _records_parser(args: argparse.Namespace, settings: Settings) -> Callable[[str], Any]:
    alphabet = _alphabet(getattr(args, "alphabet", None), settings)
    return lambda text: parse_element(text, alphabet, tuple(settings.stem_widths))


def cmd_frontier(args: argparse.Namespace, settings: Settings) -> int:
    records = load_records(args.records, _records_parser(args, settings))
    if args.bin_ms is not None:
        if args.bin_ms <= 0:
            raise UsageError("--bin-ms must be positive")
        members = binned_frontier(records, args.bin_ms)
    else:
        members = frontier(records)
    if not records:
        # Nothing trained: emit an empty file rather than a bare header.
        _output(args.out, lambda f: None)
        return EXIT_OK
    _output(args.out, lambda f: write_records(members, f))
    return EXIT_OK


def cmd_check_assumption(args: argparse.Namespace, settings: Settings) -> int:
    records = load_records(args.records, _records_parser(args, settings))
    report = check_assumption(records)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

        def write_pairs(f: TextIO) -> None:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("lower", "upper", "delta_latency_ms", "delta_accuracy"))
            for p in report.pairs:
                writer.writerow((str(p.lower), str(p.upper), repr(p.delta_latency), repr(p.delta_accuracy)))

        write_file(out_dir / "pairs.csv", write_pairs)
        write_file(out_dir / "summary.json", lambda f: write_json(report.summary, f))
    write_json(report.summary, sys.stdout)
    return EXIT_OK


def cmd_audit_table(args: argparse.Namespace, settings: Settings) -> int:
    report = audit_monotonicity(load_table(args.table))

    def write(out: TextIO) -> None:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(("kind", "h_in", "w_in", "h_out", "w_out",
                         "c_in", "c_out", "latency_ms", "larger_c_in", "larger_c_out", "larger_latency_ms"))
        for v in report.violations:
            s, g = v.smaller, v.larger
            writer.writerow((s.kind.value, s.h_in, s.w_in, s.h_out, s.w_out,
                             s.c_in, s.c_out, repr(v.smaller_ms), g.c_in, g.c_out, repr(v.larger_ms)))

    _output(args.out, write)
    logger.info("%d violations in %d comparable pairs", report.count, report.pairs_checked)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_model_flags(p: argparse.ArgumentParser, settings: Settings) -> None:
    p.add_argument("--resolution", type=_positive_int, default=settings.resolution)
    p.add_argument("--classes", type=_positive_int, default=settings.num_classes)
    p.add_argument("--alphabet", help="comma-separated widths, e.g. 64,128,256")


def _add_space_flags(p: argparse.ArgumentParser, settings: Settings) -> None:
    p.add_argument("--kind", choices=[k.value for k in BlockKind], default=BlockKind.BASIC.value)
    p.add_argument("--max-blocks", type=_positive_int, default=settings.max_blocks_per_stage)


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = _Parser(prog="popnas", description="Partial Order Pruning architecture search")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("latency", help="estimate one architecture's latency")
    p.add_argument("--table", required=True)
    p.add_argument("--arch", required=True)
    _add_model_flags(p, settings)
    p.set_defaults(handler=cmd_latency)

    p = sub.add_parser("enumerate", help="list every architecture in a latency band")
    p.add_argument("--table", required=True)
    p.add_argument("--min-ms", type=float, required=True)
    p.add_argument("--max-ms", type=float, required=True)
    p.add_argument("--out")
    _add_model_flags(p, settings)
    _add_space_flags(p, settings)
    p.set_defaults(handler=cmd_enumerate)

    p = sub.add_parser("precedes", help="test a ≺ b")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--alphabet")
    p.set_defaults(handler=cmd_precedes)

    p = sub.add_parser("precedents", help="count an architecture's precedents in a space")
    p.add_argument("--arch", required=True)
    p.add_argument("--space-file")
    p.add_argument("--table")
    p.add_argument("--band")
    p.add_argument("--min-ms", type=float)
    p.add_argument("--max-ms", type=float)
    p.add_argument("--list", action="store_true")
    _add_model_flags(p, settings)
    _add_space_flags(p, settings)
    p.set_defaults(handler=cmd_precedents)

    p = sub.add_parser("search", help="run Partial Order Pruning")
    p.add_argument("--space", choices=["backbone", "decoder"], default="backbone")
    p.add_argument("--table")
    p.add_argument("--band", default="0,inf")
    p.add_argument("--backbone", help="backbone code the decoder sits on (decoder space with --table)")
    p.add_argument("--latency-file", help="per-code decoder latencies, records format")
    p.add_argument("--evaluator", default="synthetic", help="synthetic | replay:FILE | cmd:COMMAND")
    p.add_argument("--a-max", type=float, default=0.8)
    p.add_argument("--gamma", type=float, default=0.05)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--eval-timeout", type=float)
    p.add_argument("--eval-concurrent", action="store_true", help="declare the command evaluator thread-safe")
    p.add_argument("--seed", type=int, default=settings.seed)
    p.add_argument("--patience", type=int)
    p.add_argument("--max-evals", type=int)
    p.add_argument("--bin-ms", type=float)
    p.add_argument("--strategy", choices=["uniform", "precedents"], default="uniform")
    p.add_argument("--batch-size", type=int, default=1)
    p.add_argument("--sample", action="store_true", help="sample the space instead of enumerating it")
    p.add_argument("--out", required=True)
    _add_model_flags(p, settings)
    _add_space_flags(p, settings)
    p.set_defaults(handler=cmd_search)

    p = sub.add_parser("frontier", help="speed/accuracy frontier of a records file")
    p.add_argument("--records", required=True)
    p.add_argument("--bin-ms", type=float)
    p.add_argument("--alphabet")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_frontier)

    p = sub.add_parser("check-assumption", help="latency/accuracy deltas over comparable pairs")
    p.add_argument("--records", required=True)
    p.add_argument("--alphabet")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_check_assumption)

    p = sub.add_parser("audit-table", help="list latency entries that shrink as channels grow")
    p.add_argument("--table", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_audit_table)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        settings = Settings()
    except ValidationError as e:
        print(f"popnas: bad configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        stream=sys.stderr,
        level=settings.log_level.upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args = build_parser(settings).parse_args(argv)
        return args.handler(args, settings)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except EvaluatorError as e:
        print(f"popnas: evaluator failure: {e}", file=sys.stderr)
        return EXIT_EVALUATOR
    except DataError as e:
        print(f"popnas: {e}", file=sys.stderr)
        return EXIT_DATA
