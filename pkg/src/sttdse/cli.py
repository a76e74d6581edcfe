"""``sttdse`` command-line tool.

Exit codes: 0 success, 1 unmet expectations in ``summary``, 2 validation
error, 3 infeasible target, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import report
from .config import ENV_VAR, Config
from .errors import DomainError, TechRangeError, ValidationError
from .fault_inject import inject, read_words, write_sidecar, write_words

EXIT_OK, EXIT_UNMET, EXIT_VALIDATION, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3, 4


def _emit(args, rows, columns, out):
    if args.csv == "-":
        report.write_csv(rows, columns, out)
        return
    print(report.format_table(rows, columns), file=out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            report.write_csv(rows, columns, fh)


def _config(args) -> Config:
    return Config.load(args.config, args.set)


def cmd_device(args, out):
    _emit(args, report.run_device(_config(args)), report.DEVICE_COLUMNS, out)


def cmd_guardband(args, out):
    rows = report.run_guardband(_config(args), args.delta or None)
    _emit(args, rows, report.GUARDBAND_COLUMNS, out)


def cmd_workload(args, out):
    if args.layers:
        rows = report.run_layers(args.models, args.batch[0], args.datatype)
        _emit(args, rows, report.LAYER_COLUMNS, out)
    else:
        rows = report.run_workload(args.models, args.batch, args.datatype)
        _emit(args, rows, report.WORKLOAD_COLUMNS, out)


def cmd_retention(args, out):
    rows = report.run_retention(args.models, _config(args), args.batch, args.datatype, args.limit)
    _emit(args, rows, report.RETENTION_COLUMNS, out)


def cmd_energy(args, out):
    rows = report.run_energy(args.models, _config(args), args.batch, args.datatype)
    _emit(args, rows, report.ENERGY_COLUMNS, out)


def cmd_dse(args, out):
    rows = report.run_dse(_config(args), args.workers)
    _emit(args, rows, report.DSE_COLUMNS, out)


def cmd_inject(args, out):
    profile, width = _config(args).ber()
    width = args.word_width or width
    words = read_words(args.input, width)
    result = inject(words, width, profile, args.seed, args.workers)
    write_words(args.output, result.words, width)
    if args.sidecar:
        write_sidecar(args.sidecar, result, profile, args.seed, width)
    row = {"words": len(words), "word_width": width, "seed": args.seed,
           "msb_flips": result.msb_flips, "lsb_flips": result.lsb_flips,
           "total_flips": result.flip_count}
    _emit(args, [row], tuple(row), out)


def cmd_summary(args, out):
    if args.components:
        with open(args.components) as fh:
            text, source = fh.read(), args.components
    else:
        text, source = report.bundled_components_text(), "table3.csv"
    rows, checks = report.run_summary(text, source)
    has_savings = any(r["area_saving_pct"] is not None for r in rows)
    columns = report.SUMMARY_COLUMNS if has_savings else report.SUMMARY_COLUMNS[:5]
    _emit(args, rows, columns, out)
    if checks and args.csv != "-":
        print(file=out)
        print(report.format_table(checks, report.CHECK_COLUMNS), file=out)
    return EXIT_OK if all(c["status"] == "PASS" for c in checks) else EXIT_UNMET


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${ENV_VAR})")
    common.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config key; VALUE is parsed as JSON when possible")
    common.add_argument("--csv", metavar="PATH", help="also write CSV to PATH ('-' = stdout only)")

    parser = argparse.ArgumentParser(prog="sttdse",
                                     description="STT-MRAM accelerator design-space explorer")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    add("device", cmd_device, "solve MTJ operating points for the configured targets")

    p = add("guardband", cmd_guardband, "guard-band delta for process/temperature variation")
    p.add_argument("--delta", type=float, action="append", help="scaled delta (repeatable)")

    def model_args(p, many_batches):
        p.add_argument("models", nargs="*", help="bundled model name or model JSON path")
        p.add_argument("--batch", type=int, nargs="+" if many_batches else None,
                       default=[1] if many_batches else 1)
        p.add_argument("--datatype", choices=("int8", "bf16"))

    p = add("workload", cmd_workload, "model size and buffer footprint")
    model_args(p, True)
    p.add_argument("--layers", action="store_true", help="per-layer footprint of the first batch")

    p = add("retention", cmd_retention, "GLB retention-time profile")
    model_args(p, True)
    p.add_argument("--limit", type=float, default=1.5, help="PASS threshold in seconds")

    p = add("energy", cmd_energy, "buffer energy for the three buffer architectures")
    model_args(p, False)

    p = add("dse", cmd_dse, "design-space sweep over sweep.axes")
    p.add_argument("--workers", type=int, help="parallel design points (default sweep.workers)")

    p = add("inject", cmd_inject, "flip bits of a raw little-endian word file")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--word-width", type=int, choices=(8, 16))
    p.add_argument("--sidecar", help="JSON file listing every flipped (word, bit)")
    p.add_argument("--workers", type=int, default=1)

    p = add("summary", cmd_summary, "accelerator area/power roll-up from a component file")
    p.add_argument("components", nargs="?", help="component CSV (default: bundled 14 nm design values)")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("workload", "retention", "energy") and not args.models:
        parser.error(f"{args.command}: at least one model is required")
    try:
        code = args.func(args, out)
    except report.SweepTooLarge as exc:
        print(f"sttdse: refused: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValidationError, TechRangeError) as exc:
        print(f"sttdse: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except DomainError as exc:
        print(f"sttdse: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"sttdse: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return code or EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
