"""Command-line entry point: ``isal <subcommand> ...``.

Exit codes: 0 success, 1 usage or input-format error, 2 the tool ran but the
check it performs failed. Errors are also reported as one JSON object on
standard error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from .cdll import Datum
from .isa import FormatError, decode_bytes, decode_text, encode_bytes, encode_text, program_count
from .literals import LiteralError, format_datum, parse_literals
from .search import SearchConfig, edit_path, levenshtein, search
from .tm import InvalidSpec, check_equivalence, compile_tm, parse_tm
from .vm import Status, run, trace

DEFAULT_FUEL = 1_000_000
FUZZ_INPUT = 'i:0 i:7 s:"ab"'


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_program(path: str, as_bytes: bool = False):
    p = Path(path)
    if as_bytes or p.suffix == ".isalb":
        return decode_bytes(p.read_bytes())
    return decode_text(p.read_text())


def _inputs(text: str | None) -> list[Datum]:
    values = parse_literals("i:0" if text is None else text)
    if not values:
        raise UsageError("--input must contain at least one literal")
    return values


def _print_outputs(outcome, out) -> None:
    for d in outcome.outputs:
        print(format_datum(d), file=out)
    if outcome.status is not Status.HALTED:
        print(json.dumps({"status": outcome.status.value, "steps": outcome.steps}), file=sys.stderr)


def cmd_run(args, out):
    outcome = run(_read_program(args.program, args.bytes), _inputs(args.input), args.fuel)
    _print_outputs(outcome, out)


def cmd_trace(args, out):
    records, outcome = trace(_read_program(args.program, args.bytes), _inputs(args.input), args.fuel)
    print("step\tip\ttoken\tnext\tjp\tdepth", file=out)
    for r in records:
        print(r.line(), file=out)
    print(f"# {outcome.status.value} after {outcome.steps} steps", file=out)
    _print_outputs(outcome, out)


def cmd_fmt(args, out):
    print(encode_text(_read_program(args.program, args.bytes)), file=out)


def cmd_bytes(args, out):
    src = Path(args.file)
    if args.direction == "encode":
        dst = Path(args.output) if args.output else src.with_suffix(".isalb")
        dst.write_bytes(encode_bytes(decode_text(src.read_text())))
    else:
        dst = Path(args.output) if args.output else src.with_suffix(".isal")
        dst.write_text(encode_text(decode_bytes(src.read_bytes())) + "\n")
    print(dst, file=out)


def cmd_dist(args, out):
    a, b = _read_program(args.a), _read_program(args.b)
    print(levenshtein(a, b), file=out)
    if args.path:
        for p in edit_path(a, b):
            print(encode_text(p), file=out)


def cmd_fuzz(args, out):
    rng = random.Random(args.seed)
    inputs = _inputs(FUZZ_INPUT if args.input is None else args.input)
    tally = {"halted": 0, "exhausted": 0, "faults": 0}
    first_fault = None
    for i in range(args.count):
        n = rng.randint(0, args.max_len)
        raw = rng.randbytes(n)
        try:
            outcome = run(decode_bytes(raw), inputs, args.fuel)
        except Exception as exc:  # totality says this never happens
            tally["faults"] += 1
            first_fault = first_fault or {"index": i, "program": raw.hex(), "error": repr(exc)}
            continue
        tally["halted" if outcome.status is Status.HALTED else "exhausted"] += 1
    print(json.dumps({"count": args.count, **tally}), file=out)
    if tally["faults"]:
        raise CheckFailed(f"{tally['faults']} faults, first: {json.dumps(first_fault)}")


def cmd_compile_tm(args, out):
    spec = parse_tm(Path(args.spec).read_text())
    compiled = compile_tm(spec)
    text = encode_text(compiled.program)
    Path(args.output).write_text(f"# compiled from {Path(args.spec).name}\n{text}\n")
    print(f"program {len(compiled.program)} tokens "
          f"(prologue {compiled.prologue_length}, body {compiled.body_length})", file=out)
    print(f"scratch {compiled.scratch_size} nodes: "
          + " ".join(f"{k}={v}" for k, v in compiled.scratch_plan.items()), file=out)
    for (q, a), (lo, hi) in sorted(compiled.layout.items()):
        print(f"transition {q} {a}: instructions {lo}-{hi}", file=out)


def _read_tapes(path: str) -> list[list[int]]:
    tapes = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        try:
            tapes.append([int(w) for w in line.split()])
        except ValueError:
            raise UsageError(f"{path}:{lineno}: tape cells must be integers") from None
    return tapes


def cmd_check_tm(args, out):
    spec = parse_tm(Path(args.spec).read_text())
    report = check_equivalence(spec, _read_tapes(args.tapes), args.fuel)
    for c in report.cases:
        print(f"{c.status}\ttape={c.tape}\texpected={c.expected}\tactual={c.actual}"
              f"\tvm_steps={c.vm_steps}", file=out)
    print(report.summary(), file=out)
    if not report.all_match:
        raise CheckFailed(report.summary())


def cmd_search(args, out):
    cfg = SearchConfig.load(args.config)
    result = search(cfg)
    text = encode_text(result.best.program)
    if args.output:
        Path(args.output).write_text(text + "\n")
    if args.log:
        Path(args.log).write_text(result.log)
    f = result.best.fitness
    print(text, file=out)
    print(json.dumps({"generations": result.generations, "solved": result.solved,
                      "matched": f.matched, "examples": result.example_count}), file=sys.stderr)


def cmd_count(args, out):
    print(program_count(args.n), file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isal", description="Run, inspect, compile and search programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def runner(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("program")
        p.add_argument("--input", help="datum literals, e.g. 'i:5 s:\"ab\"' (default: i:0)")
        p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
        p.add_argument("--bytes", action="store_true", help="read the program as bytes")
        p.set_defaults(func=func)

    runner("run", cmd_run, "execute a program and print the final ring")
    runner("trace", cmd_trace, "execute and print one line per step")

    p = sub.add_parser("fmt", help="print the canonical text form")
    p.add_argument("program")
    p.add_argument("--bytes", action="store_true")
    p.set_defaults(func=cmd_fmt)

    p = sub.add_parser("bytes", help="convert between .isal text and .isalb bytes")
    p.add_argument("direction", choices=["encode", "decode"])
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bytes)

    p = sub.add_parser("dist", help="edit distance between two programs")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--path", action="store_true", help="also print a shortest edit path")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("fuzz", help="run random byte programs and tally outcomes")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--fuel", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help=f"datum literals (default: {FUZZ_INPUT})")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("compile-tm", help="compile a Turing machine spec")
    p.add_argument("spec")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_compile_tm)

    p = sub.add_parser("check-tm", help="compare a compiled machine with direct simulation")
    p.add_argument("spec")
    p.add_argument("--tapes", required=True, help="one tape per line, integer cells")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(func=cmd_check_tm)

    p = sub.add_parser("search", help="synthesise a program from examples")
    p.add_argument("config", help="JSON search configuration")
    p.add_argument("-o", "--output", help="write the best program here")
    p.add_argument("--log", help="write the generation log (CSV) here")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("count", help="number of programs of length at most n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_count)
    return parser


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "fuel", 1) < 0:
            raise UsageError("--fuel must be non-negative")
        args.func(args, out)
    except UsageError as exc:
        return _fail("usage", str(exc), 1)
    except (FormatError, LiteralError, InvalidSpec) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except CheckFailed as exc:
        return _fail("check-failed", str(exc), 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
