"""Command-line entry point: ``kmorph <command> [options]``.

Options may also come from a ``--config`` file of ``key = value`` lines
(``#`` starts a comment; keys are option names with dashes or
underscores).  Command-line flags override the file.

Exit codes: 0 success, 1 user or input error, 2 internal compile error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .annotate import annotate, benchmark, write_lattice
from .enumeration import DEFAULT_CAP, CyclePolicy, EnumerationError, enumerate_paths, format_endings
from .fst import FormatError
from .link import BuildReport, CompileError, WordLexicon, compile_lexicon
from .fileio import atomic_write
from .report import lexicon_report, write_report
from .resources import ResourceError, has_errors, load_resources, validate, write_resources
from .synth import synthesize, synthetic_corpus

OK, USER_ERROR, COMPILE_ERROR = 0, 1, 2

# option name -> type, for values read from a config file
_CONFIG_KEYS = {
    "resources": str,
    "lexicon": str,
    "format": str,
    "max_unroll": int,
    "cap": int,
    "threads": int,
    "seed": int,
}


class UserError(Exception):
    pass


def read_config(path: str | Path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UserError(f"cannot read config {path}: {exc.strerror}") from None
    values = {}
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise UserError(f"{path}:{number}: expected one of {', '.join(sorted(_CONFIG_KEYS))} = value")
        try:
            values[key] = _CONFIG_KEYS[key](value.strip())
        except ValueError:
            raise UserError(f"{path}:{number}: bad value for {key}: {value.strip()!r}") from None
    return values


def _non_negative(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return n


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--resources", help="resource directory")
    common.add_argument("--lexicon", help="compiled lexicon file (.klex)")
    common.add_argument("--max-unroll", type=_non_negative, help="extra traversals of each RTN back edge")
    common.add_argument("--cap", type=_positive, help="maximum endings enumerated per root")
    common.add_argument("--seed", type=int, help="random seed for synth")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kmorph", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"kmorph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="validate resources and write a lexicon")
    p.add_argument("--stats", action="store_true", help="also build and measure the plain tries")
    p.add_argument("--report", metavar="DIR", help="write stats.tsv and figures to DIR (implies --stats)")

    p = sub.add_parser("annotate", parents=[common], help="annotate text files (or standard input)")
    p.add_argument("inputs", nargs="*", help="UTF-8 text files; '-' or none reads standard input")
    p.add_argument("--format", choices=("json", "tsv"))
    p.add_argument("--threads", type=_non_negative, help="worker threads (0 = one per CPU)")
    p.add_argument("--bench", action="store_true", help="report words/second instead of writing lattices")
    p.add_argument("-o", "--output", help="output file (default: standard output)")

    p = sub.add_parser("enumerate", parents=[common], help="print the ending list of one CS")
    p.add_argument("cs", help="conjugation/declension class id")

    p = sub.add_parser("stats", parents=[common], help="print (and optionally plot) lexicon statistics")
    p.add_argument("--report", metavar="DIR", help="write stats.tsv and figures to DIR")

    sub.add_parser("validate", parents=[common], help="check resources and list diagnostics")

    p = sub.add_parser("synth", parents=[common], help="write a synthetic resource set")
    p.add_argument("--stems", type=_positive, default=39130)
    p.add_argument("--endings", type=_positive, default=5500, help="endings per CS")
    p.add_argument("--cs", type=_positive, default=8, help="number of CSs")
    p.add_argument("--out", required=True, help="output resource directory")
    p.add_argument("--corpus", type=_non_negative, default=0, metavar="WORDS",
                   help="also write corpus.txt with this many words")
    p.add_argument("--zipf", type=float, default=1.0, help="corpus frequency exponent (0 = uniform)")
    return parser


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    file_values = read_config(args.config) if args.config else {}
    for key, value in file_values.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    defaults = {"max_unroll": 0, "cap": DEFAULT_CAP, "format": "tsv", "threads": 1, "seed": 0}
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    if args.max_unroll < 0 or args.cap < 1:
        raise UserError("max_unroll must be >= 0 and cap >= 1")
    if getattr(args, "format", "tsv") not in ("json", "tsv"):
        raise UserError(f"unsupported format {args.format!r}")
    return args


def _policy(args) -> CyclePolicy:
    return CyclePolicy(args.max_unroll)


def _need(args, name: str) -> str:
    value = getattr(args, name, None)
    if not value:
        raise UserError(f"--{name} is required")
    return value


def _load_resources(args):
    root = Path(_need(args, "resources"))
    if not root.is_dir():
        raise UserError(f"resource directory {root} does not exist")
    res = load_resources(root)
    diags = validate(res)
    for d in diags:
        print(d, file=sys.stderr)
    if has_errors(diags):
        raise UserError(f"{sum(d.severity == 'error' for d in diags)} validation error(s)")
    return res


def _load_lexicon(args) -> WordLexicon:
    path = Path(_need(args, "lexicon"))
    try:
        return WordLexicon.load(path)
    except FileNotFoundError:
        raise UserError(f"lexicon {path} does not exist") from None
    except OSError as exc:
        raise UserError(f"cannot read lexicon {path}: {exc.strerror}") from None
    except FormatError as exc:
        raise UserError(f"{path}: {type(exc).__name__}: {exc}") from None


def _print_stats(report: BuildReport, lex: WordLexicon, out) -> None:
    measured = report.minimal or lex.stats()
    print(f"stem forms\t{report.stem_forms}", file=out)
    print(f"word forms (estimate)\t{report.word_forms}", file=out)
    for name, s in measured.items():
        line = f"{name}\tstates={s.states}\ttransitions={s.transitions}\tbytes={s.serialized_bytes}"
        if name in report.trie:
            t = report.trie[name]
            line += f"\ttrie_states={t.states}\ttrie_transitions={t.transitions}\ttrie_bytes={t.serialized_bytes}"
        print(line, file=out)
    if report.trie:
        trie = sum(s.serialized_bytes for s in report.trie.values())
        minimal = sum(s.serialized_bytes for s in report.minimal.values())
        print(f"total\ttrie_bytes={trie}\tminimal_bytes={minimal}", file=out)


def cmd_compile(args) -> int:
    res = _load_resources(args)
    lexicon = Path(_need(args, "lexicon"))
    report = BuildReport(measure_trie=bool(args.stats or args.report))
    try:
        lex = compile_lexicon(res, _policy(args), args.cap, report)
    except CompileError as exc:
        print(f"compile error: {exc}", file=sys.stderr)
        return COMPILE_ERROR
    for w in report.warnings:
        print(w, file=sys.stderr)
    data = lex.to_bytes()
    atomic_write(lexicon, data)
    for step, seconds in report.timings.items():
        print(f"step {step}\t{seconds:.3f}s")
    _print_stats(report, lex, sys.stdout)
    print(f"lexicon\t{lexicon}\t{len(data)} bytes")
    if args.report:
        for path in write_report(report, args.report):
            print(f"wrote\t{path}")
    return OK


def _read_inputs(paths: list[str]) -> list[tuple[str, str]]:
    if not paths or paths == ["-"]:
        return [("<stdin>", sys.stdin.read())]
    out = []
    for path in paths:
        if path == "-":
            out.append(("<stdin>", sys.stdin.read()))
            continue
        try:
            out.append((path, Path(path).read_text(encoding="utf-8")))
        except (OSError, UnicodeDecodeError) as exc:
            raise UserError(f"cannot read input {path}: {getattr(exc, 'strerror', None) or exc}") from None
    return out


def cmd_annotate(args) -> int:
    lex = _load_lexicon(args)
    inputs = _read_inputs(args.inputs)
    threads = args.threads or (os.cpu_count() or 1)
    if args.bench:
        total_words = total_seconds = 0.0
        for name, text in inputs:
            words, seconds = benchmark(lex, text)
            total_words += words
            total_seconds += seconds
            print(f"{name}\t{words} words\t{seconds:.3f}s\t{words / seconds if seconds else 0:.0f} words/s")
        if len(inputs) > 1:
            rate = total_words / total_seconds if total_seconds else 0
            print(f"total\t{int(total_words)} words\t{total_seconds:.3f}s\t{rate:.0f} words/s")
        return OK
    chunks = [write_lattice(annotate(lex, text, threads), args.format) for _, text in inputs]
    data = b"".join(chunks)
    if args.output:
        atomic_write(args.output, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return OK


def cmd_enumerate(args) -> int:
    res = _load_resources(args)
    if args.cs not in res.cs:
        raise UserError(f"unknown CS {args.cs!r}")
    try:
        endings = enumerate_paths(res.rtn, res.cs[args.cs].root, _policy(args), args.cap)
    except EnumerationError as exc:
        raise UserError(f"{type(exc).__name__}: {exc}") from None
    sys.stdout.write(format_endings(endings))
    return OK


def cmd_stats(args) -> int:
    if args.resources:
        res = _load_resources(args)
        report = BuildReport(measure_trie=True)
        try:
            lex = compile_lexicon(res, _policy(args), args.cap, report)
        except CompileError as exc:
            print(f"compile error: {exc}", file=sys.stderr)
            return COMPILE_ERROR
    else:
        lex = _load_lexicon(args)
        report = lexicon_report(lex)
    _print_stats(report, lex, sys.stdout)
    if args.report:
        for path in write_report(report, args.report):
            print(f"wrote\t{path}")
    return OK


def cmd_validate(args) -> int:
    _load_resources(args)
    print("ok")
    return OK


def cmd_synth(args) -> int:
    res = synthesize(args.stems, args.endings, args.cs, args.seed)
    out = Path(args.out)
    write_resources(res, out, name="synth")
    print(f"wrote {len(res.stems)} stems, {len(res.cs)} CSs, {len(res.rtn.graphs)} graphs to {out}")
    if args.corpus:
        text = synthetic_corpus(res, args.corpus, args.seed, zipf=args.zipf)
        atomic_write(out / "corpus.txt", text.encode("utf-8"))
        print(f"wrote {args.corpus} words to {out / 'corpus.txt'}")
    return OK


COMMANDS = {
    "compile": cmd_compile,
    "annotate": cmd_annotate,
    "enumerate": cmd_enumerate,
    "stats": cmd_stats,
    "validate": cmd_validate,
    "synth": cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args = _resolve(args)
        return COMMANDS[args.command](args)
    except UserError as exc:
        print(f"kmorph: {exc}", file=sys.stderr)
        return USER_ERROR
    except ResourceError as exc:
        print(f"kmorph: {exc}", file=sys.stderr)
        return USER_ERROR
    except CompileError as exc:
        print(f"kmorph: compile error: {exc}", file=sys.stderr)
        return COMPILE_ERROR


if __name__ == "__main__":
    sys.exit(main())
