"""Command-line interface: depth, compare, select, simulate, calibrate, mcnemar.

Exit codes: 0 success, 1 usage error, 2 data error. Reports go to stdout
or ``--out``; diagnostics go to stderr. Identical invocations on identical
files produce byte-identical reports, and ``--threads`` never changes
output bytes.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import figures
from .corpus import Corpus, DataError, load_corpus
from .ranksum import compare_corpora, mcnemar
from .selection import select
from .simulate import (
    GeneratorSpec,
    StudyConfig,
    generate_population,
    null_calibration,
    sample_size_study,
)
from .depth import depth_scores

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage by default; we reserve 2 for data errors.
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def _add_common(parser: argparse.ArgumentParser, corpus_input: bool = True) -> None:
    if corpus_input:
        parser.add_argument(
            "--distance", choices=["cosine", "chord"], default="cosine",
            help="bounded distance used for depth (default: cosine)",
        )
        parser.add_argument(
            "--format", choices=["jsonl", "csv"], default="jsonl",
            help="corpus file format (default: jsonl)",
        )
        parser.add_argument(
            "--threads", type=int, default=1,
            help="parallelism cap; never changes output bytes (default: 1)",
        )
    parser.add_argument("--out", type=Path, default=None,
                        help="write the JSON report here instead of stdout")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _write_optional(path: Path | None, content: str) -> None:
    if path is not None:
        path.write_text(content, encoding="utf-8")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="embdepth",
        description="Center-outward depth statistics for embedding corpora",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("depth", parents=[], help="score a corpus and rank it center-outward")
    p.add_argument("corpus", type=Path, help="corpus file (JSONL or CSV)")
    _add_common(p)
    p.add_argument("--csv", type=Path, default=None, help="also write id,depth,rank CSV here")
    p.add_argument("--figure", type=Path, default=None, help="render a depth histogram here")

    p = sub.add_parser("compare", help="depth-induced rank-sum test between two corpora")
    p.add_argument("reference", type=Path, help="reference corpus F")
    p.add_argument("query", type=Path, help="query corpus G")
    _add_common(p)
    p.add_argument("--sample", default=None, metavar="M,N",
                   help="sample M reference and N query records first (needs --seed)")
    p.add_argument("--seed", type=int, default=None, help="seed for --sample")
    p.add_argument("--two-sided", action="store_true",
                   help="additionally report the two-sided p-value")
    p.add_argument("--csv", type=Path, default=None, help="also write the one-row summary CSV here")
    p.add_argument("--figure", type=Path, default=None,
                   help="render the two depth distributions here")

    p = sub.add_parser("select", help="pick few-shot exemplars from a corpus")
    p.add_argument("corpus", type=Path, help="corpus file (JSONL or CSV)")
    _add_common(p)
    p.add_argument("--strategy", required=True, choices=["RAND", "LDM", "DEEP", "DLDM"])
    p.add_argument("--n", required=True, type=int, help="number of exemplars")
    p.add_argument("--seed", required=True, type=int, help="shuffle seed")
    p.add_argument("--records-out", type=Path, default=None,
                   help="write selected records as JSONL here")

    p = sub.add_parser("simulate", help="sample-size study of the Q estimate")
    p.add_argument("--pop-f", type=Path, default=None, help="population corpus F")
    p.add_argument("--pop-g", type=Path, default=None, help="population corpus G")
    _add_common(p)
    p.add_argument("--sizes", default="5,25,50,100,500",
                   help="comma-separated sample sizes (default: 5,25,50,100,500)")
    p.add_argument("--replicates", type=int, default=20, help="replicates per size (default: 20)")
    p.add_argument("--seed", required=True, type=int, help="master seed")
    p.add_argument("--pop-size", type=int, default=2000,
                   help="population size when generating synthetic populations (default: 2000)")
    p.add_argument("--dim", type=int, default=16, help="synthetic generator dimension")
    p.add_argument("--family", choices=["uniform-sphere", "concentrated"],
                   default="uniform-sphere", help="synthetic generator family")
    p.add_argument("--concentration", type=float, default=0.0,
                   help="concentration for the concentrated family")
    p.add_argument("--csv", type=Path, default=None, help="write n,mean_q,std_q CSV here")
    p.add_argument("--raw-csv", type=Path, default=None,
                   help="write per-replicate Q values here")
    p.add_argument("--figure", type=Path, default=None, help="render the spread boxplot here")

    p = sub.add_parser("calibrate", help="null calibration of the rank-sum test")
    _add_common(p, corpus_input=False)
    p.add_argument("--dim", type=int, default=16, help="generator dimension (default: 16)")
    p.add_argument("--family", choices=["uniform-sphere", "concentrated"],
                   default="uniform-sphere")
    p.add_argument("--concentration", type=float, default=0.0)
    p.add_argument("--m", type=int, default=100, help="reference sample size")
    p.add_argument("--n", type=int, default=100, help="query sample size")
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--distance", choices=["cosine", "chord"], default="cosine")
    p.add_argument("--csv", type=Path, default=None,
                   help="write per-replicate q_hat,p rows here")
    p.add_argument("--figure", type=Path, default=None, help="render the Q histogram here")

    p = sub.add_parser("mcnemar", help="McNemar test on discordant prediction counts")
    p.add_argument("--b", required=True, type=int, help="pairs won only by classifier A")
    p.add_argument("--c", required=True, type=int, help="pairs won only by classifier B")
    _add_common(p, corpus_input=False)

    return parser


def _load(path: Path, fmt: str) -> Corpus:
    return load_corpus(path, format=fmt)


def _cmd_depth(args: argparse.Namespace) -> int:
    corpus = _load(args.corpus, args.format)
    report = depth_scores(corpus, args.distance, threads=args.threads)
    _emit(report.to_json(), args.out)
    _write_optional(args.csv, report.to_csv())
    if args.figure is not None:
        figures.save_depth_histogram(report, args.figure)
    return EXIT_OK


def _parse_sample(spec: str) -> tuple[int, int]:
    parts = spec.split(",")
    if len(parts) != 2:
        raise _UsageError(f"--sample expects M,N, got {spec!r}")
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise _UsageError(f"--sample expects integers, got {spec!r}") from None
    if m < 1 or n < 1:
        raise _UsageError("--sample sizes must be >= 1")
    return m, n


def _cmd_compare(args: argparse.Namespace) -> int:
    reference = _load(args.reference, args.format)
    query = _load(args.query, args.format)
    if reference.dim != query.dim:
        raise DataError(
            f"dimension mismatch between corpora: {args.reference} has dim "
            f"{reference.dim}, {args.query} has dim {query.dim}"
        )
    if args.sample is not None:
        m, n = _parse_sample(args.sample)
        if args.seed is None:
            raise _UsageError("--sample requires --seed")
        if m > len(reference) or n > len(query):
            raise DataError(
                f"--sample {m},{n} exceeds corpus sizes ({len(reference)}, {len(query)})"
            )
        rng_f = np.random.default_rng([args.seed, 0])
        rng_g = np.random.default_rng([args.seed, 1])
        reference = reference.subset(
            int(i) for i in np.sort(rng_f.choice(len(reference), size=m, replace=False))
        )
        query = query.subset(
            int(i) for i in np.sort(rng_g.choice(len(query), size=n, replace=False))
        )
    report, ref_report, query_depths = compare_corpora(
        reference, query, args.distance, threads=args.threads
    )
    json_text = report.to_json()
    if args.two_sided:
        obj = json.loads(json_text)
        obj["p_two_sided"] = min(1.0, 2.0 * min(report.p_one_sided, 1.0 - report.p_one_sided))
        json_text = json.dumps(obj, indent=2)
    _emit(report.to_csv() + json_text, args.out)
    _write_optional(args.csv, report.to_csv())
    if args.figure is not None:
        figures.save_comparison_figure(
            ref_report.scores, query_depths, report, args.figure,
            ref_label=reference.name, query_label=query.name,
        )
    return EXIT_OK


def _cmd_select(args: argparse.Namespace) -> int:
    corpus = _load(args.corpus, args.format)
    plan = select(corpus, args.strategy, args.n, args.seed, args.distance, threads=args.threads)
    _emit(plan.to_json(), args.out)
    _write_optional(args.records_out, plan.records_jsonl(corpus))
    return EXIT_OK


def _parse_sizes(spec: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in spec.split(",") if s)
    except ValueError:
        raise _UsageError(f"--sizes expects comma-separated integers, got {spec!r}") from None
    if not sizes:
        raise _UsageError("--sizes must name at least one sample size")
    return sizes


def _cmd_simulate(args: argparse.Namespace) -> int:
    generator = GeneratorSpec(
        dim=args.dim, family=args.family, concentration=args.concentration
    )
    if (args.pop_f is None) != (args.pop_g is None):
        raise _UsageError("provide both --pop-f and --pop-g, or neither")
    if args.pop_f is not None:
        pop_f = _load(args.pop_f, args.format)
        pop_g = _load(args.pop_g, args.format)
    else:
        pop_f = generate_population(generator, args.pop_size, [args.seed, 101], name="pop_f")
        pop_g = generate_population(generator, args.pop_size, [args.seed, 202], name="pop_g")
    config = StudyConfig(
        sample_sizes=_parse_sizes(args.sizes),
        replicates=args.replicates,
        seed=args.seed,
        distance=args.distance,
        generator=generator,
    )
    result = sample_size_study(config, pop_f, pop_g)
    _emit(result.to_json(), args.out)
    _write_optional(args.csv, result.to_csv())
    _write_optional(args.raw_csv, result.raw_csv())
    if args.figure is not None:
        figures.save_study_figure(result, args.figure)
    return EXIT_OK


def _cmd_calibrate(args: argparse.Namespace) -> int:
    generator = GeneratorSpec(
        dim=args.dim, family=args.family, concentration=args.concentration
    )
    report = null_calibration(
        generator, args.m, args.n, args.replicates, args.alpha, args.seed, args.distance
    )
    _emit(report.to_json(), args.out)
    _write_optional(args.csv, report.to_csv())
    if args.figure is not None:
        figures.save_calibration_figure(report, args.figure)
    return EXIT_OK


def _cmd_mcnemar(args: argparse.Namespace) -> int:
    result = mcnemar(args.b, args.c)
    _emit(json.dumps({"b": args.b, "c": args.c, "chi2": result.chi2, "p": result.p}, indent=2),
          args.out)
    return EXIT_OK


_COMMANDS = {
    "depth": _cmd_depth,
    "compare": _cmd_compare,
    "select": _cmd_select,
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "mcnemar": _cmd_mcnemar,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise _UsageError("--threads must be >= 1")
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
