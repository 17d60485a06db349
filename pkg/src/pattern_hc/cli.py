"""Command line interface: patterns, digraphs, solvers, the construction, experiments."""
from __future__ import annotations

import argparse
import json
import random
import sys

import numpy as np

from . import __version__
from .digraph import DegreeVariant, LabeledDigraph
from .errors import PatternHCError
from .pattern import are_equivalent, canonical_form, classify, is_primitive, parse_pattern


def _write(args, text: str):
    if args.out and args.out != "-":
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _witness_text(w) -> str:
    return " ".join(map(str, w.order)) + "\n" + w.orientation_string() + "\n"


def cmd_pattern(args):
    p = parse_pattern(args.text)
    if args.action == "canon":
        out = str(canonical_form(p))
    elif args.action == "classify":
        out = classify(p).value
    elif args.action == "primitive":
        out = str(is_primitive(p)).lower()
    else:
        if args.other is None:
            raise SystemExit("equiv needs a second pattern")
        out = str(are_equivalent(p, parse_pattern(args.other))).lower()
    _write(args, out + "\n")


def cmd_gen(args):
    from .random_model import hitting_index, sample_dnm, sample_dnp, sample_trace
    rng = np.random.default_rng(args.seed)
    if args.hitting:
        trace = sample_trace(args.n, rng)
        m = hitting_index(trace, DegreeVariant.for_pattern(parse_pattern(args.hitting)))
        d = trace.prefix(m=m)
    elif args.m is not None:
        d = sample_dnm(args.n, args.m, rng)
    else:
        d = sample_dnp(args.n, args.p, rng)
    _write(args, d.to_text())


def cmd_solve_exact(args):
    from .hc_solver import exact_pi_hc
    with open(args.file) if args.file != "-" else sys.stdin as fh:
        d = LabeledDigraph.from_text(fh.read())
    w = exact_pi_hc(d, parse_pattern(args.pattern))
    _write(args, "NONE\n" if w is None else _witness_text(w.normalized()))


def cmd_sintout(args):
    from .din_dout import equal_bins, lemma2_cycle, lemma2_matrices, parse_matrix, sample_sin_tout
    p = parse_pattern(args.pattern)
    k = p.k
    if args.S:
        S, T = parse_matrix(args.S), parse_matrix(args.T or args.S)
    else:
        S, T = lemma2_matrices(k)
    rng = np.random.default_rng(args.seed)
    inst = sample_sin_tout(equal_bins(args.bin_size, S.shape[0]), S, T, rng)
    try:
        w = lemma2_cycle(inst, p, random.Random(args.seed), args.budget)
    except PatternHCError as exc:
        _write(args, f"FAILED {type(exc).__name__}: {exc}\n")
        return 1
    _write(args, _witness_text(w))


def cmd_construct(args):
    from .pipeline import PipelineConfig, run_pipeline
    from .random_model import sample_trace
    rng = np.random.default_rng(args.seed)
    trace = sample_trace(args.n, rng)
    cfg = PipelineConfig(retries=args.retries, fallback=args.fallback, search_budget=args.budget)
    run = run_pipeline(trace, parse_pattern(args.pattern), rng, cfg)
    if args.emit_diagnostics:
        diag = run.diagnostics()
        if run.witness is not None:
            diag["cycle"] = list(run.witness.order)
            diag["orientations"] = run.witness.orientation_string()
        _write(args, json.dumps(diag, indent=1, sort_keys=True) + "\n")
    elif run.witness is not None:
        _write(args, _witness_text(run.witness))
    else:
        _write(args, f"FAILED {run.stage}\n")
    return 0 if run.witness is not None else 1


def cmd_mc(args):
    from .experiments import ExperimentConfig, emit, run_experiment
    ns = [int(x) for x in args.n.split(",")]
    cfg = ExperimentConfig(args.experiment, n=ns, pattern=args.pattern, c=args.c, trials=args.trials,
                           seed=args.seed, solver=args.solver, workers=args.threads,
                           retries=args.retries, search_budget=args.budget)
    rows, summary = run_experiment(cfg)
    text = emit(rows, summary, None, args.format, cfg)
    _write(args, text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker processes (default 1)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="pattern-hc", parents=[common],
                                 description="Pattern Hamilton cycles in random digraphs.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pattern", parents=[common], help="canonical form, class, primitivity, equivalence")
    p.add_argument("action", choices=("canon", "classify", "primitive", "equiv"))
    p.add_argument("text")
    p.add_argument("other", nargs="?")
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("gen", parents=[common], help="sample a digraph")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--hitting", metavar="PATTERN", help="the process stopped at its hitting time")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve-exact", parents=[common], help="exact pattern Hamilton cycle search")
    p.add_argument("file", help="digraph file, '-' for stdin")
    p.add_argument("--pattern", required=True)
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("sintout", parents=[common], help="chained-matching construction on D(S-in,T-out)")
    p.add_argument("--pattern", required=True)
    p.add_argument("--bin-size", type=int, required=True)
    p.add_argument("--S", help="matrix like '0,2,2;2,0,2;2,2,0' (default: 2 between neighbouring bins)")
    p.add_argument("--T", help="defaults to S")
    p.add_argument("--budget", type=int, default=200_000, help="search node budget")
    p.set_defaults(func=cmd_sintout)

    p = sub.add_parser("construct", parents=[common], help="hitting-time construction on a sampled process")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--fallback", choices=("exact", "search"))
    p.add_argument("--budget", type=int, default=200_000, help="search node budget")
    p.add_argument("--emit-diagnostics", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo experiments")
    p.add_argument("--experiment", choices=("eventA", "lowdeg", "hitting", "walkup"), required=True)
    p.add_argument("--n", default="1000", help="comma separated sizes (m for walkup)")
    p.add_argument("--pattern", default="><")
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--solver", choices=("pipeline", "exact", "search", "pipeline+fallback"),
                   default="pipeline+fallback")
    p.add_argument("--retries", type=int, default=3)
    p.add_argument("--budget", type=int, default=200_000, help="search node budget")
    p.set_defaults(func=cmd_mc)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for name, default in (("seed", 0), ("threads", 1), ("out", None), ("format", "csv")):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        rc = args.func(args)
    except PatternHCError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
