"""Command-line front end.

Offline commands (``sim``, ``synth``, ``eval``) write artifacts; online
commands (``expand``, ``query``) read a stored similarity file. Exit status is
0 on success, 1 on usage or parameter errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Sequence, TextIO

from folksim.baselines import (
    LsiConfig,
    SimRankConfig,
    cosine_dense,
    lsi_dense,
    simrank_dense,
)
from folksim.corpus import (
    Folksonomy,
    build_tag_resource_matrix,
    corpus_stats,
    group_bookmarks,
    read_assignments,
    write_assignments,
    write_bookmarks,
)
from folksim.errors import ConfigError, DataError
from folksim.evalharness import METHODS, EvalConfig, SplitSpec, run_retrieval_experiment
from folksim.expand import enrich_bookmarks, expand_tag_set
from folksim.formats import read_similarity, read_trace, write_query_result, write_similarity, write_trace
from folksim.search import rank_resources
from folksim.simcore import EngineConfig, SimilarityMatrix, compute_similarities
from folksim.synth import SynthSpec, generate_synthetic, synonym_preset

log = logging.getLogger("folksim")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
SIM_METHODS = tuple(m for m in METHODS if m != "none")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with status 2
        raise _UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x for x in text.split(",") if x]


def _engine_flags(p: argparse.ArgumentParser) -> None:
    d = EngineConfig()
    p.add_argument("--psi", type=float, default=d.psi, help="mutual reinforcement factor in [0,1]")
    p.add_argument("--epsilon", type=float, default=d.epsilon, help="convergence threshold on both deltas")
    p.add_argument("--max-iters", type=int, default=d.max_iters)
    p.add_argument("--tau", type=float, default=d.tau, help="drop stored scores below this value")
    p.add_argument("--size-limit", type=int, default=d.size_limit)
    p.add_argument("--norm", choices=("entrywise", "induced"), default=d.norm)
    p.add_argument("--threads", type=int, default=1, help="worker cap; results do not depend on it")


def _baseline_flags(p: argparse.ArgumentParser) -> None:
    s, l = SimRankConfig(), LsiConfig()
    p.add_argument("--c1", type=float, default=s.c1, help="SimRank decay for tags")
    p.add_argument("--c2", type=float, default=s.c2, help="SimRank decay for resources")
    p.add_argument("--simrank-iters", type=int, default=s.iterations)
    p.add_argument("--lsi-k", type=int, default=l.k)
    p.add_argument("--lsi-power-iters", type=int, default=l.power_iterations)
    p.add_argument("--lsi-seed", type=int, default=l.seed)


def _engine(args) -> EngineConfig:
    return EngineConfig(args.psi, args.epsilon, args.max_iters, args.tau, args.size_limit, args.norm)


def _threads(args) -> int:
    if args.threads < 1:
        raise ConfigError(f"threads must be >= 1, got {args.threads}")
    return args.threads


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="folksim", description="Folksonomy tag similarity, expansion and search.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("stats", help="print corpus statistics as JSON")
    p.add_argument("corpus", type=Path)

    p = sub.add_parser("synth", help="write a synthetic power-law corpus")
    p.add_argument("--output", "-o", type=Path, required=True)
    p.add_argument("--preset", choices=("default", "synonym"), default="default")
    p.add_argument("--seed", type=int, default=0)
    for name in ("n_users", "n_resources", "n_tags", "n_bookmarks", "synonym_groups"):
        p.add_argument("--" + name.replace("_", "-"), type=int, dest=name)
    p.add_argument("--exponent", type=float, dest="tag_popularity_exponent")

    p = sub.add_parser("sim", help="compute a tag similarity matrix")
    p.add_argument("corpus", type=Path)
    p.add_argument("--method", choices=SIM_METHODS, default="mrs")
    p.add_argument("--output", "-o", type=Path, required=True)
    p.add_argument("--trace", type=Path, help="also write the convergence trace TSV (mrs only)")
    _engine_flags(p)
    _baseline_flags(p)

    p = sub.add_parser("expand", help="expand a tag set using stored similarities")
    p.add_argument("corpus", type=Path)
    p.add_argument("--sim", type=Path, required=True)
    p.add_argument("--tags", nargs="+", required=True)
    p.add_argument("--k", type=int, help="override the expansion size")

    p = sub.add_parser("enrich", help="write the corpus with every bookmark expanded")
    p.add_argument("corpus", type=Path)
    p.add_argument("--sim", type=Path, required=True)
    p.add_argument("--output", "-o", type=Path, required=True)

    p = sub.add_parser("query", help="rank resources for a tag query")
    p.add_argument("corpus", type=Path)
    p.add_argument("--tags", nargs="+", required=True)
    p.add_argument("--q", type=int, default=10)
    p.add_argument("--sim", type=Path, help="expand the query with these similarities first")

    p = sub.add_parser("eval", help="run the retrieved-ratio experiment")
    p.add_argument("corpus", type=Path)
    p.add_argument("--methods", type=_str_list, default=list(METHODS))
    p.add_argument("--q", type=_int_list, default=[5, 10, 20])
    p.add_argument("--split", type=float, default=SplitSpec().train_fraction)
    p.add_argument("--repeats", type=int, default=SplitSpec().repeats)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", type=Path, required=True, help="report JSON")
    p.add_argument("--tsv", type=Path, help="also write the report as TSV")
    _engine_flags(p)
    _baseline_flags(p)

    p = sub.add_parser("trace", help="re-emit a stored convergence trace as TSV")
    p.add_argument("input", type=Path, help="similarity file or trace TSV")
    p.add_argument("--output", "-o", type=Path)
    return parser


@contextmanager
def _out(path: Path | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _load_corpus(path: Path) -> Folksonomy:
    return read_assignments(path)


def _load_sim(path: Path, f: Folksonomy) -> SimilarityMatrix:
    with open(path, encoding="utf-8") as fh:
        sim, _, _ = read_similarity(fh)
    if sim.n != f.n_t:
        raise DataError(f"{path}: similarity covers {sim.n} tags, corpus has {f.n_t}")
    return sim


def _tag_ids(f: Folksonomy, names: Sequence[str]) -> frozenset[int]:
    index = f.tag_index()
    missing = [n for n in names if n not in index]
    if missing:
        raise DataError(f"unknown tag: {', '.join(missing)}")
    return frozenset(index[n] for n in names)


def _cmd_stats(args) -> None:
    f = _load_corpus(args.corpus)
    print(json.dumps(corpus_stats(f, build_tag_resource_matrix(f)), indent=2))


def _cmd_synth(args) -> None:
    base = synonym_preset(args.seed) if args.preset == "synonym" else SynthSpec(seed=args.seed)
    overrides = {
        k: getattr(args, k)
        for k in ("n_users", "n_resources", "n_tags", "n_bookmarks", "synonym_groups", "tag_popularity_exponent")
        if getattr(args, k) is not None
    }
    spec = SynthSpec(**{**base.__dict__, **overrides})
    with _out(args.output) as fh:
        write_assignments(generate_synthetic(spec), fh)


def _cmd_sim(args) -> None:
    cfg = _engine(args)
    threads = _threads(args)
    f = _load_corpus(args.corpus)
    tr = build_tag_resource_matrix(f)
    trace = []
    header: dict[str, object] = {"method": args.method}
    if args.method == "mrs":
        st, _, tr_trace = compute_similarities(tr, cfg, threads)
        trace = tr_trace.steps
        header.update(
            psi=cfg.psi,
            epsilon=cfg.epsilon,
            iterations_run=tr_trace.iterations_run,
            converged=int(tr_trace.converged),
            tau=cfg.tau,
        )
    else:
        if args.method == "cosine":
            arr = cosine_dense(tr)
        elif args.method == "simrank":
            sc = SimRankConfig(args.c1, args.c2, args.simrank_iters)
            arr = simrank_dense(tr, sc, threads)[0]
            header.update(c1=sc.c1, c2=sc.c2, iterations=sc.iterations)
        else:
            lc = LsiConfig(args.lsi_k, args.lsi_power_iters, args.lsi_seed)
            arr = lsi_dense(tr, lc)
            header.update(k=lc.k, power_iterations=lc.power_iterations, seed=lc.seed)
        header["tau"] = cfg.tau
        st = SimilarityMatrix.from_dense(arr, cfg.tau)
    with _out(args.output) as fh:
        write_similarity(st, fh, header, trace)
    if args.trace is not None:
        if not trace:
            raise ConfigError("--trace is only available for --method mrs")
        with _out(args.trace) as fh:
            write_trace(trace, fh)


def _cmd_expand(args) -> None:
    f = _load_corpus(args.corpus)
    tr = build_tag_resource_matrix(f)
    st = _load_sim(args.sim, f)
    res = expand_tag_set(_tag_ids(f, args.tags), st, tr, args.k)
    for t, score in res.added:
        print(f"{f.tags[t]}\t{score:.9g}")


def _cmd_enrich(args) -> None:
    f = _load_corpus(args.corpus)
    tr = build_tag_resource_matrix(f)
    st = _load_sim(args.sim, f)
    enriched = enrich_bookmarks(group_bookmarks(f), st, tr)
    with _out(args.output) as fh:
        write_bookmarks(f, enriched, fh)


def _cmd_query(args) -> None:
    f = _load_corpus(args.corpus)
    tr = build_tag_resource_matrix(f)
    st = _load_sim(args.sim, f) if args.sim is not None else None
    res = rank_resources(_tag_ids(f, args.tags), args.q, tr, st)
    write_query_result(res, f.resources, sys.stdout)


def _cmd_eval(args) -> None:
    cfg = EvalConfig(
        engine=_engine(args),
        simrank=SimRankConfig(args.c1, args.c2, args.simrank_iters),
        lsi=LsiConfig(args.lsi_k, args.lsi_power_iters, args.lsi_seed),
        threads=_threads(args),
    )
    spec = SplitSpec(args.split, args.repeats, args.seed)
    report = run_retrieval_experiment(_load_corpus(args.corpus), spec, args.methods, args.q, cfg)
    with _out(args.output) as fh:
        fh.write(report.to_json())
    if args.tsv is not None:
        with _out(args.tsv) as fh:
            fh.write(report.to_tsv())


def _cmd_trace(args) -> None:
    with open(args.input, encoding="utf-8") as fh:
        trace = read_trace(fh)
    with _out(args.output) as fh:
        write_trace(trace, fh)


COMMANDS = {
    "stats": _cmd_stats,
    "synth": _cmd_synth,
    "sim": _cmd_sim,
    "expand": _cmd_expand,
    "enrich": _cmd_enrich,
    "query": _cmd_query,
    "eval": _cmd_eval,
    "trace": _cmd_trace,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"folksim {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"folksim {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main() -> None:
    sys.exit(run_cli())
