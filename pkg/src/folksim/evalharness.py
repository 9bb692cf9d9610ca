"""Retrieved-ratio experiments over random train/test bookmark splits."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from folksim.baselines import LsiConfig, SimRankConfig, cosine_dense, lsi_dense, simrank_dense
from folksim.corpus import Bookmark, Folksonomy, TagResourceMatrix, group_bookmarks, matrix_from_bookmarks
from folksim.errors import ConfigError, DataError
from folksim.expand import enrich_bookmarks
from folksim.search import SearchIndex, rank_many
from folksim.simcore import EngineConfig, compute_similarities

log = logging.getLogger(__name__)

METHODS = ("none", "cosine", "simrank", "lsi", "mrs")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    repeats: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError(f"train_fraction must be in (0,1), got {self.train_fraction}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")


@dataclass(frozen=True)
class EvalConfig:
    engine: EngineConfig = field(default_factory=EngineConfig)
    simrank: SimRankConfig = field(default_factory=SimRankConfig)
    lsi: LsiConfig = field(default_factory=LsiConfig)
    threads: int = 1


@dataclass(frozen=True)
class RatioResult:
    ratio: float
    hits: int
    evaluated: int
    skipped: int


@dataclass(frozen=True)
class EvalRow:
    method: str
    q: int
    enriched: bool
    per_repeat: tuple[float, ...]
    skipped: tuple[int, ...]

    @property
    def mean_ratio(self) -> float:
        return float(sum(self.per_repeat) / len(self.per_repeat))

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "q": self.q,
            "enriched": self.enriched,
            "mean_ratio": self.mean_ratio,
            "per_repeat": list(self.per_repeat),
            "skipped": list(self.skipped),
        }


@dataclass
class EvalReport:
    rows: list[EvalRow]

    def get(self, method: str, q: int, enriched: bool) -> EvalRow:
        for row in self.rows:
            if (row.method, row.q, row.enriched) == (method, q, enriched):
                return row
        raise KeyError((method, q, enriched))

    def to_json(self) -> str:
        return json.dumps([r.as_dict() for r in self.rows], indent=2) + "\n"

    def to_tsv(self) -> str:
        lines = ["method\tq\tenriched\tmean_ratio"]
        for r in self.rows:
            lines.append(f"{r.method}\t{r.q}\t{int(r.enriched)}\t{r.mean_ratio:.6f}")
        return "\n".join(lines) + "\n"


def split_bookmarks(
    bookmarks: Sequence[Bookmark], spec: SplitSpec, repeat_index: int
) -> tuple[list[Bookmark], list[Bookmark]]:
    """Seeded random partition; both halves keep the input order."""
    n = len(bookmarks)
    if n < 2:
        raise DataError("need at least 2 bookmarks to split")
    n_train = int(np.floor(spec.train_fraction * n + 0.5))
    n_train = min(max(n_train, 1), n - 1)
    rng = np.random.default_rng([spec.seed, repeat_index])
    in_train = np.zeros(n, dtype=bool)
    in_train[rng.permutation(n)[:n_train]] = True
    train = [b for b, keep in zip(bookmarks, in_train) if keep]
    test = [b for b, keep in zip(bookmarks, in_train) if not keep]
    return train, test


def similarity_for(method: str, tr: TagResourceMatrix, cfg: EvalConfig) -> np.ndarray | None:
    """Dense tag-tag similarity of ``method`` on ``tr``; None for ``none``."""
    if method == "none":
        return None
    if method == "cosine":
        return cosine_dense(tr)
    if method == "simrank":
        return simrank_dense(tr, cfg.simrank, cfg.threads)[0]
    if method == "lsi":
        k = min(cfg.lsi.k, tr.n_t, tr.n_r)
        return lsi_dense(tr, LsiConfig(k, cfg.lsi.power_iterations, cfg.lsi.seed))
    if method == "mrs":
        # tau only matters for persisted output; keep the full matrix here
        engine = EngineConfig(
            psi=cfg.engine.psi,
            epsilon=cfg.engine.epsilon,
            max_iters=cfg.engine.max_iters,
            tau=0.0,
            size_limit=cfg.engine.size_limit,
            norm=cfg.engine.norm,
        )
        st, _, trace = compute_similarities(tr, engine, cfg.threads)
        log.info("mrs: %d iterations, converged=%s", trace.iterations_run, trace.converged)
        return st.to_dense()
    raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")


def _queries(train: TagResourceMatrix, test: Sequence[Bookmark]) -> tuple[list[frozenset[int]], list[int], int]:
    known = train.counts() > 0
    sets, targets, skipped = [], [], 0
    for b in test:
        s = frozenset(t for t in b.tags if known[t])
        if s:
            sets.append(s)
            targets.append(b.resource)
        else:
            skipped += 1
    return sets, targets, skipped


def _hits(
    index_tr: TagResourceMatrix,
    sets: list[frozenset[int]],
    targets: list[int],
    qs: Sequence[int],
    st: np.ndarray | None,
) -> dict[int, int]:
    results = rank_many(sets, max(qs), index_tr, st, SearchIndex(index_tr))
    return {q: sum(t in res.resources()[:q] for res, t in zip(results, targets)) for q in qs}


def retrieved_ratio(
    train: TagResourceMatrix,
    test_bookmarks: Sequence[Bookmark],
    q: int,
    st: np.ndarray | None = None,
    index_tr: TagResourceMatrix | None = None,
) -> RatioResult:
    """Fraction of test bookmarks whose resource ranks in the top ``q``.

    Query tags unknown to ``train`` are dropped; bookmarks left without tags
    are skipped. ``index_tr`` (default ``train``) is the matrix searched,
    e.g. an enriched version of ``train``.
    """
    sets, targets, skipped = _queries(train, test_bookmarks)
    if not sets:
        raise DataError("no evaluable queries")
    hits = _hits(index_tr or train, sets, targets, [q], st)[q]
    return RatioResult(hits / len(sets), hits, len(sets), skipped)


def run_retrieval_experiment(
    f: Folksonomy,
    spec: SplitSpec | None = None,
    methods: Sequence[str] = METHODS,
    qs: Sequence[int] = (5, 10, 20),
    cfg: EvalConfig | None = None,
) -> EvalReport:
    """Average retrieved ratios over ``spec.repeats`` random splits.

    Per repeat and similarity method: similarities are computed on the
    train split, train bookmarks are enriched, and test queries are expanded
    before searching. Rows with ``enriched=False`` search the original train
    split; ``none`` never expands.
    """
    spec = spec or SplitSpec()
    cfg = cfg or EvalConfig()
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
    if not qs or min(qs) < 1:
        raise ConfigError("q values must be positive")
    qs = sorted(set(qs))
    bookmarks = group_bookmarks(f)
    per: dict[tuple[str, int, bool], list[float]] = {}
    skips: dict[tuple[str, int, bool], list[int]] = {}

    def record(method: str, enriched: bool, hits: dict[int, int], n: int, skipped: int) -> None:
        for q in qs:
            per.setdefault((method, q, enriched), []).append(hits[q] / n)
            skips.setdefault((method, q, enriched), []).append(skipped)

    for rep in range(spec.repeats):
        train, test = split_bookmarks(bookmarks, spec, rep)
        tr = matrix_from_bookmarks(train, f.n_t, f.n_r)
        sets, targets, skipped = _queries(tr, test)
        if not sets:
            raise DataError("no evaluable queries")
        for method in methods:
            st = similarity_for(method, tr, cfg)
            record(method, False, _hits(tr, sets, targets, qs, st), len(sets), skipped)
            if st is None:
                continue
            enriched_tr = matrix_from_bookmarks(enrich_bookmarks(train, st, tr), f.n_t, f.n_r)
            record(method, True, _hits(enriched_tr, sets, targets, qs, st), len(sets), skipped)
        log.info("repeat %d/%d done", rep + 1, spec.repeats)

    rows = [
        EvalRow(m, q, e, tuple(per[(m, q, e)]), tuple(skips[(m, q, e)]))
        for m in methods
        for e in (False, True)
        for q in qs
        if (m, q, e) in per
    ]
    return EvalReport(rows)
