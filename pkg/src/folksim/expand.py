"""Tag-set expansion and bookmark enrichment.

A candidate tag ``t`` is scored against a tag set by summing, over members
``u``, ``st(t, u) * ln(count(t)) * IRF(t)``. The top-k candidates with a
positive score are added.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from folksim.corpus import Bookmark, TagResourceMatrix, inverse_resource_frequency, tag_count
from folksim.errors import ConfigError, DataError
from folksim.simcore import SimilarityMatrix

_CHUNK = 1024


@dataclass(frozen=True)
class ExpansionResult:
    original: frozenset[int]
    added: tuple[tuple[int, float], ...]
    k_used: int

    @property
    def tags(self) -> frozenset[int]:
        return self.original | {t for t, _ in self.added}


def expansion_size(n: int) -> int:
    """Number of tags added to a set of ``n`` tags: ``ceil(n/2)`` above 6, else 3."""
    if n < 1:
        raise ConfigError("tag set must be nonempty")
    return (n + 1) // 2 if n > 6 else 3


def pair_score(t_i: int, t_j: int, st: SimilarityMatrix, tr: TagResourceMatrix) -> float:
    count = tag_count(tr, t_i)
    if count == 0:
        return 0.0
    sim = max(st.entry(t_i, t_j), 0.0)
    return sim * math.log(count) * inverse_resource_frequency(tr, t_i)


def total_score(t_i: int, tag_set: Iterable[int], st: SimilarityMatrix, tr: TagResourceMatrix) -> float:
    return sum(pair_score(t_i, t_j, st, tr) for t_j in tag_set)


def _dense_nonneg(st: SimilarityMatrix | np.ndarray) -> np.ndarray:
    arr = st.to_dense() if isinstance(st, SimilarityMatrix) else np.asarray(st)
    return np.maximum(arr, 0.0)


def _validate(tag_set: frozenset[int], n_t: int) -> None:
    if not tag_set:
        raise DataError("tag set must be nonempty")
    for t in tag_set:
        if not 0 <= t < n_t:
            raise DataError(f"unknown tag: {t}")


def _top_k(scores: np.ndarray, k: int) -> list[tuple[int, float]]:
    cand = np.flatnonzero(scores > 0)
    if len(cand) == 0:
        return []
    order = np.lexsort((cand, -scores[cand]))[:k]
    return [(int(cand[i]), float(scores[cand[i]])) for i in order]


def expand_many(
    tag_sets: Sequence[Iterable[int]],
    st: SimilarityMatrix | np.ndarray,
    tr: TagResourceMatrix,
    k_override: int | None = None,
) -> list[ExpansionResult]:
    """Expand many tag sets at once; ``expand_tag_set`` is the one-set case."""
    sets = [frozenset(s) for s in tag_sets]
    n_t = tr.n_t
    for s in sets:
        _validate(s, n_t)
    if k_override is not None and k_override < 0:
        raise ConfigError(f"k_override must be >= 0, got {k_override}")
    sim = _dense_nonneg(st)
    if sim.shape != (n_t, n_t):
        raise DataError(f"similarity matrix is {sim.shape}, expected {(n_t, n_t)}")
    pop = tr.popularity_vector()
    out: list[ExpansionResult] = []
    for lo in range(0, len(sets), _CHUNK):
        chunk = sets[lo : lo + _CHUNK]
        rows = np.repeat(np.arange(len(chunk)), [len(s) for s in chunk])
        cols = np.fromiter((t for s in chunk for t in sorted(s)), dtype=np.int64, count=len(rows))
        ind = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(chunk), n_t))
        scores = np.asarray(ind @ sim) * pop[None, :]
        scores[rows, cols] = 0.0
        for i, s in enumerate(chunk):
            k = k_override if k_override is not None else expansion_size(len(s))
            out.append(ExpansionResult(s, tuple(_top_k(scores[i], k)), k))
    return out


def expand_tag_set(
    tag_set: Iterable[int],
    st: SimilarityMatrix | np.ndarray,
    tr: TagResourceMatrix,
    k_override: int | None = None,
) -> ExpansionResult:
    """Add the k highest-scoring tags not already in ``tag_set``.

    Ties are broken by ascending tag index. Candidates scoring zero are never
    added, so fewer than k tags may come back.
    """
    return expand_many([tag_set], st, tr, k_override)[0]


def enrich_bookmarks(
    bookmarks: Sequence[Bookmark],
    st: SimilarityMatrix | np.ndarray,
    tr: TagResourceMatrix,
) -> list[Bookmark]:
    results = expand_many([b.tags for b in bookmarks], st, tr)
    return [Bookmark(b.user, b.resource, res.tags) for b, res in zip(bookmarks, results)]
