"""TF-IDF resource ranking for (optionally expanded) tag queries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from folksim.corpus import TagResourceMatrix
from folksim.errors import ConfigError, DataError
from folksim.expand import expand_many
from folksim.simcore import SimilarityMatrix


@dataclass(frozen=True)
class QueryResult:
    ranked: tuple[tuple[int, float], ...]
    q: int
    expanded_query: frozenset[int]

    def resources(self) -> list[int]:
        return [r for r, _ in self.ranked]


class SearchIndex:
    """Tag -> (resource, tf*irf) postings held as a CSR matrix."""

    def __init__(self, tr: TagResourceMatrix) -> None:
        self.tr = tr
        self.irf = tr.irf_vector()
        w = sp.csr_matrix(tr.matrix, dtype=np.float64)
        w = sp.csr_matrix(sp.diags(self.irf) @ w)
        w.eliminate_zeros()
        w.sort_indices()
        self.weights = w

    def scores(self, tag_sets: Sequence[frozenset[int]]) -> sp.csr_matrix:
        rows = np.repeat(np.arange(len(tag_sets)), [len(s) for s in tag_sets])
        cols = np.fromiter((t for s in tag_sets for t in sorted(s)), dtype=np.int64, count=len(rows))
        q = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(tag_sets), self.tr.n_t))
        out = sp.csr_matrix(q @ self.weights)
        out.sort_indices()
        return out


def tfidf_weight(t: int, r: int, tr: TagResourceMatrix) -> float:
    """Raw count times the tag's inverse resource frequency."""
    count = tr.entry(t, r)
    if count == 0:
        return 0.0
    return count * float(tr.irf_vector()[t])


def _top(indices: np.ndarray, values: np.ndarray, q: int) -> tuple[tuple[int, float], ...]:
    keep = values > 0
    indices, values = indices[keep], values[keep]
    order = np.lexsort((indices, -values))[:q]
    return tuple((int(indices[i]), float(values[i])) for i in order)


def rank_many(
    tag_sets: Sequence[Iterable[int]],
    q: int,
    tr: TagResourceMatrix,
    st: SimilarityMatrix | np.ndarray | None = None,
    index: SearchIndex | None = None,
) -> list[QueryResult]:
    if q < 1:
        raise ConfigError(f"q must be >= 1, got {q}")
    sets = [frozenset(s) for s in tag_sets]
    for s in sets:
        if not s:
            raise DataError("query tag set must be nonempty")
        if min(s) < 0 or max(s) >= tr.n_t:
            raise DataError(f"unknown tag in query: {sorted(t for t in s if not 0 <= t < tr.n_t)}")
    if st is not None:
        sets = [res.tags for res in expand_many(sets, st, tr)]
    index = index or SearchIndex(tr)
    scores = index.scores(sets)
    out = []
    for i, s in enumerate(sets):
        lo, hi = scores.indptr[i], scores.indptr[i + 1]
        out.append(QueryResult(_top(scores.indices[lo:hi], scores.data[lo:hi], q), q, s))
    return out


def rank_resources(
    tag_set: Iterable[int],
    q: int,
    tr: TagResourceMatrix,
    st: SimilarityMatrix | np.ndarray | None = None,
) -> QueryResult:
    """Top-q resources by summed TF-IDF over the (expanded) query tags.

    Resources with zero relevance are left out; ties go to the lower
    resource index.
    """
    return rank_many([tag_set], q, tr, st)[0]
