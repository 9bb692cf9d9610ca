"""Folksonomy ingestion, the tag-resource count matrix and corpus statistics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from folksim.errors import DataError


class CorpusError(DataError):
    """Raised for malformed or empty assignment data."""


@dataclass(frozen=True)
class Folksonomy:
    """Interned users, resources and tags plus the tag-assignment set.

    ``assignments`` is an ``(n, 3)`` int array of ``(user, resource, tag)``
    index triples in first-appearance order, free of duplicates.
    """

    users: tuple[str, ...]
    resources: tuple[str, ...]
    tags: tuple[str, ...]
    assignments: np.ndarray

    @property
    def n_u(self) -> int:
        return len(self.users)

    @property
    def n_r(self) -> int:
        return len(self.resources)

    @property
    def n_t(self) -> int:
        return len(self.tags)

    def tag_index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tags)}

    def resource_index(self) -> dict[str, int]:
        return {r: i for i, r in enumerate(self.resources)}


@dataclass(frozen=True)
class Bookmark:
    user: int
    resource: int
    tags: frozenset[int]


@dataclass(frozen=True)
class TagResourceMatrix:
    """Sparse ``n_t x n_r`` matrix of distinct-user counts.

    ``matrix`` is a canonical CSR matrix with int64 data; absent entries are 0.
    """

    matrix: sp.csr_matrix
    _row_sums: np.ndarray = field(init=False, repr=False, compare=False)
    _df: np.ndarray = field(init=False, repr=False, compare=False)
    _tags_per_resource: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        m = self.matrix
        object.__setattr__(self, "_row_sums", np.asarray(m.sum(axis=1)).ravel().astype(np.int64))
        object.__setattr__(self, "_df", np.diff(m.indptr).astype(np.int64))
        object.__setattr__(self, "_tags_per_resource", np.bincount(m.indices, minlength=m.shape[1]))

    @property
    def n_t(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_r(self) -> int:
        return self.matrix.shape[1]

    @property
    def active_resources(self) -> int:
        """Number of resources carrying at least one tag."""
        return int(np.count_nonzero(self._tags_per_resource))

    def entry(self, t: int, r: int) -> int:
        return int(self.matrix[t, r])

    def counts(self) -> np.ndarray:
        """Per-tag usage counts (row sums)."""
        return self._row_sums

    def tags_per_resource(self) -> np.ndarray:
        return self._tags_per_resource

    def document_frequency(self) -> np.ndarray:
        """Per-tag number of distinct resources labeled."""
        return self._df

    def irf_vector(self) -> np.ndarray:
        """IRF for every tag; unused tags get 0."""
        df = self._df
        out = np.zeros(self.n_t)
        used = df > 0
        out[used] = np.log(self.active_resources / df[used])
        return out

    def popularity_vector(self) -> np.ndarray:
        """``ln(count) * IRF`` per tag, the tag-only factor of the expansion score."""
        counts = self._row_sums
        out = np.zeros(self.n_t)
        used = counts > 0
        out[used] = np.log(counts[used]) * self.irf_vector()[used]
        return out


def _intern(table: dict[str, int], key: str) -> int:
    idx = table.get(key)
    if idx is None:
        idx = table[key] = len(table)
    return idx


def ingest_assignments(stream: Iterable[str]) -> Folksonomy:
    """Parse ``user<TAB>resource<TAB>tag`` lines into a :class:`Folksonomy`.

    Lines starting with ``#`` and blank lines are skipped; fields past the
    third are ignored. Identifiers are interned in first-appearance order.
    """
    users: dict[str, int] = {}
    resources: dict[str, int] = {}
    tags: dict[str, int] = {}
    seen: dict[tuple[int, int, int], None] = {}
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) < 3:
            raise CorpusError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        u, r, t = fields[:3]
        if not u or not r or not t:
            raise CorpusError(f"line {lineno}: empty identifier")
        seen.setdefault((_intern(users, u), _intern(resources, r), _intern(tags, t)))
    if not seen:
        raise CorpusError("empty corpus")
    arr = np.array(list(seen), dtype=np.int64).reshape(-1, 3)
    return Folksonomy(tuple(users), tuple(resources), tuple(tags), arr)


def read_assignments(path) -> Folksonomy:
    with open(path, encoding="utf-8") as fh:
        return ingest_assignments(fh)


def from_triples(triples: Iterable[tuple[str, str, str]]) -> Folksonomy:
    return ingest_assignments("\t".join(t) for t in triples)


def write_assignments(f: Folksonomy, fh: TextIO) -> None:
    """Write the assignment set back as TSV; re-ingesting yields an identical folksonomy."""
    for u, r, t in f.assignments:
        fh.write(f"{f.users[u]}\t{f.resources[r]}\t{f.tags[t]}\n")


def write_bookmarks(f: Folksonomy, bookmarks: Sequence[Bookmark], fh: TextIO) -> None:
    for b in bookmarks:
        for t in sorted(b.tags):
            fh.write(f"{f.users[b.user]}\t{f.resources[b.resource]}\t{f.tags[t]}\n")


def build_tag_resource_matrix(f: Folksonomy) -> TagResourceMatrix:
    a = f.assignments
    data = np.ones(len(a), dtype=np.int64)
    # duplicate (tag, resource) coordinates are summed: one per distinct user
    m = sp.csr_matrix((data, (a[:, 2], a[:, 1])), shape=(f.n_t, f.n_r), dtype=np.int64)
    m.sum_duplicates()
    m.sort_indices()
    return TagResourceMatrix(m)


def matrix_from_bookmarks(bookmarks: Sequence[Bookmark], n_t: int, n_r: int) -> TagResourceMatrix:
    """Build TR over a fixed tag/resource universe from a subset of bookmarks.

    Tags or resources not covered by ``bookmarks`` give all-zero rows/columns.
    """
    rows: list[int] = []
    cols: list[int] = []
    for b in bookmarks:
        rows.extend(b.tags)
        cols.extend([b.resource] * len(b.tags))
    m = sp.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(n_t, n_r),
        dtype=np.int64,
    )
    m.sum_duplicates()
    m.sort_indices()
    return TagResourceMatrix(m)


def group_bookmarks(f: Folksonomy) -> list[Bookmark]:
    """One bookmark per distinct (user, resource) pair, ordered by user then resource."""
    out: list[Bookmark] = []
    a = f.assignments
    if len(a) == 0:
        return out
    a = a[np.lexsort((a[:, 2], a[:, 1], a[:, 0]))]
    keys = a[:, 0] * f.n_r + a[:, 1]
    bounds = np.flatnonzero(np.diff(keys)) + 1
    for chunk in np.split(a, bounds):
        out.append(Bookmark(int(chunk[0, 0]), int(chunk[0, 1]), frozenset(int(t) for t in chunk[:, 2])))
    return out


def tag_count(tr: TagResourceMatrix, t: int) -> int:
    if not 0 <= t < tr.n_t:
        raise IndexError(f"tag index {t} out of range [0, {tr.n_t})")
    return int(tr.counts()[t])


def inverse_resource_frequency(tr: TagResourceMatrix, t: int) -> float:
    """``ln(n_r / df_t)`` where ``n_r`` counts resources carrying any tag."""
    if not 0 <= t < tr.n_t:
        raise IndexError(f"tag index {t} out of range [0, {tr.n_t})")
    df = int(tr.document_frequency()[t])
    if df == 0:
        raise CorpusError(f"tag unused: {t}")
    return math.log(tr.active_resources / df)


HIST_BUCKETS = ("1", "2", "3", "4", ">=5")


def _histogram(values: np.ndarray) -> dict[str, int]:
    c = Counter(min(int(v), 5) for v in values if v > 0)
    return {label: c.get(i, 0) for i, label in enumerate(HIST_BUCKETS, start=1)}


def corpus_stats(f: Folksonomy, tr: TagResourceMatrix) -> dict:
    tags_per_resource = tr.tags_per_resource()
    uses_per_tag = tr.counts()
    n_t = max(tr.n_t, 1)
    return {
        "n_u": f.n_u,
        "n_r": f.n_r,
        "n_t": f.n_t,
        "n_assignments": int(len(f.assignments)),
        "distinct_tags_per_resource": _histogram(tags_per_resource),
        "uses_per_tag": _histogram(uses_per_tag),
        "frac_tags_used_lt5": float(np.count_nonzero(uses_per_tag < 5)) / n_t,
        "frac_resources_le5_tags": float(np.count_nonzero(tags_per_resource <= 5)) / max(tr.n_r, 1),
    }
