from __future__ import annotations

import numpy as np
import pytest
import scipy.sparse as sp

from folksim.corpus import TagResourceMatrix, build_tag_resource_matrix, from_triples, ingest_assignments

TINY = "u1\tr1\tjava\nu1\tr1\tcode\nu2\tr1\tjava\n"


def tr_from_dense(rows) -> TagResourceMatrix:
    m = sp.csr_matrix(np.asarray(rows, dtype=np.int64))
    m.sort_indices()
    return TagResourceMatrix(m)


def random_tr(rng: np.random.Generator, max_t: int = 30, max_r: int = 40, max_density: float = 0.2) -> TagResourceMatrix:
    n_t = int(rng.integers(2, max_t + 1))
    n_r = int(rng.integers(2, max_r + 1))
    density = rng.uniform(0.05, max_density)
    mask = rng.random((n_t, n_r)) < density
    counts = rng.integers(1, 5, size=(n_t, n_r))
    return tr_from_dense(np.where(mask, counts, 0))


def synonym_triples() -> list[tuple[str, str, str]]:
    """``ml`` and ``machine-learning`` label the same documents; ``r-ml`` only carries the long form."""
    out = []
    for r in ("p1", "p2", "p3"):
        for u in ("u1", "u2"):
            out += [(u, r, "ml"), (u, r, "machine-learning")]
        out.append(("u3", r, "python"))
    for u in ("u4", "u5", "u6"):
        out.append((u, "r-ml", "machine-learning"))
    for r in ("c1", "c2", "c3", "c4", "c5"):
        out += [("u7", r, "cooking"), ("u8", r, "recipes")]
    out += [("u9", "c1", "python"), ("u9", "p1", "deep"), ("u9", "p2", "deep")]
    return out


@pytest.fixture
def tiny():
    return ingest_assignments(TINY.splitlines())


@pytest.fixture
def synonym_corpus():
    return from_triples(synonym_triples())


@pytest.fixture
def synonym_tr(synonym_corpus):
    return build_tag_resource_matrix(synonym_corpus)
