"""Reference tag similarity metrics: cosine, SimRank and LSI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.utils.extmath import randomized_svd

from folksim.corpus import TagResourceMatrix
from folksim.errors import ConfigError
from folksim.kernels import as_csr_float, csr_dense
from folksim.simcore import SimilarityMatrix


@dataclass(frozen=True)
class SimRankConfig:
    c1: float = 0.8
    c2: float = 0.8
    iterations: int = 10

    def __post_init__(self) -> None:
        for name in ("c1", "c2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0,1], got {v}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")


@dataclass(frozen=True)
class LsiConfig:
    k: int = 64
    power_iterations: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.power_iterations < 1:
            raise ConfigError(f"power_iterations must be >= 1, got {self.power_iterations}")


def _row_cosine(gram: np.ndarray, empty: np.ndarray | None = None) -> np.ndarray:
    d = np.diag(gram).copy()
    zero = d <= 0
    if empty is not None:
        zero |= empty
    d[zero] = 1.0
    s = np.sqrt(d)
    out = gram / np.outer(s, s)
    out = (out + out.T) * 0.5
    np.clip(out, -1.0, 1.0, out=out)
    out[zero, :] = 0.0
    out[:, zero] = 0.0
    np.fill_diagonal(out, 1.0)
    return out


def cosine_dense(tr: TagResourceMatrix) -> np.ndarray:
    m = as_csr_float(tr.matrix)
    return _row_cosine((m @ m.T).toarray())


def cosine_similarity_matrix(tr: TagResourceMatrix) -> SimilarityMatrix:
    """Row cosine of TR; tags with an empty row are similar only to themselves."""
    return SimilarityMatrix(cosine_dense(tr))


def _mean_neighbour(support: sp.csr_matrix) -> sp.csr_matrix:
    """Row-normalize a 0/1 support matrix; empty rows stay empty."""
    deg = np.diff(support.indptr).astype(np.float64)
    inv = np.zeros_like(deg)
    inv[deg > 0] = 1.0 / deg[deg > 0]
    out = sp.diags(inv) @ support
    out = sp.csr_matrix(out)
    out.sort_indices()
    return out


def simrank_dense(
    tr: TagResourceMatrix, cfg: SimRankConfig | None = None, threads: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    cfg = cfg or SimRankConfig()
    support = as_csr_float(tr.matrix)
    support.data[:] = 1.0  # counts are ignored by SimRank
    wt = _mean_neighbour(support)
    wr = _mean_neighbour(as_csr_float(support.T))
    st, sr = np.eye(tr.n_t), np.eye(tr.n_r)
    for _ in range(cfg.iterations):
        half_t = csr_dense(wt, sr, threads)
        st_new = csr_dense(wt, np.ascontiguousarray(half_t.T), threads)
        half_r = csr_dense(wr, st, threads)
        sr_new = csr_dense(wr, np.ascontiguousarray(half_r.T), threads)
        st_new = (st_new + st_new.T) * (0.5 * cfg.c1)
        sr_new = (sr_new + sr_new.T) * (0.5 * cfg.c2)
        np.fill_diagonal(st_new, 1.0)
        np.fill_diagonal(sr_new, 1.0)
        st, sr = st_new, sr_new
    return st, sr


def simrank_compute(
    tr: TagResourceMatrix, cfg: SimRankConfig | None = None, threads: int = 1
) -> tuple[SimilarityMatrix, SimilarityMatrix]:
    """SimRank over the tag-resource bipartite graph.

    Neighbour sets are the support of TR. Self-similarity is pinned to 1
    after every iteration; a node without neighbours is similar to nothing
    else.
    """
    st, sr = simrank_dense(tr, cfg, threads)
    return SimilarityMatrix(st), SimilarityMatrix(sr)


def lsi_tag_vectors(tr: TagResourceMatrix, cfg: LsiConfig | None = None) -> np.ndarray:
    """Rank-k latent coordinates ``U_k * s_k`` of every tag."""
    cfg = cfg or LsiConfig()
    limit = min(tr.n_t, tr.n_r)
    if not 1 <= cfg.k <= limit:
        raise ConfigError(f"LSI k must be in [1, {limit}], got {cfg.k}")
    u, s, _ = randomized_svd(
        as_csr_float(tr.matrix),
        n_components=cfg.k,
        n_oversamples=10,
        n_iter=cfg.power_iterations,
        random_state=cfg.seed,
    )
    return u * s


def lsi_dense(tr: TagResourceMatrix, cfg: LsiConfig | None = None) -> np.ndarray:
    z = lsi_tag_vectors(tr, cfg)
    return _row_cosine(z @ z.T, empty=tr.counts() == 0)


def lsi_similarity_matrix(tr: TagResourceMatrix, cfg: LsiConfig | None = None) -> SimilarityMatrix:
    """Cosine between tags in the rank-k latent space of TR.

    Scores may be negative; expansion scoring clamps them to zero.
    """
    return SimilarityMatrix(lsi_dense(tr, cfg))
