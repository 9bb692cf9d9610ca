"""Mutual-reinforcement tag/resource similarity.

Tags are similar when they label similar resources and resources are similar
when labeled by similar tags. Starting from the identity, each step computes

    ST = TR (Psi_r o sr) TR^T,    SR = TR^T (Psi_t o st) TR

and cosine-normalizes both by their diagonals, where ``Psi`` has ones on the
diagonal and ``psi`` elsewhere. Both updates read the previous pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Literal

import numpy as np
import scipy.sparse as sp

from folksim.corpus import TagResourceMatrix
from folksim.errors import ConfigError, DataError
from folksim.kernels import as_csr_float, csr_dense

log = logging.getLogger(__name__)

Norm = Literal["entrywise", "induced"]


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric similarity scores with unit diagonal.

    ``values`` is either a dense ndarray or a CSR matrix holding both
    triangles. Off-diagonal scores below ``tau`` are dropped when sparsified.
    """

    values: np.ndarray | sp.csr_matrix
    tau: float = 0.0

    @classmethod
    def from_dense(cls, arr: np.ndarray, tau: float = 0.0) -> "SimilarityMatrix":
        if tau <= 0:
            return cls(arr, 0.0)
        keep = arr >= tau
        np.fill_diagonal(keep, True)
        m = sp.csr_matrix(np.where(keep, arr, 0.0))
        # the diagonal is kept even if it were zero
        m.setdiag(np.diag(arr))
        m.sort_indices()
        return cls(m, tau)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.values)

    def entry(self, a: int, b: int) -> float:
        return float(self.values[a, b])

    def to_dense(self) -> np.ndarray:
        if self.is_sparse:
            return self.values.toarray()
        return np.asarray(self.values)

    def row(self, a: int) -> np.ndarray:
        if self.is_sparse:
            return self.values.getrow(a).toarray().ravel()
        return np.asarray(self.values[a])

    def pairs(self) -> Iterator[tuple[int, int, float]]:
        """Stored ``(a, b, score)`` with ``a <= b``, in row-major order."""
        if self.is_sparse:
            m = sp.triu(self.values, format="csr")
            m.sort_indices()
            for a in range(m.shape[0]):
                lo, hi = m.indptr[a], m.indptr[a + 1]
                for b, v in zip(m.indices[lo:hi], m.data[lo:hi]):
                    yield a, int(b), float(v)
        else:
            arr = self.to_dense()
            rows, cols = np.triu_indices(arr.shape[0])
            vals = arr[rows, cols]
            keep = (vals != 0) | (rows == cols)
            for a, b, v in zip(rows[keep], cols[keep], vals[keep]):
                yield int(a), int(b), float(v)


@dataclass(frozen=True)
class EngineConfig:
    psi: float = 0.5
    epsilon: float = 0.1
    max_iters: int = 30
    tau: float = 1e-4
    size_limit: int = 5000
    norm: Norm = "entrywise"

    def __post_init__(self) -> None:
        if not 0.0 <= self.psi <= 1.0:
            raise ConfigError(f"psi must be in [0,1], got {self.psi}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError(f"tau must be in [0,1), got {self.tau}")
        if self.size_limit < 1:
            raise ConfigError(f"size_limit must be >= 1, got {self.size_limit}")
        if self.norm not in ("entrywise", "induced"):
            raise ConfigError(f"norm must be 'entrywise' or 'induced', got {self.norm!r}")


@dataclass
class ConvergenceTrace:
    steps: list[tuple[int, float, float]] = field(default_factory=list)
    converged: bool = False
    zero_tags: list[int] = field(default_factory=list)
    zero_resources: list[int] = field(default_factory=list)

    @property
    def iterations_run(self) -> int:
        return len(self.steps)


def init_similarity(n: int) -> SimilarityMatrix:
    if n < 1:
        raise ConfigError("similarity matrix dimension must be >= 1")
    return SimilarityMatrix(np.eye(n))


def _weighted(prev: np.ndarray, psi: float) -> np.ndarray:
    """``Psi o prev``: off-diagonal scaled by psi, diagonal untouched."""
    m = prev * psi
    np.fill_diagonal(m, np.diag(prev))
    return m


def _sandwich(a: sp.csr_matrix, m: np.ndarray, threads: int) -> np.ndarray:
    """Exactly symmetric ``a @ m @ a.T`` for symmetric ``m``."""
    half = csr_dense(a, m, threads)
    # (a m)^T = m a^T because m is symmetric
    out = csr_dense(a, np.ascontiguousarray(half.T), threads)
    return (out + out.T) * 0.5


def _normalize(raw: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cosine-normalize by the diagonal; zero-diagonal indices keep identity rows."""
    d = np.diag(raw).copy()
    zero = d <= 0
    d[zero] = 1.0
    s = np.sqrt(d)
    out = raw / np.outer(s, s)
    np.clip(out, 0.0, 1.0, out=out)
    out[zero, :] = 0.0
    out[:, zero] = 0.0
    np.fill_diagonal(out, 1.0)
    return out, np.flatnonzero(zero)


class _Operator:
    """Float CSR views of TR and TR^T, prepared once per run."""

    def __init__(self, tr: TagResourceMatrix) -> None:
        self.tr = as_csr_float(tr.matrix)
        self.trt = as_csr_float(tr.matrix.T)

    def raw(self, st_prev: np.ndarray, sr_prev: np.ndarray, psi: float, threads: int):
        st_raw = _sandwich(self.tr, _weighted(sr_prev, psi), threads)
        sr_raw = _sandwich(self.trt, _weighted(st_prev, psi), threads)
        return st_raw, sr_raw

    def step(self, st_prev: np.ndarray, sr_prev: np.ndarray, psi: float, threads: int):
        st_raw, sr_raw = self.raw(st_prev, sr_prev, psi, threads)
        st, zt = _normalize(st_raw)
        sr, zr = _normalize(sr_raw)
        return st, sr, zt, zr


def _check_dims(tr: TagResourceMatrix, st_prev: SimilarityMatrix, sr_prev: SimilarityMatrix) -> None:
    if st_prev.n != tr.n_t or sr_prev.n != tr.n_r:
        raise DataError(
            f"similarity dimensions ({st_prev.n}, {sr_prev.n}) do not match TR ({tr.n_t}, {tr.n_r})"
        )


def reinforce(
    tr: TagResourceMatrix,
    st_prev: SimilarityMatrix,
    sr_prev: SimilarityMatrix,
    psi: float,
    threads: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Un-normalized ``(ST, SR)`` for one step, as dense arrays."""
    _check_dims(tr, st_prev, sr_prev)
    return _Operator(tr).raw(st_prev.to_dense(), sr_prev.to_dense(), psi, threads)


def mrs_step(
    tr: TagResourceMatrix,
    st_prev: SimilarityMatrix,
    sr_prev: SimilarityMatrix,
    psi: float,
    threads: int = 1,
) -> tuple[SimilarityMatrix, SimilarityMatrix]:
    """One Jacobi-style update of the tag and resource similarities.

    Tags (resources) with an all-zero row (column) in TR keep identity
    similarities and are logged.
    """
    _check_dims(tr, st_prev, sr_prev)
    st, sr, zt, zr = _Operator(tr).step(st_prev.to_dense(), sr_prev.to_dense(), psi, threads)
    if len(zt) or len(zr):
        log.warning("unused tags %s / resources %s kept at identity", zt.tolist(), zr.tolist())
    return SimilarityMatrix(st), SimilarityMatrix(sr)


def pairwise_step_oracle(
    tr: TagResourceMatrix,
    st_prev: SimilarityMatrix,
    sr_prev: SimilarityMatrix,
    psi: float,
    a: int,
    b: int,
    kind: Literal["tag", "resource"],
) -> float:
    """One similarity entry by literal double summation over index pairs.

    Deliberately free of matrix algebra; used to check :func:`mrs_step`.
    Zero terms of TR are skipped since they contribute nothing.
    """
    if kind == "tag":
        m = tr.matrix
        prev = sr_prev
    elif kind == "resource":
        m = tr.matrix.T.tocsr()
        prev = st_prev
    else:
        raise ValueError(f"kind must be 'tag' or 'resource', got {kind!r}")

    def support(x: int) -> list[tuple[int, float]]:
        lo, hi = m.indptr[x], m.indptr[x + 1]
        return [(int(i), float(v)) for i, v in zip(m.indices[lo:hi], m.data[lo:hi])]

    def raw(x: int, y: int) -> float:
        total = 0.0
        for i, wx in support(x):
            for j, wy in support(y):
                weight = 1.0 if i == j else psi
                total += wx * weight * prev.entry(i, j) * wy
        return total

    if a == b:
        return 1.0
    aa, bb = raw(a, a), raw(b, b)
    if aa == 0.0 or bb == 0.0:
        return 0.0
    return raw(a, b) / (aa ** 0.5 * bb ** 0.5)


def convergence_delta(curr: SimilarityMatrix | np.ndarray, prev: SimilarityMatrix | np.ndarray, norm: Norm = "entrywise") -> float:
    """Relative change ``||curr - prev||_1 / ||curr||_1``."""
    c = curr.to_dense() if isinstance(curr, SimilarityMatrix) else curr
    p = prev.to_dense() if isinstance(prev, SimilarityMatrix) else prev
    if c.shape != p.shape:
        raise DataError(f"shape mismatch {c.shape} vs {p.shape}")
    diff = np.abs(c - p)
    if norm == "entrywise":
        return float(diff.sum() / np.abs(c).sum())
    if norm == "induced":
        return float(diff.sum(axis=0).max() / np.abs(c).sum(axis=0).max())
    raise ConfigError(f"unknown norm {norm!r}")


def compute_similarities(
    tr: TagResourceMatrix,
    cfg: EngineConfig | None = None,
    threads: int = 1,
) -> tuple[SimilarityMatrix, SimilarityMatrix, ConvergenceTrace]:
    """Iterate from the identity until both relative deltas drop below epsilon.

    Returns the final tag and resource similarities, sparsified by ``cfg.tau``
    (diagonal always kept), and the per-iteration trace. Hitting
    ``max_iters`` is not an error; ``trace.converged`` is then False.
    """
    cfg = cfg or EngineConfig()
    size = max(tr.n_t, tr.n_r)
    if size > cfg.size_limit:
        raise DataError(
            f"matrix dimension {size} exceeds size_limit {cfg.size_limit}; "
            "reduce the corpus to desk scale or raise size_limit"
        )
    op = _Operator(tr)
    st, sr = np.eye(tr.n_t), np.eye(tr.n_r)
    trace = ConvergenceTrace()
    for k in range(1, cfg.max_iters + 1):
        st_new, sr_new, zt, zr = op.step(st, sr, cfg.psi, threads)
        dt = convergence_delta(st_new, st, cfg.norm)
        dr = convergence_delta(sr_new, sr, cfg.norm)
        trace.steps.append((k, dt, dr))
        log.info("iteration %d: delta_t=%.6g delta_r=%.6g", k, dt, dr)
        st, sr = st_new, sr_new
        if k == 1:
            trace.zero_tags, trace.zero_resources = zt.tolist(), zr.tolist()
            if len(zt) or len(zr):
                log.info("%d unused tags and %d unused resources kept at identity", len(zt), len(zr))
        if dt < cfg.epsilon and dr < cfg.epsilon:
            trace.converged = True
            break
    return SimilarityMatrix.from_dense(st, cfg.tau), SimilarityMatrix.from_dense(sr, cfg.tau), trace
