"""Plain-text artifacts: similarity matrices, convergence traces, query results.

A similarity file starts with ``# key=value`` header lines (method and its
parameters, plus ``# trace=k,delta_t,delta_r`` lines when available) followed
by ``a<TAB>b<TAB>score`` rows with ``a <= b`` as tag indices.
"""

from __future__ import annotations

from typing import Iterable, Sequence, TextIO

import scipy.sparse as sp

from folksim.errors import DataError
from folksim.search import QueryResult
from folksim.simcore import SimilarityMatrix

TRACE_HEADER = "k\tdelta_t\tdelta_r"
QUERY_HEADER = "rank\tresource_id\trelevance"


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_similarity(
    sim: SimilarityMatrix,
    fh: TextIO,
    header: dict[str, object],
    trace: Sequence[tuple[int, float, float]] = (),
) -> None:
    fh.write(f"# n={sim.n}\n")
    for key, value in header.items():
        fh.write(f"# {key}={value}\n")
    for k, dt, dr in trace:
        fh.write(f"# trace={k},{_fmt(dt)},{_fmt(dr)}\n")
    for a, b, v in sim.pairs():
        fh.write(f"{a}\t{b}\t{_fmt(v)}\n")


def read_similarity(fh: Iterable[str]) -> tuple[SimilarityMatrix, dict[str, str], list[tuple[int, float, float]]]:
    """Parse a similarity file back into a symmetric matrix, header and trace."""
    header: dict[str, str] = {}
    trace: list[tuple[int, float, float]] = []
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for lineno, line in enumerate(fh, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].strip().partition("=")
            if not sep:
                continue
            if key == "trace":
                k, dt, dr = value.split(",")
                trace.append((int(k), float(dt), float(dr)))
            else:
                header[key] = value
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise DataError(f"line {lineno}: expected a<TAB>b<TAB>score")
        try:
            a, b, v = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from None
        if a > b:
            raise DataError(f"line {lineno}: expected a <= b, got {a} > {b}")
        rows.append(a)
        cols.append(b)
        vals.append(v)
    if "n" not in header:
        raise DataError("similarity file lacks the '# n=' header")
    n = int(header.pop("n"))
    if rows and max(cols) >= n:
        raise DataError(f"index {max(cols)} out of range for n={n}")
    upper = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    full = sp.csr_matrix(upper + sp.triu(upper, k=1).T)
    full.sort_indices()
    return SimilarityMatrix(full, float(header.get("tau", 0.0))), header, trace


def write_trace(trace: Sequence[tuple[int, float, float]], fh: TextIO) -> None:
    fh.write(TRACE_HEADER + "\n")
    for k, dt, dr in trace:
        fh.write(f"{k}\t{_fmt(dt)}\t{_fmt(dr)}\n")


def read_trace(fh: Iterable[str]) -> list[tuple[int, float, float]]:
    """Read a trace TSV, or the embedded trace of a similarity file."""
    lines = [ln.rstrip("\n") for ln in fh]
    if any(ln.startswith("# trace=") for ln in lines):
        return read_similarity(lines)[2]
    out = []
    for lineno, line in enumerate(lines, start=1):
        if not line or line.startswith("#") or line == TRACE_HEADER:
            continue
        parts = line.split("\t")
        try:
            out.append((int(parts[0]), float(parts[1]), float(parts[2])))
        except (ValueError, IndexError):
            raise DataError(f"line {lineno}: expected k<TAB>delta_t<TAB>delta_r") from None
    if not out:
        raise DataError("no trace rows found")
    return out


def write_query_result(res: QueryResult, resource_names: Sequence[str], fh: TextIO) -> None:
    fh.write(QUERY_HEADER + "\n")
    for rank, (r, score) in enumerate(res.ranked, start=1):
        fh.write(f"{rank}\t{resource_names[r]}\t{_fmt(score)}\n")
