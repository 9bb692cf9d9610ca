"""Compare the compiled and pure-Python kernels on one similarity step.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--threads T]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from folksim.corpus import build_tag_resource_matrix
from folksim.kernels import available_backends, use_backend
from folksim.simcore import init_similarity, mrs_step
from folksim.synth import SynthSpec, generate_synthetic


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--n-resources", type=int, default=3000)
    args = ap.parse_args()

    f = generate_synthetic(SynthSpec(n_resources=args.n_resources, n_bookmarks=int(1.5 * args.n_resources)))
    tr = build_tag_resource_matrix(f)
    st0, sr0 = init_similarity(tr.n_t), init_similarity(tr.n_r)
    # start from a dense-ish state so the step cost is representative
    st1, sr1 = mrs_step(tr, st0, sr0, 0.5)
    print(f"TR: {tr.n_t} tags x {tr.n_r} resources, nnz={tr.matrix.nnz}")

    results = {}
    for name in available_backends():
        with use_backend(name):
            results[name] = mrs_step(tr, st1, sr1, 0.5, args.threads)
            secs = _time(lambda: mrs_step(tr, st1, sr1, 0.5, args.threads), args.repeat)
        print(f"{name:>7}: {secs * 1e3:9.1f} ms per step (best of {args.repeat})")
    if len(results) == 2:
        a, b = (r[0].to_dense() for r in results.values())
        print(f"max |cython - python| on st: {np.abs(a - b).max():.3g}")


if __name__ == "__main__":
    main()
