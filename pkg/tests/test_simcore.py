from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from folksim.baselines import cosine_dense
from folksim.errors import ConfigError, DataError
from folksim.simcore import (
    EngineConfig,
    SimilarityMatrix,
    compute_similarities,
    convergence_delta,
    init_similarity,
    mrs_step,
    pairwise_step_oracle,
    reinforce,
)
from folksim.synth import SynthSpec, generate_synthetic
from folksim.corpus import build_tag_resource_matrix

from conftest import random_tr, tr_from_dense


def _iterate(tr, psi, k):
    st, sr = init_similarity(tr.n_t), init_similarity(tr.n_r)
    out = []
    for _ in range(k):
        st, sr = mrs_step(tr, st, sr, psi)
        out.append((st, sr))
    return out


def test_init_similarity():
    assert init_similarity(3).to_dense().tolist() == np.eye(3).tolist()
    assert init_similarity(1).entry(0, 0) == 1.0
    assert init_similarity(4).entry(0, 1) == 0.0
    with pytest.raises(ConfigError):
        init_similarity(0)


def test_first_step_is_cosine_value():
    tr = tr_from_dense([[1, 1], [0, 1]])
    (st, _), = _iterate(tr, 0.5, 1)
    assert st.entry(0, 1) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_second_step_hand_value():
    tr = tr_from_dense([[1, 1], [0, 1]])
    (st1, sr1), (st2, _) = _iterate(tr, 0.5, 2)
    raw, _ = reinforce(tr, st1, sr1, 0.5)
    assert raw[0, 1] == pytest.approx(1 + 0.5 / math.sqrt(2), abs=1e-12)
    assert raw[0, 0] == pytest.approx(2 + 1 / math.sqrt(2), abs=1e-12)
    assert raw[1, 1] == pytest.approx(1.0, abs=1e-12)
    # 1.353553 / sqrt(2.707107 * 1)
    assert st2.entry(0, 1) == pytest.approx(0.8226643880, abs=1e-9)
    assert st2.entry(0, 1) == pytest.approx(
        pairwise_step_oracle(tr, st1, sr1, 0.5, 0, 1, "tag"), abs=1e-12
    )


@pytest.mark.parametrize("psi", [0.0, 0.5, 1.0])
def test_disjoint_tags_stay_identity(psi):
    tr = tr_from_dense([[1, 0], [0, 1]])
    for st, sr in _iterate(tr, psi, 4):
        assert np.array_equal(st.to_dense(), np.eye(2))
        assert np.array_equal(sr.to_dense(), np.eye(2))


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("psi", [0.0, 0.3, 0.7, 1.0])
def test_matches_oracle(seed, psi):
    tr = random_tr(np.random.default_rng(seed), max_t=12, max_r=15)
    prev = _iterate(tr, psi, 2)[-1]
    st, sr = mrs_step(tr, *prev, psi)
    for a in range(tr.n_t):
        for b in range(a, tr.n_t):
            assert st.entry(a, b) == pytest.approx(pairwise_step_oracle(tr, *prev, psi, a, b, "tag"), abs=1e-9)
    for a in range(tr.n_r):
        for b in range(a, tr.n_r):
            assert sr.entry(a, b) == pytest.approx(pairwise_step_oracle(tr, *prev, psi, a, b, "resource"), abs=1e-9)


def test_oracle_diagonal_and_kind():
    tr = tr_from_dense([[1, 2], [0, 1]])
    st, sr = init_similarity(2), init_similarity(2)
    assert pairwise_step_oracle(tr, st, sr, 0.5, 1, 1, "tag") == 1.0
    with pytest.raises(ValueError):
        pairwise_step_oracle(tr, st, sr, 0.5, 0, 1, "user")


@pytest.mark.parametrize("seed", range(10))
def test_psi_zero_reduces_to_cosine(seed):
    tr = random_tr(np.random.default_rng(100 + seed))
    cos = cosine_dense(tr)
    for st, _ in _iterate(tr, 0.0, 3):
        np.testing.assert_allclose(st.to_dense(), cos, atol=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_structural_invariants(seed):
    tr = random_tr(np.random.default_rng(200 + seed))
    for st, sr in _iterate(tr, 0.7, 4):
        for m in (st.to_dense(), sr.to_dense()):
            assert np.array_equal(m, m.T)
            assert np.all(np.diag(m) == 1.0)
            assert m.min() >= -1e-12 and m.max() <= 1 + 1e-12


def test_entries_can_decrease_between_iterations():
    # Known counterexample to entrywise monotone iterates.
    tr = tr_from_dense([[1, 0, 2], [2, 2, 0], [1, 0, 2]])
    steps = _iterate(tr, 1.0, 2)
    before, after = steps[0][1].entry(0, 1), steps[1][1].entry(0, 1)
    assert before == pytest.approx(math.sqrt(2 / 3), abs=1e-12)
    assert after < before - 1e-3
    prev = steps[0]
    assert after == pytest.approx(pairwise_step_oracle(tr, *prev, 1.0, 0, 1, "resource"), abs=1e-12)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("seed", range(6))
def test_raw_numerators_grow_with_psi(k, seed):
    tr = random_tr(np.random.default_rng(300 + seed))
    off = ~np.eye(tr.n_t, dtype=bool)
    last = None
    for psi in (0.0, 0.25, 0.5, 0.75, 1.0):
        prev = _iterate(tr, psi, k - 1)[-1]
        raw, _ = reinforce(tr, *prev, psi)
        if last is not None:
            assert np.all(raw[off] >= last[off] - 1e-9)
        last = raw


def test_zero_rows_keep_identity(caplog):
    tr = tr_from_dense([[1, 1, 0], [0, 0, 0], [1, 0, 0]])
    with caplog.at_level(logging.WARNING):
        st, sr = mrs_step(tr, init_similarity(3), init_similarity(3), 0.5)
    assert st.row(1).tolist() == [0.0, 1.0, 0.0]
    assert sr.row(2).tolist() == [0.0, 0.0, 1.0]
    assert "kept at identity" in caplog.text


def test_dimension_mismatch():
    tr = tr_from_dense([[1, 1]])
    with pytest.raises(DataError):
        mrs_step(tr, init_similarity(2), init_similarity(2), 0.5)


def test_convergence_delta_examples():
    eye = np.eye(2)
    assert convergence_delta(eye, eye) == 0.0
    assert convergence_delta(eye, np.diag([0.5, 0.5])) == pytest.approx(0.5)
    curr = np.array([[1.0, 0.5], [0.5, 1.0]])
    assert convergence_delta(curr, eye, "induced") == pytest.approx(0.5 / 1.5)
    with pytest.raises(DataError):
        convergence_delta(eye, np.eye(3))


@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"psi": 1.5}, r"\[0,1\]"),
        ({"psi": -0.1}, r"\[0,1\]"),
        ({"epsilon": 0}, "epsilon"),
        ({"max_iters": 0}, "max_iters"),
        ({"tau": 1.0}, "tau"),
        ({"norm": "frobenius"}, "norm"),
    ],
)
def test_engine_config_validation(kwargs, match):
    with pytest.raises(ConfigError, match=match):
        EngineConfig(**kwargs)


def test_identity_tr_converges_immediately():
    tr = tr_from_dense(np.eye(3, dtype=int))
    st, sr, trace = compute_similarities(tr)
    assert trace.converged and trace.iterations_run == 1
    assert trace.steps[0][1:] == (0.0, 0.0)
    assert np.array_equal(st.to_dense(), np.eye(3))


def test_psi_zero_converges_at_second_step():
    tr = random_tr(np.random.default_rng(5))
    _, _, trace = compute_similarities(tr, EngineConfig(psi=0.0, tau=0.0))
    assert trace.iterations_run == 2
    assert trace.steps[1][1:] == (0.0, 0.0)


def test_max_iters_without_convergence():
    tr = random_tr(np.random.default_rng(6))
    _, _, trace = compute_similarities(tr, EngineConfig(epsilon=1e-12, max_iters=2))
    assert not trace.converged and trace.iterations_run == 2


def test_size_limit():
    tr = tr_from_dense(np.ones((3, 4), dtype=int))
    with pytest.raises(DataError, match="desk scale"):
        compute_similarities(tr, EngineConfig(size_limit=3))


def test_tau_sparsifies_but_keeps_diagonal():
    tr = tr_from_dense([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    st, _, _ = compute_similarities(tr, EngineConfig(tau=0.9))
    assert st.is_sparse
    dense = st.to_dense()
    assert np.all(np.diag(dense) == 1.0)
    off = dense[~np.eye(3, dtype=bool)]
    assert np.all((off == 0) | (off >= 0.9))


def test_pairs_upper_triangle():
    sim = SimilarityMatrix(np.array([[1.0, 0.2], [0.2, 1.0]]))
    assert list(sim.pairs()) == [(0, 0, 1.0), (0, 1, 0.2), (1, 1, 1.0)]
    sparse = SimilarityMatrix.from_dense(sim.to_dense(), tau=0.5)
    assert list(sparse.pairs()) == [(0, 0, 1.0), (1, 1, 1.0)]


def test_results_independent_of_threads():
    tr = random_tr(np.random.default_rng(9))
    a = compute_similarities(tr, EngineConfig(tau=0.0), threads=1)
    b = compute_similarities(tr, EngineConfig(tau=0.0), threads=3)
    assert np.array_equal(a[0].to_dense(), b[0].to_dense())
    assert a[2].steps == b[2].steps


@pytest.mark.slow
def test_synthetic_convergence_and_delta_shape():
    tr = build_tag_resource_matrix(generate_synthetic(SynthSpec()))
    _, _, trace = compute_similarities(tr, EngineConfig(epsilon=1e-3, max_iters=10))
    deltas = [(dt, dr) for _, dt, dr in trace.steps]
    first_below = next(k for k, (dt, dr) in enumerate(deltas, start=1) if dt < 0.1 and dr < 0.1)
    assert first_below <= 6
    dts = [dt for dt, _ in deltas]
    # delta_t shrinks over every two steps but zig-zags between odd and even ones
    assert all(dts[i + 2] < dts[i] for i in range(1, len(dts) - 2))
    assert any(dts[i + 1] > dts[i] for i in range(1, len(dts) - 1))
