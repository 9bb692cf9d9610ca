from __future__ import annotations

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folksim.corpus import (
    CorpusError,
    build_tag_resource_matrix,
    corpus_stats,
    from_triples,
    group_bookmarks,
    ingest_assignments,
    inverse_resource_frequency,
    read_assignments,
    tag_count,
    write_assignments,
)

from conftest import tr_from_dense


def test_ingest_tiny(tiny):
    assert (tiny.n_u, tiny.n_r, tiny.n_t, len(tiny.assignments)) == (2, 1, 2, 3)
    assert tiny.tags == ("java", "code")


def test_duplicate_lines_collapse():
    f = ingest_assignments(["u1\tr1\tjava", "u1\tr1\tjava"])
    assert len(f.assignments) == 1


def test_comments_blank_lines_and_extra_fields():
    f = ingest_assignments(["# header", "", "u1\tr1\tjava\t2009-01-01"])
    assert f.tags == ("java",)


def test_short_line_names_line_number():
    with pytest.raises(CorpusError, match="line 1"):
        ingest_assignments(["u1\tr1"])
    with pytest.raises(CorpusError, match="line 2"):
        ingest_assignments(["u1\tr1\tt", "oops"])


def test_empty_corpus():
    with pytest.raises(CorpusError, match="empty corpus"):
        ingest_assignments(["# nothing"])


def test_tags_are_case_sensitive():
    f = ingest_assignments(["u\tr\tJava", "u\tr\tjava"])
    assert f.n_t == 2


def test_tr_counts_distinct_users(tiny):
    tr = build_tag_resource_matrix(tiny)
    java, code = tiny.tag_index()["java"], tiny.tag_index()["code"]
    assert tr.entry(java, 0) == 2
    assert tr.entry(code, 0) == 1


def test_tr_single_assignment():
    tr = build_tag_resource_matrix(ingest_assignments(["u\tr\tt"]))
    assert tr.matrix.toarray().tolist() == [[1]]


def test_tr_two_users_two_resources():
    f = from_triples([("u1", "r1", "t"), ("u1", "r2", "t"), ("u2", "r1", "t"), ("u2", "r2", "t")])
    assert build_tag_resource_matrix(f).matrix.toarray().tolist() == [[2, 2]]


def test_group_bookmarks(tiny):
    bms = group_bookmarks(tiny)
    java, code = tiny.tag_index()["java"], tiny.tag_index()["code"]
    assert [(b.user, b.resource, b.tags) for b in bms] == [(0, 0, frozenset({java, code})), (1, 0, frozenset({java}))]


def test_group_bookmarks_user_with_two_resources():
    f = from_triples([("u", "r1", "a"), ("u", "r2", "a"), ("u", "r1", "b")])
    assert len(group_bookmarks(f)) == 2


def test_tag_count():
    tr = tr_from_dense([[2, 1, 0], [0, 0, 0]])
    assert tag_count(tr, 0) == 3
    assert tag_count(tr, 1) == 0
    with pytest.raises(IndexError):
        tag_count(tr, 2)


@pytest.mark.parametrize(
    "n_r, df, expected",
    [(1000, 10, 4.605170), (8, 2, 1.386294), (5, 5, 0.0)],
)
def test_inverse_resource_frequency(n_r, df, expected):
    row = [1] * df + [0] * (n_r - df)
    tr = tr_from_dense([row, [1] * n_r])
    assert inverse_resource_frequency(tr, 0) == pytest.approx(expected, abs=1e-6)


def test_irf_unused_tag():
    tr = tr_from_dense([[1, 1], [0, 0]])
    with pytest.raises(CorpusError, match="tag unused"):
        inverse_resource_frequency(tr, 1)


def test_stats_tiny(tiny):
    s = corpus_stats(tiny, build_tag_resource_matrix(tiny))
    assert s["n_t"] == 2
    assert s["distinct_tags_per_resource"] == {"1": 0, "2": 1, "3": 0, "4": 0, ">=5": 0}


def test_stats_single_assignment():
    f = ingest_assignments(["u\tr\tt"])
    s = corpus_stats(f, build_tag_resource_matrix(f))
    assert s["distinct_tags_per_resource"]["1"] == 1
    assert s["uses_per_tag"]["1"] == 1


def test_round_trip(tmp_path, synonym_corpus):
    path = tmp_path / "c.tsv"
    with open(path, "w", encoding="utf-8") as fh:
        write_assignments(synonym_corpus, fh)
    back = read_assignments(path)
    assert (back.users, back.resources, back.tags) == (synonym_corpus.users, synonym_corpus.resources, synonym_corpus.tags)
    assert np.array_equal(back.assignments, synonym_corpus.assignments)


triples = st.lists(
    st.tuples(st.sampled_from("abc"), st.sampled_from("pqrs"), st.sampled_from(["x", "y", "z", "w"])),
    min_size=1,
    max_size=40,
)


@settings(max_examples=60, deadline=None)
@given(triples)
def test_sums_match_assignment_count(ts):
    f = from_triples(ts)
    tr = build_tag_resource_matrix(f)
    assert tr.matrix.sum() == len(f.assignments) == len(set(ts))
    assert sum(len(b.tags) for b in group_bookmarks(f)) == len(f.assignments)
    buf = io.StringIO()
    write_assignments(f, buf)
    again = ingest_assignments(buf.getvalue().splitlines())
    assert again.tags == f.tags and np.array_equal(again.assignments, f.assignments)


def test_popularity_vector_matches_scalar_formula():
    tr = tr_from_dense([[3, 2, 0, 0], [1, 0, 0, 0], [1, 1, 1, 1]])
    pop = tr.popularity_vector()
    assert pop[0] == pytest.approx(math.log(5) * math.log(4 / 2))
    assert pop[1] == 0.0
    assert pop[2] == 0.0


