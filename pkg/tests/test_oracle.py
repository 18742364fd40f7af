import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcrsa.oracle import (
    NaiveRsa, naive_access, naive_access_many, naive_bwt, naive_count, naive_count_many, naive_rank,
    naive_rank_many, naive_select, naive_select_many, naive_suffix_array,
)

seqs = st.lists(st.integers(0, 5), min_size=1, max_size=40)


def test_boundaries():
    S = [1, 0, 1, 1, 0]
    for a in (0, 1, 7):
        assert naive_rank(S, a, 0) == 0
        assert naive_select(S, a, 0) == 0


def test_definitions():
    S = [1, 0, 1, 1, 0]
    assert naive_access(S, 4) == 1
    assert naive_rank(S, 1, 3) == 2
    assert naive_select(S, 0, 2) == 5
    with pytest.raises(IndexError):
        naive_select(S, 0, 3)
    with pytest.raises(IndexError):
        naive_access(S, 0)


def test_count_overlapping():
    assert naive_count("aaaa", "aa") == 3
    assert naive_count("abracadabra", "abra") == 2
    assert naive_count("abc", "zz") == 0
    with pytest.raises(ValueError):
        naive_count("abc", "")


def test_suffix_array_and_bwt():
    assert naive_suffix_array("banana") == [5, 3, 1, 0, 4, 2]
    t = [ord(c) for c in "abracadabra"]
    L = naive_bwt(t)
    assert "".join("$" if x == 0 else chr(x - 1) for x in L) == "ard$rcaaaabb"


@given(seqs, st.data())
def test_batch_forms_agree_with_scalar(S, data):
    n = len(S)
    idx = data.draw(st.lists(st.integers(1, n), min_size=1, max_size=10))
    assert list(naive_access_many(S, idx)) == [naive_access(S, i) for i in idx]
    qs = data.draw(st.lists(st.tuples(st.integers(0, 6), st.integers(0, n)), min_size=1, max_size=10))
    a, i = zip(*qs)
    assert list(naive_rank_many(S, a, i)) == [naive_rank(S, x, y) for x, y in qs]
    ref = NaiveRsa(S)
    for x, y in qs:
        assert ref.rank(x, y) == naive_rank(S, x, y)
        tot = naive_rank(S, x, n)
        j = min(y, tot)
        assert ref.select(x, j) == naive_select(S, x, j) == naive_select_many(S, [x], [j])[0]


@given(seqs)
def test_evaluation_order_irrelevant(S):
    n = len(S)
    qs = [(a, i) for a in range(6) for i in range(n + 1)]
    fwd = [naive_rank(S, a, i) for a, i in qs]
    bwd = [naive_rank(S, a, i) for a, i in reversed(qs)][::-1]
    assert fwd == bwd


@given(st.lists(st.integers(0, 2), min_size=1, max_size=60),
       st.lists(st.lists(st.integers(0, 2), min_size=1, max_size=4), min_size=1, max_size=8))
def test_count_many(T, pats):
    assert list(naive_count_many(T, pats)) == [naive_count(T, p) for p in pats]
