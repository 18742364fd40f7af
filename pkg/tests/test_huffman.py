import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcrsa.huffman import balanced_code, build_binary, build_kary


def _h0(freqs):
    t = sum(freqs.values())
    return -sum(f / t * math.log2(f / t) for f in freqs.values() if f)


def _prefix_free(T):
    words = [tuple(T.digits(a)) for a in T.symbols]
    for u in words:
        for v in words:
            if u != v and v[: len(u)] == u:
                return False
    return True


def test_examples():
    assert build_binary({"a": 1, "b": 1}).lengths == {"a": 1, "b": 1}
    T = build_binary({"a": 4, "b": 2, "c": 1, "d": 1})
    assert [T.lengths[s] for s in "abcd"] == [1, 2, 3, 3]
    assert build_binary({"x": 7}).lengths == {"x": 1}


def test_errors():
    with pytest.raises(ValueError):
        build_binary({})
    with pytest.raises(ValueError):
        build_binary({"a": 0})
    with pytest.raises(ValueError):
        build_kary({"a": 1}, 3)


def test_decode():
    T = build_binary({"a": 4, "b": 2, "c": 1, "d": 1})
    digits = [d for s in "abcadb" for d in T.digits(s)]
    assert T.decode(digits) == list("abcadb")
    with pytest.raises(ValueError):
        T.decode(T.digits("c")[:-1])


freq_maps = st.dictionaries(st.integers(0, 300), st.integers(1, 1000), min_size=1, max_size=60)


@given(freq_maps)
def test_binary_optimality_bounds(freqs):
    T = build_binary(freqs)
    assert _prefix_free(T)
    avg = T.average_length(freqs)
    h = _h0(freqs)
    if len(freqs) > 1:
        assert h - 1e-9 <= avg < h + 1
        assert abs(T.kraft_sum() - 1) < 1e-12
    # canonical: more frequent symbols never get longer codes
    for a in freqs:
        for b in freqs:
            if freqs[a] > freqs[b]:
                assert T.lengths[a] <= T.lengths[b]


@given(freq_maps, st.sampled_from([4, 16]))
def test_kary(freqs, k):
    T = build_kary(freqs, k)
    assert _prefix_free(T)
    assert T.kraft_sum() <= 1 + 1e-12
    assert all(0 <= d < k for a in T.symbols for d in T.digits(a))
    b = k.bit_length() - 1
    # k-ary Huffman: average digits within one of the base-k entropy
    assert T.average_length(freqs) < _h0(freqs) / b + 1 + 1e-9


def test_kary_dummy_count():
    # 5 symbols, arity 4: two dummies pad to 7 = 1 + 2*3 leaves, so the first merge
    # takes both dummies and two symbols, and the root is full
    T = build_kary({i: 1 for i in range(5)}, 4)
    assert sorted(T.lengths.values()) == [1, 1, 1, 2, 2]


def test_balanced_code():
    T = balanced_code(range(1, 9), 2)
    assert set(T.lengths.values()) == {3}
    assert T.digits(6) == [1, 0, 1]
    T4 = balanced_code(range(1, 9), 4)
    assert set(T4.lengths.values()) == {2}
    assert balanced_code([5], 2).lengths == {5: 1}
