import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcrsa.base import RangeError
from gcrsa.gcc import GccConfig, GccIndex
from gcrsa.repair import Grammar, compress, decompress

from conftest import check_rsa, gen_sequence

EX = [0, 1, 0, 0, 1, 0, 1, 0]  # [1,2,1,1,2,1,2,1] with 0-based symbols


@pytest.mark.parametrize("sampling", ["N", "C"])
def test_examples(sampling):
    G = GccIndex(EX, sampling=sampling, s=4, delta=0)
    assert G.rank(1, 5) == 2
    assert G.access(4) == 0
    assert G.select(0, 3) == 4
    for a in (0, 1):
        assert G.rank(a, 0) == 0 and G.select(a, 0) == 0


def test_errors():
    G = GccIndex(EX, s=4)
    with pytest.raises(RangeError):
        G.access(9)
    with pytest.raises(RangeError):
        G.rank(0, 9)
    with pytest.raises(RangeError):
        G.select(1, 4)
    with pytest.raises(RangeError):
        G.resolve(99)
    with pytest.raises(ValueError):
        GccConfig(sampling="X")
    with pytest.raises(ValueError):
        GccIndex()


def test_resolve_examples():
    G = GccIndex([0, 1], s=4, delta=0)
    assert G.resolve_length(0) == 1 and G.resolve_count(0, 0) == 1 and G.resolve_count(0, 1) == 0
    # [0,1] alone has no repeated pair, so the rule 2 -> (0,1) is given explicitly
    H = GccIndex(grammar=Grammar(2, np.array([[0, 1]]), np.array([2]), 2), delta=1)
    assert H.resolve_count(2, 1) == 1 and H.resolve_length(2) == 2
    chain = Grammar(1, np.array([[0, 0], [1, 1]]), np.array([2]), 4)
    for d in (0, 1, 2):
        R = GccIndex(grammar=chain, delta=d, s=2)
        assert R.resolve_length(2) == 4
        assert [R.rank(0, i) for i in range(5)] == [0, 1, 2, 3, 4]


def test_counters_sum_to_lengths():
    S = [0, 1, 0, 0, 1, 0, 1, 0] * 8
    G = GccIndex(S, s=4, delta=0)
    g = G.grammar
    assert decompress(g).tolist() == S
    for x in range(g.sigma, g.sigma + g.num_rules):
        ln = G.resolve_length(x)
        assert sum(G.resolve_count(x, a) for a in range(g.sigma)) == ln
        # by full expansion of the single rule
        exp = decompress(Grammar(g.sigma, g.rules, np.array([x]), ln))
        assert ln == exp.size
        for a in range(g.sigma):
            assert G.resolve_count(x, a) == int((exp == a).sum())


def test_single_symbol_runs():
    S = [3] * 1000
    for sampling in "NC":
        G = GccIndex(S, sampling=sampling, s=64)
        idx = np.arange(1001)
        assert (G.rank_many(np.full(1001, 3), idx) == idx).all()
        assert G.count(3) == 1000 and G.count(0) == 0
        check_rsa(G, S, sigma=4, queries=500)


@pytest.mark.parametrize("delta", [1, 2, 4])
def test_delta_budget(delta, rng):
    S = gen_sequence(rng, 20000, 4, "rep")
    G = GccIndex(S, delta=delta, s=256)
    nr = G.grammar.num_rules
    xs = rng.integers(0, G.sigma + nr, size=2000)
    for x in xs:
        ln, ct, visits = G.resolve(int(x), int(rng.integers(0, 4)))
        assert visits <= 2 * delta
    assert G.resolve(G.sigma + nr - 1)[2] <= 2 * delta


def test_delta_zero_samples_everything(rng):
    S = gen_sequence(rng, 5000, 4, "rep")
    G = GccIndex(S, delta=0)
    assert G.num_sampled == G.grammar.num_rules
    assert all(G.resolve(x)[2] == 0 for x in range(G.sigma + G.grammar.num_rules))


CONFIGS = [
    dict(sampling="N", s=s, sprime=sp, delta=d)
    for s, sp, d in itertools.product([64, 1024], [5, 8], [0, 1, 2, 4])
] + [dict(sampling="C", s=s, delta=d) for s, d in itertools.product([64, 1024], [0, 1, 2, 4])]


@pytest.mark.parametrize("cfg", CONFIGS, ids=lambda c: "-".join(f"{k}{v}" for k, v in c.items()))
def test_oracle_configs(cfg, rng):
    for kind, n, sigma in [("rep", 3000, 4), ("random", 400, 16), ("zipf", 2000, 256), ("rep", 300, 2)]:
        S = gen_sequence(rng, n, sigma, kind)
        G = GccIndex(S, sigma=sigma, **cfg)
        check_rsa(G, S, sigma=sigma, queries=None if n <= 512 else 1000, rng=rng)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=300), st.sampled_from([1, 3, 16]))
def test_hypothesis_exhaustive(S, s):
    for sampling in "NC":
        check_rsa(GccIndex(S, sampling=sampling, s=s, sprime=2, delta=1, sigma=6), S, sigma=6)


def test_n_and_c_agree(rng):
    S = gen_sequence(rng, 8000, 16, "rep")
    a = GccIndex(S, sampling="N", s=128)
    b = GccIndex(S, sampling="C", s=16)
    q = rng.integers(1, S.size + 1, 1000)
    syms = S[q - 1]
    assert (a.access_many(q) == b.access_many(q)).all()
    assert (a.rank_many(syms, q) == b.rank_many(syms, q)).all()
    js = np.minimum(q, a.counts(syms))
    assert (a.select_many(syms, js) == b.select_many(syms, js)).all()


def test_identities(rng):
    S = gen_sequence(rng, 3000, 8, "rep")
    G = GccIndex(S, s=64)
    for a in range(8):
        tot = G.count(a)
        js = np.arange(tot + 1)
        assert (G.rank_many(np.full(js.size, a), G.select_many(np.full(js.size, a), js)) == js).all()
    i = np.arange(S.size + 1)
    assert sum(G.rank_many(np.full(i.size, a), i) for a in range(8)).tolist() == i.tolist()


def test_space(rng):
    base = rng.integers(0, 4, 500)
    S = np.tile(base, 20)
    S[rng.random(S.size) < 0.001] = 0
    G = GccIndex(S)
    parts = G.space_breakdown()
    assert parts["total"] == sum(v for k, v in parts.items() if k != "total")
    assert G.size_in_bits() < 2 * S.size
    one = GccIndex([0] * 100, sigma=1)
    assert one.space_breakdown()["counters"] == 0


def test_c_sampling_independent_of_padding():
    # GCC.C samples C, so a longer sequence with the same C length costs the same samples
    a = GccIndex([0, 1] * 64, sampling="C", s=1)
    b = GccIndex([0, 1] * 256, sampling="C", s=1)
    assert a.grammar.c == b.grammar.c
    assert a.space_breakdown()["samples"] <= b.space_breakdown()["samples"]
    assert a._ns == b._ns


def test_decode_and_opt_dac(rng):
    S = gen_sequence(rng, 4000, 32, "zipf")
    G = GccIndex(S, dac="opt")
    assert (G.decode() == S).all()
    check_rsa(G, S, sigma=32, queries=500, rng=rng)


def test_precomputed_grammar(rng):
    S = gen_sequence(rng, 2000, 4, "rep")
    g = compress(S)
    check_rsa(GccIndex(grammar=g, s=32), S, sigma=4, queries=300, rng=rng)
