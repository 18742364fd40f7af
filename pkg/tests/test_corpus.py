import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcrsa.corpus import (
    CSV_COLUMNS, FormatError, entropy_h0, entropy_hk, gen_dna, gen_random, read_raw8,
    read_sequence, read_u32le, report, reports_csv, write_raw8, write_sequence, write_u32le,
)


def test_gen_dna_basics():
    base = [0, 1, 2, 3, 1]
    S = gen_dna(base, 7, 0.0, seed=1)
    assert S.tolist() == base * 7
    flip = gen_dna([0, 1, 1, 0], 3, 1.0, seed=1, sigma=2)
    assert flip.tolist() == [1, 0, 0, 1] * 3
    assert (gen_dna(base, 50, 0.1, seed=9) == gen_dna(base, 50, 0.1, seed=9)).all()
    with pytest.raises(ValueError):
        gen_dna([], 3, 0.1)
    with pytest.raises(ValueError):
        gen_dna(base, 3, 1.5)
    with pytest.raises(ValueError):
        gen_dna([300], 3, 0.1)


def test_gen_dna_mutation_rate():
    rng = np.random.default_rng(0)
    base = rng.integers(0, 4, 10000)
    p = 0.01
    S = gen_dna(base, 20, p, seed=42)
    k = int((S != np.tile(base, 20)).sum())
    n = S.size
    sd = math.sqrt(n * p * (1 - p))
    assert abs(k - n * p) <= 3 * sd
    assert set(np.unique(S).tolist()) <= {0, 1, 2, 3}


def test_entropy_examples():
    assert entropy_h0("aabb") == 1.0
    assert entropy_h0([5] * 10) == 0.0
    assert entropy_hk("abababab", 1) == 0.0
    assert entropy_h0(gen_random(10 ** 6, 4, seed=1)) == pytest.approx(2.0, abs=0.01)
    with pytest.raises(ValueError):
        entropy_hk([0, 1], 4)
    with pytest.raises(ValueError):
        entropy_hk([0, 1], -1)


def test_hk_direct_formula():
    S = [0, 1, 1, 0, 1, 2, 0, 1, 1, 2]
    # H_1 by hand: contexts 0 -> [1,1,1], 1 -> [1,0,2,1,2], 2 -> [0]
    h = (5 * (-(2 / 5) * math.log2(2 / 5) * 2 - (1 / 5) * math.log2(1 / 5))) / len(S)
    assert entropy_hk(S, 1) == pytest.approx(h)
    assert entropy_hk(S, 0) == entropy_h0(S)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=300))
def test_entropy_chain(S):
    h = [entropy_hk(S, k) for k in range(4)]
    sigma = len(set(S))
    assert h[0] <= math.log2(sigma) + 1e-9 if sigma > 1 else h[0] == 0
    for a, b in zip(h, h[1:]):
        assert b <= a + 1e-9
    assert h[-1] >= 0


def test_report():
    rng = np.random.default_rng(1)
    base = rng.integers(0, 4, 20000)
    rep = report(gen_dna(base, 30, 0.0001, seed=1))
    assert rep.repair_bps < 0.15 * rep.h0
    assert rep.bwt_runs_ratio < 0.2
    for sigma in (4, 16, 256):
        r = report(gen_random(30000, sigma, seed=2))
        assert math.log2(sigma) <= r.repair_bps <= 2 * math.log2(sigma)
    one = report([3] * 500)
    assert one.h0 == 0.0 and one.sigma == 1


def test_repair_trend_small():
    base = np.random.default_rng(7).integers(0, 4, 20000)
    bps = [report(gen_dna(base, 20, p, seed=3)).repair_bps for p in (1e-5, 1e-4, 1e-3, 1e-2)]
    assert bps == sorted(bps) and len(set(bps)) == 4


def test_csv():
    rows = [("b", report([0, 1] * 50)), ("a", report([2] * 10))]
    text = reports_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert CSV_COLUMNS == ("dataset", "n", "sigma", "h0", "h1", "h2", "h3", "repair_bps", "bwt_runs_ratio")
    assert [ln.split(",")[0] for ln in lines[1:]] == ["b", "a"]
    assert lines[2].split(",")[1:4] == ["10", "1", "0.000000"]


def test_formats(tmp_path):
    S = np.array([0, 5, 255, 3])
    write_raw8(tmp_path / "a.raw", S)
    assert read_raw8(tmp_path / "a.raw").tolist() == S.tolist()
    with pytest.raises(FormatError):
        write_raw8(tmp_path / "b.raw", [256])
    big = np.array([0, 70000, 2 ** 31 - 1])
    write_u32le(tmp_path / "c.u32", big)
    data = (tmp_path / "c.u32").read_bytes()
    assert data[:4] == b"GCSQ" and len(data) == 16 + 12
    assert read_u32le(tmp_path / "c.u32").tolist() == big.tolist()
    for fmt in ("raw8", "u32le"):
        write_sequence(tmp_path / f"x.{fmt}", S, fmt)
        assert read_sequence(tmp_path / f"x.{fmt}", fmt).tolist() == S.tolist()
    with pytest.raises(ValueError):
        read_sequence(tmp_path / "x.raw8", "nope")


def test_u32le_errors(tmp_path):
    p = tmp_path / "bad.u32"
    p.write_bytes(b"GCS")
    with pytest.raises(FormatError):
        read_u32le(p)
    p.write_bytes(b"XXXX" + bytes(12))
    with pytest.raises(FormatError):
        read_u32le(p)
    write_u32le(p, [1, 2, 3])
    p.write_bytes(p.read_bytes()[:-2])
    with pytest.raises(FormatError):
        read_u32le(p)
    write_u32le(p, [1, 2, 3], sigma=10)
    data = bytearray(p.read_bytes())
    data[12:16] = (2).to_bytes(4, "little")  # declared sigma smaller than a symbol
    p.write_bytes(bytes(data))
    with pytest.raises(FormatError):
        read_u32le(p)
