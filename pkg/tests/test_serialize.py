import struct
import zlib

import numpy as np
import pytest

from gcrsa.fmindex import FmIndex
from gcrsa.serialize import MAGIC, ContainerError, dumps, load, loads, read_tag, save
from gcrsa.structures import SEQUENCE_TAGS, build_structure, structure_tag

from conftest import SMALL_GCC, gen_sequence

VARIANTS = [(t, "plain") for t in SEQUENCE_TAGS] + [
    ("WT", "rrr"), ("WM", "delta"), ("WTH", "gcc"), ("WMH", "gcc"), ("MWTH", "gcc"), ("WM", "rrr"),
]


def _queries(obj, S, rng, q=1000):
    n = S.size
    idx = rng.integers(1, n + 1, q)
    syms = S[rng.integers(0, n, q)]
    js = (rng.random(q) * (np.bincount(S, minlength=syms.max() + 1)[syms] + 1)).astype(np.int64)
    return obj.access_many(idx), obj.rank_many(syms, idx), obj.select_many(syms, js)


@pytest.mark.parametrize("tag,backend", VARIANTS)
def test_roundtrip(tag, backend, tmp_path):
    rng = np.random.default_rng(3)
    S = gen_sequence(rng, 4000, 64, "rep")
    obj = build_structure(tag, S, backend=backend, **SMALL_GCC)
    size = save(obj, tmp_path / "x.gcrs")
    assert size == (tmp_path / "x.gcrs").stat().st_size
    assert read_tag(tmp_path / "x.gcrs") == tag == structure_tag(obj)
    back = load(tmp_path / "x.gcrs")
    for a, b in zip(_queries(obj, S, np.random.default_rng(1)), _queries(back, S, np.random.default_rng(1))):
        assert (a == b).all()
    assert back.size_in_bits() == obj.size_in_bits()
    assert dumps(back) == dumps(obj)


def test_fm_roundtrip():
    rng = np.random.default_rng(4)
    T = gen_sequence(rng, 3000, 4, "rep")
    F = FmIndex(T, "GCC_N", **SMALL_GCC)
    G = loads(dumps(F))
    pats = [T[s:s + 6] for s in rng.integers(0, T.size - 6, 300)]
    assert (F.count_many(pats) == G.count_many(pats)).all()
    assert (G.invert() == T).all()


def test_layout_and_errors():
    obj = build_structure("GCC_N", [0, 1, 0, 1, 2] * 20, s=8)
    data = dumps(obj)
    assert data[:4] == MAGIC
    version, tl = struct.unpack("<HB", data[4:7])
    assert version == 1 and data[7:7 + tl] == b"GCC_N"
    (k,) = struct.unpack("<Q", data[7 + tl:15 + tl])
    assert len(data) == 15 + tl + k + 4
    assert struct.unpack("<I", data[-4:])[0] == zlib.crc32(data[15 + tl:-4])

    bad = bytearray(data)
    bad[len(data) // 2] ^= 0x40
    with pytest.raises(ContainerError, match="checksum"):
        loads(bytes(bad))
    with pytest.raises(ContainerError):
        loads(b"XXXX" + data[4:])
    with pytest.raises(ContainerError):
        loads(data[:-1])
    with pytest.raises(ContainerError):
        loads(data + b"\0")
    with pytest.raises(ContainerError):
        loads(data[:4] + struct.pack("<H", 9) + data[6:])
    wrong_tag = data[:7] + b"GCC_C" + data[12:]
    with pytest.raises(ContainerError, match="tag"):
        loads(wrong_tag)


def test_refuses_foreign_classes():
    obj = build_structure("WT", [0, 1, 2, 3] * 5)
    data = dumps(obj)
    tl = data[6]
    head, payload = data[:15 + tl], data[15 + tl:-4]
    mod = b"gcrsa.wavelet"
    assert mod in payload
    forged = payload.replace(mod, b"os.path.joinx", 1)  # same length, outside the package
    with pytest.raises(ContainerError, match="refusing"):
        loads(head + forged + struct.pack("<I", zlib.crc32(forged)))
