"""Bitmaps with rank/select: plain with counters (CM), RRR and sparse DELTA."""

from __future__ import annotations

import bisect
from math import comb

import numpy as np

from . import _kernels as K
from .base import RangeError, RsaSequence
from .bitio import BitBuffer, bits_needed, decode_delta

__all__ = ["PlainBitmap", "RrrBitmap", "DeltaBitmap", "BITMAP_KINDS", "make_bitmap"]


def _as_bits(bits) -> np.ndarray:
    b = np.asarray(bits)
    if b.dtype != np.bool_:
        if b.size and (b.min() < 0 or b.max() > 1):
            raise ValueError("bitmap values must be 0 or 1")
        b = b.astype(np.bool_)
    return b.ravel()


def _to_words(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits, bitorder="little")
    pad = (-packed.size) % 8
    if pad or packed.size == 0:
        packed = np.concatenate([packed, np.zeros(pad or 8, dtype=np.uint8)])
    return packed.view("<u8").astype(np.uint64)


def _select_in_word(word: int, k: int) -> int:
    for _ in range(k - 1):
        word &= word - 1
    return (word & -word).bit_length() - 1


class _Bitmap(RsaSequence):
    """Shared bitmap surface: symbol-generic hooks routed to rank1/select1."""

    ones = 0
    sigma = 2

    def _count_many(self, syms):
        return np.where(syms == 1, self.ones, self.n - self.ones).astype(np.int64)

    def _rank_many(self, syms, idx):
        r1 = self.rank1_many(idx)
        return np.where(syms == 1, r1, idx - r1)

    def rank1_many(self, idx) -> np.ndarray:
        return np.array([self.rank1(int(i)) for i in idx], dtype=np.int64)

    def _check_symbol(self, b) -> None:
        if b not in (0, 1):
            raise RangeError(f"bitmap symbol must be 0 or 1, got {b}")

    def count(self, b) -> int:
        return self.ones if b else self.n - self.ones

    def _rank(self, b, i):
        r = self.rank1(i)
        return r if b else i - r

    def _select(self, b, j):
        return self.select1(j) if b else self.select0(j)

    def rank1(self, i: int) -> int:
        raise NotImplementedError

    def select1(self, j: int) -> int:
        raise NotImplementedError

    def select0(self, j: int) -> int:
        raise NotImplementedError

    def to_bits(self) -> np.ndarray:
        return np.array([self._access(i) for i in range(self.n)], dtype=np.uint8)

    def decode(self) -> np.ndarray:
        return self.to_bits().astype(np.int64)

    def _access_many(self, idx):
        return self.to_bits().astype(np.int64)[idx]


class PlainBitmap(_Bitmap):
    """Uncompressed bitmap plus one level of absolute counters every 512 bits."""

    kind = "plain"

    def __init__(self, bits=(), *, _words=None, _n=None):
        if _words is None:
            b = _as_bits(bits)
            self.n = int(b.size)
            self.words = _to_words(b)
        else:
            self.n = int(_n)
            self.words = np.asarray(_words, dtype=np.uint64)
        self.supers = K.build_supers(self.words, self.n)
        self._w = self.words.tolist()
        self._s = self.supers.tolist()
        self.ones = self._s[-1]
        nsup = self.n // K.SUPER_BITS + 1
        self._nsup = nsup
        self._z = [k * K.SUPER_BITS - self._s[k] for k in range(nsup)]

    @classmethod
    def from_words(cls, words, n):
        return cls(_words=words, _n=n)

    def _access(self, i):
        return (self._w[i >> 6] >> (i & 63)) & 1

    def rank1(self, i: int) -> int:
        sb = i >> 9
        r = self._s[sb]
        w = self._w
        end = i >> 6
        for k in range(sb << 3, end):
            r += w[k].bit_count()
        rem = i & 63
        if rem:
            r += (w[end] & ((1 << rem) - 1)).bit_count()
        return r

    def select1(self, j: int) -> int:
        sb = bisect.bisect_left(self._s, j, 0, self._nsup) - 1
        r = self._s[sb]
        w = self._w
        k = sb << 3
        while True:
            c = w[k].bit_count()
            if r + c >= j:
                return (k << 6) + _select_in_word(w[k], j - r)
            r += c
            k += 1

    def select0(self, j: int) -> int:
        sb = bisect.bisect_left(self._z, j) - 1
        r = self._z[sb]
        w = self._w
        k = sb << 3
        mask = (1 << 64) - 1
        while True:
            inv = ~w[k] & mask
            c = inv.bit_count()
            if r + c >= j:
                return (k << 6) + _select_in_word(inv, j - r)
            r += c
            k += 1

    def to_bits(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return bits[: self.n]

    def rank1_many(self, idx):
        return K.plain_rank1_many(self.words, self.supers, idx)

    def _access_many(self, idx):
        return K.plain_access_many(self.words, idx)

    def _select_many(self, syms, js):
        return K.plain_select_many(self.words, self.supers, self._nsup, syms, js)

    def size_in_bits(self) -> int:
        return self.words.size * 64 + self.supers.size * bits_needed(self.n)

    def kernel_arrays(self):
        return self.words, self.supers


# --- RRR -------------------------------------------------------------------

RRR_BLOCK = 15
_RRR_VALUES = np.arange(1 << RRR_BLOCK, dtype=np.int64)
_RRR_POP = np.array([bin(v).count("1") for v in range(1 << RRR_BLOCK)], dtype=np.int64)
# offsets enumerate each class in increasing numeric order
_RRR_DECODE = [[] for _ in range(RRR_BLOCK + 1)]
_RRR_OFFSET = np.zeros(1 << RRR_BLOCK, dtype=np.int64)
for _v in range(1 << RRR_BLOCK):
    _c = int(_RRR_POP[_v])
    _RRR_OFFSET[_v] = len(_RRR_DECODE[_c])
    _RRR_DECODE[_c].append(_v)
_RRR_WIDTH = [(comb(RRR_BLOCK, c) - 1).bit_length() for c in range(RRR_BLOCK + 1)]
_RRR_WIDTH_NP = np.array(_RRR_WIDTH, dtype=np.int64)
_RRR_DEC_FLAT = np.concatenate([np.array(d, dtype=np.uint16) for d in _RRR_DECODE])
_RRR_CSTART = np.concatenate([[0], np.cumsum([len(d) for d in _RRR_DECODE])[:-1]]).astype(np.int64)


def _get_field(words, pos, width):
    if width == 0:
        return 0
    idx, sh = pos >> 6, pos & 63
    v = words[idx] >> sh
    if sh + width > 64:
        v |= words[idx + 1] << (64 - sh)
    return v & ((1 << width) - 1)


class RrrBitmap(_Bitmap):
    """Block-compressed bitmap: 15-bit blocks as (class, offset) pairs.

    ``sample`` is the number of blocks per superblock; each superblock stores
    its absolute rank and the bit position of its first offset.
    """

    kind = "rrr"

    def __init__(self, bits=(), sample: int = 32):
        if sample < 1:
            raise ValueError("sample must be positive")
        b = _as_bits(bits)
        self.n = int(b.size)
        self.sample = sample
        nb = -(-self.n // RRR_BLOCK)
        padded = np.zeros(nb * RRR_BLOCK, dtype=np.int64)
        padded[: self.n] = b
        blocks = (padded.reshape(nb, RRR_BLOCK) << np.arange(RRR_BLOCK)).sum(axis=1)
        classes = _RRR_POP[blocks]
        offsets = _RRR_OFFSET[blocks]
        widths = _RRR_WIDTH_NP[classes]
        self._init_from(classes, offsets, widths)

    def _init_from(self, classes, offsets, widths):
        nb = classes.size
        self.nblocks = nb
        starts = np.zeros(nb + 1, dtype=np.int64)
        np.cumsum(widths, out=starts[1:])
        self.offset_bits = int(starts[-1])
        self.offset_words = K.pack_var_fields(offsets.astype(np.uint64), starts)
        ranks = np.zeros(nb + 1, dtype=np.int64)
        np.cumsum(classes, out=ranks[1:])
        sb_idx = np.arange(0, nb + 1, self.sample)
        if sb_idx[-1] != nb:
            sb_idx = np.append(sb_idx, nb)
        self.sb_rank = ranks[sb_idx]
        self.sb_ptr = starts[sb_idx]
        self.classes = classes.astype(np.uint8)
        self.ones = int(ranks[-1])
        self._cls = self.classes.tolist()
        self._ow = self.offset_words.tolist()
        self._sr = self.sb_rank.tolist()
        self._sp = self.sb_ptr.tolist()
        self._sz = [k * self.sample * RRR_BLOCK - r for k, r in enumerate(self._sr)]
        self._k = (self.classes, self.offset_words, self.sb_rank.astype(np.int64),
                   self.sb_ptr.astype(np.int64), np.int64(self.sample), _RRR_WIDTH_NP,
                   _RRR_DEC_FLAT, _RRR_CSTART, np.int64(nb))

    def rank1_many(self, idx):
        return K.rrr_rank1_many(self._k, idx)

    def _access_many(self, idx):
        return K.rrr_access_many(self._k, idx)

    def _select_many(self, syms, js):
        return K.rrr_select_many(self._k, syms, js)

    def _block(self, blk, ptr):
        c = self._cls[blk]
        return _RRR_DECODE[c][_get_field(self._ow, ptr, _RRR_WIDTH[c])]

    def _seek(self, blk):
        """(rank before block, offset pointer of block)."""
        sb = blk // self.sample
        r = self._sr[sb]
        ptr = self._sp[sb]
        cls = self._cls
        for b in range(sb * self.sample, blk):
            c = cls[b]
            r += c
            ptr += _RRR_WIDTH[c]
        return r, ptr

    def _access(self, i):
        blk, rem = divmod(i, RRR_BLOCK)
        _, ptr = self._seek(blk)
        return (self._block(blk, ptr) >> rem) & 1

    def rank1(self, i: int) -> int:
        blk, rem = divmod(i, RRR_BLOCK)
        r, ptr = self._seek(blk)
        if rem:
            r += (self._block(blk, ptr) & ((1 << rem) - 1)).bit_count()
        return r

    def _select(self, b, j):
        if b:
            sb = bisect.bisect_left(self._sr, j) - 1
            r = self._sr[sb]
        else:
            sb = bisect.bisect_left(self._sz, j) - 1
            r = self._sz[sb]
        ptr = self._sp[sb]
        blk = sb * self.sample
        cls = self._cls
        while True:
            c = cls[blk] if b else RRR_BLOCK - cls[blk]
            if r + c >= j:
                break
            r += c
            ptr += _RRR_WIDTH[cls[blk]]
            blk += 1
        v = self._block(blk, ptr)
        if not b:
            v = ~v & ((1 << RRR_BLOCK) - 1)
        return blk * RRR_BLOCK + _select_in_word(v, j - r)

    def select1(self, j):
        return self._select(1, j)

    def select0(self, j):
        return self._select(0, j)

    def size_in_bits(self) -> int:
        return (
            self.nblocks * 4
            + self.offset_bits
            + self.sb_rank.size * (bits_needed(self.n) + bits_needed(self.offset_bits))
        )


# --- DELTA -----------------------------------------------------------------


class DeltaBitmap(_Bitmap):
    """Gaps between consecutive ones, delta-coded, sampled every ``sample`` ones."""

    kind = "delta"

    def __init__(self, bits=(), sample: int = 128, *, positions=None, n=None):
        if sample < 1:
            raise ValueError("sample must be positive")
        if positions is None:
            b = _as_bits(bits)
            n = int(b.size)
            positions = np.flatnonzero(b)
        self.n = int(n)
        self.sample = sample
        pos = np.ascontiguousarray(positions, dtype=np.int64)
        if pos.size and (np.any(np.diff(pos) <= 0) or pos[0] < 0 or pos[-1] >= self.n):
            raise ValueError("one positions must be strictly increasing and < n")
        self.ones = int(pos.size)
        words, length, spos, soff, szero = K.delta_encode(pos, sample)
        self.stream = BitBuffer.from_array(words, length)
        self._words = words
        self._spos = spos.tolist()
        self._soff = soff.tolist()
        self._szero = szero.tolist()
        self._k = (words, spos, soff, szero, np.int64(sample), np.int64(self.ones))

    def rank1_many(self, idx):
        return K.delta_rank1_many(self._k, idx)

    def _access_many(self, idx):
        return K.delta_rank1_many(self._k, idx + 1) - K.delta_rank1_many(self._k, idx)

    def _select_many(self, syms, js):
        return K.delta_select_many(self._k, syms, js)

    def _pos_of(self, j):
        m = (j - 1) // self.sample
        pos = self._spos[m]
        off = self._soff[m]
        buf = self.stream
        for _ in range(j - m * self.sample):
            g, off = decode_delta(buf, off)
            pos += g
        return pos

    def select1(self, j: int) -> int:
        return self._pos_of(j)

    def rank1(self, i: int) -> int:
        m = bisect.bisect_left(self._spos, i) - 1
        count = m * self.sample
        pos = self._spos[m]
        off = self._soff[m]
        buf = self.stream
        while count < self.ones:
            g, off = decode_delta(buf, off)
            if pos + g >= i:
                break
            pos += g
            count += 1
        return count

    def _access(self, i):
        return self.rank1(i + 1) - self.rank1(i)

    def select0(self, j: int) -> int:
        # ones preceding the j-th zero: those t with p_t - (t - 1) < j
        m = bisect.bisect_left(self._szero, j) - 1
        t = m * self.sample
        pos = self._spos[m]
        off = self._soff[m]
        buf = self.stream
        while t < self.ones:
            g, noff = decode_delta(buf, off)
            if (pos + g) - t >= j:
                break
            pos += g
            off = noff
            t += 1
        return j - 1 + t

    def size_in_bits(self) -> int:
        return self.stream.length + len(self._spos) * (
            bits_needed(self.n + 1) + bits_needed(self.stream.length)
        )


BITMAP_KINDS = {"plain": PlainBitmap, "rrr": RrrBitmap, "delta": DeltaBitmap}


def make_bitmap(bits, kind: str = "plain", **kw):
    try:
        cls = BITMAP_KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown bitmap kind {kind!r}") from None
    return cls(bits, **kw)
