"""Directly Addressable Codes: variable-length integers with positional access.

Each value is cut into chunks from least to most significant.  Layer ``l``
stores the ``l``-th chunk of every value that has one, next to a bitmap
telling whether that value continues in layer ``l + 1``; the position in the
next layer is ``rank_1`` of that bitmap.  Zero is stored as one all-zero
chunk.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as K
from .base import RangeError
from .bitio import bits_needed, pack_ints
from .bitvector import PlainBitmap, _get_field

__all__ = ["DacArray", "optimize_widths", "plain_bitmap_bits"]


def plain_bitmap_bits(n: int) -> int:
    """Size of a :class:`PlainBitmap` of ``n`` bits, without building it."""
    words = max(1, -(-n // 64))
    return words * 64 + (n // K.SUPER_BITS + 2) * bits_needed(n)


def _layer_bits(entries: int, width: int) -> int:
    return entries * width + plain_bitmap_bits(entries)


def _bit_lengths(values: np.ndarray) -> np.ndarray:
    v = values.astype(np.uint64)
    out = np.zeros(v.size, dtype=np.int64)
    for shift in (32, 16, 8, 4, 2, 1):
        big = v >= (np.uint64(1) << np.uint64(shift))
        out[big] += shift
        v = np.where(big, v >> np.uint64(shift), v)
    out += (v > 0).astype(np.int64)
    return np.maximum(out, 1)


class DacArray:
    """Immutable array of non-negative integers stored as a DAC."""

    def __init__(self, values, widths=4):
        X = np.ascontiguousarray(values, dtype=np.int64)
        if X.ndim != 1:
            raise ValueError("DAC input must be one-dimensional")
        if X.size and X.min() < 0:
            raise ValueError("DAC values must be non-negative")
        self.n = int(X.size)
        maxbits = int(_bit_lengths(X).max()) if X.size else 1
        if isinstance(widths, (int, np.integer)):
            b = int(widths)
            if b <= 0:
                raise ValueError("chunk width must be positive")
            widths = [b] * -(-maxbits // b)
        else:
            widths = [int(w) for w in widths]
            if not widths or min(widths) <= 0:
                raise ValueError("chunk widths must be positive")
            if sum(widths) < maxbits:
                raise ValueError(f"widths {widths} cannot hold {maxbits}-bit values")
            # drop layers no value reaches
            keep, acc = [], 0
            for w in widths:
                keep.append(w)
                acc += w
                if acc >= maxbits:
                    break
            widths = keep
        self.widths = widths

        self.chunks = []  # packed payload per layer
        self.counts = []  # entries per layer
        self.cont = []  # PlainBitmap per layer
        cur = X.astype(np.uint64)
        for l, w in enumerate(widths):
            chunk = cur & np.uint64((1 << w) - 1)
            rest = cur >> np.uint64(w)
            more = rest > 0
            words, _ = pack_ints(chunk, w)
            self.chunks.append(words)
            self.counts.append(int(cur.size))
            self.cont.append(PlainBitmap(more))
            cur = rest[more]
        self._chunk_lists = [c.tolist() for c in self.chunks]
        self._kernel = None

    @property
    def num_layers(self) -> int:
        return len(self.widths)

    def __len__(self):
        return self.n

    def _get(self, i: int) -> int:
        res = 0
        shift = 0
        for l, w in enumerate(self.widths):
            res |= _get_field(self._chunk_lists[l], i * w, w) << shift
            shift += w
            bm = self.cont[l]
            if not (bm._w[i >> 6] >> (i & 63)) & 1:
                return res
            i = bm.rank1(i)
        return res

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise RangeError(f"DAC position {i} outside [1, {self.n}]")
        return self._get(i - 1)

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return self._get(i)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.uint64)
        idx = np.arange(self.n)
        shift = 0
        for l, w in enumerate(self.widths):
            vals = K.unpack_fields(self.chunks[l], w, self.counts[l])
            out[idx] |= vals << np.uint64(shift)
            shift += w
            more = self.cont[l].to_bits().astype(bool)
            idx = idx[more]
        return out.astype(np.int64)

    def layer_chunks(self, l: int) -> np.ndarray:
        return K.unpack_fields(self.chunks[l], self.widths[l], self.counts[l]).astype(np.int64)

    def size_in_bits(self) -> int:
        return sum(
            cnt * w + bm.size_in_bits()
            for cnt, w, bm in zip(self.counts, self.widths, self.cont)
        )

    def kernel_arrays(self):
        """Flattened tuple consumed by :func:`gcrsa._kernels.dac_access`."""
        if self._kernel is None:
            payload, pstart = [], [0]
            cwords, cwstart = [], [0]
            csup, csstart = [], [0]
            for words, bm in zip(self.chunks, self.cont):
                payload.append(words)
                pstart.append(pstart[-1] + words.size * 64)
                cwords.append(bm.words)
                cwstart.append(cwstart[-1] + bm.words.size)
                csup.append(bm.supers)
                csstart.append(csstart[-1] + bm.supers.size)
            self._kernel = (
                np.concatenate(payload),
                np.array(pstart, dtype=np.int64),
                np.array(self.widths, dtype=np.int64),
                np.concatenate(cwords),
                np.array(cwstart, dtype=np.int64),
                np.concatenate(csup),
                np.array(csstart, dtype=np.int64),
            )
        return self._kernel


def optimize_widths(values, max_layers: int = 8) -> list[int]:
    """Per-layer chunk widths minimizing total DAC bits with at most ``max_layers``.

    Dynamic program over the value bit-length histogram.  The cost model is
    the exact :meth:`DacArray.size_in_bits` formula, so the result is never
    worse than any fixed width under the same cap.
    """
    if max_layers < 1:
        raise ValueError("max_layers must be at least 1")
    X = np.asarray(values, dtype=np.int64)
    if X.size == 0:
        return [1]
    lens = _bit_lengths(X)
    m = int(lens.max())
    # reach[s] = number of values with more than s bits (layer starting at bit s)
    hist = np.bincount(lens, minlength=m + 1)
    reach = [int(hist[s + 1:].sum()) for s in range(m)]
    reach[0] = int(X.size)
    INF = float("inf")
    best = [[INF] * (max_layers + 1) for _ in range(m + 1)]
    choice = [[0] * (max_layers + 1) for _ in range(m + 1)]
    for L in range(max_layers + 1):
        best[m][L] = 0
    for s in range(m - 1, -1, -1):
        for L in range(1, max_layers + 1):
            for w in range(1, m - s + 1):
                cost = _layer_bits(reach[s], w) + best[s + w][L - 1]
                if cost < best[s][L]:
                    best[s][L] = cost
                    choice[s][L] = w
    widths, s, L = [], 0, max_layers
    while s < m:
        w = choice[s][L]
        widths.append(w)
        s += w
        L -= 1
    return widths
