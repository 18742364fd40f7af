"""Huffman codes (binary and 2^b-ary) giving shapes to wavelet trees/matrices.

Codes are returned as integers read as base-``k`` digit strings of a given
length.  Codeword *lengths* come from the textbook Huffman merge; the
codewords themselves are assigned level by level so that, at every depth,
the internal nodes occupy the first slots in (digit, parent order).  That
ordering is exactly the order a wavelet matrix lays nodes out in, so the
same table serves both the pointer-based tree and the matrix.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

__all__ = ["CodeTable", "build_binary", "build_kary", "balanced_code", "assign_codes"]


@dataclass
class CodeTable:
    arity: int
    codes: dict = field(default_factory=dict)  # symbol -> int (base-arity digits)
    lengths: dict = field(default_factory=dict)  # symbol -> number of digits

    def __post_init__(self):
        self._decode = {(self.lengths[a], c): a for a, c in self.codes.items()}

    @property
    def symbols(self):
        return list(self.codes)

    @property
    def max_length(self) -> int:
        return max(self.lengths.values(), default=0)

    def __contains__(self, a):
        return a in self.codes

    def digits(self, a) -> list[int]:
        """Code of ``a`` as a list of digits, most significant first."""
        c, L, k = self.codes[a], self.lengths[a], self.arity
        out = [0] * L
        for i in range(L - 1, -1, -1):
            c, out[i] = divmod(c, k)
        return out

    def digit(self, a, level: int) -> int:
        L = self.lengths[a]
        return (self.codes[a] // self.arity ** (L - 1 - level)) % self.arity

    def lookup(self, length: int, code: int):
        """Symbol with the given code, or ``None``."""
        return self._decode.get((length, code))

    def decode(self, digits) -> list:
        """Decode a concatenation of codewords given as a digit sequence."""
        out, cur, L = [], 0, 0
        for d in digits:
            cur = cur * self.arity + int(d)
            L += 1
            a = self._decode.get((L, cur))
            if a is not None:
                out.append(a)
                cur = L = 0
        if L:
            raise ValueError("digit sequence ends inside a codeword")
        return out

    def average_length(self, freqs) -> float:
        freqs = _as_items(freqs)
        tot = sum(f for _, f in freqs)
        return sum(f * self.lengths[a] for a, f in freqs if f) / tot

    def kraft_sum(self) -> float:
        return sum(self.arity ** -L for L in self.lengths.values())


def _as_items(freqs):
    if hasattr(freqs, "items"):
        return [(a, int(f)) for a, f in freqs.items()]
    return [(a, int(f)) for a, f in enumerate(np.asarray(freqs).tolist())]


def _huffman_lengths(items, k):
    """Codeword lengths for (symbol, freq) items, ties by (freq, first-seen)."""
    m = len(items)
    if m == 1:
        return {items[0][0]: 1}
    dummies = (k - 1 - (m - 1) % (k - 1)) % (k - 1)
    # heap entries: (freq, order, node); dummies order first among zero-weight nodes
    heap = [(0, -1 - d, -1) for d in range(dummies)]
    heap += [(f, t, t) for t, (_, f) in enumerate(items)]
    heapq.heapify(heap)
    parent = {}
    nxt = m
    while len(heap) > 1:
        tot = 0
        kids = []
        for _ in range(min(k, len(heap))):
            f, _, node = heapq.heappop(heap)
            tot += f
            kids.append(node)
        for node in kids:
            if node >= 0:
                parent[node] = nxt
        heapq.heappush(heap, (tot, nxt, nxt))
        nxt += 1
    root = heap[0][2]
    depth = {root: 0}

    def d(node):
        if node not in depth:
            depth[node] = d(parent[node]) + 1
        return depth[node]

    raw = sorted(d(t) for t in range(m))
    # hand the shortest lengths to the most frequent symbols (stable tie-break)
    order = sorted(range(m), key=lambda t: (-items[t][1], t))
    return {items[t][0]: L for t, L in zip(order, raw)}


def assign_codes(lengths: dict, k: int, order=None) -> dict:
    """Assign base-``k`` codewords to the given lengths (Kraft sum <= 1).

    Nodes of each depth are numbered in (digit, parent order); internal
    nodes take the first slots, then leaves (in ``order``), then unused
    slots.  Returns symbol -> code.
    """
    if not lengths:
        return {}
    maxlen = max(lengths.values())
    syms = list(order) if order is not None else sorted(lengths, key=lambda a: (lengths[a], a))
    by_len = [[] for _ in range(maxlen + 1)]
    for a in syms:
        by_len[lengths[a]].append(a)
    internal = [0] * (maxlen + 1)
    for D in range(maxlen - 1, -1, -1):
        internal[D] = -(-(len(by_len[D + 1]) + internal[D + 1]) // k)
    if internal[0] != 1 or by_len[0]:
        raise ValueError("lengths violate the Kraft inequality")
    codes = {}
    prefixes = [0]  # codes of internal nodes at current depth, in node order
    for D in range(maxlen):
        slots = [p * k + c for c in range(k) for p in prefixes]
        need = internal[D + 1] + len(by_len[D + 1])
        if need > len(slots):
            raise ValueError("lengths violate the Kraft inequality")
        nxt = slots[: internal[D + 1]]
        for a, code in zip(by_len[D + 1], slots[internal[D + 1]: need]):
            codes[a] = code
        prefixes = nxt
    return codes


def build_kary(freqs, arity: int) -> CodeTable:
    """Huffman code with ``arity`` (a power of two >= 2) digits per level."""
    if arity < 2 or arity & (arity - 1):
        raise ValueError("arity must be a power of two >= 2")
    items = [(a, f) for a, f in _as_items(freqs) if f > 0]
    if not items:
        raise ValueError("no symbol has a nonzero frequency")
    lengths = _huffman_lengths(items, arity)
    rank = {a: (-f, t) for t, (a, f) in enumerate(items)}
    order = sorted(lengths, key=lambda a: (lengths[a], rank[a]))
    codes = assign_codes(lengths, arity, order)
    return CodeTable(arity, codes, lengths)


def build_binary(freqs) -> CodeTable:
    return build_kary(freqs, 2)


def balanced_code(symbols, arity: int = 2) -> CodeTable:
    """Fixed-length code ``a - min`` over the symbol range, in base ``arity``.

    The number of digits is ceil(ceil(lg(range)) / b); the top digit may use
    fewer than ``arity`` values.  A single symbol still gets one digit.
    """
    symbols = sorted(set(int(a) for a in symbols))
    if not symbols:
        raise ValueError("empty alphabet")
    lo, hi = symbols[0], symbols[-1]
    b = arity.bit_length() - 1
    bits = max(1, (hi - lo).bit_length())
    L = -(-bits // b)
    return CodeTable(arity, {a: a - lo for a in symbols}, {a: L for a in symbols})
