"""Alphabet partitioning, plain (AP) and grammar-compressed (AP.RP).

Symbols are ranked by decreasing frequency (ties by symbol id).  The
``2**cut`` most frequent ones are written directly in the class sequence
``K``; a symbol of rank ``t > 2**cut`` belongs to class ``j = floor(lg t)``
and is represented in ``K`` by its class and, inside the class subsequence
``S_j``, by its local id (its rank among the class members, by symbol id).
The mapping ``M`` (indexed by symbol) gives every symbol's ``K`` value.

rsa queries compose rsa on ``M``, ``K`` and the relevant ``S_j``.
"""

from __future__ import annotations

import numpy as np

from .base import RsaSequence
from .bitio import bits_needed
from .gcc import GccIndex
from .wavelet import WaveletMatrix, WaveletTree, _group

__all__ = ["ApIndex", "partition"]


def partition(freqs, cut: int):
    """Map symbols to ``K`` values.

    Returns ``(kval, classes)``: ``kval[a]`` is the ``K`` symbol of ``a``
    (``-1`` when ``a`` does not occur) and ``classes`` lists the ``j`` of
    every non-empty class in ``K`` order (``K`` value ``2**cut + index``).
    """
    freqs = np.asarray(freqs, dtype=np.int64)
    present = np.flatnonzero(freqs)
    order = present[np.lexsort((present, -freqs[present]))]
    t = np.arange(1, order.size + 1)
    kval = np.full(freqs.size, -1, dtype=np.int64)
    direct = t <= (1 << cut)
    kval[order[direct]] = t[direct] - 1
    j = np.array([int(x).bit_length() - 1 for x in t[~direct]], dtype=np.int64)
    classes = np.unique(j)
    kval[order[~direct]] = (1 << cut) + np.searchsorted(classes, j)
    return kval, classes


class ApIndex(RsaSequence):
    """Alphabet-partitioned sequence.

    ``compressed=True`` gives AP.RP: ``K`` and the first ``cut_o`` classes
    are GCC-backed; the other classes use ``fallback`` ("plain": wavelet
    matrix over plain bitmaps, "rp": wavelet matrix with GCC levels).
    ``compressed=False`` gives plain AP: ``K`` in a Huffman-shaped wavelet
    tree with RRR bitmaps and every class in a plain wavelet matrix.
    """

    def __init__(self, S, cut: int = 4, cut_o: int = 3, *, compressed: bool = True,
                 fallback: str = "plain", sigma=None, gcc=None):
        if cut < 0 or cut_o < 0:
            raise ValueError("cut and cut_o must be non-negative")
        if fallback not in ("plain", "rp"):
            raise ValueError("fallback must be 'plain' or 'rp'")
        S = np.ascontiguousarray(S, dtype=np.int64)
        if S.size == 0:
            raise ValueError("empty sequence")
        if S.min() < 0:
            raise ValueError("symbols must be non-negative")
        self.n = int(S.size)
        self.sigma = int(sigma if sigma is not None else S.max() + 1)
        if S.max() >= self.sigma:
            raise ValueError("symbol outside the alphabet")
        self.cut, self.cut_o = cut, cut_o
        self.compressed, self.fallback = compressed, fallback
        gopts = dict(s=1024, delta=1, sampling="N")
        gopts.update(gcc or {})
        self.gcc_opts = gopts

        freqs = np.bincount(S, minlength=self.sigma)
        kval, classes = partition(freqs, cut)
        self.classes = classes
        self.base = 1 << cut
        self.ksigma = self.base + classes.size
        absent = self.ksigma  # sentinel value in M
        mvals = np.where(kval >= 0, kval, absent)
        self.M = WaveletTree(mvals, "balanced", 2, "plain", sigma=absent + 1)
        # local id of each class member: members of the same class ordered by id
        local = np.zeros(self.sigma, dtype=np.int64)
        cls_of = mvals - self.base
        members = np.flatnonzero((cls_of >= 0) & (kval >= 0))
        for c, g in _group(cls_of[members]):
            local[members[g]] = np.arange(g.size)
        Kseq = kval[S]
        if compressed:
            self.K = GccIndex(Kseq, sigma=self.ksigma, **gopts)
        else:
            self.K = WaveletTree(Kseq, "huffman", 2, "rrr", sigma=self.ksigma)
        self.sub = []
        self.sub_kind = []
        in_class = Kseq >= self.base
        for c in range(classes.size):
            seq = local[S[in_class & (Kseq == self.base + c)]]
            size = int((cls_of == c).sum())
            if compressed and c < cut_o:
                self.sub.append(GccIndex(seq, sigma=max(size, 1), **gopts))
                self.sub_kind.append("gcc")
            elif compressed and fallback == "rp":
                self.sub.append(WaveletMatrix(seq, "balanced", 2, "gcc", sigma=max(size, 1), gcc=gopts))
                self.sub_kind.append("wm-rp")
            else:
                self.sub.append(WaveletMatrix(seq, "balanced", 2, "plain", sigma=max(size, 1)))
                self.sub_kind.append("wm-plain")

    # -- helpers ---------------------------------------------------------------

    def _kinfo(self, syms):
        """K value and local id (-1 for direct symbols) of each symbol."""
        k = self.M._access_many(syms)
        v = np.full(syms.size, -1, dtype=np.int64)
        cl = (k >= self.base) & (k < self.ksigma)
        if cl.any():
            v[cl] = self.M._rank_many(k[cl], syms[cl])
        return k, v

    # -- protocol ----------------------------------------------------------------

    def _count_many(self, syms):
        k, v = self._kinfo(syms)
        out = np.zeros(syms.size, dtype=np.int64)
        d = k < self.base
        out[d] = self.K._count_many(k[d])
        cl = np.flatnonzero((k >= self.base) & (k < self.ksigma))
        for c, g in _group(k[cl] - self.base):
            out[cl[g]] = self.sub[c]._count_many(v[cl[g]])
        return out

    def count(self, a) -> int:
        if not 0 <= a < self.sigma:
            return 0
        return int(self._count_many(np.array([a], dtype=np.int64))[0])

    def _access_many(self, idx):
        k = self.K._access_many(idx)
        out = np.empty(idx.size, dtype=np.int64)
        d = k < self.base
        if d.any():  # the (k+1)-th most frequent symbol is the only entry k of M
            out[d] = self.M._select_many(k[d], np.ones(int(d.sum()), dtype=np.int64))
        cl = np.flatnonzero(~d)
        if cl.size:
            pos = self.K._rank_many(k[cl], idx[cl])
            loc = np.empty(cl.size, dtype=np.int64)
            for c, g in _group(k[cl] - self.base):
                loc[g] = self.sub[c]._access_many(pos[g])
            out[cl] = self.M._select_many(k[cl], loc + 1)
        return out

    def _rank_many(self, syms, idx):
        k, v = self._kinfo(syms)
        out = np.zeros(syms.size, dtype=np.int64)
        d = np.flatnonzero(k < self.base)
        if d.size:
            out[d] = self.K._rank_many(k[d], idx[d])
        cl = np.flatnonzero((k >= self.base) & (k < self.ksigma))
        if cl.size:
            pos = self.K._rank_many(k[cl], idx[cl])
            for c, g in _group(k[cl] - self.base):
                out[cl[g]] = self.sub[c]._rank_many(v[cl[g]], pos[g])
        return out

    def _select_many(self, syms, js):
        k, v = self._kinfo(syms)
        out = np.empty(syms.size, dtype=np.int64)
        d = np.flatnonzero(k < self.base)
        if d.size:
            out[d] = self.K._select_many(k[d], js[d])
        cl = np.flatnonzero(k >= self.base)
        if cl.size:
            p = np.empty(cl.size, dtype=np.int64)
            for c, g in _group(k[cl] - self.base):
                p[g] = self.sub[c]._select_many(v[cl[g]], js[cl[g]])
            out[cl] = self.K._select_many(k[cl], p + 1)
        return out

    # -- introspection -------------------------------------------------------------

    def class_ranges(self) -> list[tuple[int, int]]:
        """Frequency ranks (1-based, inclusive) held by every non-empty class."""
        present = int(self.M.count(self.ksigma))
        present = self.sigma - present  # symbols not mapped to the sentinel
        return [(max(1 << int(j), self.base + 1), min((1 << (int(j) + 1)) - 1, present))
                for j in self.classes]

    def space_breakdown(self) -> dict:
        parts = {
            "mapping": self.M.size_in_bits(),
            "classes": self.K.size_in_bits(),
            "subsequences": sum(s.size_in_bits() for s in self.sub),
            "params": 3 * bits_needed(self.sigma),
        }
        parts["total"] = sum(parts.values())
        return parts

    def size_in_bits(self) -> int:
        return self.space_breakdown()["total"]
