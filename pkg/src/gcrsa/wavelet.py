"""Wavelet trees and wavelet matrices: balanced, Huffman-shaped and multi-ary.

A code table assigns every symbol a string of base-``k`` digits (``k`` a
power of two).  The *tree* keeps one node per code prefix, each storing the
next digit of every position routed through it.  The *matrix* keeps one
sequence per level holding the level's digit of every position still
active, with level ``l+1`` the stable partition of level ``l`` by digit and
cumulative counters ``Z_l`` to navigate.

Node/level sequences are pluggable: bitmaps (plain, RRR, DELTA), GCC
grammar-compressed sequences, bit-packed arrays with rank counters for
multi-ary nodes, or ``best`` (the smallest of plain, RRR and GCC).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from . import _kernels as K
from .base import RsaSequence
from .bitio import bits_needed, pack_ints
from .bitvector import make_bitmap
from .gcc import GccIndex
from .huffman import CodeTable, balanced_code, build_kary

__all__ = [
    "PackedSequence", "WaveletTree", "WaveletMatrix", "make_sequence",
    "build_tree", "build_matrix", "BACKENDS",
]

BACKENDS = ("plain", "rrr", "delta", "gcc", "best")


# ---------------------------------------------------------------------------
# bit-packed small-alphabet sequence with per-symbol block counters
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _packed_rank_many(words, width, counters, block, syms, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        a = syms[q]
        i = idx[q]
        t = i // block
        r = counters[a, t]
        for p in range(t * block, i):
            if np.int64(K.get_field(words, p * width, width)) == a:
                r += 1
        out[q] = r
    return out


@njit(cache=True, nogil=True)
def _packed_select_many(words, width, counters, block, n, syms, js):
    out = np.empty(js.shape[0], dtype=np.int64)
    nb = counters.shape[1]
    for q in range(js.shape[0]):
        a = syms[q]
        j = js[q]
        lo = 0
        hi = nb - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if counters[a, mid] < j:
                lo = mid
            else:
                hi = mid - 1
        r = counters[a, lo]
        p = lo * block
        while p < n:
            if np.int64(K.get_field(words, p * width, width)) == a:
                r += 1
                if r == j:
                    break
            p += 1
        out[q] = p
    return out


@njit(cache=True, nogil=True)
def _packed_access_many(words, width, idx):
    out = np.empty(idx.shape[0], dtype=np.int64)
    for q in range(idx.shape[0]):
        out[q] = np.int64(K.get_field(words, idx[q] * width, width))
    return out


class PackedSequence(RsaSequence):
    """Symbols packed at ceil(lg sigma) bits plus per-symbol counters every ``block``."""

    kind = "plain"

    def __init__(self, seq, sigma=None, block: int = 512):
        S = np.ascontiguousarray(seq, dtype=np.int64)
        self.n = n = int(S.size)
        self.sigma = int(sigma if sigma is not None else (S.max() + 1 if n else 1))
        if n and (S.min() < 0 or S.max() >= self.sigma):
            raise ValueError("symbol outside the alphabet")
        self.block = block
        self.width = bits_needed(max(self.sigma - 1, 1))
        self.words, _ = pack_ints(S, self.width)
        nb = n // block + 1
        hist = np.bincount(S * nb + np.arange(n) // block, minlength=self.sigma * nb)
        self.counters = np.zeros((self.sigma, nb), dtype=np.int64)
        np.cumsum(hist.reshape(self.sigma, nb)[:, :-1], axis=1, out=self.counters[:, 1:])
        self._totals = np.bincount(S, minlength=self.sigma).astype(np.int64)

    def count(self, a) -> int:
        return int(self._totals[a]) if 0 <= a < self.sigma else 0

    def _count_many(self, syms):
        return self._totals[syms]

    def _access_many(self, idx):
        return _packed_access_many(self.words, self.width, idx)

    def _rank_many(self, syms, idx):
        return _packed_rank_many(self.words, self.width, self.counters, self.block, syms, idx)

    def _select_many(self, syms, js):
        return _packed_select_many(self.words, self.width, self.counters, self.block, self.n, syms, js)

    def size_in_bits(self) -> int:
        return self.n * self.width + self.counters.size * bits_needed(self.n)


# ---------------------------------------------------------------------------
# backend factory
# ---------------------------------------------------------------------------


def _gcc_opts(opts):
    g = dict(s=1024, delta=1, sampling="N")
    g.update(opts.get("gcc", {}))
    return g


def make_sequence(seq, sigma: int, backend: str = "plain", **opts) -> RsaSequence:
    """rsa structure for a sequence over [0, sigma) with the given backend."""
    seq = np.ascontiguousarray(seq, dtype=np.int64)
    if backend == "best":
        cands = [make_sequence(seq, sigma, b, **opts) for b in ("plain", "rrr", "gcc")]
        return min(cands, key=lambda c: c.size_in_bits())
    if backend == "gcc":
        return GccIndex(seq, sigma=max(sigma, 2), **_gcc_opts(opts))
    if sigma <= 2:
        kw = {}
        if backend == "rrr":
            kw["sample"] = opts.get("rrr_sample", 32)
        elif backend == "delta":
            kw["sample"] = opts.get("delta_sample", 128)
        elif backend != "plain":
            raise ValueError(f"unknown backend {backend!r}")
        return make_bitmap(seq, backend, **kw)
    if backend == "plain":
        return PackedSequence(seq, sigma)
    if backend in ("rrr", "delta"):
        return WaveletMatrix(seq, "balanced", 2, backend, sigma=sigma, **opts)
    raise ValueError(f"unknown backend {backend!r}")


def _group(keys):
    """Yield (key, indices into keys) for every distinct key."""
    if keys.size == 0:
        return
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    cuts = np.flatnonzero(np.diff(sk)) + 1
    starts = np.concatenate([[0], cuts])
    ends = np.concatenate([cuts, [sk.size]])
    for a, b in zip(starts, ends):
        yield int(sk[a]), order[a:b]


class _Coded(RsaSequence):
    """Shared set-up: alphabet, code table and per-symbol code arrays."""

    def _setup(self, S, shape, arity, sigma, backend, opts):
        if arity < 2 or arity & (arity - 1):
            raise ValueError("arity must be a power of two >= 2")
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}")
        if shape not in ("balanced", "huffman"):
            raise ValueError("shape must be 'balanced' or 'huffman'")
        S = np.ascontiguousarray(S, dtype=np.int64)
        if S.size and S.min() < 0:
            raise ValueError("symbols must be non-negative")
        self.n = int(S.size)
        self.sigma = int(sigma if sigma is not None else (S.max() + 1 if S.size else 1))
        if S.size and S.max() >= self.sigma:
            raise ValueError("symbol outside the alphabet")
        self.shape, self.arity, self.backend = shape, arity, backend
        self.opts = opts
        self.b = arity.bit_length() - 1
        freqs = np.bincount(S, minlength=self.sigma)
        self._freqs = freqs.astype(np.int64)
        present = np.flatnonzero(freqs)
        if present.size == 0:
            self.code = CodeTable(arity)
        elif shape == "huffman":
            self.code = build_kary({int(a): int(freqs[a]) for a in present}, arity)
        else:
            self.code = balanced_code(present.tolist(), arity)
        self._cval = np.zeros(self.sigma, dtype=np.int64)
        self._clen = np.zeros(self.sigma, dtype=np.int64)
        for a, c in self.code.codes.items():
            self._cval[a] = c
            self._clen[a] = self.code.lengths[a]
        self.height = self.code.max_length
        self._single = int(present[0]) if present.size == 1 else None
        return S

    def _digits(self, syms, level):
        shift = self.b * (self._clen[syms] - 1 - level)
        return (self._cval[syms] >> shift) & (self.arity - 1)

    def _backend_at(self, depth):
        cut = self.opts.get("level_cut")
        if self.backend == "gcc" and cut is not None and depth >= cut:
            return self.opts.get("fallback", "rrr")
        return self.backend

    def count(self, a) -> int:
        return int(self._freqs[a]) if 0 <= a < self.sigma else 0

    def _count_many(self, syms):
        return self._freqs[syms]

    def _code_table_bits(self) -> int:
        if self.shape == "balanced" or not self.code.codes:
            return 2 * bits_needed(self.sigma)  # min symbol and depth
        m = len(self.code.codes)
        return m * (bits_needed(self.height) + self.height * self.b) + bits_needed(self.sigma) * m

    def _counts_bits(self) -> int:
        return int((self._freqs > 0).sum()) * bits_needed(self.n) + self.sigma

    def _single_access(self, idx):
        return np.full(idx.size, self._single, dtype=np.int64)

    def _single_rank(self, syms, idx):
        return np.where(syms == self._single, idx, 0)


# ---------------------------------------------------------------------------
# wavelet tree
# ---------------------------------------------------------------------------


class WaveletTree(_Coded):
    """Pointer-based wavelet tree; nodes hold the next code digit of their positions."""

    def __init__(self, S, shape: str = "balanced", arity: int = 2, backend: str = "plain",
                 sigma=None, **opts):
        S = self._setup(S, shape, arity, sigma, backend, opts)
        self.nodes = []
        self.depths = []
        children = []
        if self._single is None and self.n:
            queue = [(0, S)]
            head = 0
            while head < len(queue):
                depth, arr = queue[head]
                head += 1
                dg = self._digits(arr, depth)
                alpha = max(2, int(dg.max()) + 1)
                self.nodes.append(make_sequence(dg, alpha, self._backend_at(depth), **opts))
                self.depths.append(depth)
                row = np.full(arity, -1, dtype=np.int64)
                order = np.argsort(dg, kind="stable")
                cnt = np.bincount(dg, minlength=arity)
                start = 0
                for d in range(arity):
                    if cnt[d] == 0:
                        continue
                    grp = arr[order[start:start + cnt[d]]]
                    start += cnt[d]
                    a0 = int(grp[0])
                    if self._clen[a0] == depth + 1:
                        row[d] = -2 - a0
                    else:
                        row[d] = len(queue)
                        queue.append((depth + 1, grp))
                children.append(row)
        self.children = np.array(children, dtype=np.int64).reshape(-1, arity)
        # per-symbol root-to-leaf path of node ids
        H = max(self.height, 1)
        self._path = np.full((self.sigma, H), -1, dtype=np.int64)
        if self._single is None:
            for a in self.code.codes:
                u = 0
                for lvl, d in enumerate(self.code.digits(a)):
                    self._path[a, lvl] = u
                    u = self.children[u, d]

    def _access_many(self, idx):
        if self._single is not None:
            return self._single_access(idx)
        m = idx.size
        node = np.zeros(m, dtype=np.int64)
        pos = idx.copy()
        out = np.empty(m, dtype=np.int64)
        active = np.arange(m)
        while active.size:
            nd = node[active]
            for u, g in _group(nd):
                sel = active[g]
                seq = self.nodes[u]
                dg = seq._access_many(pos[sel])
                pos[sel] = seq._rank_many(dg, pos[sel])
                node[sel] = self.children[u, dg]
            nd = node[active]
            leaf = nd < 0
            out[active[leaf]] = -2 - nd[leaf]
            active = active[~leaf]
        return out

    def _rank_many(self, syms, idx):
        if self._single is not None:
            return self._single_rank(syms, idx)
        res = idx.copy()
        L = self._clen[syms]
        res[L == 0] = 0
        for lvl in range(self.height):
            act = np.flatnonzero((L > lvl) & (res > 0))
            if act.size == 0:
                break
            nd = self._path[syms[act], lvl]
            dg = self._digits(syms[act], lvl)
            for u, g in _group(nd):
                sel = act[g]
                res[sel] = self.nodes[u]._rank_many(dg[g], res[sel])
        return res

    def _select_many(self, syms, js):
        if self._single is not None:
            return js - 1
        j = js.copy()
        L = self._clen[syms]
        for lvl in range(self.height - 1, -1, -1):
            act = np.flatnonzero(L > lvl)
            if act.size == 0:
                continue
            nd = self._path[syms[act], lvl]
            dg = self._digits(syms[act], lvl)
            for u, g in _group(nd):
                sel = act[g]
                j[sel] = self.nodes[u]._select_many(dg[g], j[sel]) + 1
        return j - 1

    def node_backends(self) -> list[str]:
        return [type(s).__name__ for s in self.nodes]

    def space_breakdown(self) -> dict:
        nn = len(self.nodes)
        parts = {
            "nodes": sum(s.size_in_bits() for s in self.nodes),
            "pointers": nn * self.arity * bits_needed(nn + self.sigma + 1),
            "code": self._code_table_bits(),
            "counts": self._counts_bits(),
        }
        parts["total"] = sum(parts.values())
        return parts

    def size_in_bits(self) -> int:
        return self.space_breakdown()["total"]


# ---------------------------------------------------------------------------
# wavelet matrix
# ---------------------------------------------------------------------------


class WaveletMatrix(_Coded):
    """Levelwise layout: one sequence per level and cumulative digit counters."""

    def __init__(self, S, shape: str = "balanced", arity: int = 2, backend: str = "plain",
                 sigma=None, **opts):
        S = self._setup(S, shape, arity, sigma, backend, opts)
        self.levels = []
        self.Z = np.zeros((max(self.height, 1), arity + 1), dtype=np.int64)
        self._leaf_codes = []
        self._leaf_syms = []
        if self._single is None and self.n:
            arr = S
            for lvl in range(self.height):
                dg = self._digits(arr, lvl)
                alpha = max(2, int(dg.max()) + 1)
                self.levels.append(make_sequence(dg, alpha, self._backend_at(lvl), **opts))
                cont = self._clen[arr] > lvl + 1
                cd = dg[cont]
                self.Z[lvl, 1:] = np.cumsum(np.bincount(cd, minlength=arity))
                arr = arr[cont][np.argsort(cd, kind="stable")]
            for lvl in range(self.height):
                ends = [(c, a) for a, c in self.code.codes.items() if self.code.lengths[a] == lvl + 1]
                ends.sort()
                self._leaf_codes.append(np.array([c for c, _ in ends], dtype=np.int64))
                self._leaf_syms.append(np.array([a for _, a in ends], dtype=np.int64))

    def _access_many(self, idx):
        if self._single is not None:
            return self._single_access(idx)
        m = idx.size
        pos = idx.copy()
        code = np.zeros(m, dtype=np.int64)
        out = np.empty(m, dtype=np.int64)
        act = np.arange(m)
        for lvl, seq in enumerate(self.levels):
            if act.size == 0:
                break
            dg = seq._access_many(pos[act])
            code[act] = code[act] * self.arity + dg
            lc = self._leaf_codes[lvl]
            done = np.zeros(act.size, dtype=bool)
            if lc.size:
                k = np.minimum(np.searchsorted(lc, code[act]), lc.size - 1)
                done = lc[k] == code[act]
                out[act[done]] = self._leaf_syms[lvl][k[done]]
            cont = act[~done]
            dc = dg[~done]
            pos[cont] = self.Z[lvl, dc] + seq._rank_many(dc, pos[cont])
            act = cont
        return out

    def _rank_many(self, syms, idx):
        if self._single is not None:
            return self._single_rank(syms, idx)
        m = idx.size
        res = np.zeros(m, dtype=np.int64)
        L = self._clen[syms]
        p = np.zeros(m, dtype=np.int64)
        i = idx.copy()
        act = np.flatnonzero(L > 0)
        for lvl, seq in enumerate(self.levels):
            if act.size == 0:
                break
            d = self._digits(syms[act], lvl)
            rp = seq._rank_many(d, p[act])
            ri = seq._rank_many(d, i[act])
            last = L[act] == lvl + 1
            res[act[last]] = ri[last] - rp[last]
            c = ~last
            cont = act[c]
            z = self.Z[lvl, d[c]]
            p[cont] = z + rp[c]
            i[cont] = z + ri[c]
            act = cont
        return res

    def _select_many(self, syms, js):
        if self._single is not None:
            return js - 1
        m = js.size
        L = self._clen[syms]
        H = self.height
        starts = np.zeros((m, H), dtype=np.int64)  # node start at each level
        act = np.arange(m)
        for lvl in range(H - 1):
            act = act[L[act] > lvl + 1]
            if act.size == 0:
                break
            d = self._digits(syms[act], lvl)
            starts[act, lvl + 1] = self.Z[lvl, d] + self.levels[lvl]._rank_many(d, starts[act, lvl])
        q = np.zeros(m, dtype=np.int64)
        for lvl in range(H - 1, -1, -1):
            seq = self.levels[lvl]
            first = np.flatnonzero(L == lvl + 1)
            if first.size:
                d = self._digits(syms[first], lvl)
                base = seq._rank_many(d, starts[first, lvl])
                q[first] = seq._select_many(d, js[first] + base)
            up = np.flatnonzero(L > lvl + 1)
            if up.size:
                d = self._digits(syms[up], lvl)
                q[up] = seq._select_many(d, q[up] - self.Z[lvl, d] + 1)
        return q

    def level_backends(self) -> list[str]:
        return [type(s).__name__ for s in self.levels]

    def space_breakdown(self) -> dict:
        parts = {
            "levels": sum(s.size_in_bits() for s in self.levels),
            "counters": self.Z.size * bits_needed(self.n),
            "code": self._code_table_bits(),
            "counts": self._counts_bits(),
        }
        parts["total"] = sum(parts.values())
        return parts

    def size_in_bits(self) -> int:
        return self.space_breakdown()["total"]


def build_tree(S, shape="balanced", arity=2, backend="plain", **kw) -> WaveletTree:
    return WaveletTree(S, shape, arity, backend, **kw)


def build_matrix(S, shape="balanced", arity=2, backend="plain", **kw) -> WaveletMatrix:
    return WaveletMatrix(S, shape, arity, backend, **kw)
