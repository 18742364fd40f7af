"""Grammar Compression with Counters (GCC).

A balanced RePair grammar ``(R, C)`` is enriched with, for a subset of the
rules, their expansion length and the number of occurrences of every symbol
in their expansion.  A rule is *sampled* (counters stored) when leaving it
unsampled would let some resolution expand more than ``2*delta`` unsampled
rules; unsampled rules are resolved recursively from their children.

Positions are located through samples, either every ``s`` positions of the
original sequence (``GCC.N``, with absolute superblock records every ``s'``
samples and differential records in between) or every ``s`` entries of
``C`` (``GCC.C``).  From a sample we scan ``C`` and then descend one parse
tree, so every query costs a logarithmic number of counter lookups on a
balanced grammar.

When at most two symbols occur, the counters of the last one are not stored:
its count is the expansion length minus the other's count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import _kernels as K
from .base import RangeError, RsaSequence
from .bitio import bits_needed, pack_ints
from .bitvector import PlainBitmap
from .dac import DacArray, optimize_widths
from .repair import Grammar, _lengths, compress, decompress

__all__ = ["GccIndex", "GccConfig"]


@dataclass(frozen=True)
class GccConfig:
    sampling: str = "N"  # "N" (sequence positions) or "C" (entries of C)
    s: int = 1024
    sprime: int = 8
    delta: int = 1
    balanced: bool = True
    dac: object = 4  # fixed chunk width, or "opt" for per-layer optimized widths

    def __post_init__(self):
        if self.sampling not in ("N", "C"):
            raise ValueError("sampling must be 'N' or 'C'")
        if self.s < 1 or self.sprime < 1 or self.delta < 0:
            raise ValueError("need s >= 1, s' >= 1, delta >= 0")


# ---------------------------------------------------------------------------
# construction kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _mark(sigma, rules, delta):
    """Bottom-up sampling: cost(X) = unsampled rules met resolving X."""
    nr = rules.shape[0]
    sampled = np.zeros(nr, dtype=np.bool_)
    cost = np.zeros(nr, dtype=np.int64)
    for k in range(nr):
        c = 1
        for side in range(2):
            y = rules[k, side]
            if y >= sigma:
                c += cost[y - sigma]
        if delta == 0 or c > 2 * delta:
            sampled[k] = True
        else:
            cost[k] = c
    return sampled, cost


@njit(cache=True)
def _symbol_tables(sigma, rules, C, syms, sampled_idx, cpos):
    """Per symbol: counts in sampled rules, and ranks before C[cpos[k]].

    Returns (counters, lrnk, totals) with symbol-major layout.
    """
    nr = rules.shape[0]
    m = syms.shape[0]
    rs = sampled_idx.shape[0]
    ns = cpos.shape[0]
    c = C.shape[0]
    counters = np.empty(m * rs, dtype=np.int64)
    lrnk = np.empty(m * ns, dtype=np.int64)
    totals = np.empty(m, dtype=np.int64)
    cnt = np.zeros(sigma + nr, dtype=np.int64)
    for t in range(m):
        a = syms[t]
        cnt[a] = 1
        for k in range(nr):
            cnt[sigma + k] = cnt[rules[k, 0]] + cnt[rules[k, 1]]
        for q in range(rs):
            counters[t * rs + q] = cnt[sigma + sampled_idx[q]]
        acc = 0
        q = 0
        for p in range(c + 1):
            while q < ns and cpos[q] == p:
                lrnk[t * ns + q] = acc
                q += 1
            if p < c:
                acc += cnt[C[p]]
        totals[t] = acc
        cnt[a] = 0
    return counters, lrnk, totals


# ---------------------------------------------------------------------------
# query kernels
#
# g   = (sigma, Cw, wC, Rw, wR, Bdw, Bds, Sl, Sa, rs)
# smpN = (s, sp, ns, nsup, SSp, wP, SSr, wN, Pd, Od, Ld)
# smpC = (s, ns, St, wN, LR)
# A query symbol is described by (sslot, b, flip): the stored counter slot
# (-1: none), the symbol those counters count, and whether the answer is
# length minus that count.
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _C(g, p):
    return np.int64(K.get_field(g[1], p * g[2], g[2]))


@njit(cache=True, inline="always")
def _child(g, x, side):
    wR = g[4]
    return np.int64(K.get_field(g[3], (2 * (x - g[0]) + side) * wR, wR))


@njit(cache=True)
def _len(g, x, stack):
    sigma = g[0]
    if x < sigma:
        return np.int64(1)
    Bdw = g[5]
    total = 0
    stack[0] = x
    top = 1
    while top > 0:
        top -= 1
        y = stack[top]
        if y < sigma:
            total += 1
            continue
        r = y - sigma
        if K.access_bit(Bdw, r):
            total += K.dac_access(g[7], K.rank1(Bdw, g[6], r))
        else:
            stack[top] = _child(g, y, 0)
            stack[top + 1] = _child(g, y, 1)
            top += 2
    return total


@njit(cache=True)
def _len_cnt(g, x, sslot, b, flip, stack):
    """(length, count) of expansion of x for the query symbol."""
    sigma = g[0]
    if x < sigma:
        hit = np.int64(1) if x == b else np.int64(0)
        return np.int64(1), (1 - hit) if flip else hit
    Bdw = g[5]
    rs = g[9]
    ln = 0
    ct = 0
    stack[0] = x
    top = 1
    while top > 0:
        top -= 1
        y = stack[top]
        if y < sigma:
            ln += 1
            if y == b:
                ct += 1
            continue
        r = y - sigma
        if K.access_bit(Bdw, r):
            k = K.rank1(Bdw, g[6], r)
            ln += K.dac_access(g[7], k)
            if sslot >= 0:
                ct += K.dac_access(g[8], sslot * rs + k)
        else:
            stack[top] = _child(g, y, 0)
            stack[top + 1] = _child(g, y, 1)
            top += 2
    if flip:
        ct = ln - ct
    return np.int64(ln), np.int64(ct)


@njit(cache=True)
def _rank_walk(g, sslot, b, flip, p, l, rnk, i, stack):
    """Occurrences in S[0, i) given that C[p] starts at l <= i with rnk before it."""
    while l < i:
        x = _C(g, p)
        ln, ct = _len_cnt(g, x, sslot, b, flip, stack)
        if l + ln <= i:
            l += ln
            rnk += ct
            p += 1
            continue
        while l < i:
            y = _child(g, x, 0)
            ly, cy = _len_cnt(g, y, sslot, b, flip, stack)
            if l + ly <= i:
                l += ly
                rnk += cy
                x = _child(g, x, 1)
            else:
                x = y
        break
    return rnk


@njit(cache=True)
def _access_walk(g, p, l, i, stack):
    sigma = g[0]
    while True:
        x = _C(g, p)
        ln = _len(g, x, stack)
        if l + ln <= i:
            l += ln
            p += 1
            continue
        while x >= sigma:
            y = _child(g, x, 0)
            ly = _len(g, y, stack)
            if l + ly > i:
                x = y
            else:
                l += ly
                x = _child(g, x, 1)
        return x


@njit(cache=True)
def _select_walk(g, sslot, b, flip, p, l, rnk, j, stack):
    """0-based position of the j-th occurrence; rnk < j occurrences precede C[p]."""
    sigma = g[0]
    while True:
        x = _C(g, p)
        ln, ct = _len_cnt(g, x, sslot, b, flip, stack)
        if rnk + ct < j:
            rnk += ct
            l += ln
            p += 1
            continue
        while x >= sigma:
            y = _child(g, x, 0)
            ly, cy = _len_cnt(g, y, sslot, b, flip, stack)
            if rnk + cy >= j:
                x = y
            else:
                rnk += cy
                l += ly
                x = _child(g, x, 1)
        return l


# --- GCC.N sample access ----------------------------------------------------


@njit(cache=True)
def _sampleN(smp, k):
    s, sp = smp[0], smp[1]
    wP = smp[5]
    J = k // sp
    p = np.int64(K.get_field(smp[4], J * wP, wP)) + K.dac_access(smp[8], k)
    l = k * s - K.dac_access(smp[9], k)
    return p, l


@njit(cache=True)
def _lrnkN(smp, sslot, flip, k, l):
    if sslot < 0:
        v = np.int64(0)
    else:
        ns, nsup, wN = smp[2], smp[3], smp[7]
        J = k // smp[1]
        v = np.int64(K.get_field(smp[6], (sslot * nsup + J) * wN, wN))
        v += K.dac_access(smp[10], sslot * ns + k)
    return l - v if flip else v


@njit(cache=True)
def _locate_selectN(smp, sslot, flip, j):
    sp, ns, nsup = smp[1], smp[2], smp[3]
    lo = 0
    hi = nsup - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        k = mid * sp
        _, l = _sampleN(smp, k)
        if _lrnkN(smp, sslot, flip, k, l) < j:
            lo = mid
        else:
            hi = mid - 1
    hi = min((lo + 1) * sp, ns) - 1
    lo = lo * sp
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        _, l = _sampleN(smp, mid)
        if _lrnkN(smp, sslot, flip, mid, l) < j:
            lo = mid
        else:
            hi = mid - 1
    return lo


@njit(cache=True, nogil=True)
def _accessN(g, smp, idx, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    s = smp[0]
    for q in range(idx.shape[0]):
        i = idx[q]
        p, l = _sampleN(smp, i // s)
        out[q] = _access_walk(g, p, l, i, stack)


@njit(cache=True, nogil=True)
def _rankN(g, smp, sslot, b, flip, idx, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    s = smp[0]
    for q in range(idx.shape[0]):
        i = idx[q]
        if i <= 0:
            out[q] = 0
            continue
        k = (i - 1) // s
        p, l = _sampleN(smp, k)
        rnk = _lrnkN(smp, sslot[q], flip[q], k, l)
        out[q] = _rank_walk(g, sslot[q], b[q], flip[q], p, l, rnk, i, stack)


@njit(cache=True, nogil=True)
def _selectN(g, smp, sslot, b, flip, js, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    for q in range(js.shape[0]):
        j = js[q]
        k = _locate_selectN(smp, sslot[q], flip[q], j)
        p, l = _sampleN(smp, k)
        rnk = _lrnkN(smp, sslot[q], flip[q], k, l)
        out[q] = _select_walk(g, sslot[q], b[q], flip[q], p, l, rnk, j, stack)


# --- GCC.C sample access ----------------------------------------------------


@njit(cache=True, inline="always")
def _startC(smp, k):
    return np.int64(K.get_field(smp[2], k * smp[3], smp[3]))


@njit(cache=True)
def _lrnkC(smp, sslot, flip, k):
    if sslot < 0:
        v = np.int64(0)
    else:
        wN = smp[3]
        v = np.int64(K.get_field(smp[4], (sslot * smp[1] + k) * wN, wN))
    return _startC(smp, k) - v if flip else v


@njit(cache=True)
def _locate_posC(smp, i):
    # last sample whose start is <= i
    lo = 0
    hi = smp[1] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if _startC(smp, mid) <= i:
            lo = mid
        else:
            hi = mid - 1
    return lo


@njit(cache=True, nogil=True)
def _accessC(g, smp, idx, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    s = smp[0]
    for q in range(idx.shape[0]):
        i = idx[q]
        k = _locate_posC(smp, i)
        out[q] = _access_walk(g, k * s, _startC(smp, k), i, stack)


@njit(cache=True, nogil=True)
def _rankC(g, smp, sslot, b, flip, idx, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    s = smp[0]
    for q in range(idx.shape[0]):
        i = idx[q]
        if i <= 0:
            out[q] = 0
            continue
        k = _locate_posC(smp, i - 1)
        rnk = _lrnkC(smp, sslot[q], flip[q], k)
        out[q] = _rank_walk(g, sslot[q], b[q], flip[q], k * s, _startC(smp, k), rnk, i, stack)


@njit(cache=True, nogil=True)
def _selectC(g, smp, sslot, b, flip, js, out, depth):
    stack = np.empty(depth, dtype=np.int64)
    s = smp[0]
    for q in range(js.shape[0]):
        j = js[q]
        lo = 0
        hi = smp[1] - 1
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if _lrnkC(smp, sslot[q], flip[q], mid) < j:
                lo = mid
            else:
                hi = mid - 1
        rnk = _lrnkC(smp, sslot[q], flip[q], lo)
        out[q] = _select_walk(g, sslot[q], b[q], flip[q], lo * s, _startC(smp, lo), rnk, j, stack)


# ---------------------------------------------------------------------------


def _dac(values, spec):
    if spec == "opt":
        return DacArray(values, optimize_widths(values))
    return DacArray(values, int(spec))


class GccIndex(RsaSequence):
    """rank/select/access over a grammar-compressed sequence."""

    def __init__(self, S=None, config: GccConfig | None = None, *, sigma=None,
                 grammar: Grammar | None = None, **kw):
        cfg = config or GccConfig(**kw)
        self.config = cfg
        if grammar is None:
            if S is None:
                raise ValueError("need a sequence or a grammar")
            grammar = compress(S, balanced=cfg.balanced, sigma=sigma)
        G = grammar
        self.grammar = G
        self.sigma = sig = G.sigma
        self.n = n = G.n
        rules = G.rules
        C = G.seq
        nr = rules.shape[0]
        r = sig + nr

        # alphabet actually occurring
        used = np.zeros(sig, dtype=bool)
        used[rules[rules < sig]] = True
        used[C[C < sig]] = True
        self.symbols = np.flatnonzero(used).astype(np.int64)
        m = self.symbols.size
        self._slot = np.full(sig, -1, dtype=np.int64)
        self._slot[self.symbols] = np.arange(m)
        stored = self.symbols[:-1] if m <= 2 else self.symbols
        self._stored = stored

        # rule sampling and counters
        sampled, cost = _mark(sig, rules, cfg.delta)
        self._cost = cost
        sampled_idx = np.flatnonzero(sampled).astype(np.int64)
        self.num_sampled = int(sampled_idx.size)
        self._bd = PlainBitmap(sampled)
        lengths = _lengths(sig, rules)
        self._lengths_all = lengths
        self._sl = _dac(lengths[sig + sampled_idx], cfg.dac)

        starts = np.zeros(C.size + 1, dtype=np.int64)
        np.cumsum(lengths[C], out=starts[1:])
        if cfg.sampling == "N":
            s, sp = cfg.s, cfg.sprime
            ns = (n - 1) // s + 1
            pos = np.arange(ns, dtype=np.int64) * s
            cpos = np.searchsorted(starts, pos, side="right") - 1
            offs = pos - starts[cpos]
        else:
            s = cfg.s
            ns = (C.size - 1) // s + 1
            cpos = np.arange(ns, dtype=np.int64) * s
        counters, lrnk, totals = _symbol_tables(sig, rules, C, stored, sampled_idx, cpos)
        self._totals = np.zeros(sig, dtype=np.int64)
        if m:
            self._totals[stored] = totals
            if m <= 2:
                self._totals[self.symbols[-1]] = n - totals.sum()
        rs = sampled_idx.size
        self._rs = rs
        self._sa = _dac(counters, cfg.dac) if counters.size else None

        self._cw, self._wc = pack_ints(C, bits_needed(max(r - 1, 1)))
        self._rw, self._wr = pack_ints(rules.reshape(-1), bits_needed(max(r - 1, 1)))
        wN = bits_needed(n)
        self._wn = wN
        self._ns = ns
        if cfg.sampling == "N":
            nsup = (ns - 1) // sp + 1
            sup_k = np.arange(nsup) * sp
            blk = np.arange(ns) // sp
            pstar = cpos[sup_k]
            self._ssp, self._wp = pack_ints(pstar, bits_needed(max(C.size - 1, 1)))
            lr = lrnk.reshape(stored.size, ns)
            lstar = lr[:, sup_k]
            self._ssr, _ = pack_ints(lstar.reshape(-1), wN)
            self._pd = _dac(cpos - pstar[blk], cfg.dac)
            self._od = _dac(offs, cfg.dac)
            self._ld = _dac((lr - lstar[:, blk]).reshape(-1), cfg.dac) if lr.size else None
            self._nsup = nsup
        else:
            self._st, _ = pack_ints(starts[cpos], wN)
            self._lr, _ = pack_ints(lrnk, wN)
        self._depth = 4 * max(cfg.delta, 1) + 8
        self._build_kernel_args()
        self._query_cache = {}

    # -- kernel plumbing ---------------------------------------------------

    def _build_kernel_args(self):
        empty = DacArray([0], 1).kernel_arrays()
        sa = self._sa.kernel_arrays() if self._sa is not None else empty
        self._g = (
            np.int64(self.sigma), self._cw, np.int64(self._wc), self._rw, np.int64(self._wr),
            self._bd.words, self._bd.supers, self._sl.kernel_arrays(), sa, np.int64(self._rs),
        )
        cfg = self.config
        if cfg.sampling == "N":
            ld = self._ld.kernel_arrays() if self._ld is not None else empty
            self._smp = (
                np.int64(cfg.s), np.int64(cfg.sprime), np.int64(self._ns), np.int64(self._nsup),
                self._ssp, np.int64(self._wp), self._ssr, np.int64(self._wn),
                self._pd.kernel_arrays(), self._od.kernel_arrays(), ld,
            )
        else:
            self._smp = (np.int64(cfg.s), np.int64(self._ns), self._st, np.int64(self._wn), self._lr)

    @property
    def _kernels(self):
        if self.config.sampling == "N":
            return _accessN, _rankN, _selectN
        return _accessC, _rankC, _selectC

    def _qsym(self, a):  # scalar form, used by resolve()
        """(stored slot, counted symbol, flip) describing query symbol ``a``."""
        m = self.symbols.size
        slot = int(self._slot[a])
        if m <= 2 and slot == m - 1:
            if m == 2:
                return 0, int(self.symbols[0]), 1
            return -1, -1, 1
        return slot, int(a), 0

    def _qsym_arrays(self, syms):
        syms = np.asarray(syms, dtype=np.int64)
        m = self.symbols.size
        slot = self._slot[syms]
        b = syms.copy()
        flip = np.zeros(syms.size, dtype=np.int64)
        if m <= 2:
            last = slot == m - 1
            flip[last] = 1
            slot = np.where(last, 0 if m == 2 else -1, slot)
            b[last] = self.symbols[0] if m == 2 else -1
        return slot, b, flip

    # -- protocol --------------------------------------------------------------

    def count(self, a) -> int:
        return int(self._totals[a]) if 0 <= a < self.sigma else 0

    def _count_many(self, syms):
        return self._totals[syms]

    def _access_many(self, idx):
        out = np.empty(idx.size, dtype=np.int64)
        self._kernels[0](self._g, self._smp, idx, out, self._depth)
        return out

    def _rank_many(self, syms, idx):
        out = np.zeros(idx.size, dtype=np.int64)
        ok = self._slot[syms] >= 0
        sl, b, f = self._qsym_arrays(syms[ok])
        res = np.empty(int(ok.sum()), dtype=np.int64)
        self._kernels[1](self._g, self._smp, sl, b, f, idx[ok], res, self._depth)
        out[ok] = res
        return out

    def _select_many(self, syms, js):
        sl, b, f = self._qsym_arrays(syms)
        out = np.empty(js.size, dtype=np.int64)
        self._kernels[2](self._g, self._smp, sl, b, f, js, out, self._depth)
        return out

    def _access(self, i):
        return int(self._access_many(np.array([i], dtype=np.int64))[0])

    def _rank(self, a, i):
        if self._slot[a] < 0:
            return 0
        return int(self._rank_many(np.array([a], dtype=np.int64), np.array([i], dtype=np.int64))[0])

    # -- counter resolution (instrumented, pure Python) ----------------------

    def is_sampled(self, x: int) -> bool:
        return x >= self.sigma and bool(self._bd._access(x - self.sigma))

    def resolve(self, x: int, a=None):
        """(length, count of ``a`` or None, unsampled rules visited) for symbol ``x``."""
        sig = self.sigma
        if not 0 <= x < sig + self.grammar.num_rules:
            raise RangeError(f"symbol id {x} outside [0, {sig + self.grammar.num_rules})")
        if a is not None and 0 <= a < sig and self._slot[a] >= 0:
            sl, b, f = self._qsym(a)
        else:
            sl, b, f = -1, -1, 0  # no symbol, or one absent from the sequence
        rules = self.grammar.rules
        ln = ct = visits = 0
        stack = [x]
        while stack:
            y = stack.pop()
            if y < sig:
                ln += 1
                ct += y == b
                continue
            r = y - sig
            if self._bd._access(r):
                k = self._bd.rank1(r)
                ln += self._sl._get(k)
                if a is not None and sl >= 0:
                    ct += self._sa._get(sl * self._rs + k)
            else:
                visits += 1
                stack.append(int(rules[r, 1]))
                stack.append(int(rules[r, 0]))
        if a is None:
            return ln, None, visits
        return ln, (ln - ct if f else ct), visits

    def resolve_length(self, x: int) -> int:
        return self.resolve(x)[0]

    def resolve_count(self, x: int, a: int) -> int:
        return self.resolve(x, a)[1]

    # -- space ----------------------------------------------------------------

    def space_breakdown(self) -> dict:
        G = self.grammar
        cfg = self.config
        parts = {
            "rules": 2 * G.num_rules * self._wr,
            "sequence": G.c * self._wc,
            "sampled_bitmap": self._bd.size_in_bits(),
            "lengths": self._sl.size_in_bits(),
            "counters": self._sa.size_in_bits() if self._sa is not None else 0,
            "alphabet": self.sigma + self._stored.size * self._wn,
        }
        if cfg.sampling == "N":
            smp = (self._nsup * self._wp + self._nsup * self._stored.size * self._wn
                   + self._pd.size_in_bits() + self._od.size_in_bits()
                   + (self._ld.size_in_bits() if self._ld is not None else 0))
        else:
            smp = self._ns * self._wn * (1 + self._stored.size)
        parts["samples"] = smp
        parts["total"] = sum(parts.values())
        return parts

    def size_in_bits(self) -> int:
        return self.space_breakdown()["total"]

    def decode(self) -> np.ndarray:
        """The whole sequence, expanded straight from the grammar."""
        return decompress(self.grammar)
