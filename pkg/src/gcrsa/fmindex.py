"""FM-index ``count`` by backward search over a BWT held in any rsa structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .bitio import bits_needed
from .structures import build_structure

__all__ = ["FmIndex", "BwtStats", "suffix_array", "bwt", "bwt_runs", "as_symbols"]


def as_symbols(text) -> np.ndarray:
    """Integer symbols of a str / bytes / integer sequence."""
    if isinstance(text, str):
        return np.frombuffer(text.encode("utf-32-le"), dtype="<u4").astype(np.int64)
    if isinstance(text, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(text), dtype=np.uint8).astype(np.int64)
    return np.ascontiguousarray(text, dtype=np.int64)


@njit(cache=True)
def _doubling(x, sigma):
    """Suffix array of ``x`` whose last symbol is a unique minimum 0.

    Manber-Myers prefix doubling: each round orders the suffixes by their
    first ``2h`` symbols with one bucket pass over the current order.  A
    suffix's rank is the start of its group in the current order.
    """
    n = x.shape[0]
    cnt = np.zeros(sigma + 1, dtype=np.int64)
    for i in range(n):
        cnt[x[i] + 1] += 1
    for a in range(sigma):
        cnt[a + 1] += cnt[a]
    sa = np.empty(n, dtype=np.int64)
    rank = np.empty(n, dtype=np.int64)
    fill = cnt[:sigma].copy()
    for i in range(n):
        rank[i] = cnt[x[i]]
        sa[fill[x[i]]] = i
        fill[x[i]] += 1
    nxt = np.empty(n, dtype=np.int64)
    tmp = np.empty(n, dtype=np.int64)
    new = np.empty(n, dtype=np.int64)
    h = 1
    while True:
        for p in range(n):
            nxt[p] = p
        # suffixes shorter than h+1 hold the terminator: alone in their group
        for j in range(n - h, n):
            r = rank[j]
            tmp[nxt[r]] = j
            nxt[r] += 1
        for p in range(n):
            j = sa[p] - h
            if j >= 0:
                r = rank[j]
                tmp[nxt[r]] = j
                nxt[r] += 1
        groups = 0
        start = 0
        for p in range(n):
            j = tmp[p]
            second = rank[j + h] if j + h < n else -1
            if p == 0:
                start = 0
                groups = 1
            else:
                q = tmp[p - 1]
                qs = rank[q + h] if q + h < n else -1
                if rank[q] != rank[j] or qs != second:
                    start = p
                    groups += 1
            new[j] = start
        sa, tmp = tmp, sa
        rank, new = new, rank
        if groups == n:
            return sa
        h *= 2


def suffix_array(T) -> np.ndarray:
    """Suffix array of ``T`` (0-based; a proper prefix sorts first), by prefix doubling."""
    T = np.asarray(T)
    n = T.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    syms, dense = np.unique(T, return_inverse=True)
    x = np.empty(n + 1, dtype=np.int64)
    x[:n] = dense.reshape(-1) + 1
    x[n] = 0  # sentinel smaller than every symbol
    return _doubling(x, syms.size + 1)[1:]


def _terminated(text) -> np.ndarray:
    s = as_symbols(text)
    if s.size and s.min() < 0:
        raise ValueError("symbols must be non-negative")
    return np.concatenate([s + 1, [0]])


def bwt(text) -> np.ndarray:
    """BWT of ``text`` + terminator, with symbols shifted by one and 0 the terminator."""
    T = _terminated(text)
    sa = suffix_array(T)
    return T[sa - 1]  # sa == 0 wraps to the terminator


@dataclass(frozen=True)
class BwtStats:
    runs: int  # maximal equal-symbol runs of the BWT, terminator included
    n: int  # text length, terminator excluded

    @property
    def ratio(self) -> float:
        return self.runs / self.n if self.n else 0.0


def _runs(L) -> int:
    return int(1 + np.count_nonzero(L[1:] != L[:-1])) if L.size else 0


def bwt_runs(text) -> BwtStats:
    L = bwt(text)
    return BwtStats(_runs(L), int(L.size) - 1)


@njit(cache=True)
def _invert(L, lf):
    n = L.shape[0] - 1
    out = np.empty(n, dtype=np.int64)
    i = 0  # row of the terminator suffix
    for k in range(n - 1, -1, -1):
        out[k] = L[i] - 1
        i = lf[i]
    return out


class FmIndex:
    """Counts pattern occurrences with ``rank`` on the BWT."""

    def __init__(self, text=None, structure: str = "GCC_N", *, _bwt=None, **params):
        if _bwt is None:
            T = _terminated(text)
            if T.size < 2:
                raise ValueError("empty text")
            L = T[suffix_array(T) - 1]
        else:
            L = np.asarray(_bwt, dtype=np.int64)
        self.structure = structure
        self.params = params
        self.n = int(L.size)  # includes the terminator
        self.sigma = int(L.max()) + 1
        freqs = np.bincount(L, minlength=self.sigma)
        self.C = np.concatenate([[0], np.cumsum(freqs)]).astype(np.int64)
        self.runs = _runs(L)
        self.bwt = build_structure(structure, L, **params)

    @property
    def text_length(self) -> int:
        return self.n - 1

    def stats(self) -> BwtStats:
        return BwtStats(self.runs, self.n - 1)

    def _prep(self, pattern):
        p = as_symbols(pattern)
        if p.size == 0:
            raise ValueError("empty pattern")
        return p + 1

    def count(self, pattern) -> int:
        p = self._prep(pattern)
        if p.min() < 1 or p.max() >= self.sigma:
            return 0
        sp, ep = 1, self.n
        for a in p[::-1].tolist():
            sp = int(self.C[a]) + self.bwt.rank(a, sp - 1) + 1
            ep = int(self.C[a]) + self.bwt.rank(a, ep)
            if sp > ep:
                return 0
        return ep - sp + 1

    def count_many(self, patterns) -> np.ndarray:
        """``count`` of every pattern, backward search run in lockstep."""
        pats = [self._prep(p) for p in patterns]
        m = len(pats)
        out = np.zeros(m, dtype=np.int64)
        if m == 0:
            return out
        lens = np.array([p.size for p in pats])
        ok = np.array([p.min() >= 1 and p.max() < self.sigma for p in pats])
        width = int(lens.max())
        P = np.zeros((m, width), dtype=np.int64)
        for q, p in enumerate(pats):
            P[q, width - p.size:] = p  # right-aligned
        sp = np.ones(m, dtype=np.int64)
        ep = np.full(m, self.n, dtype=np.int64)
        alive = ok.copy()
        for col in range(width - 1, -1, -1):
            act = np.flatnonzero(alive & (lens >= width - col))
            if act.size == 0:
                continue
            a = P[act, col]
            base = self.C[a]
            sp[act] = base + self.bwt.rank_many(a, sp[act] - 1) + 1
            ep[act] = base + self.bwt.rank_many(a, ep[act])
            alive[act[sp[act] > ep[act]]] = False
        out[alive] = (ep - sp + 1)[alive]
        return out

    def bwt_sequence(self) -> np.ndarray:
        return self.bwt.decode()

    def invert(self) -> np.ndarray:
        """Original text (as integer symbols) recovered through LF steps."""
        L = self.bwt_sequence()
        lf = np.empty(L.size, dtype=np.int64)
        lf[np.argsort(L, kind="stable")] = np.arange(L.size)
        return _invert(L, lf)

    def space_breakdown(self) -> dict:
        parts = {"bwt": self.bwt.size_in_bits(), "C": self.C.size * bits_needed(self.n)}
        parts["total"] = sum(parts.values())
        return parts

    def size_in_bits(self) -> int:
        return self.space_breakdown()["total"]
