"""Naive reference implementations, used as ground truth in tests.

Nothing here imports the structures under test.  Positions are 1-based,
as in the public rsa API.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "naive_access", "naive_rank", "naive_select", "naive_count", "naive_count_many",
    "naive_suffix_array", "naive_bwt", "NaiveRsa",
    "naive_access_many", "naive_rank_many", "naive_select_many",
]


def _seq(S):
    if isinstance(S, (str, bytes)):
        return list(S)
    return [int(x) for x in S]


def _arr(S) -> np.ndarray:
    if isinstance(S, np.ndarray):
        return S.astype(np.int64, copy=False).ravel()
    return np.asarray(_seq(S), dtype=np.int64)


def naive_access(S, i: int):
    S = _seq(S)
    if not 1 <= i <= len(S):
        raise IndexError(f"position {i} outside [1, {len(S)}]")
    return S[i - 1]


def naive_rank(S, a, i: int) -> int:
    S = _seq(S)
    if not 0 <= i <= len(S):
        raise IndexError(f"position {i} outside [0, {len(S)}]")
    return sum(1 for x in S[:i] if x == a)


def naive_select(S, a, j: int) -> int:
    S = _seq(S)
    if j < 0:
        raise IndexError("negative rank")
    if j == 0:
        return 0
    seen = 0
    for p, x in enumerate(S, 1):
        if x == a:
            seen += 1
            if seen == j:
                return p
    raise IndexError(f"fewer than {j} occurrences of {a!r}")


def naive_count(text, pattern) -> int:
    """Occurrences of ``pattern`` in ``text``, overlaps included."""
    T, P = _seq(text), _seq(pattern)
    if not P:
        raise ValueError("empty pattern")
    m = len(P)
    return sum(1 for k in range(len(T) - m + 1) if T[k:k + m] == P)


def naive_count_many(text, patterns) -> np.ndarray:
    """``naive_count`` for many patterns, by sorting the windows of each length."""
    T = _arr(text)
    out = np.zeros(len(patterns), dtype=np.int64)
    by_len: dict[int, list[int]] = {}
    for q, p in enumerate(patterns):
        if len(p) == 0:
            raise ValueError("empty pattern")
        by_len.setdefault(len(p), []).append(q)
    top = max(int(T.max()) if T.size else 0, max(int(max(_seq(patterns[q]))) for q in range(len(patterns))))
    bits = max(1, top.bit_length())
    for m, qs in by_len.items():
        if m > T.size:
            continue
        if m * bits <= 63:  # windows packed exactly into one integer each
            keys = np.zeros(T.size - m + 1, dtype=np.int64)
            for k in range(m):
                keys = (keys << bits) | T[k:T.size - m + 1 + k]
            keys = np.sort(keys)

            def key(p):
                v = 0
                for x in p:
                    v = (v << bits) | int(x)
                return v
        else:
            win = np.lib.stride_tricks.sliding_window_view(T, m)
            keys = np.sort(np.ascontiguousarray(win).view([("", np.int64)] * m).ravel())

            def key(p):
                return np.array(tuple(int(x) for x in p), dtype=keys.dtype)
        for q in qs:
            p = _seq(patterns[q])
            if min(p) < 0:
                continue
            k = key(p)
            out[q] = np.searchsorted(keys, k, "right") - np.searchsorted(keys, k, "left")
    return out


def _occurrence_keys(S: np.ndarray) -> tuple[np.ndarray, int]:
    """Sorted keys ``a * (n + 1) + p`` of every occurrence (1-based ``p``)."""
    n = S.size
    return np.sort(S * (n + 1) + np.arange(1, n + 1)), n + 1


def naive_access_many(S, idx) -> np.ndarray:
    S = _arr(S)
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 1 or idx.max() > S.size):
        raise IndexError("position out of range")
    return S[idx - 1]


def naive_rank_many(S, syms, idx) -> np.ndarray:
    """``rank_a(S, i)`` for paired arrays: occurrences of ``a`` with position <= ``i``."""
    S = _arr(S)
    syms = np.asarray(syms, dtype=np.int64)
    idx = np.asarray(idx, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() > S.size):
        raise IndexError("position out of range")
    keys, w = _occurrence_keys(S)
    return np.searchsorted(keys, syms * w + idx, "right") - np.searchsorted(keys, syms * w, "right")


def naive_select_many(S, syms, js) -> np.ndarray:
    """``select_a(S, j)`` for paired arrays, ``0`` for ``j = 0``."""
    S = _arr(S)
    syms = np.asarray(syms, dtype=np.int64)
    js = np.asarray(js, dtype=np.int64)
    keys, w = _occurrence_keys(S)
    first = np.searchsorted(keys, syms * w, "right")
    total = np.searchsorted(keys, syms * w + w - 1, "right") - first
    if js.size and (js.min() < 0 or (js > total).any()):
        raise IndexError("rank out of range")
    out = np.zeros(js.size, dtype=np.int64)
    hit = js > 0
    out[hit] = keys[first[hit] + js[hit] - 1] - syms[hit] * w
    return out


def naive_suffix_array(T) -> list[int]:
    """0-based suffix array by sorting the suffixes themselves."""
    T = _seq(T)
    return sorted(range(len(T)), key=lambda k: T[k:])


def naive_bwt(text) -> list[int]:
    """BWT of ``text`` (symbols shifted by one) followed by the terminator 0."""
    T = [x + 1 for x in _seq(text)] + [0]
    return [T[k - 1] for k in naive_suffix_array(T)]


class NaiveRsa:
    """rsa by precomputed occurrence lists; fast enough for large test inputs."""

    def __init__(self, S):
        self.S = _arr(S)
        self.n = int(self.S.size)
        self._occ = {}
        if self.n:
            order = np.argsort(self.S, kind="stable")
            syms, starts = np.unique(self.S[order], return_index=True)
            ends = list(starts[1:]) + [self.n]
            for a, b, e in zip(syms.tolist(), starts, ends):
                self._occ[a] = order[b:e] + 1

    def access(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return int(self.S[i - 1])

    def rank(self, a, i: int) -> int:
        if not 0 <= i <= self.n:
            raise IndexError(i)
        occ = self._occ.get(a)
        return 0 if occ is None else int(np.searchsorted(occ, i, "right"))

    def select(self, a, j: int) -> int:
        if j == 0:
            return 0
        occ = self._occ.get(a)
        if occ is None or not 1 <= j <= occ.size:
            raise IndexError(j)
        return int(occ[j - 1])

    def count(self, a) -> int:
        occ = self._occ.get(a)
        return 0 if occ is None else int(occ.size)
