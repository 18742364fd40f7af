"""RePair grammar compression.

The compressor repeatedly replaces the most frequent adjacent pair with a new
nonterminal until no pair occurs twice.  Terminals are ``0 .. sigma-1``;
rule ``k`` defines symbol ``sigma + k``, so every rule only references older
symbols.

Pair selection uses a lazy max-heap keyed on ``(-frequency, age)``.  Initial
pairs get their age from their first occurrence.  With ``balanced=True`` a
pair created by a replacement is younger than every existing pair, so it
queues behind older pairs of equal frequency; otherwise it jumps ahead of
them.  Runs ``aaa...`` contribute only non-overlapping occurrences of ``aa``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, types
from numba.typed import Dict, List

from .bitio import pack_ints, unpack_ints

__all__ = [
    "Grammar",
    "GrammarStats",
    "GrammarError",
    "compress",
    "decompress",
    "expand_prefix",
    "parse_height",
    "grammar_stats",
]


class GrammarError(ValueError):
    """Malformed grammar or invalid compressor input."""


# pair table columns
_A, _B, _FREQ, _HEAD, _TAIL, _KEY, _VER, _PASS = range(8)


@njit(cache=True)
def _grow(P):
    Q = np.empty((P.shape[0] * 2, P.shape[1]), dtype=np.int64)
    Q[: P.shape[0]] = P
    return Q


@njit(cache=True)
def _pair_id(table, P, npairs, a, b, key):
    k = (np.int64(a) << 32) | np.int64(b)
    if k in table:
        return table[k], P, npairs
    if npairs == P.shape[0]:
        P = _grow(P)
    pid = np.int64(npairs)
    P[pid, _A] = a
    P[pid, _B] = b
    P[pid, _FREQ] = 0
    P[pid, _HEAD] = -1
    P[pid, _TAIL] = -1
    P[pid, _KEY] = key
    P[pid, _VER] = 0
    P[pid, _PASS] = -1
    table[k] = pid
    return pid, P, npairs + 1


@njit(cache=True)
def _register(P, onext, oprev, opid, pos, pid):
    opid[pos] = pid
    onext[pos] = -1
    t = P[pid, _TAIL]
    oprev[pos] = t
    if t != -1:
        onext[t] = pos
    else:
        P[pid, _HEAD] = pos
    P[pid, _TAIL] = pos
    P[pid, _FREQ] += 1


@njit(cache=True)
def _unregister(P, onext, oprev, opid, pos):
    pid = opid[pos]
    if pid < 0:
        return -1
    pr = oprev[pos]
    nx = onext[pos]
    if pr != -1:
        onext[pr] = nx
    else:
        P[pid, _HEAD] = nx
    if nx != -1:
        oprev[nx] = pr
    else:
        P[pid, _TAIL] = pr
    P[pid, _FREQ] -= 1
    opid[pos] = -1
    return pid


@njit(cache=True)
def _is_pair(P, opid, pos, a, b):
    if pos < 0:
        return False
    pid = opid[pos]
    return pid >= 0 and P[pid, _A] == a and P[pid, _B] == b


@njit(cache=True)
def _repair(seq, sigma, balanced):
    n = seq.shape[0]
    sym = seq.astype(np.int32)
    nxt = np.arange(1, n + 1, dtype=np.int32)
    nxt[n - 1] = -1
    prv = np.arange(-1, n - 1, dtype=np.int32)
    onext = np.full(n, -1, dtype=np.int32)
    oprev = np.full(n, -1, dtype=np.int32)
    opid = np.full(n, -1, dtype=np.int32)

    P = np.empty((1024, 8), dtype=np.int64)
    npairs = 0
    table = Dict.empty(key_type=types.int64, value_type=types.int64)
    counter = 0

    for i in range(n - 1):
        a = sym[i]
        b = sym[i + 1]
        if a == b and _is_pair(P, opid, i - 1, a, a):
            continue  # overlapping occurrence inside a run
        before = npairs
        pid, P, npairs = _pair_id(table, P, npairs, a, b, counter)
        counter += npairs - before
        _register(P, onext, oprev, opid, i, pid)

    heap = [(np.int64(0), np.int64(0), np.int64(0), np.int64(0))]
    heap.pop()
    for pid in range(npairs):
        if P[pid, _FREQ] >= 2:
            heap.append((-P[pid, _FREQ], P[pid, _KEY], np.int64(pid), P[pid, _VER]))
    heapq.heapify(heap)

    left = List.empty_list(types.int64)
    right = List.empty_list(types.int64)
    touched = List.empty_list(types.int64)
    next_sym = sigma
    npass = 0
    occ = np.empty(16, dtype=np.int32)

    while len(heap) > 0:
        negf, key, pid, ver = heapq.heappop(heap)
        if P[pid, _VER] != ver or P[pid, _FREQ] != -negf:
            continue
        if -negf < 2:
            break
        X = next_sym
        next_sym += 1
        a = P[pid, _A]
        b = P[pid, _B]
        left.append(a)
        right.append(b)

        f = P[pid, _FREQ]
        if occ.shape[0] < f:
            occ = np.empty(2 * f, dtype=np.int32)
        k = 0
        pos = P[pid, _HEAD]
        while pos != -1:
            occ[k] = pos
            k += 1
            pos = onext[pos]
        occ[:k].sort()

        touched.clear()
        for t in range(k):
            i = occ[t]
            if opid[i] != pid:
                continue
            j = nxt[i]
            x = prv[i]
            y = nxt[j]
            _unregister(P, onext, oprev, opid, i)
            if x != -1:
                q = _unregister(P, onext, oprev, opid, x)
                if q >= 0 and P[q, _PASS] != npass:
                    P[q, _PASS] = npass
                    touched.append(q)
            q = _unregister(P, onext, oprev, opid, j)
            if q >= 0 and P[q, _PASS] != npass:
                P[q, _PASS] = npass
                touched.append(q)
            if q >= 0 and y != -1 and P[q, _A] == P[q, _B]:
                # j opened a run of equal symbols; the run now starts at y, so
                # its non-overlapping occurrences move to the other parity
                c = P[q, _A]
                p = y
                even = True
                while p != -1 and nxt[p] != -1 and sym[nxt[p]] == c:
                    _unregister(P, onext, oprev, opid, p)
                    if even:
                        _register(P, onext, oprev, opid, p, q)
                    even = not even
                    p = nxt[p]
            sym[i] = X
            sym[j] = -1
            nxt[i] = y
            if y != -1:
                prv[y] = i
            if x != -1:
                xs = sym[x]
                if not (xs == X and _is_pair(P, opid, prv[x], X, X)):
                    nkey = counter if balanced else -counter
                    before = npairs
                    q, P, npairs = _pair_id(table, P, npairs, xs, X, nkey)
                    counter += npairs - before
                    _register(P, onext, oprev, opid, x, q)
                    if P[q, _PASS] != npass:
                        P[q, _PASS] = npass
                        touched.append(q)
            if y != -1:
                nkey = counter if balanced else -counter
                before = npairs
                q, P, npairs = _pair_id(table, P, npairs, X, sym[y], nkey)
                counter += npairs - before
                _register(P, onext, oprev, opid, i, q)
                if P[q, _PASS] != npass:
                    P[q, _PASS] = npass
                    touched.append(q)

        P[pid, _VER] += 1
        for q in touched:
            P[q, _VER] += 1
            if P[q, _FREQ] >= 2:
                heapq.heappush(heap, (-P[q, _FREQ], P[q, _KEY], q, P[q, _VER]))
        npass += 1

    nrules = len(left)
    rules = np.empty((nrules, 2), dtype=np.int64)
    for r in range(nrules):
        rules[r, 0] = left[r]
        rules[r, 1] = right[r]
    c = 0
    pos = 0
    while pos != -1:
        c += 1
        pos = nxt[pos]
    C = np.empty(c, dtype=np.int64)
    pos = 0
    for t in range(c):
        C[t] = sym[pos]
        pos = nxt[pos]
    return rules, C


@njit(cache=True)
def _lengths(sigma, rules):
    nr = rules.shape[0]
    ln = np.ones(sigma + nr, dtype=np.int64)
    for k in range(nr):
        ln[sigma + k] = ln[rules[k, 0]] + ln[rules[k, 1]]
    return ln


@njit(cache=True)
def _heights(sigma, rules):
    nr = rules.shape[0]
    h = np.zeros(sigma + nr, dtype=np.int64)
    for k in range(nr):
        h[sigma + k] = 1 + max(h[rules[k, 0]], h[rules[k, 1]])
    return h


@njit(cache=True)
def _expand(sigma, rules, C, out, limit):
    stack = np.empty(64, dtype=np.int64)
    k = 0
    for p in range(C.shape[0]):
        top = 0
        stack[0] = C[p]
        top = 1
        while top > 0:
            top -= 1
            x = stack[top]
            if x < sigma:
                out[k] = x
                k += 1
                if k == limit:
                    return k
            else:
                if top + 2 > stack.shape[0]:
                    bigger = np.empty(stack.shape[0] * 2, dtype=np.int64)
                    bigger[:top] = stack[:top]
                    stack = bigger
                stack[top] = rules[x - sigma, 1]
                stack[top + 1] = rules[x - sigma, 0]
                top += 2
    return k


@dataclass(frozen=True)
class GrammarStats:
    r: int  # terminals plus nonterminals
    c: int
    sigma: int
    n: int
    height: int
    bits_plain: int

    @property
    def bps(self) -> float:
        return self.bits_plain / self.n


@dataclass(eq=False)
class Grammar:
    """RePair output: ``rules[k] = (left, right)`` defines symbol ``sigma + k``."""

    sigma: int
    rules: np.ndarray
    seq: np.ndarray
    n: int
    _lengths: np.ndarray | None = field(default=None, repr=False)

    @property
    def num_rules(self) -> int:
        return int(self.rules.shape[0])

    @property
    def r(self) -> int:
        return self.sigma + self.num_rules

    @property
    def c(self) -> int:
        return int(self.seq.shape[0])

    def is_terminal(self, x: int) -> bool:
        return 0 <= x < self.sigma

    def rule(self, x: int) -> tuple[int, int]:
        if not self.sigma <= x < self.r:
            raise GrammarError(f"{x} is not a nonterminal")
        y, z = self.rules[x - self.sigma]
        return int(y), int(z)

    def lengths(self) -> np.ndarray:
        """``lengths()[x]`` is the expansion length of symbol ``x``."""
        if self._lengths is None:
            self._lengths = _lengths(self.sigma, self.rules)
        return self._lengths

    def validate(self) -> None:
        ids = self.sigma + np.arange(self.num_rules)
        if self.num_rules and (
            (self.rules < 0).any() or (self.rules >= ids[:, None]).any()
        ):
            raise GrammarError("rule references a symbol that is not older than itself")
        if self.c and ((self.seq < 0).any() or (self.seq >= self.r).any()):
            raise GrammarError("reduced sequence references an undefined symbol")
        if int(self.lengths()[self.seq].sum()) != self.n:
            raise GrammarError("expansion length does not match n")

    def to_bytes(self) -> bytes:
        """Header (sigma, r, c, n as u64 LE) then rules and C as ceil(lg r)-bit fields."""
        width = max(1, math.ceil(math.log2(self.r))) if self.r > 1 else 1
        head = np.array([self.sigma, self.r, self.c, self.n], dtype="<u8").tobytes()
        rw, _ = pack_ints(self.rules.reshape(-1), width)
        cw, _ = pack_ints(self.seq, width)
        return head + rw.astype("<u8").tobytes() + cw.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Grammar":
        sigma, r, c, n = (int(v) for v in np.frombuffer(data[:32], dtype="<u8"))
        width = max(1, math.ceil(math.log2(r))) if r > 1 else 1
        nr = r - sigma
        words = np.frombuffer(data[32:], dtype="<u8").astype(np.uint64)
        rwords = max(1, (2 * nr * width + 63) // 64)
        rules = unpack_ints(words[:rwords], width, 2 * nr).reshape(nr, 2)
        seq = unpack_ints(words[rwords:], width, c)
        g = cls(sigma, rules, seq, n)
        g.validate()
        return g


def compress(S, balanced: bool = True, sigma: int | None = None) -> Grammar:
    """RePair-compress ``S`` (non-negative integer symbols below ``sigma``)."""
    S = np.ascontiguousarray(S, dtype=np.int64)
    if S.ndim != 1 or S.size == 0:
        raise GrammarError("cannot compress an empty sequence")
    lo, hi = int(S.min()), int(S.max())
    if lo < 0:
        raise GrammarError("symbols must be non-negative")
    if sigma is None:
        sigma = hi + 1
    elif hi >= sigma:
        raise GrammarError(f"symbol {hi} outside alphabet of size {sigma}")
    if sigma + S.size >= 2**31:
        raise GrammarError("sequence too long for 32-bit symbol ids")
    rules, C = _repair(S, sigma, balanced)
    return Grammar(sigma, rules, C, int(S.size))


def decompress(G: Grammar) -> np.ndarray:
    G.validate()
    out = np.empty(G.n, dtype=np.int64)
    k = _expand(G.sigma, G.rules, G.seq, out, G.n)
    if k != G.n:
        raise GrammarError("expansion length does not match n")
    return out


def expand_prefix(G: Grammar, x: int, k: int) -> np.ndarray:
    """First ``k`` terminals of ``exp(x)``."""
    if not 0 <= x < G.r:
        raise GrammarError(f"unknown symbol {x}")
    k = min(k, int(G.lengths()[x]))
    out = np.empty(k, dtype=np.int64)
    if k == 0:
        return out
    got = _expand(G.sigma, G.rules, np.array([x], dtype=np.int64), out, k)
    return out[:got]


def parse_height(G: Grammar) -> int:
    """Maximum derivation depth over the symbols of C (terminals have height 0)."""
    if G.c == 0:
        return 0
    return int(_heights(G.sigma, G.rules)[G.seq].max())


def grammar_stats(G: Grammar) -> GrammarStats:
    r = G.r
    width = math.ceil(math.log2(r)) if r > 1 else 1
    bits = (2 * (r - G.sigma) + G.c) * width
    return GrammarStats(r, G.c, G.sigma, G.n, parse_height(G), bits)
