"""Common query protocol for every rank/select/access structure.

Public methods use 1-based positions: ``access(i)`` for ``1 <= i <= n``,
``rank(a, i)`` counts ``a`` in ``S[1, i]`` and ``select(a, j)`` returns the
position of the ``j``-th ``a``, with ``rank(a, 0) == select(a, 0) == 0``.
The ``*_many`` variants answer arrays of queries with the same semantics.

Subclasses implement unchecked hooks, scalar or batched (each defaults to
the other):

* ``_access(i)`` / ``_access_many(idx)`` -- ``i`` 0-based;
* ``_rank(a, i)`` / ``_rank_many(syms, idx)`` -- occurrences of ``a`` in the
  first ``i`` symbols;
* ``_select(a, j)`` / ``_select_many(syms, js)`` -- 0-based position of the
  ``j``-th ``a`` (``j >= 1`` and at most the count of ``a``).
"""

from __future__ import annotations

import numpy as np


class RangeError(IndexError):
    """A position, rank or symbol argument outside the valid range."""


def _i64(x) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(x, dtype=np.int64).reshape(-1))


class RsaSequence:
    n: int = 0
    sigma: int | None = None  # symbols must lie in [0, sigma) when set

    def __len__(self):
        return self.n

    # -- hooks -----------------------------------------------------------------

    def _access(self, i):
        return int(self._access_many(np.array([i], dtype=np.int64))[0])

    def _rank(self, a, i):
        return int(self._rank_many(np.array([a], dtype=np.int64), np.array([i], dtype=np.int64))[0])

    def _select(self, a, j):
        return int(self._select_many(np.array([a], dtype=np.int64), np.array([j], dtype=np.int64))[0])

    def _access_many(self, idx):
        return np.array([self._access(int(i)) for i in idx], dtype=np.int64)

    def _rank_many(self, syms, idx):
        return np.array([self._rank(int(a), int(i)) for a, i in zip(syms, idx)], dtype=np.int64)

    def _select_many(self, syms, js):
        return np.array([self._select(int(a), int(j)) for a, j in zip(syms, js)], dtype=np.int64)

    def count(self, a) -> int:
        """Total occurrences of ``a``."""
        return self._rank(a, self.n)

    def _count_many(self, syms):
        return np.array([self.count(int(a)) for a in syms], dtype=np.int64)

    # -- checked scalar API -------------------------------------------------------

    def _check_symbol(self, a) -> None:
        if a < 0 or (self.sigma is not None and a >= self.sigma):
            raise RangeError(f"symbol {a} outside the alphabet [0, {self.sigma})")

    def access(self, i: int):
        if not 1 <= i <= self.n:
            raise RangeError(f"access position {i} outside [1, {self.n}]")
        return self._access(i - 1)

    def rank(self, a, i: int) -> int:
        self._check_symbol(a)
        if not 0 <= i <= self.n:
            raise RangeError(f"rank position {i} outside [0, {self.n}]")
        if i == 0:
            return 0
        return self._rank(a, i)

    def select(self, a, j: int) -> int:
        self._check_symbol(a)
        if j == 0:
            return 0
        total = self.count(a)
        if not 0 < j <= total:
            raise RangeError(f"select({a}, {j}) but the symbol occurs {total} times")
        return self._select(a, j) + 1

    # -- checked batch API ----------------------------------------------------------

    def _check_symbols(self, syms) -> None:
        if syms.size:
            lo, hi = int(syms.min()), int(syms.max())
            self._check_symbol(lo)
            self._check_symbol(hi)

    def access_many(self, idx) -> np.ndarray:
        idx = _i64(idx)
        if idx.size and (idx.min() < 1 or idx.max() > self.n):
            raise RangeError(f"access position outside [1, {self.n}]")
        return self._access_many(idx - 1) if idx.size else idx.copy()

    def rank_many(self, syms, idx) -> np.ndarray:
        syms, idx = np.broadcast_arrays(_i64(syms), _i64(idx))
        syms, idx = _i64(syms), _i64(idx)
        self._check_symbols(syms)
        if idx.size and (idx.min() < 0 or idx.max() > self.n):
            raise RangeError(f"rank position outside [0, {self.n}]")
        out = np.zeros(idx.size, dtype=np.int64)
        nz = idx > 0
        if nz.any():
            out[nz] = self._rank_many(syms[nz], idx[nz])
        return out

    def select_many(self, syms, js) -> np.ndarray:
        syms, js = np.broadcast_arrays(_i64(syms), _i64(js))
        syms, js = _i64(syms), _i64(js)
        self._check_symbols(syms)
        out = np.zeros(js.size, dtype=np.int64)
        nz = js != 0
        if nz.any():
            s, j = syms[nz], js[nz]
            if j.min() < 0 or (j > self._count_many(s)).any():
                raise RangeError("select rank exceeds the symbol's occurrences")
            out[nz] = self._select_many(s, j) + 1
        return out

    def counts(self, syms) -> np.ndarray:
        syms = _i64(syms)
        self._check_symbols(syms)
        return self._count_many(syms)

    def decode(self) -> np.ndarray:
        """The whole represented sequence."""
        return self._access_many(np.arange(self.n, dtype=np.int64)) if self.n else np.zeros(0, np.int64)

    def size_in_bits(self) -> int:
        raise NotImplementedError
