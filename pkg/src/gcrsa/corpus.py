"""Synthetic repetitive collections, entropy measures and corpus reports.

Random numbers come from numpy's ``Generator`` over the PCG64 bit generator
(``numpy.random.default_rng(seed)``), whose output is specified bit for bit
and is platform independent, so every corpus is reproducible from its seed.
"""

from __future__ import annotations

import csv
import io
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .fmindex import as_symbols, bwt_runs
from .repair import compress, grammar_stats

__all__ = [
    "FormatError", "CorpusReport", "CSV_COLUMNS", "gen_random", "gen_dna", "entropy_h0", "entropy_hk",
    "report", "reports_csv", "read_raw8", "write_raw8", "read_u32le", "write_u32le",
    "read_sequence", "write_sequence", "FORMATS",
]

U32_MAGIC = b"GCSQ"
U32_VERSION = 1
FORMATS = ("raw8", "u32le")
CSV_COLUMNS = ("dataset", "n", "sigma", "h0", "h1", "h2", "h3", "repair_bps", "bwt_runs_ratio")
MAX_K = 3


class FormatError(ValueError):
    """Malformed sequence file or a sequence the format cannot hold."""


# -- generation ------------------------------------------------------------------


def gen_random(n: int, sigma: int, seed=None) -> np.ndarray:
    """Uniform random sequence of length ``n`` over ``[0, sigma)``."""
    if n < 0 or sigma < 1:
        raise ValueError("need n >= 0 and sigma >= 1")
    return np.random.default_rng(seed).integers(0, sigma, size=n, dtype=np.int64)


def gen_dna(base, copies: int, mutation_prob: float, seed=None, sigma: int | None = None) -> np.ndarray:
    """``copies`` copies of ``base``, each position independently replaced with
    probability ``mutation_prob`` by a uniformly chosen different symbol.

    The alphabet is ``[0, sigma)``, ``sigma`` defaulting to ``max(base) + 1``
    (at least 2, so that a different symbol always exists).
    """
    base = np.asarray(base, dtype=np.int64).ravel()
    if base.size == 0:
        raise ValueError("empty base")
    if base.min() < 0:
        raise ValueError("symbols must be non-negative")
    if not 0.0 <= mutation_prob <= 1.0:
        raise ValueError("mutation_prob must lie in [0, 1]")
    if copies < 0:
        raise ValueError("copies must be non-negative")
    sigma = max(2, int(base.max()) + 1) if sigma is None else int(sigma)
    if not 2 <= sigma <= 256 or base.max() >= sigma:
        raise ValueError("alphabet must hold the base and have 2..256 symbols")
    rng = np.random.default_rng(seed)
    out = np.tile(base, copies)
    hit = np.flatnonzero(rng.random(out.size) < mutation_prob)
    out[hit] = (out[hit] + rng.integers(1, sigma, size=hit.size)) % sigma
    return out


# -- entropy ------------------------------------------------------------------------


def _h0_counts(counts: np.ndarray) -> float:
    """``sum c lg(t/c)`` over the non-zero counts (t their total)."""
    counts = counts[counts > 0].astype(np.float64)
    if counts.size == 0:
        return 0.0
    t = counts.sum()
    return float(np.sum(counts * np.log2(t / counts)))


def entropy_h0(S) -> float:
    """Zero-order empirical entropy in bits per symbol."""
    S = as_symbols(S).ravel()
    if S.size == 0:
        return 0.0
    _, counts = np.unique(S, return_counts=True)
    return _h0_counts(counts) / S.size


def entropy_hk(S, k: int) -> float:
    """k-th order empirical entropy in bits per symbol (``k <= 3``).

    The context of position ``i`` is the ``k`` symbols before it; the first
    ``k`` positions have no full context and are skipped.  The total is
    still divided by the full length ``n``.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > MAX_K:
        raise ValueError(f"k must be at most {MAX_K}")
    S = as_symbols(S).ravel()
    n = S.size
    if k == 0:
        return entropy_h0(S)
    if n <= k:
        return 0.0
    _, dense = np.unique(S, return_inverse=True)
    dense = dense.ravel().astype(np.int64)
    m = int(dense.max()) + 1
    ctx = np.zeros(n - k, dtype=np.int64)
    for d in range(k):  # context symbols S[i-k .. i-1]
        ctx = ctx * m + dense[d:n - k + d]
    key = ctx * m + dense[k:]
    _, joint = np.unique(key, return_counts=True)
    _, ctxc = np.unique(ctx, return_counts=True)
    # sum_C |S_C| H0(S_C) = sum_C sum_a n_Ca lg(|S_C| / n_Ca)
    #                     = sum_C |S_C| lg|S_C| - sum n_Ca lg n_Ca
    total = float(np.sum(ctxc * np.log2(ctxc)) - np.sum(joint * np.log2(joint)))
    return max(total, 0.0) / n


# -- reports -------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusReport:
    n: int
    sigma: int
    h0: float
    h1: float
    h2: float
    h3: float
    repair_bps: float
    bwt_runs_ratio: float


def report(S, balanced: bool = True) -> CorpusReport:
    """Table-1 style statistics of ``S``."""
    S = as_symbols(S).ravel()
    if S.size == 0:
        raise ValueError("empty sequence")
    sigma = int(np.unique(S).size)
    hs = [entropy_hk(S, k) for k in range(MAX_K + 1)]
    G = compress(S, balanced=balanced)
    return CorpusReport(int(S.size), sigma, *hs, grammar_stats(G).bps, bwt_runs(S).ratio)


def reports_csv(rows) -> str:
    """CSV text for ``(dataset, CorpusReport)`` pairs, in the given order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for name, rep in rows:
        d = asdict(rep)
        w.writerow([name, d["n"], d["sigma"]] + [f"{d[c]:.6f}" for c in CSV_COLUMNS[3:]])
    return buf.getvalue()


# -- file formats -------------------------------------------------------------------


def read_raw8(path) -> np.ndarray:
    return np.fromfile(path, dtype=np.uint8).astype(np.int64)


def write_raw8(path, S) -> None:
    S = np.asarray(S, dtype=np.int64).ravel()
    if S.size and (S.min() < 0 or S.max() > 255):
        raise FormatError("raw8 holds symbols 0..255 only")
    S.astype(np.uint8).tofile(path)


def read_u32le(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 16:
        raise FormatError("truncated header")
    magic, version, n, sigma = struct.unpack("<4sIII", data[:16])
    if magic != U32_MAGIC:
        raise FormatError("bad magic")
    if version != U32_VERSION:
        raise FormatError(f"unsupported version {version}")
    if len(data) != 16 + 4 * n:
        raise FormatError(f"expected {n} symbols, found {(len(data) - 16) / 4:g}")
    S = np.frombuffer(data, dtype="<u4", offset=16).astype(np.int64)
    if S.size and S.max() >= sigma:
        raise FormatError("symbol outside the declared alphabet")
    return S


def write_u32le(path, S, sigma: int | None = None) -> None:
    S = np.asarray(S, dtype=np.int64).ravel()
    if S.size and S.min() < 0:
        raise FormatError("symbols must be non-negative")
    sigma = (int(S.max()) + 1 if S.size else 0) if sigma is None else int(sigma)
    if sigma >= 1 << 32 or S.size >= 1 << 32:
        raise FormatError("u32le holds at most 2**32 - 1 symbols and alphabet size")
    if S.size and S.max() >= sigma:
        raise FormatError("symbol outside the declared alphabet")
    with open(path, "wb") as f:
        f.write(struct.pack("<4sIII", U32_MAGIC, U32_VERSION, S.size, sigma))
        f.write(S.astype("<u4").tobytes())


def read_sequence(path, fmt: str) -> np.ndarray:
    if fmt == "raw8":
        return read_raw8(path)
    if fmt == "u32le":
        return read_u32le(path)
    raise ValueError(f"unknown format {fmt!r}")


def write_sequence(path, S, fmt: str) -> None:
    if fmt == "raw8":
        write_raw8(path, S)
    elif fmt == "u32le":
        write_u32le(path, S)
    else:
        raise ValueError(f"unknown format {fmt!r}")
