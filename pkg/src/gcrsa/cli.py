"""Command-line interface: build, query, bench, gen-dna, stats.

Exit codes: 0 success, 1 data error (unreadable or malformed input, failed
verification, query out of range), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .base import RangeError
from .corpus import FORMATS, FormatError, gen_dna, gen_random, read_sequence, report, reports_csv, write_sequence
from .fmindex import FmIndex
from .oracle import NaiveRsa, naive_count_many
from .serialize import ContainerError, load, save
from .structures import SEQUENCE_TAGS, STRUCTURE_TAGS, build_structure, structure_tag

__all__ = ["main", "build_parser", "make_workload"]

BENCH_COLUMNS = ("structure", "op", "bits_per_symbol", "avg_microseconds")
MAX_SYMBOL = (1 << 31) - 1
_GCC_TAGS = ("GCC_N", "GCC_C")
_AP_TAGS = ("AP", "AP_RP")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gcrsa", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index container")
    b.add_argument("--input", required=True)
    b.add_argument("--format", choices=FORMATS, default="raw8")
    b.add_argument("--structure", choices=STRUCTURE_TAGS, required=True)
    b.add_argument("--backend", choices=("plain", "rrr", "delta", "gcc"))
    b.add_argument("--inner", choices=SEQUENCE_TAGS, help="FMI only: structure holding the BWT")
    b.add_argument("-s", type=int, help="GCC sampling period")
    b.add_argument("--sprime", type=int, help="GCC.N samples per superblock")
    b.add_argument("--delta", type=int, help="GCC counter sampling budget")
    b.add_argument("--cut", type=int)
    b.add_argument("--cuto", type=int)
    b.add_argument("--arity", type=int)
    b.add_argument("--shape", choices=("balanced", "huffman"))
    b.add_argument("--output", required=True)

    q = sub.add_parser("query", help="answer one query on a container")
    q.add_argument("--index", required=True)
    q.add_argument("--op", choices=("access", "rank", "select", "count"), required=True)
    q.add_argument("--args", nargs="+", required=True,
                   help="access: i; rank: a i; select: a j; count: a (sequence) or pattern symbols (FMI)")

    be = sub.add_parser("bench", help="time a random workload, print CSV")
    be.add_argument("--index", required=True)
    be.add_argument("--op", choices=("access", "rank", "select", "count"), nargs="+", required=True)
    be.add_argument("--queries", type=int, default=10_000)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--threads", type=int, default=1)
    be.add_argument("--length", type=int, default=8, help="pattern length for count on FMI")
    be.add_argument("--batch", action="store_true", help="time the batch API instead of single queries")
    be.add_argument("--verify", action="store_true", help="check every answer against a naive oracle")
    be.add_argument("--no-header", action="store_true")

    g = sub.add_parser("gen-dna", help="generate a synthetic repetitive collection")
    src = g.add_mutually_exclusive_group()
    src.add_argument("--base", help="base sequence file (else a random base)")
    src.add_argument("--base-length", type=int, default=100_000)
    g.add_argument("--base-format", choices=FORMATS, default="raw8")
    g.add_argument("--sigma", type=int, default=4)
    g.add_argument("--copies", type=int, default=100)
    g.add_argument("--mutation", type=float, required=True, help="per-symbol mutation probability")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=FORMATS, default="raw8")
    g.add_argument("--output", required=True)

    st = sub.add_parser("stats", help="corpus statistics as CSV")
    st.add_argument("inputs", nargs="+")
    st.add_argument("--format", choices=FORMATS, default="raw8")
    st.add_argument("--output", help="CSV file (default: standard output)")
    return p


# -- build ---------------------------------------------------------------------------


def _build_params(args) -> tuple[str, dict]:
    """Validate the flag combination; returns (structure tag for the data, params)."""
    tag = args.structure
    target = tag
    if tag == "FMI":
        target = args.inner or ("GCC_N" if args.backend in (None, "gcc") else "WTH")
    elif args.inner:
        raise UsageError("--inner applies to FMI only")
    params = {}
    gcc_used = target in _GCC_TAGS or target == "AP_RP" or args.backend == "gcc"
    for flag in ("s", "sprime", "delta"):
        v = getattr(args, flag)
        if v is not None:
            if not gcc_used:
                raise UsageError(f"--{flag} needs a GCC-based structure or backend")
            if v < (0 if flag == "delta" else 1):
                raise UsageError(f"--{flag} out of range")
            params[flag] = v
    for flag in ("cut", "cuto"):
        v = getattr(args, flag)
        if v is not None:
            if target not in _AP_TAGS:
                raise UsageError(f"--{flag} applies to AP and AP_RP only")
            if v < 0:
                raise UsageError(f"--{flag} must be non-negative")
            params[flag] = v
    if args.arity is not None:
        if target not in ("MWT", "MWTH"):
            raise UsageError("--arity applies to MWT and MWTH only")
        if args.arity < 4 or args.arity & (args.arity - 1):
            raise UsageError("--arity must be a power of two >= 4")
        params["arity"] = args.arity
    if args.shape is not None:
        if target in _GCC_TAGS or target in _AP_TAGS:
            raise UsageError("--shape applies to wavelet structures only")
        want = "huffman" if target.endswith("H") else "balanced"
        if args.shape != want:
            raise UsageError(f"{target} has shape {want}")
    if target in _GCC_TAGS:
        if args.backend not in (None, "gcc") and tag != "FMI":
            raise UsageError(f"{target} takes no bitmap backend")
    elif target == "AP":
        if args.backend not in (None, "plain") and tag != "FMI":
            raise UsageError("AP uses fixed backends")
    elif target == "AP_RP":
        params["fallback"] = "rp" if args.backend == "gcc" else "plain"
    else:
        params["backend"] = args.backend or "plain"
    return target, params


def _read_input(path, fmt) -> np.ndarray:
    try:
        S = read_sequence(path, fmt)
    except FormatError as e:
        raise DataError(f"{path}: {e}") from e
    except OSError as e:
        raise DataError(str(e)) from e
    if S.size == 0:
        raise DataError(f"{path}: empty sequence")
    if S.max() > MAX_SYMBOL:
        raise DataError(f"{path}: alphabet larger than {MAX_SYMBOL + 1} symbols")
    return S


def cmd_build(args) -> int:
    target, params = _build_params(args)
    S = _read_input(args.input, args.format)
    if args.structure == "FMI":
        if S.max() + 1 > MAX_SYMBOL:
            raise DataError("alphabet too large for the BWT")
        obj = FmIndex(S, target, **params)
        n = obj.text_length
    else:
        obj = build_structure(target, S, **params)
        n = obj.n
    nbytes = save(obj, args.output)
    parts = obj.space_breakdown()
    print(f"structure {structure_tag(obj)}" + (f" over {target}" if args.structure == "FMI" else ""))
    print(f"n {n}")
    for k, v in parts.items():
        print(f"{k} {v / n:.4f} bps")
    print(f"container {nbytes} bytes")
    return 0


# -- query ---------------------------------------------------------------------------


def _load(path):
    try:
        return load(path)
    except ContainerError as e:
        raise DataError(f"{path}: {e}") from e
    except OSError as e:
        raise DataError(str(e)) from e


def _ints(vals, k=None, what="arguments"):
    try:
        out = [int(v) for v in vals]
    except ValueError:
        raise UsageError(f"{what} must be integers") from None
    if k is not None and len(out) != k:
        raise UsageError(f"expected {k} {what}")
    return out


def cmd_query(args) -> int:
    obj = _load(args.index)
    fmi = isinstance(obj, FmIndex)
    if fmi != (args.op == "count"):
        raise UsageError("FMI containers answer count only" if fmi else "count needs an FMI container")
    try:
        if fmi:
            if len(args.args) == 1 and not args.args[0].lstrip("-").isdigit():
                res = obj.count(args.args[0].encode())  # a raw8 pattern given as text
            else:
                res = obj.count(_ints(args.args, what="pattern symbols"))
        elif args.op == "access":
            (i,) = _ints(args.args, 1, "positions")
            res = obj.access(i)
        elif args.op == "rank":
            a, i = _ints(args.args, 2, "arguments (symbol, position)")
            res = obj.rank(a, i)
        else:
            a, j = _ints(args.args, 2, "arguments (symbol, rank)")
            res = obj.select(a, j)
    except RangeError as e:
        raise DataError(str(e)) from e
    print(res)
    return 0


# -- bench ---------------------------------------------------------------------------


def make_workload(S, op: str, N: int, seed: int, length: int = 8):
    """Query arguments: access uses uniform positions; rank a uniform
    position p with symbol S[p]; select the symbol S[p] of a uniform p with a
    rank uniform in [1, count of S[p]]; count patterns of ``length`` symbols
    starting at uniform positions."""
    if N <= 0:
        raise ValueError("need at least one query")
    S = np.asarray(S, dtype=np.int64)
    n = S.size
    rng = np.random.default_rng(seed)
    if op == "count":
        if length < 1 or length > n:
            raise ValueError("pattern length must lie in [1, n]")
        starts = rng.integers(0, n - length + 1, size=N)
        return [S[s:s + length] for s in starts]
    p = rng.integers(1, n + 1, size=N)
    if op == "access":
        return (p,)
    a = S[p - 1]
    if op == "rank":
        return a, p
    totals = np.bincount(S)[a]
    j = rng.integers(1, totals + 1)
    return a, j


def _time_queries(fn, items, threads: int) -> tuple[list, float]:
    """Answers and summed per-thread busy time (seconds)."""
    chunks = np.array_split(np.arange(len(items)), threads)

    def run(idx):
        t0 = time.perf_counter()
        res = [fn(items[k]) for k in idx]
        return res, time.perf_counter() - t0

    if threads == 1:
        res, dt = run(chunks[0])
        return res, dt
    with ThreadPoolExecutor(threads) as ex:
        parts = list(ex.map(run, chunks))
    return [r for rs, _ in parts for r in rs], sum(dt for _, dt in parts)


def _bench_op(obj, op, args, S):
    N = args.queries
    wl = make_workload(S, op, N, args.seed, args.length)
    if op == "count":
        if args.batch:
            t0 = time.perf_counter()
            res = obj.count_many(wl)
            dt = time.perf_counter() - t0
        else:
            res, dt = _time_queries(obj.count, wl, args.threads)
        res = np.asarray(res, dtype=np.int64)
        expect = (lambda: naive_count_many(S, wl))
    else:
        cols = [np.asarray(c, dtype=np.int64) for c in wl]
        batch = {"access": obj.access_many, "rank": obj.rank_many, "select": obj.select_many}[op]
        single = {"access": obj.access, "rank": obj.rank, "select": obj.select}[op]
        if args.batch:
            t0 = time.perf_counter()
            res = batch(*cols)
            dt = time.perf_counter() - t0
        else:
            items = list(zip(*(c.tolist() for c in cols)))
            res, dt = _time_queries(lambda t: single(*t), items, args.threads)
        res = np.asarray(res, dtype=np.int64)

        def expect():
            ref = NaiveRsa(S)
            f = {"access": ref.access, "rank": ref.rank, "select": ref.select}[op]
            return np.array([f(*t) for t in zip(*(c.tolist() for c in cols))], dtype=np.int64)
    if args.verify:
        bad = np.flatnonzero(res != expect())
        if bad.size:
            raise DataError(f"{op}: {bad.size} of {N} answers disagree with the oracle")
    return dt / N * 1e6


def cmd_bench(args) -> int:
    if args.queries <= 0:
        raise UsageError("--queries must be positive")
    if args.threads <= 0:
        raise UsageError("--threads must be positive")
    obj = _load(args.index)
    fmi = isinstance(obj, FmIndex)
    for op in args.op:
        if fmi != (op == "count"):
            raise UsageError("FMI containers bench count only" if fmi else "count needs an FMI container")
    S = obj.invert() if fmi else obj.decode()
    n = S.size
    if fmi and not 1 <= args.length <= n:
        raise UsageError("--length must lie in [1, n]")
    bps = obj.size_in_bits() / n
    w = csv.writer(sys.stdout, lineterminator="\n")
    if not args.no_header:
        w.writerow(BENCH_COLUMNS)
    tag = structure_tag(obj)
    for op in args.op:
        us = _bench_op(obj, op, args, S)
        w.writerow([tag, op, f"{bps:.4f}", f"{us:.3f}"])
    return 0


# -- corpus --------------------------------------------------------------------------


def cmd_gen_dna(args) -> int:
    if args.copies < 0 or not 0.0 <= args.mutation <= 1.0:
        raise UsageError("need --copies >= 0 and --mutation in [0, 1]")
    if not 2 <= args.sigma <= 256:
        raise UsageError("--sigma must lie in [2, 256]")
    if args.base:
        base = _read_input(args.base, args.base_format)
        if base.max() >= args.sigma:
            raise DataError("base holds symbols outside --sigma")
    else:
        if args.base_length <= 0:
            raise UsageError("--base-length must be positive")
        base = gen_random(args.base_length, args.sigma, seed=[args.seed, 0])
    S = gen_dna(base, args.copies, args.mutation, seed=[args.seed, 1], sigma=args.sigma)
    try:
        write_sequence(args.output, S, args.format)
    except FormatError as e:
        raise DataError(str(e)) from e
    print(f"wrote {S.size} symbols to {args.output}")
    return 0


def cmd_stats(args) -> int:
    rows = [(Path(p).stem, report(_read_input(p, args.format))) for p in args.inputs]
    text = reports_csv(rows)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- entry point ---------------------------------------------------------------------

_COMMANDS = {"build": cmd_build, "query": cmd_query, "bench": cmd_bench,
             "gen-dna": cmd_gen_dna, "stats": cmd_stats}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors with code 2
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"gcrsa: error: {e}", file=sys.stderr)
        return 2
    except (DataError, FormatError, ContainerError, RangeError) as e:
        print(f"gcrsa: data error: {e}", file=sys.stderr)
        return 1
    except ValueError as e:  # invalid content rejected by a builder
        print(f"gcrsa: data error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
