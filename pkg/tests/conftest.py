"""Shared helpers: sequence generators and oracle comparison."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gcrsa.oracle import naive_access_many, naive_rank_many, naive_select_many

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIG2 = [5, 8, 7, 6, 4, 3, 2, 1, 3, 2, 5, 2, 8]
SMALL_GCC = dict(s=64)  # keeps GCC-backed node builds cheap in tests


def gen_sequence(rng, n: int, sigma: int, kind: str) -> np.ndarray:
    """Random ("random"), skewed ("zipf") or repetitive ("rep") sequences over [0, sigma)."""
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    if kind == "random" or sigma == 1:
        return rng.integers(0, sigma, size=n)
    if kind == "zipf":
        w = 1.0 / np.arange(1, sigma + 1) ** 1.2
        return rng.choice(sigma, size=n, p=w / w.sum()).astype(np.int64)
    blen = int(rng.integers(1, max(2, n // 8) + 1))
    base = rng.integers(0, sigma, size=blen)
    S = np.tile(base, n // blen + 1)[:n].copy()
    hit = np.flatnonzero(rng.random(n) < 0.01)
    S[hit] = rng.integers(0, sigma, size=hit.size)
    return S


def check_rsa(obj, S, sigma: int | None = None, queries: int | None = None, rng=None) -> None:
    """Compare ``obj`` with the oracle; exhaustive for short ``S``, sampled otherwise."""
    S = np.asarray(S, dtype=np.int64)
    n = S.size
    rng = rng if rng is not None else np.random.default_rng(0)
    present = np.unique(S)
    syms = present
    if sigma is not None:  # a few absent symbols of the alphabet as well
        absent = np.setdiff1d(np.arange(min(sigma, present.max() + 3)), present)[:3]
        absent = absent[absent < sigma]
        syms = np.concatenate([present, absent])
    if queries is None and n <= 512:
        idx = np.arange(1, n + 1)
        ai = np.repeat(syms, n + 1)
        ii = np.tile(np.arange(n + 1), syms.size)
        totals = naive_rank_many(S, syms, np.full(syms.size, n))
        sa = np.repeat(syms, totals + 1)
        sj = np.concatenate([np.arange(t + 1) for t in totals])
    else:
        q = queries or 1000
        idx = rng.integers(1, n + 1, size=q)
        ai = np.where(rng.random(q) < 0.9, S[rng.integers(0, n, size=q)], rng.choice(syms, size=q))
        ii = rng.integers(0, n + 1, size=q)
        tot = naive_rank_many(S, ai, np.full(q, n))
        sa = ai
        sj = (rng.random(q) * (tot + 1)).astype(np.int64)
    np.testing.assert_array_equal(obj.access_many(idx), naive_access_many(S, idx), err_msg="access")
    np.testing.assert_array_equal(obj.rank_many(ai, ii), naive_rank_many(S, ai, ii), err_msg="rank")
    np.testing.assert_array_equal(obj.select_many(sa, sj), naive_select_many(S, sa, sj), err_msg="select")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance summary: one line per criterion ---------------------------------------

ACCEPTANCE: dict[str, str] = {}  # test name -> measured detail


def pytest_terminal_summary(terminalreporter):
    outcome = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if rep.when == "call" or rep.outcome != "passed":
                outcome[name] = "PASS" if rep.outcome == "passed" else "FAIL"
    if not outcome:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(outcome):
        num = int(name.split("_")[2])
        terminalreporter.write_line(f"criterion {num:2d}: {outcome[name]}  {ACCEPTANCE.get(name, '')}")
