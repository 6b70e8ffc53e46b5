"""Shared fixtures and brute-force oracles.

The oracles deliberately avoid the package's own machinery: they evaluate
closed forms with plain Python loops and use exact rational arithmetic.
"""

import itertools
import time
from fractions import Fraction
from math import log

import numpy as np
import pytest

from pronynd import ExponentialSumModel, LatticeSignal, Polynomial, box, sample, simplex

LN2, LN3 = log(2.0), log(3.0)


def e1_model():
    return ExponentialSumModel(1, [([LN2], 1.0), ([LN3], 1.0)])


def e2_model():
    return ExponentialSumModel(2, [([0.0, 0.0], 1.0), ([LN2, LN3], 1.0)])


def e3_model():
    return ExponentialSumModel(1, [([LN2], Polynomial.monomial((1,)))])


def e1_value(a):
    return 2.0 ** a + 3.0 ** a


def e2_value(a1, a2):
    return 1.0 + 2.0 ** a1 * 3.0 ** a2


def e3_value(a):
    return a * 2.0 ** a


@pytest.fixture
def e1():
    return e1_model()


@pytest.fixture
def e2():
    return e2_model()


@pytest.fixture
def e3():
    return e3_model()


@pytest.fixture
def e1_signal():
    return sample(e1_model(), box([0], [4]))


@pytest.fixture
def e2_signal():
    return sample(e2_model(), simplex(4, 2))


@pytest.fixture
def e3_signal():
    return sample(e3_model(), box([0], [6]))


# -- oracles -------------------------------------------------------------------


def brute_simplex(k, s):
    return {a for a in itertools.product(range(k + 1), repeat=s) if sum(a) <= k}


def brute_cross(n, s):
    out = set()
    for a in itertools.product(range(n), repeat=s):
        p = 1
        for x in a:
            p *= 1 + x
        if p <= n:
            out.add(a)
    return out


def exact_rank(rows):
    """Rank of a rational matrix by fraction-exact Gaussian elimination."""
    M = [[Fraction(x) for x in row] for row in rows]
    rank, ncols = 0, len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(M)) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(len(M)):
            if r != rank and M[r][c] != 0:
                fac = M[r][c] / M[rank][c]
                M[r] = [x - fac * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def stirling2(n, k):
    """Stirling numbers of the second kind by the triangle recurrence."""
    row = [1]
    for m in range(1, n + 1):
        new = [0] * (m + 1)
        for j in range(1, m + 1):
            new[j] = j * (row[j] if j < len(row) else 0) + row[j - 1]
        row = new
    return row[k] if k < len(row) else 0


def random_signal(rng, window):
    vals = rng.normal(size=len(window)) + 1j * rng.normal(size=len(window))
    return LatticeSignal(window, vals)


# -- acceptance report -----------------------------------------------------------

ACCEPTANCE = {}
SUITE_BUDGET = 60.0
_START = [time.perf_counter()]


def report(number, ok, detail):
    """Record the outcome of acceptance criterion ``number``."""
    ACCEPTANCE[number] = (bool(ok), detail)
    return ok


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _START[0]
    session.config._suite_elapsed = elapsed
    if 10 in ACCEPTANCE and elapsed > SUITE_BUDGET:
        ok, detail = ACCEPTANCE[10]
        ACCEPTANCE[10] = (False, f"{detail}; suite took {elapsed:.1f} s > {SUITE_BUDGET:.0f} s")
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    elapsed = getattr(config, "_suite_elapsed", time.perf_counter() - _START[0])
    terminalreporter.write_line(f"suite runtime: {elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)")
