"""End-to-end acceptance criteria, each with its exactness requirement and time budget.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import math
import random
import time
from contextlib import contextmanager

import numpy as np
import pytest

from totient_classes import ResidueClass, Verdict, classify
from totient_classes.checks import check_collisions, check_hensel, check_inclusion_exclusion, check_lift
from totient_classes.classifier import Rationale, witness_check
from totient_classes.constructions import exclusion_check, instance_from_lists, measured_free_fraction
from totient_classes.goodness import forbidden_scan, good_scan, is_forbidden, is_good
from totient_classes.modmath import factorize, period_cap
from totient_classes.oracle import build_sieve, cross_validate

from oracles import forbidden_direct, trial_factor

BIG_M = 4 * 3 * 7 * 11 * 13 * 29 * 31 * 41 * 43 * 101 * 151 * 211 * 281 * 701


@contextmanager
def budget(seconds):
    t0 = time.perf_counter()
    yield
    elapsed = time.perf_counter() - t0
    print(f"elapsed {elapsed:.2f}s (budget {seconds}s)")
    assert elapsed < seconds


def good_exhaustive(m):
    """Every a mod m is x**k - x**(k-1) for a unit x and some k <= lambda(m)."""
    if m == 1:
        return True
    u = np.array([x for x in range(1, m) if math.gcd(x, m) == 1], dtype=np.int64)
    lam = 1
    for p, e in trial_factor(m):
        lam = math.lcm(lam, p ** (e - 1) * (p - 1))
    hit = np.zeros(m, dtype=bool)
    cur = (u - 1) % m
    for _ in range(lam):
        hit[cur] = True
        cur = cur * u % m
    return bool(hit.all())


@pytest.mark.criterion(1, "302 and 790 mod 1092 are totient-free, k cap 12")
def test_c01_worked_example_1092():
    with budget(1.0):
        assert period_cap(factorize(273)) == 12
        for a in (302, 790):
            c = classify(ResidueClass.of(a, 1092))
            assert c.verdict is Verdict.TOTIENT_FREE
            assert c.rationale is Rationale.NO_UNIT_SOLUTION


@pytest.mark.criterion(2, "14 mod 28860 is totient-free")
def test_c02_fourteen_mod_28860():
    with budget(1.0):
        c = classify(ResidueClass.of(14, 28860))
        assert c.verdict is Verdict.TOTIENT_FREE


@pytest.mark.criterion(3, "10 mod 4*3*7*...*701 holds only the totient 10")
def test_c03_exactly_one_ten():
    with budget(5.0):
        assert period_cap(factorize(BIG_M // 4)) == 4200
        c = classify(ResidueClass.of(10, BIG_M))
        assert c.verdict is Verdict.EXACTLY_ONE
        assert c.rationale is Rationale.PRIME_MINUS_ONE
        assert (c.totient, c.prime) == (10, 11)


@pytest.mark.criterion(4, "sieve to 1e7 agrees with every class mod 1092, 28860, 60")
def test_c04_sieve_cross_validation():
    with budget(120.0):
        sieve = build_sieve(10**7)
        for M in (1092, 28860, 60):
            rep = cross_validate(M, sieve)
            assert len(rep.evidence) == M
            assert rep.contradictions == []
            for e in rep.evidence:
                if e.classification.verdict is Verdict.EXACTLY_ONE:
                    assert e.hits == (e.classification.totient,)
                if e.classification.verdict is Verdict.TOTIENT_FREE:
                    assert e.hits == ()
            print(M, rep.summary()["statuses"])


@pytest.mark.criterion(5, "collision count formula and distinct-value bound, r <= 199")
def test_c05_collisions():
    with budget(60.0):
        n, bad = check_collisions(199)
        assert n == sum(r - 3 for r in range(5, 200) if factorize(r) == [(r, 1)])
        assert bad == []


@pytest.mark.criterion(6, "2-adic lift for s <= 8, k <= 12")
def test_c06_lift():
    with budget(10.0):
        n, bad = check_lift(8, 12)
        assert n > 0 and bad == []


@pytest.mark.criterion(7, "Hensel lift for p in {3,7,11,19}, k <= 5, l <= 6")
def test_c07_hensel():
    with budget(10.0):
        n, bad = check_hensel((3, 7, 11, 19), 5, 6, 10**4)
        assert n == 4 * 4 * 6 and bad == []


@pytest.mark.criterion(8, "inclusion-exclusion identity and Weil bound, p <= 61, L <= 3")
def test_c08_inclusion_exclusion():
    with budget(120.0):
        n, bad = check_inclusion_exclusion(61, 3)
        assert n > 0 and bad == []


EXCLUSION_INSTANCES = [
    ([3], [5], []),
    ([3], [5], [13]),
    ([3], [5], [13, 17]),
    ([3], [5], [13, 17, 29]),
    ([3], [7], [13, 19]),
    ([3, 5], [7], [13]),
    ([3, 5], [7], [13, 37]),
    ([7], [3], []),
    ([3], [5, 7], [13]),
]


@pytest.mark.criterion(9, "exponent exclusions hold exhaustively for small instances")
def test_c09_exclusions():
    with budget(60.0):
        for p, q, r in EXCLUSION_INSTANCES:
            inst = instance_from_lists(p, q, r)
            assert inst.m <= 10**5
            rep = exclusion_check(inst)
            assert rep.covered_classes > 0
            assert rep.violations == []
            frac = measured_free_fraction(inst)
            print(f"m={inst.m} covered={rep.covered_classes} solvable={rep.solvable_covered_classes} free={frac:.4f}")


@pytest.mark.criterion(10, "goodness agrees with exhaustive checking for odd m <= 1000")
def test_c10_goodness():
    with budget(120.0):
        assert is_good(3).good
        for m in range(1, 1000, 2):
            v = is_good(m)
            assert v.good == good_exhaustive(m), m
        report, verdicts = good_scan(3, 999)
        assert report.total == 499
        assert report.count == sum(v.good for v in verdicts)
        assert report.fraction > 0
        print(f"good fraction on [3, 999]: {report.fraction:.4f}")


@pytest.mark.criterion(11, "forbidden predicate for odd m <= 1e4 and forbidden_scan(1000)")
def test_c11_forbidden():
    with budget(60.0):
        for m in range(1, 10**4, 2):
            assert bool(is_forbidden(m)) == forbidden_direct(m), m
        report, hits = forbidden_scan(1000)
        expected = [m for m in range(1001, 2001, 2) if forbidden_direct(m)]
        assert [c.m for c in hits] == expected
        assert report.count == len(expected) and report.total == 500
        print(f"forbidden in (1000, 2000]: {report.count}, x/log^5 x = {report.comparison:.3f}")


@pytest.mark.criterion(12, "a = 2 has infinitely many totients for 200 random M <= 1e9")
def test_c12_two_everywhere():
    rng = random.Random(20240531)
    moduli = [rng.randint(3, 10**9) for _ in range(200)]
    with budget(10.0):
        for M in moduli:
            c = classify(ResidueClass.of(2, M))
            assert c.verdict is Verdict.INFINITELY_MANY, M
            if c.witness is not None:
                assert witness_check(c.rc, c.witness)
