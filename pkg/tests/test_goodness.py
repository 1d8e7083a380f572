import math

import pytest
from hypothesis import given, settings, strategies as st

from totient_classes.goodness import (
    corollary_construct,
    corollary_contrapositive_scan,
    forbidden_scan,
    good_scan,
    is_forbidden,
    is_good,
    lemma8_ie_check,
    lemma8_solve,
    weil_bound_holds,
)
from totient_classes.modmath import primes_up_to

from oracles import carmichael_odd, forbidden_direct, good_brute, primitive_roots_slow, solvable_brute, units

ODD_PRIMES = primes_up_to(200)[1:]


def solves(x, k, a, m):
    return math.gcd(x, m) == 1 and (pow(x, k, m) - pow(x, k - 1, m) - a) % m == 0


def test_is_good_examples():
    assert is_good(3).good and is_good(1).good
    v = is_good(15)
    assert v.good == good_brute(15)
    for m in (7, 21, 273):
        v = is_good(m)
        assert v.good == good_brute(m)
        if not v.good:
            lam = carmichael_odd(m)
            assert solvable_brute(v.failing_a, m, lam) is None
            assert all(solvable_brute(a, m, lam) for a in range(v.failing_a))
    for bad in (0, 4, 10**6 + 1):
        with pytest.raises(ValueError):
            is_good(bad)


def test_is_good_against_brute_small():
    for m in range(1, 200, 2):
        assert is_good(m).good == good_brute(m), m


def test_forbidden_examples():
    c = is_forbidden(9)
    assert c and c.gcd == 2 and c.largest_prime == 3
    assert is_forbidden(15) and is_forbidden(15).gcd == 2
    assert not is_forbidden(3)
    assert not is_forbidden(1)
    assert is_forbidden(15).to_record()["forbidden"] is True
    with pytest.raises(ValueError):
        is_forbidden(10)


@given(st.integers(0, 10**6).map(lambda t: 2 * t + 1))
def test_forbidden_matches_definition(m):
    assert bool(is_forbidden(m)) == forbidden_direct(m)


def test_lemma8_examples():
    assert lemma8_solve(7, 0, 2, 3) == (2, 1)
    k, x = lemma8_solve(7, 3, 1, 1)
    assert solves(x, k, 3, 7)
    k, x = lemma8_solve(31, 5, 2, 4)
    assert k % 4 == 2 and solves(x, k, 5, 31)
    with pytest.raises(ValueError):
        lemma8_solve(9, 1, 1, 1)
    with pytest.raises(ValueError):
        lemma8_solve(7, 1, 3, 2)


@settings(max_examples=200)
@given(st.sampled_from(ODD_PRIMES[:20]), st.integers(0, 10**6), st.integers(1, 6), st.data())
def test_lemma8_reverifies(p, a, L, data):
    l = data.draw(st.integers(1, L))
    sol = lemma8_solve(p, a, l, L)
    direct = [(k, x) for k in range(l, l + L * (p - 1) + 1, L) for x in range(1, p) if solves(x, k, a, p)]
    if sol is None:
        assert direct == []
    else:
        k, x = sol
        assert k >= 1 and k % L == l % L and solves(x, k, a, p)


def test_ie_examples():
    r = lemma8_ie_check(7, 3, 1, 1)
    assert primitive_roots_slow(7) == [3, 5]
    assert r.brute_count == 2 and r.identity_holds
    r = lemma8_ie_check(5, 1, 1, 2)
    assert r.identity_holds and r.affine_identity_holds and r.weil_ok
    with pytest.raises(ValueError):
        lemma8_ie_check(7, 0, 1, 1)
    with pytest.raises(ValueError):
        lemma8_ie_check(211, 1, 1, 1)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ODD_PRIMES[:25]), st.integers(1, 5), st.data())
def test_ie_identity(p, L, data):
    l = data.draw(st.integers(1, L))
    a = data.draw(st.integers(1, p - 1))
    r = lemma8_ie_check(p, a, l, L)
    brute = sum(1 for g in primitive_roots_slow(p) for y in range(p)
                if (pow(y, L, p) * (1 - g) - a * pow(g, l, p)) % p == 0)
    assert r.brute_count == brute
    assert r.identity_holds and r.affine_identity_holds and r.weil_ok


def test_weil_bound_integer_comparison():
    assert weil_bound_holds(8, 7, 2)  # |8 - 8| = 0
    assert weil_bound_holds(11, 7, 3)  # excess 0
    assert not weil_bound_holds(30, 7, 3)  # 22 > 2*sqrt(7) + 3
    assert weil_bound_holds(22, 7, 4)  # 14 <= 6 sqrt(7) + 4 = 19.87


def test_corollary_examples():
    r = corollary_construct([3], 2)
    assert (r.x, r.k) == (2, 2)
    r = corollary_construct([3], 0)
    assert (r.x, r.k) == (1, 1)
    r = corollary_construct([3, 5], 4)
    assert r.ok and solves(r.x, r.k, 4, 15)
    assert [s.n_j for s in r.steps] == [1, 2]
    assert r.steps[1].k % 2 == r.steps[0].k % 2
    with pytest.raises(ValueError):
        corollary_construct([5, 3], 1)
    with pytest.raises(ValueError):
        corollary_construct([], 1)


@settings(max_examples=100, deadline=None)
@given(st.sets(st.sampled_from(ODD_PRIMES[:12]), min_size=1, max_size=4), st.integers(0, 10**6))
def test_corollary_output_reverifies(ps, a):
    ps = sorted(ps)
    r = corollary_construct(ps, a)
    m = math.prod(ps)
    if r.ok:
        assert solves(r.x, r.k, a, m)
    else:
        # a failure must be genuine at the failing step under the inherited exponent class
        step = r.steps[r.failed_step - 1]
        assert step.k is None
    for s in r.steps[1:]:
        assert s.chain_ok == (s.gcd**10 <= s.p)


def test_good_scan():
    report, verdicts = good_scan(3, 99)
    assert report.total == 49 and report.fraction > 0
    assert [v.m for v in verdicts] == list(range(3, 100, 2))
    assert report.to_record()["type"] == "summary"
    with pytest.raises(ValueError):
        good_scan(10, 5)


def test_forbidden_scan():
    report, hits = forbidden_scan(10)
    assert (report.total, report.count, [c.m for c in hits]) == (5, 1, [15])
    report, hits = forbidden_scan(100)
    assert report.count == sum(forbidden_direct(m) for m in range(101, 201, 2))
    assert report.comparison == pytest.approx(100 / math.log(100) ** 5)
    report, _ = forbidden_scan(11)
    assert report.lo == 12 and report.total == 5  # 13, 15, ..., 21
    with pytest.raises(ValueError):
        forbidden_scan(1)


def test_contrapositive_small():
    out = corollary_contrapositive_scan(600, p0=3)
    for v in out:
        assert not good_brute(v.m)
    # with p0 = 1 the scan includes multiples of 3
    wide = corollary_contrapositive_scan(300, p0=1)
    assert all(v.m % 2 == 1 for v in wide)
