import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from totient_classes.constructions import (
    assemble,
    choose_pq_primes,
    covering_mask,
    exclusion_check,
    find_r_primes,
    instance_from_lists,
    measured_free_fraction,
    smooth_bound,
    solvable_fraction,
    solving_exponents,
)
from totient_classes.modmath import factorize

from oracles import carmichael_odd, is_prime_slow, solvable_brute, trial_factor, units


def prod_ratio(ps):
    return math.prod(Fraction(p - 1, p) for p in ps)


def test_choose_examples():
    P, Q = choose_pq_primes(2.0)
    assert P == [3, 5, 7]
    assert Q[0] == 11 and prod_ratio(Q) < Fraction(1, 2) <= prod_ratio(Q[:-1])
    assert choose_pq_primes(3.9) == ([3], [5])
    assert choose_pq_primes(Fraction(39, 10)) == ([3], [5])
    with pytest.raises(ValueError):
        choose_pq_primes(0.5)  # needs more primes than the family cap
    for eps in (0, 4, -1):
        with pytest.raises(ValueError):
            choose_pq_primes(eps)


@settings(max_examples=30, deadline=None)
@given(st.fractions(Fraction(2, 1), Fraction(399, 100)))
def test_choose_is_greedy_and_minimal(eps):
    P, Q = choose_pq_primes(eps)
    odd = [p for p in range(3, 2000) if is_prime_slow(p)]
    assert P + Q == odd[: len(P) + len(Q)]
    for fam in (P, Q):
        assert prod_ratio(fam) < eps / 4 <= prod_ratio(fam[:-1])


def test_smooth_bound():
    assert smooth_bound(20) == 3  # 20**0.45 = 3.85
    assert smooth_bound(100, Fraction(1, 2)) == 10
    assert smooth_bound(3) == 2


def test_find_r_examples():
    assert find_r_primes(1, 3) == [3]
    assert find_r_primes(4, 20) == [5, 13, 17]
    assert find_r_primes(4, 20, exclude={5}) == [13, 17]
    with pytest.raises(ValueError):
        find_r_primes(4, 100, theta=Fraction(1, 2))


@settings(max_examples=30)
@given(st.sampled_from([1, 2, 4, 6, 12, 20]), st.integers(3, 3000))
def test_find_r_reverified(D, y):
    B = smooth_bound(y)
    got = find_r_primes(D, y)
    expected = [r for r in range(3, y + 1) if is_prime_slow(r) and (r - 1) % D == 0
                and all(p <= B for p, _ in trial_factor(r - 1))]
    assert got == expected


def test_instance_validation():
    with pytest.raises(ValueError):
        instance_from_lists([3], [3])
    with pytest.raises(ValueError):
        instance_from_lists([3], [9])
    with pytest.raises(ValueError):
        instance_from_lists([3], [5], [7])  # 4 does not divide 6
    inst = instance_from_lists([3], [5], [13])
    assert (inst.m, inst.n, inst.D) == (195, 12, 4)
    assert inst.modulus.value == 195


def test_assemble_small():
    inst = assemble(3.9, 20)
    assert (inst.p_list, inst.q_list, inst.r_list) == ([3], [5], [13, 17])
    d = inst.diagnostics
    assert d["products_below_target"] and d["n_divides_prime_power_cap"]
    assert d["L"] == 2 and d["log_n"] <= d["log_n_bound"]
    assert d["covered_fraction"] == pytest.approx((1 - 2 / 3) * (1 - 4 / 5))
    doc = inst.to_document()
    assert doc["m"] == "3315" and doc["theta"] == "9/20"


def test_assemble_eps_two_invariants():
    inst = assemble(2.0, 60)
    d = inst.diagnostics
    assert d["products_below_target"] and d["prod_p"] < 0.5 and d["prod_q"] < 0.5
    for r in inst.r_list:
        assert factorize(r) == [(r, 1)] and (r - 1) % inst.D == 0
    assert inst.m == math.prod(inst.primes)


def test_covered_fraction_is_product_formula():
    for p, q in (([3], [5]), ([3, 5], [7]), ([3], [5, 7]), ([3, 7], [5, 11])):
        inst = instance_from_lists(p, q)
        frac = covering_mask(inst, np.arange(inst.m)).mean()
        expected = (1 - prod_ratio(p)) * (1 - prod_ratio(q))
        assert frac == pytest.approx(float(expected), abs=1e-12)


def test_coverage_grows_with_families():
    fams = [([3], [5]), ([3, 7], [5]), ([3, 7], [5, 11]), ([3, 7, 13], [5, 11])]
    fracs = [float((1 - prod_ratio(p)) * (1 - prod_ratio(q))) for p, q in fams]
    measured = [covering_mask(instance_from_lists(p, q), np.arange(math.prod(p + q))).mean() for p, q in fams]
    assert measured == pytest.approx(fracs)
    assert all(a < b for a, b in zip(measured, measured[1:]))


def test_solving_exponents_against_pow():
    m = 3 * 5 * 13
    fac = factorize(m)
    a = np.arange(m)
    sol = solving_exponents(a, fac)
    us = units(m)
    for k in range(1, sol.shape[1] + 1):
        vals = {(pow(x, k, m) - pow(x, k - 1, m)) % m for x in us}
        assert set(np.nonzero(sol[:, k - 1])[0].tolist()) == vals


def test_exclusion_examples():
    rep = exclusion_check(instance_from_lists([3], [5]))
    assert rep.m == 15 and rep.covered_classes == 1 and rep.ok
    # a = 4 mod 15: the only solving k are odd and never 1 mod 4
    ks = [k for k in range(1, 5) if any((pow(x, k, 15) - pow(x, k - 1, 15) - 4) % 15 == 0 for x in units(15))]
    assert all(k % 2 == 1 and k % 4 != 1 for k in ks)
    with pytest.raises(ValueError):
        exclusion_check(instance_from_lists([3], [5], [13, 17, 29, 37]))


def test_free_fractions():
    assert measured_free_fraction(1) == 0.0
    assert measured_free_fraction(273) > 0
    for m in (15, 273, 3 * 5 * 7):
        lam = carmichael_odd(m)
        primes = {p for p, _ in trial_factor(m)}
        free = sum(1 for a in range(2, 4 * m, 4)
                   if solvable_brute(a % m, m, lam) is None and a + 1 not in primes)
        assert measured_free_fraction(m) == free / m
    assert 0 < solvable_fraction(273) < 1
    assert solvable_fraction(3) == 1.0
    with pytest.raises(ValueError):
        measured_free_fraction(4)
