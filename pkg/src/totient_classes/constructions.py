"""Moduli with a large share of totient-free classes.

Two families of odd primes P and Q are chosen so that prod(1 - 1/p) over
each family is below eps/4.  Then almost every a mod m satisfies
``a = 1 (mod p)`` for some p in P and ``a = -1 (mod q)`` for some q in Q.  For
such an a, every solution of ``x**k - x**(k-1) = a`` over units has
``k != 0 (mod p-1)`` and ``k != 1 (mod q-1)``.  Adding primes r with
``D | r - 1`` extends both exclusions to the moduli ``r - 1``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

from .classifier import FactoredModulus, Verdict, least_exponents, scan_classes
from .modmath import factorize, is_smooth, iroot, lcm_all, primes_up_to
from .valueset import build_table

DEFAULT_THETA = Fraction(9, 20)
FAMILY_SIZE_CAP = 5000
EXCLUSION_SCAN_CAP = 10**5


def _fraction(x) -> Fraction:
    if isinstance(x, Rational):
        return Fraction(x)
    return Fraction(str(x))


def _odd_primes():
    limit = 1 << 10
    seen = 0
    while True:
        ps = primes_up_to(limit)
        for p in ps[seen:]:
            if p > 2:
                yield p
        seen = len(ps)
        limit *= 2


def choose_pq_primes(eps, size_cap: int = FAMILY_SIZE_CAP) -> tuple[list[int], list[int]]:
    """Greedy: P takes the smallest odd primes until prod(1 - 1/p) < eps/4, then Q continues."""
    eps = _fraction(eps)
    if not 0 < eps < 4:
        raise ValueError(f"eps must lie in (0, 4), got {eps}")
    target = eps / 4
    gen = _odd_primes()
    families = []
    for _ in range(2):
        fam, prod = [], Fraction(1)
        while prod >= target:
            if len(fam) >= size_cap:
                raise ValueError(f"eps={eps} needs more than {size_cap} primes per family")
            p = next(gen)
            fam.append(p)
            prod *= Fraction(p - 1, p)
        families.append(fam)
    return families[0], families[1]


def smooth_bound(y: int, theta=DEFAULT_THETA) -> int:
    """floor(y**theta), exactly, clamped below at 2."""
    theta = _fraction(theta)
    return max(2, iroot(y**theta.numerator, theta.denominator))


def find_r_primes(D: int, y: int, theta=DEFAULT_THETA, exclude=()) -> list[int]:
    """Odd primes r <= y outside ``exclude`` with D | r - 1 and r - 1 being y**theta-smooth."""
    theta = _fraction(theta)
    if D < 1 or y < 3:
        raise ValueError("need D >= 1 and y >= 3")
    if not 0 < theta < Fraction(1, 2):
        raise ValueError(f"theta must lie in (0, 1/2), got {theta}")
    B = smooth_bound(y, theta)
    skip = set(exclude)
    return [
        r
        for r in primes_up_to(y)
        if r > 2 and r not in skip and (r - 1) % D == 0 and is_smooth(r - 1, B)
    ]


@dataclass
class Theorem2Instance:
    p_list: list[int]
    q_list: list[int]
    r_list: list[int]
    D: int
    y: int
    theta: Fraction
    m: int
    n: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def modulus(self) -> FactoredModulus:
        return FactoredModulus(0, tuple((p, 1) for p in sorted(self.primes)))

    @property
    def primes(self) -> list[int]:
        return self.p_list + self.q_list + self.r_list

    def to_document(self) -> dict:
        doc = asdict(self)
        doc["theta"] = str(self.theta)
        doc["m"] = str(self.m)
        doc["n"] = str(self.n)
        doc["D"] = str(self.D)
        return doc


def instance_from_lists(p_list, q_list, r_list=(), y: int | None = None, theta=DEFAULT_THETA):
    """Instance from explicit prime families (for desk-scale checks)."""
    p_list, q_list, r_list = list(p_list), list(q_list), list(r_list)
    everything = p_list + q_list + r_list
    if len(set(everything)) != len(everything) or any(p == 2 for p in everything):
        raise ValueError("prime families must be disjoint odd primes")
    for p in everything:
        if factorize(p) != [(p, 1)]:
            raise ValueError(f"{p} is not prime")
    D = lcm_all(p - 1 for p in p_list + q_list)
    if any((r - 1) % D for r in r_list):
        raise ValueError("every r - 1 must be divisible by D")
    n = lcm_all(p - 1 for p in everything)
    m = math.prod(everything)
    return Theorem2Instance(
        p_list, q_list, r_list, D, y or max(everything, default=3), _fraction(theta), m, n
    )


def _largest_power(p: int, y: int) -> int:
    pk = p
    while pk * p <= y:
        pk *= p
    return pk


def _diagnostics(inst: Theorem2Instance, eps: Fraction | None) -> dict:
    y, theta = inst.y, inst.theta
    B = smooth_bound(y, theta)
    log_y = math.log(y)
    # lcm of r - 1 with every prime factor <= B divides the product of the largest prime powers <= y.
    prime_power_cap = math.prod(_largest_power(p, y) for p in primes_up_to(B))
    prod_p = math.prod(Fraction(p - 1, p) for p in inst.p_list)
    prod_q = math.prod(Fraction(q - 1, q) for q in inst.q_list)
    diag = {
        "L": len(inst.r_list),
        "y_over_log_y": y / log_y,
        "smooth_bound": B,
        "log_n": math.log(inst.n),
        "log_n_bound": float(y**theta) * log_y,
        "n_divides_prime_power_cap": inst.r_list == [] or prime_power_cap % inst.n == 0,
        "prod_p": float(prod_p),
        "prod_q": float(prod_q),
        "covered_fraction": float((1 - prod_p) * (1 - prod_q)),
    }
    if eps is not None:
        diag["eps"] = float(eps)
        diag["products_below_target"] = prod_p < eps / 4 and prod_q < eps / 4
    return diag


def assemble(eps, y: int, theta=DEFAULT_THETA, p_list=None, q_list=None) -> Theorem2Instance:
    """Prime families, r-primes up to y, the modulus m and the exponent period n."""
    eps_f = _fraction(eps) if eps is not None else None
    if p_list is None or q_list is None:
        if eps_f is None:
            raise ValueError("give eps or both explicit prime lists")
        p_list, q_list = choose_pq_primes(eps_f)
    D = lcm_all(p - 1 for p in list(p_list) + list(q_list))
    r_list = find_r_primes(D, y, theta, exclude=set(p_list) | set(q_list))
    inst = instance_from_lists(p_list, q_list, r_list, y=y, theta=theta)
    inst.diagnostics = _diagnostics(inst, eps_f)
    return inst


def covering_mask(inst: Theorem2Instance, residues: np.ndarray) -> np.ndarray:
    """a = 1 mod some p in P and a = -1 mod some q in Q."""
    hit_p = np.zeros(residues.shape, dtype=bool)
    for p in inst.p_list:
        hit_p |= residues % p == 1
    hit_q = np.zeros(residues.shape, dtype=bool)
    for q in inst.q_list:
        hit_q |= residues % q == q - 1
    return hit_p & hit_q


@dataclass
class ExclusionReport:
    m: int
    n: int
    covered_classes: int
    solvable_covered_classes: int
    checked_pairs: int
    violations: list[tuple[int, int, str]] = field(default_factory=list)

    @property
    def solvable_fraction(self) -> float:
        return self.solvable_covered_classes / self.covered_classes if self.covered_classes else 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


def solving_exponents(a_values: np.ndarray, fac) -> np.ndarray:
    """Boolean (len(a), n) array: column k-1 marks a solvable with exponent k."""
    tables = [build_table(p**e) for p, e in fac]
    n = lcm_all(t.lambda_q for t in tables)
    out = np.ones((a_values.size, n), dtype=bool)
    for t in tables:
        cols = t.dense()[:, a_values % t.q].T  # (len(a), lambda)
        out &= np.tile(cols, (1, n // t.lambda_q))
    return out


def exclusion_check(inst: Theorem2Instance, cap: int = EXCLUSION_SCAN_CAP) -> ExclusionReport:
    """Check the exponent exclusions for every solvable class satisfying the covering condition."""
    if inst.m > cap:
        raise ValueError(f"m={inst.m} exceeds the exclusion scan cap {cap}")
    fac = factorize(inst.m)
    residues = np.arange(inst.m, dtype=np.int64)
    sel = residues[covering_mask(inst, residues)]
    report = ExclusionReport(inst.m, inst.n, int(sel.size), 0, 0)
    ks = np.arange(1, inst.n + 1)
    for start in range(0, sel.size, 2048):
        chunk = sel[start : start + 2048]
        sol = solving_exponents(chunk, fac)
        report.solvable_covered_classes += int(sol.any(axis=1).sum())
        report.checked_pairs += int(sol.sum())
        for i, a in enumerate(chunk.tolist()):
            k_ok = ks[sol[i]]
            if not k_ok.size:
                continue
            for p in inst.p_list:
                if a % p == 1 and np.any(k_ok % (p - 1) == 0):
                    report.violations.append((a, p, "k = 0 mod p-1"))
            for q in inst.q_list:
                if a % q == q - 1 and np.any(k_ok % (q - 1) == 1 % (q - 1)):
                    report.violations.append((a, q, "k = 1 mod q-1"))
            for r in inst.r_list:
                if np.any(k_ok % (r - 1) == 0):
                    report.violations.append((a, r, "k = 0 mod r-1"))
                if np.any(k_ok % (r - 1) == 1):
                    report.violations.append((a, r, "k = 1 mod r-1"))
    return report


def measured_free_fraction(inst_or_m, class_cap: int = 10**6) -> float:
    """Share of classes a mod 4m with a = 2 (mod 4) that are totient-free."""
    m = inst_or_m.m if isinstance(inst_or_m, Theorem2Instance) else int(inst_or_m)
    if m % 2 == 0:
        raise ValueError("m must be odd")
    odd = tuple(factorize(m))
    report = scan_classes(FactoredModulus(2, odd), "two-mod-four", class_cap=class_cap)
    return report.counts()[Verdict.TOTIENT_FREE.value] / len(report.classifications)


def solvable_fraction(m: int) -> float:
    """Share of a mod m (odd m) with a unit solution for some k."""
    a = np.arange(m, dtype=np.int64)
    return float((least_exponents(a, factorize(m)) > 0).mean())
