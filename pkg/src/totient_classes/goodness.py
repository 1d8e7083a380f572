"""Good and forbidden odd numbers.

An odd m is *good* when ``x**k - x**(k-1) = a (mod m)`` has a unit solution
for every a.  Prime by prime, a solution with a prescribed exponent class
``k = l (mod L)`` comes from a primitive root g and a solution y of
``y**L * (1 - g) = a * g**l (mod p)``.  Counting those pairs by
inclusion-exclusion over squarefree s | p - 1 reduces to point counts on the
curves ``y**L * (1 - z**s) = a * z**(s*l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .classifier import SCHEMA, least_exponents
from .modmath import (
    crt_combine,
    factorize,
    is_prime,
    lcm_all,
    primitive_roots,
    squarefree_divisors,
)
from .valueset import _vec_pow

GOOD_SCAN_CAP = 10**5
IE_PRIME_CAP = 200
DEFAULT_P0 = 3


@dataclass(frozen=True)
class GoodnessVerdict:
    m: int
    good: bool
    failing_a: int | None = None

    def to_record(self) -> dict:
        return {"schema": SCHEMA, "m": self.m, "good": self.good, "failing_a": self.failing_a}


def _check_odd(m: int) -> None:
    if m < 1 or m % 2 == 0:
        raise ValueError(f"m must be a positive odd integer, got {m}")


def is_good(m: int, cap: int = GOOD_SCAN_CAP) -> GoodnessVerdict:
    _check_odd(m)
    if m > cap:
        raise ValueError(f"m={m} exceeds the goodness scan cap {cap}")
    least = least_exponents(np.arange(m), factorize(m))
    bad = np.nonzero(least == 0)[0]
    if bad.size:
        return GoodnessVerdict(m, False, int(bad[0]))
    return GoodnessVerdict(m, True)


@dataclass(frozen=True)
class ForbiddenCertificate:
    m: int
    forbidden: bool
    largest_prime: int | None
    lcm_rest: int
    gcd: int

    def __bool__(self):
        return self.forbidden

    def to_record(self) -> dict:
        return {
            "schema": SCHEMA,
            "m": self.m,
            "forbidden": self.forbidden,
            "largest_prime": self.largest_prime,
            "lcm_rest": self.lcm_rest,
            "gcd": self.gcd,
        }


def is_forbidden(m: int) -> ForbiddenCertificate:
    """gcd(p_j - 1, lcm(p_i - 1 : i < j)) ** 10 > p_j, primes taken with multiplicity."""
    _check_odd(m)
    if m == 1:
        return ForbiddenCertificate(1, False, None, 1, 1)
    primes = [p for p, e in factorize(m) for _ in range(e)]
    top = primes[-1]
    rest = lcm_all(p - 1 for p in primes[:-1])
    g = math.gcd(top - 1, rest)
    return ForbiddenCertificate(m, g**10 > top, top, rest, g)


def _discrete_log(y: int, g: int, p: int) -> int:
    acc = 1
    for u in range(p - 1):
        if acc == y:
            return u
        acc = acc * g % p
    raise ValueError(f"{y} is not a power of {g} mod {p}")


def _check_lemma8_args(p: int, l: int, L: int) -> None:
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if not 1 <= l <= L:
        raise ValueError(f"need 1 <= l <= L, got l={l}, L={L}")


def lemma8_solve(p: int, a: int, l: int, L: int) -> tuple[int, int] | None:
    """``(k, x)`` with ``k = l (mod L)``, x a unit and ``x**k - x**(k-1) = a (mod p)``.

    Primary route: the first primitive root g (ascending) for which
    ``y**L = a * g**l / (1 - g)`` is solvable; then ``x = 1/g`` and
    ``k = l - u*L`` where ``y = g**u``, shifted to the least positive value
    in its class mod lcm(L, p - 1).  Falls back to a direct search over
    ``k = l, l + L, ...``, which also covers the classes the primary route
    cannot reach.
    """
    _check_lemma8_args(p, l, L)
    a %= p
    if a == 0:
        return l, 1
    period = lcm_all([L, p - 1])
    for g in primitive_roots(p):
        rhs = a * pow(g, l, p) * pow(1 - g, -1, p) % p
        y = next((y for y in range(1, p) if pow(y, L, p) == rhs), None)
        if y is None:
            continue
        u = _discrete_log(y, g, p)
        x = pow(g, -1, p)
        k = (l - u * L) % period or period
        if (pow(x, k - 1, p) * (x - 1) - a) % p == 0 and k % L == l % L:
            return k, x
    for t in range(period // L):
        k = l + t * L
        for x in range(1, p):
            if (pow(x, k - 1, p) * (x - 1) - a) % p == 0:
                return k, x
    return None


@dataclass(frozen=True)
class CurveCount:
    s: int
    mu: int
    affine: int  # all (y, z) mod p
    units: int  # z != 0
    degree: int
    weil_ok: bool


@dataclass
class IEReport:
    p: int
    L: int
    l: int
    a: int
    brute_count: int
    ie_sum: Fraction
    ie_sum_affine: Fraction
    per_s: list[CurveCount] = field(default_factory=list)

    @property
    def identity_holds(self) -> bool:
        return self.ie_sum == self.brute_count

    @property
    def affine_identity_holds(self) -> bool:
        # (y, z) = (0, 0) lies on every curve and adds sum mu(s)/s = phi(p-1)/(p-1).
        phi = sum(mu * (self.p - 1) // s for s, mu in squarefree_divisors(self.p - 1))
        return self.ie_sum_affine == self.brute_count + Fraction(phi, self.p - 1)

    @property
    def weil_ok(self) -> bool:
        return all(c.weil_ok for c in self.per_s)


def weil_bound_holds(N: int, p: int, d: int) -> bool:
    """|N - (p + 1)| <= (d - 1)(d - 2) sqrt(p) + d, compared in integers."""
    excess = abs(N - (p + 1)) - d
    if excess <= 0:
        return True
    c = (d - 1) * (d - 2)
    return excess * excess <= c * c * p


def lemma8_ie_check(p: int, a: int, l: int, L: int, prime_cap: int = IE_PRIME_CAP) -> IEReport:
    """Brute-force both sides of the primitive-root inclusion-exclusion identity."""
    _check_lemma8_args(p, l, L)
    if p > prime_cap:
        raise ValueError(f"p={p} exceeds the brute-force cap {prime_cap}")
    a %= p
    if a == 0:
        raise ValueError("a must be nonzero mod p")
    ys = np.arange(p, dtype=np.int64)
    yL = _vec_pow(ys, L, p)
    roots = np.array(primitive_roots(p), dtype=np.int64)
    lhs = np.outer(yL, (1 - roots) % p) % p
    rhs = a * np.array([pow(int(g), l, p) for g in roots]) % p
    brute = int((lhs == rhs[None, :]).sum())

    ie = Fraction(0)
    ie_aff = Fraction(0)
    report = IEReport(p, L, l, a, brute, ie, ie_aff)
    zs = np.arange(p, dtype=np.int64)
    for s, mu in squarefree_divisors(p - 1):
        zs_s = _vec_pow(zs, s, p)
        zsl = _vec_pow(zs, s * l, p)
        on = (np.outer(yL, (1 - zs_s) % p) % p) == (a * zsl % p)[None, :]
        affine = int(on.sum())
        units = int(on[:, 1:].sum())
        d = max(L + s, s * l)
        report.per_s.append(CurveCount(s, mu, affine, units, d, weil_bound_holds(affine, p, d)))
        ie += Fraction(mu * units, s)
        ie_aff += Fraction(mu * affine, s)
    report.ie_sum = ie
    report.ie_sum_affine = ie_aff
    return report


@dataclass
class CorollaryStep:
    j: int
    p: int
    n_j: int
    gcd: int
    chain_ok: bool
    k: int | None
    x_mod_p: int | None


@dataclass
class CorollaryResult:
    primes: list[int]
    a: int
    x: int | None
    k: int | None
    m: int
    n: int
    steps: list[CorollaryStep] = field(default_factory=list)
    failed_step: int | None = None

    @property
    def ok(self) -> bool:
        return self.failed_step is None


def corollary_construct(primes, a: int) -> CorollaryResult:
    """Build (x, k) prime by prime: each step keeps x mod the earlier primes and k mod their period."""
    primes = list(primes)
    if primes != sorted(set(primes)) or any(p < 3 or not is_prime(p) for p in primes):
        raise ValueError("primes must be distinct odd primes in ascending order")
    if not primes:
        raise ValueError("need at least one prime")
    m = math.prod(primes)
    res = CorollaryResult(primes, a, None, None, m, lcm_all(p - 1 for p in primes))
    x, k, P = 0, 0, 1
    for j, p in enumerate(primes, start=1):
        n_j = lcm_all(q - 1 for q in primes[: j - 1])
        g = math.gcd(p - 1, n_j)
        chain_ok = j == 1 or g**10 <= p
        l = 1 if j == 1 else (k - 1) % n_j + 1
        sol = lemma8_solve(p, a, l, n_j)
        res.steps.append(CorollaryStep(j, p, n_j, g, chain_ok, sol and sol[0], sol and sol[1]))
        if sol is None:
            res.failed_step = j
            return res
        k = sol[0]
        x, P = crt_combine([(x % P, P), (sol[1], p)])
    # k is only pinned modulo the period of the units mod m; keep the least positive representative.
    k = (k - 1) % res.n + 1
    res.x, res.k = x, k
    return res


@dataclass(frozen=True)
class DensityReport:
    kind: str
    lo: int
    hi: int
    total: int
    count: int
    comparison: float | None = None

    @property
    def fraction(self) -> float:
        return self.count / self.total if self.total else 0.0

    def to_record(self) -> dict:
        rec = {
            "schema": SCHEMA,
            "type": "summary",
            "kind": self.kind,
            "lo": self.lo,
            "hi": self.hi,
            "odd_numbers": self.total,
            "count": self.count,
            "fraction": self.fraction,
        }
        if self.comparison is not None:
            rec["x_over_log5_x"] = self.comparison
        return rec


def good_scan(A: int, B: int, cap: int = GOOD_SCAN_CAP) -> tuple[DensityReport, list[GoodnessVerdict]]:
    """is_good for every odd m in [A, B]."""
    if A < 1 or B < A:
        raise ValueError(f"bad range [{A}, {B}]")
    verdicts = [is_good(m, cap) for m in range(A | 1, B + 1, 2)]
    report = DensityReport("good", A, B, len(verdicts), sum(v.good for v in verdicts))
    return report, verdicts


def forbidden_scan(x: int) -> tuple[DensityReport, list[ForbiddenCertificate]]:
    """Forbidden odd m in (x, 2x], with x / log(x)**5 alongside for comparison."""
    if x < 2:
        raise ValueError("x must be at least 2")
    start = x + 1 if x % 2 == 0 else x + 2
    certs = [is_forbidden(m) for m in range(start, 2 * x + 1, 2)]
    comparison = x / math.log(x) ** 5
    hits = [c for c in certs if c.forbidden]
    return DensityReport("forbidden", x + 1, 2 * x, len(certs), len(hits), comparison), hits


@dataclass(frozen=True)
class ContrapositiveViolation:
    m: int
    failing_a: int


def corollary_contrapositive_scan(limit: int, p0: int = DEFAULT_P0) -> list[ContrapositiveViolation]:
    """Not-good odd m <= limit, all prime factors > p0, with no forbidden divisor.

    The construction predicts none once p0 is past the ineffective threshold;
    each violation is a lower bound witness for that threshold.
    """
    out = []
    for m in range(3, limit + 1, 2):
        fac = factorize(m)
        if fac[0][0] <= p0:
            continue
        v = is_good(m, cap=max(limit, GOOD_SCAN_CAP))
        if v.good:
            continue
        if not any(is_forbidden(d).forbidden for d in _odd_divisors(fac) if d > 1):
            out.append(ContrapositiveViolation(m, v.failing_a))
    return out


def _odd_divisors(fac):
    divs = [1]
    for p, e in fac:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return divs
