"""Decide whether a residue class holds infinitely many, one, or no totients.

A class ``a (mod 2**s * m)`` with ``m`` odd falls into one of three cases:

* it contains a multiple of 4, and then infinitely many totients;
* it is made of odd numbers, and then holds at most the totient 1;
* it is made of numbers that are 2 mod 4.  Such totients have the shape
  ``p**(k-1) * (p - 1)``, so the class has infinitely many of them exactly when
  ``x**k - x**(k-1) = a (mod m)`` has a solution with ``gcd(x, m) = 1``.
  Otherwise its only possible totient is ``p - 1`` for a prime ``p | m``.
"""

from __future__ import annotations

import enum
import math
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import modmath
from .modmath import Factorization, crt_combine, factorize, is_prime, lcm_all, period_cap
from .valueset import (
    ENUMERATION_CAP,
    MATERIALIZE_BUDGET,
    EnumerationCapError,
    build_table,
    search_unit_root,
)

SCHEMA = 1
CLASS_SCAN_CAP = 10**6
WITNESS_SEARCH_BOUND = 10**8
ROOT_SEARCH_TRIES = 2**16


@dataclass(frozen=True)
class FactoredModulus:
    """``2**s`` times an odd part held as ascending ``(prime, exponent)`` pairs."""

    s: int
    odd: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.s < 0:
            raise ValueError("s must be non-negative")
        primes = [p for p, _ in self.odd]
        if primes != sorted(set(primes)) or any(p == 2 or e < 1 for p, e in self.odd):
            raise ValueError(f"malformed odd factorization {self.odd}")

    @classmethod
    def from_int(cls, M: int) -> FactoredModulus:
        if M < 1:
            raise ValueError(f"modulus must be positive, got {M}")
        fac = factorize(M)
        s = dict(fac).pop(2, 0)
        return cls(s, tuple((p, e) for p, e in fac if p != 2))

    @classmethod
    def from_factors(cls, fac: Factorization) -> FactoredModulus:
        merged: dict[int, int] = {}
        for p, e in fac:
            merged[p] = merged.get(p, 0) + e
        s = merged.pop(2, 0)
        return cls(s, tuple(sorted(merged.items())))

    @classmethod
    def parse(cls, text: str) -> FactoredModulus:
        """Parse ``"2^s * p1^e1 * p2 * ..."``; whitespace is ignored."""
        body = re.sub(r"\s+", "", text)
        if not body:
            raise ValueError("empty factored modulus")
        fac = []
        for term in body.split("*"):
            m = re.fullmatch(r"(\d+)(?:\^(\d+))?", term)
            if not m:
                raise ValueError(f"bad factor term {term!r}")
            p, e = int(m.group(1)), int(m.group(2) or 1)
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            fac.append((p, e))
        return cls.from_factors(fac)

    @property
    def m(self) -> int:
        return modmath.recompose(list(self.odd))

    @property
    def value(self) -> int:
        return 2**self.s * self.m

    @property
    def odd_factors(self) -> Factorization:
        return list(self.odd)

    def __str__(self):
        terms = [f"2^{self.s}"] if self.s else []
        terms += [f"{p}^{e}" if e > 1 else str(p) for p, e in self.odd]
        return " * ".join(terms) or "1"


def as_modulus(M) -> FactoredModulus:
    if isinstance(M, FactoredModulus):
        return M
    if isinstance(M, str):
        return FactoredModulus.parse(M)
    return FactoredModulus.from_int(int(M))


@dataclass(frozen=True)
class ResidueClass:
    a: int
    M: FactoredModulus

    def __post_init__(self):
        if not 0 <= self.a < self.M.value:
            raise ValueError(f"residue {self.a} is not reduced mod {self.M.value}")

    @classmethod
    def of(cls, a: int, M) -> ResidueClass:
        M = as_modulus(M)
        return cls(a % M.value, M)


class Verdict(enum.Enum):
    INFINITELY_MANY = "InfinitelyMany"
    EXACTLY_ONE = "ExactlyOne"
    TOTIENT_FREE = "TotientFree"


class Rationale(enum.Enum):
    # Values are the machine-readable tags of the verdict record schema.
    MULTIPLE_OF_FOUR = "TheoremA"
    UNIT_SOLUTION = "Lemma3Solvable"
    PRIME_MINUS_ONE = "Lemma3PrimeMinusOne"
    ODD_ONLY_ONE = "OddOnlyContainsOne"
    ODD_NONE = "OddNoTotient"
    NO_UNIT_SOLUTION = "Lemma3Unsolvable"


@dataclass(frozen=True)
class Witness:
    """``x**k - x**(k-1) = a`` mod the odd part, and ``y = 3 (mod 4)`` doing the same mod ``2**s``."""

    x: int
    k: int
    y: int


@dataclass(frozen=True)
class Classification:
    rc: ResidueClass
    verdict: Verdict
    rationale: Rationale
    witness: Witness | None = None
    totient: int | None = None
    prime: int | None = None

    def to_record(self) -> dict:
        rec = {
            "schema": SCHEMA,
            "a": self.rc.a,
            "M": str(self.rc.M.value),
            "verdict": self.verdict.value,
            "rationale": self.rationale.value,
        }
        if self.witness is not None:
            rec["witness"] = {"x": self.witness.x, "k": self.witness.k, "y": self.witness.y}
        if self.totient is not None:
            rec["totient"] = self.totient
        if self.prime is not None:
            rec["prime"] = self.prime
        return rec


def _odd_factors(m_factored) -> Factorization:
    if isinstance(m_factored, FactoredModulus):
        if m_factored.s:
            raise ValueError("solvable_mod_m needs an odd modulus")
        return m_factored.odd_factors
    if isinstance(m_factored, int):
        m_factored = factorize(m_factored)
    fac = list(m_factored)
    if any(p == 2 for p, _ in fac):
        raise ValueError("solvable_mod_m needs an odd modulus")
    return fac


def _combine_witness(a: int, k: int, qs: list[int], cap: int) -> int:
    pairs = []
    for q in qs:
        if q <= cap:
            x = build_table(q, cap).least_unit(k, a)
        else:
            x = search_unit_root(q, k, a, ROOT_SEARCH_TRIES)
        pairs.append((x, q))
    return crt_combine(pairs)[0]


def solvable_mod_m(a: int, m_factored, cap: int = ENUMERATION_CAP) -> tuple[int, int] | None:
    """Least ``(k, x)`` with ``x**k - x**(k-1) = a (mod m)`` and ``gcd(x, m) = 1``.

    ``k`` runs over one full period (``period_cap``), which decides
    solvability for every ``k >= 1``.  ``x`` is the CRT combination of the
    least per-prime-power units.  Prime powers above ``cap`` are handled by a
    bounded root search; if that search cannot decide, EnumerationCapError
    is raised rather than guessing.
    """
    fac = _odd_factors(m_factored)
    if not fac:
        return 1, 0
    qs = [p**e for p, e in fac]
    small = [build_table(q, cap) for q in qs if q <= cap]
    large = [q for q in qs if q > cap]
    n = period_cap(fac)
    n_small = lcm_all(t.lambda_q for t in small)
    small_hit = False
    for k in range(1, n + 1):
        if not small_hit and k > n_small:
            return None
        if not all(t.row((k - 1) % t.lambda_q)[a % t.q] for t in small):
            continue
        small_hit = True
        roots = [(q, search_unit_root(q, k, a, ROOT_SEARCH_TRIES)) for q in large]
        if any(r is None for _, r in roots):
            # k = 1 and searches that covered every residue are exact
            if all(r is not None or k == 1 or q <= ROOT_SEARCH_TRIES + 1 for q, r in roots):
                continue
            raise EnumerationCapError(
                f"cannot decide k={k} for prime powers above the cap {cap} in {fac}"
            )
        return k, _combine_witness(a, k, qs, cap)
    return None


def least_exponents(residues, m_factored, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """Vectorized least solving k for many residues mod odd m (0 = unsolvable)."""
    fac = _odd_factors(m_factored)
    res = np.asarray(residues, dtype=np.int64)
    least = np.zeros(res.shape, dtype=np.int64)
    if not fac:
        least[:] = 1
        return least
    tables = [build_table(p**e, cap) for p, e in fac]
    lookups = []
    for t in tables:
        rows = t.dense() if t.lambda_q * t.q <= MATERIALIZE_BUDGET else None
        lookups.append((t, rows, res % t.q))
    pending = np.ones(res.shape, dtype=bool)
    for j in range(period_cap(fac)):
        ok = pending.copy()
        for t, rows, r in lookups:
            row = rows[j % t.lambda_q] if rows is not None else t.row(j)
            ok &= row[r]
        least[ok] = j + 1
        pending &= ~ok
        if not pending.any():
            break
    return least


def lemma1_lift(a: int, k: int, s: int) -> int:
    """``y = 3 (mod 4)`` with ``y**k - y**(k-1) = a (mod 2**s)``.

    On residues 3 mod 4 the map is injective mod every ``2**t``, so the
    solution mod ``2**t`` is one of the two lifts of the solution mod
    ``2**(t-1)``; the loop is an exhaustive scan done bit by bit.
    """
    if a % 4 != 2:
        raise ValueError(f"a must be 2 mod 4, got {a}")
    if k < 1 or s < 1:
        raise ValueError("k and s must be at least 1")
    y = 3
    for t in range(3, s + 1):
        mod = 1 << t
        for cand in (y, y + (mod >> 1)):
            if pow(cand, k - 1, mod) * (cand - 1) % mod == a % mod:
                y = cand
                break
        else:  # pragma: no cover - excluded by injectivity
            raise ArithmeticError(f"no lift for a={a}, k={k} mod 2^{t}")
    return y


def classify(rc: ResidueClass, cap: int = ENUMERATION_CAP) -> Classification:
    return _classify(rc, None, cap)


def _classify(rc: ResidueClass, least_k: int | None, cap: int) -> Classification:
    a, M = rc.a, rc.M
    if a % math.gcd(M.value, 4) == 0:
        return Classification(rc, Verdict.INFINITELY_MANY, Rationale.MULTIPLE_OF_FOUR)
    if a % 2 == 1:
        if a == 1:
            return Classification(rc, Verdict.EXACTLY_ONE, Rationale.ODD_ONLY_ONE, totient=1)
        return Classification(rc, Verdict.TOTIENT_FREE, Rationale.ODD_NONE)
    # a = 2 (mod 4) and s >= 2
    m = M.m
    if least_k is None:
        sol = solvable_mod_m(a % m, M.odd_factors, cap)
    elif least_k > 0:
        qs = [p**e for p, e in M.odd]
        sol = (least_k, _combine_witness(a % m, least_k, qs, cap) if qs else 0)
    else:
        sol = None
    if sol is not None:
        k, x = sol
        y = lemma1_lift(a, k, M.s)
        return Classification(rc, Verdict.INFINITELY_MANY, Rationale.UNIT_SOLUTION, Witness(x, k, y))
    for p, _ in M.odd:
        if p - 1 == a:
            return Classification(
                rc, Verdict.EXACTLY_ONE, Rationale.PRIME_MINUS_ONE, totient=p - 1, prime=p
            )
    return Classification(rc, Verdict.TOTIENT_FREE, Rationale.NO_UNIT_SOLUTION)


def classify_many(M, residues, cap: int = ENUMERATION_CAP) -> list[Classification]:
    """Classify many residues mod one modulus, sharing the exponent search."""
    M = as_modulus(M)
    residues = list(residues)
    need = [a for a in residues if M.s >= 2 and a % 4 == 2]
    least: dict[int, int] = {}
    if need and M.odd:
        m = M.m
        uniq = sorted({a % m for a in need})
        least = dict(zip(uniq, least_exponents(uniq, M.odd_factors, cap).tolist()))
    out = []
    for a in residues:
        rc = ResidueClass(a, M)
        k = least.get(a % M.m, 1) if (M.s >= 2 and a % 4 == 2) else None
        out.append(_classify(rc, k, cap))
    return out


def witness_check(rc: ResidueClass, witness: Witness) -> bool:
    """Re-evaluate both congruences of an InfinitelyMany witness."""
    m, two_s = rc.M.m, 2**rc.M.s
    x, k, y = witness.x, witness.k, witness.y
    if k < 1 or math.gcd(x, m) != 1 or y % 4 != 3:
        return False
    odd_ok = (pow(x, k - 1, m) * (x - 1) - rc.a) % m == 0
    two_ok = (pow(y, k - 1, two_s) * (y - 1) - rc.a) % two_s == 0
    return odd_ok and two_ok


@dataclass(frozen=True)
class PrimeWitness:
    p: int
    k: int
    value_mod_M: int
    ok: bool


def witness_prime(
    rc: ResidueClass, witness: Witness, search_bound: int = WITNESS_SEARCH_BOUND
) -> PrimeWitness | None:
    """Least prime ``p = x (mod m)``, ``p = y (mod 2**s)``, among ``search_bound`` candidates.

    Such a prime has ``phi(p**k) = a (mod M)``; the check record recomputes
    ``p**(k-1) * (p - 1) mod M`` directly.
    """
    if not witness_check(rc, witness):
        raise ValueError(f"witness {witness} does not fit class {rc.a} mod {rc.M.value}")
    M = rc.M.value
    c, _ = crt_combine([(witness.x % rc.M.m, rc.M.m), (witness.y % 2**rc.M.s, 2**rc.M.s)])
    p = c
    for _ in range(search_bound):
        if is_prime(p):
            v = pow(p, witness.k - 1, M) * (p - 1) % M
            return PrimeWitness(p, witness.k, v, v == rc.a)
        p += M
    return None


@dataclass
class ScanReport:
    M: FactoredModulus
    filter: str
    classifications: list[Classification] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out = {v.value: 0 for v in Verdict}
        for c in self.classifications:
            out[c.verdict.value] += 1
        return out

    def summary(self) -> dict:
        counts = self.counts()
        total = len(self.classifications)
        fractions = {k: (v / total if total else 0.0) for k, v in counts.items()}
        return {
            "schema": SCHEMA,
            "type": "summary",
            "M": str(self.M.value),
            "filter": self.filter,
            "classes": total,
            "counts": counts,
            "fractions": fractions,
            "totient_free_fraction": fractions[Verdict.TOTIENT_FREE.value],
        }


def _scan_chunk(args):
    M, residues, cap = args
    return classify_many(M, residues, cap)


def scan_classes(
    M,
    filter: str = "all",
    class_cap: int = CLASS_SCAN_CAP,
    workers: int = 1,
    cap: int = ENUMERATION_CAP,
) -> ScanReport:
    """Classify every class mod M (``filter="two-mod-four"`` keeps a = 2 mod 4)."""
    M = as_modulus(M)
    if filter not in ("all", "two-mod-four"):
        raise ValueError(f"unknown filter {filter!r}")
    total = M.value
    if filter == "two-mod-four":
        if M.s < 2:
            raise ValueError("two-mod-four filter needs 4 | M")
        residues = range(2, total, 4)
    else:
        residues = range(total)
    if len(residues) > class_cap:
        raise ValueError(
            f"{len(residues)} classes exceed the scan cap {class_cap}; shard the range"
        )
    if workers <= 1 or len(residues) < 2 * workers:
        return ScanReport(M, filter, classify_many(M, residues, cap))
    size = -(-len(residues) // workers)
    chunks = [(M, residues[i : i + size], cap) for i in range(0, len(residues), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_scan_chunk, chunks))
    return ScanReport(M, filter, [c for part in parts for c in part])
