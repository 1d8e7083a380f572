"""Brute-force ground truth: a phi sieve, inverse phi, and cross-validation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .classifier import (
    SCHEMA,
    Classification,
    Rationale,
    Verdict,
    as_modulus,
    classify_many,
    witness_check,
)
from .modmath import divisors, factorize, is_prime, primes_up_to

SIEVE_CAP = 2 * 10**8
INVERSE_PHI_CAP = 10**6


@dataclass(frozen=True)
class TotientSieve:
    N: int
    phi: np.ndarray  # uint32, phi[n] for 0 <= n <= N (phi[0] = 0)

    def __getitem__(self, n: int) -> int:
        return int(self.phi[n])

    @cached_property
    def values(self) -> np.ndarray:
        """Distinct totients attained by some n <= N, ascending."""
        return np.unique(self.phi[1:]).astype(np.int64)


def build_sieve(N: int, cap: int = SIEVE_CAP) -> TotientSieve:
    """Exact phi(n) for n <= N.

    Primes up to sqrt(N) are applied by strided slices.  Each n carries at
    most one prime above sqrt(N), so those are applied in bulk grouped by the
    cofactor t in n = t * p.
    """
    if N < 2:
        raise ValueError("sieve limit must be at least 2")
    if N > cap:
        raise ValueError(f"sieve limit {N} exceeds the memory cap {cap}")
    phi = np.arange(N + 1, dtype=np.uint32)
    primes = np.array(primes_up_to(N), dtype=np.int64)
    root = math.isqrt(N)
    small, large = primes[primes <= root], primes[primes > root]
    for p in small.tolist():
        seg = phi[p::p]
        seg -= seg // p
    large32 = large.astype(np.uint32)
    for t in range(1, N // int(large[0]) + 1 if large.size else 1):
        cnt = np.searchsorted(large, N // t, side="right")
        if cnt == 0:
            break
        idx = t * large[:cnt]
        phi[idx] -= phi[idx] // large32[:cnt]
    phi.setflags(write=False)
    return TotientSieve(N, phi)


def totients_in_class(sieve: TotientSieve, a: int, M, distinct: bool = True) -> list[int]:
    """Values phi(n), n <= N, congruent to ``a`` mod ``M`` (sorted)."""
    M = as_modulus(M).value
    a %= M
    vals = sieve.values if distinct else np.sort(sieve.phi[1:]).astype(np.int64)
    if M > int(vals[-1]):
        hit = vals[vals == a]
    else:
        hit = vals[vals % M == a]
    return hit.tolist()


def inverse_phi(v: int, cap: int = INVERSE_PHI_CAP) -> list[int]:
    """All z with phi(z) = v.

    Builds z from primes p with (p - 1) | v, taken in decreasing order so each
    factorization is produced once.
    """
    if v < 1:
        raise ValueError("v must be positive")
    if v > cap:
        raise ValueError(f"v={v} exceeds the inverse-phi cap {cap}")
    cands = sorted((d + 1 for d in divisors(factorize(v)) if is_prime(d + 1)), reverse=True)

    def build(w: int, start: int) -> list[int]:
        out = [1] if w == 1 else []
        for i in range(start, len(cands)):
            p = cands[i]
            if w % (p - 1):
                continue
            rest, pk = w // (p - 1), p
            while True:
                out += [pk * z for z in build(rest, i + 1)]
                if rest % p:
                    break
                rest //= p
                pk *= p
        return out

    return sorted(build(v, 0))


def inverse_phi_bruteforce(v: int) -> list[int]:
    """Scan z <= 2 v**2, which covers every preimage since phi(z) >= sqrt(z/2)."""
    limit = 2 * v * v
    return [z for z in range(1, limit + 1) if _phi(z) == v]


def _phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out -= out // p
    return out


@dataclass(frozen=True)
class QuestionCandidate:
    a: int
    preimages: tuple[int, ...]

    @property
    def nontotient(self) -> bool:
        return not self.preimages


def question_scan(limit: int, cap: int = INVERSE_PHI_CAP) -> list[QuestionCandidate]:
    """a = 2 (mod 4), a <= limit, that are nontotients or have preimages exactly {p, 2p}."""
    if limit > cap:
        raise ValueError(f"limit {limit} exceeds the inverse-phi cap {cap}")
    out = []
    for a in range(2, limit + 1, 4):
        pre = inverse_phi(a, cap)
        if not pre or (len(pre) == 2 and is_prime(pre[0]) and pre[1] == 2 * pre[0]):
            out.append(QuestionCandidate(a, tuple(pre)))
    return out


@dataclass(frozen=True)
class ClassEvidence:
    a: int
    classification: Classification
    hits: tuple[int, ...]
    status: str  # "free" | "one" | "confirmed" | "unconfirmed" | "contradiction"

    def to_record(self, shown: int = 5) -> dict:
        rec = self.classification.to_record()
        rec["hits"] = len(self.hits)
        rec["first_hits"] = list(self.hits[:shown])
        rec["status"] = self.status
        return rec


@dataclass
class CrossValidationReport:
    M: int
    N: int
    evidence: list[ClassEvidence] = field(default_factory=list)

    @property
    def contradictions(self) -> list[ClassEvidence]:
        return [e for e in self.evidence if e.status == "contradiction"]

    def summary(self) -> dict:
        statuses: dict[str, int] = {}
        for e in self.evidence:
            statuses[e.status] = statuses.get(e.status, 0) + 1
        return {
            "schema": SCHEMA,
            "type": "summary",
            "M": str(self.M),
            "N": self.N,
            "classes": len(self.evidence),
            "statuses": dict(sorted(statuses.items())),
            "contradictions": len(self.contradictions),
        }


def _judge(c: Classification, hits: tuple[int, ...]) -> str:
    if c.verdict is Verdict.TOTIENT_FREE:
        return "free" if not hits else "contradiction"
    if c.verdict is Verdict.EXACTLY_ONE:
        return "one" if hits == (c.totient,) else "contradiction"
    if c.rationale is Rationale.UNIT_SOLUTION and not witness_check(c.rc, c.witness):
        return "contradiction"
    return "confirmed" if hits else "unconfirmed"


def cross_validate(M, N: int | TotientSieve) -> CrossValidationReport:
    """Compare every class verdict mod M against the totients phi(n), n <= N."""
    M = as_modulus(M)
    sieve = N if isinstance(N, TotientSieve) else build_sieve(N)
    Mv = M.value
    vals = sieve.values
    res = vals % Mv if Mv <= int(vals[-1]) else vals
    order = np.argsort(res, kind="stable")
    sorted_res = res[order]
    report = CrossValidationReport(Mv, sieve.N)
    for c in classify_many(M, range(Mv)):
        lo = np.searchsorted(sorted_res, c.rc.a, side="left")
        hi = np.searchsorted(sorted_res, c.rc.a, side="right")
        hits = tuple(vals[order[lo:hi]].tolist())
        report.evidence.append(ClassEvidence(c.rc.a, c, hits, _judge(c, hits)))
    return report
