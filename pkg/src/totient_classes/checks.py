"""Property suites behind ``lemma-check``; each returns (cases checked, violations)."""

from __future__ import annotations

from .classifier import lemma1_lift
from .goodness import lemma8_ie_check
from .modmath import hensel_lemma2, primes_up_to
from .valueset import collision_count

Violations = list[str]


def check_lift(max_s: int = 8, max_k: int = 12) -> tuple[int, Violations]:
    bad, n = [], 0
    for s in range(1, max_s + 1):
        mod = 2**s
        for k in range(1, max_k + 1):
            for a in range(2, max(mod, 4), 4):
                n += 1
                y = lemma1_lift(a, k, s)
                if y % 4 != 3 or (pow(y, k - 1, mod) * (y - 1) - a) % mod:
                    bad.append(f"s={s} k={k} a={a}: y={y}")
    return n, bad


def check_hensel(primes=(3, 7, 11, 19), max_k: int = 5, max_l: int = 6, scan_cap: int = 10**4):
    bad, n = [], 0
    for p in primes:
        for k in range(2, max_k + 1):
            target = p**k - p ** (k - 1)
            for l in range(1, max_l + 1):
                n += 1
                q = p**l
                x = hensel_lemma2(p, k, l)
                if x % p == 0 or (pow(x, k, q) - pow(x, k - 1, q) - target) % q:
                    bad.append(f"p={p} k={k} l={l}: x={x}")
                if q <= scan_cap:
                    sols = [z for z in range(1, q) if z % p and (pow(z, k, q) - pow(z, k - 1, q) - target) % q == 0]
                    if x % q not in sols:
                        bad.append(f"p={p} k={k} l={l}: x={x} not among {len(sols)} scanned units")
    return n, bad


def check_collisions(max_prime: int = 199) -> tuple[int, Violations]:
    bad, n = [], 0
    for r in primes_up_to(max_prime):
        if r < 5:
            continue
        for k in range(2, r - 1):
            n += 1
            c = collision_count(r, k)
            if not c.formula_holds:
                bad.append(f"r={r} k={k}: pairs {c.ordered_pairs} != formula {c.formula}")
            if not c.bound_holds:
                bad.append(f"r={r} k={k}: {c.distinct} distinct values, bound {c.bound:.3f}")
            if not c.square_holds:
                bad.append(f"r={r} k={k}: L(L-1) < N")
    return n, bad


def check_inclusion_exclusion(max_prime: int = 61, max_L: int = 3) -> tuple[int, Violations]:
    bad, n = [], 0
    for p in primes_up_to(max_prime):
        if p < 3:
            continue
        for L in range(1, max_L + 1):
            for l in range(1, L + 1):
                for a in range(1, p):
                    n += 1
                    r = lemma8_ie_check(p, a, l, L)
                    if not r.identity_holds:
                        bad.append(f"p={p} L={L} l={l} a={a}: {r.brute_count} != {r.ie_sum}")
                    if not r.affine_identity_holds:
                        bad.append(f"p={p} L={L} l={l} a={a}: affine sum {r.ie_sum_affine} off the (0, 0) correction")
                    for c in r.per_s:
                        if not c.weil_ok:
                            bad.append(f"p={p} L={L} l={l} a={a} s={c.s}: N={c.affine} d={c.degree}")
    return n, bad


SUITES = {
    "1": check_lift,
    "2": check_hensel,
    "4": check_collisions,
    "8": check_inclusion_exclusion,
}
