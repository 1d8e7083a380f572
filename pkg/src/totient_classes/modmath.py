"""Integer and modular arithmetic kernel.

Factorization, primality, CRT, unit-group periods, smoothness and the
Hensel construction for matching a prime-power totient by a unit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

Factorization = list[tuple[int, int]]

TRIAL_LIMIT = 10**6
_U64 = 1 << 64
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# The first 13 prime bases are deterministic below this bound.
_MR_DETERMINISTIC = 3317044064679887385961981


class FactorizationError(ValueError):
    """Raised when an integer is too large to factor in opaque form."""


@lru_cache(maxsize=1)
def _spf_table() -> np.ndarray:
    spf = np.zeros(TRIAL_LIMIT + 1, dtype=np.int32)
    for p in range(2, math.isqrt(TRIAL_LIMIT) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    return spf


@lru_cache(maxsize=1)
def small_primes() -> tuple[int, ...]:
    """All primes below ``TRIAL_LIMIT``."""
    spf = _spf_table()
    n = np.arange(spf.size)
    return tuple(int(p) for p in n[2:][spf[2:] == n[2:]])


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    if n <= TRIAL_LIMIT:
        spf = _spf_table()[: n + 1]
        idx = np.arange(n + 1)
        return [int(p) for p in idx[2:][spf[2:] == idx[2:]]]
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.nonzero(sieve)[0]]


def is_prime(n: int) -> bool:
    """Miller-Rabin, deterministic below 3.3e24 (probable-prime above)."""
    if n < 2:
        return False
    if n <= TRIAL_LIMIT:
        return int(_spf_table()[n]) == n
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    bases = _MR_BASES if n < _MR_DETERMINISTIC else _MR_BASES + (43, 47, 53, 59, 61, 67, 71)
    for b in bases:
        x = pow(b, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _rho(n: int, rng: random.Random) -> int:
    """Brent's variant of Pollard rho; returns a nontrivial factor of odd composite n."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out, rng)
        _split(r, out, rng)
        return
    d = _rho(n, rng)
    _split(d, out, rng)
    _split(n // d, out, rng)


def factorize(n: int) -> Factorization:
    """Prime factorization of ``n`` as ascending ``(prime, exponent)`` pairs.

    Trial division below 10**6, then seeded Brent rho.  The cofactor left
    after trial division must fit in 64 bits; larger opaque composites raise
    :class:`FactorizationError` (pass such moduli in factored form).
    """
    if n < 1:
        raise ValueError(f"factorize needs n >= 1, got {n}")
    out: dict[int, int] = {}
    if n <= TRIAL_LIMIT:
        spf = _spf_table()
        while n > 1:
            p = int(spf[n])
            out[p] = out.get(p, 0) + 1
            n //= p
        return sorted(out.items())
    for p in small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        if n < TRIAL_LIMIT * TRIAL_LIMIT or is_prime(n):
            out[n] = out.get(n, 0) + 1
        elif n >= _U64:
            raise FactorizationError(
                f"cofactor {n} exceeds 64 bits; supply the modulus in factored form"
            )
        else:
            _split(n, out, random.Random(n))
    return sorted(out.items())


def recompose(fac: Factorization) -> int:
    return math.prod(p**e for p, e in fac)


def divisors(fac: Factorization) -> list[int]:
    divs = [1]
    for p, e in fac:
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def squarefree_divisors(n: int) -> list[tuple[int, int]]:
    """Squarefree divisors of ``n`` paired with their Mobius value."""
    out = [(1, 1)]
    for p, _ in factorize(n):
        out += [(d * p, -mu) for d, mu in out]
    return sorted(out)


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def lcm_all(values) -> int:
    return reduce(math.lcm, values, 1)


def crt_combine(pairs: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(residue, modulus)`` pairs with pairwise coprime moduli."""
    x, m = 0, 1
    for r, n in pairs:
        if n < 1:
            raise ValueError(f"modulus must be positive, got {n}")
        if math.gcd(m, n) != 1:
            raise ValueError(f"moduli are not coprime: {m} and {n}")
        # x + m*t = r (mod n)
        t = (r - x) * pow(m, -1, n) % n if n > 1 else 0
        x += m * t
        m *= n
    return x % m, m


def carmichael_lambda_odd(p: int, e: int) -> int:
    """Exponent of the unit group modulo ``p**e`` for odd prime ``p``."""
    if p == 2:
        raise ValueError("only odd prime powers are supported")
    return p ** (e - 1) * (p - 1)


@dataclass(frozen=True)
class PeriodData:
    q: int
    lambda_q: int


def period_data(fac: Factorization) -> list[PeriodData]:
    return [PeriodData(p**e, carmichael_lambda_odd(p, e)) for p, e in fac]


def period_cap(fac: Factorization) -> int:
    """Period in k of the solvability of x**k - x**(k-1) = a over units mod odd m.

    Equal to the lcm of the unit-group exponents of the prime powers of m;
    any k >= 1 behaves like ``1 + (k - 1) % period_cap``.
    """
    if any(p == 2 for p, _ in fac):
        raise ValueError("period_cap is defined for odd moduli only")
    return lcm_all(d.lambda_q for d in period_data(fac))


def hensel_lemma2(p: int, k: int, l: int) -> int:
    """Unit x mod p**l with x**k - x**(k-1) = p**k - p**(k-1) (mod p**l).

    Writes x = p**(k-1)*u + 1 and lifts the root u = -1 of
    f(U) = U*(p**(k-1)*U + 1)**(k-1) - p + 1, which is simple mod p.
    """
    if p < 3 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if k < 2:
        raise ValueError("k must be at least 2")
    if l < 1:
        raise ValueError("l must be at least 1")
    w = max(0, l - k + 1)
    base = p ** (k - 1)
    u = p - 1
    if w > 0:
        mod = p**w

        def f(U):
            return U * pow(base * U + 1, k - 1, mod) - p + 1

        def df(U):
            return pow(base * U + 1, k - 1, mod) + U * (k - 1) * base * pow(base * U + 1, k - 2, mod)

        prec = 1
        while prec < w:
            prec = min(2 * prec, w)
            m = p**prec
            u = (u - f(u) * pow(df(u) % m, -1, m)) % m
    x = (base * u + 1) % p**l
    return x


def is_smooth(n: int, bound: int) -> bool:
    if n < 1:
        raise ValueError("n must be positive")
    if bound < 2:
        raise ValueError("smoothness bound must be at least 2")
    for p in small_primes():
        if p > bound or n == 1:
            break
        while n % p == 0:
            n //= p
    if n == 1:
        return True
    if bound < TRIAL_LIMIT:
        return False
    return all(p <= bound for p, _ in factorize(n))


def multiplicative_order(x: int, p: int) -> int:
    """Order of ``x`` in the unit group modulo the prime ``p``."""
    x %= p
    if x == 0:
        raise ValueError("0 is not a unit")
    order = p - 1
    for q, _ in factorize(p - 1):
        while order % q == 0 and pow(x, order // q, p) == 1:
            order //= q
    return order


def primitive_roots(p: int) -> list[int]:
    """All primitive roots modulo the prime ``p``, ascending."""
    if p == 2:
        return [1]
    qs = [q for q, _ in factorize(p - 1)]
    return [g for g in range(2, p) if all(pow(g, (p - 1) // q, p) != 1 for q in qs)]


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    qs = [q for q, _ in factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise ValueError(f"{p} is not prime")


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2:
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r
