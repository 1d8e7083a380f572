"""Attainable values of x**j * (x - 1) over the units of an odd prime power.

Row ``j`` of a :class:`ValueSetTable` for ``q`` marks every residue
``a (mod q)`` with a unit solution of ``x**j * (x - 1) = a``.  Since
``x**lambda_q = 1`` for units, the exponent k of ``x**k - x**(k-1)`` enters
only through ``j = (k - 1) % lambda_q``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .modmath import carmichael_lambda_odd, factorize, is_prime

ENUMERATION_CAP = 10**6
MATERIALIZE_BUDGET = 6 * 10**7
FORMAT_TAG = "valueset-v1"


class EnumerationCapError(ValueError):
    pass


def _vec_pow(base: np.ndarray, e: int, q: int) -> np.ndarray:
    result = np.ones_like(base)
    b = base.copy()
    while e:
        if e & 1:
            result = result * b % q
        b = b * b % q
        e >>= 1
    return result


def _prime_power(q: int) -> tuple[int, int]:
    fac = factorize(q)
    if len(fac) != 1 or fac[0][0] == 2:
        raise ValueError(f"{q} is not a power of an odd prime")
    return fac[0]


class ValueSetTable:
    """Lazily built bitset rows for one odd prime power ``q``.

    Rows are built on first use under a lock, so concurrent readers observe
    the same content an eager build would produce.
    """

    def __init__(self, q: int, cap: int = ENUMERATION_CAP):
        if q > cap:
            raise EnumerationCapError(
                f"q={q} is above the enumeration cap {cap}; only factored-form "
                "reasoning is supported for larger prime powers"
            )
        self.p, self.e = _prime_power(q)
        self.q = q
        self.lambda_q = carmichael_lambda_odd(self.p, self.e)
        xs = np.arange(1, q, dtype=np.int64)
        self.units = xs[xs % self.p != 0]
        self._rows: dict[int, np.ndarray] = {}
        self._dense: np.ndarray | None = None
        self._lock = threading.Lock()

    def __repr__(self):
        return f"ValueSetTable(q={self.q}, lambda_q={self.lambda_q})"

    def values(self, j: int) -> np.ndarray:
        """``x**j * (x - 1) mod q`` for each unit x, in ascending order of x."""
        j %= self.lambda_q
        return _vec_pow(self.units, j, self.q) * (self.units - 1) % self.q

    def row(self, j: int) -> np.ndarray:
        j %= self.lambda_q
        if self._dense is not None:
            return self._dense[j]
        r = self._rows.get(j)
        if r is None:
            with self._lock:
                r = self._rows.get(j)
                if r is None:
                    r = np.zeros(self.q, dtype=bool)
                    r[self.values(j)] = True
                    r.setflags(write=False)
                    self._rows[j] = r
        return r

    def dense(self) -> np.ndarray:
        """All rows as a ``(lambda_q, q)`` boolean array."""
        if self._dense is None:
            if self.lambda_q * self.q > MATERIALIZE_BUDGET:
                raise EnumerationCapError(
                    f"materializing q={self.q} needs {self.lambda_q * self.q} cells"
                )
            with self._lock:
                if self._dense is None:
                    d = np.zeros((self.lambda_q, self.q), dtype=bool)
                    cur = np.ones_like(self.units)
                    shift = self.units - 1
                    for j in range(self.lambda_q):
                        d[j, cur * shift % self.q] = True
                        cur = cur * self.units % self.q
                    d.setflags(write=False)
                    self._dense = d
        return self._dense

    def contains(self, k: int, a: int) -> bool:
        if k < 1:
            raise ValueError("k must be at least 1")
        return bool(self.row(k - 1)[a % self.q])

    def least_unit(self, k: int, a: int) -> int | None:
        """Least unit x with ``x**k - x**(k-1) = a (mod q)``."""
        hit = np.nonzero(self.values(k - 1) == a % self.q)[0]
        return int(self.units[hit[0]]) if hit.size else None

    def packed(self) -> bytes:
        return np.packbits(self.dense(), axis=1).tobytes()


_registry: dict[int, ValueSetTable] = {}
_registry_lock = threading.Lock()


def build_table(q: int, cap: int = ENUMERATION_CAP) -> ValueSetTable:
    """Shared table for ``q``; repeated calls return the same object."""
    if q > cap:
        raise EnumerationCapError(
            f"q={q} is above the enumeration cap {cap}; only factored-form "
            "reasoning is supported for larger prime powers"
        )
    table = _registry.get(q)
    if table is None:
        with _registry_lock:
            table = _registry.get(q)
            if table is None:
                table = _registry[q] = ValueSetTable(q, cap=max(cap, q))
    return table


def install(table: ValueSetTable) -> None:
    """Make ``table`` the shared instance for its modulus (used by the disk cache)."""
    with _registry_lock:
        _registry[table.q] = table


def contains(table: ValueSetTable, k: int, a: int) -> bool:
    return table.contains(k, a)


def search_unit_root(q: int, k: int, a: int, tries: int = 2**16) -> int | None:
    """Bounded ascending search for a unit x with ``x**k - x**(k-1) = a (mod q)``.

    Exact for k = 1.  For k > 1 a ``None`` result only means no root among
    the first ``tries`` candidates; callers must not read it as unsolvable.
    """
    p, _ = _prime_power(q)
    a %= q
    if k == 1:
        x = (a + 1) % q
        return x if x % p else None
    for x in range(1, min(q, tries + 1)):
        if x % p and pow(x, k - 1, q) * (x - 1) % q == a:
            return x
    return None


@dataclass(frozen=True)
class CollisionCount:
    r: int
    k: int
    ordered_pairs: int
    distinct: int
    formula: int

    @property
    def bound(self) -> float:
        return self.r - math.sqrt(self.r / 2)

    @property
    def formula_holds(self) -> bool:
        return self.formula == self.ordered_pairs

    @property
    def bound_holds(self) -> bool:
        # distinct < r - sqrt(r/2)  <=>  r - distinct > sqrt(r/2)
        gap = self.r - self.distinct
        return gap > 0 and 2 * gap * gap > self.r

    @property
    def square_holds(self) -> bool:
        missing = self.r - self.distinct
        return missing * (missing - 1) >= self.ordered_pairs


def collision_count(r: int, k: int) -> CollisionCount:
    """Brute-force count of ordered pairs x != y in [1, r) with equal x**k - x**(k-1)."""
    if r < 5 or not is_prime(r):
        raise ValueError(f"r must be a prime >= 5, got {r}")
    if not 2 <= k <= r - 2:
        raise ValueError(f"k must lie in [2, r-2], got {k}")
    xs = np.arange(1, r, dtype=np.int64)
    vals = _vec_pow(xs, k - 1, r) * (xs - 1) % r
    counts = np.bincount(vals, minlength=r)
    pairs = int((counts * (counts - 1)).sum())
    formula = r - math.gcd(r - 1, k) - math.gcd(r - 1, k - 1)
    return CollisionCount(r, k, pairs, int((counts > 0).sum()), formula)


class TableCache:
    """On-disk cache of materialized tables, one file per ``q``."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)

    def _file(self, q: int) -> Path:
        return self.path / f"{FORMAT_TAG}-{q}.npz"

    def store(self, table: ValueSetTable) -> Path:
        f = self._file(table.q)
        packed = np.packbits(table.dense(), axis=1)
        with open(f, "wb") as fh:
            np.savez(fh, tag=np.array(FORMAT_TAG), q=table.q, lambda_q=table.lambda_q, rows=packed)
        return f

    def load(self, q: int) -> ValueSetTable | None:
        f = self._file(q)
        if not f.exists():
            return None
        with np.load(f) as data:
            if str(data["tag"]) != FORMAT_TAG or int(data["q"]) != q:
                return None
            rows = np.unpackbits(data["rows"], axis=1, count=q).astype(bool)
        table = ValueSetTable(q)
        if rows.shape != (table.lambda_q, q):
            return None
        rows.setflags(write=False)
        table._dense = rows
        return table

    def get(self, q: int) -> ValueSetTable:
        table = self.load(q)
        if table is None:
            table = ValueSetTable(q)
            self.store(table)
        install(table)
        return table
