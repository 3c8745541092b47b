"""Sieves, factorization, and the arithmetic functions everything else consumes.

The central object is :class:`FactorTable`, a smallest-prime-factor sieve that
gives O(log n) factorization for every n up to its limit.  On top of it live
the classical multiplicative/additive functions:

    mangoldt(n)      Lambda(n) = log p if n = p^k, else 0
    mangoldt_r(n, r) Lambda_r = mu * (log)^r, the order-r generalization,
                     supported on n with at most r distinct prime factors
    moebius, euler_phi, chi4 (the nonprincipal character mod 4)
    beta_apt(k)      indicator of "at most 7 prime factors, all > k^(1/49)"

Floating-point discipline: logarithms of integers are always taken directly
with math.log, and every multi-term reduction goes through math.fsum, so a
sum's value depends only on the multiset of its terms.  That is what makes
the optimized enumerations elsewhere bit-for-bit comparable with the naive
brute-force loops in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GuardError

__all__ = [
    "FactorTable",
    "FactoredInt",
    "sieve_spf",
    "factorize",
    "mangoldt",
    "mangoldt_r",
    "moebius",
    "euler_phi",
    "chi4",
    "is_prime",
    "beta_apt",
    "chebyshev_psi",
    "prime_powers",
    "primes_up_to",
]

# Witness set making Miller-Rabin deterministic far beyond 2^64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(eq=False)
class FactoredInt:
    """A positive integer together with its sorted prime factorization."""

    n: int
    factors: list[tuple[int, int]]  # (prime, exponent), primes strictly increasing

    @property
    def omega(self) -> int:
        """Number of distinct prime factors."""
        return len(self.factors)

    @property
    def big_omega(self) -> int:
        """Number of prime factors counted with multiplicity."""
        return sum(e for _, e in self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def verify(self) -> None:
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise AssertionError(f"factors of {self.n} not strictly increasing")
            last = p
            prod *= p**e
        if prod != self.n:
            raise AssertionError(f"factorization of {self.n} does not multiply back")


@dataclass(eq=False)
class FactorTable:
    """Smallest-prime-factor table for 2..limit.

    spf[n] is the least prime dividing n; spf[n] == n exactly when n is prime.
    Immutable after construction and safe to share across threads.
    """

    limit: int
    spf: np.ndarray
    _primes: np.ndarray | None = field(default=None, repr=False)

    def is_prime(self, n: int) -> bool:
        if not 2 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range 2..{self.limit}")
        return int(self.spf[n]) == n

    def primes(self, bound: int | None = None) -> np.ndarray:
        """Sorted int64 array of the primes <= bound (default: <= limit)."""
        if self._primes is None:
            idx = np.arange(2, self.limit + 1, dtype=np.int64)
            self._primes = idx[self.spf[2:] == idx]
        if bound is None or bound >= self.limit:
            return self._primes
        return self._primes[: int(np.searchsorted(self._primes, bound, "right"))]

    def factorize(self, n: int) -> FactoredInt:
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range 1..{self.limit}")
        factors: list[tuple[int, int]] = []
        spf = self.spf
        m = n
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        return FactoredInt(n, factors)


def sieve_spf(limit: int) -> FactorTable:
    """Build the smallest-prime-factor table for 2..limit.

    Memory is limit * 4 bytes (uint32); an allocation failure propagates as
    MemoryError.
    """
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit >= 2**32:
        raise GuardError("limit must fit uint32")
    spf = np.zeros(limit + 1, dtype=np.uint32)
    spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            spf[p] = p
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    # Remaining zeros (above index 1) are the primes > sqrt(limit).
    chunk = 1 << 22
    for lo in range(2, limit + 1, chunk):
        hi = min(lo + chunk, limit + 1)
        view = spf[lo:hi]
        mask = view == 0
        if mask.any():
            view[mask] = np.arange(lo, hi, dtype=np.uint32)[mask]
    return FactorTable(limit, spf)


def primes_up_to(limit: int) -> np.ndarray:
    """Primes <= limit as int64, via a plain boolean sieve.

    Cheaper than sieve_spf when only primality is needed (1 byte per n).
    """
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    comp = np.zeros(limit + 1, dtype=bool)
    comp[:2] = True
    for p in range(2, math.isqrt(limit) + 1):
        if not comp[p]:
            comp[p * p :: p] = True
    return np.flatnonzero(~comp).astype(np.int64)


def factorize(n: int, table: FactorTable) -> FactoredInt:
    """Factor n, falling back to trial division by table primes past the limit.

    Complete for n <= table.limit**2 (any unfactored remainder after trial
    division up to sqrt(n) is prime).  Beyond that a GuardError is raised.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n <= table.limit:
        return table.factorize(n)
    factors: list[tuple[int, int]] = []
    m = n
    root = math.isqrt(n)
    for p in map(int, table.primes()):
        if p > root:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
            root = math.isqrt(m)
    if m > 1:
        if m <= table.limit or is_prime(m):
            factors.append((m, 1))
            factors.sort()
        else:
            raise GuardError(f"cannot factor {n}: remainder {m} exceeds trial range")
    fi = FactoredInt(n, factors)
    fi.verify()
    return fi


def mangoldt(n: int, table: FactorTable) -> float:
    """Von Mangoldt Lambda(n): log p when n is a power of the prime p, else 0."""
    if not 1 <= n <= table.limit:
        raise ValueError(f"n={n} outside table range")
    if n == 1:
        return 0.0
    p = int(table.spf[n])
    m = n
    while m % p == 0:
        m //= p
    return math.log(p) if m == 1 else 0.0


def mangoldt_r(n: int, r: int, table: FactorTable) -> float:
    """Generalized von Mangoldt Lambda_r(n) = sum_{d|n} mu(d) (log(n/d))^r.

    Only squarefree divisors contribute, so the sum runs over subsets of the
    distinct primes of n.  Vanishes when n has more than r distinct prime
    factors, and always satisfies 0 <= Lambda_r(n) <= (log n)^r.
    """
    if not 1 <= r <= 8:
        raise ValueError("r must be in 1..8")
    if not 1 <= n <= table.limit:
        raise ValueError(f"n={n} outside table range")
    fi = table.factorize(n)
    return mangoldt_r_from_primes(n, [p for p, _ in fi.factors], r)


def mangoldt_r_from_primes(n: int, distinct_primes: list[int], r: int) -> float:
    """Lambda_r(n) given the distinct primes of n (any order).

    exactly-rounded over the 2^omega subset terms, so the result does not
    depend on the order the primes were found in.
    """
    if n == 1:
        return 0.0
    if len(distinct_primes) > r:
        return 0.0
    terms = []
    k = len(distinct_primes)
    for mask in range(1 << k):
        d = 1
        bits = 0
        for i in range(k):
            if mask >> i & 1:
                d *= distinct_primes[i]
                bits += 1
        t = math.log(n // d) ** r
        terms.append(-t if bits & 1 else t)
    return math.fsum(terms)


def moebius(n: int, table: FactorTable) -> int:
    """Moebius function: (-1)^omega(n) on squarefree n, 0 otherwise."""
    fi = factorize(n, table)
    if not fi.is_squarefree:
        return 0
    return -1 if fi.omega % 2 else 1


def euler_phi(n: int, table: FactorTable) -> int:
    fi = factorize(n, table)
    out = n
    for p, _ in fi.factors:
        out = out // p * (p - 1)
    return out


def chi4(n: int) -> int:
    """Nonprincipal character mod 4: 0 on evens, +1 if n=1 (4), -1 if n=3 (4)."""
    if n % 2 == 0:
        return 0
    return 1 if n % 4 == 1 else -1


def is_prime(n: int) -> bool:
    """Deterministic primality for all 64-bit inputs (fixed Miller-Rabin witnesses)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def beta_apt(k: int, table: FactorTable, count_multiplicity: bool = True) -> int:
    """Almost-prime indicator: 1 iff k has at most 7 prime factors, all > k^(1/49).

    Factors are counted with multiplicity by default (the safer, smaller set);
    pass count_multiplicity=False to count distinct primes instead.  The size
    comparison p > k^(1/49) is evaluated exactly as p^49 > k, and is strict.
    k = 1 satisfies the condition vacuously.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return 1
    fi = factorize(k, table)
    count = fi.big_omega if count_multiplicity else fi.omega
    if count > 7:
        return 0
    for p, _ in fi.factors:
        if p**49 <= k:
            return 0
    return 1


def chebyshev_psi(x: int, table: FactorTable) -> float:
    """Chebyshev psi(x) = sum_{n <= x} Lambda(n), summed exactly (fsum)."""
    if x < 1:
        return 0.0
    if x > table.limit:
        raise GuardError(f"x={x} exceeds table limit {table.limit}")
    _, logs = prime_powers(x, table)
    return math.fsum(logs)


def prime_powers(bound: int, table: FactorTable) -> tuple[np.ndarray, np.ndarray]:
    """All prime powers p^j <= bound with their Lambda values log p.

    Returns (values, logs) sorted by value; values int64, logs float64 filled
    from math.log so they match scalar recomputation bit for bit.
    """
    if bound > table.limit:
        raise GuardError(f"bound {bound} exceeds table limit {table.limit}")
    vals: list[int] = []
    logs: list[float] = []
    for p in map(int, table.primes(bound)):
        lg = math.log(p)
        q = p
        while q <= bound:
            vals.append(q)
            logs.append(lg)
            q *= p
    order = sorted(range(len(vals)), key=vals.__getitem__)
    v = np.array([vals[i] for i in order], dtype=np.int64)
    w = np.array([logs[i] for i in order], dtype=np.float64)
    return v, w


def omega_array(bound: int, table: FactorTable, with_multiplicity: bool = False) -> np.ndarray:
    """Vector of omega(n) (or Omega(n)) for 0 <= n <= bound, via sieving."""
    if bound > table.limit:
        raise GuardError(f"bound {bound} exceeds table limit {table.limit}")
    out = np.zeros(bound + 1, dtype=np.int8)
    for p in map(int, table.primes(bound)):
        if with_multiplicity:
            q = p
            while q <= bound:
                out[q::q] += 1
                q *= p
        else:
            out[p::p] += 1
    return out
