"""The headline empirical sums over the lattice 4k^2 + l^2 <= x.

    sum_G(x, r):  sum of Lambda_r(k) Lambda(l) Lambda(4k^2 + l^2)
    sum_H(x, r):  sum of Lambda(k) Lambda(l) Lambda_r(4k^2 + l^2)
    sum_APT(x):   sum of beta_k Lambda(l) Lambda(4k^2 + l^2)
    sum_S(x, f):  sum of a_n f(n) Lambda(n), a_n = sum_{4k^2+l^2=n} beta_k gamma_l
    W_and_I:      W(x) = sum_l gamma_l I(l) with I(l) = int f(t^2 + l^2) dt

Implementation notes.  k and l run over precomputed weighted lists (prime
powers, or all k with few prime factors); Lambda of the large argument
4k^2 + l^2 goes through a vectorized small-prime filter and a deterministic
Miller-Rabin pass on the survivors, never a factor table.  Every sum is the
exactly-rounded fsum of its nonzero terms, each term a fixed-association
product of floats derived from integers, so an independent brute-force loop
producing the same term multiset reproduces the value bit for bit.  Work is
sharded over fixed k-chunks; thread count changes scheduling only, never the
result.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (
    FactorTable,
    is_prime,
    mangoldt_r_from_primes,
    omega_array,
    prime_powers,
)
from .constants import c_constant, kappa, V_sum
from .errors import GuardError
from .quadrature import crop_line_integral, crop_radial_integral
from .weights import CropFunction, GammaWeights, LambdaWeights

__all__ = [
    "SumReport",
    "sum_G",
    "sum_H",
    "sum_APT",
    "sum_S",
    "W_and_I",
    "mangoldt_of_form",
]

_X_GUARD = 10**10
_CHUNK = 256

# Small primes that can divide 4k^2 + l^2: 2, and primes 1 mod 4 up to 300.
_FILTER_PRIMES = (2, 5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97, 101, 109, 113,
                  137, 149, 157, 173, 181, 193, 197, 229, 233, 241, 257, 269,
                  277, 281, 293)


def _rescue_table(limit: int = _X_GUARD):
    vals: list[int] = []
    logs: list[float] = []
    for p in _FILTER_PRIMES:
        lg = math.log(p)
        q = p
        while q <= limit:
            vals.append(q)
            logs.append(lg)
            q *= p
    order = sorted(range(len(vals)), key=vals.__getitem__)
    return (
        np.array([vals[i] for i in order], dtype=np.int64),
        np.array([logs[i] for i in order], dtype=np.float64),
    )


_RESCUE_VALS, _RESCUE_LOGS = _rescue_table()

_POWER_EXPONENTS = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)


def _iroot(n: int, e: int) -> int:
    if e == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / e)))
    while r > 1 and r**e > n:
        r -= 1
    while (r + 1) ** e <= n:
        r += 1
    return r


def mangoldt_of_form(n: int) -> float:
    """Lambda(n) for arbitrary 64-bit n: perfect-power reduction, then a
    deterministic primality test on the base.  No factorization needed."""
    if n < 2:
        return 0.0
    m = n
    reduced = True
    while reduced:
        reduced = False
        for e in _POWER_EXPONENTS:
            if m < (1 << e):
                break
            r = _iroot(m, e)
            if r > 1 and r**e == m:
                m = r
                reduced = True
                break
    return math.log(m) if is_prime(m) else 0.0


def _mangoldt_vector(n: np.ndarray) -> np.ndarray:
    """Vectorized Lambda over candidate values of 4k^2 + l^2."""
    lam = np.zeros(len(n), dtype=np.float64)
    undecided = np.ones(len(n), dtype=bool)
    for p in _FILTER_PRIMES:
        hit = undecided & (n % p == 0)
        undecided &= ~hit
    pos = np.searchsorted(_RESCUE_VALS, n)
    pos_c = np.minimum(pos, len(_RESCUE_VALS) - 1)
    rescued = _RESCUE_VALS[pos_c] == n
    lam[rescued] = _RESCUE_LOGS[pos_c[rescued]]
    for i in np.flatnonzero(undecided):
        lam[i] = mangoldt_of_form(int(n[i]))
    return lam


@dataclass(eq=False)
class SumReport:
    """One experiment row: the computed sum, its reference main term, and
    bookkeeping.  reference_alt carries a secondary normalization when one
    exists (for G_r: the conjectural main term without the r factor)."""

    x: int
    r: int
    sum_value: float
    reference: float
    ratio: float
    pair_count: int
    elapsed: float
    reference_alt: float | None = None


def _ratio(value: float, reference: float) -> float:
    return value / reference if reference != 0.0 else math.nan


@lru_cache(maxsize=None)
def _c_ref(pmax: int = 10**6) -> float:
    return c_constant(pmax).value


@lru_cache(maxsize=None)
def _kappa_ref(pmax: int = 10**6) -> float:
    return kappa(pmax).value


def _chunks(seq: list, size: int = _CHUNK) -> list[list]:
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _run_sharded(worker, chunks, threads: int) -> list:
    """Apply worker to fixed chunks; results in chunk order, any thread count."""
    if threads <= 1 or len(chunks) <= 1:
        return [worker(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(worker, chunks))


def _guard_x(x: int) -> None:
    if not 1 <= x <= _X_GUARD:
        raise GuardError(f"x={x} outside supported range 1..{_X_GUARD}")


def _k_weights_for_G(x: int, r: int, table: FactorTable) -> list[tuple[int, float]]:
    kmax = math.isqrt(max(x - 1, 0)) // 2 if x >= 5 else 0
    kmax = math.isqrt(max(x - 1, 0) // 4)
    if kmax < 1:
        return []
    if r == 1:
        vals, logs = prime_powers(kmax, table)
        return [(int(v), float(w)) for v, w in zip(vals, logs)]
    om = omega_array(kmax, table)
    out = []
    for k in range(2, kmax + 1):
        if om[k] <= r:
            primes = [p for p, _ in table.factorize(k).factors]
            w = mangoldt_r_from_primes(k, primes, r)
            if w != 0.0:
                out.append((k, w))
    return out


def _ell_prime_powers(x: int, table: FactorTable) -> tuple[np.ndarray, np.ndarray]:
    lmax = math.isqrt(max(x - 4, 0))
    if lmax < 2:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    return prime_powers(lmax, table)


def _pair_sum(
    x: int,
    k_weights: list[tuple[int, float]],
    lvals: np.ndarray,
    lweights: np.ndarray,
    threads: int,
) -> tuple[float, int]:
    """fsum over pairs of wk * wl * Lambda(4k^2 + l^2)."""

    def worker(chunk: list[tuple[int, float]]) -> list[float]:
        terms: list[float] = []
        for k, wk in chunk:
            cap = x - 4 * k * k
            if cap < 4:
                continue
            hi = math.isqrt(cap)
            idx = int(np.searchsorted(lvals, hi, "right"))
            if idx == 0:
                continue
            sub_l = lvals[:idx]
            n = sub_l * sub_l + 4 * k * k
            lam = _mangoldt_vector(n)
            nz = np.flatnonzero(lam)
            for i in nz:
                terms.append(wk * float(lweights[i]) * float(lam[i]))
        return terms

    parts = _run_sharded(worker, _chunks(k_weights), threads)
    all_terms = [t for part in parts for t in part]
    return math.fsum(all_terms), len(all_terms)


def sum_G(x: int, r: int, table: FactorTable, threads: int = 1) -> SumReport:
    """G_r(x) = sum over 4k^2 + l^2 <= x of Lambda_r(k) Lambda(l) Lambda(4k^2+l^2).

    Reference main term: c * r * x * (log sqrt x)^(r-1); reference_alt drops
    the r factor.
    """
    _guard_x(x)
    if not 1 <= r <= 7:
        raise GuardError("r must be in 1..7")
    t0 = time.perf_counter()
    kw = _k_weights_for_G(x, r, table)
    lvals, lweights = _ell_prime_powers(x, table)
    value, count = _pair_sum(x, kw, lvals, lweights, threads)
    c = _c_ref()
    base = x * math.log(math.sqrt(x)) ** (r - 1) if x > 1 else 0.0
    ref = c * r * base
    return SumReport(
        x, r, value, ref, _ratio(value, ref), count, time.perf_counter() - t0,
        reference_alt=c * base,
    )


def sum_APT(x: int, table: FactorTable, threads: int = 1) -> SumReport:
    """Almost-prime sum: beta_k Lambda(l) Lambda(4k^2 + l^2) over the lattice,
    beta_k = [k has at most 7 prime factors with multiplicity, all > k^(1/49)].

    Reference: x / log x.
    """
    _guard_x(x)
    t0 = time.perf_counter()
    kmax = math.isqrt(max(x - 4, 0) // 4)
    kw: list[tuple[int, float]] = []
    if kmax >= 1:
        if kmax >= 1 << 49:
            raise GuardError("k range too large for the shortcut beta evaluation")
        big = omega_array(kmax, table, with_multiplicity=True)
        # all prime factors exceed k^(1/49) automatically below 2^49
        kw = [(k, 1.0) for k in range(1, kmax + 1) if big[k] <= 7]
    lvals, lweights = _ell_prime_powers(x, table)
    value, count = _pair_sum(x, kw, lvals, lweights, threads)
    ref = x / math.log(x) if x > 1 else 0.0
    return SumReport(x, 0, value, ref, _ratio(value, ref), count, time.perf_counter() - t0)


def sum_H(x: int, r: int, table: FactorTable, threads: int = 1) -> SumReport:
    """H_r(x) = sum of Lambda(k) Lambda(l) Lambda_r(4k^2 + l^2) over the lattice.

    Lambda_r of the large argument requires its distinct primes: a vectorized
    trial division by primes up to sqrt(x) (any remainder is prime).
    Reference comparator: x (log x)^(r-1).
    """
    _guard_x(x)
    if not 1 <= r <= 8:
        raise GuardError("r must be in 1..8")
    if x > 1 and math.isqrt(x) > table.limit:
        raise GuardError("table too small: need primes up to sqrt(x)")
    t0 = time.perf_counter()
    kmax = math.isqrt(max(x - 4, 0) // 4)
    kvals, kls = (np.empty(0, np.int64), np.empty(0, np.float64))
    if kmax >= 2:
        kvals, kls = prime_powers(kmax, table)
    lvals, lweights = _ell_prime_powers(x, table)
    trial = [int(p) for p in table.primes(math.isqrt(x))] if x > 1 else []

    def worker(chunk: list[tuple[int, float]]) -> list[float]:
        terms: list[float] = []
        for k, wk in chunk:
            cap = x - 4 * k * k
            if cap < 4:
                continue
            hi = math.isqrt(cap)
            idx = int(np.searchsorted(lvals, hi, "right"))
            if idx == 0:
                continue
            sub_l = lvals[:idx]
            n = sub_l * sub_l + 4 * k * k
            lamr = _mangoldt_r_vector(n, r, trial)
            nz = np.flatnonzero(lamr)
            for i in nz:
                terms.append(wk * float(lweights[i]) * float(lamr[i]))
        return terms

    pairs = [(int(v), float(w)) for v, w in zip(kvals, kls)]
    parts = _run_sharded(worker, _chunks(pairs), threads)
    all_terms = [t for part in parts for t in part]
    value = math.fsum(all_terms)
    ref = x * math.log(x) ** (r - 1) if x > 1 else 0.0
    return SumReport(
        x, r, value, ref, _ratio(value, ref), len(all_terms), time.perf_counter() - t0
    )


def _mangoldt_r_vector(n: np.ndarray, r: int, trial_primes: list[int]) -> np.ndarray:
    """Vectorized Lambda_r over a batch, via full trial-division factorization."""
    m = len(n)
    n_red = n.copy()
    fmat = np.zeros((m, 9), dtype=np.int64)
    fcnt = np.zeros(m, dtype=np.int64)
    alive = np.ones(m, dtype=bool)
    for p in trial_primes:
        if not alive.any():
            break
        hit = alive & (n_red % p == 0)
        if not hit.any():
            continue
        idx = np.flatnonzero(hit)
        over = fcnt[idx] >= 8
        if over.any():
            # more than 8 distinct primes: Lambda_r (r <= 8) vanishes anyway
            alive[idx[over]] = False
            fcnt[idx[over]] = 9
            idx = idx[~over]
            if idx.size == 0:
                continue
        fmat[idx, fcnt[idx]] = p
        fcnt[idx] += 1
        n_red[idx] //= p
        again = idx[n_red[idx] % p == 0]
        while again.size:
            n_red[again] //= p
            again = again[n_red[again] % p == 0]
    rem = alive & (n_red > 1)
    idx = np.flatnonzero(rem)
    over = fcnt[idx] >= 8
    fcnt[idx[over]] = 9
    idx = idx[~over]
    fmat[idx, fcnt[idx]] = n_red[idx]
    fcnt[idx] += 1

    lam = np.zeros(m, dtype=np.float64)
    for i in np.flatnonzero((fcnt >= 1) & (fcnt <= r)):
        primes = [int(p) for p in fmat[i, : fcnt[i]]]
        lam[i] = mangoldt_r_from_primes(int(n[i]), primes, r)
    return lam


def sum_S(
    x: int,
    f: CropFunction,
    lam: LambdaWeights,
    gamma: GammaWeights,
    table: FactorTable,
    threads: int = 1,
) -> SumReport:
    """S(x) = sum_n a_n f(n) Lambda(n) with a_n = sum_{4k^2+l^2=n} beta_k gamma_l,
    beta = 1 * lambda.  Evaluated as the (h, b, l) lattice sum with k = h*b.

    The reference is the smoothed main term kappa * V * integral(f), with the
    integral by quadrature.
    """
    _guard_x(x)
    t0 = time.perf_counter()
    lmax = math.isqrt(max(x - 4, 0))
    primes_l = np.array(
        [int(p) for p in table.primes(lmax) if p % 2 == 1], dtype=np.int64
    )
    gamma_l = gamma.array_for(primes_l)

    jobs: list[tuple[float, int]] = []  # (lambda_h, k)
    for h, lh in lam.items():
        b = 1
        while 4 * (h * b) ** 2 + 9 <= x:
            jobs.append((lh, h * b))
            b += 1

    def worker(chunk: list[tuple[float, int]]) -> list[float]:
        terms: list[float] = []
        for lh, k in chunk:
            fourk2 = 4 * k * k
            lo2 = max(x // 2 - fourk2, 0)
            hi = math.isqrt(x - fourk2)
            lo_idx = int(np.searchsorted(primes_l, math.isqrt(lo2), "left"))
            hi_idx = int(np.searchsorted(primes_l, hi, "right"))
            if hi_idx <= lo_idx:
                continue
            sub_l = primes_l[lo_idx:hi_idx]
            n = sub_l * sub_l + fourk2
            fv = f(n.astype(np.float64))
            lamn = _mangoldt_vector(n)
            t = np.asarray(fv) * lamn
            nz = np.flatnonzero(t)
            for i in nz:
                terms.append(lh * float(gamma_l[lo_idx + i]) * float(fv[i]) * float(lamn[i]))
        return terms

    parts = _run_sharded(worker, _chunks(jobs), threads)
    all_terms = [t for part in parts for t in part]
    value = math.fsum(all_terms)
    ref = _kappa_ref() * V_sum(lam, table) * crop_line_integral(f)
    return SumReport(
        x, 0, value, ref, _ratio(value, ref), len(all_terms), time.perf_counter() - t0
    )


def W_and_I(
    x: int,
    f: CropFunction,
    gamma: GammaWeights,
    table: FactorTable,
) -> tuple[float, dict[int, float]]:
    """W(x) = sum over odd primes l < sqrt(x) of gamma_l I(l), with
    I(l) = integral of f(t^2 + l^2) over t >= 0 (zero once l >= sqrt(x))."""
    _guard_x(x)
    lmax = math.isqrt(max(x - 1, 0))
    imap: dict[int, float] = {}
    terms: list[float] = []
    for p in table.primes(lmax):
        l = int(p)
        if l % 2 == 0:
            continue
        il = crop_radial_integral(f, l)
        imap[l] = il
        if il != 0.0:
            terms.append(gamma.weight(l) * il)
    return math.fsum(terms), imap
