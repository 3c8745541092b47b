"""Roots of the quadratic congruence nu^2 + 1 = 0 (mod d).

For odd prime p the congruence has 1 + chi4(p) solutions, so rho(d) is
multiplicative with rho(p) = 2 for p = 1 (mod 4) and rho(p) = 0 for
p = 3 (mod 4).  Roots mod p come from Tonelli-Shanks, are lifted to p^a by
Hensel's lemma (the derivative 2*nu is invertible), and are combined across
prime powers by the CRT.

weyl_sum gives the equidistribution harmonics rho_c(d) = sum over roots of
e(nu*c/d).

The public API rejects even d; modulus 2 does have the root nu=1, which the
large-sieve module needs, so roots_mod_any handles d = 2 (mod 4) internally.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .arith import FactorTable, chi4, factorize

__all__ = ["RootSet", "roots_mod", "rho", "weyl_sum", "sqrt_minus_one_mod_p"]


@dataclass(eq=False)
class RootSet:
    """Sorted solutions nu in [0, d) of nu^2 + 1 = 0 (mod d)."""

    d: int
    roots: list[int]

    def __len__(self) -> int:
        return len(self.roots)

    def verify(self) -> None:
        seen = set()
        for nu in self.roots:
            if not 0 <= nu < self.d or (nu * nu + 1) % self.d:
                raise AssertionError(f"{nu} is not a root mod {self.d}")
            seen.add(nu)
        if len(seen) != len(self.roots):
            raise AssertionError(f"duplicate roots mod {self.d}")


@lru_cache(maxsize=100_000)
def sqrt_minus_one_mod_p(p: int) -> int:
    """The smaller square root of -1 mod a prime p = 1 (mod 4), via Tonelli-Shanks.

    The quadratic nonresidue is found by scanning 2, 3, 4, ... so the output
    is deterministic.
    """
    if p % 4 != 1:
        raise ValueError(f"p={p} is not 1 mod 4")
    # p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    # Standard Tonelli-Shanks loop for a = p-1 (= -1 mod p).
    m, c = s, pow(z, q, p)
    t = pow(p - 1, q, p)
    r = pow(p - 1, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        r = r * b % p
        c = b * b % p
        t = t * c % p
        m = i
    assert r * r % p == p - 1
    return min(r, p - r)


def _lift_root(p: int, alpha: int, base_root: int) -> int:
    """Hensel-lift a root of nu^2+1 mod p to mod p^alpha (odd p)."""
    pk = p
    nu = base_root
    while pk < p**alpha:
        pk_next = min(pk * pk, p**alpha)
        # Newton step: nu <- nu - (nu^2+1) / (2 nu) mod pk_next
        inv = pow(2 * nu % pk_next, -1, pk_next)
        nu = (nu - (nu * nu + 1) * inv) % pk_next
        pk = pk_next
    assert (nu * nu + 1) % p**alpha == 0
    return nu


def _roots_prime_power(p: int, alpha: int) -> list[int]:
    if p == 2:
        # nu=1 works mod 2; mod 4 and higher there is no solution.
        return [1] if alpha == 1 else []
    if p % 4 != 1:
        return []
    r = sqrt_minus_one_mod_p(p)
    r = _lift_root(p, alpha, r)
    pa = p**alpha
    return [r, pa - r]


def _crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """CRT for coprime moduli."""
    return (r1 + (r2 - r1) * pow(m1, -1, m2) % m2 * m1) % (m1 * m2)


def roots_mod_any(d: int, table: FactorTable) -> list[int]:
    """Roots of nu^2+1 = 0 (mod d) for arbitrary d >= 1, sorted."""
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        return [0]
    fi = factorize(d, table)
    parts: list[tuple[list[int], int]] = []
    for p, a in fi.factors:
        rs = _roots_prime_power(p, a)
        if not rs:
            return []
        parts.append((rs, p**a))
    combined = [(r, m) for r, m in [(parts[0][0][i], parts[0][1]) for i in range(len(parts[0][0]))]]
    for rs, m2 in parts[1:]:
        combined = [(_crt_pair(r1, m1, r2, m2), m1 * m2) for r1, m1 in combined for r2 in rs]
    return sorted(r for r, _ in combined)


def roots_mod(d: int, table: FactorTable) -> RootSet:
    """Complete root set of nu^2 + 1 = 0 (mod d) for odd d.

    Empty whenever some prime p = 3 (mod 4) divides d.  Even d is rejected.
    """
    if d % 2 == 0:
        raise ValueError("d must be odd")
    return RootSet(d, roots_mod_any(d, table))


def rho(d: int, table: FactorTable) -> int:
    """rho(d) = number of roots, by the multiplicative formula rho(p^a) = 1 + chi4(p)."""
    if d % 2 == 0:
        raise ValueError("d must be odd")
    if d < 1:
        raise ValueError("d must be positive")
    out = 1
    for p, _ in factorize(d, table).factors:
        out *= 1 + chi4(p)
        if out == 0:
            return 0
    return out


def weyl_sum(c: int, d: int, table: FactorTable) -> complex:
    """Weyl harmonic rho_c(d) = sum over roots nu of e(nu*c/d), e(t) = exp(2 pi i t)."""
    rs = roots_mod(d, table)
    if c % d == 0:
        # all phases are exactly 1
        return complex(len(rs), 0.0)
    return sum(cmath.exp(2j * math.pi * ((nu * c) % d) / d) for nu in rs.roots)
