"""Gaussian-integer arithmetic and the two-coordinate congruence system.

A pair of primitive Gaussian integers m1, m2 with nonzero determinant
Delta = Im(conj(m1) * m2) couples two odd primes (l1, l2) through the system

    Re(m1 * nn) = l1,   Im(m1 * nn) = 0 (mod 2h),
    Re(m2 * nn) = l2,   Im(m2 * nn) = 0 (mod 2h),

for a single Gaussian unknown nn.  The linear part pins nn = (xi, eta) with

    xi = (l1 * Im(m2) - l2 * Im(m1)) / Delta,
    eta = (l1 * Re(m2) - l2 * Re(m1)) / Delta,

so a pair is admissible iff both coordinates are integers and the two parity
congruences hold.  All admissible pairs lie on one reduced residue class:
l2 = omega * l1 (mod 2|Delta|h), where omega is produced by solve_omega from
two Gaussian congruences after splitting off the common factor gcd(m1, m2).
quad_form_n recovers n = |nn|^2 = |l1*m2 - l2*m1|^2 / Delta^2.

dform_sum evaluates the weighted double sum over admissible pairs twice, by
raw enumeration of the system and through the omega class; the two paths must
agree exactly.  dform_diag counts the diagonal lattice points l + 2hbi = 0
(mod m), |l + 2hbi|^2 <= x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import FactorTable
from .errors import InternalCheckError

__all__ = [
    "GaussInt",
    "OmegaClass",
    "NonIntegralError",
    "delta",
    "gauss_gcd",
    "solve_omega",
    "quad_form_n",
    "system_point",
    "admits_system",
    "dform_sum",
    "dform_diag",
]


class NonIntegralError(ValueError):
    """The quadratic form is not integral for this prime pair."""


@dataclass(frozen=True)
class GaussInt:
    """A Gaussian integer re + im*i with exact integer coordinates."""

    re: int
    im: int

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def __add__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussInt") -> "GaussInt":
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def scale(self, k: int) -> "GaussInt":
        return GaussInt(self.re * k, self.im * k)

    def is_primitive(self) -> bool:
        """Coprime to its conjugate: coprime coordinates and odd norm."""
        return math.gcd(abs(self.re), abs(self.im)) == 1 and self.norm() % 2 == 1

    def divides(self, other: "GaussInt") -> bool:
        n = self.norm()
        if n == 0:
            return other.norm() == 0
        w = other * self.conj()
        return w.re % n == 0 and w.im % n == 0

    def exact_div(self, other: "GaussInt") -> "GaussInt":
        """self / other, which must be exact."""
        n = other.norm()
        w = self * other.conj()
        if n == 0 or w.re % n or w.im % n:
            raise ValueError(f"{other} does not divide {self}")
        return GaussInt(w.re // n, w.im // n)

    def __str__(self) -> str:
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


def delta(m1: GaussInt, m2: GaussInt) -> int:
    """Determinant Delta = Im(conj(m1) * m2); antisymmetric, zero on associates."""
    return m1.re * m2.im - m1.im * m2.re


def canonical_associate(g: GaussInt) -> GaussInt:
    """The unit multiple of g with re > 0 and im >= 0 (g must be nonzero)."""
    if g.norm() == 0:
        raise ValueError("zero has no canonical associate")
    for cand in (g, GaussInt(-g.im, g.re), GaussInt(-g.re, -g.im), GaussInt(g.im, -g.re)):
        if cand.re > 0 and cand.im >= 0:
            return cand
    raise AssertionError("unreachable")


def gauss_gcd(a: GaussInt, b: GaussInt) -> GaussInt:
    """Euclidean gcd in Z[i] with rounding division, canonically normalized."""
    while b.norm() != 0:
        n = b.norm()
        w = a * b.conj()
        # round-half-away is fine: any quotient with |r| < |b| works
        q = GaussInt((2 * w.re + n) // (2 * n), (2 * w.im + n) // (2 * n))
        a, b = b, a - q * b
    return canonical_associate(a)


@dataclass(eq=False)
class OmegaClass:
    """The reduced residue omega mod 2|Delta|h linking admissible prime pairs."""

    m1: GaussInt
    m2: GaussInt
    h: int
    delta: int
    modulus: int
    omega: int

    def verify(self) -> None:
        if self.delta == 0 or self.delta % (2 * self.h):
            raise InternalCheckError("delta/parity precondition violated")
        if self.modulus != 2 * abs(self.delta) * self.h:
            raise InternalCheckError("omega modulus mismatch")
        if math.gcd(self.omega, self.modulus) != 1:
            raise InternalCheckError("omega is not a reduced residue")


def _solve_linear_congruence(a: int, c: int, m: int) -> tuple[int, int]:
    """Solutions t of a*t = c (mod m) as a class (t0 mod m//g); raises if none."""
    if m <= 0:
        raise ValueError("modulus must be positive")
    g = math.gcd(a, m)
    if c % g:
        raise InternalCheckError(f"congruence {a}*t = {c} (mod {m}) has no solution")
    m2 = m // g
    t0 = (c // g) * pow((a // g) % m2, -1, m2) % m2 if m2 > 1 else 0
    return t0, m2


def _rational_class(a: int, zeta: GaussInt, g: GaussInt) -> tuple[int, int]:
    """Rational t with a*t = zeta (mod g Z[i]), as a residue class (t0, modulus).

    The lattice g*Z[i] is spanned by (g1, g2) and (-g2, g1); eliminating the
    imaginary component leaves a single rational congruence.  Raises when the
    Gaussian congruence has no rational solution.
    """
    g1, g2 = g.re, g.im
    if g1 == 0 and g2 == 0:
        raise ValueError("zero modulus")
    gam = math.gcd(abs(g1), abs(g2))
    if zeta.im % gam:
        raise InternalCheckError("no rational solution: imaginary part obstruction")
    # g2*s + g1*t = -zeta.im ; particular solution via extended gcd
    gg, u, v = _ext_gcd(g2, g1)
    assert gg == gam or gg == -gam
    k = (-zeta.im) // gg
    s0, t0 = u * k, v * k
    c0 = zeta.re + g1 * s0 - g2 * t0
    modulus = (g1 * g1 + g2 * g2) // gam
    return _solve_linear_congruence(a % modulus, c0 % modulus, modulus)


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a*x + b*y = g."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def _crt(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    g = math.gcd(m1, m2)
    if (r1 - r2) % g:
        raise InternalCheckError("inconsistent congruence classes")
    l = m1 // g * m2
    m2g = m2 // g
    t = ((r2 - r1) // g) * pow((m1 // g) % m2g, -1, m2g) % m2g if m2g > 1 else 0
    return (r1 + m1 * t) % l, l


def solve_omega(m1: GaussInt, m2: GaussInt, h: int) -> OmegaClass:
    """The unique reduced residue omega mod 2|Delta|h with l2 = omega*l1 for
    every prime pair admitted by the congruence system.

    Preconditions: m1, m2 primitive with odd norms coprime to 2h, Delta != 0
    and Delta = 0 (mod 2h).  Built by Gaussian CRT after extracting the
    common factor gcd(m1, m2); the construction is verified and fails loudly
    rather than returning a wrong class.
    """
    if h < 1:
        raise ValueError("h must be positive")
    for m in (m1, m2):
        if not m.is_primitive():
            raise ValueError(f"{m} is not primitive")
        if math.gcd(m.norm(), 2 * h) != 1:
            raise ValueError(f"norm of {m} shares a factor with 2h")
    dlt = delta(m1, m2)
    if dlt == 0:
        raise ValueError("delta is zero (diagonal pair)")
    if dlt % (2 * h):
        raise ValueError("delta not divisible by 2h: no admissible pairs exist")

    dg = gauss_gcd(m1, m2)
    a1g = m1.exact_div(dg)
    a2g = m2.exact_div(dg)
    d = dg.norm()
    if dlt % d:
        raise InternalCheckError("norm of gcd does not divide delta")
    big_d = dlt // d
    a1 = a1g.norm()

    zeta1 = a1g * a2g.conj()
    r1, mod1 = _rational_class(a1, zeta1, dg.scale(big_d))
    zeta2 = GaussInt(zeta1.re, zeta1.im + big_d)
    r2, mod2 = _rational_class(a1, zeta2, GaussInt(2 * big_d * h, 0))
    omega, modulus = _crt(r1, mod1, r2, mod2)

    expected = 2 * abs(dlt) * h
    if modulus != expected:
        raise InternalCheckError(
            f"omega modulus {modulus} != 2|Delta|h = {expected}; degenerate input"
        )
    if math.gcd(omega, modulus) != 1:
        raise InternalCheckError("omega is not coprime to its modulus")
    # Construction-and-verify: both defining Gaussian congruences must hold.
    for zeta, gmod in ((zeta1, dg.scale(big_d)), (zeta2, GaussInt(2 * big_d * h, 0))):
        if not gmod.divides(GaussInt(a1 * omega, 0) - zeta):
            raise InternalCheckError("omega failed its defining congruence")
    cls = OmegaClass(m1, m2, h, dlt, modulus, omega)
    cls.verify()
    return cls


def system_point(l1: int, l2: int, m1: GaussInt, m2: GaussInt) -> GaussInt | None:
    """The unique candidate nn for the pair (l1, l2), or None when it is not
    a Gaussian integer."""
    dlt = delta(m1, m2)
    if dlt == 0:
        raise ValueError("delta is zero")
    xi_num = l1 * m2.im - l2 * m1.im
    eta_num = l1 * m2.re - l2 * m1.re
    if xi_num % dlt or eta_num % dlt:
        return None
    return GaussInt(xi_num // dlt, eta_num // dlt)


def admits_system(l1: int, l2: int, m1: GaussInt, m2: GaussInt, h: int) -> bool:
    """Whether (l1, l2) solves the full system at parity level 2h."""
    nn = system_point(l1, l2, m1, m2)
    if nn is None:
        return False
    w1 = m1 * nn
    w2 = m2 * nn
    assert w1.re == l1 and w2.re == l2
    return w1.im % (2 * h) == 0 and w2.im % (2 * h) == 0


def quad_form_n(l1: int, l2: int, m1: GaussInt, m2: GaussInt) -> int:
    """n = |l1*m2 - l2*m1|^2 / Delta^2 when the division is exact.

    Integrality is equivalent to l1*m2 = l2*m1 (mod Delta), i.e. to the
    coordinates of the system point being integers; otherwise the pair admits
    no solution and NonIntegralError is raised.  The returned n satisfies
    m1*n = l1^2 + Im(m1*nn)^2 and m2*n = l2^2 + Im(m2*nn)^2.
    """
    dlt = delta(m1, m2)
    if dlt == 0:
        raise ValueError("delta is zero")
    nn = system_point(l1, l2, m1, m2)
    if nn is None:
        num = (l1 * m2.re - l2 * m1.re) ** 2 + (l1 * m2.im - l2 * m1.im) ** 2
        raise NonIntegralError(f"non-integral {num}/{dlt * dlt}")
    n = nn.norm()
    w1 = m1 * nn
    w2 = m2 * nn
    if m1.norm() * n != l1 * l1 + w1.im**2 or m2.norm() * n != l2 * l2 + w2.im**2:
        raise InternalCheckError("norm identity failed for the system point")
    return n


def admissible_pairs(
    m1: GaussInt,
    m2: GaussInt,
    h: int,
    lmax: int,
    table: FactorTable,
    method: str = "system",
) -> list[tuple[int, int]]:
    """All odd-prime pairs (l1, l2) <= lmax solving the system, by either
    raw enumeration ("system") or the omega residue class ("congruence")."""
    primes = [int(p) for p in table.primes(lmax) if p % 2 == 1]
    dlt = delta(m1, m2)
    if dlt == 0:
        raise ValueError("delta is zero")
    if method == "system":
        return [
            (l1, l2) for l1 in primes for l2 in primes if admits_system(l1, l2, m1, m2, h)
        ]
    if method == "congruence":
        if dlt % (2 * h):
            return []
        cls = solve_omega(m1, m2, h)
        prime_set = set(primes)
        out = []
        for l1 in primes:
            l2 = cls.omega * l1 % cls.modulus
            while l2 <= lmax:
                if l2 in prime_set and system_point(l1, l2, m1, m2) is not None:
                    out.append((l1, l2))
                l2 += cls.modulus
        return out
    raise ValueError(f"unknown method {method!r}")


def dform_sum(
    m1: GaussInt,
    m2: GaussInt,
    h: int,
    x: int,
    gamma,
    f,
    table: FactorTable,
    method: str = "system",
) -> float:
    """Weighted sum over admissible prime pairs of gamma(l1)*gamma(l2)*f(m1*n)*f(m2*n).

    The crop f confines both m1*n and m2*n to [x/2, x], so primes beyond
    sqrt(x) cannot contribute.  Exactly-rounded reduction: both enumeration
    methods return the same float.
    """
    if delta(m1, m2) % (2 * h):
        return 0.0
    lmax = math.isqrt(x)
    terms = []
    for l1, l2 in admissible_pairs(m1, m2, h, lmax, table, method=method):
        n = quad_form_n(l1, l2, m1, m2)
        t = gamma.weight(l1) * gamma.weight(l2) * f(float(m1.norm() * n)) * f(
            float(m2.norm() * n)
        )
        if t != 0.0:
            terms.append(t)
    return math.fsum(terms)


def dform_diag(m: GaussInt, h: int, x: int) -> int:
    """Count of (l >= 1, b in Z) with l + 2hb*i divisible by m and l^2 + 4h^2 b^2 <= x.

    Enumerates Gaussian multiples of m inside the disk of radius sqrt(x).
    """
    if m.norm() == 0:
        raise ValueError("m must be nonzero")
    if x < 1:
        return 0
    if x > 10**12:
        raise ValueError("x too large for exact diagonal count")
    rad = math.isqrt(x)
    bound = rad // max(1, math.isqrt(m.norm())) + 2
    count = 0
    for zr in range(-bound, bound + 1):
        for zi in range(-bound, bound + 1):
            w = m * GaussInt(zr, zi)
            if w.re >= 1 and w.im % (2 * h) == 0 and w.norm() <= x:
                count += 1
    return count
