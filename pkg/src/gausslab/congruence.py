"""Congruence sums, their Poisson expansions, and the multiplicative model.

A_d(x) restricts the crop-weighted sequence a_n = sum_{4k^2+l^2=n} beta_k
gamma_l to the multiples of an odd d; its main term is rho(d)/(2d) V_d W(x).
The error r_d is always computed as the exact difference A_d - main; the
Fourier route exists as poisson_expand purely so the truncated expansion can
be tested against the direct sum (Poisson summation is an exact identity, so
the two sides must agree within the rigorous truncation tail).

The model sequence b_n = psi(n) sum_{(2h,n)=1} lambda_h phi(h)/h reproduces
the same main terms: B_d(x) ~ (x/H) rho(d)/(2d) V_d with H the Euler product
4*kappa/pi.

appendix_Ad studies the companion sequence a_n = sum Lambda(k) Lambda(l)
with k, l <= x unconstrained by the quadratic form; its main term is
rho(d)/phi(d) * psi(x)^2 with the exact Chebyshev psi.
"""

from __future__ import annotations

import math

import numpy as np

from .arith import FactorTable, chebyshev_psi, euler_phi, factorize, prime_powers
from .constants import V_d_sum, H_constant
from .errors import GuardError
from .prime_sums import W_and_I
from .quadrature import crop_cos_transform, crop_curvature_l1
from .roots import rho, roots_mod
from .weights import CropFunction, CropW, GammaWeights, LambdaWeights

__all__ = [
    "crop_congruence_terms",
    "A_d",
    "A_d_main",
    "poisson_direct",
    "poisson_expand",
    "poisson_pair",
    "remainder_R",
    "ModelWeights",
    "model_b",
    "B_d",
    "B_d_main",
    "appendix_Ad",
]

_X_GUARD = 10**10


def _guard_x(x: int) -> None:
    if not 1 <= x <= _X_GUARD:
        raise GuardError(f"x={x} outside supported range 1..{_X_GUARD}")


def crop_congruence_terms(
    x: int,
    lam: LambdaWeights,
    gamma: GammaWeights,
    f: CropFunction,
    table: FactorTable,
) -> tuple[np.ndarray, np.ndarray]:
    """All nonzero terms lambda_h * gamma_l * f(4(hb)^2 + l^2) of the full sum,
    returned as (n values, term values) so any A_d is an fsum over a mask.
    """
    _guard_x(x)
    lmax = math.isqrt(max(x - 4, 0))
    primes_l = np.array(
        [int(p) for p in table.primes(lmax) if p % 2 == 1], dtype=np.int64
    )
    gamma_l = gamma.array_for(primes_l)
    ns: list[np.ndarray] = []
    ts: list[np.ndarray] = []
    for h, lh in lam.items():
        b = 1
        while 4 * (h * b) ** 2 + 9 <= x:
            k = h * b
            fourk2 = 4 * k * k
            lo2 = max(x // 2 - fourk2, 0)
            hi = math.isqrt(x - fourk2)
            lo_idx = int(np.searchsorted(primes_l, math.isqrt(lo2), "left"))
            hi_idx = int(np.searchsorted(primes_l, hi, "right"))
            b += 1
            if hi_idx <= lo_idx:
                continue
            sub_l = primes_l[lo_idx:hi_idx]
            n = sub_l * sub_l + fourk2
            fv = np.asarray(f(n.astype(np.float64)))
            term = lh * gamma_l[lo_idx:hi_idx] * fv
            nz = term != 0.0
            if nz.any():
                ns.append(n[nz])
                ts.append(term[nz])
    if not ns:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64)
    return np.concatenate(ns), np.concatenate(ts)


def A_d(
    x: int,
    d: int,
    lam: LambdaWeights,
    gamma: GammaWeights,
    f: CropFunction,
    table: FactorTable,
    terms: tuple[np.ndarray, np.ndarray] | None = None,
) -> float:
    """Congruence sum A_d = sum over n = 0 (mod d) of a_n f(n); zero for even d.

    Pass terms=crop_congruence_terms(...) to amortize the enumeration across
    many d (the exactly-rounded reduction makes the result identical).
    """
    if d < 1:
        raise ValueError("d must be positive")
    if d % 2 == 0:
        return 0.0
    if terms is None:
        terms = crop_congruence_terms(x, lam, gamma, f, table)
    nvals, tvals = terms
    if d == 1:
        return math.fsum(tvals.tolist())
    return math.fsum(tvals[nvals % d == 0].tolist())


def A_d_main(
    x: int,
    d: int,
    lam: LambdaWeights,
    gamma: GammaWeights,
    f: CropFunction,
    table: FactorTable,
    w_of_x: float | None = None,
) -> float:
    """Elementary main term rho(d)/(2d) * V_d * W(x) of the congruence sum."""
    if d < 1:
        raise ValueError("d must be positive")
    if d % 2 == 0:
        return 0.0
    r = rho(d, table)
    if r == 0:
        return 0.0
    if w_of_x is None:
        w_of_x = W_and_I(x, f, gamma, table)[0]
    return r / (2 * d) * V_d_sum(lam, d, table) * w_of_x


def _class_rep(d: int, h: int, l: int, nu: int) -> int:
    """The residue nu * l * inverse(2h) mod d labelling the progression of b."""
    if math.gcd(2 * h, d) != 1:
        raise ValueError("2h must be invertible mod d")
    return nu * l % d * pow(2 * h % d, -1, d) % d


def poisson_direct(d: int, h: int, l: int, nu: int, f: CropFunction) -> float:
    """Direct side for one root: sum over b > 0, b = nu*l*inv(2h) (mod d),
    of f(4 b^2 h^2 + l^2)."""
    if (nu * nu + 1) % d:
        raise ValueError(f"nu={nu} is not a root mod {d}")
    r = _class_rep(d, h, l, nu)
    bmax = math.isqrt(max(int(f.b0) - l * l, 0)) // (2 * h) + 1
    b = r if r > 0 else d
    terms = []
    while b <= bmax:
        v = f(float(4 * b * b * h * h + l * l))
        if v != 0.0:
            terms.append(v)
        b += d
    return math.fsum(terms)


def _fourier_tail_constant(f: CropFunction, l: int) -> float:
    """C2 with |F_l(v)| <= C2 / v^2, from two integrations by parts."""
    return crop_curvature_l1(f, l) / (8.0 * math.pi**2)


def poisson_expand(
    d: int,
    h: int,
    l: int,
    nu: int,
    f: CropFunction,
    s_max: int,
) -> tuple[float, float]:
    """Truncated Fourier side for one root class, with a rigorous tail bound.

    Returns (value, tail) where value = (1/2dh) sum_{|s| <= s_max}
    e(r s / d) F_l(s / 2dh) minus the lattice-origin correction
    f(l^2)/2 when the class is 0 mod d.  Poisson summation makes

        |value - (direct(nu) + direct(-nu)) / 2| <= tail,

    the tail coming from |F_l(v)| <= C2/v^2 (twice-integrated-by-parts decay).
    """
    if (nu * nu + 1) % d:
        raise ValueError(f"nu={nu} is not a root mod {d}")
    if s_max < 1:
        raise ValueError("s_max must be >= 1")
    r = _class_rep(d, h, l, nu)
    two_dh = 2.0 * d * h
    parts = [crop_cos_transform(f, l, 0.0)]
    for s in range(1, s_max + 1):
        fs = crop_cos_transform(f, l, s / two_dh)
        parts.append(2.0 * math.cos(2.0 * math.pi * (r * s % d) / d) * fs)
    value = math.fsum(parts) / two_dh
    if r == 0:
        value -= f(float(l * l)) / 2.0
    c2 = _fourier_tail_constant(f, l)
    tail = 4.0 * d * h * c2 / s_max
    return value, tail


def poisson_pair(
    d: int,
    h: int,
    l: int,
    f: CropFunction,
    s_max: int,
    table: FactorTable,
) -> tuple[float, float, float]:
    """Both sides of the Poisson identity aggregated over all roots mod d.

    Returns (direct, fourier, tail): the exact identity is
    |direct - fourier| <= tail up to quadrature rounding.
    """
    rs = roots_mod(d, table)
    direct = math.fsum(poisson_direct(d, h, l, nu, f) for nu in rs.roots)
    four_parts = []
    tail = 0.0
    for nu in rs.roots:
        v, t = poisson_expand(d, h, l, nu, f, s_max)
        four_parts.append(v)
        tail += t
    return direct, math.fsum(four_parts), tail


def remainder_R(
    x: int,
    big_d: int,
    lam: LambdaWeights,
    gamma: GammaWeights,
    f: CropFunction,
    table: FactorTable,
) -> tuple[float, float]:
    """Absolute remainder R(x, D) = sum over odd d <= D of |A_d - main_d|,
    with the exact difference, plus the comparator bound y sqrt(D x) log x.

    Meaningful when D y^2 is well below x.
    """
    _guard_x(x)
    if big_d < 1:
        raise ValueError("D must be positive")
    terms = crop_congruence_terms(x, lam, gamma, f, table)
    w_of_x = W_and_I(x, f, gamma, table)[0]
    parts = []
    for d in range(1, big_d + 1, 2):
        ad = A_d(x, d, lam, gamma, f, table, terms=terms)
        main = A_d_main(x, d, lam, gamma, f, table, w_of_x=w_of_x)
        parts.append(abs(ad - main))
    bound = lam.y * math.sqrt(big_d * x) * math.log(x) if x > 1 else 0.0
    return math.fsum(parts), bound


class ModelWeights:
    """The multiplicative pair psi, phi of the model sequence.

    psi(2^a) = phi(2^a) = 1;  for odd p:
    psi(p^a) = rho(p)(1 - 1/p)(1 - rho(p)/p)^(-1)  ->  2(p-1)/(p-2) or 0,
    phi(p^a) = (1 - rho(p)/p)^(-1)                 ->  p/(p-2) or 1,
    by rho(p) = 2 for p = 1 (mod 4), rho(p) = 0 for p = 3 (mod 4).
    psi(n) = 0 exactly when some p = 3 (mod 4) divides the odd part of n.
    """

    @staticmethod
    def _psi_factor(p: int) -> float:
        return 2.0 * (p - 1.0) / (p - 2.0)

    @staticmethod
    def psi(n: int, table: FactorTable) -> float:
        if n < 1:
            raise ValueError("n must be positive")
        out = 1.0
        for p, _ in factorize(n, table).factors:
            if p == 2:
                continue
            if p % 4 == 3:
                return 0.0
            out = out * ModelWeights._psi_factor(p)
        return out

    @staticmethod
    def phi(h: int, table: FactorTable) -> float:
        if h < 1:
            raise ValueError("h must be positive")
        out = 1.0
        for p, _ in factorize(h, table).factors:
            if p == 2:
                continue
            if p % 4 == 1:
                out = out * (p / (p - 2.0))
        return out

    @staticmethod
    def psi_array(x: int, table: FactorTable) -> np.ndarray:
        """psi(n) for 0 <= n <= x by multiplicative sieving (ascending primes,
        one factor per distinct prime, matching the scalar evaluation order)."""
        out = np.ones(x + 1, dtype=np.float64)
        out[0] = 0.0
        for p in map(int, table.primes(x)):
            if p == 2:
                continue
            if p % 4 == 3:
                out[p::p] = 0.0
            else:
                out[p::p] *= ModelWeights._psi_factor(p)
        return out


def model_b(n: int, lam: LambdaWeights, table: FactorTable) -> float:
    """b_n = psi(n) * sum over h with (2h, n) = 1 of lambda_h phi(h) / h."""
    psi_n = ModelWeights.psi(n, table)
    if psi_n == 0.0:
        return 0.0
    acc = 0.0
    for h, lh in lam.items():
        if math.gcd(2 * h, n) == 1:
            acc += lh * ModelWeights.phi(h, table) / h
    return psi_n * acc


def B_d(
    x: int,
    d: int,
    lam: LambdaWeights,
    w: CropW,
    table: FactorTable,
    psi: np.ndarray | None = None,
) -> float:
    """Model congruence sum B_d(x) = sum over n = 0 (mod d) of b_n w(n/x);
    zero for even d.  Pass psi=ModelWeights.psi_array(x, table) to amortize.
    """
    _guard_x(x)
    if d < 1:
        raise ValueError("d must be positive")
    if d % 2 == 0:
        return 0.0
    if x > table.limit + 1:
        raise GuardError("table too small for the model sieve")
    if psi is None:
        psi = ModelWeights.psi_array(x, table)
    n = np.arange(d, x + 1, d, dtype=np.int64)
    n = n[n % 2 == 1]  # b_n = 0 on even n: no h has (2h, n) = 1
    psi_n = psi[n]
    keep = psi_n != 0.0
    n, psi_n = n[keep], psi_n[keep]
    coeff = np.zeros(len(n), dtype=np.float64)
    for h, lh in lam.items():
        mask = np.ones(len(n), dtype=bool)
        for p, _ in factorize(h, table).factors:
            if p != 2:
                mask &= n % p != 0
        coeff[mask] += lh * ModelWeights.phi(h, table) / h
    wv = np.asarray(w((n / float(x)).astype(np.float64)))
    term = psi_n * coeff * wv
    term = term[term != 0.0]
    return math.fsum(term.tolist())


def B_d_main(x: int, d: int, lam: LambdaWeights, table: FactorTable, pmax: int = 10**6) -> float:
    """Model main term (x/H) * rho(d)/(2d) * V_d, H in via-kappa mode."""
    if d % 2 == 0:
        return 0.0
    r = rho(d, table)
    if r == 0:
        return 0.0
    h_const = H_constant(pmax, mode="via_kappa").value
    return (x / h_const) * (r / (2 * d)) * V_d_sum(lam, d, table)


def appendix_Ad(x: int, d: int, table: FactorTable) -> tuple[float, float, float]:
    """Congruence sum of a_n = sum_{4k^2 + l^2 = n, k,l <= x} Lambda(k) Lambda(l)
    (coordinates bounded, not the form), its main term rho(d)/phi(d) psi(x)^2
    with the exact Chebyshev psi, and the difference r_d.

    Reduction is hierarchical and exactly rounded: over k of Lambda(k) times
    the inner fsum over admissible l of Lambda(l).
    """
    if d < 1 or d % 2 == 0:
        raise ValueError("d must be odd and positive")
    if x > 10**6:
        raise GuardError("appendix sums are limited to x <= 10^6")
    if x > table.limit:
        raise GuardError("x exceeds the factor table")
    pvals, plogs = prime_powers(x, table)
    main = rho(d, table) / euler_phi(d, table) * (chebyshev_psi(x, table) ** 2)
    if len(pvals) == 0:
        return 0.0, main, -main
    lsq_mod = (pvals % d) * (pvals % d) % d
    outer: list[float] = []
    inner_cache: dict[int, float] = {}
    for k, wk in zip(pvals, plogs):
        res = (d - 4 * int(k) * int(k) % d) % d
        inner = inner_cache.get(res)
        if inner is None:
            inner = math.fsum(plogs[lsq_mod == res].tolist())
            inner_cache[res] = inner
        if inner != 0.0:
            outer.append(float(wk) * inner)
    a_d = math.fsum(outer)
    return a_d, main, a_d - main
