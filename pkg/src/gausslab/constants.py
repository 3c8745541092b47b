"""Euler products and densities: kappa, c, H, the density g, and V-sums.

All products are accumulated in log space (fsum of log1p of factor - 1) over
primes in increasing order.  The absolutely convergent ones carry a rigorous
tail bound of the elementary form sum_{p > P} C / p^2 <= C / (P - 1), stated
as a bound on |log(true / partial)|.  The H product in "raw" mode converges
only conditionally (its factor is 1 - chi4(p)/(p-1)), so it gets no finite
tail bound; the fast route is H = 4 kappa / pi, which holds factor by factor
against L(1, chi4) = pi/4.

The same factor-by-factor algebra gives the cross-identity

    c = kappa * prod_{p = 1 (4)} (1 - 1/(p-2)) (1 - 1/p)^(-1),

checked numerically by a2_identity_check at equal cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import FactorTable, chi4, factorize, primes_up_to
from .weights import LambdaWeights

__all__ = [
    "EulerProductResult",
    "kappa",
    "c_constant",
    "H_constant",
    "g_density",
    "V_sum",
    "V_d_sum",
    "a2_identity_check",
]


@dataclass(frozen=True)
class EulerProductResult:
    """A truncated Euler product with its cutoff and tail bound.

    tail_bound bounds |log(true value / partial product)|; it is finite for
    absolutely convergent products and +inf for conditionally convergent ones.
    """

    value: float
    pmax: int
    tail_bound: float


def _prime_split(pmax: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(all primes <= pmax, those = 1 mod 4, those = 3 mod 4) as float64."""
    ps = primes_up_to(pmax)
    pf = ps.astype(np.float64)
    return pf, pf[ps % 4 == 1], pf[ps % 4 == 3]


def kappa(pmax: int) -> EulerProductResult:
    """kappa = prod_p (1 - chi4(p) / ((p-1)(p - chi4(p)))), cut at pmax.

    The factor is 1 + O(p^-2); tail bound 2/(pmax - 1).
    """
    if pmax < 2:
        raise ValueError("pmax must be >= 2")
    _, p1, p3 = _prime_split(pmax)
    logs = np.concatenate(
        [
            np.log1p(-1.0 / ((p1 - 1.0) * (p1 - 1.0))),
            np.log1p(1.0 / ((p3 - 1.0) * (p3 + 1.0))),
        ]
    )
    value = math.exp(math.fsum(logs.tolist()))
    return EulerProductResult(value, pmax, 2.0 / (pmax - 1))


def c_constant(pmax: int) -> EulerProductResult:
    """The singular-series constant

        c = prod_{p=1(4)} (1 - 3/p)(1 - 1/p)^-3 * prod_{p=3(4)} (1 - 1/p^2)^-1

    cut at pmax.  Tail bound 7/(pmax - 1) (the log factors are bounded by
    7/p^2 from p = 5 on).
    """
    if pmax < 2:
        raise ValueError("pmax must be >= 2")
    _, p1, p3 = _prime_split(pmax)
    logs = np.concatenate(
        [
            np.log1p(-3.0 / p1) - 3.0 * np.log1p(-1.0 / p1),
            -np.log1p(-1.0 / (p3 * p3)),
        ]
    )
    value = math.exp(math.fsum(logs.tolist()))
    return EulerProductResult(value, pmax, 7.0 / (pmax - 1))


def H_constant(pmax: int, mode: str = "via_kappa") -> EulerProductResult:
    """H = prod_p (1 - rho(p)/p)(1 - 1/p)^(-1) = prod_p (1 - chi4(p)/(p-1)).

    mode="raw" truncates the product in increasing-prime order; it converges
    only conditionally (like an L-value), so tail_bound is +inf and the cutoff
    must be taken large.  mode="via_kappa" returns 4*kappa(pmax)/pi, exact up
    to kappa's own (absolutely convergent) tail.
    """
    if mode == "via_kappa":
        k = kappa(pmax)
        return EulerProductResult(4.0 * k.value / math.pi, pmax, k.tail_bound)
    if mode != "raw":
        raise ValueError(f"unknown mode {mode!r}")
    if pmax < 2:
        raise ValueError("pmax must be >= 2")
    _, p1, p3 = _prime_split(pmax)
    logs = np.concatenate(
        [np.log1p(-1.0 / (p1 - 1.0)), np.log1p(1.0 / (p3 - 1.0))]
    )
    value = math.exp(math.fsum(logs.tolist()))
    return EulerProductResult(value, pmax, math.inf)


def g_density(h: int, table: FactorTable) -> float:
    """Multiplicative density g on squarefree h:
    g(p) = 1/(p-2) for p = 1 (mod 4), g(p) = 1/p otherwise."""
    if h < 1:
        raise ValueError("h must be positive")
    fi = factorize(h, table)
    if not fi.is_squarefree:
        raise ValueError(f"h={h} is not squarefree")
    out = 1.0
    for p, _ in fi.factors:
        out = out * (1.0 / (p - 2) if p % 4 == 1 else 1.0 / p)
    return out


def V_sum(lam: LambdaWeights, table: FactorTable) -> float:
    """V = sum_h lambda_h g(h) over the support of lambda."""
    return math.fsum(v * g_density(h, table) for h, v in lam.items())


def V_d_sum(lam: LambdaWeights, d: int, table: FactorTable) -> float:
    """V_d = sum over h coprime to d of lambda_h / h.  Not the same
    functional as V: the weight here is 1/h, not g(h)."""
    if d < 1:
        raise ValueError("d must be positive")
    return math.fsum(v / h for h, v in lam.items() if math.gcd(h, d) == 1)


def a2_identity_check(pmax: int) -> tuple[float, float, float]:
    """Both sides of c = kappa * prod_{p=1(4)} (1 - 1/(p-2))(1 - 1/p)^(-1)
    truncated at the same cutoff; returns (lhs, rhs, |lhs - rhs|).

    The identity holds factor by factor, so the difference is pure rounding.
    """
    lhs = c_constant(pmax).value
    _, p1, _ = _prime_split(pmax)
    extra = math.fsum(
        (np.log1p(-1.0 / (p1 - 2.0)) - np.log1p(-1.0 / p1)).tolist()
    )
    rhs = kappa(pmax).value * math.exp(extra)
    return lhs, rhs, abs(lhs - rhs)
