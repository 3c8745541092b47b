"""Empirical stress bench for the root-of-congruence large-sieve inequality.

For every h >= 1, X, N and complex coefficients alpha_n:

    sum_{X < d <= 2X, (d,h)=1} sum_{nu^2+1=0 (d)}
        |sum_{n <= N} alpha_n e(nu n hbar / d)|^2
    <=  400 (h X + N) sum |alpha_n|^2.

This is a theorem, so every trial must land at ratio <= 1; a violation is an
implementation bug and raises InternalCheckError.  The modulus range includes
d = 2 (mod 4), which carries roots (nu = 1 works mod 2); the campaign records
how far the empirical extremes sit below the constant 400.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import FactorTable
from .errors import InternalCheckError
from .roots import roots_mod_any

__all__ = ["LSTrial", "ls_lhs", "ls_trial", "ls_campaign"]

_KINDS = ("random", "ones", "aligned")


@dataclass(eq=False)
class LSTrial:
    """One evaluation of the inequality; ratio = lhs/rhs must be <= 1."""

    h: int
    X: int
    N: int
    kind: str
    alpha: np.ndarray
    lhs: float
    rhs: float
    ratio: float


def _root_fractions(
    h: int, X: int, table: FactorTable, cache: dict[int, list[int]] | None = None
) -> list[float]:
    """(nu * hbar mod d)/d over d in (X, 2X] coprime to h and their roots."""
    fracs: list[float] = []
    for d in range(X + 1, 2 * X + 1):
        if math.gcd(d, h) != 1:
            continue
        roots = cache.get(d) if cache is not None else None
        if roots is None:
            roots = roots_mod_any(d, table)
            if cache is not None:
                cache[d] = roots
        if not roots:
            continue
        hbar = pow(h, -1, d)
        fracs.extend((nu * hbar % d) / d for nu in roots)
    return fracs


def ls_lhs(
    h: int,
    X: int,
    N: int,
    alpha: np.ndarray,
    table: FactorTable,
    cache: dict[int, list[int]] | None = None,
) -> float:
    """Exact double sum on the left of the inequality."""
    if h < 1 or X < 1 or N < 1:
        raise ValueError("h, X, N must be positive")
    alpha = np.asarray(alpha, dtype=np.complex128)
    if len(alpha) != N:
        raise ValueError("alpha must have length N")
    fracs = _root_fractions(h, X, table, cache)
    if not fracs:
        return 0.0
    n = np.arange(1, N + 1, dtype=np.float64)
    total = 0.0
    block = 256
    for i in range(0, len(fracs), block):
        fr = np.asarray(fracs[i : i + block])
        phases = np.exp(2j * np.pi * fr[:, None] * n[None, :])
        inner = (phases * alpha[None, :]).sum(axis=1)
        total += float((inner.real**2 + inner.imag**2).sum())
    return total


def _make_alpha(
    kind: str, h: int, X: int, N: int, rng: np.random.Generator, table: FactorTable,
    cache: dict[int, list[int]] | None,
) -> np.ndarray:
    if kind == "ones":
        return np.ones(N, dtype=np.complex128)
    if kind == "aligned":
        # phase-align to the first rooted modulus in range, maximizing one term
        fracs = _root_fractions(h, X, table, cache)
        if fracs:
            n = np.arange(1, N + 1, dtype=np.float64)
            return np.exp(-2j * np.pi * fracs[0] * n)
        return np.ones(N, dtype=np.complex128)
    if kind == "random":
        radius = rng.uniform(0.0, 1.0, N)
        angle = rng.uniform(0.0, 1.0, N)
        return radius * np.exp(2j * np.pi * angle)
    raise ValueError(f"unknown alpha kind {kind!r}")


def ls_trial(
    h: int,
    X: int,
    N: int,
    rng_seed: int | tuple,
    table: FactorTable,
    kind: str = "random",
    cache: dict[int, list[int]] | None = None,
) -> LSTrial:
    """One seeded trial; asserts the inequality."""
    rng = np.random.default_rng(rng_seed)
    alpha = _make_alpha(kind, h, X, N, rng, table, cache)
    lhs = ls_lhs(h, X, N, alpha, table, cache)
    rhs = 400.0 * (h * X + N) * float((alpha.real**2 + alpha.imag**2).sum())
    ratio = lhs / rhs if rhs != 0.0 else 0.0
    if ratio > 1.0:
        raise InternalCheckError(
            f"large-sieve bound violated: ratio {ratio} at h={h} X={X} N={N}"
        )
    return LSTrial(h, X, N, kind, alpha, lhs, rhs, ratio)


def ls_campaign(
    trials: int,
    h_max: int,
    x_max: int,
    n_max: int,
    seed: int,
    table: FactorTable,
) -> tuple[list[LSTrial], float]:
    """Seeded campaign over random (h, X, N) with the alpha kinds interleaved.

    Returns (trial list, max ratio).  Per-trial seeds derive from the root
    seed, so results do not depend on evaluation order.
    """
    cache: dict[int, list[int]] = {}
    out: list[LSTrial] = []
    max_ratio = 0.0
    for i in range(trials):
        rng = np.random.default_rng((seed, i))
        h = int(rng.integers(1, h_max + 1))
        X = int(rng.integers(1, x_max + 1))
        N = int(rng.integers(1, n_max + 1))
        kind = _KINDS[i % len(_KINDS)]
        t = ls_trial(h, X, N, (seed, i, 1), table, kind=kind, cache=cache)
        max_ratio = max(max_ratio, t.ratio)
        out.append(t)
    return out, max_ratio
