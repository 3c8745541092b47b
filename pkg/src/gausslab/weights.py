"""Weight systems: the C^2 crop window, the model window w, and the
coefficient families (gamma on odd primes, lambda on squarefree integers).

The crop is sigma * S on two quintic-smoothstep ramps of width delta*(x/2)
glued to a flat plateau, supported exactly on [x/2, x].  S(u) =
6u^5 - 15u^4 + 10u^3 has two vanishing derivatives at both ends, so f is C^2
everywhere.  sigma is the largest scale <= 1 for which the derivative bounds
|t^j f^(j)(t)| <= 1 (j = 0, 1, 2) hold on a ramp-aware 10^4-point grid; for
narrow ramps that forces sigma of size about delta^2 / 23.

Everything is plain polynomial arithmetic with a fixed association order, so
scalar and numpy evaluations agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import FactorTable, is_prime, factorize

__all__ = [
    "CropFunction",
    "crop_build",
    "CropW",
    "crop_w_build",
    "GammaWeights",
    "LambdaWeights",
]

_GRID_POINTS = 10_000


def _smoothstep(u):
    # 6u^5 - 15u^4 + 10u^3, Horner with fixed association
    return u * u * u * (10.0 + u * (u * 6.0 - 15.0))


def _smoothstep_d1(u):
    # 30 u^2 (u-1)^2
    v = u * (u - 1.0)
    return 30.0 * (v * v)


def _smoothstep_d2(u):
    # 60 u (2u-1) (u-1)
    return 60.0 * u * (2.0 * u - 1.0) * (u - 1.0)


@dataclass(eq=False)
class CropFunction:
    """Smooth window supported on [x/2, x] with evaluable f, f', f''."""

    x: float
    ramp_delta: float
    scale_sigma: float = 1.0
    a0: float = field(init=False)
    a1: float = field(init=False)
    b1: float = field(init=False)
    b0: float = field(init=False)
    ramp_width: float = field(init=False)

    def __post_init__(self) -> None:
        half = self.x / 2.0
        w = self.ramp_delta * half
        self.a0 = half
        self.a1 = half + w
        self.b1 = self.x - w
        self.b0 = float(self.x)
        self.ramp_width = w
        if not (self.a0 < self.a1 < self.b1 < self.b0):
            raise ValueError("degenerate ramp width")

    @property
    def breakpoints(self) -> tuple[float, float, float, float]:
        return (self.a0, self.a1, self.b1, self.b0)

    def _eval(self, t, order: int):
        tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
        out = np.zeros_like(tt)
        w = self.ramp_width
        rise = (tt >= self.a0) & (tt < self.a1)
        flat = (tt >= self.a1) & (tt <= self.b1)
        fall = (tt > self.b1) & (tt <= self.b0)
        s = self.scale_sigma
        if order == 0:
            out[rise] = s * _smoothstep((tt[rise] - self.a0) / w)
            out[flat] = s
            out[fall] = s * _smoothstep((self.b0 - tt[fall]) / w)
        elif order == 1:
            out[rise] = s * _smoothstep_d1((tt[rise] - self.a0) / w) / w
            out[fall] = -(s * _smoothstep_d1((self.b0 - tt[fall]) / w) / w)
        elif order == 2:
            w2 = w * w
            out[rise] = s * _smoothstep_d2((tt[rise] - self.a0) / w) / w2
            out[fall] = s * _smoothstep_d2((self.b0 - tt[fall]) / w) / w2
        else:
            raise ValueError("order must be 0, 1 or 2")
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out[0])
        return out

    def __call__(self, t):
        return self._eval(t, 0)

    def f(self, t):
        return self._eval(t, 0)

    def df(self, t):
        return self._eval(t, 1)

    def d2f(self, t):
        return self._eval(t, 2)

    def grid(self, n: int = _GRID_POINTS) -> np.ndarray:
        """Ramp-aware check grid: a quarter of the points on each ramp."""
        per_ramp = n // 4
        return np.concatenate(
            [
                np.linspace(self.a0, self.a1, per_ramp),
                np.linspace(self.a1, self.b1, n - 2 * per_ramp),
                np.linspace(self.b1, self.b0, per_ramp),
            ]
        )

    def derivative_margins(self) -> tuple[float, float, float]:
        """Grid maxima of |f|, |t f'|, |t^2 f''|."""
        g = self.grid()
        m0 = float(np.max(np.abs(self.f(g))))
        m1 = float(np.max(np.abs(g * self.df(g))))
        m2 = float(np.max(np.abs(g * g * self.d2f(g))))
        return m0, m1, m2

    def integral(self) -> float:
        """Closed form of the window mass: sigma * (x/2 - ramp_width)."""
        return self.scale_sigma * (self.x / 2.0 - self.ramp_width)


def crop_build(x, ramp_delta: float | None = None) -> CropFunction:
    """Build the crop window at scale x.

    ramp_delta defaults to (log x)^-5 (must land in (0, 1/4); pass it
    explicitly for small x).  The scale sigma is fixed by the grid check of
    the derivative bounds, so callers always receive an admissible window.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if ramp_delta is None:
        ramp_delta = math.log(x) ** -5
    if not 0.0 < ramp_delta < 0.25:
        raise ValueError(f"ramp_delta={ramp_delta} outside (0, 1/4)")
    probe = CropFunction(float(x), float(ramp_delta), 1.0)
    m0, m1, m2 = probe.derivative_margins()
    sigma = (1.0 - 1e-12) / max(1.0, m0, m1, m2)
    return CropFunction(float(x), float(ramp_delta), sigma)


@dataclass(eq=False)
class CropW:
    """Model window w(y) = 140 y^3 (1-y)^3 on (0,1); C^2 on R, unit mass.

    The normalization is exact: 140 * Beta(4,4) = 1.
    """

    def _eval(self, y, order: int):
        yy = np.atleast_1d(np.asarray(y, dtype=np.float64))
        out = np.zeros_like(yy)
        inside = (yy > 0.0) & (yy < 1.0)
        u = yy[inside]
        if order == 0:
            v = u * (1.0 - u)
            out[inside] = 140.0 * (v * v * v)
        elif order == 1:
            # 420 y^2 (1-y)^2 (1-2y)
            v = u * (1.0 - u)
            out[inside] = 420.0 * (v * v) * (1.0 - 2.0 * u)
        elif order == 2:
            # 840 y (1-y) (1 - 5y + 5y^2)
            out[inside] = 840.0 * (u * (1.0 - u)) * (1.0 + u * (u * 5.0 - 5.0))
        else:
            raise ValueError("order must be 0, 1 or 2")
        if np.isscalar(y) or np.ndim(y) == 0:
            return float(out[0])
        return out

    def __call__(self, y):
        return self._eval(y, 0)

    def dw(self, y):
        return self._eval(y, 1)

    def d2w(self, y):
        return self._eval(y, 2)

    @staticmethod
    def integral() -> float:
        return 1.0


def crop_w_build() -> CropW:
    return CropW()


class GammaWeights:
    """Second-coordinate weights: supported on odd primes, |gamma_l| <= log l.

    The default rule is gamma_l = log l on odd primes.  A custom table may be
    supplied as {prime: value}; it is validated against the support and bound
    conditions.
    """

    def __init__(self, custom: dict[int, float] | None = None):
        self.custom = None
        if custom is not None:
            for l, v in custom.items():
                if l < 3 or l % 2 == 0 or not is_prime(l):
                    raise ValueError(f"gamma support must be odd primes, got {l}")
                if abs(v) > math.log(l) * (1.0 + 1e-12):
                    raise ValueError(f"|gamma_{l}| exceeds log {l}")
            self.custom = dict(custom)

    @classmethod
    def log_on_odd_primes(cls) -> "GammaWeights":
        return cls()

    def weight(self, l: int) -> float:
        if l < 3 or l % 2 == 0 or not is_prime(l):
            return 0.0
        if self.custom is not None:
            return self.custom.get(l, 0.0)
        return math.log(l)

    def array_for(self, l_values) -> np.ndarray:
        return np.array([self.weight(int(l)) for l in l_values], dtype=np.float64)


class LambdaWeights:
    """Sieve-style coefficients on squarefree h <= y with |lambda_h| <= 1."""

    def __init__(self, coeffs: dict[int, float], y: int):
        self.y = int(y)
        self.coeffs = {int(h): float(v) for h, v in coeffs.items() if v != 0.0}
        for h, v in self.coeffs.items():
            if h < 1 or h > self.y:
                raise ValueError(f"support point {h} outside 1..{self.y}")
            if abs(v) > 1.0 + 1e-12:
                raise ValueError(f"|lambda_{h}| > 1")

    @classmethod
    def delta_one(cls) -> "LambdaWeights":
        return cls({1: 1.0}, 1)

    @classmethod
    def moebius(cls, y: int, table: FactorTable) -> "LambdaWeights":
        from .arith import moebius as mu

        return cls({h: float(mu(h, table)) for h in range(1, y + 1)}, y)

    def validate_squarefree(self, table: FactorTable) -> None:
        for h in self.coeffs:
            if not factorize(h, table).is_squarefree:
                raise ValueError(f"support point {h} is not squarefree")

    def items(self) -> list[tuple[int, float]]:
        return sorted(self.coeffs.items())

    def weight(self, h: int) -> float:
        return self.coeffs.get(h, 0.0)

    def beta(self, k: int) -> float:
        """beta_k = sum over h | k of lambda_h."""
        return math.fsum(v for h, v in self.items() if k % h == 0)
