"""Panelized Gauss-Legendre quadrature tailored to the crop window.

The crop is piecewise polynomial with known breakpoints, so instead of
blind adaptivity the panels are aligned with the pieces: plateau segments of
an oscillatory integral get a closed form, ramp segments get Gauss-Legendre
panels no wider than half an oscillation period.  With 16 nodes per panel the
error sits at the rounding floor, comfortably below the 1e-9 relative target.
"""

from __future__ import annotations

import math

import numpy as np

from .weights import CropFunction

__all__ = [
    "crop_cos_transform",
    "crop_radial_integral",
    "crop_curvature_l1",
    "crop_line_integral",
]

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_integrate(func, t1: float, t2: float, freq: float) -> float:
    """Integral of func over [t1, t2], panels <= half a period of frequency freq."""
    length = t2 - t1
    if length <= 0.0:
        return 0.0
    if freq > 0.0:
        npanels = max(1, math.ceil(length * (2.0 * freq)))
    else:
        npanels = 1
    edges = np.linspace(t1, t2, npanels + 1)
    mids = (edges[1:] + edges[:-1]) * 0.5
    halfs = (edges[1:] - edges[:-1]) * 0.5
    pts = (mids[:, None] + halfs[:, None] * _GL_NODES[None, :]).ravel()
    vals = func(pts).reshape(npanels, -1)
    return float(((vals * _GL_WEIGHTS[None, :]).sum(axis=1) * halfs).sum())


def _t_pieces(crop: CropFunction, ell: int) -> list[tuple[float, float, str]]:
    """The t-intervals where f(t^2 + ell^2) is a ramp or the plateau."""
    l2 = float(ell) * float(ell)
    if l2 >= crop.b0:
        return []
    out = []
    for n1, n2, kind in (
        (crop.a0, crop.a1, "rise"),
        (crop.a1, crop.b1, "flat"),
        (crop.b1, crop.b0, "fall"),
    ):
        lo = max(n1, l2)
        if n2 > lo:
            out.append((math.sqrt(lo - l2), math.sqrt(n2 - l2), kind))
    return out


def crop_cos_transform(crop: CropFunction, ell: int, v: float) -> float:
    """F_ell(v) = integral over t >= 0 of f(t^2 + ell^2) cos(2 pi v t) dt.

    Equals half the two-sided Fourier transform of the even function
    t -> f(t^2 + ell^2) at frequency v; F_ell(0) is the radial integral I(ell).
    """
    l2 = float(ell) * float(ell)
    total = 0.0
    tw = 2.0 * math.pi * v
    for t1, t2, kind in _t_pieces(crop, ell):
        if kind == "flat":
            if v == 0.0:
                total += crop.scale_sigma * (t2 - t1)
            else:
                total += crop.scale_sigma * (math.sin(tw * t2) - math.sin(tw * t1)) / tw
        else:
            if v == 0.0:
                total += _gl_integrate(lambda t: crop.f(t * t + l2), t1, t2, 0.0)
            else:
                total += _gl_integrate(
                    lambda t: crop.f(t * t + l2) * np.cos(tw * t), t1, t2, abs(v)
                )
    return total


def crop_radial_integral(crop: CropFunction, ell: int) -> float:
    """I(ell) = integral of f(t^2 + ell^2) dt over t >= 0; zero once ell^2 >= x."""
    return crop_cos_transform(crop, ell, 0.0)


def crop_curvature_l1(crop: CropFunction, ell: int) -> float:
    """Upper bound on the L1 norm of (d/dt)^2 [f(t^2 + ell^2)].

    The second derivative is 2 f'(n) + 4 t^2 f''(n) at n = t^2 + ell^2, so
    integral |g''| <= integral (2|f'| + 4 t^2 |f''|).  Only ramps contribute;
    panels are split where f'' changes sign (mid-ramp) to integrate the
    absolute values exactly.
    """
    l2 = float(ell) * float(ell)
    halfw = crop.ramp_width / 2.0
    splits = sorted(
        {crop.a0, crop.a0 + halfw, crop.a1, crop.b1, crop.b0 - halfw, crop.b0}
    )
    total = 0.0
    for n1, n2 in zip(splits[:-1], splits[1:]):
        if n2 <= crop.a1 or n1 >= crop.b1:  # ramp segments only
            lo = max(n1, l2)
            if n2 <= lo:
                continue
            t1, t2 = math.sqrt(lo - l2), math.sqrt(n2 - l2)
            total += _gl_integrate(
                lambda t: np.abs(
                    2.0 * crop.df(t * t + l2) + 4.0 * (t * t) * crop.d2f(t * t + l2)
                ),
                t1,
                t2,
                0.0,
            )
    return total


def crop_line_integral(crop: CropFunction) -> float:
    """Quadrature value of integral f(t) dt (cross-check for the closed form)."""
    total = crop.scale_sigma * (crop.b1 - crop.a1)
    for t1, t2 in ((crop.a0, crop.a1), (crop.b1, crop.b0)):
        total += _gl_integrate(crop.f, t1, t2, 0.0)
    return total
