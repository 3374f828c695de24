"""Spherical Bessel functions by recurrence.

``j_l`` uses upward recurrence where it is stable (``x`` above the highest
requested order), a downward continued-fraction (Miller) sweep of ratios
``j_l / j_{l-1}`` below that, and the leading power series for ``x < 1e-3``.
"""

from __future__ import annotations

import numpy as np

_SERIES_CUTOFF = 1e-3


def _double_factorial_odd(l: int) -> float:
    """``(2l+1)!!``"""
    out = 1.0
    for m in range(3, 2 * l + 2, 2):
        out *= m
    return out


def spherical_bessel_table(lmax: int, x) -> np.ndarray:
    """Return ``j_0 .. j_lmax`` at ``x``; shape ``(lmax + 1,) + x.shape``."""
    if lmax < 0:
        raise ValueError("lmax must be non-negative")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    flat = x.ravel()
    out = np.empty((lmax + 1, flat.size))

    small = flat < _SERIES_CUTOFF
    up = flat > lmax
    down = ~small & ~up

    if small.any():
        xs = flat[small]
        x2 = xs * xs
        for l in range(lmax + 1):
            a = 2 * l + 3
            out[l, small] = xs**l / _double_factorial_odd(l) * (1 - x2 / (2 * a) + x2 * x2 / (8 * a * (a + 2)))

    if up.any():
        xu = flat[up]
        s, c = np.sin(xu), np.cos(xu)
        out[0, up] = s / xu
        if lmax >= 1:
            out[1, up] = s / (xu * xu) - c / xu
        jm, j = out[0, up], out[1, up] if lmax >= 1 else None
        for l in range(1, lmax):
            jp = (2 * l + 1) / xu * j - jm
            out[l + 1, up] = jp
            jm, j = j, jp

    if down.any():
        xd = flat[down]
        n_start = lmax + 30 + int(np.ceil(xd.max()))
        # ratios[l] = j_l / j_{l-1}, from the continued fraction downward
        ratios = np.zeros((lmax + 1, xd.size))
        r = np.zeros_like(xd)
        for l in range(n_start, 0, -1):
            r = 1.0 / ((2 * l + 1) / xd - r)
            if l <= lmax:
                ratios[l] = r
        s, c = np.sin(xd), np.cos(xd)
        j0 = s / xd
        j1 = s / (xd * xd) - c / xd
        # anchor on whichever of j0, j1 is not near a zero
        use_j1 = np.abs(j1) > np.abs(j0)
        vals = np.empty((lmax + 1, xd.size))
        vals[0] = np.where(use_j1, 0.0, j0)
        if lmax >= 1:
            vals[1] = np.where(use_j1, j1, j0 * ratios[1])
            vals[0] = np.where(use_j1, j1 / ratios[1], j0)
        for l in range(2, lmax + 1):
            vals[l] = vals[l - 1] * ratios[l]
        out[:, down] = vals

    return out.reshape((lmax + 1,) + x.shape)


def spherical_bessel(L: int, x):
    """Spherical Bessel function of the first kind ``j_L(x)``."""
    out = spherical_bessel_table(L, x)[L]
    return out if out.ndim else float(out)


def spherical_neumann_table(lmax: int, x) -> np.ndarray:
    """``y_0 .. y_lmax`` by upward recurrence (stable for all orders); ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    out = np.empty((lmax + 1,) + x.shape)
    s, c = np.sin(x), np.cos(x)
    out[0] = -c / x
    if lmax >= 1:
        out[1] = -c / (x * x) - s / x
    for l in range(1, lmax):
        out[l + 1] = (2 * l + 1) / x * out[l] - out[l - 1]
    return out


def riccati_pair(L: int, x):
    """Riccati functions ``(x j_L(x), -x y_L(x))`` ~ ``(sin, cos)(x - L pi/2)``."""
    x = np.asarray(x, dtype=float)
    j = spherical_bessel_table(L, x)[L]
    y = spherical_neumann_table(L, x)[L]
    return x * j, -x * y
