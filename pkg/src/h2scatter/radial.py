"""Uniform radial grids, sampled radial functions and quadrature weights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid ``R = r_min + i * dr`` covering ``[r_min, r_max]``."""

    r_min: float = 0.2
    r_max: float = 40.0
    dr: float = 0.01

    def __post_init__(self):
        if not (np.isfinite(self.r_min) and np.isfinite(self.r_max) and np.isfinite(self.dr)):
            raise ValueError("grid bounds must be finite")
        if self.r_min < 0 or self.dr <= 0 or self.r_max <= self.r_min + 2 * self.dr:
            raise ValueError(f"invalid radial grid {self}")

    @property
    def n(self) -> int:
        return int(round((self.r_max - self.r_min) / self.dr)) + 1

    @property
    def r(self) -> np.ndarray:
        return self.r_min + self.dr * np.arange(self.n)

    def halved(self) -> "RadialGrid":
        return RadialGrid(self.r_min, self.r_max, self.dr / 2)


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """A real radial wavefunction sampled on a :class:`RadialGrid`.

    ``normalization`` is ``"unit"`` for bound states and ``"energy"`` for
    continuum states normalized to ``delta(E - E')``.
    """

    grid: RadialGrid
    values: np.ndarray
    energy: float
    L: int = 0
    normalization: str = "unit"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n,):
            raise ValueError("values do not match grid size")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def norm2(self) -> float:
        return integrate(self.values**2, self.grid.dr)


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` equally spaced samples.

    For even ``n`` the last interval is closed with the 3/8 rule so that the
    rule stays fourth order.
    """
    if n < 2:
        raise ValueError("need at least two samples")
    if n == 2:
        return np.array([h / 2, h / 2])
    if n == 3:
        return h / 3 * np.array([1.0, 4.0, 1.0])
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 3
    w[:m:2] += 2.0
    w[1:m:2] += 4.0
    w[0] -= 1.0
    w[m - 1] -= 1.0
    w[:m] *= h / 3
    if m < n:
        w[m - 1 :] += 3 * h / 8 * np.array([1.0, 3.0, 3.0, 1.0])
    return w


def integrate(values: np.ndarray, h: float, axis: int = -1) -> np.ndarray:
    """Composite Simpson integral of uniformly sampled values along ``axis``."""
    values = np.asarray(values)
    w = simpson_weights(values.shape[axis], h)
    return np.tensordot(values, w, axes=([axis], [0]))
