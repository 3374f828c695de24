"""First-Born LCAO amplitudes for electron-impact g -> u excitation of H2+.

The amplitude for ``|nu, k_i> -> |E, L, k_f>`` is ``i^L sqrt(2L+1) R`` with

    R = 16/pi^2 / (kt^2 (4 + kt^2)^2) * int N+ N- chi_{E,L} j_L(kt R/2) chi_nu dR

and ``kt = |k_f - k_i|``.  Two routes are provided: direct Simpson
quadrature (:class:`BornCalculator`) and a tabulation in ``kt`` used by the
cross-section engine (:class:`RadialIntegralTable`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .bessel import spherical_bessel, spherical_bessel_table
from .continuum_states import solve_continuum_batch
from .errors import DegenerateInputError, DomainError
from .molecular_structure import MolecularModel
from .radial import simpson_weights

__all__ = [
    "MomentumTransfer",
    "TMatrixElement",
    "lcao_norms",
    "radial_prefactor",
    "spherical_bessel",
    "BornCalculator",
    "RadialIntegralTable",
    "radial_integral",
    "t_element",
]

SUPPORT_CUTOFF = 1e-12
"""Grid points where every bound state is below this fraction of its peak are dropped."""


@dataclass(frozen=True)
class MomentumTransfer:
    """Incident and outgoing relative momenta (3-vectors, 1/bohr)."""

    k_i: tuple
    k_f: tuple

    def __post_init__(self):
        ki = np.asarray(self.k_i, dtype=float)
        kf = np.asarray(self.k_f, dtype=float)
        if ki.shape != (3,) or kf.shape != (3,):
            raise DomainError("momenta must be 3-vectors")
        object.__setattr__(self, "k_i", tuple(ki))
        object.__setattr__(self, "k_f", tuple(kf))

    @classmethod
    def from_polar(cls, k_i: float, k_f: float, theta: float, azimuth: float = 0.0) -> "MomentumTransfer":
        """``k_i`` along +z, ``k_f`` at polar angle ``theta`` and the given azimuth."""
        s = math.sin(theta)
        kf = (k_f * s * math.cos(azimuth), k_f * s * math.sin(azimuth), k_f * math.cos(theta))
        return cls((0.0, 0.0, k_i), kf)

    @property
    def k_tilde_vector(self) -> np.ndarray:
        return np.subtract(self.k_f, self.k_i)

    @property
    def k_tilde(self) -> float:
        return float(np.linalg.norm(self.k_tilde_vector))


@dataclass(frozen=True)
class TMatrixElement:
    nu: int
    E: float
    L: int
    value: complex


def lcao_norms(R):
    """``N+-(R) = [2 +- 2 e^{-R} (1 + R + R^2/3)]^{-1/2}``."""
    R = np.asarray(R, dtype=float)
    if np.any(~np.isfinite(R)) or np.any(R <= 0):
        raise DomainError("LCAO norms need R > 0")
    s = np.exp(-R) * (1.0 + R + R * R / 3.0)
    # 1 - s loses digits at small R; use the series of 1 - e^{-R}(1+R+R^2/3)
    one_minus_s = np.where(R < 1e-2, R**3 / 6.0 - R**4 / 12.0, -np.expm1(-R) - np.exp(-R) * (R + R * R / 3.0))
    n_plus = 1.0 / np.sqrt(2.0 + 2.0 * s)
    n_minus = 1.0 / np.sqrt(2.0 * one_minus_s)
    if n_plus.ndim == 0:
        return float(n_plus), float(n_minus)
    return n_plus, n_minus


def radial_prefactor(k_tilde):
    """``16 / pi^2 / (kt^2 (4 + kt^2)^2)``."""
    q = np.asarray(k_tilde, dtype=float)
    if np.any(q <= 0):
        raise DegenerateInputError("momentum transfer must be nonzero")
    q2 = q * q
    return 16.0 / math.pi**2 / (q2 * (4.0 + q2) ** 2)


class BornCalculator:
    """Direct quadrature of the Born radial integral on the model's grid.

    Continuum states are solved on demand and cached per ``(E, L)``.
    """

    def __init__(self, model: Optional[MolecularModel] = None, fitted: bool = True):
        self.model = model or MolecularModel()
        self.fitted = fitted
        grid = self.model.grid
        self._r = grid.r
        self._npm = np.prod(lcao_norms(self._r), axis=0)
        self._cont: dict = {}

    @property
    def grid(self):
        return self.model.grid

    def continuum(self, energies, L: int) -> np.ndarray:
        """Energy-normalized ``chi_{E,L}`` rows for ``energies`` (cached)."""
        e = np.atleast_1d(np.asarray(energies, dtype=float))
        missing = [x for x in e if (float(x), L) not in self._cont]
        if missing:
            chi, _, _ = solve_continuum_batch(
                missing, L, self.model.sigma_u, self.model.params.mu, self.grid, fitted=self.fitted
            )
            for x, row in zip(missing, chi):
                row.setflags(write=False)
                self._cont[(float(x), L)] = row
        return np.array([self._cont[(float(x), L)] for x in e])

    def radial_integral_chi(self, chi_bound: np.ndarray, chi_cont: np.ndarray, L: int, k_tilde) -> np.ndarray:
        """Radial amplitude for arbitrary sampled bound and continuum functions."""
        q = np.atleast_1d(np.asarray(k_tilde, dtype=float))
        pref = radial_prefactor(q)
        w = simpson_weights(self._r.size, self.grid.dr)
        jl = spherical_bessel_table(L, np.outer(q, self._r) / 2.0)[L]
        integral = jl @ (w * self._npm * chi_bound * chi_cont)
        return pref * integral

    def radial_integral(self, L: int, nu: int, E: float, k_tilde) -> np.ndarray | float:
        if L < 0:
            raise DomainError("L must be non-negative")
        chi_b = self.model.level(nu).chi
        chi_c = self.continuum([E], L)[0]
        out = self.radial_integral_chi(chi_b, chi_c, L, k_tilde)
        return float(out[0]) if np.ndim(k_tilde) == 0 else out

    def t_element(self, nu: int, E: float, L: int, kinematics: MomentumTransfer) -> TMatrixElement:
        r = self.radial_integral(L, nu, E, kinematics.k_tilde)
        value = (1j) ** L * math.sqrt(2 * L + 1) * r
        return TMatrixElement(nu, float(E), L, complex(value))


_DEFAULT: dict = {}


def _default_calculator() -> BornCalculator:
    if "calc" not in _DEFAULT:
        _DEFAULT["calc"] = BornCalculator()
    return _DEFAULT["calc"]


def radial_integral(L: int, nu: int, E: float, k_tilde, calculator: Optional[BornCalculator] = None):
    """Born radial amplitude ``R(L, nu, E, kt)`` (default H2+ model if no calculator)."""
    return (calculator or _default_calculator()).radial_integral(L, nu, E, k_tilde)


def t_element(
    nu: int, E: float, L: int, kinematics: MomentumTransfer, calculator: Optional[BornCalculator] = None
) -> TMatrixElement:
    """``i^L sqrt(2L+1) R(L, nu, E, kt)``."""
    return (calculator or _default_calculator()).t_element(nu, E, L, kinematics)


def _q_grid(q_max: float, q_min: float, n_log: int, dq: float) -> np.ndarray:
    knee = 0.5
    low = np.geomspace(q_min, knee, n_log, endpoint=False)
    high = np.arange(knee, q_max + dq, dq)
    return np.concatenate([low, high])


@dataclass(eq=False)
class RadialIntegralTable:
    """``I(E, q) = int N+ N- chi_{E,L} j_L(qR/2) chi_nu dR`` tabulated in ``q``.

    ``I / q^L`` is smooth down to ``q = 0`` and is splined in ``ln q`` for every
    energy row; :meth:`__call__` returns the full radial amplitude
    (prefactor included) at per-row momentum transfers.
    """

    calculator: BornCalculator
    nu: int
    L: int
    energies: np.ndarray
    q_max: float
    q_min: float = 1e-3
    n_log: int = 60
    dq: float = 0.01
    q: np.ndarray = field(init=False, repr=False)
    _coef: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        calc = self.calculator
        e = np.asarray(self.energies, dtype=float)
        self.energies = e
        self.q = _q_grid(max(self.q_max, 1.0), self.q_min, self.n_log, self.dq)
        chi_b = calc.model.level(self.nu).chi
        r = calc._r
        keep = np.abs(chi_b) > SUPPORT_CUTOFF * np.abs(chi_b).max()
        lo, hi = int(np.argmax(keep)), int(keep.size - np.argmax(keep[::-1]))
        sl = slice(lo, hi)
        # full-grid weights keep the Simpson alternation aligned with the direct route
        w = simpson_weights(r.size, calc.grid.dr)[sl]
        chi_c = calc.continuum(e, self.L)[:, sl]
        weighted = chi_c * (w * calc._npm[sl] * chi_b[sl])
        jl = spherical_bessel_table(self.L, np.outer(r[sl], self.q) / 2.0)[self.L]
        table = weighted @ jl  # (n_E, n_q)
        reduced = table / self.q**self.L
        spline = CubicSpline(np.log(self.q), reduced, axis=1)
        self._x = spline.x
        self._coef = spline.c  # (4, n_q - 1, n_E)

    def reduced(self, k_tilde: np.ndarray) -> np.ndarray:
        """``I / q^L`` at ``k_tilde`` of shape ``(n_E, ...)``; row ``i`` uses energy ``i``."""
        k = np.asarray(k_tilde, dtype=float)
        if k.shape[0] != self.energies.size:
            raise ValueError("first axis of k_tilde must match the energy grid")
        if np.any(k > self.q[-1] * (1 + 1e-12)):
            raise DomainError(f"momentum transfer {k.max():.4g} exceeds table range {self.q[-1]:.4g}")
        x = np.log(np.clip(k, self.q[0], self.q[-1]))
        idx = np.clip(np.searchsorted(self._x, x, side="right") - 1, 0, self._x.size - 2)
        dx = x - self._x[idx]
        rows = np.broadcast_to(np.arange(k.shape[0]).reshape((-1,) + (1,) * (k.ndim - 1)), k.shape)
        c = self._coef[:, idx, rows]
        return ((c[0] * dx + c[1]) * dx + c[2]) * dx + c[3]

    def __call__(self, k_tilde: np.ndarray) -> np.ndarray:
        k = np.asarray(k_tilde, dtype=float)
        return radial_prefactor(k) * self.reduced(k) * k**self.L
