"""H2+ potential curves and analytic Morse vibrational states.

The bonding curve is a Morse oscillator.  The antibonding curve is modelled
as a purely repulsive anti-Morse curve sharing the same ``(D, alpha, R_e)``;
swap in any other callable wherever a Sigma_u accessor is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .constants import PROTON_MASS
from .errors import ConfigurationError, DomainError, InvariantViolation
from .radial import RadialFunction, RadialGrid, integrate


@dataclass(frozen=True)
class PotentialParams:
    """Morse parameters (hartree, 1/bohr, bohr) and the proton mass."""

    D: float = 0.1026
    alpha: float = 0.72
    R_e: float = 2.0
    m_p: float = PROTON_MASS

    def __post_init__(self):
        for name in ("D", "alpha", "R_e", "m_p"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive and finite, got {value!r}")

    @property
    def mu(self) -> float:
        """Nuclear reduced mass, exactly ``m_p / 2``."""
        return self.m_p / 2.0

    @property
    def omega(self) -> float:
        return self.alpha * math.sqrt(2.0 * self.D / self.mu)

    @property
    def lam(self) -> float:
        """Morse parameter ``sqrt(2 mu D) / alpha``; levels exist for ``nu < lam - 1/2``."""
        return math.sqrt(2.0 * self.mu * self.D) / self.alpha

    @property
    def n_levels(self) -> int:
        return max(0, math.ceil(self.lam - 0.5))


def _check_r(R):
    R = np.asarray(R, dtype=float)
    if not np.all(np.isfinite(R)) or np.any(R <= 0):
        raise DomainError("R must be finite and positive")
    return R


def sigma_g_potential(R, params: PotentialParams = PotentialParams()):
    """Bonding Morse curve ``D (e^{-2a(R-Re)} - 2 e^{-a(R-Re)})``."""
    R = _check_r(R)
    e = np.exp(-params.alpha * (R - params.R_e))
    out = params.D * (e * e - 2.0 * e)
    return out if out.ndim else float(out)


def sigma_u_potential(R, params: PotentialParams = PotentialParams()):
    """Repulsive anti-Morse curve ``(D/2)(e^{-2a(R-Re)} + 2 e^{-a(R-Re)})``."""
    R = _check_r(R)
    e = np.exp(-params.alpha * (R - params.R_e))
    out = 0.5 * params.D * (e * e + 2.0 * e)
    return out if out.ndim else float(out)


def morse_energy(nu, params: PotentialParams = PotentialParams()):
    """Level formula ``-D + w(nu+1/2) - w^2/(4D) (nu+1/2)^2``."""
    x = np.asarray(nu, dtype=float) + 0.5
    w = params.omega
    return -params.D + w * x - w * w / (4.0 * params.D) * x * x


def morse_wavefunction(nu: int, R, params: PotentialParams = PotentialParams()) -> np.ndarray:
    """Closed-form Morse eigenfunction sampled at ``R``.

    Phase convention: every level is positive in the inner classically
    forbidden region (the textbook form times ``(-1)**nu``).
    """
    R = np.asarray(R, dtype=float)
    lam = params.lam
    if not 0 <= nu < lam - 0.5:
        raise DomainError(f"nu={nu} is not a bound level (lambda={lam:.4f})")
    s = 2.0 * lam - 2.0 * nu - 1.0
    z = 2.0 * lam * np.exp(-params.alpha * (R - params.R_e))
    log_norm = 0.5 * (math.log(params.alpha * s) + gammaln(nu + 1) - gammaln(2.0 * lam - nu))
    envelope = np.exp(log_norm + (lam - nu - 0.5) * np.log(z) - 0.5 * z)
    return (-1) ** nu * envelope * eval_genlaguerre(nu, s, z)


@dataclass(frozen=True, eq=False)
class BoundLevel:
    nu: int
    energy: float
    wavefunction: RadialFunction

    @property
    def chi(self) -> np.ndarray:
        return self.wavefunction.values


def morse_levels(
    params: PotentialParams = PotentialParams(), grid: RadialGrid = RadialGrid()
) -> list[BoundLevel]:
    """All bound Morse levels on ``grid``, ordered by ``nu``."""
    n = params.n_levels
    if n == 0:
        raise ConfigurationError("parameter set supports no bound states")
    r = grid.r
    levels = []
    for nu in range(n):
        energy = float(morse_energy(nu, params))
        if energy >= 0:
            break
        chi = RadialFunction(grid, morse_wavefunction(nu, r, params), energy, 0, "unit", {"nu": nu})
        levels.append(BoundLevel(nu, energy, chi))
    if not levels:
        raise ConfigurationError("parameter set supports no bound states")
    return levels


def bound_expectation_R(level: BoundLevel, tol: float = 1e-6) -> float:
    """``<chi|R|chi>`` by Simpson quadrature on the level's grid."""
    wf = level.wavefunction
    norm = wf.norm2()
    if abs(norm - 1.0) > tol:
        raise InvariantViolation(f"level nu={level.nu} has norm {norm:.8f}, expected 1")
    return float(integrate(wf.r * wf.values**2, wf.grid.dr))


def vibrational_period(params: PotentialParams = PotentialParams()) -> float:
    """``2 pi / (E_1 - E_0)`` in atomic time units."""
    e0, e1 = morse_energy([0, 1], params)
    return 2.0 * math.pi / (e1 - e0)


@dataclass(frozen=True)
class MolecularModel:
    """Bundle of potential parameters and the radial grid, with cached levels."""

    params: PotentialParams = field(default_factory=PotentialParams)
    grid: RadialGrid = field(default_factory=RadialGrid)

    @cached_property
    def levels(self) -> list[BoundLevel]:
        return morse_levels(self.params, self.grid)

    def level(self, nu: int) -> BoundLevel:
        try:
            return self.levels[nu]
        except IndexError:
            raise DomainError(f"nu={nu} is not bound; {len(self.levels)} levels exist") from None

    def energy(self, nu: int) -> float:
        return self.level(nu).energy

    def sigma_u(self, R):
        return sigma_u_potential(R, self.params)

    def sigma_g(self, R):
        return sigma_g_potential(R, self.params)
