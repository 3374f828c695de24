"""Energy-normalized continuum radial states on the antibonding curve.

Regular solutions are propagated outward with Numerov, then matched at two
consecutive grid points to ``A [cos d s_L(kR) + sin d c_L(kR)]`` where
``s_L, c_L`` are the Riccati-Bessel functions (``~ sin, cos (kR - L pi/2)``).
Dividing by ``A`` and multiplying by ``sqrt(2 mu / (pi k))`` gives
``int chi_E chi_E' dR = delta(E - E')``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .bessel import riccati_pair
from .errors import DomainError, GridTooSmallError
from .numerov import count_nodes, propagate_outward
from .radial import RadialFunction, RadialGrid, integrate, simpson_weights

Potential = Callable[[np.ndarray], np.ndarray]

ASYMPTOTIC_FRACTION = 1e-6
"""Matching requires ``|V(R)| < ASYMPTOTIC_FRACTION * E``."""


@dataclass(frozen=True, eq=False)
class ContinuumState:
    energy: float
    L: int
    wavefunction: RadialFunction
    phase_shift: float
    asymptotic_k: float
    match_radius: float

    @property
    def chi(self) -> np.ndarray:
        return self.wavefunction.values

    @property
    def amplitude(self) -> float:
        """Asymptotic amplitude ``sqrt(2 mu / (pi k))`` of the normalized state."""
        return self.wavefunction.meta["amplitude"]


def _match_indices(grid: RadialGrid, match_radius: Optional[float]) -> tuple[int, int]:
    n = grid.n
    if match_radius is None:
        return n - 2, n - 1
    i = int(round((match_radius - grid.r_min) / grid.dr))
    if i < 1 or i > n - 1:
        raise GridTooSmallError(f"matching radius {match_radius} outside the grid")
    return i - 1, i


def solve_continuum_batch(
    energies,
    L: int,
    potential: Potential,
    mu: float,
    grid: RadialGrid = RadialGrid(),
    match_radius: Optional[float] = None,
    fitted: bool = True,
):
    """Solve for many energies at one ``L``.

    Returns ``(chi, phase, amplitude_norm)``: ``chi`` has shape
    ``(n_E, n_R)`` and is energy normalized; ``phase`` holds the absolute
    (unwrapped) phase shifts.
    """
    e = np.atleast_1d(np.asarray(energies, dtype=float))
    if np.any(~np.isfinite(e)) or np.any(e <= 0):
        raise DomainError("continuum energies must be positive")
    if L < 0:
        raise DomainError("L must be non-negative")
    r = grid.r
    h = grid.dr
    i0, i1 = _match_indices(grid, match_radius)
    v = np.asarray(potential(np.where(r > 0, r, h)), dtype=float)
    v_match = np.abs(v[i0 : i1 + 1]).max()
    if np.any(v_match >= ASYMPTOTIC_FRACTION * e):
        bad = e[v_match >= ASYMPTOTIC_FRACTION * e].min()
        raise GridTooSmallError(
            f"|V| = {v_match:.3e} at R = {r[i1]:.2f} is not asymptotic for E = {bad:.4g}; "
            "extend grid.Rmax or raise the lowest energy"
        )

    safe_r = np.where(r > 0, r, 1.0)
    cent = L * (L + 1) / safe_r**2
    f = 2.0 * mu * (e[None, :] - v[:, None]) - cent[:, None]
    y = propagate_outward(f, h, 0.0, h ** (L + 1), fitted)

    k = np.sqrt(2.0 * mu * e)
    sa, ca = riccati_pair(L, k * r[i0])
    sb, cb = riccati_pair(L, k * r[i1])
    det = sa * cb - sb * ca
    a1 = (y[i0] * cb - y[i1] * ca) / det
    a2 = (sa * y[i1] - sb * y[i0]) / det
    amp = np.hypot(a1, a2)
    delta = np.arctan2(a2, a1)

    # unwrap with the node count: theta(R) = kR - L pi/2 + delta in [N pi, (N+1) pi)
    nodes = count_nodes(y[1 : i1 + 1])
    theta_w = k * r[i1] - 0.5 * L * math.pi + delta
    m = np.round(((nodes + 0.5) * math.pi - theta_w) / (2.0 * math.pi))
    delta = delta + 2.0 * math.pi * m

    target = np.sqrt(2.0 * mu / (math.pi * k))
    chi = (y / amp * target).T
    return chi, delta, target


def solve_continuum(
    E: float,
    L: int,
    potential: Potential,
    mu: float,
    grid: RadialGrid = RadialGrid(),
    match_radius: Optional[float] = None,
    fitted: bool = True,
) -> ContinuumState:
    """Energy-normalized regular solution ``chi_{E,L}`` on ``grid``."""
    chi, delta, amp = solve_continuum_batch([E], L, potential, mu, grid, match_radius, fitted)
    k = math.sqrt(2.0 * mu * E)
    i0, i1 = _match_indices(grid, match_radius)
    wf = RadialFunction(grid, chi[0], float(E), L, "energy", {"amplitude": float(amp[0])})
    return ContinuumState(float(E), L, wf, float(delta[0]), k, float(grid.r[i1]))


def energy_normalization_check(
    E1: float,
    E2: float,
    L: int,
    potential: Potential,
    mu: float,
    grid: RadialGrid = RadialGrid(),
) -> float:
    """Overlap ``int_{Rmin}^{Rmax} chi_{E1,L} chi_{E2,L} dR`` of two normalized states."""
    if E1 <= 0 or E2 <= 0:
        raise DomainError("energies must be positive")
    chi, _, _ = solve_continuum_batch([E1, E2], L, potential, mu, grid)
    return float(integrate(chi[0] * chi[1], grid.dr))


def overlap_matrix(energies, L: int, potential: Potential, mu: float, grid: RadialGrid = RadialGrid()):
    """Matrix ``M_ij = int chi_{E_i} chi_{E_j} dR`` on the finite grid."""
    chi, _, _ = solve_continuum_batch(energies, L, potential, mu, grid)
    w = simpson_weights(grid.n, grid.dr)
    return (chi * w) @ chi.T


def free_overlap(k1: float, k2: float, r_max: float, mu: float) -> float:
    """Closed form of ``int_0^{r_max} A1 A2 sin(k1 R) sin(k2 R) dR`` for energy-normalized sines."""
    a = math.sqrt(2 * mu / (math.pi * k1)) * math.sqrt(2 * mu / (math.pi * k2))
    if k1 == k2:
        return a * (r_max / 2 - math.sin(2 * k1 * r_max) / (4 * k1))
    d, s = k1 - k2, k1 + k2
    return a * 0.5 * (math.sin(d * r_max) / d - math.sin(s * r_max) / s)


def ode_residual(chi: np.ndarray, r: np.ndarray, E: float, L: int, potential: Potential, mu: float) -> float:
    """Relative L2 residual of the radial equation with 5-point centered differences."""
    h = r[1] - r[0]
    d2 = (-chi[4:] + 16 * chi[3:-1] - 30 * chi[2:-2] + 16 * chi[1:-3] - chi[:-4]) / (12 * h * h)
    rc = r[2:-2]
    veff = potential(rc) + L * (L + 1) / (2 * mu * rc**2)
    res = -d2 / (2 * mu) + (veff - E) * chi[2:-2]
    scale = abs(E) * np.sqrt(np.sum(chi[2:-2] ** 2))
    return float(np.sqrt(np.sum(res**2)) / scale)
