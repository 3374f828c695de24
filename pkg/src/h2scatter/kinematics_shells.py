"""Collinear e-H2+ kinematics and grouping of components into interfering shells.

Momenta are signed scalars along the beam axis.  ``m_I`` is the ion mass in
electron masses; the relative (e-ion reduced) mass is ``m_I / (m_I + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .constants import PROTON_MASS, ion_mass, relative_mass
from .errors import InfeasibleSuperpositionError

SHELL_TOLERANCE = 1e-9

M_ION = ion_mass(PROTON_MASS)
M_REL = relative_mass(PROTON_MASS)


@dataclass(frozen=True)
class LabState:
    """Lab-frame electron momentum ``p``, ion momentum ``P`` and internal level."""

    p: float
    P: float
    nu: int
    E_nu: float

    def total_energy(self, m_ion: float = M_ION) -> float:
        return 0.5 * self.p**2 + 0.5 * self.P**2 / m_ion + self.E_nu


@dataclass(frozen=True)
class ShellComponent:
    """One discrete component ``C |nu>|k>|K>`` in relative/centre-of-mass momenta."""

    nu: int
    k: float
    K: float
    coeff: complex
    E_nu: float

    def total_energy(self, m_rel: float = M_REL) -> float:
        return 0.5 * self.k**2 / m_rel + self.E_nu


def lab_to_cm(p, P, m_ion: float = M_ION):
    """``K = p + P``, ``k = (m_I p - P) / (m_I + 1)``; returns ``(k, K)``."""
    return (m_ion * p - P) / (m_ion + 1.0), p + P


def cm_to_lab(k, K, m_ion: float = M_ION):
    """Inverse of :func:`lab_to_cm`; returns ``(p, P)``."""
    return k + K / (m_ion + 1.0), K * m_ion / (m_ion + 1.0) - k


def outgoing_momentum(k_a: float, E_a: float, E_b: float, mass: float = 1.0) -> Optional[float]:
    """``|k_b| = sqrt(2 m (k_a^2 / 2m + E_a - E_b))``, or ``None`` for a closed channel.

    ``mass`` is the relative mass; 1 gives the electron-mass-unit form.
    """
    arg = 0.5 * k_a**2 / mass + E_a - E_b
    if arg < 0:
        return None
    return math.sqrt(2.0 * mass * arg)


def incident_k_for_shell(k_f: float, E: float, E_nu: float, mass: float = 1.0) -> Optional[float]:
    """Incident relative momentum feeding final ``(k_f, E)`` from level energy ``E_nu``."""
    return outgoing_momentum(k_f, E, E_nu, mass)


def solve_entangled_partner(
    component: LabState, nu2: int, E_nu2: float, m_ion: float = M_ION
) -> LabState:
    """Lab momenta of level ``nu2`` sharing total energy and momentum with ``component``.

    With ``K`` fixed the constraint reduces to ``k2^2 = k1^2 + 2 m_rel (E1 - E2)``;
    the root with the sign of ``k1`` is the branch that returns ``(p1, P1)``
    when the levels coincide.
    """
    m_rel = m_ion / (m_ion + 1.0)
    k1, K = lab_to_cm(component.p, component.P, m_ion)
    arg = k1 * k1 + 2.0 * m_rel * (component.E_nu - E_nu2)
    if arg < 0:
        raise InfeasibleSuperpositionError(
            f"level nu={nu2} (E={E_nu2:.6g}) lies above the available relative kinetic energy"
        )
    k2 = math.copysign(math.sqrt(arg), k1 if k1 != 0 else 1.0)
    if E_nu2 == component.E_nu:
        k2 = k1
    p2, P2 = cm_to_lab(k2, K, m_ion)
    return LabState(p2, P2, nu2, E_nu2)


def enumerate_shells(
    components: Iterable[ShellComponent], tolerance: float = SHELL_TOLERANCE, m_rel: float = M_REL
) -> list[list[ShellComponent]]:
    """Partition components into classes sharing ``(E_tot, K)`` within ``tolerance``.

    Shells are ordered by ``(E_tot, K)`` and members by ``(nu, k)`` so the
    result does not depend on input order.
    """
    comps = sorted(components, key=lambda c: (c.total_energy(m_rel), c.K, c.nu, c.k))
    shells: list[list[ShellComponent]] = []
    keys: list[tuple[float, float]] = []
    for c in comps:
        e, K = c.total_energy(m_rel), c.K
        for key, shell in zip(keys, shells):
            if abs(key[0] - e) <= tolerance and abs(key[1] - K) <= tolerance:
                shell.append(c)
                break
        else:
            keys.append((e, K))
            shells.append([c])
    for shell in shells:
        shell.sort(key=lambda c: (c.nu, c.k))
    return shells
