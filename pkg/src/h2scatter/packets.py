"""Free one-dimensional Gaussian packets in closed form.

A packet has momentum amplitude ``(Delta sqrt(pi))^{-1/2} exp(-(p-p0)^2 / (2 Delta^2))``
optionally multiplied by the focus-offset phase ``e^{i p x_d} e^{-i p^2 tau_d / (2m)}``
with ``x_d = p0 tau_d / m``.  The offset moves the focus to ``t = -tau_d``
while the packet centre still passes ``x0`` at ``t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GaussianPacket1D:
    mass: float
    p0: float
    delta: float
    tau_d: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise DomainError(f"momentum width must be positive, got {self.delta!r}")
        if not (self.mass > 0):
            raise DomainError("mass must be positive")

    @property
    def velocity(self) -> float:
        return self.p0 / self.mass

    def center(self, t):
        return self.x0 + self.velocity * np.asarray(t, dtype=float)

    def width2(self, t):
        """Position variance ``1/(2 D^2) + D^2 (t + tau_d)^2 / (2 m^2)``."""
        s = np.asarray(t, dtype=float) + self.tau_d
        return 0.5 / self.delta**2 + 0.5 * self.delta**2 * s * s / self.mass**2

    def density(self, x, t):
        """Position probability density at ``(x, t)``."""
        v = self.width2(t)
        d = np.asarray(x, dtype=float) - self.center(t)
        return np.exp(-0.5 * d * d / v) / np.sqrt(2.0 * math.pi * v)

    def amplitude(self, p):
        """Momentum amplitude at ``t = 0`` including the focus-offset phase."""
        p = np.asarray(p, dtype=float)
        g = (self.delta * math.sqrt(math.pi)) ** -0.5 * np.exp(-0.5 * ((p - self.p0) / self.delta) ** 2)
        if self.tau_d == 0.0 and self.x0 == 0.0:
            return g.astype(complex)
        x_d = self.velocity * self.tau_d
        phase = p * (x_d - self.x0) - 0.5 * p * p * self.tau_d / self.mass
        return g * np.exp(1j * phase)

    def wavefunction(self, x, t):
        """Closed-form position wavefunction up to a global phase."""
        x = np.asarray(x, dtype=float)
        s = np.asarray(t, dtype=float) + self.tau_d
        d2 = self.delta**2
        z = 1.0 + 1j * d2 * s / self.mass
        xi = x - self.center(t)
        norm = (d2 / math.pi) ** 0.25 / np.sqrt(z)
        return norm * np.exp(1j * self.p0 * xi - 0.5 * d2 * xi * xi / z)
