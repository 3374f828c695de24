"""Initial states: entangled discrete superpositions and product wave packets.

Discrete states are lists of :class:`ShellComponent` (relative momentum
``k``, centre-of-mass momentum ``K``) with unit total weight.  Packet states
carry an internal superposition times Gaussian electron and ion packets.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, DomainError, InfeasibleSuperpositionError
from .kinematics_shells import (
    M_ION,
    M_REL,
    LabState,
    ShellComponent,
    enumerate_shells,
    lab_to_cm,
    solve_entangled_partner,
)
from .molecular_structure import MolecularModel, morse_wavefunction
from .packets import GaussianPacket1D
from .radial import integrate

NORM_TOLERANCE = 1e-12

DISCRETE = "entangled-discrete"
PACKET = "product-packet"


@dataclass(frozen=True)
class PacketSpec:
    """Product of an internal superposition and electron/ion Gaussian packets."""

    nu_coeffs: Mapping[int, complex]
    p0: float = 4.0
    dp: float = 0.01
    P0: float = 0.0
    dP: float = 1.0
    tau_d: float = 0.0

    def __post_init__(self):
        if not self.nu_coeffs:
            raise DomainError("packet needs at least one internal level")
        for name in ("dp", "dP"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        norm = sum(abs(c) ** 2 for c in self.nu_coeffs.values())
        if abs(norm - 1.0) > 1e-9:
            raise DomainError(f"internal coefficients have norm {norm:.12g}, expected 1")
        object.__setattr__(self, "nu_coeffs", dict(sorted(self.nu_coeffs.items())))

    def electron(self) -> GaussianPacket1D:
        return GaussianPacket1D(1.0, self.p0, self.dp, self.tau_d)

    def ion(self, m_ion: float = M_ION) -> GaussianPacket1D:
        return GaussianPacket1D(m_ion, self.P0, self.dP)


@dataclass(frozen=True)
class SuperpositionState:
    kind: str
    components: tuple = ()
    packet: Optional[PacketSpec] = None
    label: str = ""

    def __post_init__(self):
        if self.kind == DISCRETE:
            object.__setattr__(self, "components", tuple(self.components))
            if self.components:
                norm = sum(abs(c.coeff) ** 2 for c in self.components)
                if abs(norm - 1.0) > NORM_TOLERANCE:
                    raise DomainError(f"coefficients have norm {norm:.15g}, expected 1")
        elif self.kind == PACKET:
            if self.packet is None:
                raise DomainError("packet state needs a PacketSpec")
        else:
            raise DomainError(f"unknown state kind {self.kind!r}")

    @property
    def norm(self) -> float:
        if self.kind == PACKET:
            return 1.0
        return float(sum(abs(c.coeff) ** 2 for c in self.components))

    def shells(self, tolerance: float = 1e-9):
        return enumerate_shells(self.components, tolerance)

    def with_global_phase(self, phase: float) -> "SuperpositionState":
        f = complex(math.cos(phase), math.sin(phase))
        if self.kind == PACKET:
            coeffs = {nu: c * f for nu, c in self.packet.nu_coeffs.items()}
            spec = PacketSpec(coeffs, self.packet.p0, self.packet.dp, self.packet.P0, self.packet.dP, self.packet.tau_d)
            return SuperpositionState(PACKET, packet=spec, label=self.label)
        comps = [ShellComponent(c.nu, c.k, c.K, c.coeff * f, c.E_nu) for c in self.components]
        return SuperpositionState(DISCRETE, tuple(comps), label=self.label)


def discrete_state(components: Sequence[ShellComponent], label: str = "") -> SuperpositionState:
    return SuperpositionState(DISCRETE, tuple(components), label=label)


def build_two_state(
    nu1: int,
    nu2: int,
    p1: float = 4.0,
    P1: float = 0.0,
    phi: float = 0.0,
    C1: float = math.sqrt(0.5),
    C2: float = math.sqrt(0.5),
    model: Optional[MolecularModel] = None,
) -> SuperpositionState:
    """``C1 |nu1, p1, P1> + C2 e^{i phi} |nu2, p2, P2>`` on one shell.

    ``(p2, P2)`` follow from total energy and momentum conservation.  Equal
    levels collapse to a single renormalized component.
    """
    model = model or MolecularModel()
    if abs(C1 * C1 + C2 * C2 - 1.0) > 1e-9:
        raise DomainError(f"C1^2 + C2^2 = {C1 * C1 + C2 * C2:.12g}, expected 1")
    E1, E2 = model.energy(nu1), model.energy(nu2)
    first = LabState(p1, P1, nu1, E1)
    second = solve_entangled_partner(first, nu2, E2)
    k1, K = lab_to_cm(first.p, first.P)
    k2, _ = lab_to_cm(second.p, second.P)
    c2 = C2 * complex(math.cos(phi), math.sin(phi))
    if nu1 == nu2:
        c = C1 + c2
        if abs(c) < 1e-14:
            raise DegenerateInputError("components cancel exactly")
        comps = (ShellComponent(nu1, k1, K, c / abs(c), E1),)
    else:
        comps = (ShellComponent(nu1, k1, K, complex(C1), E1), ShellComponent(nu2, k2, K, c2, E2))
    return SuperpositionState(DISCRETE, comps, label=f"two-state nu={nu1},{nu2} phi={phi:.6g}")


def envelope_coefficients(center_nu: float, width_nu: float, n_levels: int, alternate_sign: bool) -> np.ndarray:
    if not (width_nu >= 0 and math.isfinite(center_nu)):
        raise DomainError("envelope width must be non-negative")
    nu = np.arange(n_levels)
    if width_nu == 0:
        c = (nu == round(center_nu)).astype(float)
    else:
        c = np.exp(-(((nu - center_nu) / width_nu) ** 2))
    if alternate_sign:
        c = c * (-1.0) ** nu
    return c


def build_envelope_state(
    center_nu: float,
    width_nu: float,
    alternate_sign: bool = False,
    k0: float = 4.0,
    K: float = 0.0,
    model: Optional[MolecularModel] = None,
    levels: Optional[Sequence[int]] = None,
) -> SuperpositionState:
    """Gaussian envelope over vibrational levels, all on the shell of ``(nu=0, k0, K)``."""
    model = model or MolecularModel()
    n = len(model.levels)
    coeffs = envelope_coefficients(center_nu, width_nu, n, alternate_sign)
    use = range(n) if levels is None else levels
    e_tot = 0.5 * k0 * k0 / M_REL + model.energy(0)
    comps, dropped = [], []
    for nu in use:
        if coeffs[nu] == 0:
            continue
        arg = 2.0 * M_REL * (e_tot - model.energy(nu))
        if arg < 0:
            dropped.append(nu)
            continue
        comps.append(ShellComponent(nu, math.copysign(math.sqrt(arg), k0), K, complex(coeffs[nu]), model.energy(nu)))
    if dropped:
        warnings.warn(f"levels {dropped} are kinematically closed and were dropped", stacklevel=2)
    if not comps:
        raise InfeasibleSuperpositionError("no envelope component is kinematically open")
    norm = math.sqrt(sum(abs(c.coeff) ** 2 for c in comps))
    comps = [ShellComponent(c.nu, c.k, c.K, c.coeff / norm, c.E_nu) for c in comps]
    return SuperpositionState(DISCRETE, tuple(comps), label=f"envelope nu0={center_nu} w={width_nu}")


def psi_max(model: Optional[MolecularModel] = None, k0: float = 4.0) -> SuperpositionState:
    return build_envelope_state(18, 1.8, True, k0, model=model)


def psi_min(model: Optional[MolecularModel] = None, k0: float = 4.0) -> SuperpositionState:
    return build_envelope_state(7, 6.0, False, k0, model=model)


def build_packet_state(
    nu_coeffs: Optional[Mapping[int, complex]] = None,
    p0: float = 4.0,
    dp: float = 0.01,
    P0: float = 0.0,
    dP: float = 1.0,
    tau_d: float = 0.0,
    phi: float = 0.0,
) -> SuperpositionState:
    """Internal superposition times Gaussian electron and ion packets.

    The default internal state is ``(|0> + e^{i phi} |1>) / sqrt(2)``.
    """
    if nu_coeffs is None:
        s = math.sqrt(0.5)
        nu_coeffs = {0: complex(s), 1: s * complex(math.cos(phi), math.sin(phi))}
    spec = PacketSpec(nu_coeffs, p0, dp, P0, dP, tau_d)
    return SuperpositionState(PACKET, packet=spec, label=f"packet dp={dp:g} tau_d={tau_d:g}")


def build_product_state(
    nu1: int = 0,
    nu2: int = 1,
    p1: float = 4.0,
    P1: float = 0.0,
    phases: tuple = (0.0, 0.0, 0.0),
    model: Optional[MolecularModel] = None,
) -> SuperpositionState:
    """Non-entangled ``(levels) x (ion momenta) x (electron momenta)`` product, 8 terms.

    The second ion and electron momenta are those of the entangled partner,
    so exactly the two entangled terms share a shell.
    """
    model = model or MolecularModel()
    E1, E2 = model.energy(nu1), model.energy(nu2)
    partner = solve_entangled_partner(LabState(p1, P1, nu1, E1), nu2, E2)
    s = math.sqrt(0.5)
    phase = [complex(math.cos(a), math.sin(a)) for a in phases]
    levels = [(nu1, E1, s), (nu2, E2, s * phase[0])]
    ions = [(P1, s), (partner.P, s * phase[1])]
    elecs = [(p1, s), (partner.p, s * phase[2])]
    comps = []
    for nu, E, cn in levels:
        for P, cP in ions:
            for p, cp in elecs:
                k, K = lab_to_cm(p, P)
                comps.append(ShellComponent(nu, k, K, cn * cP * cp, E))
    return SuperpositionState(DISCRETE, tuple(comps), label="product 8-term")


@dataclass(frozen=True, eq=False)
class DensityMap:
    R: np.ndarray
    x: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.shape != (self.R.size, self.x.size):
            raise ValueError("values must have shape (len(R), len(x))")
        if np.any(self.values < 0) or not np.all(np.isfinite(self.values)):
            raise ValueError("density must be finite and non-negative")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["R", "x", "P"])
            for i, r in enumerate(self.R):
                for j, x in enumerate(self.x):
                    w.writerow([f"{r:.12g}", f"{x:.12g}", f"{self.values[i, j]:.12g}"])

    def to_json(self, path) -> None:
        doc = {
            "R": self.R.tolist(),
            "x": self.x.tolist(),
            "P": self.values.tolist(),
            "meta": self.meta,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


def _bound_on(model: MolecularModel, nu: int, R: np.ndarray) -> np.ndarray:
    return morse_wavefunction(nu, R, model.params)


def density_map(
    state: SuperpositionState,
    R_window=(0.5, 14.0),
    x_window=(-20.0, 20.0),
    n_R: int = 200,
    n_x: int = 201,
    t: float = 0.0,
    model: Optional[MolecularModel] = None,
) -> DensityMap:
    """``P(R, x) = |sum_n C_n chi_n(R) e^{i k_n x} / sqrt(2 pi)|^2``.

    For packet states the internal and translational parts factor, giving
    ``|sum_nu c_nu chi_nu(R) e^{-i E_nu t}|^2`` times the density of the
    electron-ion separation at time ``t``.
    """
    model = model or MolecularModel()
    R = np.linspace(*R_window, n_R)
    x = np.linspace(*x_window, n_x)
    if state.kind == DISCRETE:
        amp = np.zeros((n_R, n_x), dtype=complex)
        for c in state.components:
            amp += c.coeff * np.outer(_bound_on(model, c.nu, R), np.exp(1j * c.k * x))
        values = np.abs(amp) ** 2 / (2.0 * math.pi)
    else:
        spec = state.packet
        psi = np.zeros(n_R, dtype=complex)
        for nu, c in spec.nu_coeffs.items():
            psi += c * np.exp(-1j * model.energy(nu) * t) * _bound_on(model, nu, R)
        e, ion = spec.electron(), spec.ion()
        var = e.width2(t) + ion.width2(t)
        d = x - (e.center(t) - ion.center(t))
        rho = np.exp(-0.5 * d * d / var) / np.sqrt(2 * math.pi * var)
        values = np.outer(np.abs(psi) ** 2, rho)
    return DensityMap(R, x, values, {"label": state.label, "t": t})


def contact_slice(state: SuperpositionState, model: Optional[MolecularModel] = None):
    """Internal wavefunction at ``x = 0`` and its ``<R>``.

    Returns ``(R, psi, mean_R)`` with ``psi = sum_n C_n chi_n(R)`` on the model grid.
    """
    model = model or MolecularModel()
    if state.kind != DISCRETE:
        raise DomainError("contact slice needs a discrete state")
    r = model.grid.r
    psi = np.zeros(r.size, dtype=complex)
    for c in state.components:
        psi += c.coeff * model.level(c.nu).chi
    dens = np.abs(psi) ** 2
    norm = float(integrate(dens, model.grid.dr))
    if norm < 1e-14:
        raise DegenerateInputError("slice at x = 0 vanishes")
    mean = float(integrate(r * dens, model.grid.dr)) / norm
    return r, psi, mean
