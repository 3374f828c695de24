"""Collision probability ``W_c(t)`` of two free Gaussian packets and its duration.

``W_c`` is built from the same-position expectation
``O(t) = int rho_e(z, t) rho_I(z, t) dz``, which for Gaussians is the normal
density of the centre separation with variance ``s_e^2 + s_I^2``.  By default
``W_c`` is proportional to ``O``; ``squared=True`` uses ``O^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .constants import au_to_fs, fs_to_au
from .cross_sections import CrossSectionEngine, control_depth, phi_scan
from .errors import NoCollisionError, ParameterRangeError
from .kinematics_shells import M_ION
from .packets import GaussianPacket1D
from .radial import simpson_weights
from .superposition_states import build_packet_state

__all__ = [
    "GaussianPacket1D",
    "CollisionProfile",
    "SweepPoint",
    "propagate_density",
    "overlap",
    "collision_probability",
    "packet_pair",
    "collision_duration",
    "duration_sweep",
]

N_TIMES = 2049
WINDOW_DURATIONS = 20.0
DURATION_TOLERANCE = 0.02


@dataclass(frozen=True, eq=False)
class CollisionProfile:
    t: np.ndarray
    W: np.ndarray
    mean_t: float
    duration: float  # atomic time units
    squared: bool = False
    window_limited: bool = False

    @property
    def duration_fs(self) -> float:
        return au_to_fs(self.duration)


@dataclass(frozen=True)
class SweepPoint:
    method: str
    target_fs: float
    duration_fs: float
    parameter: float
    depth: float
    meta: dict = field(default_factory=dict, compare=False)


def propagate_density(packet: GaussianPacket1D, t: float):
    """Position density ``x -> rho(x, t)`` of the freely moving packet."""
    return lambda x: packet.density(x, t)


def overlap(elec: GaussianPacket1D, ion: GaussianPacket1D, t) -> np.ndarray:
    """``<delta(x - y)>`` for independent packets: a Gaussian in the centre separation."""
    v = elec.width2(t) + ion.width2(t)
    d = elec.center(t) - ion.center(t)
    return np.exp(-0.5 * d * d / v) / np.sqrt(2.0 * math.pi * v)


def _default_times(elec: GaussianPacket1D, ion: GaussianPacket1D) -> tuple[np.ndarray, bool]:
    v_rel = elec.velocity - ion.velocity
    if v_rel == 0:
        return np.linspace(-1e4, 1e4, N_TIMES), True
    t_c = -(elec.x0 - ion.x0) / v_rel
    sigma_t = math.sqrt(float(elec.width2(t_c) + ion.width2(t_c))) / abs(v_rel)
    half = 0.5 * WINDOW_DURATIONS * 2.0 * sigma_t
    return np.linspace(t_c - half, t_c + half, N_TIMES), False


def collision_probability(
    elec: GaussianPacket1D,
    ion: GaussianPacket1D,
    t_grid: Optional[Sequence[float]] = None,
    squared: bool = False,
) -> CollisionProfile:
    """Normalized ``W_c(t)`` on a uniform time grid and ``Delta W_c = 2 std(t)``."""
    if t_grid is None:
        t, limited = _default_times(elec, ion)
        # spreading can outrun the estimate; widen until the tails are negligible
        for _ in range(8):
            o = overlap(elec, ion, t)
            if max(o[0], o[-1]) <= 1e-12 * o.max() or limited:
                break
            mid, half = 0.5 * (t[0] + t[-1]), t[-1] - t[0]
            t = np.linspace(mid - half, mid + half, N_TIMES)
    else:
        t = np.asarray(t_grid, dtype=float)
        limited = False
    o = overlap(elec, ion, t)
    if o.max() < 1e-30:
        raise NoCollisionError("packets never overlap inside the time window")
    W = o * o if squared else o
    w = simpson_weights(t.size, t[1] - t[0])
    total = float(w @ W)
    if total < 1e-30:
        raise NoCollisionError("vanishing total overlap")
    W = W / total
    mean = float(w @ (t * W))
    var = float(w @ ((t - mean) ** 2 * W))
    limited = bool(limited or max(W[0], W[-1]) > 1e-3 * W.max())
    return CollisionProfile(t, W, mean, 2.0 * math.sqrt(max(var, 0.0)), squared, limited)


def packet_pair(p0=4.0, dp=0.01, P0=0.0, dP=1.0, tau_d=0.0, m_ion: float = M_ION):
    return GaussianPacket1D(1.0, p0, dp, tau_d), GaussianPacket1D(m_ion, P0, dP)


def collision_duration(p0=4.0, dp=0.01, P0=0.0, dP=1.0, tau_d=0.0, squared: bool = False) -> float:
    """``Delta W_c`` in femtoseconds."""
    return collision_probability(*packet_pair(p0, dp, P0, dP, tau_d), squared=squared).duration_fs


def _solve_parameter(method: str, target_fs: float, p0, dp, P0, dP, squared) -> float:
    if method == "shrink_dp":
        f = lambda ldp: collision_duration(p0, math.exp(ldp), P0, dP, 0.0, squared) - target_fs
        lo, hi = math.log(1e-7), math.log(1.0)
        if f(lo) < 0 or f(hi) > 0:
            raise ParameterRangeError(f"target {target_fs} fs not reachable by changing dp")
        return math.exp(brentq(f, lo, hi, xtol=1e-12, rtol=1e-10))
    if method == "offset_focus":
        f = lambda tau: collision_duration(p0, dp, P0, dP, tau, squared) - target_fs
        if f(0.0) > 0:
            raise ParameterRangeError(f"target {target_fs} fs is below the focused duration")
        hi = fs_to_au(target_fs)
        while f(hi) < 0:
            hi *= 2.0
            if hi > 1e14:
                raise ParameterRangeError(f"target {target_fs} fs not reachable by offsetting the focus")
        return brentq(f, 0.0, hi, xtol=1e-9, rtol=1e-10)
    raise ValueError(f"unknown sweep method {method!r}")


def duration_sweep(
    method: str,
    targets_fs: Sequence[float],
    engine: Optional[CrossSectionEngine] = None,
    p0: float = 4.0,
    dp: float = 0.01,
    P0: float = 0.0,
    dP: float = 1.0,
    n_phi: int = 8,
    squared: bool = False,
) -> list[SweepPoint]:
    """Control depth of the packet state at collision durations ``targets_fs``.

    ``shrink_dp`` narrows the electron momentum width; ``offset_focus``
    keeps ``dp`` and moves the electron focus away from the collision time.
    A target that the base packet already meets within 2% uses it unchanged.
    """
    engine = engine or CrossSectionEngine()
    phis = 2.0 * math.pi * np.arange(n_phi) / n_phi
    base = collision_duration(p0, dp, P0, dP, 0.0, squared)
    out = []
    for target in targets_fs:
        if abs(base / target - 1.0) <= DURATION_TOLERANCE:
            param = dp if method == "shrink_dp" else 0.0
        else:
            param = _solve_parameter(method, target, p0, dp, P0, dP, squared)
        pdp, tau = (param, 0.0) if method == "shrink_dp" else (dp, param)
        achieved = collision_duration(p0, pdp, P0, dP, tau, squared)
        if abs(achieved / target - 1.0) > DURATION_TOLERANCE:
            raise ParameterRangeError(f"reached {achieved:.4g} fs for target {target:.4g} fs")
        curve = phi_scan(lambda ph: build_packet_state(None, p0, pdp, P0, dP, tau, ph), phis, engine)
        out.append(
            SweepPoint(method, float(target), achieved, float(param), control_depth(curve), {"fit": curve.meta["fit"]})
        )
    return out
