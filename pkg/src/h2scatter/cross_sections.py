"""Dissociation cross sections for eigenstates, mixtures and superpositions.

For a shell of components ``n`` (level ``nu_n``, incident relative momentum
``k_n``) the proton-energy density is ``Re(C^H M(E) C)`` with the real
symmetric response

    M_nm(E) = (2 pi)^4 * 2 pi * sum_{L odd} (2L+1) int dcos(theta) R_n R_m / (k_n k_m) / k_f

where ``R_n = R(L, nu_n, E, kt_n)`` and ``k_f`` follows from energy
conservation.  Shells never interfere; their densities add.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .born_amplitudes import BornCalculator, RadialIntegralTable
from .errors import ConvergenceWarning, DegenerateInputError, DomainError, InvariantViolation
from .kinematics_shells import M_ION, M_REL, ShellComponent, cm_to_lab, lab_to_cm
from .molecular_structure import MolecularModel
from .radial import simpson_weights
from .superposition_states import DISCRETE, PACKET, SuperpositionState

PREFACTOR = (2.0 * math.pi) ** 4 * 2.0 * math.pi
"""``(2 pi)^4`` times the trivial azimuthal integral."""

BOLTZMANN_HARTREE = 3.166811563e-6
"""Boltzmann constant in hartree per kelvin."""


@dataclass(frozen=True)
class EngineSettings:
    """Quadrature settings.

    Energies sit on ``E = E_max u^2`` with ``u`` uniform on ``(0, 1]``.
    """

    E_max: float = 1.0
    n_E: int = 400
    n_angle: int = 32
    L_max: int = 9
    L_cap: int = 29
    L_tol: float = 0.01
    packet_nodes: int = 8
    packet_sigmas: float = 9.0
    packet_points: int = 6

    def __post_init__(self):
        if self.E_max <= 0 or self.n_E < 4 or self.n_angle < 2:
            raise DomainError("invalid engine settings")
        if self.L_max < 1 or self.L_max % 2 == 0:
            raise DomainError("L_max must be odd and >= 1")


@dataclass(frozen=True, eq=False)
class ShellResponse:
    nus: tuple
    ks: tuple
    E_tot: float
    energies: np.ndarray
    density: np.ndarray  # (n_E, N, N)
    integrated: np.ndarray  # (N, N)
    per_L: dict
    L_max: int
    converged: bool


@dataclass(frozen=True, eq=False)
class SpectrumCurve:
    """Tabulated curve: ``kind`` is ``"E"`` (dsigma/dE) or ``"phi"`` (sigma)."""

    grid: np.ndarray
    values: np.ndarray
    kind: str = "E"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise ValueError("grid and values must be 1-D of equal length")
        if g.size > 1 and np.any(np.diff(g) <= 0):
            raise ValueError("grid must be strictly increasing")
        scale = np.max(np.abs(v)) if v.size else 0.0
        if np.any(v < -1e-10 * scale):
            raise InvariantViolation("cross section density is negative")
        v = np.clip(v, 0.0, None)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def header(self) -> tuple:
        return ("E", "dsigma_dE") if self.kind == "E" else ("phi", "sigma")

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.header)
            for x, y in zip(self.grid, self.values):
                w.writerow([f"{x:.12g}", f"{y:.12g}"])

    def to_json(self, path) -> None:
        doc = {self.header[0]: self.grid.tolist(), self.header[1]: self.values.tolist(), "meta": self.meta}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1, default=str)


TableFactory = Callable[..., object]


class CrossSectionEngine:
    """Caches radial-integral tables per ``(nu, L)`` and responses per shell."""

    def __init__(
        self,
        model: Optional[MolecularModel] = None,
        settings: EngineSettings = EngineSettings(),
        table_factory: TableFactory = RadialIntegralTable,
        threads: int = 1,
    ):
        self.model = model or MolecularModel()
        self.settings = settings
        self.calc = BornCalculator(self.model)
        self.table_factory = table_factory
        self.threads = max(1, int(threads))
        n = settings.n_E
        self.u = np.arange(n + 1) / n
        self.energies = settings.E_max * self.u[1:] ** 2
        # Simpson in u of f(E) dE/du; the u = 0 sample vanishes
        w = simpson_weights(n + 1, 1.0 / n) * 2.0 * settings.E_max * self.u
        self.weights = w[1:]
        self._tables: dict = {}
        self._q_max = 0.0
        self._responses: dict = {}
        self.requested_L: set = set()
        gx, gw = np.polynomial.legendre.leggauss(settings.n_angle)
        self._gx = 0.5 * (gx + 1.0)
        self._gw = 0.5 * gw

    def integrate(self, density: np.ndarray, axis: int = 0) -> np.ndarray:
        """Integral over the engine energy grid."""
        return np.tensordot(self.weights, density, axes=([0], [axis]))

    def _ensure_tables(self, nus: Iterable[int], Ls: Iterable[int], q_needed: float) -> None:
        if q_needed > self._q_max:
            self._q_max = math.ceil(q_needed * 1.05 + 0.5)
            self._tables.clear()
        todo = [(nu, L) for nu in nus for L in Ls if (nu, L) not in self._tables]
        for _, L in todo:
            if L % 2 == 0:
                raise DomainError("only odd partial waves couple g to u")
            self.requested_L.add(L)

        def build(key):
            nu, L = key
            return key, self.table_factory(self.calc, nu, L, self.energies, q_max=self._q_max)

        if self.threads > 1 and len(todo) > 1:
            # continuum solves are cached in the calculator; prime them serially
            for L in sorted({L for _, L in todo}):
                self.calc.continuum(self.energies, L)
            with ThreadPoolExecutor(self.threads) as pool:
                built = list(pool.map(build, todo))
        else:
            built = [build(key) for key in todo]
        self._tables.update(built)

    def _angular_nodes(self, ks: np.ndarray, kf: np.ndarray):
        """Nodes in ``w = 1 - cos(theta)`` and weights for ``dcos(theta)``, per energy row.

        With ``a = min_n (k_n - k_f)`` and ``b = 2 k_ref k_f`` the map
        ``w = (a^2/b)(e^s - 1)`` makes ``kt^2`` of the closest component
        proportional to ``e^s``, flattening the forward peak.
        """
        gap = ks[None, :] - kf[:, None]
        j = np.argmin(gap, axis=1)
        a = gap[np.arange(kf.size), j]
        b = 2.0 * ks[j] * kf
        a2b = a * a / b
        s_max = np.log1p(2.0 / a2b)
        s = s_max[:, None] * self._gx[None, :]
        w = a2b[:, None] * np.expm1(s)
        wt = a2b[:, None] * np.exp(s) * s_max[:, None] * self._gw[None, :]
        return w, wt

    def shell_response(self, nus: Sequence[int], ks: Sequence[float]) -> ShellResponse:
        nus = tuple(int(n) for n in nus)
        ks = tuple(float(k) for k in ks)
        key = (nus, tuple(round(k, 13) for k in ks))
        if key in self._responses:
            return self._responses[key]
        st = self.settings
        E_nu = np.array([self.model.energy(n) for n in nus])
        k = np.abs(np.array(ks))
        e_tots = 0.5 * k * k / M_REL + E_nu
        E_tot = float(e_tots.mean())
        if np.ptp(e_tots) > 1e-8:
            raise DomainError("components do not share a total energy")
        E = self.energies
        open_ = E < E_tot
        kf = np.sqrt(2.0 * M_REL * np.clip(E_tot - E, 0.0, None))
        N = len(nus)
        density = np.zeros((E.size, N, N))
        per_L = {}
        if open_.any():
            Eo = np.where(open_)[0]
            w, wt = self._angular_nodes(k, kf[Eo])
            kt = np.sqrt((k[None, None, :] - kf[Eo, None, None]) ** 2 + 2.0 * k[None, None, :] * kf[Eo, None, None] * w[..., None])
            q_needed = float(k.max() + kf.max())
            L = 1
            L_top = st.L_max
            converged = False
            while True:
                self._ensure_tables(sorted(set(nus)), [L], q_needed)
                R = np.empty((Eo.size, w.shape[1], N))
                for i, nu in enumerate(nus):
                    kt_full = np.ones((E.size, w.shape[1]))
                    kt_full[Eo] = kt[..., i]
                    R[..., i] = self._tables[(nu, L)](kt_full)[Eo] / k[i]
                m_L = PREFACTOR * (2 * L + 1) * np.einsum("ej,ejn,ejm->enm", wt, R, R) / kf[Eo, None, None]
                density[Eo] += m_L
                full = np.zeros((E.size, N, N))
                full[Eo] = m_L
                per_L[L] = self.integrate(full)
                if L >= L_top:
                    total = sum(per_L.values())
                    diag = np.diag(total)
                    frac = np.max(np.diag(per_L[L]) / np.where(diag > 0, diag, 1.0))
                    if frac < st.L_tol or not np.any(diag > 0):
                        converged = True
                        break
                    if L_top + 2 > st.L_cap:
                        warnings.warn(
                            f"partial-wave sum not converged at L={L} (last term {frac:.2%})", ConvergenceWarning
                        )
                        break
                    L_top += 2
                L += 2
        else:
            L_top, converged = st.L_max, True
        resp = ShellResponse(nus, ks, E_tot, E, density, self.integrate(density), per_L, L_top, converged)
        self._responses[key] = resp
        return resp

    # discrete states

    def discrete_density(self, components: Sequence[ShellComponent]):
        """``dsigma/dE`` of one shell and its response."""
        resp = self.shell_response([c.nu for c in components], [c.k for c in components])
        c = np.array([comp.coeff for comp in components])
        dens = np.real(np.einsum("n,enm,m->e", c.conj(), resp.density, c))
        return dens, resp

    def spectrum(self, state: SuperpositionState):
        """``(SpectrumCurve, total)`` for any state."""
        if state.kind == PACKET:
            return packet_spectrum(state, self)
        if not state.components:
            raise DegenerateInputError("state has no components")
        dens = np.zeros(self.energies.size)
        meta = {"label": state.label, "shells": [], "converged": True}
        for shell in state.shells():
            d, resp = self.discrete_density(shell)
            dens += d
            meta["shells"].append({"nus": list(resp.nus), "L_max": resp.L_max, "E_tot": resp.E_tot})
            meta["converged"] &= resp.converged
        meta["L_max"] = max(s["L_max"] for s in meta["shells"])
        curve = SpectrumCurve(self.energies.copy(), dens, "E", meta)
        return curve, float(self.integrate(curve.values))


def single_state_sigma(nu: int, k_i: float, engine: CrossSectionEngine):
    """Spectrum and total for the eigenstate ``|nu, k_i>``."""
    comp = ShellComponent(nu, k_i, 0.0, 1.0 + 0j, engine.model.energy(nu))
    state = SuperpositionState(DISCRETE, (comp,), label=f"nu={nu} k={k_i:.6g}")
    return engine.spectrum(state)


def superposition_spectrum(state: SuperpositionState, engine: CrossSectionEngine):
    return engine.spectrum(state)


def incoherent_sigma(weights: Sequence[float], sigmas: Sequence[float]) -> float:
    """Weighted average ``sum F sigma / sum F`` of single-state cross sections."""
    F = np.asarray(weights, dtype=float)
    s = np.asarray(sigmas, dtype=float)
    if F.shape != s.shape:
        raise DomainError("weights and cross sections differ in length")
    if np.any(F < 0) or not np.any(F > 0):
        raise DomainError("weights must be non-negative and not all zero")
    return float(np.dot(F, s) / F.sum())


def boltzmann_weights(energies: Sequence[float], temperature: float) -> np.ndarray:
    """``e^{-E/kT} / Z``; ``T = 0`` puts all weight on the lowest level."""
    e = np.asarray(energies, dtype=float)
    if temperature < 0:
        raise DomainError("temperature must be non-negative")
    if temperature == 0:
        w = (e == e.min()).astype(float)
    else:
        w = np.exp(-(e - e.min()) / (BOLTZMANN_HARTREE * temperature))
    return w / w.sum()


def thermal_sigma(temperature: float, level_energies: Sequence[float], sigmas: Sequence[float]) -> float:
    return incoherent_sigma(boltzmann_weights(level_energies, temperature), sigmas)


def fit_cosine(phi: np.ndarray, sigma: np.ndarray) -> dict:
    """Least-squares ``A + B cos(phi + phi0)``; residual is ``max|res| / B``."""
    phi = np.asarray(phi, dtype=float)
    design = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    coef, *_ = np.linalg.lstsq(design, sigma, rcond=None)
    A, b1, b2 = coef
    B = math.hypot(b1, b2)
    res = sigma - design @ coef
    scale = np.max(np.abs(res))
    return {
        "A": float(A),
        "B": float(B),
        "phi0": float(-math.atan2(b2, b1)),
        "residual": float(scale / B) if B > 0 else (0.0 if scale == 0 else math.inf),
    }


def phi_scan(
    builder: Callable[[float], SuperpositionState], phi_grid: Sequence[float], engine: CrossSectionEngine
) -> SpectrumCurve:
    """``sigma(phi)`` over ``phi_grid`` with a cosine fit in the metadata."""
    phi = np.asarray(phi_grid, dtype=float)
    sig = np.array([engine.spectrum(builder(p))[1] for p in phi])
    return SpectrumCurve(phi, sig, "phi", {"fit": fit_cosine(phi, sig)})


def control_depth(curve) -> float:
    """``(max - min) / (max + min)`` of a sigma(phi) curve or array."""
    v = np.asarray(curve.values if isinstance(curve, SpectrumCurve) else curve, dtype=float)
    if v.size == 0:
        raise DegenerateInputError("empty curve")
    hi, lo = v.max(), v.min()
    if hi + lo <= 0:
        raise DegenerateInputError("curve has zero total")
    return float((hi - lo) / (hi + lo))


# packet states


@dataclass(frozen=True, eq=False)
class PacketQuadrature:
    """Shell-resolved weights of a product packet state.

    ``rho[i, n, m] = int dK a_n^* a_m`` on the uniform ``eps`` grid, where
    ``a_n = c_n g_e(p_n) g_I(P_n) sqrt(m_rel / kappa_n)`` is the amplitude per
    unit shell energy ``eps`` and centre-of-mass momentum ``K``.
    """

    nus: tuple
    eps: np.ndarray
    eps_weights: np.ndarray
    rho: np.ndarray
    norm: float


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    h = x[1] - x[0]
    w[:] = h
    w[0] = w[-1] = 0.5 * h
    return w


def packet_quadrature(state: SuperpositionState, settings: EngineSettings, model: MolecularModel, refine: int = 1):
    spec = state.packet
    elec, ion = spec.electron(), spec.ion(M_ION)
    nus = tuple(spec.nu_coeffs)
    c = np.array([spec.nu_coeffs[n] for n in nus])
    E_nu = np.array([model.energy(n) for n in nus])
    k0, K0 = lab_to_cm(spec.p0, spec.P0)
    sig_p, sig_P = spec.dp / math.sqrt(2.0), spec.dP / math.sqrt(2.0)
    sig_k = math.hypot(sig_p * M_ION / (M_ION + 1.0), sig_P / (M_ION + 1.0))
    sig_K = math.hypot(sig_p, sig_P)
    sig_e = abs(k0) * sig_k / M_REL
    centers = 0.5 * k0 * k0 / M_REL + E_nu
    ns = settings.packet_sigmas
    lo, hi = centers.min() - ns * sig_e, centers.max() + ns * sig_e
    lo = max(lo, E_nu.max() + 1e-12)
    # cross terms carry a chirp from the focus offset
    dk = abs(np.ptp(np.sqrt(2.0 * M_REL * np.clip(centers.mean() - E_nu, 0, None)))) if len(nus) > 1 else 0.0
    chirp_rate = dk * abs(spec.tau_d) / max(abs(k0), 1e-12)
    h = sig_e / settings.packet_points
    if chirp_rate > 0:
        h = min(h, 2.0 * math.pi / chirp_rate / 12.0)
    h /= refine
    n_eps = int(math.ceil((hi - lo) / h)) + 1
    eps = np.linspace(lo, hi, n_eps)
    K = np.linspace(K0 - ns * sig_K, K0 + ns * sig_K, int(2 * ns * settings.packet_points * refine) + 1)
    wK = _trapezoid_weights(K)
    amps = []
    for i, nu in enumerate(nus):
        arg = 2.0 * M_REL * (eps - E_nu[i])
        kap = np.sqrt(np.clip(arg, 0.0, None))
        p, P = cm_to_lab(kap[:, None], K[None, :])
        a = c[i] * elec.amplitude(p) * ion.amplitude(P) * np.sqrt(M_REL / np.where(kap > 0, kap, np.inf))[:, None]
        amps.append(np.where(arg[:, None] > 0, a, 0.0))
    amps = np.array(amps)  # (N, n_eps, n_K)
    rho = np.einsum("neK,meK,K->enm", amps.conj(), amps, wK)
    w_eps = _trapezoid_weights(eps)
    norm = float(np.real(np.einsum("e,enn->", w_eps, rho)))
    return PacketQuadrature(nus, eps, w_eps, rho, norm)


def packet_spectrum(state: SuperpositionState, engine: CrossSectionEngine, refine: int = 1):
    """Spectrum of a product packet: shells are labelled by ``(eps, K)``.

    The shell response depends on ``eps`` only; it is evaluated at
    Gauss-Legendre nodes across the energy window and interpolated, while
    the packet weights use a dense uniform grid.
    """
    model = engine.model
    st = engine.settings
    quad = packet_quadrature(state, st, model, refine)
    nus = quad.nus
    E_nu = np.array([model.energy(n) for n in nus])
    x, _ = np.polynomial.legendre.leggauss(st.packet_nodes)
    lo, hi = quad.eps[0], quad.eps[-1]
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
    responses = []
    for e in nodes:
        ks = np.sqrt(2.0 * M_REL * (e - E_nu))
        responses.append(engine.shell_response(nus, ks).density)
    responses = np.array(responses)  # (n_nodes, n_E, N, N)
    basis = BarycentricInterpolator(nodes, np.eye(nodes.size))(quad.eps)  # (n_eps, n_nodes)
    w_node = np.einsum("e,ej,enm->jnm", quad.eps_weights, basis, quad.rho)
    dens = np.real(np.einsum("jnm,jEnm->E", w_node, responses))
    meta = {"label": state.label, "packet_norm": quad.norm, "n_eps": quad.eps.size, "eps_nodes": nodes.tolist()}
    curve = SpectrumCurve(engine.energies.copy(), dens, "E", meta)
    return curve, float(engine.integrate(curve.values))
