"""``scatter`` command line: run scenarios and write CSV/JSON datasets.

Exit codes: 0 success, 1 configuration error, 2 numerical non-convergence,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .collision_timing import collision_probability, duration_sweep, packet_pair
from .constants import au_to_fs
from .config import SCENARIOS, ScenarioConfig, load_config
from .continuum_states import solve_continuum
from .cross_sections import (
    CrossSectionEngine,
    EngineSettings,
    control_depth,
    phi_scan,
    single_state_sigma,
    thermal_sigma,
)
from .errors import (
    ConfigurationError,
    ConvergenceWarning,
    DegenerateInputError,
    DomainError,
    GridTooSmallError,
    InfeasibleSuperpositionError,
    InvariantViolation,
    NoCollisionError,
    ParameterRangeError,
)
from .kinematics_shells import lab_to_cm, outgoing_momentum
from .molecular_structure import MolecularModel, PotentialParams, bound_expectation_R, vibrational_period
from .radial import RadialGrid
from .superposition_states import (
    build_envelope_state,
    build_packet_state,
    build_two_state,
    contact_slice,
    density_map,
    psi_max,
    psi_min,
)

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3

SMOKE_SETTINGS = {"n_E": 160, "n_angle": 16, "packet_nodes": 6}
SMOKE_TARGETS = (0.87, 14.9)


class NonConvergence(Exception):
    pass


def fmt(x) -> str:
    return f"{x:.12g}"


class Writer:
    """Writes tables in the chosen format and records checksums."""

    def __init__(self, outdir: Path, fmt_: str):
        self.outdir = outdir
        self.format = fmt_
        self.files: list[dict] = []
        outdir.mkdir(parents=True, exist_ok=True)

    def table(self, stem: str, header: Sequence[str], rows: Sequence[Sequence]) -> Path:
        if self.format == "csv":
            path = self.outdir / f"{stem}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(header)
                for row in rows:
                    w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
        else:
            path = self.outdir / f"{stem}.json"
            cols = {h: [_plain(r[i]) for r in rows] for i, h in enumerate(header)}
            path.write_text(json.dumps(cols, indent=1) + "\n")
        self._record(path)
        return path

    def _record(self, path: Path) -> None:
        data = path.read_bytes()
        self.files.append({"file": path.name, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()})

    def manifest(self, cfg: ScenarioConfig, meta: dict) -> Path:
        doc = {
            "package_version": __version__,
            "scenario": cfg.scenario,
            "config": cfg.as_dict(),
            "convergence": meta,
            "files": sorted(self.files, key=lambda f: f["file"]),
        }
        path = self.outdir / "manifest.json"
        path.write_text(json.dumps(doc, indent=1, sort_keys=True, default=_plain) + "\n")
        return path


def _plain(x):
    if isinstance(x, (np.floating, float)):
        return float(fmt(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (str, int, bool, list, dict, type(None))):
        return x
    return str(x)


def build_model(cfg: ScenarioConfig) -> MolecularModel:
    p = cfg.section("potential")
    g = cfg.section("grid")
    try:
        return MolecularModel(PotentialParams(p["D"], p["alpha"], p["R_e"], p["m_p"]), RadialGrid(g["r_min"], g["r_max"], g["dr"]))
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from None


def build_engine(cfg: ScenarioConfig, model: MolecularModel, threads: int, smoke: bool = False) -> CrossSectionEngine:
    e = cfg.section("engine")
    kwargs = dict(E_max=e["E_max"], n_E=e["n_E"], n_angle=e["n_angle"], L_max=e["L_max"], L_cap=e["L_cap"], packet_nodes=e["packet_nodes"])
    if smoke:
        kwargs.update(SMOKE_SETTINGS)
    return CrossSectionEngine(model, EngineSettings(**kwargs), threads=threads)


def two_state_builder(cfg: ScenarioConfig, model: MolecularModel):
    s = cfg.section("state")
    return lambda phi: build_two_state(s["nu1"], s["nu2"], s["p1"], s["P1"], phi, s["C1"], s["C2"], model)


def phi_grid(n: int) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


# scenarios


def run_bound(cfg, model, w: Writer, threads):
    rows = []
    for lev in model.levels:
        rows.append([lev.nu, lev.energy, bound_expectation_R(lev, tol=1e-4)])
    w.table("bound_levels", ["nu", "E_hartree", "mean_R_bohr"], rows)
    return {"n_levels": len(rows), "tau_vib_fs": au_to_fs(vibrational_period(model.params))}


def run_continuum(cfg, model, w: Writer, threads):
    rows = []
    for L in cfg["continuum.L"]:
        for E in cfg["continuum.E"]:
            st = solve_continuum(E, L, model.sigma_u, model.params.mu, model.grid)
            rows.append([L, E, st.phase_shift, st.asymptotic_k])
    w.table("continuum_phases", ["L", "E", "delta", "k"], rows)
    return {}


def run_fig1(cfg, model, w: Writer, threads):
    eng = build_engine(cfg, model, threads)
    builder = two_state_builder(cfg, model)
    phis = phi_grid(cfg["scan.n_phi"])
    scan = phi_scan(builder, phis, eng)
    comps = builder(0.0).components
    c1, c2 = comps[0], comps[-1]
    single1, s1 = single_state_sigma(c1.nu, c1.k, eng)
    single2, s2 = single_state_sigma(c2.nu, c2.k, eng)
    w.table(
        "fig1a_phi_scan",
        ["phi", "sigma", "sigma_single_1", "sigma_single_2"],
        [[p, s, s1, s2] for p, s in zip(scan.grid, scan.values)],
    )
    spec0, t0 = eng.spectrum(builder(0.0))
    specpi, tpi = eng.spectrum(builder(math.pi))
    rows = [
        [E, a, b, c, d]
        for E, a, b, c, d in zip(eng.energies, single1.values, single2.values, spec0.values, specpi.values)
    ]
    w.table("fig1bc_spectra", ["E", "dsigma_dE_single_1", "dsigma_dE_single_2", "dsigma_dE_phi0", "dsigma_dE_phipi"], rows)
    converged = all(c.meta["converged"] for c in (single1, single2, spec0, specpi))
    return {"fit": scan.meta["fit"], "control_depth": control_depth(scan), "partial_waves_converged": converged}


def run_fig2(cfg, model, w: Writer, threads):
    builder = two_state_builder(cfg, model)
    m = cfg.section("map")
    win = dict(R_window=(m["R_min"], m["R_max"]), x_window=(-m["x_half"], m["x_half"]), n_R=m["n_R"], n_x=m["n_x"], model=model)
    states = {"phi0": builder(0.0), "phipi": builder(math.pi), "psi_min": psi_min(model), "psi_max": psi_max(model)}
    rows = []
    for name, st in states.items():
        dm = density_map(st, **win)
        rr, xx = np.meshgrid(dm.R, dm.x, indexing="ij")
        w.table(f"fig2_map_{name}", ["R", "x", "P"], list(zip(rr.ravel(), xx.ravel(), dm.values.ravel())))
        rows.append([name, contact_slice(st, model)[2]])
    w.table("fig2_contact_R", ["state", "mean_R_x0"], rows)
    return {}


def run_fig3b(cfg, model, w: Writer, threads):
    eng = build_engine(cfg, model, threads)
    p = cfg.section("packet")
    builder = lambda phi: build_packet_state(None, p["p0"], p["dp"], p["P0"], p["dP"], p["tau_d"], phi)
    scan = phi_scan(builder, phi_grid(cfg["scan.n_phi"]), eng)
    w.table("fig3b_phi_scan", ["phi", "sigma"], list(zip(scan.grid, scan.values)))
    prof = collision_probability(*packet_pair(p["p0"], p["dp"], p["P0"], p["dP"], p["tau_d"]))
    w.table("fig3b_collision_profile", ["t", "Wc"], list(zip(prof.t, prof.W)))
    return {"control_depth": control_depth(scan), "fit": scan.meta["fit"], "dWc_fs": prof.duration_fs, "window_limited": prof.window_limited}


def run_fig3c(cfg, model, w: Writer, threads):
    smoke = cfg["sweep.smoke"]
    eng = build_engine(cfg, model, threads, smoke)
    p = cfg.section("packet")
    targets = SMOKE_TARGETS if smoke else cfg["sweep.targets"]
    n_phi = 4 if smoke else cfg["sweep.n_phi"]
    rows = []
    for method in cfg["sweep.methods"]:
        for pt in duration_sweep(method, targets, eng, p["p0"], p["dp"], p["P0"], p["dP"], n_phi):
            rows.append([pt.duration_fs, pt.depth, method, pt.parameter])
    w.table("fig3c_sweep", ["dWc", "depth", "method", "parameter"], rows)
    return {"smoke": smoke, "n_points": len(rows)}


def run_thermal(cfg, model, w: Writer, threads):
    eng = build_engine(cfg, model, threads)
    k, _ = lab_to_cm(cfg["state.p1"], cfg["state.P1"])
    n = min(cfg["thermal.levels"], len(model.levels))
    sig = [single_state_sigma(nu, k, eng)[1] for nu in range(n)]
    energies = [model.energy(nu) for nu in range(n)]
    w.table("thermal_single_states", ["nu", "E_hartree", "sigma"], [[nu, energies[nu], sig[nu]] for nu in range(n)])
    w.table("thermal_sigma", ["T_kelvin", "sigma"], [[T, thermal_sigma(T, energies, sig)] for T in cfg["thermal.temperatures"]])
    return {}


def run_custom(cfg, model, w: Writer, threads):
    c = cfg.section("custom")
    eng = build_engine(cfg, model, threads)
    state = build_envelope_state(c["center_nu"], c["width_nu"], c["alternate"], c["k0"], model=model)
    curve, total = eng.spectrum(state)
    w.table("custom_spectrum", ["E", "dsigma_dE"], list(zip(curve.grid, curve.values)))
    w.table("custom_components", ["nu", "k", "coeff_re", "coeff_im"], [[x.nu, x.k, x.coeff.real, x.coeff.imag] for x in state.components])
    return {"sigma": total, "mean_R_x0": contact_slice(state, model)[2], "partial_waves_converged": curve.meta["converged"]}


RUNNERS = {
    "bound": run_bound,
    "continuum": run_continuum,
    "fig1": run_fig1,
    "fig2": run_fig2,
    "fig3b": run_fig3b,
    "fig3c": run_fig3c,
    "thermal": run_thermal,
    "custom": run_custom,
}


def preflight(cfg: ScenarioConfig) -> MolecularModel:
    """Feasibility checks with no heavy computation."""
    model = build_model(cfg)
    n = len(model.levels)
    s = cfg.section("state")
    for key in ("nu1", "nu2"):
        if s[key] >= n:
            raise ConfigurationError(f"state.{key}={s[key]} is not bound ({n} levels)")
    if cfg.scenario in ("fig1", "fig2"):
        build_two_state(s["nu1"], s["nu2"], s["p1"], s["P1"], 0.0, s["C1"], s["C2"], model)
    if cfg.scenario == "custom":
        c = cfg.section("custom")
        build_envelope_state(c["center_nu"], c["width_nu"], c["alternate"], c["k0"], model=model)
    if cfg.scenario in ("fig1", "thermal"):
        k, _ = lab_to_cm(s["p1"], s["P1"])
        if outgoing_momentum(k, model.energy(0), 0.0) is None:
            raise InfeasibleSuperpositionError("dissociation channel closed at the incident momentum")
    return model


def _resolve_config(args) -> Optional[str]:
    return args.config or os.environ.get("SCATTER_CONFIG")


def _load(args) -> ScenarioConfig:
    overrides = list(args.set or [])
    if getattr(args, "output", None):
        overrides.append(f"output.dir={args.output}")
    if getattr(args, "format", None):
        overrides.append(f"output.format={args.format}")
    return load_config(_resolve_config(args), overrides, getattr(args, "scenario", None))


def cmd_run(args) -> int:
    cfg = _load(args)
    model = preflight(cfg)
    writer = Writer(Path(cfg["output.dir"]), cfg["output.format"])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        meta = RUNNERS[cfg.scenario](cfg, model, writer, args.threads)
    conv = [str(c.message) for c in caught if issubclass(c.category, ConvergenceWarning)]
    meta["convergence_warnings"] = conv
    writer.manifest(cfg, meta)
    for f in writer.files:
        print(f"wrote {writer.outdir / f['file']}")
    if conv or meta.get("partial_waves_converged") is False:
        raise NonConvergence("; ".join(conv) or "partial-wave sum not converged")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load(args)
    preflight(cfg)
    print("OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scatter", description="Coherently controlled e-H2+ dissociation datasets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", nargs="?", help="config file (default: $SCATTER_CONFIG)")
    common.add_argument("--scenario", choices=SCENARIOS)
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")

    run = sub.add_parser("run", parents=[common], help="run a scenario and write outputs")
    run.add_argument("-o", "--output", help="output directory")
    run.add_argument("--format", choices=("csv", "json"))
    run.add_argument("--threads", type=int, default=1, help="worker cap for table builds")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", parents=[common], help="check a config without computing")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, DegenerateInputError, InfeasibleSuperpositionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergence, GridTooSmallError, ParameterRangeError, InvariantViolation, NoCollisionError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
