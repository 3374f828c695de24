"""Scenario configuration: flat ``dotted.key = value`` files.

Grammar, one setting per line::

    # comment
    scenario = fig1
    engine.n_E = 400
    sweep.targets = 0.87, 5, 14.9

Blank lines and ``#`` comments are ignored, keys are case sensitive and
unknown keys are rejected.  Lists are comma separated.  The molecular keys
also accept the spellings in ``ALIASES`` (``morse.D``, ``grid.dR``, ...).  ``--set key=value``
overrides use the same syntax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from .errors import ConfigurationError

SCENARIOS = ("bound", "continuum", "fig1", "fig2", "fig3b", "fig3c", "thermal", "custom")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _ints(text: str) -> tuple:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _strs(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


# key -> (parser, default, constraint)
POSITIVE = "positive"
NONNEG = "nonnegative"

SCHEMA: dict[str, tuple] = {
    "scenario": (str, "fig1", None),
    "output.dir": (str, "out", None),
    "output.format": (str, "csv", None),
    "potential.D": (float, 0.1026, POSITIVE),
    "potential.alpha": (float, 0.72, POSITIVE),
    "potential.R_e": (float, 2.0, POSITIVE),
    "potential.m_p": (float, 1836.152672, POSITIVE),
    "grid.r_min": (float, 0.2, POSITIVE),
    "grid.r_max": (float, 40.0, POSITIVE),
    "grid.dr": (float, 0.01, POSITIVE),
    "engine.E_max": (float, 1.0, POSITIVE),
    "engine.n_E": (int, 400, POSITIVE),
    "engine.n_angle": (int, 32, POSITIVE),
    "engine.L_max": (int, 9, POSITIVE),
    "engine.L_cap": (int, 29, POSITIVE),
    "engine.packet_nodes": (int, 8, POSITIVE),
    "state.nu1": (int, 0, NONNEG),
    "state.nu2": (int, 1, NONNEG),
    "state.p1": (float, 4.0, None),
    "state.P1": (float, 0.0, None),
    "state.C1": (float, math.sqrt(0.5), None),
    "state.C2": (float, math.sqrt(0.5), None),
    "scan.n_phi": (int, 24, POSITIVE),
    "packet.p0": (float, 4.0, None),
    "packet.dp": (float, 0.01, POSITIVE),
    "packet.P0": (float, 0.0, None),
    "packet.dP": (float, 1.0, POSITIVE),
    "packet.tau_d": (float, 0.0, None),
    "continuum.L": (_ints, (1, 3, 5), None),
    "continuum.E": (_floats, (0.05, 0.1, 0.2, 0.4), None),
    "thermal.temperatures": (_floats, (0.0, 300.0, 1000.0, 3000.0, 10000.0), None),
    "thermal.levels": (int, 19, POSITIVE),
    "sweep.methods": (_strs, ("shrink_dp", "offset_focus"), None),
    "sweep.targets": (_floats, (0.87, 2.0, 5.0, 10.0, 14.9, 20.0), None),
    "sweep.n_phi": (int, 8, POSITIVE),
    "sweep.smoke": (_bool, False, None),
    "custom.center_nu": (float, 18.0, NONNEG),
    "custom.width_nu": (float, 1.8, NONNEG),
    "custom.alternate": (_bool, True, None),
    "custom.k0": (float, 4.0, POSITIVE),
    "map.R_min": (float, 0.5, POSITIVE),
    "map.R_max": (float, 14.0, POSITIVE),
    "map.x_half": (float, 20.0, POSITIVE),
    "map.n_R": (int, 141, POSITIVE),
    "map.n_x": (int, 161, POSITIVE),
}

# alternative spellings of the molecular keys
ALIASES = {
    "morse.D": "potential.D",
    "morse.alpha": "potential.alpha",
    "morse.Re": "potential.R_e",
    "masses.mp": "potential.m_p",
    "grid.Rmin": "grid.r_min",
    "grid.Rmax": "grid.r_max",
    "grid.dR": "grid.dr",
}


@dataclass(frozen=True)
class ScenarioConfig:
    values: dict = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def scenario(self) -> str:
        return self.values["scenario"]

    def section(self, prefix: str) -> dict:
        p = prefix + "."
        return {k[len(p) :]: v for k, v in self.values.items() if k.startswith(p)}

    def as_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in sorted(self.values.items())}


def parse_assignment(line: str, where: str = "") -> tuple[str, str]:
    if "=" not in line:
        raise ConfigurationError(f"{where}expected 'key = value', got {line!r}")
    key, value = line.split("=", 1)
    key = key.strip()
    return ALIASES.get(key, key), value.strip()


def _coerce(key: str, raw: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigurationError(f"unknown key {key!r}")
    parser, _, constraint = SCHEMA[key]
    if isinstance(raw, str):
        try:
            value = parser(raw)
        except ValueError as exc:
            raise ConfigurationError(f"{key}: {exc}") from None
    else:
        value = raw
    items = value if isinstance(value, tuple) else (value,)
    for v in items:
        if isinstance(v, float) and not math.isfinite(v):
            raise ConfigurationError(f"{key} must be finite")
        if constraint == POSITIVE and not v > 0:
            raise ConfigurationError(f"{key} must be positive, got {v!r}")
        if constraint == NONNEG and not v >= 0:
            raise ConfigurationError(f"{key} must be non-negative, got {v!r}")
    return value


def load_config(path: Optional[str | Path] = None, overrides: Iterable[str] = (), scenario: Optional[str] = None) -> ScenarioConfig:
    """Defaults, then the file, then ``--set`` overrides, then ``--scenario``."""
    values = {k: spec[1] for k, spec in SCHEMA.items()}
    if path is not None:
        text = Path(path).read_text()
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, raw = parse_assignment(line, f"{path}:{n}: ")
            values[key] = _coerce(key, raw)
    for item in overrides:
        key, raw = parse_assignment(item, "--set: ")
        values[key] = _coerce(key, raw)
    if scenario is not None:
        values["scenario"] = scenario
    cfg = ScenarioConfig(values)
    check(cfg)
    return cfg


def check(cfg: ScenarioConfig) -> None:
    """Cross-field checks that need no computation."""
    v = cfg.values
    if v["scenario"] not in SCENARIOS:
        raise ConfigurationError(f"scenario must be one of {', '.join(SCENARIOS)}; got {v['scenario']!r}")
    if v["output.format"] not in ("csv", "json"):
        raise ConfigurationError("output.format must be csv or json")
    if v["engine.L_max"] % 2 == 0:
        raise ConfigurationError("engine.L_max must be odd")
    if v["grid.r_max"] <= v["grid.r_min"] + 2 * v["grid.dr"]:
        raise ConfigurationError("grid.r_max must exceed grid.r_min by at least two steps")
    if abs(v["state.C1"] ** 2 + v["state.C2"] ** 2 - 1.0) > 1e-9:
        raise ConfigurationError("state.C1^2 + state.C2^2 must equal 1")
    for m in v["sweep.methods"]:
        if m not in ("shrink_dp", "offset_focus"):
            raise ConfigurationError(f"sweep.methods: unknown method {m!r}")
    if any(t <= 0 for t in v["sweep.targets"]):
        raise ConfigurationError("sweep.targets must be positive")
    if any(L < 0 for L in v["continuum.L"]) or any(E <= 0 for E in v["continuum.E"]):
        raise ConfigurationError("continuum.L must be >= 0 and continuum.E > 0")
    if v["map.R_max"] <= v["map.R_min"]:
        raise ConfigurationError("map.R_max must exceed map.R_min")
