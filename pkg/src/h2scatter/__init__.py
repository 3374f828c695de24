"""Coherently controlled electron-impact dissociation of H2+.

Bound Morse levels, energy-normalized continuum states, first-Born LCAO
amplitudes, on-shell kinematics, entangled and wave-packet initial states,
dissociation cross sections and collision timing.
"""

__version__ = "0.1.0"

from .molecular_structure import MolecularModel, PotentialParams, morse_levels
from .continuum_states import solve_continuum
from .born_amplitudes import lcao_norms, radial_integral, t_element
from .kinematics_shells import enumerate_shells, lab_to_cm, cm_to_lab, solve_entangled_partner
from .superposition_states import build_two_state, build_envelope_state, build_packet_state, contact_slice
from .cross_sections import CrossSectionEngine, EngineSettings, control_depth, phi_scan, single_state_sigma
from .collision_timing import collision_duration, collision_probability, duration_sweep

__all__ = [
    "MolecularModel",
    "PotentialParams",
    "morse_levels",
    "solve_continuum",
    "lcao_norms",
    "radial_integral",
    "t_element",
    "enumerate_shells",
    "lab_to_cm",
    "cm_to_lab",
    "solve_entangled_partner",
    "build_two_state",
    "build_envelope_state",
    "build_packet_state",
    "contact_slice",
    "CrossSectionEngine",
    "EngineSettings",
    "control_depth",
    "phi_scan",
    "single_state_sigma",
    "collision_duration",
    "collision_probability",
    "duration_sweep",
]
