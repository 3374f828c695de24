"""Physical constants in atomic units (hbar = m_e = e = 1)."""

PROTON_MASS = 1836.152672
"""Proton mass in electron masses."""

AU_TIME_FS = 0.024188843265857
"""One atomic unit of time in femtoseconds."""


def ion_mass(m_p: float = PROTON_MASS) -> float:
    """Mass of the H2+ ion, two protons (bound-electron mass neglected)."""
    return 2.0 * m_p


def relative_mass(m_p: float = PROTON_MASS) -> float:
    """Reduced mass of the electron / H2+ pair."""
    m_i = ion_mass(m_p)
    return m_i / (m_i + 1.0)


def au_to_fs(t):
    return t * AU_TIME_FS


def fs_to_au(t):
    return t / AU_TIME_FS
