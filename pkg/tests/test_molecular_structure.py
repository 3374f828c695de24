import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from h2scatter.errors import ConfigurationError, DomainError, InvariantViolation
from h2scatter.molecular_structure import (
    BoundLevel,
    MolecularModel,
    PotentialParams,
    bound_expectation_R,
    morse_energy,
    morse_levels,
    morse_wavefunction,
    sigma_g_potential,
    sigma_u_potential,
    vibrational_period,
)
from h2scatter.numerov import shoot_bound_levels
from h2scatter.radial import RadialFunction, RadialGrid

P = PotentialParams()


def test_potential_minimum_and_asymptote():
    assert sigma_g_potential(P.R_e) == pytest.approx(-P.D, abs=1e-15)
    assert abs(sigma_g_potential(200.0)) < 1e-12
    assert sigma_u_potential(P.R_e) == pytest.approx(1.5 * P.D)


def test_sigma_u_is_repulsive():
    r = np.linspace(0.3, 30, 500)
    assert np.all(np.diff(sigma_u_potential(r)) < 0)
    assert np.all(sigma_u_potential(r) > 0)


@pytest.mark.parametrize("bad", [0.0, -1.0, np.nan])
def test_potential_domain(bad):
    with pytest.raises(DomainError):
        sigma_g_potential(bad)
    with pytest.raises(DomainError):
        sigma_u_potential(bad)


def test_invalid_params():
    with pytest.raises(ConfigurationError):
        PotentialParams(D=-0.1)
    with pytest.raises(ConfigurationError):
        morse_levels(PotentialParams(D=1e-6))


def test_reduced_mass_is_half_proton():
    assert P.mu == P.m_p / 2


def test_level_count_and_anchors():
    levels = morse_levels()
    assert len(levels) == 19
    assert levels[0].energy == pytest.approx(-0.0973, abs=1e-4)
    assert levels[1].energy == pytest.approx(-0.0871, abs=1e-4)
    assert all(lev.energy < 0 for lev in levels)
    assert vibrational_period(P) * 0.024188843 == pytest.approx(14.9, abs=0.1)


def test_harmonic_limit():
    # deep, stiff well: low levels approach omega (nu + 1/2) - D
    deep = PotentialParams(D=50.0, alpha=0.3)
    e = morse_energy([0, 1], deep)
    assert e[1] - e[0] == pytest.approx(deep.omega, rel=1e-3)


def test_shooting_oracle_matches_closed_form():
    # independent Numerov shooting on an extended grid
    r = np.arange(0.3, 60.0, 0.005)
    nodes = np.arange(19)
    e = shoot_bound_levels(lambda x: sigma_g_potential(x, P), r, P.mu, nodes, -P.D, 0.0)
    assert np.max(np.abs(e - morse_energy(nodes, P))) < 1e-8


@pytest.mark.parametrize("nu", [0, 1, 7, 18])
def test_wavefunction_norm(nu):
    lev = morse_levels()[nu]
    assert lev.wavefunction.norm2() == pytest.approx(1.0, abs=1e-6)


def test_orthogonality(model):
    chi = np.array([lev.chi for lev in model.levels])
    from h2scatter.radial import simpson_weights

    S = (chi * simpson_weights(model.grid.n, model.grid.dr)) @ chi.T
    assert np.max(np.abs(S - np.eye(len(chi)))) < 1e-6


def test_phase_convention_positive_inner_tail():
    r = np.array([0.8])
    for nu in range(19):
        assert morse_wavefunction(nu, r)[0] > 0


@pytest.mark.parametrize("nu", [0, 3, 10, 18])
def test_bound_ode_residual(nu):
    # 5-point differences on a fine resample of the closed form
    h = 0.0025
    r = np.arange(0.5, 45.0, h)
    chi = morse_wavefunction(nu, r)
    E = morse_energy(nu)
    d2 = (-chi[4:] + 16 * chi[3:-1] - 30 * chi[2:-2] + 16 * chi[1:-3] - chi[:-4]) / (12 * h * h)
    res = -d2 / (2 * P.mu) + (sigma_g_potential(r[2:-2]) - E) * chi[2:-2]
    rel = np.linalg.norm(res) / (abs(E) * np.linalg.norm(chi[2:-2]))
    assert rel < 1e-4


def test_nonbound_level_rejected():
    with pytest.raises(DomainError):
        morse_wavefunction(19, np.array([2.0]))
    with pytest.raises(DomainError):
        MolecularModel().level(19)


def test_expectation_requires_normalized_level():
    grid = RadialGrid()
    chi = 2.0 * morse_wavefunction(0, grid.r)
    lev = BoundLevel(0, morse_energy(0), RadialFunction(grid, chi, morse_energy(0)))
    with pytest.raises(InvariantViolation):
        bound_expectation_R(lev)


def test_mean_R_increases_with_nu(model):
    means = [bound_expectation_R(lev) for lev in model.levels]
    assert np.all(np.diff(means) > 0)


@settings(max_examples=25, deadline=None)
@given(
    D=st.floats(0.05, 0.3),
    alpha=st.floats(0.5, 1.2),
    nu=st.integers(0, 6),
)
def test_energy_below_dissociation_and_increasing(D, alpha, nu):
    p = PotentialParams(D=D, alpha=alpha)
    if nu + 1 >= p.n_levels:
        return
    e0, e1 = morse_energy([nu, nu + 1], p)
    assert -D < e0 < e1 < 0
