import math

import numpy as np
import pytest

from h2scatter.continuum_states import (
    energy_normalization_check,
    free_overlap,
    ode_residual,
    solve_continuum,
    solve_continuum_batch,
)
from h2scatter.errors import DomainError, GridTooSmallError
from h2scatter.molecular_structure import PotentialParams, sigma_u_potential
from h2scatter.radial import RadialGrid, simpson_weights

P = PotentialParams()
MU = P.mu
FREE_GRID = RadialGrid(0.0, 40.0, 0.01)


def V(r):
    return sigma_u_potential(r, P)


def free(r):
    return np.zeros_like(r)


def test_free_s_wave_is_normalized_sine():
    E = 0.1
    s = solve_continuum(E, 0, free, MU, FREE_GRID)
    k = math.sqrt(2 * MU * E)
    ref = math.sqrt(2 * MU / (math.pi * k)) * np.sin(k * FREE_GRID.r)
    assert abs(s.phase_shift) < 1e-8
    assert np.max(np.abs(s.chi - ref)) < 1e-6 * np.max(np.abs(ref))


@pytest.mark.parametrize("L", [1, 3])
def test_free_partial_wave_phase_vanishes(L):
    s = solve_continuum(0.1, L, free, MU, FREE_GRID)
    assert abs(s.phase_shift) < 1e-4


def test_regular_at_origin_and_amplitude():
    s = solve_continuum(0.1, 1, V, MU)
    assert s.chi[0] == 0.0
    k = s.asymptotic_k
    tail = s.chi[-800:]
    amp = math.sqrt(2 * MU / (math.pi * k))
    # asymptotic envelope of the normalized state
    assert np.max(np.abs(tail)) == pytest.approx(amp, rel=1e-3)
    assert s.amplitude == pytest.approx(amp)


def test_two_matching_radii_agree():
    a = solve_continuum(0.1, 1, V, MU, match_radius=40.0)
    b = solve_continuum(0.1, 1, V, MU, match_radius=30.0)
    assert abs(a.phase_shift - b.phase_shift) < 1e-4


@pytest.mark.parametrize("L", [1, 3, 5])
def test_grid_halving_phase(L):
    a = solve_continuum(0.1, L, V, MU)
    b = solve_continuum(0.1, L, V, MU, RadialGrid().halved())
    assert abs(a.phase_shift - b.phase_shift) < 1e-5


def test_plain_numerov_is_coarser():
    # the phase-fitted scheme is the default because plain Numerov misses 1e-5
    a = solve_continuum(0.1, 1, V, MU, fitted=False)
    b = solve_continuum(0.1, 1, V, MU, RadialGrid().halved(), fitted=False)
    assert abs(a.phase_shift - b.phase_shift) > 1e-5


@pytest.mark.parametrize("E,L", [(0.02, 1), (0.1, 1), (0.2, 3), (0.2, 5)])
def test_ode_residual(E, L):
    s = solve_continuum(E, L, V, MU)
    assert ode_residual(s.chi, s.wavefunction.r, E, L, V, MU) < 1e-4


def test_phase_magnitude_decreases_with_L():
    deltas = [abs(solve_continuum(0.1, L, V, MU).phase_shift) for L in (1, 3, 5, 7, 9)]
    assert np.all(np.diff(deltas) < 0)


def test_repulsive_phase_negative():
    d, = solve_continuum_batch([0.1], 1, V, MU)[1]
    assert d < 0


def test_diagonal_growth_rate():
    E = 0.1
    k = math.sqrt(2 * MU * E)
    a = energy_normalization_check(E, E, 1, V, MU, RadialGrid(0.2, 40.0))
    b = energy_normalization_check(E, E, 1, V, MU, RadialGrid(0.2, 80.0))
    assert (b - a) / 40.0 == pytest.approx(MU / (math.pi * k), rel=1e-3)


def test_off_diagonal_bounded():
    diag = energy_normalization_check(0.1, 0.1, 1, V, MU)
    vals = [energy_normalization_check(0.1, 0.2, 1, V, MU, RadialGrid(0.2, r)) for r in (40.0, 60.0, 80.0)]
    assert max(abs(v) for v in vals) < 0.1 * diag
    # does not grow with the box
    assert abs(vals[-1]) < 2 * max(abs(v) for v in vals[:2])


def test_off_diagonal_growth_matches_asymptotic_sines():
    # between two asymptotic radii the overlap grows by the closed-form sine-product integral
    E1, E2, L = 0.1, 0.2, 1
    s1, s2 = solve_continuum(E1, L, V, MU, RadialGrid(0.2, 80.0)), solve_continuum(E2, L, V, MU, RadialGrid(0.2, 80.0))
    r = s1.wavefunction.r
    w = simpson_weights(r.size, r[1] - r[0])
    prod = s1.chi * s2.chi * w
    i40 = int(np.argmin(np.abs(r - 40.0)))
    w40 = simpson_weights(i40 + 1, r[1] - r[0])
    num = prod.sum() - float((s1.chi[: i40 + 1] * s2.chi[: i40 + 1]) @ w40)
    k1, k2 = s1.asymptotic_k, s2.asymptotic_k
    ph1, ph2 = s1.phase_shift - L * math.pi / 2, s2.phase_shift - L * math.pi / 2

    def antideriv(x):
        return 0.5 * (math.sin((k1 - k2) * x + ph1 - ph2) / (k1 - k2) - math.sin((k1 + k2) * x + ph1 + ph2) / (k1 + k2))

    ref = s1.amplitude * s2.amplitude * (antideriv(r[-1]) - antideriv(r[i40]))
    assert num == pytest.approx(ref, abs=1e-4 * s1.amplitude * s2.amplitude / (k2 - k1))


def test_discretized_delta_orthonormality():
    h = 2e-4
    Ep = np.arange(0.04, 0.16 + 1e-12, h)
    chi, _, _ = solve_continuum_batch(Ep, 1, V, MU)
    grid = RadialGrid()
    idx = [int(np.argmin(np.abs(Ep - e))) for e in (0.09, 0.1, 0.11)]
    M = (chi[idx] * simpson_weights(grid.n, grid.dr)) @ chi.T
    f = np.exp(-(((Ep - 0.1) / 0.01) ** 2))
    smeared = M @ (simpson_weights(Ep.size, h) * f)
    assert np.allclose(smeared, f[idx], atol=1e-4)


def test_free_overlap_closed_form():
    k1, k2 = math.sqrt(2 * MU * 0.1), math.sqrt(2 * MU * 0.13)
    num = energy_normalization_check(0.1, 0.13, 0, free, MU, FREE_GRID)
    assert num == pytest.approx(free_overlap(k1, k2, 40.0, MU), rel=1e-4)
    num = energy_normalization_check(0.1, 0.1, 0, free, MU, FREE_GRID)
    assert num == pytest.approx(free_overlap(k1, k1, 40.0, MU), rel=1e-4)


def test_errors():
    with pytest.raises(DomainError):
        solve_continuum(0.0, 1, V, MU)
    with pytest.raises(DomainError):
        solve_continuum(0.1, -1, V, MU)
    with pytest.raises(GridTooSmallError):
        solve_continuum(0.1, 1, V, MU, RadialGrid(0.2, 12.0))
    with pytest.raises(DomainError):
        energy_normalization_check(-0.1, 0.1, 1, V, MU)
