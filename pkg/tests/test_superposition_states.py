import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from h2scatter.errors import DegenerateInputError, DomainError
from h2scatter.kinematics_shells import ShellComponent
from h2scatter.molecular_structure import bound_expectation_R
from h2scatter.packets import GaussianPacket1D
from h2scatter.superposition_states import (
    PacketSpec,
    build_envelope_state,
    build_packet_state,
    build_product_state,
    build_two_state,
    contact_slice,
    density_map,
    discrete_state,
    psi_max,
    psi_min,
)


@pytest.mark.parametrize(
    "state",
    [
        build_two_state(0, 1),
        build_two_state(0, 5, C1=0.6, C2=0.8, phi=1.0),
        build_product_state(phases=(0.1, 0.2, 0.3)),
        psi_max(),
        psi_min(),
    ],
    ids=["two", "unequal", "product", "max", "min"],
)
def test_norm_is_one(state):
    assert state.norm == pytest.approx(1.0, abs=1e-12)


def test_two_state_shares_shell():
    s = build_two_state(0, 1)
    assert len(s.shells()) == 1
    a, b = s.components
    assert a.K == b.K
    assert a.total_energy() == pytest.approx(b.total_energy(), abs=1e-12)


def test_degenerate_levels_collapse():
    s = build_two_state(3, 3, phi=0.4)
    assert len(s.components) == 1
    assert abs(s.components[0].coeff) == pytest.approx(1.0)
    with pytest.raises(DegenerateInputError):
        build_two_state(3, 3, phi=math.pi)


def test_unnormalized_coefficients_rejected():
    with pytest.raises(DomainError):
        build_two_state(0, 1, C1=1.0, C2=1.0)
    with pytest.raises(DomainError):
        PacketSpec({0: 1.0, 1: 1.0})


def test_phase_periodicity():
    a = build_two_state(0, 1, phi=0.7)
    b = build_two_state(0, 1, phi=0.7 + 2 * math.pi)
    for x, y in zip(a.components, b.components):
        assert x.coeff == pytest.approx(y.coeff, abs=1e-14)


def test_gaussian_momentum_norm():
    g = GaussianPacket1D(1.0, 4.0, 0.01, tau_d=3e3)
    p = np.linspace(3.9, 4.1, 4001)
    assert np.trapezoid(np.abs(g.amplitude(p)) ** 2, p) == pytest.approx(1.0, abs=1e-10)


def test_single_component_map_is_x_independent():
    m = density_map(build_two_state(2, 2), n_R=30, n_x=25)
    assert np.allclose(m.values, m.values[:, :1], rtol=1e-12, atol=0)


def test_fringe_period():
    s = build_two_state(0, 1, p1=1.0)
    k1, k2 = (c.k for c in s.components)
    period = 2 * math.pi / abs(k1 - k2)
    m = density_map(s, x_window=(1.3, 1.3 + period), n_R=40, n_x=2)
    assert np.allclose(m.values[:, 0], m.values[:, 1], rtol=1e-9, atol=1e-14)
    half = density_map(s, x_window=(1.3, 1.3 + period / 2), n_R=40, n_x=2)
    assert not np.allclose(half.values[:, 0], half.values[:, 1], rtol=1e-3)


def test_global_phase_invariance():
    s = build_two_state(0, 1, phi=0.3)
    a = density_map(s, n_R=20, n_x=21).values
    b = density_map(s.with_global_phase(1.1), n_R=20, n_x=21).values
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)
    pk = build_packet_state(phi=0.3)
    a = density_map(pk, n_R=20, n_x=21, t=50.0).values
    b = density_map(pk.with_global_phase(2.0), n_R=20, n_x=21, t=50.0).values
    assert np.allclose(a, b, rtol=1e-12, atol=1e-15)


def test_packet_map_normalized_in_x():
    m = density_map(build_packet_state(), x_window=(-400, 400), n_R=300, n_x=4001, R_window=(0.3, 12.0))
    dR, dx = m.R[1] - m.R[0], m.x[1] - m.x[0]
    assert m.values.sum() * dR * dx == pytest.approx(1.0, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(w=st.lists(st.floats(0, 1), min_size=19, max_size=19).filter(lambda v: sum(v) > 1e-3))
def test_incoherent_mixture_mean_R_in_range(model, w):
    means = np.array([bound_expectation_R(lv) for lv in model.levels])
    w = np.asarray(w) / sum(w)
    mix = float(w @ means)
    assert means[0] - 1e-12 <= mix <= means[-1] + 1e-12


def test_zero_width_envelope_is_single_level():
    s = build_envelope_state(5, 0.0)
    assert [c.nu for c in s.components] == [5]


def test_envelope_contact_slice_matches_component_sum(model):
    s = build_two_state(0, 1, phi=math.pi)
    r, psi, mean = contact_slice(s, model)
    ref = (model.level(0).chi - model.level(1).chi) / math.sqrt(2)
    assert np.allclose(psi, ref)
    assert mean > bound_expectation_R(model.level(0))


def test_cancelling_slice_is_degenerate():
    s = math.sqrt(0.5)
    state = discrete_state([ShellComponent(0, 4.0, 0.0, s, -0.09), ShellComponent(0, 3.9, 0.0, -s, -0.09)])
    with pytest.raises(DegenerateInputError):
        contact_slice(state)


def test_map_serialization(tmp_path):
    m = density_map(build_two_state(0, 1), n_R=3, n_x=4)
    m.to_csv(tmp_path / "m.csv")
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == "R,x,P" and len(lines) == 13
    m.to_json(tmp_path / "m.json")
    assert (tmp_path / "m.json").stat().st_size > 0
