import numpy as np
import pytest
from scipy.integrate import quad

from intlab.errors import ConvergenceError, DomainError
from intlab.oracles import ed_xxz
from intlab.qtm_xxz import (
    amplitude_sigma_z,
    boundary_magnetization,
    correlation_length,
    find_zeros,
    free_energy_xxz,
    magnetization,
    qtm_contour,
    qtm_dominant,
    qtm_excited,
    truncated_sigma_z_correlation,
)


def xx_free_energy(J, h, T):
    """Free fermions ε(k) = 4J cos k - h plus h/2 per site."""
    value, _ = quad(lambda k: np.logaddexp(0.0, -(4.0 * J * np.cos(k) - h) / T), -np.pi, np.pi,
                    epsabs=1e-13)
    return 0.5 * h - T * value / (2.0 * np.pi)


@pytest.mark.parametrize("zeta,T", [(0.0, 1.0), (np.pi, 1.0), (1.0, 0.0)])
def test_regime_validation(zeta, T):
    with pytest.raises(DomainError):
        qtm_dominant(1.0, zeta, 0.0, T)


def test_contour_avoids_eta():
    contour = qtm_contour(1.0, np.pi / 3, 0.5)
    assert contour.half_height < contour.exclusion
    assert contour.half_width >= 2.0


@pytest.mark.parametrize("h,T", [(0.0, 1.0), (0.5, 1.0), (0.3, 0.5)])
def test_free_fermion_point(h, T):
    s = qtm_dominant(1.0, np.pi / 2, h, T)
    assert free_energy_xxz(s) == pytest.approx(xx_free_energy(1.0, h, T), abs=1e-7)


def test_zero_field_magnetization():
    assert abs(magnetization(1.0, np.pi / 3, 0.0, 1.0)) < 1e-5


def test_truncated_correlation_sum():
    terms = [(0.5, 2.0), (-0.25 + 0j, 1.0)]
    assert truncated_sigma_z_correlation(2, terms) == pytest.approx(0.25 * 2.0 + 0.0625)


@pytest.mark.slow
@pytest.mark.parametrize("zeta", [np.pi / 2, np.pi / 3])
def test_free_energy_against_exact_diagonalization(zeta):
    h, T = 0.5, 1.0
    f = free_energy_xxz(qtm_dominant(1.0, zeta, h, T))
    gaps = [abs(f - ed_xxz(L, np.cos(zeta), h, T).free_energy) for L in (10, 12, 14)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3


@pytest.mark.slow
def test_boundary_magnetization_against_open_chain():
    zeta, h, T, xi = np.pi / 3, 0.0, 1.0, 1.2j
    value = boundary_magnetization(qtm_dominant(1.0, zeta, h, T), xi)
    ed = ed_xxz(12, np.cos(zeta), h, T, boundary=(xi, None))
    assert abs(value - ed.magnetization) < 1e-3


@pytest.mark.parametrize("xi", [0.8, 0.3 + 1.2j])
def test_boundary_magnetization_rejects_real_part(xi):
    s = qtm_dominant(1.0, np.pi / 3, 0.0, 1.0)
    with pytest.raises(DomainError):
        boundary_magnetization(s, xi)


def test_free_fermion_excitation_keeps_zeros():
    dominant = qtm_dominant(1.0, np.pi / 2, 0.5, 1.0)
    inside, outside = find_zeros(dominant)
    assert inside and outside
    x, y, eta = inside[0], outside[0], dominant.eta
    state = qtm_excited(dominant, [x], [y])
    assert state.holes[0] == pytest.approx(x, abs=1e-7)
    assert state.particles[0] == pytest.approx(y, abs=1e-7)
    expected = np.sinh(y + eta) / np.sinh(y) * np.sinh(x) / np.sinh(x + eta)
    assert correlation_length(dominant, state) == pytest.approx(expected, rel=1e-8)


@pytest.mark.slow
def test_interacting_excitations_converge():
    dominant = qtm_dominant(1.0, np.pi / 3, 0.5, 1.0)
    inside, outside = find_zeros(dominant)
    states = []
    for x in inside:
        for y in outside:
            try:
                states.append(qtm_excited(dominant, [x], [y]))
            except ConvergenceError:
                continue
    assert states
    for state in states:
        points = np.array(state.holes + state.particles)
        assert np.max(np.abs(1.0 + state.a_at(points))) < 1e-8
        assert abs(correlation_length(dominant, state)) < 1.0


@pytest.mark.slow
def test_excitation_amplitude_is_theta_independent():
    dominant = qtm_dominant(1.0, np.pi / 3, 0.5, 1.0)
    inside, outside = find_zeros(dominant)
    state = None
    for x in inside:
        for y in outside:
            try:
                state = qtm_excited(dominant, [x], [y])
                break
            except ConvergenceError:
                continue
        if state is not None:
            break
    assert state is not None
    rho = correlation_length(dominant, state)
    assert abs(rho) < 1.0
    a = amplitude_sigma_z(dominant, state)
    b = amplitude_sigma_z(dominant, state, theta=(0.3, -0.2))
    assert abs(a - b) <= 1e-6 * abs(a)
