import numpy as np
import pytest

from intlab.errors import DomainError
from intlab.oracles import toda2_relative_spectrum
from intlab.toda import (
    TodaSector,
    integers_from_guess,
    newton_sums,
    quantize,
    semiclassical_level,
    tba_solve,
    theta_polynomial,
    toda_kernel,
    transfer_polynomial,
    two_particle_guess,
    wronskian_residual,
)


def test_kernel_normalization():
    from scipy.integrate import quad
    value, _ = quad(lambda lam: toda_kernel(lam, 0.7), -np.inf, np.inf)
    assert value == pytest.approx(1.0, abs=1e-10)


def test_theta_polynomial():
    assert theta_polynomial([1.0, -2.0], 3.0) == pytest.approx(10.0)


def test_sector_validation():
    with pytest.raises(DomainError):
        TodaSector(hbar=0.0, integers=(0, 1))
    with pytest.raises(DomainError):
        TodaSector(hbar=1.0, integers=(0, 1), zeta=2.0)
    with pytest.raises(DomainError):
        TodaSector(hbar=1.0, integers=(1, 0))
    assert TodaSector(hbar=1.0, integers=(0, 0, 1)).particles == 3


def test_tba_rejects_bad_sigma():
    with pytest.raises(DomainError):
        tba_solve([0.4j, -0.4j], 0.5)
    with pytest.raises(DomainError):
        tba_solve([0.1j, 1.0], 1.0)


def test_tba_solution_is_positive():
    t = tba_solve([-1.5, 1.5], 1.0)
    assert t.update <= 1e-13
    assert np.all(t.log_y >= 0.0)
    assert t.particles == 2


def test_semiclassical_levels():
    levels = [semiclassical_level(1.0, k) for k in range(4)]
    assert levels[0] > 2.0
    assert np.all(np.diff(levels) > 0)
    hbar = 0.05
    assert semiclassical_level(hbar, 1) == pytest.approx(2.0 + 3.0 * hbar, abs=5e-3)


def test_two_particle_guess_carries_momentum():
    guess = two_particle_guess(1.0, 0, momentum=0.4)
    assert guess.sum() == pytest.approx(0.4)
    assert guess[0] < guess[1]


def test_quantize_validation():
    with pytest.raises(DomainError):
        quantize(TodaSector(hbar=1.0, integers=(0,)), [0.0])
    with pytest.raises(DomainError):
        quantize(TodaSector(hbar=1.0, integers=(0, 1)), [0.0, 1.0, 2.0])


@pytest.mark.slow
def test_two_particle_ground_state_against_finite_differences():
    hbar = 1.0
    guess = two_particle_guess(hbar, 0)
    sector = integers_from_guess(guess, hbar)
    state = quantize(sector, guess)
    reference = toda2_relative_spectrum(hbar).levels[0]
    assert abs(state.relative_energy - reference) < 1e-4
    assert newton_sums(state.tba)[0].real == pytest.approx(state.sigma.sum(), abs=1e-12)
    assert wronskian_residual(state.tba) < 1e-8
    check = transfer_polynomial(state.tba)
    assert check.residual < 1e-7
    assert check.conjugation < 1e-8
