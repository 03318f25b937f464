import numpy as np
import pytest
from scipy.integrate import quad

from intlab.errors import DomainError
from intlab.linint import fermi_boundary
from intlab.special import gauss_legendre
from intlab.thermo_nls import (
    density_from_free_energy,
    free_energy_nls,
    minimal_cutoff,
    yang_yang_log_integral,
    yang_yang_solve,
)


def test_parameter_validation():
    with pytest.raises(DomainError):
        yang_yang_solve(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        yang_yang_solve(0.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        yang_yang_solve(1.0, 1.0, 0.1, cutoff=0.5 * minimal_cutoff(1.0, 0.1))


def test_free_fermion_free_energy():
    h, T = 1.0, 0.5
    s = yang_yang_solve(1e6, h, T)
    exact, _ = quad(lambda lam: np.logaddexp(0.0, -(lam * lam - h) / T), -np.inf, np.inf, epsabs=1e-13)
    assert free_energy_nls(s) == pytest.approx(-T * exact / (2.0 * np.pi), abs=1e-5)
    assert np.allclose(s.epsilon, s.nodes**2 - h, atol=1e-5)


def test_interpolant_matches_nodes():
    s = yang_yang_solve(1.0, 1.0, 0.2)
    assert np.allclose(s(s.nodes), s.epsilon, atol=1e-8)


def test_zero_temperature_limit():
    c, h, T = 1.0, 1.0, 0.01
    d0 = fermi_boundary(c, h)
    rule = gauss_legendre(64, -d0.q, d0.q)
    ground = np.sum(rule.weights * d0.epsilon(rule.nodes).real) / (2.0 * np.pi)
    assert free_energy_nls(yang_yang_solve(c, h, T)) == pytest.approx(ground, abs=5e-4)
    assert density_from_free_energy(c, h, T) == pytest.approx(d0.density, abs=1e-3)


def test_log_integral_includes_tail():
    h, T = -0.5, 1.0
    s = yang_yang_solve(1e6, h, T)
    exact, _ = quad(lambda lam: np.log1p(np.exp(-(lam * lam - h) / T)), -np.inf, np.inf, epsabs=1e-13)
    assert yang_yang_log_integral(s) == pytest.approx(exact / (2.0 * np.pi), abs=1e-6)
    assert free_energy_nls(s) == pytest.approx(-T * yang_yang_log_integral(s), rel=1e-14)
