import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intlab.errors import DomainError
from intlab.sinhpf import (
    SinhModel,
    density_histogram,
    equilibrium_density,
    gaussian_partition_asymptotic,
    gaussian_partition_direct,
    gaussian_partition_exact,
    in_asymptotic_window,
    leading_free_energy,
    metropolis_sample,
)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.2, max_value=5.0), st.floats(min_value=-2.0, max_value=2.0),
       st.floats(min_value=0.1, max_value=10.0))
def test_single_particle_is_gaussian_integral(g, t, T):
    m = SinhModel(1, T, g=g, t=t)
    expected = 0.5 * np.log(np.pi / (g * T)) + T * t * t / (4.0 * g)
    assert gaussian_partition_exact(m) == pytest.approx(expected, abs=1e-12)
    assert gaussian_partition_direct(m) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("omega1,omega2,t", [(1.0, 1.0, 0.0), (1.0, 1.0, 0.4)])
def test_two_particles_exact_against_quadrature(omega1, omega2, t):
    m = SinhModel(2, 1.0, omega1=omega1, omega2=omega2, g=1.0, t=t)
    assert gaussian_partition_direct(m) == pytest.approx(gaussian_partition_exact(m), abs=1e-8)


def test_model_validation():
    with pytest.raises(DomainError):
        SinhModel(0, 1.0)
    with pytest.raises(DomainError):
        SinhModel(4, 0.0)
    with pytest.raises(DomainError):
        SinhModel(4, 1.0, g=-1.0)
    with pytest.raises(DomainError):
        gaussian_partition_direct(SinhModel(4, 1.0))


def test_asymptotic_window():
    assert in_asymptotic_window(100, np.log(100) ** 2)
    assert not in_asymptotic_window(100, 1.0)
    assert not in_asymptotic_window(100, 100.0)


def test_gaussian_equilibrium_measure():
    measure = equilibrium_density(lambda x: x * x)
    assert measure.a == pytest.approx(-np.pi, abs=1e-10)
    assert measure.b == pytest.approx(np.pi, abs=1e-10)
    assert measure.mass == pytest.approx(1.0, abs=1e-8)
    assert measure.consistent
    assert measure.density(np.array([0.0, 4.0])) == pytest.approx([1.0 / (2.0 * np.pi), 0.0], abs=1e-8)
    assert leading_free_energy(lambda x: x * x) == pytest.approx(np.pi**2 / 3.0, abs=1e-6)


def test_non_convex_potential_rejected():
    with pytest.raises(DomainError):
        equilibrium_density(lambda x: -x * x)


def test_metropolis_is_seeded():
    m = SinhModel(6, 2.0)
    first = metropolis_sample(m, sweeps=200, burn_in=200, thin=10, seed=3)
    second = metropolis_sample(m, sweeps=200, burn_in=200, thin=10, seed=3)
    assert np.array_equal(first.samples, second.samples)
    assert first.samples.shape == (20, 6)
    assert np.all(np.diff(first.samples, axis=1) >= 0)
    assert 0.0 < first.acceptance < 1.0
    assert first.autocorrelation >= 1.0


def test_histogram_is_normalized():
    rng = np.random.default_rng(0)
    samples = rng.uniform(-1.0, 1.0, size=(400, 5))
    centers, density, error = density_histogram(samples, -1.0, 1.0, bins=10)
    assert len(centers) == 10
    assert np.sum(density) * 0.2 == pytest.approx(1.0)
    assert np.all(error >= 0.0)


@pytest.mark.slow
def test_asymptotic_expansion_improves_with_n():
    diffs = []
    for N in (100, 200):
        m = SinhModel(N, np.log(N) ** 2)
        diffs.append(abs(gaussian_partition_exact(m) - gaussian_partition_asymptotic(m)))
    assert diffs[1] < diffs[0]
    assert diffs[1] < 0.05
