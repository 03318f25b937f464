import numpy as np
import pytest

from intlab.bethe import solve_bethe
from intlab.errors import DomainError
from intlab.formfactor import (
    critical_class_amplitude_R,
    ell_class_exponent,
    ell_class_representative,
    ell_class_scaling_check,
    ff_conjugated_field,
    form_factor_analysis,
    gaudin_norm,
    product_lemma_check,
    singular_product_check,
    smooth_discrete_parts,
)
from intlab.linint import fermi_boundary, field_for_density
from intlab.special import gamma


def test_single_particle_norm():
    s = solve_bethe(12.0, 1, 2.5, integers=[3])
    assert gaudin_norm(s) == pytest.approx(2.5 * 12.0, rel=1e-12)


def test_vacuum_to_one_particle():
    vacuum = solve_bethe(15.0, 0, 1.0)
    one = solve_bethe(15.0, 1, 1.0)
    assert ff_conjugated_field(vacuum, one) == pytest.approx(1.0 / 15.0, rel=1e-12)


def test_smooth_times_discrete_is_exact(ground_state, field_excitation):
    smooth, discrete = smooth_discrete_parts(ground_state, field_excitation)
    ff2 = ff_conjugated_field(ground_state, field_excitation)
    assert abs(smooth.imag) < 1e-10 * abs(smooth)
    assert smooth.real * discrete == pytest.approx(ff2, rel=1e-10)


def test_form_factor_record(ground_state, field_excitation):
    result = form_factor_analysis(ground_state, field_excitation)
    assert result.ff2 == pytest.approx(np.exp(result.log_ff2), rel=1e-12)
    assert result.particles == (7,)
    assert result.holes == (3,)
    assert np.isnan(result.asymptotic)


def test_particle_number_must_grow_by_one(ground_state):
    with pytest.raises(DomainError):
        ff_conjugated_field(ground_state, ground_state)


def test_ell_exponent_free_fermions():
    d = fermi_boundary(1e6, 1.0)
    assert ell_class_exponent(d, 0) == pytest.approx(0.5, abs=1e-5)
    assert ell_class_exponent(d, 1) == pytest.approx(2.5, abs=1e-5)
    assert ell_class_exponent(d, -1) == pytest.approx(2.5, abs=1e-5)


def test_ell_class_representative():
    assert list(ell_class_representative(3, 0)) == [1, 2, 3, 4]
    assert list(ell_class_representative(3, -2)) == [-1, 0, 1, 2]


def test_critical_amplitude_values():
    assert critical_class_amplitude_R(0, 0, [], [], 0.3) == pytest.approx(1.0)
    assert critical_class_amplitude_R(1, 0, [1], [], 0.3) == pytest.approx(gamma(1.3).real ** 2, rel=1e-12)
    assert critical_class_amplitude_R(1, 1, [1], [1], 2.0) == 0.0
    with pytest.raises(DomainError):
        critical_class_amplitude_R(2, 0, [2, 1], [], 0.3)


@pytest.mark.parametrize("c", [1.0, 1e6])
def test_product_lemma_converges_with_volume(c):
    density, omega = 0.5, 0.2
    d = fermi_boundary(c, field_for_density(c, density))
    errors = []
    for L in (40.0, 160.0):
        N = int(round(density * L))
        finite, asymptotic = product_lemma_check(solve_bethe(L, N, c), solve_bethe(L, N + 1, c), d, omega)
        errors.append(abs(finite / asymptotic - 1.0))
    assert errors[1] < 0.05
    assert errors[1] <= max(0.5 * errors[0], 1e-10)


def test_singular_product_constant_shift():
    product, limit = singular_product_check(lambda lam: 0.3 + 0.0 * lam, 50.0, 0.4)
    assert product == pytest.approx(1.0)
    assert limit == pytest.approx(1.0)
    with pytest.raises(DomainError):
        singular_product_check(np.sin, 50.0, 1.5)


@pytest.mark.slow
@pytest.mark.parametrize("c", [1.0, 1e8])
@pytest.mark.parametrize("ell", [-1, 0, 1])
def test_ell_class_scaling(c, ell):
    d = fermi_boundary(c, field_for_density(c, 0.25))
    fit = ell_class_scaling_check(d, ell, [64.0, 128.0, 256.0, 512.0])
    assert fit.exponent == pytest.approx(fit.predicted, abs=0.05)
