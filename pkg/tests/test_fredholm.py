import numpy as np
import pytest

from intlab.errors import DomainError
from intlab.fredholm import (
    KernelSpec,
    LacunarySpec,
    bessel_coefficients,
    bessel_lacunary_limit,
    bessel_symbol,
    cshift_factorization,
    discrete_det,
    fourier_coefficients,
    geometric_symbol,
    gsk_kernel,
    gsk_leading,
    lacunary_toeplitz,
    nystrom_det,
    sine_kernel,
    sine_kernel_det,
    szego_trend,
    toeplitz_det,
)
from intlab.special import ContourDescriptor


def test_discrete_det_of_zero_kernel():
    assert discrete_det(np.zeros((5, 5)), np.full(5, 0.2)) == pytest.approx(1.0)


def test_rank_one_kernel():
    k = KernelSpec(name="const", function=lambda a, b: 0.5 + 0 * a * b)
    assert nystrom_det(k, (-1.0, 1.0), 8) == pytest.approx(2.0, abs=1e-13)


def test_sine_kernel_small_x():
    assert sine_kernel_det(0.01) == pytest.approx(1.0 - 0.02 / np.pi, abs=1e-8)
    assert sine_kernel_det(3.0, gamma=0.0) == pytest.approx(1.0)


def test_sine_kernel_grid_doubling():
    value = nystrom_det(sine_kernel(5.0, -1.0), (-1.0, 1.0), 48, check=True)
    assert abs(value.imag) < 1e-12
    assert 0.0 < value.real < 1.0


def test_gsk_rejects_large_nu():
    with pytest.raises(DomainError):
        gsk_leading(0.6, lambda lam: lam, lambda lam: 0 * lam, 1.0, 50.0)


def test_cshift_loop_must_stay_in_strip():
    loop = ContourDescriptor(kind="rectangle", half_width=1.5, half_height=0.5)
    with pytest.raises(DomainError):
        cshift_factorization(0.5, lambda lam: lam, 1.0, 1.0, 10.0, loop=loop)


def test_geometric_toeplitz_determinant():
    ratio = 0.5
    coeffs = fourier_coefficients(geometric_symbol(ratio))
    for N in (1, 4, 10):
        value = toeplitz_det(coeffs, np.arange(1, N + 1), N)
        assert value == pytest.approx(1.0 / (1.0 - ratio**2), rel=1e-12)


def test_szego_constant():
    assert szego_trend(0.5, [20])[0] == pytest.approx(0.25, abs=1e-10)


def test_lacunary_spec_validation():
    symbol = geometric_symbol(0.5)
    assert list(LacunarySpec(symbol, 4, (2,), (6,)).rows) == [1, 6, 3, 4]
    with pytest.raises(DomainError):
        LacunarySpec(symbol, 4, (2,), ())
    with pytest.raises(DomainError):
        LacunarySpec(symbol, 4, (5,), (7,))
    with pytest.raises(DomainError):
        LacunarySpec(symbol, 4, (2,), (3,))


def test_lacunary_without_lacunae_is_plain():
    exact, plain = lacunary_toeplitz(LacunarySpec(geometric_symbol(0.8), 16))
    assert exact == plain


def test_winding_symbol_rejected():
    with pytest.raises(DomainError):
        lacunary_toeplitz(LacunarySpec(lambda z: z, 8, (1,), (10,)))


def test_bessel_coefficients_match_fft():
    n = np.arange(-6, 7)
    coeffs = fourier_coefficients(bessel_symbol(0.5))
    assert np.allclose(coeffs[n % len(coeffs)], bessel_coefficients(0.5)(n), rtol=0.0, atol=1e-14)


def test_bessel_lacunary_limit_closed_form():
    t = 0.7
    assert bessel_lacunary_limit(t, 2, 2) == pytest.approx(t**4 / 8.0)
    assert bessel_lacunary_limit(t, 0, 2) == pytest.approx(t**2 / 2.0)


def test_lacunary_prediction_improves_with_size():
    t = 1.5
    symbol, coefficients = bessel_symbol(t), bessel_coefficients(t)
    errors = []
    for N in (10, 20):
        exact, prediction = lacunary_toeplitz(LacunarySpec(symbol, N, (N - 2,), (N + 2,), coefficients))
        errors.append(abs(prediction - exact) / abs(exact))
    assert errors[1] <= 0.1 * errors[0] or errors[1] < 1e-12
    assert errors[1] < 1e-9


@pytest.mark.parametrize("N", [32, 64])
def test_lacunary_matches_limit(N):
    t = 0.3
    symbol, coefficients = bessel_symbol(t), bessel_coefficients(t)
    plain = toeplitz_det(coefficients, np.arange(1, N + 1), N)
    exact, prediction = lacunary_toeplitz(LacunarySpec(symbol, N, (N - 2,), (N + 2,), coefficients))
    limit = bessel_lacunary_limit(t, 2, 2)
    assert prediction / plain == pytest.approx(limit, rel=1e-8)
    assert exact / plain == pytest.approx(limit, rel=1e-8)


@pytest.mark.slow
def test_cshift_factorization_converges():
    diffs = []
    for x in (100.0, 200.0):
        lhs, rhs = cshift_factorization(0.5, lambda lam: lam, 1.0, 1.0, x, n=256)
        diffs.append(abs(lhs - rhs) / abs(rhs))
    assert diffs[1] < diffs[0]
    assert diffs[1] < 0.05


@pytest.mark.slow
def test_gsk_leading_matches_nystrom():
    errors = []
    for x in (100.0, 200.0):
        det = nystrom_det(gsk_kernel(-0.2, lambda lam: lam, 0.0, x), (-1.0, 1.0), 256)
        leading = gsk_leading(-0.2, lambda lam: lam, 0.0, 1.0, x, 256)
        errors.append(abs(det / leading - 1.0))
    assert errors[1] < errors[0]
    assert errors[1] < 1e-3
