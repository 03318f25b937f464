import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from intlab.errors import DomainError, SingularityError
from intlab.special import (
    ContourDescriptor,
    barnes_g,
    cauchy_transform,
    composite_gauss,
    contour_quadrature,
    derivative,
    gamma,
    gauss_legendre,
    ln_barnes_g,
    ln_gamma,
    winding_number,
)

finite = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False)


@given(st.integers(min_value=1, max_value=20), st.data())
def test_gauss_legendre_exact_to_degree_2n_minus_1(n, data):
    degree = data.draw(st.integers(min_value=0, max_value=2 * n - 1))
    a = data.draw(finite)
    b = a + data.draw(st.floats(min_value=0.1, max_value=4.0))
    quad = gauss_legendre(n, a, b)
    exact = (b ** (degree + 1) - a ** (degree + 1)) / (degree + 1)
    assert quad.integrate(quad.nodes**degree) == pytest.approx(exact, rel=1e-10, abs=1e-10)


def test_gauss_legendre_rejects_empty_interval():
    with pytest.raises(DomainError):
        gauss_legendre(4, 1.0, 1.0)
    with pytest.raises(DomainError):
        gauss_legendre(0)


def test_composite_gauss_covers_all_panels():
    quad = composite_gauss([0.0, 0.5, 2.0, 3.0], 8)
    assert len(quad) == 24
    assert quad.integrate(np.exp(quad.nodes)) == pytest.approx(math.e**3 - 1.0, rel=1e-13)


def test_gamma_known_values():
    assert gamma(5.0).real == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert gamma(-0.5).real == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-13)


@given(finite, st.floats(min_value=-3.0, max_value=3.0))
def test_ln_gamma_recursion(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and abs(x - round(x)) < 1e-3 and x < 0.5:
        return
    lhs = ln_gamma(z + 1.0)
    rhs = ln_gamma(z) + np.log(z)
    assert abs(np.exp(lhs - rhs) - 1.0) < 1e-11


def test_ln_gamma_pole_raises():
    with pytest.raises(SingularityError):
        ln_gamma(-2.0)


def test_barnes_g_integer_values():
    for z, expected in [(1, 1.0), (2, 1.0), (3, 1.0), (4, 2.0), (5, 12.0), (6, 288.0)]:
        assert barnes_g(z).real == pytest.approx(expected, rel=1e-12)
    assert barnes_g(0) == 0
    assert barnes_g(-3) == 0
    assert np.isneginf(ln_barnes_g(-1).real)


@settings(max_examples=40)
@given(st.floats(min_value=-2.5, max_value=2.5), st.floats(min_value=-1.5, max_value=1.5))
def test_barnes_g_functional_equation(x, y):
    z = complex(x, y)
    if abs(y) < 1e-2 and x < 0.5 and abs(x - round(x)) < 1e-2:
        return
    lhs = ln_barnes_g(z + 1.0)
    rhs = ln_gamma(z) + ln_barnes_g(z)
    assert abs(np.exp(lhs - rhs) - 1.0) < 1e-9


def test_barnes_g_half():
    # G(1/2) = 2^{1/24} e^{1/8} π^{-1/4} A^{-3/2}
    glaisher = 1.2824271291006226
    expected = 2.0 ** (1.0 / 24.0) * math.exp(0.125) * math.pi**-0.25 * glaisher**-1.5
    assert barnes_g(0.5).real == pytest.approx(expected, rel=1e-11)


def test_rectangle_contour_winding():
    quad = contour_quadrature(ContourDescriptor(kind="rectangle", half_width=2.0, half_height=0.5))
    assert abs(np.sum(quad.weights)) < 1e-12
    assert winding_number(quad, 0.3 + 0.1j) == pytest.approx(1.0, abs=1e-12)
    assert winding_number(quad, 0.3 + 0.8j) == pytest.approx(0.0, abs=1e-12)
    clockwise = contour_quadrature(ContourDescriptor(kind="rectangle", half_width=2.0, half_height=0.5,
                                                     counterclockwise=False))
    assert winding_number(clockwise, 0.0) == pytest.approx(-1.0, abs=1e-12)
    with pytest.raises(DomainError):
        winding_number(quad, quad.nodes[5])


@settings(max_examples=50)
@given(st.floats(min_value=-3.0, max_value=3.0), st.floats(min_value=-2.0, max_value=2.0))
def test_rectangle_winding_is_integer_off_contour(x, y):
    quad = contour_quadrature(ContourDescriptor(kind="rectangle", half_width=2.0, half_height=0.5))
    assume(abs(abs(x) - 2.0) > 0.05 and abs(abs(y) - 0.5) > 0.05)
    expected = 1.0 if abs(x) < 2.0 and abs(y) < 0.5 else 0.0
    assert winding_number(quad, complex(x, y)) == pytest.approx(expected, abs=1e-12)


def test_circle_contour_integrates_residue():
    quad = contour_quadrature(ContourDescriptor(kind="circle", radius=1.0, points_per_side=64))
    value = np.sum(quad.weights * np.exp(quad.nodes) / quad.nodes) / (2j * np.pi)
    assert value == pytest.approx(1.0, abs=1e-13)


def test_rectangle_height_exclusion():
    with pytest.raises(DomainError):
        contour_quadrature(ContourDescriptor(kind="rectangle", half_height=0.5, exclusion=0.4))


@pytest.mark.parametrize("lam", [0.5 + 0.01j, 2.0 - 0.3j, 0.1 + 1e-4j])
def test_cauchy_transform_of_constant(lam):
    q = 1.0
    expected = np.log((lam - q) / (lam + q)) / (2j * np.pi)
    assert cauchy_transform(lambda mu: np.ones_like(mu), q, lam) == pytest.approx(expected, abs=1e-10)


def test_cauchy_transform_on_segment_raises():
    with pytest.raises(DomainError):
        cauchy_transform(np.cos, 1.0, 0.2)


def test_derivative_orders():
    x = np.array([0.3, 1.1])
    assert np.allclose(derivative(np.sin, x, 1, step=1e-3), np.cos(x), atol=1e-10)
    assert np.allclose(derivative(np.sin, x, 2, step=1e-3), -np.sin(x), atol=1e-7)
    with pytest.raises(DomainError):
        derivative(np.sin, x, 3)
