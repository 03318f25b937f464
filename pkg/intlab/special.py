"""
Quadrature rules, contours and special functions used by every solver.

All quadratures are immutable once built. ln Γ is the continuous branch
obtained from analytic continuation off the positive axis (cut along the
negative real axis), which is what the determinant formulas multiply
together.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .errors import DomainError, SingularityError

logger = logging.getLogger(__name__)

LOG_2PI = np.log(2.0 * np.pi)

# Bernoulli-number coefficients B_2k / (2k (2k-1)) of the Stirling series
STIRLING_COEFFS = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)

# Shift target for the Stirling series; error below 1e-16 beyond it
STIRLING_SHIFT = 15.0

BARNES_NODES = 48


@dataclass(frozen=True)
class Quadrature:
    """Nodes and weights; integral of f is sum(weights * f(nodes))."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: object = None

    def integrate(self, values):
        return np.sum(self.weights * values, axis=-1)

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class ContourDescriptor:
    """
    Closed contour or segment in the complex plane.

    kind is "rectangle", "circle" or "segment". A rectangle spans
    center ± half_width horizontally and center ± i·half_height vertically.
    With rule="gauss" the long sides are cut into Gauss-Legendre panels no
    longer than panel_length inside |Re - center| ≤ core, growing
    geometrically outside; rule="trapezoid" spreads points_per_side evenly.
    """

    kind: str
    center: complex = 0.0
    half_width: float = 1.0
    half_height: float = 0.5
    radius: float = 1.0
    counterclockwise: bool = True
    points_per_side: int = 32
    rule: str = "gauss"
    panel_length: float = 0.5
    core: float = 3.0
    end: complex = 1.0
    exclusion: float = np.inf


@lru_cache(maxsize=64)
def _legendre_nodes(n):
    x, w = legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    """
    Gauss-Legendre rule on [a, b].

    Args:
        n: Number of nodes (n >= 1)
        a: Left endpoint
        b: Right endpoint (b > a)

    Returns:
        Quadrature exact for polynomials of degree <= 2n-1

    Raises:
        DomainError: If n < 1 or a >= b
    """
    if n < 1:
        raise DomainError(f"Gauss-Legendre needs n >= 1, got {n}")
    if not a < b:
        raise DomainError(f"Empty interval [{a}, {b}]")
    x, w = _legendre_nodes(int(n))
    half = 0.5 * (b - a)
    return Quadrature(nodes=half * x + 0.5 * (a + b), weights=half * w, domain=(a, b))


def composite_gauss(breaks, n_per_panel):
    """Gauss-Legendre panels between consecutive breakpoints."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _legendre_nodes(int(n_per_panel))
    lo, hi = breaks[:-1, None], breaks[1:, None]
    nodes = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    weights = (0.5 * (hi - lo) * w).ravel()
    return Quadrature(nodes=nodes, weights=weights, domain=(breaks[0], breaks[-1]))


def graded_breaks(length, panel_length, core):
    """Breakpoints on [0, length]: uniform up to core, then geometric growth."""
    pts = [0.0]
    step = panel_length
    while pts[-1] < length - 1e-12:
        if pts[-1] >= core:
            step *= 1.5
        pts.append(min(length, pts[-1] + step))
    return np.array(pts)


def _segment_rule(z0, z1, c):
    """Quadrature along the straight segment z0 -> z1."""
    length = abs(z1 - z0)
    if c.rule == "trapezoid":
        t = (np.arange(c.points_per_side) + 0.5) / c.points_per_side
        return z0 + (z1 - z0) * t, np.full(c.points_per_side, (z1 - z0) / c.points_per_side)
    q = gauss_legendre(c.points_per_side, 0.0, 1.0)
    return z0 + (z1 - z0) * q.nodes, (z1 - z0) * q.weights if length > 0 else q.weights * 0


def _long_side(x_from, x_to, y, c):
    """Graded Gauss panels along Im z = y, symmetric about the center."""
    center = c.center.real
    half = graded_breaks(c.half_width, c.panel_length, c.core)
    breaks = np.concatenate([-half[::-1], half[1:]]) + center
    quad = composite_gauss(breaks, 10)
    nodes = quad.nodes + 1j * y
    weights = quad.weights.astype(complex)
    if x_from > x_to:
        nodes, weights = nodes[::-1], -weights[::-1]
    return nodes, weights


def contour_quadrature(c):
    """
    Build the quadrature of a ContourDescriptor.

    Args:
        c: ContourDescriptor

    Returns:
        Quadrature with complex nodes and dz weights (sum of weights is 0 for
        closed contours, the segment length for segments)

    Raises:
        DomainError: For degenerate contours or half-heights violating the
            exclusion distance
    """
    if c.kind == "circle":
        if c.radius <= 0:
            raise DomainError("Degenerate circle contour")
        m = c.points_per_side
        t = 2.0 * np.pi * np.arange(m) / m
        sign = 1.0 if c.counterclockwise else -1.0
        z = c.center + c.radius * np.exp(1j * sign * t)
        w = 1j * sign * (z - c.center) * (2.0 * np.pi / m)
        return Quadrature(nodes=z, weights=w, domain=c)

    if c.kind == "segment":
        if c.end == c.center:
            raise DomainError("Degenerate segment contour")
        z, w = _segment_rule(complex(c.center), complex(c.end), c)
        return Quadrature(nodes=z, weights=w, domain=c)

    if c.kind != "rectangle":
        raise DomainError(f"Unknown contour kind '{c.kind}'")
    if c.half_width <= 0 or c.half_height <= 0:
        raise DomainError("Degenerate rectangle contour")
    if c.half_height >= c.exclusion:
        raise DomainError(
            f"Rectangle half-height {c.half_height} reaches the exclusion distance {c.exclusion}"
        )

    x0, y0 = c.center.real, c.center.imag
    a, b = c.half_width, c.half_height
    corners = [complex(x0 + a, y0 - b), complex(x0 + a, y0 + b),
               complex(x0 - a, y0 + b), complex(x0 - a, y0 - b)]
    pieces = []
    for k in range(4):
        z0, z1 = corners[k], corners[(k + 1) % 4]
        if c.rule == "gauss" and k in (1, 3):
            pieces.append(_long_side(z0.real, z1.real, z0.imag, c))
        else:
            pieces.append(_segment_rule(z0, z1, c))
    nodes = np.concatenate([p[0] for p in pieces])
    weights = np.concatenate([p[1] for p in pieces])
    if not c.counterclockwise:
        weights = -weights
    return Quadrature(nodes=nodes, weights=weights, domain=c)


def winding_number(quad, z0):
    """
    Winding number of a closed-contour quadrature around z0.

    Counted from the argument increments between consecutive nodes, so the
    result is an integer up to rounding for any z0 off the node polygon.

    Raises:
        DomainError: If z0 is one of the nodes
    """
    d = np.asarray(quad.nodes, dtype=complex) - z0
    if np.any(d == 0):
        raise DomainError(f"Point {z0} lies on the contour")
    return float(np.angle(np.roll(d, -1) / d).sum() / (2.0 * np.pi))


def ln_gamma(z):
    """
    Continuous logarithm of Γ(z), cut along the negative real axis.

    Args:
        z: Complex scalar or array

    Returns:
        ln Γ(z), satisfying ln Γ(z+1) = ln Γ(z) + log z

    Raises:
        SingularityError: At non-positive integers
    """
    z = np.asarray(z, dtype=complex)
    poles = (z.imag == 0) & (z.real <= 0) & (np.round(z.real) == z.real)
    if np.any(poles):
        raise SingularityError(f"ln_gamma pole at {z[poles].ravel()[0].real:g}")

    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - z.real)).astype(int)
    w = z + shift
    correction = np.zeros_like(z)
    for k in range(int(shift.max()) if shift.size else 0):
        active = k < shift
        correction = correction + np.where(active, np.log(np.where(active, z + k, 1.0)), 0.0)

    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for coeff in reversed(STIRLING_COEFFS):
        series = series * inv2 + coeff
    series = series * inv
    result = (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - correction
    return result if result.ndim else complex(result)


def gamma(z):
    """Γ(z) through ln_gamma."""
    return np.exp(ln_gamma(z))


def _ln_barnes_base(w):
    """ln G(1+w) for 0 <= Re w < 1 from the integral representation."""
    if w == 0:
        return 0.0j
    q = gauss_legendre(BARNES_NODES, 0.0, 1.0)
    path = w * q.nodes
    integral = w * np.sum(q.weights * ln_gamma(1.0 + path))
    return 0.5 * w * LOG_2PI + w * ln_gamma(1.0 + w) + 0.5 * w * (1.0 - w) - w - integral


def ln_barnes_g(z):
    """
    Logarithm of the Barnes G-function.

    Args:
        z: Complex scalar

    Returns:
        ln G(z); -inf at the zeros z = 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        return complex(-np.inf)
    k = int(np.floor(z.real)) - 1
    base = z - k
    value = _ln_barnes_base(base - 1.0)
    if k > 0:
        # G(z) = G(base) * Π_{j=0}^{k-1} Γ(base + j)
        value += np.sum(ln_gamma(base + np.arange(k)))
    elif k < 0:
        # G(z) = G(base) / Π_{j=1}^{-k} Γ(base - j)
        value -= np.sum(ln_gamma(base - np.arange(1, -k + 1)))
    return value


def barnes_g(z):
    """Barnes G(z); exact zeros at non-positive integers."""
    value = ln_barnes_g(z)
    if np.isneginf(value.real):
        return 0.0j
    return np.exp(value)


def barycentric_weights(x, w):
    """Barycentric weights for Legendre nodes x with Gauss weights w."""
    return (-1.0) ** np.arange(len(x)) * np.sqrt((1.0 - x**2) * w)


def barycentric_eval(nodes, values, bweights, z):
    """Evaluate the polynomial interpolant at points z."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    diff = z[:, None] - nodes[None, :]
    exact = np.isclose(diff, 0.0, atol=1e-15)
    diff = np.where(exact, 1.0, diff)
    ratio = bweights / diff
    out = (ratio @ values) / ratio.sum(axis=1)
    rows, cols = np.nonzero(exact)
    out[rows] = values[cols]
    return out


def cauchy_transform(f, q, lam, n=64):
    """
    Cauchy transform C[f](λ) = ∫_{-q}^{q} f(μ) dμ / (2πi (μ - λ)).

    Args:
        f: Callable, or samples of f on the n-point Gauss-Legendre nodes of [-q, q]
        q: Half-length of the segment
        lam: Complex point(s) off the segment
        n: Number of nodes (ignored for callables given as samples of another size)

    Returns:
        Complex value(s) of the transform

    Raises:
        DomainError: If λ lies on the segment
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if callable(f):
        quad = gauss_legendre(n, -q, q)
        fx = np.asarray(f(quad.nodes), dtype=complex)
    else:
        fx = np.asarray(f, dtype=complex)
        quad = gauss_legendre(len(fx), -q, q)
    on_segment = (np.abs(lam.imag) < 1e-14) & (np.abs(lam.real) <= q)
    if np.any(on_segment):
        raise DomainError(f"Cauchy transform evaluated on the segment at {lam[on_segment][0]}")

    spacing = 2.0 * q / len(quad)
    dist = np.where(np.abs(lam.real) <= q, np.abs(lam.imag),
                    np.abs(lam - np.clip(lam.real, -q, q)))
    near = dist < 5.0 * spacing

    out = (quad.weights * fx) @ (1.0 / (quad.nodes[:, None] - lam[None, :])) / (2j * np.pi)
    if np.any(near):
        lam_near = lam[near]
        if callable(f):
            f_lam = np.asarray(f(lam_near), dtype=complex)
        else:
            x, w = _legendre_nodes(len(fx))
            f_lam = barycentric_eval(x, fx, barycentric_weights(x, w), lam_near / q)
        diff = quad.nodes[:, None] - lam_near[None, :]
        smooth = (fx[:, None] - f_lam[None, :]) / diff
        log_part = np.log((lam_near - q) / (lam_near + q))
        out[near] = (quad.weights @ smooth + f_lam * log_part) / (2j * np.pi)
    return out if out.size > 1 else complex(out[0])


def cauchy_c0(f, q, c, n=64):
    """Double integral C₀[f] = -∫∫ f(λ) f(μ) / (λ - μ - ic)² over [-q, q]²."""
    quad = gauss_legendre(n, -q, q)
    fx = np.asarray(f(quad.nodes), dtype=complex) if callable(f) else np.asarray(f, dtype=complex)
    diff = quad.nodes[:, None] - quad.nodes[None, :] - 1j * c
    wf = quad.weights * fx
    return complex(-wf @ (1.0 / diff**2) @ wf)


def derivative(f, x, order=1, step=1e-4):
    """Fourth-order central difference of a callable (orders 1 and 2)."""
    x = np.asarray(x, dtype=complex)
    h = step
    if order == 1:
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)
    if order == 2:
        return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)
    raise DomainError(f"Unsupported derivative order {order}")
