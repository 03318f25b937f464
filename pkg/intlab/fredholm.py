"""
Fredholm determinants by the Nyström method, and numerical checks of their
large-parameter asymptotics:

  - generalized sine kernels (leading three-term asymptotics),
  - c-shifted kernels (factorization on a loop around the interval),
  - line-lacunary Toeplitz determinants.
"""

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import iv

from .errors import ConvergenceError, DomainError, SingularityError
from .special import (
    ContourDescriptor,
    cauchy_transform,
    contour_quadrature,
    derivative,
    gauss_legendre,
    ln_barnes_g,
)

logger = logging.getLogger(__name__)

DEFAULT_NODES = 64
DOUBLING_TOL = 1e-8

FOURIER_POINTS = 4096
RADIUS_Z = 0.95
RADIUS_S = 0.9
CIRCLE_POINTS = 1024

# Loops for the c-shifted factorization must keep |Im z| below this fraction of c
STRIP_FRACTION = 0.45


@dataclass(frozen=True)
class KernelSpec:
    """
    Integral kernel K(λ, μ) for Nyström discretization.

    function is evaluated on broadcast arrays; diagonal, when given,
    supplies the removable-singularity value K(λ, λ).
    """

    name: str
    function: object
    diagonal: object = None
    params: dict = field(default_factory=dict)

    def matrix(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        xx, yy = np.broadcast_arrays(x[:, None], y[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(self.function(xx, yy), dtype=complex)
        if self.diagonal is not None:
            scale = max(1.0, float(np.max(np.abs(x))))
            close = np.abs(xx - yy) < 1e-12 * scale
            if np.any(close):
                values = values.copy()
                values[close] = np.asarray(self.diagonal(xx[close]), dtype=complex)
        return values


def _nodes_and_weights(domain, n):
    if isinstance(domain, ContourDescriptor):
        quad = contour_quadrature(domain)
    else:
        a, b = domain
        quad = gauss_legendre(n, a, b)
    return quad.nodes, quad.weights


def _refined(domain, n):
    if isinstance(domain, ContourDescriptor):
        return replace(domain, points_per_side=2 * domain.points_per_side,
                       panel_length=0.5 * domain.panel_length), n
    return domain, 2 * n


def discrete_det(matrix, weights):
    """det[id + K W] for kernel values K on nodes with quadrature weights W."""
    weights = np.asarray(weights)
    if np.iscomplexobj(weights) or np.any(weights < 0):
        mat = np.eye(len(weights)) + matrix * weights[None, :]
    else:
        root = np.sqrt(weights)
        mat = np.eye(len(weights)) + root[:, None] * matrix * root[None, :]
    return complex(np.linalg.det(mat))


def _det_once(k, domain, n):
    x, w = _nodes_and_weights(domain, n)
    return discrete_det(k.matrix(x, x), w)


def nystrom_det(k, domain, n=DEFAULT_NODES, check=False, tol=DOUBLING_TOL):
    """
    Nyström approximation of det[id + K].

    Args:
        k: KernelSpec
        domain: (a, b) interval or a ContourDescriptor
        n: Gauss-Legendre nodes on an interval (contours carry their own size)
        check: Also evaluate on a doubled grid and require agreement
        tol: Relative agreement demanded by check

    Returns:
        complex determinant (the doubled-grid value when check is set)

    Raises:
        ConvergenceError: If the doubled grid disagrees by more than tol
    """
    value = _det_once(k, domain, n)
    if not check:
        return value
    fine_domain, fine_n = _refined(domain, n)
    fine = _det_once(k, fine_domain, fine_n)
    change = abs(fine - value) / max(1.0, abs(fine))
    logger.debug(f"det[id+{k.name}]: n={n} -> {value:.12g}, doubled -> {fine:.12g}")
    if change > tol:
        raise ConvergenceError(
            f"Nyström determinant of {k.name} not converged: {value} vs {fine} on the doubled grid",
            residual=change,
        )
    return fine


def sine_kernel(x, gamma=1.0):
    """γ·sin(x(λ-μ))/(π(λ-μ)) with diagonal γx/π."""
    return KernelSpec(
        name="sine",
        function=lambda a, b: gamma * np.sin(x * (a - b)) / (np.pi * (a - b)),
        diagonal=lambda a: gamma * x / np.pi + 0 * a,
        params={"x": x, "gamma": gamma},
    )


def sine_kernel_det(x, q=1.0, gamma=1.0, n=DEFAULT_NODES):
    """det[id - γ S_x] on [-q, q]."""
    return nystrom_det(sine_kernel(x, -gamma), (-q, q), n)


def _as_callable(f):
    if callable(f):
        return f
    value = complex(f)
    return lambda lam: value + 0 * np.asarray(lam, dtype=complex)


def _at(f, x):
    """Scalar value of a vectorized callable."""
    return complex(np.asarray(f(np.array([x], dtype=complex))).ravel()[0])


def gsk_kernel(nu, u, g, x):
    """
    Generalized sine kernel without the contour part of its transform:

        V(λ,μ) = 4 sin πν(λ) sin πν(μ) e(λ) e(μ) [h(λ) - h(μ)] / (2iπ(λ-μ))

    with e = exp(-ixu/2 - g/2), h = e⁻²/(e^{-2iπν} - 1).
    """
    nu, u, g = _as_callable(nu), _as_callable(u), _as_callable(g)

    def e(lam):
        return np.exp(-0.5j * x * u(lam) - 0.5 * g(lam))

    def h(lam):
        return e(lam) ** -2 / (np.exp(-2j * np.pi * nu(lam)) - 1.0)

    def function(a, b):
        sines = 4.0 * np.sin(np.pi * nu(a)) * np.sin(np.pi * nu(b))
        return sines * e(a) * e(b) * (h(a) - h(b)) / (2j * np.pi * (a - b))

    def diagonal(a):
        nu_a = nu(a)
        gap = np.exp(-2j * np.pi * nu_a) - 1.0
        du = derivative(u, a, 1)
        dg = derivative(g, a, 1)
        dnu = derivative(nu, a, 1)
        dh_ratio = (1j * x * du + dg) / gap + 2j * np.pi * dnu * np.exp(-2j * np.pi * nu_a) / gap**2
        return 4.0 * np.sin(np.pi * nu_a) ** 2 * dh_ratio / (2j * np.pi)

    return KernelSpec(name="gsk", function=function, diagonal=diagonal, params={"x": x})


def _c1_functional(nu, q, n):
    """C₁[ν]: antisymmetric double integral plus the two edge integrals."""
    quad = gauss_legendre(n, -q, q)
    lam = quad.nodes
    v = nu(lam)
    dv = derivative(nu, lam, 1)
    d2v = derivative(nu, lam, 2)
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, 1.0)
    inner = (dv[:, None] * v[None, :] - dv[None, :] * v[:, None]) / diff
    np.fill_diagonal(inner, v * d2v - dv * dv)
    double = 0.5 * quad.weights @ inner @ quad.weights
    nq, nmq = _at(nu, q), _at(nu, -q)
    right = nq * np.sum(quad.weights * (nq - v) / (q - lam))
    left = nmq * np.sum(quad.weights * (nmq - v) / (q + lam))
    return complex(double + right + left)


def gsk_prefactor(nu, u, g, q, x, n=DEFAULT_NODES):
    """
    Leading prefactor 𝒱⁽⁰⁾[ν, u, g] of det[id + V_x].

    Raises:
        DomainError: If |Re ν(±q)| >= 1/2 or u′(±q) <= 0
    """
    nu, u, g = _as_callable(nu), _as_callable(u), _as_callable(g)
    nq, nmq = _at(nu, q), _at(nu, -q)
    du_q = _at(lambda lam: derivative(u, lam, 1), q).real
    du_mq = _at(lambda lam: derivative(u, lam, 1), -q).real
    if du_q <= 0 or du_mq <= 0:
        raise DomainError("u′(±q) must be positive")

    c1 = _c1_functional(nu, q, n)
    log_b = (2.0 * ln_barnes_g(1.0 + nq) + 2.0 * ln_barnes_g(1.0 - nmq)
             + 0.5j * np.pi * (nq**2 - nmq**2) + c1
             - nq**2 * np.log(2.0 * q * du_q) - nmq**2 * np.log(2.0 * q * du_mq)
             + (nmq - nq) * np.log(2.0 * np.pi))
    quad = gauss_legendre(n, -q, q)
    lam = quad.nodes
    drift = np.sum(quad.weights * (1j * x * derivative(u, lam, 1) + derivative(g, lam, 1)) * nu(lam))
    return complex(np.exp(log_b - (nq**2 + nmq**2) * np.log(x) + drift))


def gsk_leading(nu, u, g, q, x, n=DEFAULT_NODES):
    """
    Three-term leading asymptotics Σ_{ε=-1,0,1} 𝒱⁽⁰⁾[ν+ε, u, g].

    Args:
        nu: ν as a callable or constant
        u: Oscillation phase, real with u′ > 0 on [-q, q]
        g: Amplitude exponent
        q: Interval half-length
        x: Large parameter

    Returns:
        complex

    Raises:
        DomainError: If |Re ν(±q)| >= 1/2
    """
    nu = _as_callable(nu)
    for edge in (q, -q):
        value = _at(nu, edge)
        if abs(value.real) >= 0.5:
            raise DomainError(f"|Re ν({edge:g})| = {abs(value.real):.3g} is not below 1/2")
    total = 0.0j
    for shift in (-1, 0, 1):
        shifted = (lambda s: lambda lam: nu(lam) + s)(shift)
        total += gsk_prefactor(shifted, u, g, q, x, n)
    return total


def _log_one_plus(F):
    F = _as_callable(F)
    return lambda lam: np.log(1.0 + F(lam))


def alpha_function(F, q, n=DEFAULT_NODES):
    """α(λ) = exp(-C[ln(1+F)](λ)) as a callable off [-q, q]."""
    log_f = _log_one_plus(F)

    def alpha(lam):
        return np.exp(-np.asarray(cauchy_transform(log_f, q, lam, n)))

    return alpha


def cshift_kernel(F, p, c, x):
    """c-shifted kernel W_x(λ, μ) with its diagonal F(λ)(x p′(λ) + 2/c)/2π."""
    F = _as_callable(F)

    def function(a, b):
        d = a - b
        phase = 0.5j * x * (p(a) - p(b))
        bracket = np.exp(phase) / (d + 1j * c) + np.exp(-phase) / (d - 1j * c)
        return 1j * c * F(a) * bracket / (2j * np.pi * d)

    def diagonal(a):
        return F(a) * (x * derivative(p, a, 1) + 2.0 / c) / (2.0 * np.pi)

    return KernelSpec(name="cshift", function=function, diagonal=diagonal, params={"c": c, "x": x})


def generalized_sine_kernel(F, p, x):
    """S̃_x(λ, μ) = F(λ) sin(x[p(λ)-p(μ)]/2)/(π(λ-μ))."""
    F = _as_callable(F)
    return KernelSpec(
        name="generalized-sine",
        function=lambda a, b: F(a) * np.sin(0.5 * x * (p(a) - p(b))) / (np.pi * (a - b)),
        diagonal=lambda a: F(a) * x * derivative(p, a, 1) / (2.0 * np.pi),
        params={"x": x},
    )


def shifted_loop_kernels(F, c, q, n=DEFAULT_NODES):
    """U±(λ,μ) = α(λ) α⁻¹(μ ∓ ic) / (2iπ(λ - μ ± ic))."""
    alpha = alpha_function(F, q, n)
    kernels = []
    for sign, name in ((1.0, "U+"), (-1.0, "U-")):
        def function(a, b, s=sign):
            # a varies along rows, b along columns
            rows = alpha(a[:, 0])[:, None]
            cols = 1.0 / alpha(b[0, :] - s * 1j * c)[None, :]
            return rows * cols / (2j * np.pi * (a - b + s * 1j * c))
        kernels.append(KernelSpec(name=name, function=function, params={"c": c}))
    return tuple(kernels)


def default_loop(q, c, points_per_side=64):
    return ContourDescriptor(kind="rectangle", half_width=q + 0.25 * c,
                             half_height=0.25 * c, points_per_side=points_per_side,
                             panel_length=0.1, core=q + 0.25 * c)


def cshift_factorization(F, p, c, q, x, loop=None, n=DEFAULT_NODES):
    """
    Both sides of the c-shifted determinant factorization.

    Args:
        F: Amplitude (callable or constant) with |arg(1+F)| < π
        p: Biholomorphic phase with p′ > 0 on [-q, q]
        c: Shift
        q: Interval half-length
        x: Large parameter
        loop: ContourDescriptor around [-q, q] inside |Im z| < c/2
        n: Nyström nodes on [-q, q]

    Returns:
        (lhs, rhs) = (det[id+W_x]/det[id+S̃_x], det[id+U₊]·det[id+U₋])

    Raises:
        DomainError: If the loop leaves the strip or does not enclose [-q, q]
        SingularityError: If det[id+S̃_x] vanishes
    """
    loop = loop or default_loop(q, c)
    if loop.kind == "rectangle":
        if loop.half_height + abs(loop.center.imag) > STRIP_FRACTION * c:
            raise DomainError(f"Loop half-height {loop.half_height} leaves the strip |Im z| < {STRIP_FRACTION}c")
        if loop.half_width <= q:
            raise DomainError("Loop does not enclose [-q, q]")
    elif loop.kind == "circle":
        if loop.radius > STRIP_FRACTION * c or loop.radius <= q:
            raise DomainError("Circle loop incompatible with the strip and the interval")

    if np.any(np.abs(np.angle(1.0 + _as_callable(F)(gauss_legendre(n, -q, q).nodes))) >= np.pi - 1e-12):
        raise DomainError("arg(1+F) reaches ±π on [-q, q]")

    w_det = nystrom_det(cshift_kernel(F, p, c, x), (-q, q), n)
    s_det = nystrom_det(generalized_sine_kernel(F, p, x), (-q, q), n)
    if s_det == 0:
        raise SingularityError("det[id + S̃_x] vanishes")
    u_plus, u_minus = shifted_loop_kernels(F, c, q, n)
    rhs = nystrom_det(u_plus, loop) * nystrom_det(u_minus, loop)
    lhs = w_det / s_det
    logger.debug(f"c-shift factorization x={x}: lhs={lhs:.10g}, rhs={rhs:.10g}")
    return lhs, rhs


@dataclass(frozen=True)
class LacunarySpec:
    """
    Symbol on the unit circle, size N and the replaced rows h_a -> p_a.

    coefficients, when given, returns the exact c_n for an integer array;
    otherwise they are read off the symbol by FFT.
    """

    symbol: object
    N: int
    holes: tuple = ()
    particles: tuple = ()
    coefficients: object = None

    def __post_init__(self):
        if len(self.holes) != len(self.particles):
            raise DomainError("Lacunary spec needs as many particles as holes")
        if len(set(self.holes)) != len(self.holes) or len(set(self.particles)) != len(self.particles):
            raise DomainError("Lacunary integers must be pairwise distinct")
        if any(not 1 <= h <= self.N for h in self.holes):
            raise DomainError(f"Hole integers must lie in [1, {self.N}]")
        if any(1 <= p <= self.N for p in self.particles):
            raise DomainError(f"Particle integers must lie outside [1, {self.N}]")

    @property
    def rows(self):
        """The sequence ℓ_a."""
        ell = list(range(1, self.N + 1))
        for h, p in zip(self.holes, self.particles):
            ell[h - 1] = p
        return np.array(ell)


def fourier_coefficients(symbol, points=FOURIER_POINTS):
    """c_n[f] for n in [-points/2, points/2), indexable modulo points."""
    z = np.exp(2j * np.pi * np.arange(points) / points)
    return np.fft.fft(np.asarray(symbol(z), dtype=complex) * np.ones_like(z)) / points


def _log_symbol_coefficients(symbol, points=FOURIER_POINTS):
    z = np.exp(2j * np.pi * np.arange(points) / points)
    values = np.asarray(symbol(z), dtype=complex) * np.ones_like(z)
    if np.any(values == 0):
        raise SingularityError("Symbol vanishes on the unit circle")
    phase = np.unwrap(np.angle(values))
    winding = int(np.rint((phase[-1] - phase[0] + np.angle(values[0] / values[-1])) / (2 * np.pi)))
    if winding != 0:
        raise DomainError(f"Symbol has winding number {winding}")
    log_values = np.log(np.abs(values)) + 1j * phase
    return np.fft.fft(log_values) / points


def toeplitz_det(coeffs, rows, N):
    """
    det_N[c_{ℓ_a - b}].

    coeffs is a callable c(n) on integer arrays, or an FFT array indexed
    modulo its length.
    """
    offsets = np.asarray(rows)[:, None] - np.arange(1, N + 1)[None, :]
    if callable(coeffs):
        return complex(np.linalg.det(np.asarray(coeffs(offsets), dtype=complex)))
    return complex(np.linalg.det(coeffs[offsets % len(coeffs)]))


def _gamma_inside(log_coeffs, z):
    half = len(log_coeffs) // 2
    series = np.polynomial.polynomial.polyval(z, log_coeffs[:half])
    return np.exp(-series)


def _gamma_outside(log_coeffs, z):
    half = len(log_coeffs) // 2
    negative = np.concatenate([[0.0], log_coeffs[::-1][:half - 1]])
    return np.exp(np.polynomial.polynomial.polyval(1.0 / z, negative))


def lacunary_matrix(spec, log_coeffs, radius_z=RADIUS_Z, radius_s=RADIUS_S, points=CIRCLE_POINTS):
    """Matrix M of the line-lacunary asymptotics by trapezoid double contour sums."""
    if not 1.0 > radius_z > radius_s > 0.0:
        raise DomainError("Circle radii must satisfy 1 > η_z > η_s > 0")
    theta = 2.0 * np.pi * np.arange(points) / points
    n = len(spec.holes)
    M = np.zeros((n, n), dtype=complex)
    for a, p in enumerate(spec.particles):
        for b, h in enumerate(spec.holes):
            if p > 0:
                z = radius_z * np.exp(1j * theta)
                s = radius_s * np.exp(1j * theta)
                ratio = _gamma_inside(log_coeffs, z)[:, None] / _gamma_inside(log_coeffs, s)[None, :]
                powers = s[None, :] ** (spec.N - p) * z[:, None] ** (h - spec.N - 1)
                sign = -1.0
            else:
                z = np.exp(1j * theta) / radius_z
                s = np.exp(1j * theta) / radius_s
                ratio = _gamma_outside(log_coeffs, s)[None, :] / _gamma_outside(log_coeffs, z)[:, None]
                powers = s[None, :] ** (-p) * z[:, None] ** (h - 1)
                sign = 1.0
            # dz/2iπ on a circle is z dθ/2π
            weights = (z / points)[:, None] * (s / points)[None, :]
            M[a, b] = sign * np.sum(weights * ratio * powers / (z[:, None] - s[None, :]))
    return M


def lacunary_toeplitz(spec, radius_z=RADIUS_Z, radius_s=RADIUS_S, points=CIRCLE_POINTS):
    """
    Exact line-lacunary Toeplitz determinant and its large-N prediction.

    Args:
        spec: LacunarySpec
        radius_z: Outer circle radius η_z of the double integrals
        radius_s: Inner circle radius η_s
        points: Trapezoid points per circle

    Returns:
        (exact, prediction)

    Raises:
        DomainError: If the symbol winds around 0
    """
    log_coeffs = _log_symbol_coefficients(spec.symbol)
    coeffs = spec.coefficients if spec.coefficients is not None else fourier_coefficients(spec.symbol)
    exact = toeplitz_det(coeffs, spec.rows, spec.N)
    plain = toeplitz_det(coeffs, np.arange(1, spec.N + 1), spec.N)
    if not spec.holes:
        return exact, plain
    M = lacunary_matrix(spec, log_coeffs, radius_z, radius_s, points)
    prediction = plain * complex(np.linalg.det(M))
    logger.debug(f"Lacunary N={spec.N}: exact={exact:.12g}, prediction={prediction:.12g}")
    return exact, prediction


def geometric_symbol(ratio):
    """f(z) = 1/((1 - rz)(1 - r/z)), Fourier coefficients r^|n|/(1 - r²)."""
    return lambda z: 1.0 / ((1.0 - ratio * z) * (1.0 - ratio / z))


def bessel_symbol(t):
    """f(z) = exp(t(z + 1/z))."""
    return lambda z: np.exp(t * (z + 1.0 / z))


def bessel_coefficients(t):
    """Exact c_n = I_n(2t) of bessel_symbol(t)."""
    return lambda n: iv(np.abs(n), 2.0 * t)


def bessel_lacunary_limit(t, hole_offset, particle_offset):
    """
    Large-N limit of the one-row lacunary ratio for bessel_symbol(t), with
    the hole at N - hole_offset and the particle at N + particle_offset:

        Σ_{m<j} (-1)^{k+m} t^{j+k} / ((j-m-1)! (k+m+1)!),  k = hole_offset, j = particle_offset.
    """
    k, j = hole_offset, particle_offset
    return sum((-1) ** (k + m) * t ** (j + k) / (math.factorial(j - m - 1) * math.factorial(k + m + 1))
               for m in range(j))


def szego_trend(t, sizes):
    """ln det_N[c_{a-b}] for f = exp(t(z + 1/z)); tends to t² as N grows."""
    coeffs = bessel_coefficients(t)
    trend = []
    for N in sizes:
        value = toeplitz_det(coeffs, np.arange(1, N + 1), N)
        trend.append(float(np.log(abs(value))))
    return trend
