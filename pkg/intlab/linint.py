"""
Linear integral equations of the Lieb-Liniger model at zero temperature.

Nyström discretization on Gauss-Legendre nodes of [-q, q]; off-node values
come from the Nyström interpolation formula itself, which is exact for the
discretized equation and analytic in the strip |Im λ| < c.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, SingularityError
from .special import gauss_legendre

logger = logging.getLogger(__name__)

DEFAULT_NODES = 64

# Beyond this condition number the discretized operator counts as singular
MAX_CONDITION = 1e13

BRACKET_DOUBLINGS = 60
# Smallest relative tolerance brentq accepts
BRENT_RTOL = 4.0 * np.finfo(float).eps


def lieb_kernel(lam, c, order=0):
    """K(λ) = 2c/(λ²+c²) and its first two derivatives."""
    lam = np.asarray(lam)
    d = lam * lam + c * c
    if order == 0:
        return 2.0 * c / d
    if order == 1:
        return -4.0 * c * lam / d**2
    if order == 2:
        return (12.0 * c * lam * lam - 4.0 * c**3) / d**3
    raise DomainError(f"Unsupported kernel derivative order {order}")


def lieb_phase(lam, c):
    """Bare phase θ(λ) = i ln((ic+λ)/(ic-λ)) = 2 arctan(λ/c)."""
    return 2.0 * np.arctan(np.asarray(lam) / c)


@dataclass(frozen=True)
class NystromSolution:
    """
    Discrete solution of f(λ) - ∫ K(λ,μ) f(μ) dμ/2π = g(λ).

    values holds f on the nodes (one column per right-hand side). Calling
    the object evaluates the Nyström interpolant anywhere K and g are
    defined.
    """

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    kernel: object
    rhs: object
    condition: float
    residual: float

    def __call__(self, lam, order=0):
        lam = np.atleast_1d(np.asarray(lam))
        k = _kernel_eval(self.kernel, lam[:, None], self.nodes[None, :], order)
        g = _rhs_eval(self.rhs, lam, order)
        out = g + (k * self.weights[None, :]) @ self.values / (2.0 * np.pi)
        return out


def _kernel_eval(kernel, x, y, order):
    return kernel(x, y) if order == 0 else kernel(x, y, order=order)


def _rhs_eval(rhs, x, order):
    return rhs(x) if order == 0 else rhs(x, order=order)


def solve_fredholm2(kernel, rhs, a, b, n=DEFAULT_NODES):
    """
    Solve f - K f / 2π = g on [a, b] by the Nyström method.

    Args:
        kernel: Callable K(x, y) (optionally accepting order= for x-derivatives)
        rhs: Callable g(x) (optionally accepting order=)
        a: Left endpoint
        b: Right endpoint
        n: Number of Gauss-Legendre nodes

    Returns:
        NystromSolution

    Raises:
        SingularityError: If id - K/2π is numerically singular
    """
    quad = gauss_legendre(n, a, b)
    x = quad.nodes
    mat = np.eye(n) - _kernel_eval(kernel, x[:, None], x[None, :], 0) * quad.weights[None, :] / (2.0 * np.pi)
    condition = np.linalg.cond(mat)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularityError(f"Nyström operator singular (condition number {condition:.2e})")
    g = np.asarray(_rhs_eval(rhs, x, 0))
    values = lu_solve(lu_factor(mat), g)
    residual = float(np.max(np.abs(mat @ values - g)))
    logger.debug(f"Nyström solve n={n}: cond={condition:.3e}, residual={residual:.2e}")
    return NystromSolution(
        nodes=x, weights=quad.weights, values=values, kernel=kernel, rhs=rhs,
        condition=condition, residual=residual,
    )


@dataclass(frozen=True)
class DressedData:
    """Dressed energy, momentum, charge and phase at coupling c and field h."""

    c: float
    h: float
    q: float
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    lu: tuple
    eps_nodes: np.ndarray
    dp_nodes: np.ndarray
    z_nodes: np.ndarray
    condition: float

    def _interp(self, values, rhs, lam, order):
        lam = np.atleast_1d(np.asarray(lam))
        diff = lam[:, None] - self.nodes[None, :]
        k = lieb_kernel(diff, self.c, order)
        return rhs(lam) + (k * self.weights) @ values / (2.0 * np.pi)

    def epsilon(self, lam, order=0):
        """Dressed energy ε(λ) or its λ-derivatives."""
        def rhs(x):
            return (x * x - self.h) if order == 0 else (2.0 * x if order == 1 else 2.0 + 0 * x)
        return self._interp(self.eps_nodes, rhs, lam, order)

    def dmomentum(self, lam, order=0):
        """p′(λ) (order 0) and its derivatives."""
        def rhs(x):
            return 1.0 + 0 * x if order == 0 else 0 * x
        return self._interp(self.dp_nodes, rhs, lam, order)

    def momentum(self, lam):
        """Dressed momentum p(λ) = λ + ∫θ(λ-μ) p′(μ) dμ/2π."""
        lam = np.atleast_1d(np.asarray(lam))
        theta = lieb_phase(lam[:, None] - self.nodes[None, :], self.c)
        return lam + (theta * self.weights) @ self.dp_nodes / (2.0 * np.pi)

    def charge(self, lam, order=0):
        """Dressed charge Z(λ) and its derivatives."""
        def rhs(x):
            return 1.0 + 0 * x if order == 0 else 0 * x
        return self._interp(self.z_nodes, rhs, lam, order)

    def phi_nodes(self, nu):
        """Dressed phase φ(μ_j, ν) on the nodes, one column per ν."""
        nu = np.atleast_1d(np.asarray(nu))
        rhs = lieb_phase(self.nodes[:, None] - nu[None, :], self.c) / (2.0 * np.pi)
        return lu_solve(self.lu, rhs)

    def phi(self, lam, nu, order=0):
        """
        Dressed phase φ(λ, ν) for arrays λ (rows) and ν (columns).

        order selects ∂_λ derivatives up to 2.
        """
        lam = np.atleast_1d(np.asarray(lam))
        nu = np.atleast_1d(np.asarray(nu))
        cols = self.phi_nodes(nu)
        diff = lam[:, None] - nu[None, :]
        if order == 0:
            bare = lieb_phase(diff, self.c) / (2.0 * np.pi)
        else:
            bare = lieb_kernel(diff, self.c, order - 1) / (2.0 * np.pi)
        k = lieb_kernel(lam[:, None] - self.nodes[None, :], self.c, order)
        return bare + (k * self.weights) @ cols / (2.0 * np.pi)

    @property
    def density(self):
        """Particle density D = p(q)/π."""
        return float(self.momentum(self.q)[0].real) / np.pi

    @property
    def fermi_momentum(self):
        return float(self.momentum(self.q)[0].real)

    @property
    def sound_velocity(self):
        return float((self.epsilon(self.q, 1)[0] / self.dmomentum(self.q)[0]).real)

    def identity_residuals(self, probe=None):
        """
        Residuals of Z(λ) = 1 + φ(λ,-q) - φ(λ,q) and Z⁻¹(q) = 1 + φ(-q,q) - φ(q,q).

        Returns:
            tuple: (sup over the probe grid, scalar boundary residual)
        """
        if probe is None:
            probe = np.linspace(-2.0 * self.q, 2.0 * self.q, 41)
        phis = self.phi(probe, [-self.q, self.q])
        first = np.max(np.abs(self.charge(probe) - 1.0 - phis[:, 0] + phis[:, 1]))
        edge = self.phi([-self.q, self.q], [self.q])[:, 0]
        second = abs(1.0 / self.charge(self.q)[0] - 1.0 - edge[0] + edge[1])
        return float(first), float(second)


def _dressed_energy_nodes(c, h, q, n):
    quad = gauss_legendre(n, -q, q)
    x = quad.nodes
    mat = np.eye(n) - lieb_kernel(x[:, None] - x[None, :], c) * quad.weights[None, :] / (2.0 * np.pi)
    lu = lu_factor(mat)
    return quad, mat, lu, lu_solve(lu, x * x - h)


def _edge_energy(c, h, q, n):
    quad, _, _, eps = _dressed_energy_nodes(c, h, q, n)
    return q * q - h + np.sum(lieb_kernel(q - quad.nodes, c) * quad.weights * eps) / (2.0 * np.pi)


def dressed_functions(q, c, h, n=DEFAULT_NODES):
    """
    Solve the dressed energy, momentum derivative and charge on [-q, q].

    Args:
        q: Fermi boundary
        c: Coupling
        h: Field (chemical potential)
        n: Number of nodes

    Returns:
        DressedData

    Raises:
        SingularityError: If id - K/2π is numerically singular
    """
    quad, mat, lu, eps = _dressed_energy_nodes(c, h, q, n)
    condition = np.linalg.cond(mat)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularityError(f"id - K/2π singular at c={c}, q={q}")
    ones = np.ones(n)
    dp = lu_solve(lu, ones)
    z = dp.copy()
    return DressedData(
        c=c, h=h, q=q, n=n, nodes=quad.nodes, weights=quad.weights, lu=lu,
        eps_nodes=eps, dp_nodes=dp, z_nodes=z, condition=condition,
    )


def fermi_boundary(c, h, n=DEFAULT_NODES):
    """
    Fermi boundary q with ε(q|q) = 0, and the dressed data there.

    Args:
        c: Coupling (c > 0)
        h: Field (h > 0)
        n: Number of nodes

    Returns:
        DressedData at the Fermi boundary

    Raises:
        DomainError: If h <= 0 or c <= 0
        ConvergenceError: If no sign change is found
    """
    if h <= 0:
        raise DomainError(f"Fermi boundary needs h > 0, got h={h}")
    if c <= 0:
        raise DomainError(f"Coupling must be positive, got c={c}")
    lo, hi = 1e-9 * np.sqrt(h), 2.0 * np.sqrt(h)
    for _ in range(BRACKET_DOUBLINGS):
        if _edge_energy(c, h, hi, n) > 0:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise ConvergenceError(f"No Fermi boundary found for c={c}, h={h}")
    q = brentq(lambda x: _edge_energy(c, h, x, n), lo, hi, xtol=1e-14, rtol=BRENT_RTOL, maxiter=200)
    logger.debug(f"Fermi boundary c={c}, h={h}: q={q:.15g}")
    return dressed_functions(q, c, h, n)


def field_for_density(c, density, n=DEFAULT_NODES):
    """Field h whose ground state has density p(q)/π equal to the target."""
    if density <= 0:
        raise DomainError(f"Density must be positive, got {density}")

    def gap(h):
        return fermi_boundary(c, h, n).density - density

    lo, hi = 1e-6, 1.0
    while gap(hi) < 0:
        lo, hi = hi, 4.0 * hi
    return brentq(gap, lo, hi, xtol=1e-14, rtol=BRENT_RTOL)


class ShiftFunction:
    """
    F(λ) = (iβ - κ/2) Z(λ) - κ φ(λ, q) - Σ [φ(λ, μ_p) - φ(λ, μ_h)].

    Callable with order=0..2 for λ-derivatives.
    """

    def __init__(self, dressed, beta, kappa, particles, holes):
        self.dressed = dressed
        self.beta = complex(beta)
        self.kappa = int(kappa)
        self.particles = np.atleast_1d(np.asarray(particles, dtype=float))
        self.holes = np.atleast_1d(np.asarray(holes, dtype=float))

    def __call__(self, lam, order=0):
        d = self.dressed
        lam = np.atleast_1d(np.asarray(lam))
        out = (1j * self.beta - 0.5 * self.kappa) * d.charge(lam, order)
        out = out - self.kappa * d.phi(lam, [d.q], order)[:, 0]
        if self.particles.size:
            out = out - d.phi(lam, self.particles, order).sum(axis=1)
        if self.holes.size:
            out = out + d.phi(lam, self.holes, order).sum(axis=1)
        return out


def shift_function(d, beta, kappa, particles=(), holes=()):
    """
    Thermodynamic shift function of an excited state.

    Args:
        d: DressedData
        beta: Twist β
        kappa: Particle-number difference κ
        particles: Particle rapidities (outside [-q, q])
        holes: Hole rapidities (inside [-q, q])

    Returns:
        ShiftFunction

    Raises:
        DomainError: If a hole lies outside the Fermi zone
    """
    if len(particles) != len(holes):
        raise DomainError("Particle and hole counts differ")
    for mu in holes:
        if abs(mu) > d.q * (1.0 + 1e-12):
            raise DomainError(f"Hole rapidity {mu} outside [-q, q] (q={d.q})")
    for mu in particles:
        if abs(mu) < d.q:
            logger.warning(f"Particle rapidity {mu} inside the Fermi zone (q={d.q})")
    return ShiftFunction(d, beta, kappa, particles, holes)


def fermi_boundary_values(d, ell):
    """F^±_ℓ = ℓ (Z(q) - 1) ± Z⁻¹(q)/2."""
    zq = float(d.charge(d.q)[0].real)
    base = ell * (zq - 1.0)
    return base + 0.5 / zq, base - 0.5 / zq
