"""
Thermodynamics of the Lieb-Liniger gas from the Yang-Yang equation

    ε(λ) = λ² - h - T ∫ K(λ-μ) ln(1 + e^{-ε(μ)/T}) dμ/2π

on a truncated grid [-Λ, Λ]. Beyond Λ the bare asymptote ε ≈ μ² - h is
substituted in every integral.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .linint import lieb_kernel
from .special import composite_gauss, gauss_legendre

logger = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-10
MAX_ITERATIONS = 10_000
DAMPING = 0.5
# Undamped iteration once the update falls below this
ACCELERATE_BELOW = 1e-3
NODES_PER_PANEL = 16
MAX_PANELS = 256
TAIL_NODES = 32


@dataclass(frozen=True)
class ThermalSolution:
    """Yang-Yang dressed energy sampled on a composite Gauss grid."""

    c: float
    h: float
    T: float
    cutoff: float
    nodes: np.ndarray
    weights: np.ndarray
    epsilon: np.ndarray
    iterations: int
    update: float

    def occupation_log(self):
        """ln(1 + e^{-ε/T}) on the nodes."""
        return np.logaddexp(0.0, -self.epsilon / self.T)

    def __call__(self, lam):
        """ε_T off the grid from the right-hand side of the equation."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        k = lieb_kernel(lam[:, None] - self.nodes[None, :], self.c)
        conv = (k * self.weights) @ self.occupation_log()
        return lam * lam - self.h - self.T * (conv + _tail_convolution(lam, self)) / (2.0 * np.pi)


def _tail_rule(cutoff):
    """Gauss nodes on [Λ, 2Λ] and its mirror image."""
    right = gauss_legendre(TAIL_NODES, cutoff, 2.0 * cutoff)
    nodes = np.concatenate([-right.nodes[::-1], right.nodes])
    weights = np.concatenate([right.weights[::-1], right.weights])
    return nodes, weights


def _tail_log(mu, h, T):
    return np.logaddexp(0.0, -(mu * mu - h) / T)


def _tail_convolution(lam, s):
    mu, w = _tail_rule(s.cutoff)
    k = lieb_kernel(lam[:, None] - mu[None, :], s.c)
    return (k * w) @ _tail_log(mu, s.h, s.T)


def minimal_cutoff(h, T, tol=FIXED_POINT_TOL):
    """Smallest admissible truncation 3·max(√(h + T ln(1/tol)), 1)."""
    return 3.0 * max(np.sqrt(max(h + T * np.log(1.0 / tol), 0.0)), 1.0)


def _grid(cutoff, T, n):
    if n is None:
        width = max(min(0.5, 4.0 * T), 2.0 * cutoff / MAX_PANELS)
        panels = int(np.ceil(2.0 * cutoff / width))
    else:
        panels = max(1, int(n) // NODES_PER_PANEL)
    return composite_gauss(np.linspace(-cutoff, cutoff, panels + 1), NODES_PER_PANEL)


def yang_yang_solve(c, h, T, cutoff=None, n=None, initial=None, tol=FIXED_POINT_TOL,
                    max_iter=MAX_ITERATIONS):
    """
    Solve the Yang-Yang equation by damped fixed-point iteration.

    Args:
        c: Coupling (c > 0)
        h: Chemical potential
        T: Temperature (T > 0)
        cutoff: Truncation Λ (default: minimal_cutoff)
        n: Total number of grid nodes (default: panels of width ≤ 4T)
        initial: Callable starting guess (default λ² - h)
        tol: Sup-norm of the final update
        max_iter: Iteration cap

    Returns:
        ThermalSolution

    Raises:
        DomainError: For T <= 0, c <= 0 or a cutoff below the minimum
        ConvergenceError: If the iteration does not settle
    """
    if T <= 0:
        raise DomainError(f"Temperature must be positive, got T={T}")
    if c <= 0:
        raise DomainError(f"Coupling must be positive, got c={c}")
    needed = minimal_cutoff(h, T, tol)
    cutoff = needed if cutoff is None else float(cutoff)
    if cutoff < needed * (1.0 - 1e-12):
        raise DomainError(f"Cutoff Λ={cutoff} below the minimum {needed:.4g} for h={h}, T={T}")

    quad = _grid(cutoff, T, n)
    x, w = quad.nodes, quad.weights
    kw = lieb_kernel(x[:, None] - x[None, :], c) * w[None, :] / (2.0 * np.pi)
    mu, wt = _tail_rule(cutoff)
    tail = (lieb_kernel(x[:, None] - mu[None, :], c) * wt) @ _tail_log(mu, h, T) / (2.0 * np.pi)
    bare = x * x - h - T * tail

    eps = x * x - h if initial is None else np.asarray(initial(x), dtype=float)
    damping = DAMPING
    update = np.inf
    for iteration in range(1, max_iter + 1):
        target = bare - T * (kw @ np.logaddexp(0.0, -eps / T))
        step = target - eps
        update = float(np.max(np.abs(step)))
        eps = eps + damping * step
        if update <= tol:
            break
        if update < ACCELERATE_BELOW:
            damping = 1.0
    else:
        logger.warning(f"Yang-Yang iteration stalled: c={c}, h={h}, T={T}, update={update:.2e}")
        raise ConvergenceError(
            f"Yang-Yang equation did not converge in {max_iter} iterations at T={T}",
            iterations=max_iter, residual=update,
        )
    logger.debug(f"Yang-Yang c={c}, h={h}, T={T}: {iteration} iterations on {len(x)} nodes, "
                 f"update {update:.2e}")
    return ThermalSolution(
        c=float(c), h=float(h), T=float(T), cutoff=cutoff, nodes=x, weights=w,
        epsilon=eps, iterations=iteration, update=update,
    )


def yang_yang_log_integral(s):
    """∫ ln(1 + e^{-ε/T}) dλ/2π including the analytic tail."""
    mu, wt = _tail_rule(s.cutoff)
    inner = np.dot(s.weights, s.occupation_log())
    outer = np.dot(wt, _tail_log(mu, s.h, s.T))
    return float((inner + outer) / (2.0 * np.pi))


def free_energy_nls(s):
    """
    Free energy per unit length f = -T ∫ ln(1 + e^{-ε/T}) dλ/2π.

    As T → 0 this tends to ∫_{-q}^{q} ε(λ) dλ/2π with the zero-temperature
    dressed energy.
    """
    return -s.T * yang_yang_log_integral(s)


def density_from_free_energy(c, h, T, step=1e-4, cutoff=None, n=None):
    """
    Particle density -∂f/∂h by a central difference in h.

    Both solves share one grid so the difference is not polluted by
    discretization changes.
    """
    cutoff = minimal_cutoff(h + step, T) if cutoff is None else cutoff
    upper = free_energy_nls(yang_yang_solve(c, h + step, T, cutoff, n))
    lower = free_energy_nls(yang_yang_solve(c, h - step, T, cutoff, n))
    return -(upper - lower) / (2.0 * step)
