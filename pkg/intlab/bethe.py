"""
Finite-volume logarithmic Bethe equations of the Lieb-Liniger model.

    L μ_r + Σ_p θ(μ_r - μ_p) = 2π (ℓ_r - (N+1)/2) + 2iπβ

The twist is removed by the shift μ → μ - 2iπβ/L, after which the
equations are the gradient of the strictly convex Yang-Yang action and are
solved by damped Newton with a backtracking line search.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError
from .linint import BRENT_RTOL, lieb_kernel, lieb_phase

logger = logging.getLogger(__name__)

MIN_COUPLING = 1e-3
MAX_NEWTON = 200
BETHE_TOL = 1e-12


@dataclass(frozen=True)
class BetheState:
    """Solved Bethe roots with their quantum integers."""

    L: float
    N: int
    c: float
    integers: np.ndarray
    roots: np.ndarray
    beta: complex = 0.0
    residual: float = 0.0
    iterations: int = 0

    @property
    def real_roots(self):
        """Roots with the twist shift 2iπβ/L removed."""
        return (self.roots - 2j * np.pi * self.beta / self.L).real

    def counting(self, omega, order=0):
        """
        Counting function ξ̂(ω) = ω/2π + Σθ(ω-μ_a)/(2πL) + (N+1)/(2L) - iβ/L.

        order=1 gives ξ̂′.
        """
        omega = np.atleast_1d(np.asarray(omega))
        diff = omega[:, None] - self.roots[None, :]
        if order == 1:
            return 1.0 / (2.0 * np.pi) + lieb_kernel(diff, self.c).sum(axis=1) / (2.0 * np.pi * self.L)
        value = (omega / (2.0 * np.pi)
                 + lieb_phase(diff, self.c).sum(axis=1) / (2.0 * np.pi * self.L)
                 + (self.N + 1) / (2.0 * self.L) - 1j * self.beta / self.L)
        return value if np.iscomplexobj(self.roots) or self.beta != 0 else value.real

    def energy(self, h=0.0):
        """E = Σλ² - hN."""
        return complex(np.sum(self.roots**2) - h * self.N)

    def momentum(self):
        return complex(np.sum(self.roots))


@dataclass(frozen=True)
class ExcitationSpec:
    """Particle/hole integers relative to the background labels 1..n_background."""

    particles: tuple
    holes: tuple
    n_background: int
    ell: int = 0
    right_particles: tuple = ()
    left_particles: tuple = ()
    right_holes: tuple = ()
    left_holes: tuple = ()


@dataclass(frozen=True)
class ExcitationEnergies:
    dP_exact: float
    dE_exact: float
    dP_thermo: float
    dE_thermo: float


def yang_yang_potential(x, c):
    """Θ(x) = 2x arctan(x/c) - c ln(1 + x²/c²), with Θ′ = θ."""
    return 2.0 * x * np.arctan(x / c) - c * np.log1p((x / c) ** 2)


def yang_yang_action(x, L, c, targets):
    """Convex Yang-Yang action whose gradient is the Bethe system."""
    diff = x[:, None] - x[None, :]
    return 0.5 * L * np.dot(x, x) + 0.5 * yang_yang_potential(diff, c).sum() - np.dot(targets, x)


def _gradient(x, L, c, targets):
    diff = x[:, None] - x[None, :]
    return L * x + lieb_phase(diff, c).sum(axis=1) - targets


def _hessian(x, L, c):
    kmat = lieb_kernel(x[:, None] - x[None, :], c)
    return np.diag(L + kmat.sum(axis=1)) - kmat


def solve_bethe(L, N, c, integers=None, beta=0.0, tol=BETHE_TOL, max_iter=MAX_NEWTON):
    """
    Solve the twisted logarithmic Bethe equations.

    Args:
        L: Volume
        N: Particle number
        c: Coupling (c >= 1e-3)
        integers: Strictly increasing quantum integers (default 1..N)
        beta: Twist β
        tol: Sup-norm tolerance on the equations divided by L
        max_iter: Newton iteration cap

    Returns:
        BetheState

    Raises:
        DomainError: On bad integers or too small coupling
        ConvergenceError: If Newton does not converge
    """
    if c < MIN_COUPLING:
        raise DomainError(f"Coupling {c} below {MIN_COUPLING}: colliding roots")
    integers = np.arange(1, N + 1) if integers is None else np.asarray(integers, dtype=int)
    if len(integers) != N:
        raise DomainError(f"Expected {N} integers, got {len(integers)}")
    if N > 1 and np.any(np.diff(integers) <= 0):
        raise DomainError("Quantum integers must be strictly increasing")

    targets = 2.0 * np.pi * (integers - 0.5 * (N + 1))
    x = targets / L
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        if N == 0:
            residual = 0.0
            break
        grad = _gradient(x, L, c, targets)
        residual = np.max(np.abs(grad)) / L
        if residual <= tol:
            break
        step = np.linalg.solve(_hessian(x, L, c), grad)
        action = yang_yang_action(x, L, c, targets)
        slope = np.dot(grad, step)
        alpha = 1.0
        while alpha > 1e-8:
            trial = x - alpha * step
            if yang_yang_action(trial, L, c, targets) <= action - 1e-4 * alpha * slope + 1e-13 * abs(action):
                break
            alpha *= 0.5
        x = x - alpha * step
    else:
        logger.warning(f"Bethe Newton stalled: L={L}, N={N}, c={c}, residual={residual:.2e}")
        raise ConvergenceError(
            f"Bethe equations did not converge in {max_iter} iterations (residual {residual:.2e})",
            iterations=max_iter, residual=residual,
        )

    roots = x + 2j * np.pi * beta / L if beta != 0 else x
    logger.debug(f"Bethe L={L}, N={N}, c={c}: residual {residual:.2e} after {iteration} steps")
    return BetheState(
        L=float(L), N=int(N), c=float(c), integers=integers, roots=roots,
        beta=complex(beta) if beta != 0 else 0.0, residual=float(residual), iterations=iteration,
    )


def counting_function(s, omega):
    """ξ̂(ω) of a solved state."""
    return s.counting(omega)


def background_root(s, a):
    """
    Background rapidity μ_a solving L ξ̂(μ_a) = a.

    Args:
        s: BetheState
        a: Integer label (need not be occupied)

    Returns:
        The rapidity (complex-shifted by 2iπβ/L for twisted states)
    """
    x = s.real_roots
    target = a / s.L

    def gap(w):
        return (w / (2.0 * np.pi)
                + lieb_phase(w - x, s.c).sum() / (2.0 * np.pi * s.L)
                + (s.N + 1) / (2.0 * s.L) - target)

    guess = 2.0 * np.pi * (a - 0.5 * (s.N + 1)) / s.L
    width = np.pi * s.N / s.L + 1.0
    root = brentq(gap, guess - width, guess + width, xtol=1e-15, rtol=BRENT_RTOL)
    return root + 2j * np.pi * s.beta / s.L if s.beta != 0 else root


def excitation_from_integers(ground_integers, excited_integers):
    """
    Particle/hole integers of an excited state relative to consecutive labels.

    The background is 1..M with M the number of excited-state integers, so a
    field-type excitation (M = N+1) is measured against 1..N+1.

    Returns:
        ExcitationSpec with the ℓ-class local decomposition

    Raises:
        DomainError: If the excited state does not have N or N+1 distinct integers
    """
    excited = set(int(v) for v in excited_integers)
    extra = len(excited) - len(ground_integers)
    if extra not in (0, 1) or len(excited) != len(excited_integers):
        raise DomainError(f"Excited state needs N or N+1 distinct integers, got {sorted(excited)} "
                          f"against N = {len(ground_integers)}")
    m = len(excited)
    background = set(range(1, m + 1))
    particles = tuple(sorted(excited - background))
    holes = tuple(sorted(background - excited))
    right_p = tuple(p - m for p in particles if p > m)
    left_p = tuple(1 - p for p in particles if p < 1)
    right_h = tuple(sorted(m + 1 - h for h in holes if 2 * h > m))
    left_h = tuple(h for h in holes if 2 * h <= m)
    ell = len(right_p) - len(right_h)
    return ExcitationSpec(
        particles=particles, holes=holes, n_background=m, ell=ell,
        right_particles=right_p, left_particles=left_p,
        right_holes=right_h, left_holes=left_h,
    )


def thermodynamic_rapidity(dressed, a, L):
    """μ = ξ⁻¹(a/L) with ξ(ω) = p(ω)/2π + D/2."""
    target = 2.0 * np.pi * (a / L - 0.5 * dressed.density)
    width = abs(target) + 10.0 + 2.0 * np.pi * dressed.density
    return brentq(lambda w: dressed.momentum(w)[0].real - target, -width, width, xtol=1e-14)


def excitation_ep(ground, excited, dressed=None):
    """
    Exact and thermodynamic momentum/energy of an excitation.

    Args:
        ground: Ground BetheState
        excited: Excited BetheState (same L and c)
        dressed: DressedData at the ground-state density (enables the
            thermodynamic values and fixes h)

    Returns:
        ExcitationEnergies (thermodynamic entries NaN without dressed data
        or when particle numbers differ)

    Raises:
        DomainError: On mismatched volumes or couplings
    """
    if abs(ground.L - excited.L) > 1e-12 or abs(ground.c - excited.c) > 1e-12 * max(1.0, ground.c):
        raise DomainError("Mismatched volume or coupling between states")
    h = dressed.h if dressed is not None else 0.0
    dp = (excited.momentum() - ground.momentum()).real
    de = (excited.energy(h) - ground.energy(h)).real

    dp_th = de_th = float("nan")
    if dressed is not None and excited.N == ground.N:
        spec = excitation_from_integers(ground.integers, excited.integers)
        mu_p = [thermodynamic_rapidity(dressed, p, ground.L) for p in spec.particles]
        mu_h = [thermodynamic_rapidity(dressed, k, ground.L) for k in spec.holes]
        dp_th = dressed.momentum(mu_p).real.sum() - dressed.momentum(mu_h).real.sum() if mu_p else 0.0
        de_th = dressed.epsilon(mu_p).real.sum() - dressed.epsilon(mu_h).real.sum() if mu_p else 0.0
    return ExcitationEnergies(float(dp), float(de), float(dp_th), float(de_th))


def finite_size_shift(ground, excited, lam):
    """F̂(λ) = L (ξ̂_ground(λ) - ξ̂_excited(λ))."""
    return ground.L * (ground.counting(lam) - excited.counting(lam))
