"""
Spectrum of the closed quantum Toda chain

    H = Σ p_a²/2 + e^{x_{N+1} - x_1} + Σ_{a=1}^{N} e^{x_a - x_{a+1}}

from the non-linear integral equation

    ln Y(λ) = ∫ K(λ-μ) ln(1 + Y(μ) / (ϑ(μ - iħ/2) ϑ(μ + iħ/2))) dμ,
    K(λ) = ħ / (π(λ² + ħ²)),  ϑ(λ) = Π (λ - σ_k),

and the quantization conditions on the zeros σ_k of the Wronskian. The
solutions 𝔮± of the Baxter equation, the transfer-matrix eigenvalue t(λ)
and the Newton sums of its zeros are built from Y.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import ConvergenceError, DomainError, SingularityError
from .special import Quadrature, composite_gauss, gauss_legendre, graded_breaks, ln_gamma

logger = logging.getLogger(__name__)

TBA_TOL = 1e-13
MAX_TBA = 5000
NODES_PER_PANEL = 16
TAIL_NODES = 32
GRID_FACTOR = 10.0
# Panels of length PANEL_FRACTION·ħ within CORE_MARGIN·ħ of the σ's
PANEL_FRACTION = 0.25
CORE_MARGIN = 2.0

QUANT_TOL = 1e-10
MAX_QUANT = 40
FD_STEP = 1e-6
SINGULAR = 1e-300
# Distance from the real axis below which Cauchy integrals are refused
CAUCHY_CLEARANCE = 1e-3

WRONSKIAN_POINTS = 20
EXTRA_CHECK_POINTS = 3
POLE_CLEARANCE = 0.3


def toda_kernel(lam, hbar):
    """K(λ) = ħ / (π(λ² + ħ²))."""
    return hbar / (np.pi * (lam * lam + hbar * hbar))


def theta_polynomial(sigma, lam):
    """ϑ(λ) = Π (λ - σ_k)."""
    lam = np.asarray(lam, dtype=complex)
    return np.prod(lam[..., None] - np.asarray(sigma, dtype=complex), axis=-1)


@dataclass(frozen=True)
class TodaSector:
    """
    Quantum numbers of one eigenstate.

    integers are the n_k of the quantization conditions, matched to σ
    sorted in increasing order; zeta is the Bloch phase (|ζ| = 1) and
    momentum the total momentum ε.
    """

    hbar: float
    integers: tuple
    momentum: float = 0.0
    zeta: complex = 1.0 + 0.0j

    def __post_init__(self):
        if self.hbar <= 0:
            raise DomainError(f"ħ must be positive, got {self.hbar}")
        if abs(abs(self.zeta) - 1.0) > 1e-12:
            raise DomainError(f"Bloch phase must have |ζ| = 1, got {self.zeta}")
        if list(self.integers) != sorted(self.integers):
            raise DomainError(f"Quantization integers must be non-decreasing: {self.integers}")

    @property
    def particles(self):
        return len(self.integers)


@dataclass(frozen=True)
class TbaSolution:
    """ln Y sampled on the real line (composite Gauss body plus mapped tails)."""

    sigma: np.ndarray
    hbar: float
    nodes: np.ndarray
    weights: np.ndarray
    log_y: np.ndarray
    iterations: int
    update: float

    @property
    def particles(self):
        return len(self.sigma)

    def denominator(self, lam):
        """ϑ(λ - iħ/2) ϑ(λ + iħ/2)."""
        half = 0.5j * self.hbar
        return theta_polynomial(self.sigma, lam - half) * theta_polynomial(self.sigma, lam + half)

    def log_one_plus(self):
        """ln(1 + Y/ϑϑ) on the nodes; real and positive."""
        den = np.abs(theta_polynomial(self.sigma, self.nodes + 0.5j * self.hbar)) ** 2
        return np.log1p(np.exp(self.log_y) / den)

    def log_y_at(self, lam):
        """ln Y off the grid, valid for |Im λ| < ħ."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        if np.any(np.abs(lam.imag) >= self.hbar):
            raise DomainError("ln Y is evaluated only in the strip |Im λ| < ħ")
        k = toda_kernel(lam[:, None] - self.nodes[None, :], self.hbar)
        return (k * self.weights) @ self.log_one_plus()

    def log_one_plus_at(self, lam):
        """Continuation of ln(1 + Y/ϑϑ) off the real line (defined modulo 2πi)."""
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        return np.log(1.0 + np.exp(self.log_y_at(lam)) / self.denominator(lam))


def _check_sigma(sigma, hbar):
    sigma = np.sort_complex(np.asarray(sigma, dtype=complex))
    if hbar <= 0:
        raise DomainError(f"ħ must be positive, got {hbar}")
    if np.any(np.abs(sigma.imag) >= 0.5 * hbar):
        raise DomainError(f"σ must satisfy |Im σ| < ħ/2, got {sigma}")
    conj = np.sort_complex(sigma.conj())
    if np.max(np.abs(conj - sigma)) > 1e-10:
        raise DomainError(f"σ set is not self-conjugate: {sigma}")
    return sigma


def toda_grid(sigma, hbar, cutoff=None, panel=None):
    """
    Quadrature on the real line for the Toda equations.

    Gauss panels of length panel (default ħ/4) cover the σ's with a
    margin of 2ħ, then grow geometrically up to Λ = 10(max|σ| + ħ); the
    tails beyond ±Λ are mapped onto (0, 1] by μ = Λ/t.
    """
    sigma = np.asarray(sigma, dtype=complex)
    center = float(np.mean(sigma.real))
    spread = float(np.max(np.abs(sigma - center)))
    cutoff = GRID_FACTOR * (spread + hbar) if cutoff is None else float(cutoff)
    panel = PANEL_FRACTION * hbar if panel is None else float(panel)
    half = graded_breaks(cutoff, panel, spread + CORE_MARGIN * hbar)
    body = composite_gauss(np.concatenate([-half[::-1], half[1:]]), NODES_PER_PANEL)
    t = gauss_legendre(TAIL_NODES, 0.0, 1.0)
    tail = cutoff / t.nodes
    tail_w = cutoff * t.weights / t.nodes**2
    nodes = np.concatenate([-tail, body.nodes, tail[::-1]]) + center
    weights = np.concatenate([tail_w, body.weights, tail_w[::-1]])
    return Quadrature(nodes=nodes, weights=weights, domain=(-np.inf, np.inf))


def tba_solve(sigma, hbar, grid=None, initial=1.0, tol=TBA_TOL, max_iter=MAX_TBA):
    """
    Solve the Toda non-linear integral equation by fixed-point iteration.

    The map is a contraction on positive functions, so the iteration
    keeps ln Y ≥ 0 and converges from any positive start.

    Args:
        sigma: Self-conjugate set of σ_k with |Im σ_k| < ħ/2
        hbar: Planck constant
        grid: Quadrature on the real line (default: toda_grid)
        initial: Constant starting value of Y
        tol: Sup-norm of the final update of ln Y
        max_iter: Iteration cap

    Returns:
        TbaSolution

    Raises:
        DomainError: On invalid σ
        SingularityError: If ϑ(μ ± iħ/2) vanishes on the grid
        ConvergenceError: If the iteration does not settle
    """
    sigma = _check_sigma(sigma, hbar)
    grid = toda_grid(sigma, hbar) if grid is None else grid
    x, w = grid.nodes, grid.weights
    den = np.abs(theta_polynomial(sigma, x + 0.5j * hbar)) ** 2
    if np.min(den) < SINGULAR:
        raise SingularityError("|ϑ(μ + iħ/2)|² vanishes on the grid")
    kw = toda_kernel(x[:, None] - x[None, :], hbar) * w[None, :]

    log_y = np.full(len(x), np.log(initial))
    update = np.inf
    for iteration in range(1, max_iter + 1):
        target = kw @ np.log1p(np.exp(log_y) / den)
        update = float(np.max(np.abs(target - log_y)))
        log_y = target
        if update <= tol:
            break
    else:
        logger.warning(f"Toda equation stalled: σ={sigma}, ħ={hbar}, update={update:.2e}")
        raise ConvergenceError(f"Toda integral equation did not converge in {max_iter} iterations",
                               iterations=max_iter, residual=update)
    logger.debug(f"Toda equation σ={np.round(sigma, 6)}: {iteration} iterations on {len(x)} nodes")
    return TbaSolution(sigma=sigma, hbar=float(hbar), nodes=x, weights=w, log_y=log_y,
                       iterations=iteration, update=update)


def _cauchy(t, w):
    """∫ L(μ) / (w - μ) dμ/2πi for w off the real line."""
    if np.any(np.abs(w.imag) < CAUCHY_CLEARANCE):
        raise DomainError("Cauchy integral evaluated on the real line")
    return ((t.weights / (w[:, None] - t.nodes[None, :])) @ t.log_one_plus()) / (2j * np.pi)


def _log_v_up(t, lam):
    """ln v↑(λ); continued below the real axis by the boundary jump."""
    w = lam + 0.5j * t.hbar
    c = _cauchy(t, w)
    below = w.imag < 0
    if np.any(below):
        c[below] -= t.log_one_plus_at(w[below])
    return -c


def _log_v_down(t, lam):
    """ln v↓(λ - iħ); continued above the real axis by the boundary jump."""
    w = lam - 0.5j * t.hbar
    c = _cauchy(t, w)
    above = w.imag > 0
    if np.any(above):
        c[above] += t.log_one_plus_at(w[above])
    return c


def _log_gamma_product(t, args):
    try:
        return np.sum(ln_gamma(args), axis=-1)
    except SingularityError as exc:
        raise SingularityError(f"𝔮 evaluated at a Γ pole ({exc})") from exc


def q_functions(t, lam):
    """
    The two entire solutions 𝔮⁺, 𝔮⁻ built from Y.

    Args:
        t: TbaSolution
        lam: Points with Im λ in (-3ħ/2, 3ħ/2)

    Returns:
        tuple: (𝔮⁺(λ), 𝔮⁻(λ)) as complex arrays

    Raises:
        SingularityError: At a pole of the Γ prefactors
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    h = t.hbar
    n = t.particles
    shifted = (lam[:, None] - t.sigma[None, :]) / h
    phase = 1j * n * lam * np.log(h) / h
    decay = -n * np.pi * lam / h
    log_plus = phase + decay + _log_v_up(t, lam) - _log_gamma_product(t, 1.0 - 1j * shifted)
    log_minus = -phase + decay + _log_v_down(t, lam) - _log_gamma_product(t, 1.0 + 1j * shifted)
    return np.exp(log_plus), np.exp(log_minus)


def _wronskian_pair(t, lam):
    qp, qm = q_functions(t, lam)
    qp1, qm1 = q_functions(t, lam + 1j * t.hbar)
    return qp * qm1 - qm * qp1


def wronskian_rhs(t, lam):
    """(ħ e^{-2πλ/ħ} / iπ)^{N+1} Π sinh(π(λ - σ_k)/ħ)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    h = t.hbar
    factor = (h * np.exp(-2.0 * np.pi * lam / h) / (1j * np.pi)) ** t.particles
    return factor * np.prod(np.sinh(np.pi * (lam[:, None] - t.sigma[None, :]) / h), axis=-1)


def _window(t):
    center = float(np.mean(t.sigma.real))
    span = float(np.max(np.abs(t.sigma - center))) + CORE_MARGIN * t.hbar
    return center, span


def wronskian_residual(t, points=None):
    """Largest relative deviation from the Wronskian identity (default: 20 points at Im λ = -ħ/4)."""
    if points is None:
        center, span = _window(t)
        points = center + np.linspace(-span, span, WRONSKIAN_POINTS) - 0.25j * t.hbar
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    rhs = wronskian_rhs(t, points)
    return float(np.max(np.abs(_wronskian_pair(t, points) - rhs) / np.abs(rhs)))


def transfer_eigenvalue(t, lam):
    """
    t(λ) as the ratio of shifted Wronskians.

    Raises:
        SingularityError: If the denominator vanishes (λ at some σ_k)
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    h = 1j * t.hbar
    qp_m, qm_m = q_functions(t, lam - h)
    qp_p, qm_p = q_functions(t, lam + h)
    den = _wronskian_pair(t, lam)
    if np.min(np.abs(den)) < SINGULAR:
        raise SingularityError("Wronskian vanishes at the evaluation point; shift λ")
    return (qp_m * qm_p - qp_p * qm_m) / den


@dataclass(frozen=True)
class TransferCheck:
    """Monic-polynomial interpolation of t(λ)."""

    coefficients: np.ndarray
    roots: np.ndarray
    residual: float
    leading: complex
    conjugation: float


def _sample_points(t, count):
    """Real points spread over the σ window, at least 0.3ħ away from every σ."""
    center, span = _window(t)
    candidates = center + span * np.cos(np.pi * (np.arange(8 * count) + 0.5) / (8 * count))
    gap = np.min(np.abs(candidates[:, None] - t.sigma[None, :]), axis=1)
    good = np.sort(candidates[gap >= POLE_CLEARANCE * t.hbar])
    if len(good) < count:
        raise DomainError("Not enough sample points away from the σ's")
    return good[np.round(np.linspace(0, len(good) - 1, count)).astype(int)]


def transfer_polynomial(t):
    """
    Fit t(λ) at N+4 points by a degree-(N+1) polynomial and test it at 3 more.

    Returns:
        TransferCheck with the relative residual at the extra points, the
        leading coefficient and the self-conjugation defect of the roots
    """
    n = t.particles
    points = _sample_points(t, n + 4 + EXTRA_CHECK_POINTS)
    held_out = np.round(np.linspace(1, len(points) - 2, EXTRA_CHECK_POINTS)).astype(int)
    check = points[held_out]
    fit = np.delete(points, held_out)
    coeffs = np.polyfit(fit, transfer_eigenvalue(t, fit), n)
    values = transfer_eigenvalue(t, check)
    residual = float(np.max(np.abs(np.polyval(coeffs, check) - values) / np.maximum(np.abs(values), 1.0)))
    roots = np.sort_complex(np.roots(coeffs / coeffs[0]))
    conjugation = float(np.max(np.abs(np.sort_complex(roots.conj()) - roots)))
    logger.debug(f"t(λ) fit: leading {coeffs[0]:.10g}, residual {residual:.2e}, roots {roots}")
    return TransferCheck(coefficients=coeffs, roots=roots, residual=residual,
                         leading=complex(coeffs[0]), conjugation=conjugation)


def newton_sums(t, kmax=None):
    """
    Σ τ_p^k for k = 1..kmax from σ and Y:

        Σσ^k - k ∫ [(τ + iħ/2)^{k-1} - (τ - iħ/2)^{k-1}] L(τ) dτ/2πi.

    These are the eigenvalues 𝔈_k of the commuting Hamiltonians.
    """
    kmax = t.particles if kmax is None else int(kmax)
    L = t.log_one_plus()
    half = 0.5j * t.hbar
    out = []
    for k in range(1, kmax + 1):
        weight = (t.nodes + half) ** (k - 1) - (t.nodes - half) ** (k - 1)
        integral = np.sum(t.weights * weight * L) / (2j * np.pi)
        out.append(complex(np.sum(t.sigma**k) - k * integral))
    return np.array(out)


def _condition_terms(sigma, hbar, t):
    """Right-hand side of the quantization conditions without the i ln ζ term."""
    n = len(sigma)
    diff = (sigma[:, None] - sigma[None, :]) / hbar
    gammas = 2.0 * np.sum(ln_gamma(1.0 + 1j * diff).imag, axis=1)
    a = sigma[:, None] - t.nodes[None, :]
    kernel = 2.0 * a / (a * a + 0.25 * hbar * hbar)
    integral = (kernel * t.weights) @ t.log_one_plus() / (2.0 * np.pi)
    return n * sigma * np.log(hbar) / hbar + gammas + integral


def quantization_residuals(sector, sigma, phase, grid=None):
    """
    Residuals of the N+1 quantization conditions and the momentum constraint.

    Real σ only: the conditions are then real, with i ln ζ = -φ for ζ = e^{iφ}.
    """
    sigma = np.sort(np.asarray(sigma, dtype=float))
    t = tba_solve(sigma, sector.hbar, grid=grid)
    terms = _condition_terms(sigma, sector.hbar, t) - phase
    residual = np.append(terms - 2.0 * np.pi * np.asarray(sector.integers), np.sum(sigma) - sector.momentum)
    return residual, t


def integers_from_guess(sigma, hbar, momentum=0.0, phase=0.0):
    """TodaSector whose integers round the quantization conditions at a guess."""
    sigma = np.sort(np.asarray(sigma, dtype=float))
    t = tba_solve(sigma, hbar)
    terms = _condition_terms(sigma, hbar, t) - phase
    integers = tuple(int(v) for v in np.round(terms / (2.0 * np.pi)))
    return TodaSector(hbar=float(hbar), integers=integers, momentum=float(momentum),
                      zeta=complex(np.exp(1j * phase)))


@dataclass(frozen=True)
class QuantizedState:
    """Solved σ, Bloch phase and energies of one Toda eigenstate."""

    sector: TodaSector
    sigma: np.ndarray
    phase: float
    tba: TbaSolution
    energies: np.ndarray
    residual: float
    iterations: int

    @property
    def energy(self):
        """H = 𝔈₂ / 2."""
        return float(0.5 * self.energies[1].real)

    @property
    def relative_energy(self):
        """Energy with the centre-of-mass motion ε²/(2(N+1)) removed."""
        return self.energy - self.sector.momentum**2 / (2.0 * self.sector.particles)


def quantize(sector, initial_sigma, phase=None, tol=QUANT_TOL, max_iter=MAX_QUANT):
    """
    Solve the quantization conditions for real σ and the Bloch phase.

    Newton iteration with a finite-difference Jacobian; every residual
    re-solves the integral equation on a grid frozen at the initial guess.

    Args:
        sector: TodaSector fixing ħ, the integers and the momentum
        initial_sigma: Starting σ (N+1 reals)
        phase: Starting arg ζ (default: arg sector.zeta)

    Returns:
        QuantizedState

    Raises:
        DomainError: For N+1 outside {2, 3} or a size mismatch
        ConvergenceError: If Newton stalls or two σ's collide
    """
    sigma = np.sort(np.asarray(initial_sigma, dtype=float))
    if len(sigma) != sector.particles:
        raise DomainError(f"{sector.particles} integers but {len(sigma)} σ's")
    if sector.particles not in (2, 3):
        raise DomainError(f"Quantization is supported for 2 or 3 particles, got {sector.particles}")
    phase = float(np.angle(sector.zeta)) if phase is None else float(phase)
    grid = toda_grid(sigma, sector.hbar, cutoff=GRID_FACTOR * (np.max(np.abs(sigma)) + 2.0 * sector.hbar))

    x = np.append(sigma, phase)

    def evaluate(v):
        return quantization_residuals(sector, v[:-1], v[-1], grid)

    r, t = evaluate(x)
    norm = float(np.max(np.abs(r)))
    iteration = 0
    while norm > tol:
        iteration += 1
        if iteration > max_iter:
            logger.warning(f"Toda quantization stalled for n={sector.integers}: residual {norm:.2e}")
            raise ConvergenceError(f"Quantization conditions did not converge for n={sector.integers}",
                                   iterations=max_iter, residual=norm)
        jac = np.empty((len(x), len(x)))
        for b in range(len(x)):
            shifted = x.copy()
            shifted[b] += FD_STEP
            jac[:, b] = (evaluate(shifted)[0] - r) / FD_STEP
        step = np.linalg.solve(jac, r)
        alpha = 1.0
        while True:
            trial = x - alpha * step
            if np.min(np.diff(trial[:-1])) > 0:
                r_trial, t_trial = evaluate(trial)
                n_trial = float(np.max(np.abs(r_trial)))
                if n_trial < norm:
                    break
            if alpha < 1e-4:
                raise ConvergenceError(f"Newton step failed for n={sector.integers} (σ collision or divergence)",
                                       iterations=iteration, residual=norm)
            alpha *= 0.5
        x, r, t, norm = trial, r_trial, t_trial, n_trial

    energies = newton_sums(t)
    if np.max(np.abs(energies.imag)) > 1e-8:
        logger.warning(f"Toda energies carry imaginary parts {energies.imag}")
    logger.debug(f"Quantized n={sector.integers}: σ={x[:-1]}, φ={x[-1]:.10g}, {iteration} Newton steps")
    return QuantizedState(sector=sector, sigma=x[:-1], phase=float(x[-1]), tba=t, energies=energies,
                          residual=norm, iterations=iteration)


def semiclassical_level(hbar, level):
    """
    Bohr-Sommerfeld estimate of level k of -ħ²d²/dx² + 2cosh x:

        ∫ √(E - 2cosh x) dx = πħ(k + 1/2).
    """
    def action(energy):
        turn = np.arccosh(0.5 * energy)
        value, _ = quad(lambda x: np.sqrt(max(energy - 2.0 * np.cosh(x), 0.0)), -turn, turn)
        return value - np.pi * hbar * (level + 0.5)

    upper = 4.0
    while action(upper) < 0:
        upper *= 2.0
    return brentq(action, 2.0 + 1e-12, upper)


def two_particle_guess(hbar, level, momentum=0.0):
    """Starting σ = ε/2 ± √E for the two-particle chain."""
    s = np.sqrt(semiclassical_level(hbar, level))
    return np.array([0.5 * momentum - s, 0.5 * momentum + s])
