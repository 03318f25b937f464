"""
Sinh-interaction partition function

    Z_N[V] = ∫ Π_{a<b} sinh[π T_N (λ_a-λ_b)/ω₁] sinh[π T_N (λ_a-λ_b)/ω₂]
             Π_a e^{-N T_N V(λ_a)} d^N λ

for the Gaussian potential V(λ) = gλ² + tλ (exact product formula and its
large-N expansion), its equilibrium measure for convex V, and a Metropolis
sampler of the normalized measure.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp, zeta

from .errors import DomainError
from .special import composite_gauss, derivative

logger = logging.getLogger(__name__)

ZETA_PRIME_MINUS_ONE = -0.165421143700451
ASYMPTOTIC_EXPONENT = 0.9
MASS_TOL = 1e-8
DIRECT_BUDGET = 10_000_000
DIRECT_NODES_PER_PANEL = 16

BURN_IN_SWEEPS = 100_000
SAMPLE_SWEEPS = 20_000
TARGET_ACCEPTANCE = 0.4
ADAPT_EVERY = 100
HISTOGRAM_BATCHES = 20


@dataclass(frozen=True)
class SinhModel:
    """
    N particles at scale T_N with periods ω₁, ω₂.

    Without a potential callable the model is Gaussian, V = gλ² + tλ.
    """

    N: int
    T: float
    omega1: float = 1.0
    omega2: float = 1.0
    g: float = 1.0
    t: float = 0.0
    potential: object = None

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be positive, got {self.N}")
        if self.T <= 0:
            raise DomainError(f"T_N must be positive, got {self.T}")
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise DomainError(f"Periods must be positive, got ({self.omega1}, {self.omega2})")
        if self.gaussian and self.g <= 0:
            raise DomainError(f"Gaussian potential needs g > 0, got {self.g}")

    @property
    def gaussian(self):
        return self.potential is None

    @property
    def strength(self):
        """π(ω₁⁻¹ + ω₂⁻¹)."""
        return np.pi * (1.0 / self.omega1 + 1.0 / self.omega2)

    def V(self, x):
        x = np.asarray(x, dtype=float)
        if self.gaussian:
            return self.g * x * x + self.t * x
        return np.asarray(self.potential(x), dtype=float)


def gaussian_partition_exact(m):
    """
    ln Z_N for V = gλ² + tλ from the explicit product formula.

    ln Z = ln N! - N(N-1) ln 2 + (N/2) ln(π/(gNT)) + N²T t²/(4g)
           + π²(ω₁⁻¹+ω₂⁻¹)² T (N²-1)/(12g) + Σ_j (N-j) ln(1 - e^{-jκ}),
    κ = 2Tπ² / (N g ω₁ω₂).
    """
    if not m.gaussian:
        raise DomainError("Exact partition function needs the Gaussian potential")
    N, T, g = m.N, m.T, m.g
    j = np.arange(1, N + 1)
    kappa = 2.0 * T * np.pi**2 / (N * g * m.omega1 * m.omega2)
    product = np.sum((N - j) * np.log(-np.expm1(-j * kappa)))
    return float(
        gammaln(N + 1.0) - N * (N - 1) * np.log(2.0) + 0.5 * N * np.log(np.pi / (g * N * T))
        + N * N * T * m.t**2 / (4.0 * g) + m.strength**2 * T * (N * N - 1) / (12.0 * g) + product
    )


def in_asymptotic_window(N, T):
    """(ln N)² ≤ T_N < N^0.9."""
    return np.log(N) ** 2 <= T * (1.0 + 1e-12) and T < N**ASYMPTOTIC_EXPONENT


def gaussian_partition_asymptotic(m):
    """Large-N expansion of ln Z_N for the Gaussian potential up to o(1)."""
    if not m.gaussian:
        raise DomainError("The asymptotic expansion is implemented for the Gaussian potential")
    N, T, g = float(m.N), m.T, m.g
    if not in_asymptotic_window(m.N, T):
        logger.warning(f"T_N={T} outside the asymptotic window for N={m.N}")
    w12 = m.omega1 * m.omega2
    confinement = m.strength**2 / (12.0 * g)
    return float(
        N * N * T * (m.t**2 / (4.0 * g) + confinement)
        - N * N * np.log(2.0)
        - N * N / T * g * w12 / 12.0
        + N * N / T**2 * (g * w12) ** 2 * zeta(3) / (2.0 * np.pi**2) ** 2
        + N * np.log(N / T)
        + N * np.log(2.0 / np.e * np.sqrt(w12))
        - T * confinement
        + np.log(N**5 / T) / 12.0
        + np.log(128.0 * np.pi**8 / (g * w12)) / 12.0
        + ZETA_PRIME_MINUS_ONE
    )


def _log_sinh(x):
    """ln sinh x for x ≥ 0 without overflow."""
    with np.errstate(divide="ignore"):
        return x - np.log(2.0) + np.log(-np.expm1(-2.0 * x))


def _pair_log_weight(diff, m):
    d = np.abs(diff) * np.pi * m.T
    return _log_sinh(d / m.omega1) + _log_sinh(d / m.omega2)


def gaussian_partition_direct(m, budget=DIRECT_BUDGET):
    """
    ln Z_N by tensor-product composite Gauss quadrature (N ≤ 3).

    The box covers the equilibrium support plus ten Gaussian widths; the
    sum is done in log space.
    """
    if m.N > 3:
        raise DomainError(f"Direct quadrature supports N ≤ 3, got {m.N}")
    center = -m.t / (2.0 * m.g) if m.gaussian else 0.0
    width = 1.0 / np.sqrt(m.N * m.T * m.g)
    half = m.strength / (2.0 * m.g) + 10.0 * width
    per_dim = int(budget ** (1.0 / m.N))
    panels = max(1, min(int(np.ceil(2.0 * half / width)), per_dim // DIRECT_NODES_PER_PANEL))
    rule = composite_gauss(np.linspace(center - half, center + half, panels + 1), DIRECT_NODES_PER_PANEL)
    x, log_w = rule.nodes, np.log(rule.weights)
    single = log_w - m.N * m.T * m.V(x)

    if m.N == 1:
        return float(logsumexp(single))
    if m.N == 2:
        pair = _pair_log_weight(x[:, None] - x[None, :], m)
        return float(logsumexp(single[:, None] + single[None, :] + pair))
    pair = _pair_log_weight(x[:, None] - x[None, :], m)
    partial = []
    for i in range(len(x)):
        block = single[i] + single[:, None] + single[None, :] + pair[i][:, None] + pair[i][None, :] + pair
        partial.append(logsumexp(block))
    return float(logsumexp(partial))


@dataclass(frozen=True)
class EquilibriumMeasure:
    """Support [a, b], density V″ω₁ω₂ / (2π(ω₁+ω₂)) and the leading free energy."""

    a: float
    b: float
    omega1: float
    omega2: float
    potential: object
    mass: float
    leading: float
    consistent: bool

    def density(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.a) & (x <= self.b)
        curvature = np.real(derivative(self.potential, x, 2, step=1e-3))
        scale = self.omega1 * self.omega2 / (2.0 * np.pi * (self.omega1 + self.omega2))
        return np.where(inside, curvature * scale, 0.0)


def _endpoint(dV, target, start):
    """Root of V′(x) = target, bracketing outward from start."""
    step = 1.0
    lo, hi = start - step, start + step
    while dV(lo) > target:
        step *= 2.0
        lo = start - step
    while dV(hi) < target:
        step *= 2.0
        hi = start + step
    return brentq(lambda x: dV(x) - target, lo, hi, xtol=1e-14)


def equilibrium_density(V, omega1=1.0, omega2=1.0, probe=np.linspace(-10.0, 10.0, 201)):
    """
    Equilibrium measure of the sinh log-gas with convex potential V.

    V′(b) = -V′(a) = π(ω₁⁻¹ + ω₂⁻¹) fixes the support. The mass is
    V′(b)-V′(a) times the density constant, i.e. one; a numerical
    deviation beyond MASS_TOL is logged and flagged.

    Args:
        V: Callable, smooth and strictly convex
        omega1: First period
        omega2: Second period
        probe: Points where V″ > 0 is checked

    Returns:
        EquilibriumMeasure
    """
    def dV(x):
        return float(np.real(derivative(V, np.array([x]), 1, step=1e-4))[0])

    curvature = np.real(derivative(V, np.asarray(probe, dtype=float), 2, step=1e-3))
    if np.any(curvature <= 0):
        raise DomainError("Potential is not strictly convex on the probe grid")
    strength = np.pi * (1.0 / omega1 + 1.0 / omega2)
    minimum = brentq(dV, *_bracket_minimum(dV))
    a = _endpoint(dV, -strength, minimum)
    b = _endpoint(dV, strength, minimum)

    measure = EquilibriumMeasure(a=a, b=b, omega1=omega1, omega2=omega2, potential=V,
                                 mass=0.0, leading=0.0, consistent=True)
    mass, _ = quad(lambda x: float(measure.density(np.array([x]))[0]), a, b, epsabs=1e-12, epsrel=1e-12)
    squares, _ = quad(lambda x: dV(x) ** 2, a, b, epsabs=1e-12, epsrel=1e-12)
    v_ab = float(np.real(V(np.array([a, b]))).sum())
    leading = -0.5 * v_ab + (dV(b) ** 2 * (b - a) + squares) / (4.0 * strength)
    consistent = abs(mass - 1.0) <= MASS_TOL
    if not consistent:
        logger.warning(f"Equilibrium density has mass {mass:.12f}")
    logger.debug(f"Equilibrium support [{a:.10g}, {b:.10g}], leading free energy {leading:.10g}")
    return EquilibriumMeasure(a=a, b=b, omega1=omega1, omega2=omega2, potential=V,
                              mass=mass, leading=leading, consistent=consistent)


def _bracket_minimum(dV):
    lo, hi = -1.0, 1.0
    while dV(lo) > 0:
        lo *= 2.0
    while dV(hi) < 0:
        hi *= 2.0
    return lo, hi


def leading_free_energy(V, omega1=1.0, omega2=1.0):
    """lim ln Z_N / (N² T_N) = -inf of the asymptotic rate function."""
    return equilibrium_density(V, omega1, omega2).leading


@dataclass(frozen=True)
class MetropolisResult:
    """Thinned configurations and chain diagnostics."""

    samples: np.ndarray
    acceptance: float
    step: float
    autocorrelation: float


def _integrated_autocorrelation(series, window=5.0):
    """Integrated autocorrelation time with the self-consistent window M ≥ window·τ."""
    x = np.asarray(series, dtype=float) - np.mean(series)
    n = len(x)
    if n < 4 or np.allclose(x, 0.0):
        return 1.0
    spectrum = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(spectrum * np.conj(spectrum))[:n]
    acf /= acf[0]
    tau = 1.0
    for lag in range(1, n):
        tau += 2.0 * acf[lag]
        if lag >= window * tau:
            break
    return float(max(tau, 1.0))


def metropolis_sample(m, sweeps=SAMPLE_SWEEPS, burn_in=BURN_IN_SWEEPS, thin=10, seed=0):
    """
    Single-site Metropolis chain for the normalized sinh-gas measure.

    The proposal width adapts towards TARGET_ACCEPTANCE during burn-in and
    is frozen afterwards.

    Args:
        m: SinhModel
        sweeps: Recorded sweeps (N proposals each)
        burn_in: Discarded sweeps
        thin: Keep every thin-th sweep
        seed: Seed of numpy's default generator

    Returns:
        MetropolisResult
    """
    rng = np.random.default_rng(seed)
    measure = equilibrium_density(m.V, m.omega1, m.omega2)
    x = np.sort(rng.uniform(measure.a, measure.b, m.N))
    energy = m.N * m.T * m.V(x)
    step = 0.5 * (measure.b - measure.a) / m.N
    samples, trace = [], []
    accepted = proposed = 0
    window_accepted = window_proposed = 0

    for sweep in range(burn_in + sweeps):
        for a in rng.permutation(m.N):
            new = x[a] + step * rng.normal()
            others = np.delete(x, a)
            new_energy = m.N * m.T * float(m.V(np.array([new]))[0])
            gain = (np.sum(_pair_log_weight(new - others, m)) - np.sum(_pair_log_weight(x[a] - others, m))
                    - new_energy + energy[a])
            window_proposed += 1
            if gain >= 0 or rng.random() < np.exp(gain):
                x[a] = new
                energy[a] = new_energy
                window_accepted += 1
        if sweep < burn_in:
            if (sweep + 1) % ADAPT_EVERY == 0:
                rate = window_accepted / window_proposed
                step *= np.exp(rate - TARGET_ACCEPTANCE)
                window_accepted = window_proposed = 0
            continue
        accepted += window_accepted
        proposed += window_proposed
        window_accepted = window_proposed = 0
        trace.append(np.mean(x))
        if (sweep - burn_in) % thin == 0:
            samples.append(np.sort(x))

    acceptance = accepted / max(proposed, 1)
    tau = _integrated_autocorrelation(trace)
    logger.debug(f"Metropolis N={m.N}, T={m.T}: acceptance {acceptance:.3f}, step {step:.3g}, τ_int {tau:.1f}")
    return MetropolisResult(samples=np.array(samples), acceptance=acceptance, step=step, autocorrelation=tau)


def density_histogram(samples, a, b, bins=20, batches=HISTOGRAM_BATCHES):
    """
    Empirical density on [a, b] with batch-means error bars.

    Returns:
        tuple: (bin centers, density, standard error)
    """
    edges = np.linspace(a, b, bins + 1)
    width = edges[1] - edges[0]
    per_sample = samples.shape[1]
    chunks = np.array_split(samples, min(batches, len(samples)))
    hist = np.array([np.histogram(c.ravel(), edges)[0] / (len(c) * per_sample * width) for c in chunks])
    density = np.histogram(samples.ravel(), edges)[0] / (samples.size * width)
    error = hist.std(axis=0, ddof=1) / np.sqrt(len(chunks)) if len(chunks) > 1 else np.zeros(bins)
    return 0.5 * (edges[1:] + edges[:-1]), density, error
