"""
Brute-force references for the integral-equation solvers.

  - ed_xxz: full thermal diagonalization of a short XXZ chain, periodic or
    open with diagonal boundary fields, block by magnetization sector (and
    by momentum for the periodic chain)
  - toda2_relative_spectrum: relative motion of the two-particle closed
    Toda chain, -ħ² d²/dx² + 2cosh x, by finite differences
  - nls_overlap_quadrature: scalar products and field form factors of
    Lieb-Liniger wavefunctions by direct quadrature over ordered sectors
"""

import logging
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal

from .errors import DomainError
from .special import gauss_legendre

logger = logging.getLogger(__name__)

MAX_SITES = 16
HERMITIAN_TOL = 1e-10
WALL_DECAY = 1e-12
# Outer fraction of the box where eigenvectors must have decayed
WALL_FRACTION = 0.05
TODA_LEVELS = 5
OVERLAP_NODES = 64
MAX_OVERLAP_PARTICLES = 2


@dataclass(frozen=True)
class EdResult:
    """Spectrum and thermal expectations of a finite XXZ chain."""

    L: int
    delta: float
    h: float
    T: float
    J: float
    boundary: tuple
    energies: np.ndarray
    sectors: dict
    log_partition: float
    free_energy: float
    magnetization: float
    bulk_magnetization: float
    correlations: dict = field(default_factory=dict)
    hermitian_residual: float = 0.0


def boundary_field(J, delta, xi):
    """Coefficient J sinh η coth ξ of σᶻ at a chain end (η = -i arccos Δ); None means no field."""
    if xi is None:
        return 0.0
    if not -1.0 < delta < 1.0:
        raise DomainError(f"Boundary parametrization needs |Δ| < 1, got {delta}")
    eta = -1j * np.arccos(delta)
    value = J * np.sinh(eta) / np.tanh(complex(xi))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise DomainError(f"Boundary field for ξ={xi} is not real ({value})")
    return float(value.real)


def _spins(states, L):
    """σᶻ eigenvalues, shape (len(states), L); site i is bit i."""
    return 2 * ((states[:, None] >> np.arange(L)[None, :]) & 1) - 1


def _rotate(states, j, L):
    mask = (1 << L) - 1
    return ((states << j) | (states >> (L - j))) & mask


def _sector_states(L, up):
    everything = np.arange(1 << L, dtype=np.int64)
    count = _spins(everything, L).sum(axis=1)
    return everything[count == 2 * up - L]


def _diagonal(spins, bonds, J, delta, h, fields):
    e = -0.5 * h * spins.sum(axis=1) + spins @ fields
    for i, j in bonds:
        e = e + J * delta * (spins[:, i] * spins[:, j] + 1)
    return e


def _flips(states, bonds, L):
    """(source index, flipped state) pairs of the σ⁺σ⁻ + σ⁻σ⁺ terms."""
    src, dst = [], []
    for i, j in bonds:
        anti = ((states >> i) & 1) != ((states >> j) & 1)
        src.append(np.nonzero(anti)[0])
        dst.append(states[anti] ^ ((1 << i) | (1 << j)))
    return np.concatenate(src), np.concatenate(dst)


def _thermal(energies, observables, T):
    """Boltzmann averages of per-eigenstate expectation arrays."""
    e0 = np.min(energies)
    weights = np.exp(-(energies - e0) / T)
    z = np.sum(weights)
    log_partition = float(np.log(z) - e0 / T)
    return log_partition, {key: float(np.sum(weights * vals) / z) for key, vals in observables.items()}


def _periodic_blocks(L, J, delta, h, distances):
    """Eigenvalues and translation-averaged diagonal observables per (S^z, k) block."""
    bonds = [(i, (i + 1) % L) for i in range(L)]
    energies, obs = [], {"mz": [], **{m: [] for m in distances}}
    sectors = {}
    residual = 0.0
    for up in range(L + 1):
        states = _sector_states(L, up)
        rots = np.stack([_rotate(states, j, L) for j in range(L)])
        shift = np.argmin(rots, axis=0)
        rep_of = rots[shift, np.arange(len(states))]
        same = rots[1:] == states[None, :]
        period = np.where(same.any(axis=0), np.argmax(same, axis=0) + 1, L)
        is_rep = rep_of == states
        reps, R = states[is_rep], period[is_rep]

        spins = _spins(reps, L)
        diag = _diagonal(spins, bonds, J, delta, h, np.zeros(L))
        corr = {m: np.mean(spins * np.roll(spins, -m, axis=1), axis=1) for m in distances}
        mz = np.full(len(reps), (2.0 * up - L) / L)

        src, flipped = _flips(reps, bonds, L)
        k = np.searchsorted(states, flipped)
        dst = np.searchsorted(reps, rep_of[k])
        # flipped = T^{-j*} rep
        lag = -shift[k]
        for m in range(L):
            ok = (m * R) % L == 0
            idx = np.nonzero(ok)[0]
            if len(idx) == 0:
                continue
            q = 2.0 * np.pi * m / L
            pos = np.full(len(reps), -1)
            pos[idx] = np.arange(len(idx))
            H = np.diag(diag[idx]).astype(complex)
            keep = ok[src] & ok[dst]
            vals = 2.0 * J * np.exp(1j * q * lag[keep]) * np.sqrt(R[src[keep]] / R[dst[keep]])
            np.add.at(H, (pos[dst[keep]], pos[src[keep]]), vals)
            residual = max(residual, float(np.max(np.abs(H - H.conj().T))))
            E, V = eigh(H)
            weight = np.abs(V) ** 2
            energies.append(E)
            obs["mz"].append(weight.T @ mz[idx])
            for d in distances:
                obs[d].append(weight.T @ corr[d][idx])
            sectors[(2 * up - L, m)] = E
    return np.concatenate(energies), {k: np.concatenate(v) for k, v in obs.items()}, sectors, residual


def _open_blocks(L, J, delta, h, fields, distances):
    """Eigenvalues and site-1 diagonal observables per S^z block of the open chain."""
    bonds = [(i, i + 1) for i in range(L - 1)]
    energies, obs = [], {"mz": [], "mz1": [], **{m: [] for m in distances}}
    sectors = {}
    residual = 0.0
    for up in range(L + 1):
        states = _sector_states(L, up)
        spins = _spins(states, L)
        H = np.diag(_diagonal(spins, bonds, J, delta, h, fields))
        src, flipped = _flips(states, bonds, L)
        np.add.at(H, (np.searchsorted(states, flipped), src), 2.0 * J)
        residual = max(residual, float(np.max(np.abs(H - H.T))))
        E, V = eigh(H)
        weight = V**2
        energies.append(E)
        obs["mz"].append(weight.T @ spins.mean(axis=1))
        obs["mz1"].append(weight.T @ spins[:, 0])
        for d in distances:
            obs[d].append(weight.T @ (spins[:, 0] * spins[:, d]))
        sectors[(2 * up - L, None)] = E
    return np.concatenate(energies), {k: np.concatenate(v) for k, v in obs.items()}, sectors, residual


def ed_xxz(L, delta, h, T, J=1.0, boundary=None, correlations=()):
    """
    Thermal state of H = J Σ {σˣσˣ + σʸσʸ + Δ(σᶻσᶻ + 1)} - (h/2) Σ σᶻ.

    Args:
        L: Number of sites (L ≤ 16)
        delta: Anisotropy Δ
        h: Magnetic field
        T: Temperature
        J: Exchange coupling
        boundary: None for the periodic chain, or (ξ₋, ξ₊) for the open chain
            with fields J sinh η coth ξ± σᶻ at sites 1 and L (None: no field)
        correlations: Distances m for connected ⟨σᶻ₁σᶻ_{m+1}⟩

    Returns:
        EdResult

    Raises:
        DomainError: For L > 16, T ≤ 0 or a non-Hermitian block
    """
    L = int(L)
    if not 2 <= L <= MAX_SITES:
        raise DomainError(f"Exact diagonalization supports 2 ≤ L ≤ {MAX_SITES}, got {L}")
    if T <= 0:
        raise DomainError(f"Temperature must be positive, got T={T}")
    distances = tuple(int(m) for m in correlations)
    if any(not 1 <= m < L for m in distances):
        raise DomainError(f"Correlation distances must lie in [1, {L - 1}]")

    if boundary is None:
        energies, obs, sectors, residual = _periodic_blocks(L, J, delta, h, distances)
        first = "mz"
    else:
        fields = np.zeros(L)
        fields[0] += boundary_field(J, delta, boundary[0])
        fields[-1] += boundary_field(J, delta, boundary[1])
        energies, obs, sectors, residual = _open_blocks(L, J, delta, h, fields, distances)
        first = "mz1"
    if residual > HERMITIAN_TOL:
        raise DomainError(f"Hamiltonian block not Hermitian (residual {residual:.2e})")
    if len(energies) != 1 << L:
        raise DomainError(f"Block decomposition lost states: {len(energies)} of {1 << L}")

    log_partition, averages = _thermal(energies, obs, T)
    magnetization = averages[first]
    if boundary is None:
        connected = {m: averages[m] - magnetization**2 for m in distances}
    else:
        # open chain: raw ⟨σᶻ₁σᶻ_{m+1}⟩, site means differ
        connected = {m: averages[m] for m in distances}
    logger.debug(f"ED L={L}, Δ={delta}, h={h}, T={T}: ln Z={log_partition:.12g}, ⟨σᶻ⟩={magnetization:.10g}")
    return EdResult(
        L=L, delta=float(delta), h=float(h), T=float(T), J=float(J),
        boundary=None if boundary is None else tuple(boundary),
        energies=np.sort(energies), sectors=sectors, log_partition=log_partition,
        free_energy=-T * log_partition / L, magnetization=magnetization,
        bulk_magnetization=averages["mz"], correlations=connected, hermitian_residual=residual,
    )


def decay_rate(distances, values):
    """Least-squares slope of ln|C(m)| against m (the inverse correlation length)."""
    m = np.asarray(distances, dtype=float)
    v = np.abs(np.asarray(values, dtype=float))
    keep = v > 0
    if keep.sum() < 2:
        raise DomainError("Need two non-zero correlation values to fit a decay rate")
    slope, _ = np.polyfit(m[keep], np.log(v[keep]), 1)
    return float(-slope)


@dataclass(frozen=True)
class TodaSpectrum:
    """Lowest levels of -ħ²d²/dx² + 2cosh x after Richardson extrapolation."""

    hbar: float
    box: float
    levels: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    wall_decay: float
    parity: tuple


def _fd_levels(hbar, box, n, count):
    x = np.linspace(-box, box, n + 2)[1:-1]
    dx = x[1] - x[0]
    diag = 2.0 * hbar**2 / dx**2 + 2.0 * np.cosh(x)
    off = np.full(n - 1, -(hbar**2) / dx**2)
    E, V = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))
    return x, E, V


def toda2_relative_spectrum(hbar, box=8.0, n=2000, count=TODA_LEVELS):
    """
    Lowest eigenvalues of the two-particle Toda relative Hamiltonian.

    Second-order finite differences with Dirichlet walls at ±box, on n and
    2n+1 interior points, combined by Richardson extrapolation.

    Raises:
        DomainError: If an eigenvector has not decayed below 1e-12 near the walls
    """
    if hbar <= 0:
        raise DomainError(f"ħ must be positive, got {hbar}")
    _, coarse, _ = _fd_levels(hbar, box, n, count)
    x, fine, V = _fd_levels(hbar, box, 2 * n + 1, count)
    outer = np.abs(x) > (1.0 - WALL_FRACTION) * box
    decay = float(np.max(np.max(np.abs(V[outer]), axis=0) / np.max(np.abs(V), axis=0)))
    if decay > WALL_DECAY:
        raise DomainError(f"Eigenvectors reach the walls (decay {decay:.2e}); enlarge the box")
    parity = tuple(int(np.sign(np.dot(V[::-1, k], V[:, k]))) for k in range(count))
    levels = (4.0 * fine - coarse) / 3.0
    logger.debug(f"Toda relative spectrum ħ={hbar}: {levels}")
    return TodaSpectrum(hbar=float(hbar), box=float(box), levels=levels, coarse=coarse, fine=fine,
                        wall_decay=decay, parity=parity)


def nls_wavefunction(x, roots, c, L):
    """
    Lieb-Liniger eigenfunction

        (-i√c)^N Σ_σ Π_{a<b} (λ_σa - λ_σb - ic sgn(x_a - x_b)) / (λ_σa - λ_σb)
                 Π_a e^{iλ_σa (x_a - L/2)}

    at points x of shape (..., N).
    """
    x = np.asarray(x, dtype=float)
    roots = np.asarray(roots, dtype=float)
    n = len(roots)
    total = np.zeros(x.shape[:-1], dtype=complex)
    for perm in permutations(range(n)):
        lam = roots[list(perm)]
        term = np.exp(1j * np.sum(lam * (x - 0.5 * L), axis=-1))
        for a in range(n):
            for b in range(a + 1, n):
                diff = lam[a] - lam[b]
                term = term * (diff - 1j * c * np.sign(x[..., a] - x[..., b])) / diff
        total = total + term
    return (-1j * np.sqrt(c)) ** n * total


def _ordered_sectors(L, n, nodes):
    """Points and weights covering [0, L]^n sector by sector (n ≤ 2)."""
    if n == 0:
        return np.zeros((1, 0)), np.ones(1)
    rule = gauss_legendre(nodes, 0.0, L)
    if n == 1:
        return rule.nodes[:, None], rule.weights
    # x_1 < x_2 and its mirror image
    outer = rule
    inner = gauss_legendre(nodes, 0.0, 1.0)
    x2 = np.repeat(outer.nodes, nodes)
    x1 = x2 * np.tile(inner.nodes, nodes)
    w = np.repeat(outer.weights, nodes) * x2 * np.tile(inner.weights, nodes)
    lower = np.stack([x1, x2], axis=-1)
    return np.concatenate([lower, lower[:, ::-1]]), np.concatenate([w, w])


def nls_overlap_quadrature(L, c, bra, ket, field=False, nodes=OVERLAP_NODES):
    """
    ∫ conj φ_bra φ_ket d^N x / N! by quadrature on ordered sectors.

    With field=True the bra has N+1 roots and its first coordinate sits at
    the origin, giving the form factor of Φ†(0).

    Args:
        L: Volume
        c: Coupling
        bra: Roots of the bra state
        ket: Roots of the ket state (N ≤ 2)
        field: Insert Φ†(0)
        nodes: Gauss nodes per dimension and sector

    Returns:
        complex
    """
    bra = np.asarray(bra, dtype=float)
    ket = np.asarray(ket, dtype=float)
    n = len(ket)
    if n > MAX_OVERLAP_PARTICLES:
        raise DomainError(f"Direct quadrature supports N ≤ {MAX_OVERLAP_PARTICLES}, got {n}")
    if len(bra) != n + (1 if field else 0):
        raise DomainError(f"Bra has {len(bra)} roots for a ket with {n} (field={field})")
    points, weights = _ordered_sectors(L, n, nodes)
    bra_points = np.concatenate([np.zeros((len(points), 1)), points], axis=1) if field else points
    values = np.conj(nls_wavefunction(bra_points, bra, c, L)) * nls_wavefunction(points, ket, c, L)
    factorial = float(np.prod(np.arange(1, n + 1)))
    return complex(np.sum(weights * values) / factorial)
