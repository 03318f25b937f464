"""
Restricted multiple sum over particle/hole integer configurations and its
closed form

    S_ℓ(ν|z) = z^{ℓ(ℓ-1)/2} / (1-z)^{(ν+ℓ)²} · G²(1+ℓ+ν) / G²(1+ν).

The brute-force side truncates by total z-power Σ(p_a - 1) + Σh_a.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, SingularityError
from .special import ln_barnes_g, ln_gamma

logger = logging.getLogger(__name__)

MAX_MODULUS = 0.9


@dataclass(frozen=True)
class SumParams:
    ell: int
    nu: complex
    z: complex
    cutoff: int = 40

    def __post_init__(self):
        if abs(self.z) > MAX_MODULUS:
            raise DomainError(f"|z| = {abs(self.z):.3g} exceeds {MAX_MODULUS}")
        if self.cutoff < 0:
            raise DomainError(f"Cutoff must be non-negative, got {self.cutoff}")


@lru_cache(maxsize=8)
def _strict_sets(lowest, budget):
    """All strictly increasing tuples of integers >= lowest with sum <= budget."""
    sets = []

    def grow(prefix, start, used):
        sets.append((prefix, used))
        for v in range(start, budget - used + 1):
            grow(prefix + (v,), v + 1, used + v)

    grow((), lowest, 0)
    return tuple(sets)


def _log_vandermonde_sq(values):
    """2 Σ_{a>b} ln|v_a - v_b| row-wise."""
    if values.shape[1] < 2:
        return np.zeros(values.shape[0])
    diff = values[:, :, None] - values[:, None, :]
    iu = np.triu_indices(values.shape[1], k=1)
    return 2.0 * np.log(np.abs(diff[:, iu[0], iu[1]])).sum(axis=1)


def _group_by_length(sets):
    groups = {}
    for values, weight in sets:
        groups.setdefault(len(values), []).append((values, weight))
    out = {}
    for n, items in groups.items():
        arr = np.array([v for v, _ in items], dtype=float).reshape(len(items), n)
        out[n] = (arr, np.array([w for _, w in items]))
    return out


def s_ell_bruteforce(p):
    """
    Truncated restricted sum.

    Args:
        p: SumParams

    Returns:
        complex: Sum of all terms with Σ(p_a - 1) + Σh_a <= cutoff
    """
    nu = complex(p.nu)
    z = complex(p.z)
    table = np.arange(1, p.cutoff + 2)
    # 2 ln[Γ(n+ν)/Γ(n)] and 2 ln[Γ(n-ν)/Γ(n)] for n = 1..cutoff+1
    lg_particle = 2.0 * (ln_gamma(table + nu) - ln_gamma(table.astype(complex)))
    sine_sq = (np.sin(np.pi * nu) / np.pi) ** 2
    if abs(nu - round(nu.real)) < 1e-14:
        sine_sq = 0.0
    lg_hole = None
    if sine_sq != 0:
        lg_hole = 2.0 * (ln_gamma(table - nu) - ln_gamma(table.astype(complex)))

    # Particles stored as p-1 >= 0, holes as h >= 1
    particles = _group_by_length(_strict_sets(0, p.cutoff))
    holes = _group_by_length(_strict_sets(1, p.cutoff))

    total = 0.0j
    n_terms = 0
    for n_p, (p_arr, p_weights) in particles.items():
        n_h = n_p - p.ell
        if n_h < 0 or n_h not in holes:
            continue
        factor = sine_sq**n_h
        if factor == 0:
            continue
        h_arr, h_weights = holes[n_h]
        p_int = p_arr.astype(int)
        h_int = h_arr.astype(int)
        p_self = _log_vandermonde_sq(p_arr) + lg_particle[p_int].sum(axis=1) if n_p else np.zeros(len(p_arr))
        h_self = _log_vandermonde_sq(h_arr) + lg_hole[h_int - 1].sum(axis=1) if n_h else np.zeros(len(h_arr))
        for i in range(len(p_arr)):
            allowed = h_weights <= p.cutoff - p_weights[i]
            if not np.any(allowed):
                continue
            hs = h_arr[allowed]
            # p_a + h_b - 1 with p_a - 1 stored
            cross = 2.0 * np.log(hs[:, None, :] + p_arr[i][None, :, None]).sum(axis=(1, 2))
            powers = z ** (p_weights[i] + h_weights[allowed])
            total += factor * np.sum(powers * np.exp(p_self[i] + h_self[allowed] - cross))
            n_terms += int(allowed.sum())
    logger.debug(f"S_{p.ell}(ν={nu}, z={z}) brute force: {n_terms} terms up to weight {p.cutoff}")
    return complex(total)


def s_ell_closed(p):
    """
    Closed form of the restricted sum.

    Raises:
        SingularityError: If G(1+ν) = 0 (ν a negative integer)
    """
    nu = complex(p.nu)
    z = complex(p.z)
    denominator = ln_barnes_g(1.0 + nu)
    if np.isneginf(denominator.real):
        raise SingularityError(f"G(1+ν) vanishes at ν = {nu}")
    numerator = ln_barnes_g(1.0 + p.ell + nu)
    if np.isneginf(numerator.real):
        return 0.0j
    power = z ** (p.ell * (p.ell - 1) // 2)
    return complex(power * np.exp(-(nu + p.ell) ** 2 * np.log(1.0 - z) + 2.0 * (numerator - denominator)))


def minimal_weight(ell):
    """Lowest z-power reached by a configuration of class ℓ."""
    k = abs(int(ell))
    return k * (k - 1) // 2 if ell >= 0 else k * (k + 1) // 2


def minimal_term(p):
    """
    Term of the unique lowest-weight configuration: particles 1..ℓ for
    ℓ > 0, holes 1..|ℓ| for ℓ < 0, nothing for ℓ = 0.
    """
    nu = complex(p.nu)
    k = abs(int(p.ell))
    if k == 0:
        return 1.0 + 0.0j
    ints = np.arange(1, k + 1)
    vandermonde = _log_vandermonde_sq(ints[None, :].astype(float))[0]
    if p.ell > 0:
        log_gammas = 2.0 * np.sum(ln_gamma(ints + nu) - ln_gamma(ints.astype(complex)))
        return complex(complex(p.z) ** minimal_weight(p.ell) * np.exp(vandermonde + log_gammas))
    log_gammas = 2.0 * np.sum(ln_gamma(ints - nu) - ln_gamma(ints.astype(complex)))
    sine_sq = (np.sin(np.pi * nu) / np.pi) ** 2
    return complex(complex(p.z) ** minimal_weight(p.ell) * sine_sq**k * np.exp(vandermonde + log_gammas))
