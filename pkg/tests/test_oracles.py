from functools import reduce

import numpy as np
import pytest

from intlab.bethe import solve_bethe
from intlab.errors import DomainError
from intlab.formfactor import ff_conjugated_field, gaudin_norm
from intlab.oracles import (
    boundary_field,
    decay_rate,
    ed_xxz,
    nls_overlap_quadrature,
    toda2_relative_spectrum,
)

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1j], [1j, 0.0]]),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def site_operator(name, i, L):
    ops = [np.eye(2, dtype=complex)] * L
    ops[i] = PAULI[name]
    return reduce(np.kron, ops)


def dense_xxz(L, J, delta, h, periodic=True, fields=None):
    bonds = [(i, (i + 1) % L) for i in range(L if periodic else L - 1)]
    dim = 1 << L
    H = np.zeros((dim, dim), dtype=complex)
    for i, j in bonds:
        H += J * (site_operator("x", i, L) @ site_operator("x", j, L)
                  + site_operator("y", i, L) @ site_operator("y", j, L)
                  + delta * (site_operator("z", i, L) @ site_operator("z", j, L) + np.eye(dim)))
    for i in range(L):
        H -= 0.5 * h * site_operator("z", i, L)
    if fields is not None:
        for i, b in enumerate(fields):
            H += b * site_operator("z", i, L)
    return H


def thermal_average(H, op, T):
    E, V = np.linalg.eigh(H)
    w = np.exp(-(E - E.min()) / T)
    diag = np.einsum("ik,ij,jk->k", V.conj(), op, V).real
    return float(np.sum(w * diag) / np.sum(w))


def test_periodic_spectrum_matches_dense():
    L, J, delta, h, T = 6, 1.0, 0.7, 0.3, 0.8
    ed = ed_xxz(L, delta, h, T, J=J, correlations=(2,))
    H = dense_xxz(L, J, delta, h)
    E = np.linalg.eigvalsh(H)
    assert len(ed.energies) == 1 << L
    assert np.allclose(ed.energies, np.sort(E), atol=1e-10)
    expected_f = -T * (np.log(np.sum(np.exp(-(E - E.min()) / T))) - E.min() / T) / L
    assert ed.free_energy == pytest.approx(expected_f, abs=1e-12)
    mz = thermal_average(H, site_operator("z", 0, L), T)
    zz = thermal_average(H, site_operator("z", 0, L) @ site_operator("z", 2, L), T)
    assert ed.magnetization == pytest.approx(mz, abs=1e-10)
    assert ed.correlations[2] == pytest.approx(zz - mz**2, abs=1e-10)


def test_open_chain_with_boundary_fields_matches_dense():
    L, J, delta, h, T = 6, 1.0, 0.5, 0.2, 1.0
    xi = (0.9j, 1.3j)
    ed = ed_xxz(L, delta, h, T, J=J, boundary=xi)
    fields = np.zeros(L)
    fields[0] = boundary_field(J, delta, xi[0])
    fields[-1] = boundary_field(J, delta, xi[1])
    H = dense_xxz(L, J, delta, h, periodic=False, fields=fields)
    assert np.allclose(ed.energies, np.linalg.eigvalsh(H), atol=1e-10)
    assert ed.magnetization == pytest.approx(thermal_average(H, site_operator("z", 0, L), T), abs=1e-10)


def test_magnetization_limits():
    assert ed_xxz(8, 0.5, 0.0, 1.0).magnetization == pytest.approx(0.0, abs=1e-12)
    assert ed_xxz(8, 0.5, 40.0, 1.0).magnetization > 0.999


def test_ed_validation():
    with pytest.raises(DomainError):
        ed_xxz(17, 0.5, 0.0, 1.0)
    with pytest.raises(DomainError):
        ed_xxz(6, 0.5, 0.0, 0.0)
    with pytest.raises(DomainError):
        ed_xxz(6, 0.5, 0.0, 1.0, correlations=(6,))
    with pytest.raises(DomainError):
        boundary_field(1.0, 1.2, 0.5)
    assert boundary_field(1.0, 0.5, None) == 0.0


def test_decay_rate_of_exponential():
    m = np.arange(1, 6)
    assert decay_rate(m, 0.3 * np.exp(-0.7 * m)) == pytest.approx(0.7, abs=1e-12)
    with pytest.raises(DomainError):
        decay_rate([1, 2], [0.0, 0.0])


def test_toda_spectrum_structure():
    spectrum = toda2_relative_spectrum(1.0)
    assert np.all(np.diff(spectrum.levels) > 0)
    assert spectrum.parity == (1, -1, 1, -1, 1)
    assert spectrum.wall_decay < 1e-12


def test_toda_harmonic_limit():
    hbar = 0.05
    spectrum = toda2_relative_spectrum(hbar)
    expected = 2.0 + hbar * (2 * np.arange(5) + 1)
    assert np.allclose(spectrum.levels, expected, atol=1e-2)


def test_toda_box_too_small():
    with pytest.raises(DomainError):
        toda2_relative_spectrum(1.0, box=2.0, n=200)
    with pytest.raises(DomainError):
        toda2_relative_spectrum(0.0)


def test_single_particle_overlaps():
    L, c = 8.0, 1.7
    s = solve_bethe(L, 1, c, integers=[2])
    other = solve_bethe(L, 1, c, integers=[4])
    assert nls_overlap_quadrature(L, c, s.roots, s.roots).real == pytest.approx(c * L, rel=1e-12)
    assert abs(nls_overlap_quadrature(L, c, s.roots, other.roots)) < 1e-10


def test_two_particle_norm_and_orthogonality():
    L, c = 8.0, 1.0
    a = solve_bethe(L, 2, c)
    b = solve_bethe(L, 2, c, integers=[1, 3])
    norm = nls_overlap_quadrature(L, c, a.roots, a.roots)
    assert norm.real == pytest.approx(gaudin_norm(a), rel=1e-8)
    assert abs(nls_overlap_quadrature(L, c, a.roots, b.roots)) < 1e-8 * norm.real


def test_field_form_factor_by_quadrature():
    L, c = 8.0, 1.0
    ground = solve_bethe(L, 1, c)
    excited = solve_bethe(L, 2, c, integers=[1, 3])
    overlap = nls_overlap_quadrature(L, c, excited.roots, ground.roots, field=True)
    norms = (nls_overlap_quadrature(L, c, excited.roots, excited.roots).real
             * nls_overlap_quadrature(L, c, ground.roots, ground.roots).real)
    assert abs(overlap) ** 2 / norms == pytest.approx(ff_conjugated_field(ground, excited), rel=1e-5)


def test_overlap_validation():
    roots = solve_bethe(8.0, 3, 1.0).roots
    with pytest.raises(DomainError):
        nls_overlap_quadrature(8.0, 1.0, roots, roots)
    with pytest.raises(DomainError):
        nls_overlap_quadrature(8.0, 1.0, roots[:2], roots[:2], field=True)
