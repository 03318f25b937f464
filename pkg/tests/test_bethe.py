import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from intlab.bethe import (
    background_root,
    counting_function,
    excitation_ep,
    excitation_from_integers,
    finite_size_shift,
    solve_bethe,
    yang_yang_action,
    yang_yang_potential,
)
from intlab.errors import DomainError
from intlab.linint import lieb_phase


def test_ground_state_converges(ground_state):
    assert ground_state.residual < 1e-12
    assert np.all(np.diff(ground_state.roots) > 0)
    assert ground_state.momentum() == pytest.approx(0.0, abs=1e-12)


def test_counting_function_hits_integers(ground_state):
    values = ground_state.L * counting_function(ground_state, ground_state.roots)
    assert np.allclose(values, ground_state.integers, atol=1e-10)


def test_yang_yang_action_is_stationary_at_roots(ground_state):
    s = ground_state
    targets = 2.0 * np.pi * (s.integers - 0.5 * (s.N + 1))
    x = s.roots
    step = 1e-5
    grad = []
    for k in range(s.N):
        e = np.zeros(s.N)
        e[k] = step
        grad.append((yang_yang_action(x + e, s.L, s.c, targets)
                     - yang_yang_action(x - e, s.L, s.c, targets)) / (2.0 * step))
    assert np.max(np.abs(grad)) < 1e-6
    rng = np.random.default_rng(0)
    base = yang_yang_action(x, s.L, s.c, targets)
    for _ in range(5):
        assert yang_yang_action(x + 0.1 * rng.standard_normal(s.N), s.L, s.c, targets) > base


@given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=0.2, max_value=5.0))
def test_yang_yang_potential_derivative_is_phase(x, c):
    step = 1e-5
    slope = (yang_yang_potential(x + step, c) - yang_yang_potential(x - step, c)) / (2.0 * step)
    assert slope == pytest.approx(float(np.real(lieb_phase(x, c))), abs=1e-7)


def test_background_root_matches_occupied_root(ground_state):
    assert background_root(ground_state, 3) == pytest.approx(ground_state.roots[2], abs=1e-12)


def test_background_root_of_empty_label(ground_state):
    root = background_root(ground_state, 6)
    assert root > ground_state.roots[-1]
    assert ground_state.L * counting_function(ground_state, root)[0] == pytest.approx(6.0, abs=1e-10)


def test_free_fermion_roots():
    s = solve_bethe(10.0, 5, 1e8)
    expected = 2.0 * np.pi * (np.arange(1, 6) - 3.0) / 10.0
    assert np.allclose(s.roots, expected, atol=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.sets(st.integers(min_value=-6, max_value=12), min_size=1, max_size=6),
       st.floats(min_value=0.2, max_value=20.0))
def test_roots_follow_integer_order(integers, c):
    ints = sorted(integers)
    s = solve_bethe(12.0, len(ints), c, integers=ints)
    assert s.residual < 1e-12
    assert np.all(np.diff(s.roots) > 0)
    total = 2.0 * np.pi * np.sum(np.asarray(ints) - 0.5 * (len(ints) + 1)) / 12.0
    assert s.momentum().real == pytest.approx(total, abs=1e-9)


def test_twisted_roots_are_shifted():
    s = solve_bethe(10.0, 3, 1.0, beta=0.1)
    assert np.allclose(s.roots.imag, 2.0 * np.pi * 0.1 / 10.0)
    assert np.allclose(s.real_roots, solve_bethe(10.0, 3, 1.0).roots, atol=1e-12)


def test_bad_integers_rejected():
    with pytest.raises(DomainError):
        solve_bethe(10.0, 3, 1.0, integers=[1, 3, 3])
    with pytest.raises(DomainError):
        solve_bethe(10.0, 3, 1.0, integers=[1, 2])
    with pytest.raises(DomainError):
        solve_bethe(10.0, 3, 1e-4)


def test_excitation_labels():
    spec = excitation_from_integers([1, 2, 3, 4], [1, 2, 4, 6])
    assert spec.particles == (6,)
    assert spec.holes == (3,)
    assert spec.ell == 0
    assert spec.right_particles == (2,)
    assert spec.right_holes == (2,)
    field = excitation_from_integers([1, 2, 3, 4], [1, 2, 4, 5, 7])
    assert field.n_background == 5
    assert field.particles == (7,)
    assert field.holes == (3,)
    with pytest.raises(DomainError):
        excitation_from_integers([1, 2, 3, 4], [1, 2])
    with pytest.raises(DomainError):
        excitation_from_integers([1, 2, 3, 4], [1, 2, 2, 5])


def test_excitation_energy_and_shift(ground_state, dressed):
    excited = solve_bethe(20.0, 4, 1.0, integers=[1, 2, 3, 6])
    e = excitation_ep(ground_state, excited)
    assert e.dP_exact == pytest.approx(2.0 * np.pi * 2.0 / 20.0, abs=1e-10)
    assert e.dE_exact > 0.0
    assert np.isnan(e.dE_thermo)
    shift = finite_size_shift(ground_state, ground_state, np.array([0.1, 0.4]))
    assert np.allclose(shift, 0.0)
    with pytest.raises(DomainError):
        excitation_ep(ground_state, solve_bethe(21.0, 4, 1.0))
