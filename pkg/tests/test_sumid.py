import numpy as np
import pytest

from intlab.errors import DomainError, SingularityError
from intlab.sumid import SumParams, minimal_term, minimal_weight, s_ell_bruteforce, s_ell_closed


def test_trivial_class():
    p = SumParams(ell=0, nu=0.0, z=0.4, cutoff=10)
    assert s_ell_bruteforce(p) == pytest.approx(1.0, abs=1e-14)
    assert s_ell_closed(p) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("ell", [-1, 0, 1])
@pytest.mark.parametrize("nu", [0.3, complex(0.7, 0.2)])
def test_bruteforce_matches_closed_form(ell, nu):
    p = SumParams(ell=ell, nu=nu, z=0.4, cutoff=40)
    brute = s_ell_bruteforce(p)
    closed = s_ell_closed(p)
    assert abs(brute - closed) <= 1e-8 * max(1.0, abs(closed))


def test_minimal_weights():
    assert [minimal_weight(ell) for ell in (-2, -1, 0, 1, 2, 3)] == [3, 1, 0, 0, 1, 3]


def test_minimal_term_leads_small_z():
    p = SumParams(ell=2, nu=0.3, z=1e-4, cutoff=6)
    assert s_ell_bruteforce(p) == pytest.approx(minimal_term(p), rel=1e-3)


def test_parameter_validation():
    with pytest.raises(DomainError):
        SumParams(ell=0, nu=0.1, z=0.95)
    with pytest.raises(DomainError):
        SumParams(ell=0, nu=0.1, z=0.5, cutoff=-1)
    with pytest.raises(SingularityError):
        s_ell_closed(SumParams(ell=1, nu=-2.0, z=0.5))
