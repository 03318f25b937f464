import numpy as np
import pytest

from intlab.config import EXPERIMENT_PARAMS
from intlab.errors import DomainError
from intlab.experiments import run_experiment


def params(name, **overrides):
    return {**EXPERIMENT_PARAMS[name], **overrides}


def passed(result):
    return {c.quantity: c.passed for c in result.checks}


def test_unknown_experiment():
    with pytest.raises(DomainError):
        run_experiment("nonsense", {})


def test_sumid_trivial_class():
    result = run_experiment("sumid", params("sumid", cutoff=10))
    assert result.summary["diff"] < 1e-14
    assert passed(result) == {"sum_identity": True}


def test_dressed_checks_pass():
    result = run_experiment("dressed", params("dressed"))
    assert all(passed(result).values())
    assert len(result.rows) == 41


def test_bethe_free_fermion_check():
    result = run_experiment("bethe", params("bethe", c=1e8))
    assert passed(result) == {"bethe_residual": True, "free_fermion_roots": True}
    counting = [row["counting_times_L"] for row in result.rows]
    assert np.allclose(counting, [1, 2, 3, 4], atol=1e-9)


def test_formfactor_decomposition():
    result = run_experiment("formfactor", params("formfactor"))
    assert passed(result)["ff_decomposition"]


def test_formfactor_unknown_mode():
    with pytest.raises(DomainError):
        run_experiment("formfactor", params("formfactor", mode="sideways"))


def test_toeplitz_checks_pass():
    result = run_experiment("toeplitz", params("toeplitz"))
    assert passed(result) == {"lacunary_gain": True, "lacunary_plain": True, "lacunary_limit": True}
    assert result.summary["limit"] == pytest.approx(1.5**4 / 8.0)


def test_oracle_kinds():
    ed = run_experiment("oracle", params("oracle", L=6))
    assert ed.summary["kind"] == "ed"
    assert passed(ed) == {"ed_hermitian": True}
    overlap = run_experiment("oracle", params("oracle", kind="overlap", L=8.0))
    assert passed(overlap) == {"overlap": True}
    with pytest.raises(DomainError):
        run_experiment("oracle", params("oracle", kind="mystery"))


def test_toda_level_range():
    with pytest.raises(DomainError):
        run_experiment("toda", params("toda", level=7))


@pytest.mark.slow
def test_formfactor_discrete_asymptotics_improve_with_volume():
    result = run_experiment("formfactor", params("formfactor", mode="asymptotic", holes=[], particles=[],
                                                 L_values=[64.0, 256.0]))
    first, last = (row["delta"] for row in result.rows)
    assert last < first


@pytest.mark.slow
def test_formfactor_asymptotic_ratio_gain():
    result = run_experiment("formfactor", params("formfactor", mode="asymptotic", holes=[], particles=[],
                                                 L_values=[100.0, 400.0]))
    first, last = (row["delta"] for row in result.rows)
    assert last <= 0.6 * first
    assert passed(result) == {"ff_asymptotic_ratio": True}


@pytest.mark.slow
@pytest.mark.parametrize("name,overrides", [
    ("gsk", {}),
    ("cshift", {}),
    ("yangyang", {}),
    ("qtm", {"excitations": 0}),
    ("toda", {}),
    ("sinh", {}),
    ("oracle", {"kind": "toda"}),
])
def test_acceptance_comparisons(name, overrides):
    result = run_experiment(name, params(name, **overrides))
    assert not result.failed, [c for c in result.failed]
