import pytest

from intlab import fermi_boundary, solve_bethe


@pytest.fixture(scope="session")
def dressed():
    """Dressed data at c = 1, h = 1."""
    return fermi_boundary(1.0, 1.0)


@pytest.fixture(scope="session")
def ground_state():
    return solve_bethe(20.0, 4, 1.0)


@pytest.fixture(scope="session")
def field_excitation():
    """N+1 state with the hole at 3 moved to 7."""
    return solve_bethe(20.0, 5, 1.0, integers=[1, 2, 4, 5, 7])


@pytest.fixture
def sumid_config(tmp_path):
    return {
        "experiment": "sumid",
        "params": {"ell": 0, "nu": 0.0, "z": 0.4, "cutoff": 12},
        "output_path": str(tmp_path / "results"),
        "seed": 0,
    }
