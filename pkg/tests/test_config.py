import pytest

from cyclewalk.config import (
    DEFAULT_SEED,
    SEED_ENV_VAR,
    resolve_seed,
    validate_anneal_params,
    validate_heat_params,
    validate_scaling_params,
    validate_walk_params,
    zero_eigenvalue_threshold,
)


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    assert resolve_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV_VAR, "1234")
    assert resolve_seed() == 1234
    assert resolve_seed(7) == 7
    monkeypatch.setenv(SEED_ENV_VAR, "not-a-number")
    with pytest.raises(ValueError, match=SEED_ENV_VAR):
        resolve_seed()


def test_walk_params(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    params = validate_walk_params({"horizon": 2.0})
    assert params["horizon"] == 2.0
    assert params["record_mode"] == "full"
    assert params["seed"] == DEFAULT_SEED
    assert validate_walk_params({"horizon": None, "max_jumps": 10})["max_jumps"] == 10


@pytest.mark.parametrize("bad", [
    {"horizon": None, "max_jumps": None},
    {"horizon": -1.0},
    {"max_jumps": -5},
    {"record_mode": "verbose"},
    {"n_trajectories": 0},
    {"threads": 0},
])
def test_walk_params_rejected(bad):
    with pytest.raises(ValueError):
        validate_walk_params(bad)


@pytest.mark.parametrize("bad", [
    {"t0": 0.0},
    {"alpha": 1.0},
    {"alpha": 0.0},
    {"t_min": 0.0},
    {"max_steps": -1},
    {"cutoff": 1.2},
])
def test_anneal_params_rejected(bad):
    with pytest.raises(ValueError):
        validate_anneal_params(bad)


def test_heat_params_keep_defaults_for_none():
    params = validate_heat_params({"method": None, "operator": None, "n_steps": None})
    assert params == {"method": None, "operator": "up", "n_steps": 20}
    with pytest.raises(ValueError):
        validate_heat_params({"method": "euler"})
    with pytest.raises(ValueError):
        validate_heat_params({"operator": "down"})


def test_scaling_params_sort_and_check_n():
    params = validate_scaling_params({"n_list": [8, 4, 8], "seed": 3})
    assert params["n_list"] == [4, 8]
    for bad in ([], [5], [2], [4, 7]):
        with pytest.raises(ValueError):
            validate_scaling_params({"n_list": bad})
    with pytest.raises(ValueError):
        validate_scaling_params({"cycles": ["sigma3"]})
    with pytest.raises(ValueError):
        validate_scaling_params({"horizon": 0.0})


def test_zero_eigenvalue_threshold():
    assert zero_eigenvalue_threshold(0.5) == pytest.approx(1e-9)
    assert zero_eigenvalue_threshold(100.0) == pytest.approx(1e-7)
