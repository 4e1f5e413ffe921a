import math

import numpy as np
import pytest

from cyclewalk.core.complex import build_torus_triangulation
from cyclewalk.core.forms import builtin_form, star_d
from cyclewalk.core.spectral import up_laplacian
from cyclewalk.core.torus_lab import (
    bracket_normalization_check,
    generator_error,
    generator_limit,
    lambda_min_up,
    mesh_size,
    qv_estimator,
    rescaled_generator,
    stokes_residuals,
    torus_basis_cycles,
    triangle_identity_checks,
    uniform_cycle_pairing,
)
from cyclewalk.core.walk import WalkConfig, simulate

from .conftest import random_cycle


@pytest.mark.parametrize("n", [4, 6, 8])
def test_basis_cycles(n):
    complex_ = build_torus_triangulation(n)
    sigma1, sigma2 = torus_basis_cycles(complex_)
    assert len(sigma1) == n
    assert len(sigma2) == 2 * n
    assert sigma1.l1() == n and sigma2.l1() == 2 * n


def test_generator_limit_on_the_horizontal_cycle(torus4, torus4_cycles):
    sigma1, _ = torus4_cycles
    value = generator_limit(torus4, sigma1, builtin_form("cos_mode"))
    assert value == pytest.approx(-8.0 * math.pi ** 2 / 3.0)


def test_direct_and_linear_generators_agree(torus4, torus4_cycles):
    rng = np.random.default_rng(12)
    phi = builtin_form("mixed")
    for sigma in [*torus4_cycles, random_cycle(torus4, rng, torus4_cycles)]:
        linear = rescaled_generator(torus4, sigma, phi, method="linear")
        direct = rescaled_generator(torus4, sigma, phi, method="direct")
        assert direct == pytest.approx(linear, rel=1e-9, abs=1e-9)
    with pytest.raises(ValueError):
        rescaled_generator(torus4, torus4_cycles[0], phi, method="guess")


def test_generator_converges_with_mesh_refinement():
    phi = builtin_form("cos_mode")
    errors = [generator_error(n, phi)["error"] for n in (4, 8, 16)]
    assert errors[0] > errors[1] > errors[2]
    for coarse, fine in zip(errors, errors[1:]):
        assert 1.4 <= coarse / fine <= 5.2


def test_generator_error_report_keys():
    report = generator_error(4, builtin_form("cos_mode"))
    assert set(report) == {"n", "value", "limit", "error"}
    assert report["error"] == pytest.approx(abs(report["value"] - report["limit"]))


def test_lambda_min_matches_dense_eigensolver(torus4):
    values = np.linalg.eigvalsh(up_laplacian(torus4, 1, dtype=float).toarray())
    oracle = min(v for v in values if v > 1e-9)
    assert lambda_min_up(4, torus4) == pytest.approx(oracle, rel=1e-8)


def test_lambda_min_scales_like_eps_squared():
    values = [lambda_min_up(n) for n in (4, 8, 16)]
    for coarse, fine in zip(values, values[1:]):
        assert 0.15 <= fine / coarse <= 0.40


def test_constant_forms_have_no_quadratic_variation(torus4, torus4_cycles):
    for sigma in torus4_cycles:
        assert qv_estimator(torus4, sigma, builtin_form("constant_dx1")) == pytest.approx(0.0, abs=1e-12)
        assert qv_estimator(torus4, sigma, builtin_form("constant_dx2")) == pytest.approx(0.0, abs=1e-12)


def test_bracket_matches_the_factor_three_normalisation():
    complex_ = build_torus_triangulation(8)
    sigma1, _ = torus_basis_cycles(complex_)
    report = bracket_normalization_check(complex_, sigma1, builtin_form("sin_mode"))
    assert report["matches"] == "factor3"
    assert report["factor3"] == pytest.approx(3.0 * report["unit"])
    assert report["relative_error_factor3"] < 0.1


def test_uniform_pairing_of_a_constant(torus4, torus4_cycles):
    sigma1, _ = torus4_cycles
    # length 2 of sigma_1 times eps
    assert uniform_cycle_pairing(torus4, sigma1, lambda x1, x2: np.ones_like(x1)) == pytest.approx(0.5)
    assert mesh_size(4) == 0.25


@pytest.mark.parametrize("n", [8, 16])
def test_voronoi_cost_identities(n):
    eps = mesh_size(n)
    report = triangle_identity_checks(n)
    for name in ("cost_integral", "centered_cost_derivative"):
        entry = report[name]
        assert entry["value"] == pytest.approx(entry["expected"], rel=1e-8)
    for name in ("centered_cost", "cost_derivative", "vertical_centered_cost_derivative"):
        assert abs(report[name]["value"]) <= 1e-10 * eps ** 2


def test_small_triangle_expansions_are_third_order():
    phi = builtin_form("cos_mode")
    coarse = triangle_identity_checks(16, phi)
    fine = triangle_identity_checks(32, phi)
    for name in ("small_triangle_expansion", "boundary_pairing_expansion"):
        a, b = coarse[name]["error_over_eps3"], fine[name]["error_over_eps3"]
        assert a > 0 and b > 0
        assert max(a, b) / min(a, b) <= 1.5
    assert fine["stokes"]["error"] <= 1e-10


def test_stokes_holds_on_every_mesh_triangle(torus4):
    residuals = stokes_residuals(torus4, builtin_form("mixed"), limit=12)
    assert len(residuals) == 12
    assert np.all(residuals < 1e-9)


def wandering_cycles(complex_, n_cycles, seed):
    """Walk states reached from the basis cycles; every one is a simple cycle"""
    bases = torus_basis_cycles(complex_)
    n = int(round(math.sqrt(complex_.n_vertices)))
    config = WalkConfig(seed=seed, horizon=None, max_jumps=2 * n, record_mode="summary")
    cycles = []
    for stream in range(n_cycles):
        start = bases[stream % 2] * (1 if stream % 4 < 2 else -1)
        cycles.append(simulate(complex_, start, config, stream=stream).final.chain)
    return cycles


@pytest.mark.slow
def test_quadratic_variation_of_simple_cycles_converges_at_the_mesh_rate():
    phi = builtin_form("sin_mode")
    curl = star_d(phi)
    constants = {}
    for n in (8, 16, 32):
        complex_ = build_torus_triangulation(n)
        worst = 0.0
        for sigma in wandering_cycles(complex_, 20, seed=n):
            assert sigma.max_abs() <= 1
            qv = qv_estimator(complex_, sigma, phi)
            reference = 3.0 * uniform_cycle_pairing(complex_, sigma, lambda x1, x2: curl(x1, x2) ** 2)
            worst = max(worst, abs(qv - reference) / max(1.0, qv))
        constants[n] = worst / mesh_size(n)
    assert max(constants.values()) < 10.0
    assert constants[16] <= 1.5 * constants[8] + 1e-9
    assert constants[32] <= 1.5 * constants[16] + 1e-9
