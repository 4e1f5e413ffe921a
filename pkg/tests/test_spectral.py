import gc
import weakref

import numpy as np
import pytest
import scipy.sparse as sp

from cyclewalk.core.chains import Chain, boundary, elementary, is_cycle
from cyclewalk.core.complex import SimplicialComplex, build_torus_triangulation
from cyclewalk.core.spectral import (
    adjacency_form,
    betti,
    boundary_matrix,
    boundary_snf,
    down_laplacian,
    full_laplacian,
    harmonic_projection,
    hodge_decomposition,
    homology_generators,
    is_boundary,
    same_homology_class,
    smallest_positive_eigenvalue,
    spectrum,
    to_coordinate_text,
    up_laplacian,
    zobel_check,
)


def test_boundary_matrix_columns_of_two_triangles():
    complex_ = SimplicialComplex.from_simplices([(0, 1, 2), (0, 1, 3)])
    b2 = boundary_matrix(complex_, 2).toarray()
    _, ab, _ = complex_.index((0, 1))
    _, ac, _ = complex_.index((0, 2))
    _, bc, _ = complex_.index((1, 2))
    _, ad, _ = complex_.index((0, 3))
    _, bd, _ = complex_.index((1, 3))
    assert (b2[ab, 0], b2[ac, 0], b2[bc, 0]) == (1, -1, 1)
    assert (b2[ab, 1], b2[ad, 1], b2[bd, 1]) == (1, -1, 1)
    assert np.count_nonzero(b2) == 6


def test_boundary_matrix_of_a_path_is_the_incidence_matrix():
    complex_ = SimplicialComplex.from_simplices([(0, 1)])
    assert boundary_matrix(complex_, 1).toarray().tolist() == [[-1], [1]]


def test_boundary_matrix_is_sparse_integer(torus4):
    b2 = boundary_matrix(torus4, 2)
    assert sp.issparse(b2)
    assert b2.dtype == np.int64
    assert b2.shape == (48, 32)
    assert not (boundary_matrix(torus4, 1) @ b2).count_nonzero()


def test_graph_laplacian(small_graph):
    l0 = up_laplacian(small_graph, 0).toarray()
    assert l0.tolist() == [
        [2, -1, -1, 0],
        [-1, 2, -1, 0],
        [-1, -1, 3, -1],
        [0, 0, -1, 1],
    ]
    single = SimplicialComplex.from_simplices([(0, 1)])
    assert full_laplacian(single, 0).toarray().tolist() == [[1, -1], [-1, 1]]


def test_filled_triangle_edge_spectrum(filled_triangle):
    values = spectrum(full_laplacian(filled_triangle, 1)).eigenvalues
    assert values == pytest.approx([3.0, 3.0, 3.0])


@pytest.mark.parametrize("fixture", ["filled_triangle", "torus4", "tetrahedron_boundary", "annulus"])
def test_adjacency_form_matches_boundary_products(fixture, request):
    complex_ = request.getfixturevalue(fixture)
    for k in range(complex_.max_dim + 1):
        difference = adjacency_form(complex_, k) - full_laplacian(complex_, k)
        assert not difference.count_nonzero()


def test_single_edge_spectrum():
    single = SimplicialComplex.from_simplices([(0, 1)])
    assert spectrum(full_laplacian(single, 0)).eigenvalues == pytest.approx([0.0, 2.0], abs=1e-12)


def test_zero_multiplicity_counts_components():
    rng = np.random.default_rng(7)
    edges = []
    for offset, size in ((0, 5), (5, 4), (9, 6)):
        order = offset + rng.permutation(size)
        edges.extend(zip(order[:-1], order[1:]))
        edges.append((order[0], order[-1]))
    complex_ = SimplicialComplex.from_simplices(edges)
    assert spectrum(up_laplacian(complex_, 0, dtype=float)).zero_count() == 3
    assert betti(complex_, 0) == 3


def test_non_symmetric_operator_is_rejected():
    with pytest.raises(ValueError):
        spectrum(sp.csr_matrix(np.array([[1.0, 2.0], [0.0, 1.0]])))


def test_iterative_solver_agrees_with_dense(monkeypatch, torus4):
    op = up_laplacian(torus4, 1, dtype=float)
    dense_values = spectrum(op).eigenvalues
    monkeypatch.setattr("cyclewalk.core.spectral.DENSE_EIGEN_MAX_DIM", 10)
    lanczos = spectrum(op, count=6)
    assert lanczos.method == "lanczos"
    assert lanczos.eigenvalues == pytest.approx(dense_values[:6], abs=1e-8)


def test_smallest_positive_eigenvalue_with_deflation(monkeypatch, torus4):
    op = up_laplacian(torus4, 1, dtype=float)
    dense_value = smallest_positive_eigenvalue(op)
    kernel_dim = 48 - 31
    monkeypatch.setattr("cyclewalk.core.spectral.DENSE_EIGEN_MAX_DIM", 10)
    assert smallest_positive_eigenvalue(op, kernel_dim=kernel_dim) == pytest.approx(dense_value, rel=1e-8)


def test_zobel_transfer_on_torus(torus4):
    report = zobel_check(torus4, 1)
    assert report["n_positive"] == 15
    assert report["spectral_gap"] < 1e-8
    assert report["forward_residual"] < 1e-8
    assert report["backward_residual"] < 1e-8


def test_betti_examples(four_gon, tetrahedron_boundary):
    assert betti(four_gon, 1) == 1
    assert betti(four_gon, 1, method="spectral") == 1
    assert betti(tetrahedron_boundary, 2) == 1
    assert betti(tetrahedron_boundary, 2, method="spectral") == 1
    assert betti(tetrahedron_boundary, 1) == 0


def test_exact_and_spectral_betti_agree_on_torus():
    complex_ = build_torus_triangulation(6)
    for k in range(3):
        assert betti(complex_, k, "exact") == betti(complex_, k, "spectral")
    with pytest.raises(ValueError):
        betti(complex_, 1, "guess")


def test_boundary_membership(torus4, torus4_cycles):
    sigma1, sigma2 = torus4_cycles
    d_tau = boundary(torus4, Chain(2, {3: 1}))
    assert is_boundary(torus4, d_tau)
    assert not is_boundary(torus4, sigma1)
    assert same_homology_class(torus4, sigma1 + d_tau, sigma1)
    assert not same_homology_class(torus4, sigma1, sigma2)


def test_smith_form_is_cached_on_the_complex():
    complex_ = build_torus_triangulation(4)
    snf = boundary_snf(complex_, 2)
    assert boundary_snf(complex_, 2) is snf
    assert boundary_snf(build_torus_triangulation(4), 2) is not snf
    ref = weakref.ref(complex_)
    del complex_
    gc.collect()
    assert ref() is None


def test_homology_generators(four_gon, torus4, filled_disk):
    (generator,) = homology_generators(four_gon, 1)
    assert is_cycle(four_gon, generator)
    assert sorted(abs(v) for _, v in generator.items()) == [1, 1, 1, 1]
    generators = homology_generators(torus4, 1)
    assert len(generators) == 2
    for g in generators:
        assert is_cycle(torus4, g)
        assert not is_boundary(torus4, g)
    assert not same_homology_class(torus4, generators[0], generators[1])
    assert homology_generators(filled_disk, 1) == []


def test_harmonic_projection_of_a_boundary_vanishes(filled_triangle):
    d_tau = boundary(filled_triangle, elementary(filled_triangle, (0, 1, 2)))
    assert harmonic_projection(filled_triangle, d_tau).is_zero()


def test_harmonic_projection_fixes_harmonic_chains(torus4, torus4_cycles):
    sigma1, _ = torus4_cycles
    harmonic = harmonic_projection(torus4, sigma1)
    y = harmonic.to_dense(48)
    assert np.linalg.norm(full_laplacian(torus4, 1, dtype=float) @ y) <= 1e-8
    again = harmonic_projection(torus4, harmonic).to_dense(48)
    assert np.allclose(again, y, atol=1e-10)


def test_hodge_decomposition_is_orthogonal(torus4):
    rng = np.random.default_rng(2)
    sigma = Chain.from_dense(1, rng.normal(size=48))
    exact, coexact, harmonic = hodge_decomposition(torus4, sigma)
    parts = [c.to_dense(48) for c in (exact, coexact, harmonic)]
    assert np.allclose(sum(parts), sigma.to_dense(48))
    assert abs(parts[0] @ parts[1]) < 1e-9
    assert abs(parts[0] @ parts[2]) < 1e-9
    assert abs(parts[1] @ parts[2]) < 1e-9
    assert np.linalg.norm(down_laplacian(torus4, 1, dtype=float) @ parts[0]) < 1e-9


def test_coordinate_text():
    op = sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 0.5]]))
    assert to_coordinate_text(op) == "0 0 2\n0 1 -1\n1 0 -1\n1 1 0.5\n"
