import numpy as np
import pytest

from cyclewalk.core.exceptions import ResourceLimitError
from cyclewalk.core.smith import exgcd, integer_rank, smith_normal_form
from cyclewalk.core.spectral import boundary_matrix


def dense(vectors, size):
    out = np.zeros(size, dtype=object)
    for key, value in vectors.items():
        out[key] = value
    return out


def test_identity_has_unit_invariant_factors():
    result = smith_normal_form(np.eye(3, dtype=int))
    assert result.invariant_factors == [1, 1, 1]
    assert result.rank == 3
    assert result.nullity == 0


def test_divisibility_chain():
    result = smith_normal_form(np.array([[2, 0], [0, 3]]))
    assert result.invariant_factors == [1, 6]
    result = smith_normal_form(np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]))
    assert result.invariant_factors == [2, 6, 12]
    assert result.torsion == [2, 6, 12]


def test_transforms_reproduce_the_diagonal():
    matrix = np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16], [1, 1, 1]])
    result = smith_normal_form(matrix)
    u = np.array([[row.get(c, 0) for c in range(4)] for row in result.row_transform], dtype=object)
    v = np.array([[col.get(r, 0) for col in result.col_transform] for r in range(3)], dtype=object)
    product = u.dot(matrix.astype(object)).dot(v)
    expected = np.zeros((4, 3), dtype=object)
    for i, d in enumerate(result.diagonal):
        expected[i, i] = d
    assert (product == expected).all()


def test_four_gon_boundary(four_gon):
    result = smith_normal_form(boundary_matrix(four_gon, 1))
    assert result.rank == 3
    assert result.nullity == 1
    (cycle,) = result.kernel_basis()
    assert sorted(abs(v) for v in cycle.values()) == [1, 1, 1, 1]
    product = boundary_matrix(four_gon, 1).toarray().astype(object).dot(dense(cycle, 4))
    assert not any(product)


def test_torus_first_homology_rank(torus4):
    rank_1 = integer_rank(boundary_matrix(torus4, 1))
    rank_2 = integer_rank(boundary_matrix(torus4, 2))
    assert torus4.n_simplices(1) - rank_1 - rank_2 == 2


def test_image_membership(filled_triangle):
    result = smith_normal_form(boundary_matrix(filled_triangle, 2))
    d_tau = {i: int(v) for i, v in enumerate(boundary_matrix(filled_triangle, 2).toarray()[:, 0])}
    assert result.in_image(d_tau)
    assert result.preimage({k: 2 * v for k, v in d_tau.items()}) == {0: 2}
    assert not result.in_image({0: 1})


def test_non_integer_matrix_is_rejected():
    with pytest.raises(ValueError):
        smith_normal_form(np.array([[0.5, 1.0]]))


def test_operation_budget_is_enforced(torus4):
    with pytest.raises(ResourceLimitError):
        smith_normal_form(boundary_matrix(torus4, 2), budget=10)


def test_exgcd():
    g, x, y = exgcd(240, 46)
    assert g == 2
    assert 240 * x + 46 * y == 2
    g, x, y = exgcd(-4, 6)
    assert g == 2 and -4 * x + 6 * y == 2
