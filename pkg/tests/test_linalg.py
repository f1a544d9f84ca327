import numpy as np
import pytest
from scipy.linalg import null_space, orth

from mapcert.linalg import (
    DimensionMismatch,
    OrthonormalBasis,
    angles,
    orthogonal_complement,
    orthonormalize,
    random_subspace,
    span_of,
    subspace_intersection,
    subspace_sum,
    unit,
)
from oracles import friedrichs_grid


def basis(*vectors):
    return orthonormalize([np.asarray(v, float) for v in vectors])


def test_orthonormalize_collinear():
    B = orthonormalize([[1, 0], [2, 0]])
    assert B.rank == 1
    np.testing.assert_allclose(np.abs(B.vectors[0]), [1, 0])


def test_orthonormalize_orthogonal_pair():
    B = orthonormalize([[1, 1], [1, -1]])
    assert B.rank == 2
    np.testing.assert_allclose(B.vectors @ B.vectors.T, np.eye(2), atol=1e-14)


def test_orthonormalize_drops_tiny_residual():
    # Gram-Schmidt residual of the second vector is 1e-13, below tol
    B = orthonormalize([[1, 0, 0], [1, 1e-13, 0]], tol=1e-9)
    assert B.rank == 1


def test_orthonormalize_empty_needs_dim():
    B = orthonormalize([], dim=3)
    assert B.rank == 0 and B.dim == 3


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        angles(basis([1, 0]), basis([1, 0, 0]))


def test_intersection_of_coordinate_planes():
    M = subspace_intersection(basis([1, 0, 0], [0, 1, 0]), basis([0, 1, 0], [0, 0, 1]))
    assert M.rank == 1
    np.testing.assert_allclose(np.abs(M.vectors[0]), [0, 1, 0], atol=1e-12)


def test_intersection_identical():
    U = basis([1, 2, 0], [0, 1, 1])
    M = subspace_intersection(U, U)
    assert M.rank == 2
    np.testing.assert_allclose(M.projector(), U.projector(), atol=1e-12)


def test_intersection_generic_lines_is_trivial():
    rng = np.random.default_rng(3)
    U, V = basis(rng.normal(size=3)), basis(rng.normal(size=3))
    # two generic lines: the stacked bases have full rank 2
    assert np.linalg.matrix_rank(np.vstack([U.vectors, V.vectors])) == 2
    assert subspace_intersection(U, V).rank == 0


def test_angles_example_lines():
    r = angles(basis([0, 1, 0]), basis(np.array([0, 1, 1]) / np.sqrt(2)))
    assert r.friedrichs_c == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert r.dixmier_c0 == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert r.intersection_dim == 0


def test_angles_identical():
    U = basis([1, 0, 0], [0, 1, 1])
    r = angles(U, U)
    assert r.dixmier_c0 == pytest.approx(1.0)
    assert r.friedrichs_c == 0.0
    assert r.intersection_dim == 2


def test_angles_planes_sharing_line():
    # planes x3 = 0 and x2 = x3 meet in the x1-axis at angle pi/4
    r = angles(basis([1, 0, 0], [0, 1, 0]), basis([1, 0, 0], [0, 1, 1]))
    assert r.intersection_dim == 1
    assert r.dixmier_c0 == pytest.approx(1.0)
    assert r.friedrichs_c == pytest.approx(np.cos(np.pi / 4), abs=1e-12)


def test_random_planes_r4_match_grid():
    rng = np.random.default_rng(7)
    for _ in range(5):
        U, V = orth(rng.normal(size=(4, 2))), orth(rng.normal(size=(4, 2)))
        got = angles(OrthonormalBasis(4, U.T), OrthonormalBasis(4, V.T)).friedrichs_c
        assert got == pytest.approx(friedrichs_grid(U, V, n=1500), abs=1e-3)


def test_complement_and_sum():
    U = basis([1, 1, 0])
    C = orthogonal_complement(U)
    assert C.rank == 2
    np.testing.assert_allclose(C.vectors @ U.vectors.T, 0, atol=1e-14)
    assert subspace_sum(U, C).rank == 3


def test_span_of_zero_vectors():
    assert span_of([[0, 0, 0]], 3).rank == 0


def test_random_subspace_rank():
    B = random_subspace(np.random.default_rng(0), 5, 3)
    assert B.rank == 3
    np.testing.assert_allclose(B.vectors @ B.vectors.T, np.eye(3), atol=1e-12)


def test_solmon_against_scipy_complements():
    rng = np.random.default_rng(11)
    U, V = orth(rng.normal(size=(5, 2))), orth(rng.normal(size=(5, 3)))
    c = angles(OrthonormalBasis(5, U.T), OrthonormalBasis(5, V.T)).friedrichs_c
    Uc, Vc = null_space(U.T), null_space(V.T)
    cp = angles(OrthonormalBasis(5, Uc.T), OrthonormalBasis(5, Vc.T)).friedrichs_c
    assert c == pytest.approx(cp, abs=1e-10)


def test_unit_rejects_zero():
    with pytest.raises(ValueError):
        unit([0, 0])
