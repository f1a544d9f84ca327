import json

import numpy as np
import pytest

from mapcert.linalg import orthonormalize
from mapcert.sets import (
    AffineSubspace,
    Ball,
    DescriptorError,
    EpigraphAbs,
    FullSpace,
    Halfspace,
    IceCreamCone,
    LinearSubspace,
    Ray,
    SawtoothEpigraph,
    Segment,
    SinglePoint,
    Sphere,
    Union,
    UnsupportedBoundary,
    affine_hull_of_union,
    boundary_of,
    from_dict,
    on_boundary,
)


def line(*w):
    return LinearSubspace.spanned_by([w])


def test_sphere_distance():
    assert Sphere([0, 0], 1).distance([3, 0]) == pytest.approx(2.0)


def test_union_distance_prefers_point():
    U = Union([line(1, 0), SinglePoint([0, 5])])
    assert U.distance([0, 3]) == pytest.approx(2.0)


def test_ice_cream_distance_to_apex():
    K = IceCreamCone(beta=1.0, dim=2)
    assert K.distance([1, -1]) == pytest.approx(np.sqrt(2))
    # dense boundary sampling agrees: boundary is t(±1, 1), t >= 0
    t = np.linspace(0, 3, 30001)
    pts = np.vstack([np.c_[t, t], np.c_[-t, t]])
    assert np.min(np.linalg.norm(pts - [1, -1], axis=1)) == pytest.approx(np.sqrt(2), abs=1e-9)


def test_sphere_projection():
    r = Sphere([0, 0], 1).project([3, 0])
    assert not r.multi_valued
    np.testing.assert_allclose(r.points, [[1, 0]])


def test_sphere_center_is_multi_valued():
    r = Sphere([0, 0], 1).project([0, 0])
    assert r.multi_valued and len(r) > 1
    np.testing.assert_allclose(np.linalg.norm(r.points, axis=1), 1.0)
    assert r.distance == pytest.approx(1.0)


@pytest.mark.parametrize("z, expected", [
    (0.9, [[0, 1]]),
    (1.0, [[0, 1], [2, 1]]),
    (1.1, [[2, 1]]),
])
def test_segment_union_ties(z, expected):
    m = 2.0
    U = Union([Segment([0, 1], [m, 1 + m * m]), Segment([m, 1], [m, 1 + m * m])])
    r = U.project([z, 0])
    np.testing.assert_allclose(r.points, expected, atol=1e-12)
    assert r.multi_valued == (len(expected) > 1)


def test_selection_is_lexicographic():
    U = Union([SinglePoint([1, 0]), SinglePoint([-1, 0])])
    np.testing.assert_allclose(U.project([0, 0]).selection, [-1, 0])
    P, _ = U.project_rows([[0, 0]])
    np.testing.assert_allclose(P[0], [-1, 0])


def test_convex_projection_single_valued():
    rng = np.random.default_rng(0)
    sets = [Ball([0, 0], 1), Halfspace([1, 1], 0.5), line(1, 2), IceCreamCone(1.0, 3)]
    for S in sets:
        for x in rng.normal(size=(20, S.dim)) * 3:
            r = S.project(x)
            assert len(r) == 1 and not r.multi_valued


def test_contains_examples():
    assert Ball([0, 0], 1).contains([0.5, 0], tol=0)
    assert not Sphere([0, 0], 1).contains([0.5, 0], tol=1e-9)
    # f(0.75) = 2^-1 (0.75 - 0.5) = 0.125 <= 0.25
    assert SawtoothEpigraph().contains([0.75, 0.25], tol=1e-9)


def test_contains_negative_tol():
    with pytest.raises(ValueError):
        Ball([0, 0], 1).contains([0, 0], tol=-1)


def test_sawtooth_values():
    S = SawtoothEpigraph()
    for k in (-3, -2, -1, 0):
        x = 1.5 * 2.0 ** k
        f = 2.0 ** (k) * (x - 2.0 ** k)
        assert S.contains([x, f])
        assert not S.contains([x, f - 1e-6])


def test_sawtooth_projection_brute_force():
    S = SawtoothEpigraph()
    rng = np.random.default_rng(1)
    X = rng.uniform(-0.5, 1.5, size=(300, 2))
    P, d = S.project_rows(X)
    assert np.all(S.contains_rows(P, tol=1e-9))
    # closed boundary: graph, vertical drops at 2^(k+1) and the left wall x = 0
    xs = np.linspace(0, 4, 80001)
    pieces = [np.c_[xs, S.f(xs)], np.c_[np.zeros(40001), np.linspace(0, 4, 40001)]]
    for k in range(-10, 2):
        h = np.linspace(0, 4.0 ** k, 2001)
        pieces.append(np.c_[np.full_like(h, 2.0 ** (k + 1)), h])
    bd = np.vstack(pieces)
    outside = ~S.contains_rows(X)
    ref = np.array([np.min(np.linalg.norm(bd - x, axis=1)) for x in X[outside]])
    np.testing.assert_allclose(d[outside], ref, atol=1e-4)
    assert np.all(d[~outside] <= 1e-9)


def test_boundary_examples():
    bd = boundary_of(Ball([0, 0], 1))
    assert isinstance(bd, Sphere) and bd.radius == 1
    g = boundary_of(EpigraphAbs(1.0))
    assert isinstance(g, Union) and all(isinstance(p, Ray) for p in g.parts)
    for p in ([1, 1], [-2, 2], [0, 0]):
        assert g.contains(p)
    assert not g.contains([0, 1])
    L = line(1, 1)
    assert boundary_of(L) is L
    with pytest.raises(UnsupportedBoundary):
        boundary_of(FullSpace(2))


def test_on_boundary():
    assert on_boundary(Ball([0, 0], 1), [0, 1])
    assert not on_boundary(Ball([0, 0], 1), [0, 0.5])


def test_affine_hull_examples():
    H = affine_hull_of_union(line(1, 0, 0), line(0, 1, 0))
    assert H.direction_space().rank == 2 and H.contains([3, -2, 0])
    assert isinstance(affine_hull_of_union(Ball([0, 0], 1), SinglePoint([5, 5])), FullSpace)
    H = affine_hull_of_union(Segment([0, 0, 0], [1, 0, 0]), SinglePoint([0, 1, 0]))
    assert H.direction_space().rank == 2
    assert H.contains([7, -3, 0]) and not H.contains([0, 0, 1])


def test_affine_subspace_projection():
    A = AffineSubspace([0, 1], orthonormalize([[1, 0]]))
    np.testing.assert_allclose(A.project([3, 5]).selection, [3, 1])


def test_round_trip_serialization():
    sets = [Ball([0, 0], 2), Sphere([1, 0, 0], 1), Halfspace([0, 1], 0.0), line(1, 2, 0),
            EpigraphAbs(0.5, flip=True), IceCreamCone(1.0, 3), SawtoothEpigraph(),
            Union([line(1, 0), SinglePoint([0, 5])]), Ray([0, 0], [1, 1])]
    rng = np.random.default_rng(2)
    for S in sets:
        T = from_dict(json.loads(json.dumps(S.to_dict())))
        X = rng.normal(size=(10, S.dim))
        np.testing.assert_allclose(S.distances(X), T.distances(X), atol=1e-12)


def test_from_dict_errors():
    with pytest.raises(DescriptorError, match="unknown set type"):
        from_dict({"type": "torus"})
    with pytest.raises(DescriptorError, match="missing"):
        from_dict({"type": "ball", "center": [0, 0]})
    with pytest.raises(DescriptorError, match="unknown field"):
        from_dict({"type": "ball", "center": [0, 0], "radius": 1, "colour": "red"})


def test_translate():
    S = Sphere([0, 0], 1).translate([2, 0])
    assert S.distance([2, 3]) == pytest.approx(2.0)
