import numpy as np
import pytest

from mapcert.cones import certify_direction
from mapcert.regularity import (
    all_passed,
    draw_samples,
    evaluate,
    joint_regularity_check,
    regularity_check,
    sphere_delta,
    superregularity_scan,
)
from mapcert.sets import Ball, FullSpace, Halfspace, LinearSubspace, Sphere, Union

FULL2 = FullSpace(2)


def check_witness(B, R, v, eps):
    b, y, u = v.witness
    assert B.contains(y)
    assert certify_direction(B, R, b, u)
    assert u @ (y - b) > eps * np.linalg.norm(y - b)


def test_sphere_passes(light_cfg):
    v = regularity_check(Sphere([0, 0], 1), FULL2, 0.1, 0.1, [1, 0], light_cfg)
    assert v.passed and v.method == "sampled" and v.samples_checked > 0


def test_sphere_fails_at_zero(light_cfg):
    S = Sphere([0, 0], 1)
    v = regularity_check(S, FULL2, 0.0, 0.1, [1, 0], light_cfg)
    assert not v.passed
    check_witness(S, FULL2, v, 0.0)


def test_convex_shortcut():
    v = regularity_check(Ball([0, 0], 1), FULL2, 0.0, np.inf, [1, 0])
    assert v.passed and v.method == "convex" and v.to_dict()["delta"] == "+inf"


def test_bad_arguments():
    with pytest.raises(ValueError):
        regularity_check(Ball([0, 0], 1), FULL2, -0.1, 1.0, [1, 0])
    with pytest.raises(ValueError):
        regularity_check(Ball([0, 0], 1), FULL2, 0.1, 0.0, [1, 0])
    with pytest.raises(ValueError):
        sphere_delta(0, 1)


def test_sphere_delta():
    assert sphere_delta(0.5, 2) == 1
    assert sphere_delta(0.01, 1) == 0.01


def test_sphere_delta_verified_at_random_points(light_cfg):
    S = Sphere([0, 0], 1)
    t = np.random.default_rng(4).uniform(0, 2 * np.pi, 10)
    for c in np.c_[np.cos(t), np.sin(t)]:
        assert regularity_check(S, FULL2, 0.1, sphere_delta(0.1, 1), c, light_cfg).passed


def test_scan_convex_gives_ladder_max():
    assert superregularity_scan(Halfspace([0, 1], 0), FULL2, [0, 0], [0.5, 0.1]) == {0.5: 1.0, 0.1: 1.0}


def test_scan_sphere(light_cfg):
    out = superregularity_scan(Sphere([0, 0], 1), FULL2, [1, 0], [0.5, 0.1], light_cfg)
    for e in (0.5, 0.1):
        assert out[e] is not None and out[e] >= e / 2


def test_joint_lines_pass(light_cfg):
    lines = [LinearSubspace.spanned_by([[1, 0]]), LinearSubspace.spanned_by([[1, 1]])]
    vs = joint_regularity_check(lines, FULL2, 0.0, np.inf, [0, 0], light_cfg)
    assert all_passed(vs) and all(v.method == "convex" for v in vs)


def test_union_of_lines_fails(light_cfg):
    U = Union([LinearSubspace.spanned_by([[1, 0]]), LinearSubspace.spanned_by([[1, 1]])])
    v = regularity_check(U, FULL2, 0.1, 0.1, [0, 0], light_cfg)
    assert not v.passed
    check_witness(U, FULL2, v, 0.1)


def test_joint_needs_matching_restrictors():
    with pytest.raises(ValueError):
        joint_regularity_check([Ball([0, 0], 1)] * 2, [FULL2], 0.1, 1.0, [1, 0])
    with pytest.raises(ValueError):
        joint_regularity_check([], FULL2, 0.1, 1.0, [1, 0])


def test_monotone_in_eps_on_same_samples(light_cfg):
    S = Sphere([0, 0], 1)
    samples = draw_samples(S, FULL2, [1, 0], 0.2, light_cfg)
    verdicts = [evaluate(S, FULL2, samples, e, light_cfg).passed for e in (0.0, 0.05, 0.1, 0.2, 0.5)]
    # once passing, larger eps keeps passing
    assert verdicts == sorted(verdicts)
    assert verdicts[-1] and not verdicts[0]


def test_witness_persists_for_larger_delta(light_cfg):
    S = Sphere([0, 0], 1)
    v = regularity_check(S, FULL2, 0.0, 0.05, [1, 0], light_cfg)
    b, y, u = v.witness
    assert np.linalg.norm(b - [1, 0]) <= 0.05 and np.linalg.norm(y - [1, 0]) <= 0.05
    # the same triple lies in every larger ball and still violates
    assert not regularity_check(S, FULL2, 0.0, 0.2, [1, 0], light_cfg).passed


def test_union_restrictor_split(light_cfg):
    S = Sphere([0, 0], 1)
    R1, R2 = Halfspace([1, 0], 1.0), Halfspace([-1, 0], -1.0)
    for eps in (0.0, 0.1):
        both = regularity_check(S, Union([R1, R2]), eps, 0.1, [1, 0], light_cfg).passed
        each = (regularity_check(S, R1, eps, 0.1, [1, 0], light_cfg).passed
                and regularity_check(S, R2, eps, 0.1, [1, 0], light_cfg).passed)
        assert both == each
