import json

import numpy as np
import pytest

from mapcert.cq import (
    NEG_INF,
    cq_condition_holds,
    cq_number,
    cq_report,
    cq_value,
    delta_for_epsilon,
    exact_cq_number,
    exact_cq_subspaces,
    exact_cq_two_lines,
    exact_cq_two_spheres,
    is_undefined,
    joint_cq_number,
    limiting_cq_number,
)
from mapcert.restrictors import RestrictorChoice
from mapcert.sets import Ball, EpigraphAbs, LinearSubspace, Sphere

from conftest import unit

SELF = RestrictorChoice.self_set()
FULL = RestrictorChoice.full_space()
BDRY = RestrictorChoice.boundary()
ORIGIN3 = np.zeros(3)


def line(*w):
    return LinearSubspace.spanned_by([w])


def test_two_lines_example(light_cfg):
    A, B = line(2, 0, -1), line(1, 0, 0)
    assert cq_number(A, SELF, B, SELF, ORIGIN3, 0.1, light_cfg) == pytest.approx(2 / np.sqrt(5), abs=0.02)


def test_orthogonal_lines_zero(light_cfg):
    assert cq_number(line(0, 1, 0), SELF, line(1, 0, 0), SELF, ORIGIN3, 0.1, light_cfg) == pytest.approx(0, abs=1e-9)


def test_same_set_nonnegative(light_cfg):
    A = Ball([0, 0], 1)
    assert cq_number(A, FULL, A, FULL, [1, 0], 0.1, light_cfg) >= 0


def test_symmetry_exact(light_cfg):
    A, B = line(2, 0, -1), line(1, 0, 1)
    ab = cq_number(A, SELF, B, SELF, ORIGIN3, 0.1, light_cfg)
    ba = cq_number(B, SELF, A, SELF, ORIGIN3, 0.1, light_cfg)
    assert ab == ba


def test_joint_singletons_equal_plain(light_cfg):
    A, B = line(2, 0, -1), line(1, 0, 0)
    plain = cq_number(A, SELF, B, SELF, ORIGIN3, 0.1, light_cfg)
    joint = joint_cq_number([A], [SELF], [B], [SELF], ORIGIN3, 0.1, light_cfg)
    assert plain == joint


def test_four_line_joint(light_cfg):
    As = [line(0, 1, 0), line(2, 0, -1)]
    Bs = [line(0, 1, 1), line(1, 0, 0)]
    assert joint_cq_number(As, SELF, Bs, SELF, ORIGIN3, 0.1, light_cfg) == pytest.approx(2 / np.sqrt(5), abs=0.02)


def test_not_in_both_is_undefined(light_cfg):
    th = cq_number(line(1, 0), SELF, line(0, 1), SELF, [5, 0], 0.1, light_cfg)
    assert is_undefined(th)
    assert th is NEG_INF and float(th) == float("-inf")
    v = exact_cq_number(line(1, 0), SELF, line(0, 1), SELF, [5, 0], light_cfg)
    assert v is NEG_INF


def test_delta_must_be_positive(light_cfg):
    with pytest.raises(ValueError):
        cq_value(line(1, 0), SELF, line(0, 1), SELF, [0, 0], 0.0, light_cfg)


def test_exact_two_lines_examples():
    assert exact_cq_two_lines([0, 1, 0], unit([0, 1, 1])) == pytest.approx(1 / np.sqrt(2))
    assert exact_cq_two_lines([1, 0, 0], [0, 1, 0]) == 0
    assert exact_cq_two_lines(unit([2, 0, -1]), [1, 0, 0]) == pytest.approx(2 / np.sqrt(5))
    with pytest.raises(ValueError):
        exact_cq_two_lines([2, 0, 0], [0, 1, 0])


def test_exact_subspaces():
    A, B = line(0, 1, 0), line(0, 1, 1)
    assert exact_cq_subspaces(A, B) == pytest.approx(exact_cq_two_lines([0, 1, 0], unit([0, 1, 1])))
    P = LinearSubspace.spanned_by([[1, 0, 0], [0, 1, 0]])
    assert exact_cq_subspaces(P, line(1, 1, 0)) == pytest.approx(0, abs=1e-12)


def test_exact_subspaces_r4_matches_sampler(light_cfg):
    A = LinearSubspace.spanned_by([[1, 0, 0, 0], [0, 1, 0, 0]])
    B = LinearSubspace.spanned_by([[1, 0, 0, 0], [0, 1, 1, 1]])
    exact = exact_cq_subspaces(A, B)
    assert exact > 0.1
    sampled = cq_number(A, SELF, B, SELF, np.zeros(4), 0.1, light_cfg)
    assert sampled == pytest.approx(exact, abs=0.02)


def test_exact_two_spheres_examples(light_cfg):
    r = np.sqrt(2)
    assert exact_cq_two_spheres([0, 0], r, [2, 0], r, [1, 1]) == pytest.approx(0, abs=1e-12)
    assert exact_cq_two_spheres([0, 0], 1, [2, 0], 1, [1, 0]) == pytest.approx(1)
    sampled = cq_number(Sphere([0, 0], r), FULL, Sphere([2, 0], r), FULL, [1, 1], 0.01, light_cfg)
    assert sampled <= 0.02
    with pytest.raises(ValueError):
        exact_cq_two_spheres([0, 0], 1, [2, 0], 1, [0, 0])


def test_delta_for_epsilon_examples():
    assert delta_for_epsilon(1, 1, 1) == pytest.approx(np.sqrt(2) - 1)
    assert delta_for_epsilon(1, 2, 0.5) == pytest.approx((np.sqrt(13) - 3) / 2)
    ds = [delta_for_epsilon(1, 1, e) for e in (1, 0.1, 0.01, 1e-4, 1e-8)]
    assert all(a > b > 0 for a, b in zip(ds, ds[1:]))
    with pytest.raises(ValueError):
        delta_for_epsilon(1, 1, 0)


def test_exact_epi_boundary(light_cfg):
    A, B = EpigraphAbs(0.5), EpigraphAbs(1 / 3, flip=True)
    # normal rays (±1, -2)/√5 of A against -(±1, 3)/√10 of B
    oracle = max(unit([s, -2]) @ -unit([t, 3]) for s in (1, -1) for t in (1, -1))
    assert oracle == pytest.approx(7 / np.sqrt(50))
    got = exact_cq_number(A, BDRY, B, BDRY, [0, 0], light_cfg)
    assert got == pytest.approx(7 / np.sqrt(50), abs=5e-3)
    assert exact_cq_number(A, FULL, B, FULL, [0, 0], light_cfg) == pytest.approx(1, abs=1e-3)


def test_cq_condition_examples(light_cfg):
    A, B = EpigraphAbs(), line(1, 0)
    ok = cq_condition_holds(A, SELF, B, SELF, [0, 0], light_cfg)
    assert ok.holds and ok.witness is None
    bad = cq_condition_holds(A, FULL, B, FULL, [0, 0], light_cfg)
    assert not bad.holds
    u, v = bad.witness
    np.testing.assert_allclose(u, [0, -1], atol=1e-2)
    np.testing.assert_allclose(v, [0, -1], atol=1e-2)


def test_limiting_subspaces_constant(light_cfg):
    A, B = line(0, 1, 0), line(0, 1, 1)
    lim = limiting_cq_number(A, SELF, B, SELF, ORIGIN3, [0.1, 0.01, 0.001], light_cfg)
    vals = [v for _, v in lim.curve]
    assert max(vals) - min(vals) < 0.02
    assert lim.value == pytest.approx(1 / np.sqrt(2), abs=0.02)
    assert lim.monotone


def test_restrictor_monotonicity(light_cfg):
    A, B = line(2, 0, -1), line(1, 0, 0)
    small = cq_number(A, SELF, B, SELF, ORIGIN3, 0.1, light_cfg)
    big = cq_number(A, FULL, B, FULL, ORIGIN3, 0.1, light_cfg)
    assert big >= small - 1e-12


def test_report_serializes(light_cfg):
    As, Bs = [line(2, 0, -1)], [line(1, 0, 0)]
    rep = cq_report(As, SELF, Bs, SELF, ORIGIN3, [0.1, 0.01], light_cfg)
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["exact_provenance"] == "lines"
    assert d["exact_value"] == pytest.approx(2 / np.sqrt(5))
    assert d["alpha_bar"] <= d["theta_bar"] + 0.01
    assert [x[0] for x in d["theta_by_delta"]] == [0.1, 0.01]


def test_undefined_serializes(light_cfg):
    rep = cq_report([line(1, 0)], SELF, [line(0, 1)], SELF, [5, 0], [0.1], light_cfg)
    assert rep.to_dict()["theta_bar"] == "-inf"
