"""CQ-numbers, joint and limiting CQ-numbers, exact CQ-numbers and CQ checks.

Sampled values are inner estimates: every pair ``(u, v)`` contributing to a
reported supremum is a certified pair of restricted proximal normals, so the
estimate never exceeds the true value (up to the certification tolerance).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cones import NotInSet, certified_normals, restricted_normal_samples
from .linalg import angles, as_vector
from .restrictors import RestrictorChoice
from .sampling import SamplingConfig
from .sets import AffineSubspace, SetDescriptor, Sphere

VIOLATION_THRESHOLD = 0.999


class Undefined:
    """Sentinel for a CQ-number equal to minus infinity (empty supremum)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __float__(self):
        return float("-inf")

    def to_json(self):
        return "-inf"


NEG_INF = Undefined()


def is_undefined(x) -> bool:
    return x is NEG_INF


def _as_float(x) -> float:
    return float("-inf") if x is NEG_INF else float(x)


def _max_value(values):
    best = NEG_INF
    for v in values:
        if v is NEG_INF:
            continue
        if best is NEG_INF or v > best:
            best = v
    return best


@dataclass(frozen=True, eq=False)
class CqValue:
    """A sampled CQ-number with its maximizing pair ``(a, b, u, v)``."""

    theta: float | Undefined
    witness: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray] | None = None
    pairs_checked: int = 0


def _side_key(S: SetDescriptor, R: SetDescriptor) -> tuple[int, int]:
    return (id(S), id(R))


def _best_pair(U: np.ndarray, W: np.ndarray):
    """Maximize ``-<u, w>`` over rows; exact under swapping ``U`` and ``W``.

    The inner products are accumulated coordinate by coordinate so that the
    swapped call sees the transposed matrix bit for bit.
    """
    best, arg = -np.inf, None
    for s in range(0, U.shape[0], 2048):
        Uc = U[s:s + 2048]
        M = np.zeros((Uc.shape[0], W.shape[0]))
        for k in range(U.shape[1]):
            M += np.multiply.outer(Uc[:, k], W[:, k])
        i, j = np.unravel_index(np.argmin(M), M.shape)
        if -M[i, j] > best:
            best, arg = float(-M[i, j]), (s + int(i), int(j))
    return best, arg


def _theta_from_samples(A_pairs, B_pairs, res: float) -> CqValue:
    from .cones import dedup_directions

    if len(A_pairs) == 0 or len(B_pairs) == 0:
        return CqValue(0.0, None, 0)
    ua, ba = dedup_directions(A_pairs.dirs, res, A_pairs.bases)
    wb, bb = dedup_directions(B_pairs.dirs, res, B_pairs.bases)
    best, arg = _best_pair(ua, wb)
    n = ua.shape[0] * wb.shape[0]
    if best <= 0.0:
        return CqValue(0.0, None, n)
    i, j = arg
    return CqValue(min(best, 1.0), (ba[i], bb[j], ua[i], -wb[j]), n)


def _resolve_pair(A, At: RestrictorChoice, B, Bt: RestrictorChoice):
    return At.resolve(A, B), Bt.resolve(B, A)


def cq_value(A: SetDescriptor, At: RestrictorChoice, B: SetDescriptor, Bt: RestrictorChoice,
             c, delta: float, cfg: SamplingConfig | None = None, _cache: dict | None = None) -> CqValue:
    """Sampled ``theta_delta(A, At, B, Bt)`` at ``c`` with its witness."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    cfg = cfg or SamplingConfig()
    c = as_vector(c, A.dim)
    if A.distance(c) > delta or B.distance(c) > delta:
        return CqValue(NEG_INF)
    At_set, Bt_set = _resolve_pair(A, At, B, Bt)
    cache = {} if _cache is None else _cache

    def normals(S, R):
        key = (_side_key(S, R), delta)
        if key not in cache:
            cache[key] = certified_normals(S, R, c, delta, cfg)
        return cache[key]

    # u in pn_A^{B~}(a) and w in pn_B^{A~}(b); theta = sup <u, -w>
    return _theta_from_samples(normals(A, Bt_set), normals(B, At_set), cfg.angular_dedup)


def cq_number(A, At, B, Bt, c, delta: float, cfg: SamplingConfig | None = None):
    """Sampled CQ-number ``theta_delta`` at ``c`` (``NEG_INF`` if ``c`` is delta-far)."""
    return cq_value(A, At, B, Bt, c, delta, cfg).theta


def _per_member(choices, n: int):
    if isinstance(choices, RestrictorChoice):
        return [choices] * n
    choices = list(choices)
    if len(choices) != n:
        raise ValueError("one restrictor choice per member is required")
    return choices


def joint_cq_value(As: Sequence[SetDescriptor], Ats, Bs: Sequence[SetDescriptor], Bts, c,
                   delta: float, cfg: SamplingConfig | None = None) -> CqValue:
    """Max of pairwise CQ-numbers over the two collections, with witness."""
    if not As or not Bs:
        raise ValueError("collections must be nonempty")
    Ats, Bts = _per_member(Ats, len(As)), _per_member(Bts, len(Bs))
    cache: dict = {}
    best = CqValue(NEG_INF)
    for i, A in enumerate(As):
        for j, B in enumerate(Bs):
            v = cq_value(A, Ats[i], B, Bts[j], c, delta, cfg, cache)
            if v.theta is NEG_INF:
                continue
            if best.theta is NEG_INF or v.theta > best.theta:
                best = v
    return best


def joint_cq_number(As, Ats, Bs, Bts, c, delta: float, cfg: SamplingConfig | None = None):
    """Joint CQ-number ``sup_{i,j} theta_delta(A_i, At_i, B_j, Bt_j)``."""
    return joint_cq_value(As, Ats, Bs, Bts, c, delta, cfg).theta


@dataclass(frozen=True)
class LimitingCq:
    """CQ-number at the smallest scheduled radius plus the whole curve."""

    value: float | Undefined
    monotone: bool
    curve: tuple[tuple[float, float | Undefined], ...]


def _monotone(curve, slack: float = 0.01) -> bool:
    vals = [_as_float(v) for _, v in sorted(curve)]
    return all(a <= b + slack for a, b in zip(vals, vals[1:]))


def limiting_cq_number(A, At, B, Bt, c, schedule: Sequence[float], cfg: SamplingConfig | None = None,
                       joint: bool = False) -> LimitingCq:
    """``theta`` at the smallest radius of a strictly decreasing schedule."""
    schedule = [float(s) for s in schedule]
    if not schedule or any(s <= 0 for s in schedule) or any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("schedule must be strictly decreasing and positive")
    fn = joint_cq_number if joint else cq_number
    curve = tuple((d, fn(A, At, B, Bt, c, d, cfg)) for d in schedule)
    return LimitingCq(curve[-1][1], _monotone(curve), curve)


# ---------------------------------------------------------------------------
# exact CQ-numbers at c

def _limit_pairs(S: SetDescriptor, R: SetDescriptor, c, cfg: SamplingConfig):
    from .cones import NormalPairs

    samp = restricted_normal_samples(S, R, c, cfg)
    lim = float(np.min(samp.delta_tags)) if len(samp) else 0.0
    keep = samp.delta_tags <= lim * (1 + 1e-12)
    return NormalPairs(samp.witness_bases[keep], samp.unit_directions[keep], np.zeros(int(np.sum(keep))))


def exact_cq_value(A, At, B, Bt, c, cfg: SamplingConfig | None = None) -> CqValue:
    """Sup of ``<u, v>`` over restricted normals at ``c`` itself, with witness."""
    cfg = cfg or SamplingConfig()
    c = as_vector(c, A.dim)
    tol = cfg.membership_tol * max(1.0, float(np.linalg.norm(c)))
    if A.distance(c) > tol or B.distance(c) > tol:
        return CqValue(NEG_INF)
    At_set, Bt_set = _resolve_pair(A, At, B, Bt)
    return _theta_from_samples(_limit_pairs(A, Bt_set, c, cfg), _limit_pairs(B, At_set, c, cfg), cfg.angular_dedup)


def exact_cq_number(A, At, B, Bt, c, cfg: SamplingConfig | None = None):
    """Sampled exact CQ-number ``alpha_bar`` at ``c``."""
    return exact_cq_value(A, At, B, Bt, c, cfg).theta


def joint_exact_cq_value(As, Ats, Bs, Bts, c, cfg: SamplingConfig | None = None) -> CqValue:
    Ats, Bts = _per_member(Ats, len(As)), _per_member(Bts, len(Bs))
    best = CqValue(NEG_INF)
    for i, A in enumerate(As):
        for j, B in enumerate(Bs):
            v = exact_cq_value(A, Ats[i], B, Bts[j], c, cfg)
            if v.theta is not NEG_INF and (best.theta is NEG_INF or v.theta > best.theta):
                best = v
    return best


@dataclass(frozen=True, eq=False)
class CqCondition:
    holds: bool
    max_inner: float | Undefined
    witness: tuple[np.ndarray, np.ndarray] | None


def cq_condition_holds(A, At, B, Bt, c, cfg: SamplingConfig | None = None,
                       threshold: float = VIOLATION_THRESHOLD) -> CqCondition:
    """Statistical test of ``N^{Bt}_A(c) ∩ (-N^{At}_B(c)) ⊆ {0}``.

    Fails, with the unit pair ``(u, v)`` as witness, when opposing restricted
    normals with ``<u, v> > threshold`` are found.
    """
    v = exact_cq_value(A, At, B, Bt, c, cfg)
    if v.theta is NEG_INF:
        return CqCondition(True, NEG_INF, None)
    if v.theta > threshold and v.witness is not None:
        return CqCondition(False, v.theta, (v.witness[2], v.witness[3]))
    return CqCondition(True, v.theta, None)


def joint_cq_condition_holds(As, Ats, Bs, Bts, c, cfg: SamplingConfig | None = None,
                             threshold: float = VIOLATION_THRESHOLD) -> CqCondition:
    v = joint_exact_cq_value(As, Ats, Bs, Bts, c, cfg)
    if v.theta is NEG_INF:
        return CqCondition(True, NEG_INF, None)
    if v.theta > threshold and v.witness is not None:
        return CqCondition(False, v.theta, (v.witness[2], v.witness[3]))
    return CqCondition(True, v.theta, None)


# ---------------------------------------------------------------------------
# closed forms

def exact_cq_two_lines(wa, wb) -> float:
    """``|<wa, wb>|`` for two distinct lines through the origin."""
    wa, wb = as_vector(wa), as_vector(wb, as_vector(wa).size)
    if abs(np.linalg.norm(wa) - 1) > 1e-9 or abs(np.linalg.norm(wb) - 1) > 1e-9:
        raise ValueError("line directions must be unit vectors")
    c = abs(float(wa @ wb))
    if c >= 1.0 - 1e-12:
        raise ValueError("the lines coincide")
    return c


def exact_cq_subspaces(A: AffineSubspace, B: AffineSubspace, c=None, tol: float = 1e-9) -> float:
    """Friedrichs cosine of the parallel subspaces of two intersecting flats."""
    if not isinstance(A, AffineSubspace) or not isinstance(B, AffineSubspace):
        raise TypeError("exact_cq_subspaces needs linear or affine subspaces")
    if c is None:
        if not (A.is_linear and B.is_linear):
            raise ValueError("affine inputs need a common point c")
    else:
        c = as_vector(c, A.dim)
        if A.distance(c) > tol or B.distance(c) > tol:
            raise ValueError("c must lie in both affine subspaces")
    return angles(A.basis, B.basis).friedrichs_c


def exact_cq_two_spheres(z1, rho1: float, z2, rho2: float, c, tol: float = 1e-9) -> float:
    """``|<z1 - c, z2 - c>| / (rho1 rho2)`` for ``c`` on both spheres."""
    z1, z2, c = as_vector(z1), as_vector(z2), as_vector(c)
    for z, r in ((z1, rho1), (z2, rho2)):
        if abs(np.linalg.norm(c - z) - r) > tol * max(1.0, r):
            raise ValueError("c must lie on both spheres")
    return abs(float((z1 - c) @ (z2 - c))) / (rho1 * rho2)


def delta_for_epsilon(rho1: float, rho2: float, eps: float) -> float:
    """Radius guaranteeing ``theta_delta <= alpha_bar + eps`` for two spheres."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    s = rho1 + rho2
    # rationalized form of (sqrt(s^2 + 4 r1 r2 eps) - s) / 2, stable for small eps
    return 2.0 * rho1 * rho2 * eps / (np.sqrt(s * s + 4.0 * rho1 * rho2 * eps) + s)


def exact_value_for(As, Ats, Bs, Bts, c) -> tuple[float, str] | None:
    """Closed-form CQ-number for supported scenario shapes, with provenance."""
    if len(As) == 1 and len(Bs) == 1:
        A, B = As[0], Bs[0]
        at = Ats if isinstance(Ats, RestrictorChoice) else Ats[0]
        bt = Bts if isinstance(Bts, RestrictorChoice) else Bts[0]
        if isinstance(A, Sphere) and isinstance(B, Sphere) and at.kind == bt.kind == "full_space":
            try:
                return exact_cq_two_spheres(A.center, A.radius, B.center, B.radius, c), "spheres"
            except ValueError:
                return None
    if all(isinstance(S, AffineSubspace) for S in list(As) + list(Bs)):
        Ats, Bts = _per_member(Ats, len(As)), _per_member(Bts, len(Bs))
        if all(t.kind == "self" for t in Ats + Bts):
            vals = []
            for A in As:
                for B in Bs:
                    try:
                        vals.append(exact_cq_subspaces(A, B, c))
                    except ValueError:
                        return None
            lines = all(S.basis.rank == 1 for S in list(As) + list(Bs))
            return max(vals), ("lines" if lines else "subspaces")
    return None


# ---------------------------------------------------------------------------
# report

@dataclass(frozen=True, eq=False)
class CqReport:
    """CQ-number curve, limit, exact value and witness for a scenario."""

    theta_by_delta: dict
    theta_bar: float | Undefined
    alpha_bar: float | Undefined
    witness: tuple | None
    exact_value: float | None = None
    exact_provenance: str | None = None
    monotone: bool = True
    theta_bar_convention: str = "value at the smallest scheduled delta"

    def to_dict(self) -> dict:
        def num(x):
            return x.to_json() if x is NEG_INF else float(x)

        return {
            "theta_by_delta": [[float(d), num(v)] for d, v in sorted(self.theta_by_delta.items(), reverse=True)],
            "theta_bar": num(self.theta_bar),
            "theta_bar_convention": self.theta_bar_convention,
            "alpha_bar": num(self.alpha_bar),
            "monotone_in_delta": self.monotone,
            "witness": None if self.witness is None else {
                k: np.asarray(w).tolist() for k, w in zip(("a", "b", "u", "v"), self.witness)},
            "exact_value": self.exact_value,
            "exact_provenance": self.exact_provenance,
        }


def cq_report(As, Ats, Bs, Bts, c, deltas: Sequence[float], cfg: SamplingConfig | None = None) -> CqReport:
    """Joint CQ-numbers over ``deltas``, the limiting value and ``alpha_bar``."""
    cfg = cfg or SamplingConfig()
    deltas = [float(d) for d in deltas]
    values = {d: joint_cq_value(As, Ats, Bs, Bts, c, d, cfg) for d in deltas}
    curve = {d: v.theta for d, v in values.items()}
    smallest = min(deltas)
    alpha = joint_exact_cq_value(As, Ats, Bs, Bts, c, cfg).theta
    exact = exact_value_for(As, Ats, Bs, Bts, c)
    return CqReport(
        theta_by_delta=curve,
        theta_bar=curve[smallest],
        alpha_bar=alpha,
        witness=values[max(deltas)].witness,
        exact_value=None if exact is None else exact[0],
        exact_provenance=None if exact is None else exact[1],
        monotone=_monotone(curve.items()),
    )
