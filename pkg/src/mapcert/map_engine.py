"""Method of alternating projections: traces, trace analytics and certificates."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import as_vector, subspace_intersection, angles
from .restrictors import RestrictorChoice
from .sampling import ball_points
from .sets import AffineSubspace, SetDescriptor, on_boundary

GAP_TOL = 1e-12
MAX_ITER = 10000
CHECK_TOL = 1e-12


class InsufficientData(ValueError):
    """Too few positive gaps on the trace tail to fit a rate."""


class StartOutsideRadius(ValueError):
    """The trace start is not inside the certified ball."""


class PreconditionFailed(ValueError):
    """A hypothesis of a step check does not hold; ``which`` names it."""

    def __init__(self, which: str, detail: str):
        super().__init__(f"{which}: {detail}")
        self.which = which


@dataclass(frozen=True, eq=False)
class MapTrace:
    """Iterates ``a_n in P_A(b_{n-1})`` and ``b_n in P_B(a_n)`` from ``b_{-1} = start``."""

    start: np.ndarray
    a_seq: np.ndarray
    b_seq: np.ndarray
    gaps: np.ndarray
    cross_gaps: np.ndarray
    terminated_by: str

    def __len__(self):
        return self.a_seq.shape[0]

    @property
    def limit(self) -> np.ndarray:
        return self.b_seq[-1]

    def to_dict(self) -> dict:
        return {
            "iterations": len(self),
            "terminated_by": self.terminated_by,
            "final_gap": float(self.gaps[-1]),
            "limit": self.limit.tolist(),
        }


def _select(S: SetDescriptor, x: np.ndarray) -> np.ndarray:
    P, _ = S.project_rows(x[None, :])
    return P[0]


def run_map(A: SetDescriptor, B: SetDescriptor, start, max_iter: int = MAX_ITER,
            gap_tol: float = GAP_TOL) -> MapTrace:
    """Alternate projections with the lexicographically smallest selection.

    Stops on ``gap <= gap_tol``, on an exact fixed point (``a_n = b_n`` or
    both iterates repeating) or after ``max_iter`` cycles.
    """
    if A.dim != B.dim:
        raise ValueError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    y = as_vector(start, A.dim)
    a_seq, b_seq = [], []
    reason = "max_iter"
    for n in range(max_iter):
        a = _select(A, y)
        b = _select(B, a)
        a_seq.append(a)
        b_seq.append(b)
        if np.array_equal(a, b) or (n and np.array_equal(a, a_seq[-2]) and np.array_equal(b, b_seq[-2])):
            reason = "fixed_point"
            break
        if np.linalg.norm(a - b) <= gap_tol:
            reason = "gap_tol"
            break
        y = b
    a_arr, b_arr = np.array(a_seq), np.array(b_seq)
    gaps = np.linalg.norm(a_arr - b_arr, axis=1)
    cross = np.linalg.norm(a_arr[1:] - b_arr[:-1], axis=1)
    return MapTrace(as_vector(start, A.dim), a_arr, b_arr, gaps, cross, reason)


def trace_to_csv(t: MapTrace, path=None) -> str:
    """CSV with columns ``n, a_*, b_*, gap, cross_gap`` at 17 significant digits."""
    dim = t.start.size
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n"] + [f"a{k}" for k in range(dim)] + [f"b{k}" for k in range(dim)] + ["gap", "cross_gap"])
    fmt = lambda v: format(float(v), ".17g")
    for n in range(len(t)):
        cross = fmt(t.cross_gaps[n]) if n < t.cross_gaps.size else ""
        w.writerow([n] + [fmt(v) for v in t.a_seq[n]] + [fmt(v) for v in t.b_seq[n]] + [fmt(t.gaps[n]), cross])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# trace analytics

def gap_monotonicity_check(t: MapTrace, tol: float = CHECK_TOL) -> bool:
    """``||a_{n+1}-b_{n+1}|| <= ||a_{n+1}-b_n|| <= ||a_n-b_n||`` at every step."""
    if len(t) == 0:
        raise ValueError("empty trace")
    g, x = t.gaps, t.cross_gaps
    slack = tol * (1.0 + np.maximum(g[:-1], x))
    return bool(np.all(g[1:] <= x + slack) and np.all(x <= g[:-1] + slack))


def estimate_rate(t: MapTrace, tail_fraction: float = 0.5) -> float:
    """Per-cycle rate ``exp(slope)`` of a least-squares fit to the log gaps."""
    return rate_from_gaps(t.gaps, tail_fraction)


def rate_from_gaps(gaps, tail_fraction: float = 0.5) -> float:
    gaps = np.asarray(gaps, dtype=float)
    n = np.nonzero(gaps > 0)[0]
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    tail = n[int(np.floor(n.size * (1 - tail_fraction))):]
    if tail.size < 5:
        raise InsufficientData("insufficient decaying data")
    slope = np.polyfit(tail.astype(float), np.log(gaps[tail]), 1)[0]
    return float(np.exp(slope))


def is_cauchy(t: MapTrace, tol: float = 1e-10) -> bool:
    """Whether every later iterate stays within ``tol`` of the last one.

    A further cycle moves ``a`` by at most ``2 * gap`` since ``a_n`` itself
    competes in ``P_A(b_n)``; ``max_iter`` traces also need a short last step.
    """
    if 2.0 * t.gaps[-1] > tol:
        return False
    if t.terminated_by != "max_iter" or len(t) < 2:
        return True
    step = max(np.linalg.norm(t.a_seq[-1] - t.a_seq[-2]), np.linalg.norm(t.b_seq[-1] - t.b_seq[-2]))
    return bool(step <= tol)


def finite_hit_check(A: SetDescriptor, B: SetDescriptor, t: MapTrace, tol: float = 1e-9) -> bool | None:
    """If some ``a_n`` lies in ``B``, all later iterates equal it (``None`` if no hit).

    A hit means ``B.distance(a_n) == 0`` exactly; iterates that merely
    approach ``B`` are not hits.
    """
    hits = [n for n in range(len(t)) if B.distance(t.a_seq[n]) == 0.0]
    if not hits:
        return None
    n = hits[0]
    p = t.a_seq[n]
    return bool(np.all(np.linalg.norm(t.a_seq[n:] - p, axis=1) <= tol)
                and np.all(np.linalg.norm(t.b_seq[n:] - p, axis=1) <= tol))


@dataclass(frozen=True)
class GeoBoundParams:
    """Step constants with ``gamma = alpha * beta``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be nonnegative")

    @property
    def gamma(self) -> float:
        return self.alpha * self.beta

    @property
    def constant(self) -> float:
        return (1.0 + self.alpha) / (1.0 - self.gamma)


def geo_bound_verify(t: MapTrace, p: GeoBoundParams, limit=None, tol: float = 1e-9) -> bool:
    """Check the step inequalities and the geometric distance bound to ``limit``."""
    if p.gamma >= 1:
        raise ValueError("gamma must be below 1")
    c = t.limit if limit is None else as_vector(limit, t.start.size)
    g, x = t.gaps, t.cross_gaps
    scale = tol * max(1.0, float(g[0]))
    steps = np.all(x <= p.alpha * g[:-1] + scale) and np.all(g[1:] <= p.beta * x + scale)
    dist = np.maximum(np.linalg.norm(t.a_seq - c, axis=1), np.linalg.norm(t.b_seq - c, axis=1))
    bound = p.constant * g[0] * p.gamma ** np.arange(len(t))
    return bool(steps and np.all(dist <= bound + scale))


def _resolve(choice, owner, partner):
    return choice.resolve(owner, partner) if isinstance(choice, RestrictorChoice) else choice


def contraction_step_check(A: SetDescriptor, At, B: SetDescriptor, Bt, y, a, b, c,
                           theta3d: float, eps: float, delta: float | None = None,
                           tol: float = 1e-9) -> bool:
    """Check ``||a - b|| <= (theta3d + 2 eps) ||a - y||`` for one step.

    ``At`` and ``Bt`` are restrictor choices or descriptors. Hypotheses on
    the points are verified first and raise :class:`PreconditionFailed`
    naming the one that fails; the distance hypotheses are checked only
    when ``delta`` is given.
    """
    dim = A.dim
    y, a, b, c = (as_vector(v, dim) for v in (y, a, b, c))
    At_set, Bt_set = _resolve(At, A, B), _resolve(Bt, B, A)
    loose = lambda v: tol * (1.0 + np.linalg.norm(v))
    if B.distance(y) > loose(y):
        raise PreconditionFailed("y_in_B", "y is not in B")
    if Bt_set.distance(y) > loose(y):
        raise PreconditionFailed("y_in_Bt", "y is not in the restrictor of B")
    if A.distance(a) > loose(a) or np.linalg.norm(a - y) > A.distance(y) + loose(y):
        raise PreconditionFailed("a_in_PA_y", "a is not a nearest point of A to y")
    if At_set.distance(a) > loose(a):
        raise PreconditionFailed("a_in_At", "a is not in the restrictor of A")
    if B.distance(b) > loose(b) or np.linalg.norm(b - a) > B.distance(a) + loose(a):
        raise PreconditionFailed("b_in_PB_a", "b is not a nearest point of B to a")
    if delta is not None:
        if np.linalg.norm(y - c) > delta + loose(c):
            raise PreconditionFailed("y_near_c", "||y - c|| exceeds delta")
        if A.distance(y) > delta + loose(y):
            raise PreconditionFailed("y_near_A", "d_A(y) exceeds delta")
    lhs = np.linalg.norm(a - b)
    rhs = (theta3d + 2.0 * eps) * np.linalg.norm(a - y)
    return bool(lhs <= rhs + tol * max(1.0, np.linalg.norm(a - y)))


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class ConvergenceCertificate:
    """Linear rate ``theta**sigma`` for MAP started within ``radius`` of ``c``."""

    theta: float
    sigma: int
    delta: float
    epsilon: float
    radius: float
    predicted_rate: float
    bound_constant: float

    def bound(self, n):
        """Distance bound to the limit after ``n >= 1`` cycles."""
        return self.bound_constant * self.theta ** (self.sigma * (np.asarray(n) - 1.0))

    def to_dict(self) -> dict:
        return {k: (int(v) if k == "sigma" else float(v)) for k, v in self.__dict__.items()}


def issue_certificate(theta3d: float, eps: float, sigma: int, delta: float) -> ConvergenceCertificate:
    """Rate and start radius from ``theta = theta3d + 2 eps``.

    ``sigma = 2`` is only justified when both collections are jointly
    regular; ``sigma = 1`` needs only the first.
    """
    if sigma not in (1, 2):
        raise ValueError("sigma must be 1 or 2")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    th = float(theta3d) + 2.0 * float(eps)
    if th >= 1:
        raise ValueError(f"theta = {th:.6g} must be below 1")
    if th <= 0:
        raise ValueError("theta must be positive; use a positive upper bound for theta3d")
    ts = th ** sigma
    denom = 2.0 + th - ts
    return ConvergenceCertificate(
        theta=th, sigma=int(sigma), delta=float(delta), epsilon=float(eps),
        radius=(1.0 - ts) * delta / (6.0 * denom),
        predicted_rate=ts,
        bound_constant=delta * (1.0 + th) / denom,
    )


def certificate_verify(t: MapTrace, cert: ConvergenceCertificate, c, tol: float = 1e-9) -> bool:
    """Check the certificate's distance bounds and ``||limit - c|| <= delta`` on a trace."""
    c = as_vector(c, t.start.size)
    if np.linalg.norm(t.start - c) > cert.radius * (1 + 1e-12):
        raise StartOutsideRadius(f"start is {np.linalg.norm(t.start - c):.6g} from c, radius {cert.radius:.6g}")
    cbar = t.limit
    n = np.arange(1, len(t))
    dist = np.maximum(np.linalg.norm(t.a_seq[1:] - cbar, axis=1), np.linalg.norm(t.b_seq[1:] - cbar, axis=1))
    slack = tol * cert.delta
    return bool(np.all(dist <= cert.bound(n) + slack) and np.linalg.norm(cbar - c) <= cert.delta + slack)


# ---------------------------------------------------------------------------
# geometric checks along traces

def subspace_limit_check(A: AffineSubspace, B: AffineSubspace, t: MapTrace,
                         limit_tol: float = 1e-8, rate_tol: float = 1e-3) -> bool:
    """Limit ``P_{A∩B}(start)`` and rate ``c(A, B)**2`` for linear subspaces."""
    if not (isinstance(A, AffineSubspace) and isinstance(B, AffineSubspace) and A.is_linear and B.is_linear):
        raise TypeError("subspace_limit_check needs linear subspaces")
    if t.terminated_by == "max_iter":
        raise ValueError("trace did not converge")
    M = subspace_intersection(A.basis, B.basis)
    target = M.project(t.start)
    if np.linalg.norm(t.limit - target) > limit_tol:
        return False
    c = angles(A.basis, B.basis).friedrichs_c
    try:
        rate = estimate_rate(t)
    except InsufficientData:
        # immediate convergence happens exactly when the rate is zero
        return c ** 2 <= rate_tol
    return abs(rate - c ** 2) <= rate_tol


def ball_containment_check(A: SetDescriptor, B: SetDescriptor, c, rho: float, n_samples: int = 256,
                           seed: int = 0, tol: float = 1e-9) -> bool:
    """Every sampled ``x`` in ``B(c, rho)`` has ``P_A P_B P_A x`` in ``B(c, 6 rho)``."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    c = as_vector(c, A.dim)
    X = np.vstack([c, ball_points(np.random.default_rng(seed), n_samples, c, rho)])
    Y, _ = A.project_rows(X)
    Y, _ = B.project_rows(Y)
    Y, _ = A.project_rows(Y)
    return bool(np.all(np.linalg.norm(Y - c, axis=1) <= 6.0 * rho + tol))


@dataclass(frozen=True)
class StepDistanceResult:
    holds: bool
    steps_checked: int
    failures: tuple[tuple[int, str], ...]


def step_distance_check(A: SetDescriptor, t: MapTrace, c, tol: float = 1e-9) -> StepDistanceResult:
    """Distance bounds for ``y = b_{n-1}``, ``a = a_n``, ``b = b_n`` along a trace.

    With ``delta = max(d_A(y), ||y - c||)``: ``||a - c|| <= 2 delta``,
    ``||b - y|| <= 2 ||a - y||`` and ``||b - c|| <= 3 delta``.
    """
    c = as_vector(c, A.dim)
    failures = []
    for n in range(1, len(t)):
        y, a, b = t.b_seq[n - 1], t.a_seq[n], t.b_seq[n]
        delta = max(A.distance(y), float(np.linalg.norm(y - c)))
        s = tol * (1.0 + delta)
        if np.linalg.norm(a - c) > 2 * delta + s:
            failures.append((n, "a_near_c"))
        if np.linalg.norm(b - y) > 2 * np.linalg.norm(a - y) + s:
            failures.append((n, "b_near_y"))
        if np.linalg.norm(b - c) > 3 * delta + s:
            failures.append((n, "b_near_c"))
    return StepDistanceResult(not failures, max(0, len(t) - 1), tuple(failures))


def boundary_fact_check(A: SetDescriptor, B: SetDescriptor, t: MapTrace, tol: float = 1e-9) -> bool | None:
    """If ``b_n`` is not in ``A`` then ``a_{n+1}`` lies on the boundary of ``A``.

    Returns ``None`` when ``A`` has no boundary membership test or no step
    of the trace leaves ``A``.
    """
    checked = False
    for n in range(len(t) - 1):
        if A.distance(t.b_seq[n]) <= tol:
            continue
        verdict = on_boundary(A, t.a_seq[n + 1], tol)
        if verdict is None:
            return None
        checked = True
        if not verdict:
            return False
    return True if checked else None


def starts_in_ball(c, radius: float, n: int, seed: int = 0) -> np.ndarray:
    """Seeded starting points in the closed ball ``B(c, radius)``."""
    c = as_vector(c)
    return ball_points(np.random.default_rng(seed), n, c, radius)
