"""Sampled (A, eps, delta)-regularity checks, superregularity scans and joint checks.

A failing verdict carries a re-verified witness and is a certificate; a
passing verdict only means no violation was found on the samples drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cones import NormalPairs, _lam_ladder, certified_normals, certify_direction, dedup_directions
from .linalg import as_vector
from .sampling import SamplingConfig, ball_points
from .sets import SetDescriptor

DELTA_CAP = 1e3
WITNESS_SLACK = 1e-12
SUPERREGULARITY_LADDER = tuple(2.0 ** -k for k in range(7))


@dataclass(frozen=True, eq=False)
class RegularityVerdict:
    """Outcome of a regularity check; ``delta`` may be ``inf`` for convex sets."""

    passed: bool
    epsilon: float
    delta: float
    witness: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    samples_checked: int = 0
    method: str = "sampled"

    def to_dict(self) -> dict:
        return {
            "passed": bool(self.passed),
            "epsilon": float(self.epsilon),
            "delta": "+inf" if np.isinf(self.delta) else float(self.delta),
            "witness": None if self.witness is None else {
                k: np.asarray(w).tolist() for k, w in zip(("b", "y", "u"), self.witness)},
            "samples_checked": int(self.samples_checked),
            "method": self.method,
        }


@dataclass(frozen=True, eq=False)
class RegularitySamples:
    """Certified normals ``(b, u, lam)`` and test points ``y`` for one ball."""

    center: np.ndarray
    delta: float
    pairs: NormalPairs
    Y: np.ndarray


def y_budget(dim: int) -> int:
    return 512 if dim <= 2 else 4096


def draw_samples(B: SetDescriptor, restrict: SetDescriptor, c, delta: float,
                 cfg: SamplingConfig | None = None, n_y: int | None = None) -> RegularitySamples:
    """Certified prox normals of ``B`` in ``B(c, delta)`` and points of ``B`` there."""
    cfg = cfg or SamplingConfig()
    c = as_vector(c, B.dim)
    delta = min(float(delta), DELTA_CAP)
    pairs = certified_normals(B, restrict, c, delta, cfg)
    if len(pairs):
        key = np.hstack([pairs.bases / delta, pairs.dirs])
        _, b, u, lam = dedup_directions(key, cfg.angular_dedup, pairs.bases, pairs.dirs, pairs.lams)
        pairs = NormalPairs(b, u, lam)
    n_y = y_budget(B.dim) if n_y is None else n_y
    q, _ = B.project_rows(ball_points(cfg.rng(20), n_y, c, delta))
    # test points: projected ball samples, anchors and an evenly spaced
    # subset of the normal base points
    bases = np.unique(pairs.bases, axis=0) if len(pairs) else pairs.bases
    if bases.shape[0] > n_y:
        bases = bases[np.linspace(0, bases.shape[0] - 1, n_y).astype(int)]
    Y = [q, bases]
    anchors = B.anchor_points()
    if anchors.size:
        Y.append(anchors)
    Y = np.vstack(Y)
    Y = Y[np.linalg.norm(Y - c, axis=1) <= delta * (1 + 1e-12)]
    if Y.shape[0]:
        Y = np.unique(Y, axis=0)
    return RegularitySamples(c, delta, pairs, Y)


def _violations(S: RegularitySamples, eps: float, keep: int):
    """Top ``keep`` candidates ``(i, j)`` by decreasing excess, ties by index."""
    b, u = S.pairs.bases, S.pairs.dirs
    vals, rows, cols = [], [], []
    step = max(1, 2_000_000 // max(1, S.Y.size))
    for s in range(0, b.shape[0], step):
        bs, us = b[s:s + step], u[s:s + step]
        diff = S.Y[None, :, :] - bs[:, None, :]
        dist = np.linalg.norm(diff, axis=2)
        excess = np.einsum("ijk,ik->ij", diff, us) - eps * dist
        excess[excess <= WITNESS_SLACK * (1.0 + dist)] = -np.inf
        flat = excess.ravel()
        top = np.argpartition(-flat, min(keep, flat.size - 1))[:keep] if flat.size > keep else np.arange(flat.size)
        top = top[np.isfinite(flat[top])]
        i, j = np.unravel_index(top, excess.shape)
        vals.append(flat[top])
        rows.append(s + i)
        cols.append(j)
    if not vals:
        return []
    vals, rows, cols = np.concatenate(vals), np.concatenate(rows), np.concatenate(cols)
    order = np.lexsort((cols, rows, -vals))[:keep]
    return list(zip(rows[order].tolist(), cols[order].tolist()))


def evaluate(B: SetDescriptor, restrict: SetDescriptor, S: RegularitySamples, eps: float,
             cfg: SamplingConfig | None = None, max_tries: int = 64) -> RegularityVerdict:
    """Test the regularity inequality on fixed samples, re-verifying witnesses."""
    cfg = cfg or SamplingConfig()
    n = len(S.pairs) * S.Y.shape[0]
    for i, j in _violations(S, eps, max_tries):
        b, u, y = S.pairs.bases[i], S.pairs.dirs[i], S.Y[j]
        lams = np.concatenate([[S.pairs.lams[i]], _lam_ladder(1.0, 30)])
        if B.distance(y) > cfg.membership_tol * (1 + np.linalg.norm(y)):
            continue
        if not certify_direction(B, restrict, b, u, lams, cfg.membership_tol):
            continue
        d = np.linalg.norm(y - b)
        if float(u @ (y - b)) > eps * d + WITNESS_SLACK:
            return RegularityVerdict(False, eps, S.delta, (b.copy(), y.copy(), u.copy()), n)
    return RegularityVerdict(True, eps, S.delta, None, n)


def regularity_check(B: SetDescriptor, restrict: SetDescriptor, eps: float, delta: float, c,
                     cfg: SamplingConfig | None = None) -> RegularityVerdict:
    """Check that ``B`` is ``(restrict, eps, delta)``-regular at ``c``.

    Convex sets pass by the closed form for any ``eps >= 0`` and any
    ``delta``, including ``inf``. Otherwise ``delta`` is capped at 1e3.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if not delta > 0:
        raise ValueError("delta must be positive")
    if B.is_convex:
        return RegularityVerdict(True, float(eps), float(delta), None, 0, "convex")
    S = draw_samples(B, restrict, c, delta, cfg)
    return evaluate(B, restrict, S, float(eps), cfg)


def sphere_delta(eps: float, rho: float) -> float:
    """Radius for which a sphere of radius ``rho`` is ``(eps, rho eps)``-regular."""
    if not (eps > 0 and rho > 0):
        raise ValueError("eps and rho must be positive")
    return rho * eps


def superregularity_scan(B: SetDescriptor, restrict: SetDescriptor, c, eps_grid: Sequence[float],
                         cfg: SamplingConfig | None = None,
                         ladder: Sequence[float] = SUPERREGULARITY_LADDER) -> dict:
    """Largest ladder radius passing the check for each ``eps`` (``None`` if none)."""
    eps_grid = [float(e) for e in eps_grid]
    if any(e <= 0 for e in eps_grid):
        raise ValueError("eps_grid must be positive")
    ladder = sorted((float(d) for d in ladder), reverse=True)
    if B.is_convex:
        return {e: ladder[0] for e in eps_grid}
    result = {e: None for e in eps_grid}
    for d in ladder:
        pending = [e for e in eps_grid if result[e] is None]
        if not pending:
            break
        S = draw_samples(B, restrict, c, d, cfg)
        for e in pending:
            if evaluate(B, restrict, S, e, cfg).passed:
                result[e] = d
    return result


def joint_regularity_check(Bs: Sequence[SetDescriptor], restrict, eps: float, delta: float, c,
                           cfg: SamplingConfig | None = None) -> list[RegularityVerdict]:
    """Per-member verdicts; ``restrict`` is one descriptor or one per member."""
    if not Bs:
        raise ValueError("collection must be nonempty")
    restricts = list(restrict) if isinstance(restrict, (list, tuple)) else [restrict] * len(Bs)
    if len(restricts) != len(Bs):
        raise ValueError("one restrictor per member is required")
    return [regularity_check(Bj, Rj, eps, delta, c, cfg) for Bj, Rj in zip(Bs, restricts)]


def all_passed(verdicts: Sequence[RegularityVerdict]) -> bool:
    return all(v.passed for v in verdicts)
