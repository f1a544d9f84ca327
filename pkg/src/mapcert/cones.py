"""Restricted proximal and restricted normal cones.

Samplers return *certified* directions: each unit vector ``u`` at a base
point ``a`` comes with a witness ``b = a + lam * u`` in the restricting set
for which ``a`` was re-verified to be a nearest point of ``A`` to ``b``.
Completeness is statistical; membership is not.

Two generators feed the samplers:

* harvesting: points ``r`` of the restricting set near the query are
  projected onto ``A``; ``(r - P_A r)`` is then a normal at ``P_A r`` by
  construction;
* ray casting: from a base point ``a`` candidate directions (a grid plus
  normals refined by re-projection) are cast onto the restricting set, and
  every hit ``b`` is kept only if ``a`` is re-verified as a projection
  of ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .linalg import OrthonormalBasis, as_vector, orthogonal_complement, span_of, subspace_sum
from .restrictors import RestrictorChoice
from .sampling import SamplingConfig, ball_points, direction_grid
from .sets import (
    AffineSubspace,
    Ball,
    EpigraphAbs,
    FullSpace,
    Halfspace,
    IceCreamCone,
    Ray,
    Segment,
    SetDescriptor,
    SinglePoint,
    Sphere,
)

_ROUND = 64 * np.finfo(float).eps
# witnesses closer than this (relative to their coordinates) give directions
# dominated by rounding, so they are discarded
LAM_FLOOR = 1e-6


class NotInSet(ValueError):
    """The base point does not belong to the set."""


class UnsupportedCone(ValueError):
    """No closed form is known for this (set, restrictor, point) combination."""


class NotContained(ValueError):
    """The affine subspace does not contain the set."""


# ---------------------------------------------------------------------------
# cone descriptors

class ConeDescriptor:
    """A closed cone with a deterministic membership test."""

    kind = ""

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        n = np.linalg.norm(u)
        if n <= tol:
            return True
        return self._unit_residual(u / n) <= tol

    def _unit_residual(self, u: np.ndarray) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"type": self.kind}


class Trivial(ConeDescriptor):
    kind = "trivial"

    def _unit_residual(self, u):
        return 1.0


class FullSpaceCone(ConeDescriptor):
    kind = "full_space"

    def _unit_residual(self, u):
        return 0.0


@dataclass(eq=False)
class RaySet(ConeDescriptor):
    """Finite union of rays ``R_+ d``."""

    directions: np.ndarray
    kind = "rays"

    def __post_init__(self):
        D = np.atleast_2d(np.asarray(self.directions, dtype=float))
        self.directions = D / np.linalg.norm(D, axis=1, keepdims=True)

    def _unit_residual(self, u):
        return float(np.min(np.linalg.norm(self.directions - u, axis=1)))

    def to_dict(self):
        return {"type": self.kind, "directions": self.directions.tolist()}


class HalfspaceNormalCone(RaySet):
    """The single ray ``R_+ direction``."""

    kind = "halfspace_normal"

    def __init__(self, direction):
        super().__init__(np.atleast_2d(direction))

    @property
    def direction(self) -> np.ndarray:
        return self.directions[0]

    def to_dict(self):
        return {"type": self.kind, "direction": self.direction.tolist()}


@dataclass(eq=False)
class PolyhedralCone(ConeDescriptor):
    """Convex cone generated by finitely many vectors (tested with NNLS)."""

    generators: np.ndarray
    kind = "polyhedral"

    def __post_init__(self):
        self.generators = np.atleast_2d(np.asarray(self.generators, dtype=float))

    def _unit_residual(self, u):
        _, res = nnls(self.generators.T, u)
        return float(res)

    def to_dict(self):
        return {"type": self.kind, "generators": self.generators.tolist()}


@dataclass(eq=False)
class SubspaceCone(ConeDescriptor):
    basis: OrthonormalBasis
    kind = "subspace"

    def _unit_residual(self, u):
        return float(np.linalg.norm(u - self.basis.project(u)))

    def to_dict(self):
        return {"type": self.kind, "basis": self.basis.to_list()}


@dataclass(eq=False)
class RevolutionBoundary(ConeDescriptor):
    """The nonconvex family ``U_{||z||=1} R_+ (beta z, -1)`` in R^dim."""

    beta: float
    dim: int
    kind = "revolution_boundary"

    def _unit_residual(self, u):
        w, t = u[:-1], u[-1]
        r = np.linalg.norm(w)
        # distance from u to the unit generator in its own half-plane
        zhat = w / r if r > 0 else np.eye(self.dim - 1)[0]
        g = np.append(self.beta * zhat, -1.0) / np.hypot(self.beta, 1.0)
        return float(np.linalg.norm(u - g))

    def to_dict(self):
        return {"type": self.kind, "beta": self.beta, "dim": self.dim}


def cone_membership(C: ConeDescriptor, u, tol: float = 1e-9) -> bool:
    """Whether ``u / ||u||`` lies within ``tol`` of ``C`` (0 always belongs)."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return C.contains(u, tol)


# ---------------------------------------------------------------------------
# certified samples

@dataclass(frozen=True, eq=False)
class NormalPairs:
    """Raw certified pairs: base points, unit directions and witness scales."""

    bases: np.ndarray
    dirs: np.ndarray
    lams: np.ndarray

    @classmethod
    def empty(cls, dim: int) -> "NormalPairs":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)), np.zeros(0))

    @classmethod
    def concat(cls, items, dim: int) -> "NormalPairs":
        items = [i for i in items if i.bases.shape[0]]
        if not items:
            return cls.empty(dim)
        return cls(np.vstack([i.bases for i in items]), np.vstack([i.dirs for i in items]),
                   np.concatenate([i.lams for i in items]))

    def __len__(self):
        return self.bases.shape[0]

    def select(self, mask) -> "NormalPairs":
        return NormalPairs(self.bases[mask], self.dirs[mask], self.lams[mask])


@dataclass(frozen=True, eq=False)
class ConeSampleSet:
    """Certified unit directions of a (restricted) normal cone at a point.

    ``delta_tags[i]`` is the smallest schedule radius whose ball around
    ``base_point`` contains the base point at which ``unit_directions[i]``
    was found (zero for proximal samples taken at ``base_point`` itself).
    """

    base_point: np.ndarray
    unit_directions: np.ndarray
    delta_used: float
    lambda_range: tuple[float, float]
    delta_tags: np.ndarray
    witness_bases: np.ndarray

    @property
    def is_trivial(self) -> bool:
        return self.unit_directions.shape[0] == 0

    def __len__(self):
        return self.unit_directions.shape[0]

    def at_delta(self, delta: float) -> np.ndarray:
        """Directions whose base point lies within ``delta`` of the base point."""
        return self.unit_directions[self.delta_tags <= delta * (1 + 1e-12)]

    def limit_directions(self) -> np.ndarray:
        """Directions seen at the smallest scheduled radius."""
        if self.is_trivial:
            return self.unit_directions
        return self.at_delta(float(np.min(self.delta_tags)))


def dedup_directions(dirs: np.ndarray, res: float, *extra: np.ndarray, tags=None):
    """Keep one direction per cell of a grid with spacing ``res``.

    Within a cell the direction with the smallest tag (then the
    lexicographically smallest) is kept; output is sorted lexicographically.
    """
    if dirs.shape[0] == 0:
        return (dirs, tags, *extra) if tags is not None else (dirs, *extra)
    tags_arr = np.zeros(dirs.shape[0]) if tags is None else np.asarray(tags, dtype=float)
    keys = np.round(dirs / res).astype(np.int64)
    order = np.lexsort(tuple(dirs.T[::-1]) + (tags_arr,) + tuple(keys.T[::-1]))
    ks = keys[order]
    first = np.ones(len(order), dtype=bool)
    first[1:] = np.any(ks[1:] != ks[:-1], axis=1)
    pick = order[first]
    pick = pick[np.lexsort(dirs[pick].T[::-1])]
    out = [dirs[pick]]
    if tags is not None:
        out.append(tags_arr[pick])
    out.extend(e[pick] for e in extra)
    return tuple(out)


def _unit_rows(V):
    n = np.linalg.norm(V, axis=1)
    good = n > 0
    out = np.zeros_like(V)
    out[good] = V[good] / n[good, None]
    return out, n, good


def _chunks(n: int, size: int = 65536):
    for s in range(0, n, size):
        yield slice(s, min(n, s + size))


def harvest(A: SetDescriptor, R: SetDescriptor, center: np.ndarray, radii, cfg: SamplingConfig,
            salt: int = 1) -> NormalPairs:
    """Project restrictor points near ``center`` onto ``A``.

    Every emitted pair ``(p, u)`` satisfies ``p in P_A(r)`` for the restrictor
    point ``r = p + lam u`` by construction.
    """
    rng = cfg.rng(salt)
    D = direction_grid(A.dim, cfg.n_directions(A.dim), rng)
    radii = np.unique(np.asarray(radii, dtype=float))
    X = (center[None, None, :] + radii[:, None, None] * D[None, :, :]).reshape(-1, A.dim)
    extra = [center[None, :]]
    if R.anchor_points().size:
        extra.append(R.anchor_points())
    X = np.vstack([X] + extra)
    out = []
    for sl in _chunks(X.shape[0]):
        r, _ = R.project_rows(X[sl])
        p, d = A.project_rows(r)
        scale = 1.0 + np.linalg.norm(r, axis=1)
        keep = d > LAM_FLOOR * scale
        if np.any(keep):
            u = (r[keep] - p[keep]) / d[keep, None]
            out.append(NormalPairs(p[keep], u, d[keep]))
    return NormalPairs.concat(out, A.dim)


def _refined(A: SetDescriptor, p: np.ndarray, D: np.ndarray, t: float, steps: int = 3) -> np.ndarray:
    """Normals obtained by re-projecting ``p + t n`` a few times."""
    n = D.copy()
    for _ in range(steps):
        x = p + t * n
        q, _ = A.project_rows(x)
        n, _, good = _unit_rows(x - q)
        n = n[good]
        if n.shape[0] == 0:
            break
    return n


def _verify(A: SetDescriptor, base: np.ndarray, B: np.ndarray, lam: np.ndarray, tol: float) -> np.ndarray:
    """Mask of witnesses ``b`` for which ``base`` is a nearest point of ``A``."""
    q, d = A.project_rows(B)
    slack = tol * lam + _ROUND * (1.0 + np.linalg.norm(base) + np.linalg.norm(B, axis=1))
    ok = np.linalg.norm(q - base, axis=1) <= slack
    # the batch selection may report a different minimizer on ties; genuine
    # ties have well separated minimizers, near-normal misses do not
    sep = np.linalg.norm(q - base, axis=1)
    maybe = (~ok) & (lam <= d + slack) & (sep > np.sqrt(max(tol, _ROUND)) * lam)
    for i in np.nonzero(maybe)[0]:
        pts = A.project(B[i]).points
        ok[i] = bool(np.min(np.linalg.norm(pts - base, axis=1)) <= slack[i])
    return ok


def shoot(A: SetDescriptor, R: SetDescriptor, bases: np.ndarray, cfg: SamplingConfig,
          lams: np.ndarray, n_dirs: int, refine_t: float, salt: int = 2) -> NormalPairs:
    """Cast candidate directions from each base point onto the restrictor."""
    rng = cfg.rng(salt)
    grid = direction_grid(A.dim, n_dirs, rng)
    out = []
    for p in np.atleast_2d(bases):
        cand = np.vstack([grid, _refined(A, p, grid, refine_t), _refined(A, p, grid, refine_t * 1e-3)])
        idx, lam = R.ray_hits(p, cand, lams, tol=cfg.membership_tol)
        if idx.size == 0:
            continue
        keep = lam > LAM_FLOOR * (1.0 + np.linalg.norm(p + lam[:, None] * cand[idx], axis=1))
        idx, lam = idx[keep], lam[keep]
        # prox normality is inherited by smaller scales: screen each
        # direction at its smallest hit, then verify the survivors' hits
        order = np.lexsort((lam, idx))
        idx, lam = idx[order], lam[order]
        first = np.ones(idx.size, dtype=bool)
        first[1:] = idx[1:] != idx[:-1]
        B0 = p + lam[first, None] * cand[idx[first]]
        alive = idx[first][_verify(A, p, B0, lam[first], cfg.membership_tol)]
        sel = np.isin(idx, alive)
        idx, lam = idx[sel], lam[sel]
        B = p + lam[:, None] * cand[idx]
        ok = _verify(A, p, B, lam, cfg.membership_tol)
        if np.any(ok):
            u = cand[idx[ok]]
            out.append(NormalPairs(np.broadcast_to(p, u.shape).copy(), u, lam[ok]))
    return NormalPairs.concat(out, A.dim)


def _lam_ladder(top: float, depth: int = 16) -> np.ndarray:
    return top * 4.0 ** -np.arange(depth)


def _shells(ladder, depth: int) -> np.ndarray:
    top = max(ladder)
    radii = [r * 2.0 ** -j for r in ladder for j in range(depth)]
    return np.array(sorted(set(radii + [2 * top, 4 * top, 8 * top])))


def _check_member(A: SetDescriptor, a: np.ndarray, cfg: SamplingConfig) -> None:
    d = A.distance(a)
    if d > cfg.membership_tol * max(1.0, float(np.linalg.norm(a))):
        raise NotInSet(f"base point is at distance {d:.3g} from the set")


def _base_points(A: SetDescriptor, a: np.ndarray, radius: float, cfg: SamplingConfig, salt: int) -> np.ndarray:
    """The point itself, nearby anchors and projections of seeded ball points."""
    rng = cfg.rng(salt)
    pts = [a[None, :]]
    anchors = A.anchor_points()
    if anchors.size:
        near = np.linalg.norm(anchors - a, axis=1) <= radius
        pts.append(anchors[near])
    if cfg.base_points:
        q, _ = A.project_rows(ball_points(rng, cfg.base_points, a, radius))
        pts.append(q[np.linalg.norm(q - a, axis=1) <= radius])
    return np.vstack(pts)


def certified_normals(A: SetDescriptor, R: SetDescriptor, center, radius: float,
                      cfg: SamplingConfig) -> NormalPairs:
    """Certified ``(b, u)`` with ``u`` in ``pn^R_A(b)`` and ``||b - center|| <= radius``."""
    center = as_vector(center, A.dim)
    ladder = [radius * 10.0 ** -k for k in range(3)]
    H = harvest(A, R, center, _shells(ladder, cfg.shell_depth), cfg)
    bases = _base_points(A, center, radius, cfg, salt=3)
    q, _ = A.project_rows(center[None, :])
    if np.linalg.norm(q[0] - center) <= radius:
        bases = np.vstack([bases, q])
    S = shoot(A, R, bases, cfg, _lam_ladder(2 * radius), cfg.shoot_directions, radius * 1e-2)
    P = NormalPairs.concat([H, S], A.dim)
    return P.select(np.linalg.norm(P.bases - center, axis=1) <= radius * (1 + 1e-12))


def _sample_set(a, pairs: NormalPairs, tags: np.ndarray, delta_used: float, cfg: SamplingConfig) -> ConeSampleSet:
    if len(pairs) == 0:
        z = np.zeros((0, a.size))
        return ConeSampleSet(a, z, delta_used, (0.0, 0.0), np.zeros(0), z)
    dirs, tags, bases = dedup_directions(pairs.dirs, cfg.angular_dedup, pairs.bases, tags=tags)
    lam_rng = (float(np.min(pairs.lams)), float(np.max(pairs.lams)))
    return ConeSampleSet(a, dirs, delta_used, lam_rng, tags, bases)


def prox_normal_samples(A: SetDescriptor, restrict: SetDescriptor, a, cfg: SamplingConfig | None = None) -> ConeSampleSet:
    """Certified directions of ``pn^restrict_A(a) = cone((restrict ∩ P_A^{-1} a) - a)``.

    An empty direction list means the cone is ``{0}`` on the samples drawn.
    """
    cfg = cfg or SamplingConfig()
    a = as_vector(a, A.dim)
    _check_member(A, a, cfg)
    top = cfg.radius_ladder[0]
    S = shoot(A, restrict, a[None, :], cfg, _lam_ladder(4 * top, 24), cfg.n_directions(A.dim), top * 1e-2)
    H = harvest(A, restrict, a, _shells(cfg.radius_ladder, cfg.shell_depth), cfg)
    at_a = np.linalg.norm(H.bases - a, axis=1) <= _ROUND * (1.0 + np.linalg.norm(a))
    H = H.select(at_a)
    H = NormalPairs(np.broadcast_to(a, H.dirs.shape).copy(), H.dirs, H.lams)
    P = NormalPairs.concat([S, H], A.dim)
    return _sample_set(a, P, np.zeros(len(P)), top, cfg)


def restricted_normal_samples(A: SetDescriptor, restrict: SetDescriptor, a,
                              cfg: SamplingConfig | None = None) -> ConeSampleSet:
    """Inner approximation of the restricted normal cone ``N^restrict_A(a)``.

    Union of proximal samples at base points ``a'`` in ``A ∩ B(a, delta_k)``
    over the decreasing schedule; each direction carries the smallest
    ``delta_k`` at which it was seen.
    """
    cfg = cfg or SamplingConfig()
    a = as_vector(a, A.dim)
    _check_member(A, a, cfg)
    ladder = np.array(cfg.radius_ladder)
    H = harvest(A, restrict, a, _shells(ladder, cfg.shell_depth), cfg)
    bases = [a[None, :]]
    for k, delta in enumerate(ladder):
        bases.append(_base_points(A, a, delta, cfg, salt=10 + k)[1:])
    S = shoot(A, restrict, np.vstack(bases), cfg, _lam_ladder(4 * ladder[0], 20),
              cfg.shoot_directions, ladder[-1] * 1e-2)
    P = NormalPairs.concat([H, S], A.dim)
    dist = np.linalg.norm(P.bases - a, axis=1)
    inside = dist <= ladder[0] * (1 + 1e-12)
    P, dist = P.select(inside), dist[inside]
    # smallest schedule radius containing the base point
    within = dist[:, None] <= ladder[None, :] * (1 + 1e-12)
    last = within.shape[1] - 1 - np.argmax(within[:, ::-1], axis=1)
    tags = ladder[last]
    return _sample_set(a, P, tags, float(ladder[-1]), cfg)


def superset_samples(A: SetDescriptor, restrict: SetDescriptor, a, cfg: SamplingConfig | None = None) -> ConeSampleSet:
    """Certified directions of ``cone(restrict - a) ∩ pn^X_A(a)``.

    Proximal normals for the full space are found first; a direction is
    kept when the ray from ``a`` along it meets ``restrict``.
    """
    cfg = cfg or SamplingConfig()
    a = as_vector(a, A.dim)
    full = prox_normal_samples(A, FullSpace(A.dim), a, cfg)
    if full.is_trivial:
        return full
    top = cfg.radius_ladder[0]
    idx, lam = restrict.ray_hits(a, full.unit_directions, _lam_ladder(1e3 * top, 30), tol=cfg.membership_tol)
    keep = np.unique(idx)
    P = NormalPairs(np.broadcast_to(a, (keep.size, a.size)).copy(), full.unit_directions[keep],
                    np.array([lam[idx == k].min() for k in keep]))
    return _sample_set(a, P, np.zeros(len(P)), top, cfg)


def certify_direction(A: SetDescriptor, R: SetDescriptor, a, u, lams=None, tol: float = 1e-9) -> bool:
    """Whether some ``b = a + lam u`` in ``R`` has ``a`` as a nearest point of ``A``."""
    a = as_vector(a, A.dim)
    u = as_vector(u, A.dim)
    lams = _lam_ladder(1.0, 30) if lams is None else np.asarray(lams, dtype=float)
    idx, lam = R.ray_hits(a, u[None, :], lams, tol=tol)
    if idx.size == 0:
        return False
    B = a + lam[:, None] * u
    return bool(np.any(_verify(A, a, B, lam, tol)))


def in_restrictor_cone(R: SetDescriptor, a, u, tol: float = 1e-9) -> bool:
    """Whether ``u`` lies in ``cone(R - a)``: the ray from ``a`` meets ``R``."""
    a = as_vector(a, R.dim)
    idx, _ = R.ray_hits(a, as_vector(u, R.dim)[None, :], _lam_ladder(1e3, 40), tol=tol)
    return idx.size > 0


# ---------------------------------------------------------------------------
# closed forms

def _as_affine(S: SetDescriptor) -> AffineSubspace | None:
    return S if isinstance(S, AffineSubspace) else None


def closed_form_cone(A: SetDescriptor, restrict, a, tol: float = 1e-9) -> ConeDescriptor:
    """Exact restricted normal cone ``N^restrict_A(a)`` for the supported cases.

    ``restrict`` is a :class:`RestrictorChoice` or an explicit descriptor.
    Supported: any set restricted to itself; spheres and convex primitives
    with the full space; subspaces restricted to subspaces through ``a``;
    the ice cream cone apex restricted to the horizontal hyperplane; the
    apex of ``epi(s|.|)`` restricted to the horizontal axis.
    """
    a = as_vector(a, A.dim)
    if isinstance(restrict, RestrictorChoice):
        if restrict.kind == "self":
            return Trivial()
        if restrict.kind == "custom":
            R = restrict.descriptor
        elif restrict.kind == "full_space":
            R = FullSpace(A.dim)
        else:
            raise UnsupportedCone(f"restrictor {restrict.kind!r} needs a concrete descriptor")
    else:
        R = restrict
    if A.distance(a) > tol * max(1.0, float(np.linalg.norm(a))):
        raise NotInSet("base point is not in the set")
    if R is A:
        return Trivial()
    if isinstance(R, FullSpace):
        return _classical_cone(A, a, tol)
    Ra = _as_affine(R)
    if isinstance(A, AffineSubspace) and Ra is not None:
        if R.distance(a) > tol * max(1.0, float(np.linalg.norm(a))):
            raise UnsupportedCone("subspace closed form needs the base point in the restrictor")
        perp = orthogonal_complement(A.basis)
        total = subspace_sum(A.basis, Ra.basis)
        inter = _intersect(perp, total)
        return Trivial() if inter.rank == 0 else SubspaceCone(inter)
    if isinstance(A, IceCreamCone) and Ra is not None and np.linalg.norm(a) <= tol:
        if _is_horizontal_hyperplane(Ra):
            return RevolutionBoundary(A.beta, A.dim)
    if isinstance(A, EpigraphAbs) and Ra is not None and np.linalg.norm(a) <= tol:
        if _is_horizontal_hyperplane(Ra):
            s = -1.0 if A.flip else 1.0
            return RaySet(np.array([[A.slope, -s], [-A.slope, -s]]))
    raise UnsupportedCone(f"no closed form for {type(A).__name__} with {type(R).__name__}")


def _intersect(U: OrthonormalBasis, V: OrthonormalBasis) -> OrthonormalBasis:
    from .linalg import subspace_intersection

    return subspace_intersection(U, V)


def _is_horizontal_hyperplane(L: AffineSubspace) -> bool:
    dim = L.dim
    target = span_of(list(np.eye(dim)[:-1]), dim)
    if L.basis.rank != dim - 1:
        return False
    same = np.allclose(L.basis.projector(), target.projector(), atol=1e-9)
    return bool(same and abs(L.point[-1]) <= 1e-9)


def _classical_cone(A: SetDescriptor, a: np.ndarray, tol: float) -> ConeDescriptor:
    if isinstance(A, Sphere):
        return SubspaceCone(span_of([a - A.center], A.dim))
    if isinstance(A, FullSpace):
        return Trivial()
    if isinstance(A, AffineSubspace):
        perp = orthogonal_complement(A.basis)
        return Trivial() if perp.rank == 0 else SubspaceCone(perp)
    if isinstance(A, Ball):
        v = a - A.center
        if np.linalg.norm(v) < A.radius - tol:
            return Trivial()
        return HalfspaceNormalCone(v)
    if isinstance(A, Halfspace):
        if A.normal @ a < A.offset - tol:
            return Trivial()
        return HalfspaceNormalCone(A.normal)
    if isinstance(A, SinglePoint):
        return FullSpaceCone()
    if isinstance(A, Segment):
        e = A._edge()
        perp = orthogonal_complement(span_of([e], A.dim))
        at_p = np.linalg.norm(a - A.p) <= tol
        at_q = (not isinstance(A, Ray)) and np.linalg.norm(a - A.q) <= tol
        if not (at_p or at_q):
            return SubspaceCone(perp)
        out = -e if at_p else e
        gens = np.vstack([perp.vectors, -perp.vectors, out[None, :] / np.linalg.norm(out)])
        return PolyhedralCone(gens)
    if isinstance(A, EpigraphAbs):
        sg = -1.0 if A.flip else 1.0
        y = sg * a
        if np.linalg.norm(y) <= tol:
            return PolyhedralCone(sg * np.array([[A.slope, -1.0], [-A.slope, -1.0]]))
        if y[1] > A.slope * abs(y[0]) + tol:
            return Trivial()
        return HalfspaceNormalCone(sg * np.array([np.sign(y[0]) * A.slope, -1.0]))
    if isinstance(A, IceCreamCone):
        w, t = a[:-1], a[-1]
        r = np.linalg.norm(w)
        if A.beta * r < t - tol:
            return Trivial()
        if np.linalg.norm(a) <= tol:
            raise UnsupportedCone("the apex normal cone of the ice cream cone is a solid revolution cone")
        return HalfspaceNormalCone(np.append(A.beta * w / r, -1.0))
    raise UnsupportedCone(f"no classical closed form for {type(A).__name__}")


# ---------------------------------------------------------------------------
# affine decomposition

def decompose_wrt_affine(A: SetDescriptor, L: AffineSubspace, a, u, tol: float = 1e-9):
    """Split ``u = v + w`` with ``v`` in ``L - a`` and ``w`` orthogonal to it.

    For a classical normal ``u`` of ``A`` at ``a`` the component ``v`` is a
    restricted normal for the restrictor ``L`` and ``w`` spans the remaining
    orthogonal part, mirroring ``N_A(a) = N^L_A(a) ⊕ (L - a)^⊥``.
    """
    a = as_vector(a, A.dim)
    u = as_vector(u, A.dim)
    if not isinstance(L, AffineSubspace):
        raise TypeError("L must be an affine subspace")
    if np.max(L.distances(A.spanning_points())) > tol * 10 or L.distance(a) > tol * 10:
        raise NotContained("the affine subspace does not contain the set")
    v = L.basis.project(u)
    return v, u - v
