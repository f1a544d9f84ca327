"""Closed sets with exact distance and (possibly multi-valued) projection.

Every descriptor is an immutable value.  Two projection entry points exist:

* :meth:`SetDescriptor.project` returns a :class:`ProjectionResult` holding
  every minimizer that can be described finitely (continuum ties such as the
  center of a sphere are reported as ``multi_valued`` with canonical samples);
* :meth:`SetDescriptor.project_rows` projects a batch of points at once and
  returns the lexicographically smallest minimizer for each row.

Descriptors also expose a few geometric hooks used by the samplers:
``anchor_points`` (vertices, apexes, endpoints), ``spanning_points`` (points
whose affine hull is ``aff S``) and ``ray_hits`` (parameters ``lam > 0`` with
``origin + lam * d`` in the set).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linalg import (
    DimensionMismatch,
    OrthonormalBasis,
    as_vector,
    orthogonal_complement,
    orthonormalize,
    span_of,
)

TIE_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
_ROUND = 64 * np.finfo(float).eps


def tie_slack(d, X) -> np.ndarray:
    """Distances within this of the minimum count as ties.

    Relative to the distance itself plus a rounding floor from the
    coordinates, so that ties are scale free near a solution.
    """
    return TIE_TOL * np.asarray(d) + _ROUND * (1.0 + np.linalg.norm(np.atleast_2d(X), axis=-1))


class DescriptorError(ValueError):
    """Invalid descriptor parameters or serialized form."""


class UnsupportedBoundary(ValueError):
    """The boundary of this descriptor has no representation in the catalog."""


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """All minimizers of ``||x - s||`` over the set.

    ``points`` is sorted lexicographically, so ``points[0]`` is the
    deterministic selection used by the alternating projection engine.
    """

    points: np.ndarray
    distance: float
    multi_valued: bool

    @property
    def selection(self) -> np.ndarray:
        return self.points[0]

    def __len__(self) -> int:
        return self.points.shape[0]


def lexsort_rows(P: np.ndarray) -> np.ndarray:
    """Return rows of ``P`` sorted lexicographically (first coordinate first)."""
    if P.shape[0] <= 1:
        return P
    order = np.lexsort(P.T[::-1])
    return P[order]


def dedup_rows(P: np.ndarray, tol: float = TIE_TOL) -> np.ndarray:
    """Drop rows within ``tol`` of an earlier kept row; output is lexsorted."""
    P = lexsort_rows(np.asarray(P, dtype=float))
    kept: list[np.ndarray] = []
    for row in P:
        if all(np.linalg.norm(row - k) > tol for k in kept):
            kept.append(row)
    return np.array(kept).reshape(-1, P.shape[1])


def _lex_less(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Row-wise lexicographic ``X < Y``."""
    less = np.zeros(X.shape[0], dtype=bool)
    undecided = np.ones(X.shape[0], dtype=bool)
    for k in range(X.shape[1]):
        lt = X[:, k] < Y[:, k]
        gt = X[:, k] > Y[:, k]
        less |= undecided & lt
        undecided &= ~(lt | gt)
    return less


def _rows(X, dim: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {X.shape}")
    return X


def _ladder_hits(S: "SetDescriptor", origin: np.ndarray, D: np.ndarray, lams: np.ndarray, tol: float):
    """Ladder parameters whose ray points are members of ``S``."""
    if lams.size == 0 or D.shape[0] == 0:
        return np.zeros(0, dtype=int), np.zeros(0)
    pts = origin[None, None, :] + lams[None, :, None] * D[:, None, :]
    flat = pts.reshape(-1, S.dim)
    inside = S._distances(flat) <= tol
    idx, j = np.nonzero(inside.reshape(D.shape[0], lams.size))
    return idx, lams[j]


def _segment_param_hits(origin, D, p, e, s_max, tol):
    """Rays ``origin + lam d`` meeting ``{p + s e : 0 <= s <= s_max}``.

    Solves the 2x2 least-squares system per direction; collinear rays fall
    back to the segment endpoints that lie ahead of the origin.
    """
    n = D.shape[0]
    w = origin - p
    ee = e @ e
    de = D @ e
    dd = np.einsum("ij,ij->i", D, D)
    dw = D @ w
    ew = e @ w
    det = dd * ee - de * de
    idx_all, lam_all = [], []
    good = det > 1e-14 * np.maximum(dd * ee, 1e-300)
    if np.any(good):
        # minimize ||w + lam d - s e||^2
        lam = (de * ew - ee * dw)[good] / det[good]
        s = (dd * ew - de * dw)[good] / det[good]
        ii = np.nonzero(good)[0]
        resid = w[None, :] + lam[:, None] * D[ii] - s[:, None] * e[None, :]
        ok = (np.linalg.norm(resid, axis=1) <= tol) & (lam > 0) & (s >= -tol) & (s <= s_max + tol)
        idx_all.append(ii[ok])
        lam_all.append(lam[ok])
    par = ~good
    if np.any(par):
        ii = np.nonzero(par)[0]
        ends = [0.0] if not np.isfinite(s_max) else [0.0, s_max]
        for s in ends:
            q = p + s * e
            lam = D[ii] @ (q - origin) / dd[ii]
            resid = origin[None, :] + lam[:, None] * D[ii] - q[None, :]
            ok = (np.linalg.norm(resid, axis=1) <= tol) & (lam > 0)
            idx_all.append(ii[ok])
            lam_all.append(lam[ok])
    if not idx_all:
        return np.zeros(0, dtype=int), np.zeros(0)
    return np.concatenate(idx_all).astype(int), np.concatenate(lam_all)


def _affine_hits(origin, D, point, basis: OrthonormalBasis, tol):
    """Exact ray/affine-subspace intersections; in-plane rays are flagged."""
    def perp(v):
        return v - basis.project(v)

    r_o = perp(origin - point)
    R_d = perp(D)
    nd = np.einsum("ij,ij->i", R_d, R_d)
    scale = np.einsum("ij,ij->i", D, D)
    transversal = nd > 1e-20 * np.maximum(scale, 1e-300)
    lam = np.zeros(D.shape[0])
    lam[transversal] = -(R_d[transversal] @ r_o) / nd[transversal]
    resid = np.linalg.norm(r_o[None, :] + lam[:, None] * R_d, axis=1)
    hit = transversal & (lam > 0) & (resid <= tol)
    inplane = (~transversal) & (np.linalg.norm(r_o) <= tol)
    return np.nonzero(hit)[0], lam[hit], inplane


def _sphere_hits(origin, D, center, radius, tol):
    w = origin - center
    a = np.einsum("ij,ij->i", D, D)
    b = 2.0 * (D @ w)
    cc = w @ w - radius * radius
    disc = b * b - 4 * a * cc
    ok = disc >= 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    idx, lam = [], []
    for sgn in (-1.0, 1.0):
        l = (-b + sgn * root) / (2 * a)
        good = ok & (l > 0)
        if sgn > 0:
            # tangent rays give a double root; keep one copy
            good &= root > 0
        idx.append(np.nonzero(good)[0])
        lam.append(l[good])
    return np.concatenate(idx), np.concatenate(lam)


class SetDescriptor:
    """Base class of the closed-set catalog."""

    dim: int
    tag: str = ""

    # -- required hooks -------------------------------------------------
    def _project_rows(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _minimizers(self, x: np.ndarray) -> tuple[np.ndarray, bool]:
        """All minimizers at ``x`` plus a flag for continuum ties."""
        return self._project_rows(x[None, :]), False

    def anchor_points(self) -> np.ndarray:
        return np.zeros((0, self.dim))

    def spanning_points(self) -> np.ndarray:
        raise NotImplementedError

    def _exact_ray_hits(self, origin, D, tol):
        """Exact intersections; returns (idx, lam, inplane_mask or None)."""
        return np.zeros(0, dtype=int), np.zeros(0), None

    @property
    def is_convex(self) -> bool:
        return False

    @property
    def is_thin(self) -> bool:
        """True when the set has empty interior in the ambient space."""
        return False

    def to_dict(self) -> dict:
        raise NotImplementedError

    # -- generic API ----------------------------------------------------
    def _distances(self, X: np.ndarray) -> np.ndarray:
        return np.linalg.norm(X - self._project_rows(X), axis=1)

    def project_rows(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Batch selection: lexicographically smallest minimizer per row."""
        X = _rows(X, self.dim)
        P = self._project_rows(X)
        return P, np.linalg.norm(X - P, axis=1)

    def distances(self, X) -> np.ndarray:
        return self._distances(_rows(X, self.dim))

    def distance(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(self._distances(x[None, :])[0])

    def project(self, x) -> ProjectionResult:
        x = as_vector(x, self.dim)
        pts, continuum = self._minimizers(x)
        d = float(np.min(np.linalg.norm(pts - x, axis=1)))
        pts = dedup_rows(pts, float(tie_slack(d, x)[0]))
        return ProjectionResult(pts, d, continuum or pts.shape[0] > 1)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        if tol < 0:
            raise ValueError("tol must be nonnegative")
        return self.distance(x) <= tol

    def contains_rows(self, X, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
        return self.distances(X) <= tol

    def ray_hits(self, origin, D, lams=(), tol: float = MEMBERSHIP_TOL):
        """Parameters ``lam > 0`` with ``origin + lam * D[i]`` in the set.

        Exact crossings are always reported; ladder values from ``lams`` are
        added for directions along which the set has positive extent.
        Returns ``(row_indices, lam_values)``.
        """
        origin = as_vector(origin, self.dim)
        D = _rows(D, self.dim)
        lams = np.asarray(lams, dtype=float)
        idx, lam, inplane = self._exact_ray_hits(origin, D, tol)
        parts_i, parts_l = [idx], [lam]
        if inplane is None:
            li, ll = _ladder_hits(self, origin, D, lams, tol)
        elif np.any(inplane):
            sel = np.nonzero(inplane)[0]
            li, ll = _ladder_hits(self, origin, D[sel], lams, tol)
            li = sel[li]
        else:
            li, ll = np.zeros(0, dtype=int), np.zeros(0)
        parts_i.append(li)
        parts_l.append(ll)
        return np.concatenate(parts_i).astype(int), np.concatenate(parts_l)

    def translate(self, shift) -> "SetDescriptor":
        """The set ``S + shift``."""
        return Embedded(self, as_vector(shift, self.dim), OrthonormalBasis(self.dim, np.eye(self.dim)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_dict()})"


# ---------------------------------------------------------------------------
# flat sets

class AffineSubspace(SetDescriptor):
    """``point + span(basis)``."""

    tag = "affine_subspace"

    def __init__(self, point, basis: OrthonormalBasis):
        self.point = as_vector(point)
        if basis.dim != self.point.size:
            raise DescriptorError("basis and point dimensions differ")
        self.basis = basis
        self.dim = self.point.size

    @classmethod
    def from_vectors(cls, point, vectors: Sequence) -> "AffineSubspace":
        p = as_vector(point)
        return cls(p, span_of(list(vectors), p.size))

    def _project_rows(self, X):
        return self.point + self.basis.project(X - self.point)

    def _distances(self, X):
        Y = X - self.point
        return np.linalg.norm(Y - self.basis.project(Y), axis=1)

    def anchor_points(self):
        return self.point[None, :].copy()

    def spanning_points(self):
        return np.vstack([self.point, self.point + self.basis.vectors])

    def _exact_ray_hits(self, origin, D, tol):
        return _affine_hits(origin, D, self.point, self.basis, tol)

    @property
    def is_convex(self):
        return True

    @property
    def is_thin(self):
        return self.basis.rank < self.dim

    @property
    def is_linear(self) -> bool:
        return bool(np.linalg.norm(self.point - self.basis.project(self.point)) <= 1e-12)

    def direction_space(self) -> OrthonormalBasis:
        return self.basis

    def translate(self, shift):
        return AffineSubspace(self.point + as_vector(shift, self.dim), self.basis)

    def to_dict(self):
        return {"type": self.tag, "point": self.point.tolist(), "basis": self.basis.to_list()}


class LinearSubspace(AffineSubspace):
    """``span(basis)`` through the origin."""

    tag = "linear_subspace"

    def __init__(self, basis: OrthonormalBasis):
        super().__init__(np.zeros(basis.dim), basis)

    @classmethod
    def spanned_by(cls, vectors: Sequence, dim: int | None = None) -> "LinearSubspace":
        vecs = [as_vector(v) for v in vectors]
        d = dim if dim is not None else vecs[0].size
        return cls(span_of(vecs, d))

    def to_dict(self):
        return {"type": self.tag, "dim": self.dim, "basis": self.basis.to_list()}


class FullSpace(AffineSubspace):
    """The whole Euclidean space R^dim."""

    tag = "full_space"

    def __init__(self, dim: int):
        super().__init__(np.zeros(dim), OrthonormalBasis(dim, np.eye(dim)))

    def _project_rows(self, X):
        return X.copy()

    def _distances(self, X):
        return np.zeros(X.shape[0])

    def translate(self, shift):
        return self

    def to_dict(self):
        return {"type": self.tag, "dim": self.dim}


def hyperplane(normal, offset: float) -> AffineSubspace:
    """``{x : <normal, x> = offset}`` as an affine subspace."""
    n = as_vector(normal)
    nn = np.linalg.norm(n)
    n, offset = n / nn, offset / nn
    normal_line = OrthonormalBasis(n.size, n[None, :])
    return AffineSubspace(offset * n, orthogonal_complement(normal_line))


# ---------------------------------------------------------------------------
# round sets

class Ball(SetDescriptor):
    tag = "ball"

    def __init__(self, center, radius: float):
        self.center = as_vector(center)
        if not radius > 0:
            raise DescriptorError("ball radius must be positive")
        self.radius = float(radius)
        self.dim = self.center.size

    def _project_rows(self, X):
        Y = X - self.center
        r = np.linalg.norm(Y, axis=1)
        out = r > self.radius
        P = X.copy()
        P[out] = self.center + Y[out] * (self.radius / r[out])[:, None]
        return P

    def _distances(self, X):
        return np.maximum(np.linalg.norm(X - self.center, axis=1) - self.radius, 0.0)

    def spanning_points(self):
        return np.vstack([self.center, self.center + self.radius * np.eye(self.dim)])

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam = _sphere_hits(origin, D, self.center, self.radius, tol)
        return idx, lam, None

    @property
    def is_convex(self):
        return True

    def translate(self, shift):
        return Ball(self.center + as_vector(shift, self.dim), self.radius)

    def to_dict(self):
        return {"type": self.tag, "center": self.center.tolist(), "radius": self.radius}


class Sphere(SetDescriptor):
    tag = "sphere"

    def __init__(self, center, radius: float):
        self.center = as_vector(center)
        if not radius > 0:
            raise DescriptorError("sphere radius must be positive")
        self.radius = float(radius)
        self.dim = self.center.size

    def _canonical(self) -> np.ndarray:
        eye = np.eye(self.dim)
        return self.center + self.radius * np.vstack([-eye, eye])

    def _project_rows(self, X):
        Y = X - self.center
        r = np.linalg.norm(Y, axis=1)
        P = np.empty_like(X)
        at_center = r == 0.0
        P[~at_center] = self.center + Y[~at_center] * (self.radius / r[~at_center])[:, None]
        # continuum tie at the center: lexicographically smallest canonical point
        P[at_center] = lexsort_rows(self._canonical())[0]
        return P

    def _distances(self, X):
        return np.abs(np.linalg.norm(X - self.center, axis=1) - self.radius)

    def _minimizers(self, x):
        if np.linalg.norm(x - self.center) == 0.0:
            return self._canonical(), True
        return self._project_rows(x[None, :]), False

    def anchor_points(self):
        return np.zeros((0, self.dim))

    def spanning_points(self):
        return self._canonical()

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam = _sphere_hits(origin, D, self.center, self.radius, tol)
        return idx, lam, np.zeros(D.shape[0], dtype=bool)

    @property
    def is_thin(self):
        return True

    def translate(self, shift):
        return Sphere(self.center + as_vector(shift, self.dim), self.radius)

    def to_dict(self):
        return {"type": self.tag, "center": self.center.tolist(), "radius": self.radius}


class Halfspace(SetDescriptor):
    """``{x : <normal, x> <= offset}`` with a unit normal."""

    tag = "halfspace"

    def __init__(self, normal, offset: float):
        n = as_vector(normal)
        nn = np.linalg.norm(n)
        if nn == 0:
            raise DescriptorError("halfspace normal must be nonzero")
        self.normal = n / nn
        self.offset = float(offset) / nn
        self.dim = n.size

    def _project_rows(self, X):
        excess = np.maximum(X @ self.normal - self.offset, 0.0)
        return X - excess[:, None] * self.normal

    def _distances(self, X):
        return np.maximum(X @ self.normal - self.offset, 0.0)

    def spanning_points(self):
        base = self.offset * self.normal
        return np.vstack([base, base + np.eye(self.dim)])

    def boundary(self) -> AffineSubspace:
        return hyperplane(self.normal, self.offset)

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam, _ = self.boundary()._exact_ray_hits(origin, D, tol)
        return idx, lam, None

    @property
    def is_convex(self):
        return True

    def translate(self, shift):
        return Halfspace(self.normal, self.offset + self.normal @ as_vector(shift, self.dim))

    def to_dict(self):
        return {"type": self.tag, "normal": self.normal.tolist(), "offset": self.offset}


# ---------------------------------------------------------------------------
# one-dimensional pieces

class Segment(SetDescriptor):
    """Closed segment ``[p, q]`` with distinct endpoints."""

    tag = "segment"

    def __init__(self, p, q):
        self.p = as_vector(p)
        self.q = as_vector(q, self.p.size)
        if np.linalg.norm(self.q - self.p) == 0:
            raise DescriptorError("segment endpoints coincide; use SinglePoint")
        self.dim = self.p.size

    def _s_max(self):
        return 1.0

    def _edge(self):
        return self.q - self.p

    def _project_rows(self, X):
        e = self._edge()
        t = np.clip((X - self.p) @ e / (e @ e), 0.0, self._s_max())
        return self.p + t[:, None] * e

    def anchor_points(self):
        return np.vstack([self.p, self.q])

    def spanning_points(self):
        return np.vstack([self.p, self.q])

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam = _segment_param_hits(origin, D, self.p, self._edge(), self._s_max(), tol)
        return idx, lam, _collinear_mask(origin, D, self.p, self._edge(), tol)

    @property
    def is_convex(self):
        return True

    @property
    def is_thin(self):
        return self.dim > 1

    def translate(self, shift):
        s = as_vector(shift, self.dim)
        return Segment(self.p + s, self.q + s)

    def to_dict(self):
        return {"type": self.tag, "p": self.p.tolist(), "q": self.q.tolist()}


class Ray(Segment):
    """Closed half-line ``origin + R_+ direction``."""

    tag = "ray"

    def __init__(self, origin, direction):
        self.p = as_vector(origin)
        d = as_vector(direction, self.p.size)
        nd = np.linalg.norm(d)
        if nd == 0:
            raise DescriptorError("ray direction must be nonzero")
        self.direction = d / nd
        self.q = self.p + self.direction
        self.dim = self.p.size

    def _s_max(self):
        return np.inf

    def _edge(self):
        return self.direction

    def anchor_points(self):
        return self.p[None, :].copy()

    def translate(self, shift):
        return Ray(self.p + as_vector(shift, self.dim), self.direction)

    def to_dict(self):
        return {"type": self.tag, "origin": self.p.tolist(), "direction": self.direction.tolist()}


def _collinear_mask(origin, D, p, e, tol):
    """Directions along which the ray runs inside the line through ``p``."""
    eu = e / np.linalg.norm(e)
    w = origin - p
    off = np.linalg.norm(w - (w @ eu) * eu)
    Dn = D / np.linalg.norm(D, axis=1, keepdims=True)
    par = np.linalg.norm(Dn - (Dn @ eu)[:, None] * eu, axis=1) <= 1e-12
    return par & (off <= tol)


class SinglePoint(SetDescriptor):
    tag = "point"

    def __init__(self, p):
        self.p = as_vector(p)
        self.dim = self.p.size

    def _project_rows(self, X):
        return np.broadcast_to(self.p, X.shape).copy()

    def anchor_points(self):
        return self.p[None, :].copy()

    def spanning_points(self):
        return self.p[None, :].copy()

    def _exact_ray_hits(self, origin, D, tol):
        dd = np.einsum("ij,ij->i", D, D)
        lam = D @ (self.p - origin) / dd
        resid = np.linalg.norm(origin + lam[:, None] * D - self.p, axis=1)
        ok = (lam > 0) & (resid <= tol)
        return np.nonzero(ok)[0], lam[ok], np.zeros(D.shape[0], dtype=bool)

    @property
    def is_convex(self):
        return True

    @property
    def is_thin(self):
        return True

    def translate(self, shift):
        return SinglePoint(self.p + as_vector(shift, self.dim))

    def to_dict(self):
        return {"type": self.tag, "p": self.p.tolist()}


# ---------------------------------------------------------------------------
# cones

class EpigraphAbs(SetDescriptor):
    """``{(x, y) : y >= slope |x|}`` in R^2, or its negative when ``flip``."""

    tag = "epigraph_abs"
    dim = 2

    def __init__(self, slope: float = 1.0, flip: bool = False):
        if not slope > 0:
            raise DescriptorError("slope must be positive")
        self.slope = float(slope)
        self.flip = bool(flip)

    def _sgn(self):
        return -1.0 if self.flip else 1.0

    def _project_rows(self, X):
        Y = self._sgn() * X
        s = self.slope
        x1, x2 = Y[:, 0], Y[:, 1]
        inside = x2 >= s * np.abs(x1)
        polar = x2 <= -np.abs(x1) / s
        side = np.where(x1 >= 0, 1.0, -1.0)
        g = np.stack([side, np.full_like(side, s)], axis=1) / np.hypot(1.0, s)
        t = np.maximum(np.einsum("ij,ij->i", Y, g), 0.0)
        P = t[:, None] * g
        P[inside] = Y[inside]
        P[polar & ~inside] = 0.0
        return self._sgn() * P

    def anchor_points(self):
        return np.zeros((1, 2))

    def spanning_points(self):
        return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    def boundary(self) -> "Union":
        sg = self._sgn()
        return Union([Ray([0.0, 0.0], [sg, sg * self.slope]), Ray([0.0, 0.0], [-sg, sg * self.slope])])

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam, _ = self.boundary()._exact_ray_hits(origin, D, tol)
        return idx, lam, None

    @property
    def is_convex(self):
        return True

    def to_dict(self):
        return {"type": self.tag, "slope": self.slope, "flip": self.flip}


class IceCreamCone(SetDescriptor):
    """``{x in R^m : beta ||(x_1..x_{m-1})|| <= x_m}``."""

    tag = "ice_cream_cone"

    def __init__(self, beta: float = 1.0, dim: int = 3):
        if not beta > 0:
            raise DescriptorError("beta must be positive")
        if int(dim) < 2:
            raise DescriptorError("ice cream cone needs dim >= 2")
        self.beta = float(beta)
        self.dim = int(dim)

    def _generator(self, W):
        r = np.linalg.norm(W, axis=1)
        zhat = np.zeros_like(W)
        nz = r > 0
        zhat[nz] = W[nz] / r[nz, None]
        zhat[~nz, 0] = 1.0
        g = np.hstack([zhat, np.full((W.shape[0], 1), self.beta)]) / np.hypot(1.0, self.beta)
        return g, r

    def _project_rows(self, X):
        W, t = X[:, :-1], X[:, -1]
        g, r = self._generator(W)
        inside = self.beta * r <= t
        polar = r <= -self.beta * t
        P = np.maximum(np.einsum("ij,ij->i", X, g), 0.0)[:, None] * g
        P[inside] = X[inside]
        P[polar & ~inside] = 0.0
        return P

    def anchor_points(self):
        return np.zeros((1, self.dim))

    def spanning_points(self):
        return np.vstack([np.zeros(self.dim), np.eye(self.dim)])

    def boundary(self) -> "IceCreamBoundary":
        return IceCreamBoundary(self.beta, self.dim)

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam, _ = self.boundary()._exact_ray_hits(origin, D, tol)
        return idx, lam, None

    @property
    def is_convex(self):
        return True

    def to_dict(self):
        return {"type": self.tag, "beta": self.beta, "dim": self.dim}


class IceCreamBoundary(SetDescriptor):
    """The surface ``beta ||(x_1..x_{m-1})|| = x_m`` (including the apex)."""

    tag = "ice_cream_boundary"

    def __init__(self, beta: float = 1.0, dim: int = 3):
        if not beta > 0 or int(dim) < 2:
            raise DescriptorError("invalid ice cream boundary parameters")
        self.beta = float(beta)
        self.dim = int(dim)

    def _generators_at(self, W):
        r = np.linalg.norm(W, axis=1)
        zhat = np.zeros_like(W)
        nz = r > 0
        zhat[nz] = W[nz] / r[nz, None]
        zhat[~nz, 0] = -1.0  # lexicographically smallest canonical choice
        nrm = np.hypot(1.0, self.beta)
        return np.hstack([zhat, np.full((W.shape[0], 1), self.beta)]) / nrm, r

    def _project_rows(self, X):
        g, _ = self._generators_at(X[:, :-1])
        t = np.maximum(np.einsum("ij,ij->i", X, g), 0.0)
        return t[:, None] * g

    def _minimizers(self, x):
        W = x[:-1]
        if np.linalg.norm(W) > 0 or x[-1] <= 0:
            return self._project_rows(x[None, :]), False
        eye = np.eye(self.dim - 1)
        Z = np.vstack([-eye, eye])
        G = np.hstack([Z, np.full((Z.shape[0], 1), self.beta)]) / np.hypot(1.0, self.beta)
        t = np.maximum(G @ x, 0.0)
        return t[:, None] * G, self.dim > 2

    def anchor_points(self):
        return np.zeros((1, self.dim))

    def spanning_points(self):
        eye = np.eye(self.dim - 1)
        Z = np.vstack([eye, -eye])
        return np.vstack([np.zeros(self.dim), np.hstack([Z, np.full((Z.shape[0], 1), self.beta)])])

    def _exact_ray_hits(self, origin, D, tol):
        # (o_m + lam d_m)^2 = beta^2 ||o' + lam d'||^2 with o_m + lam d_m >= 0
        b2 = self.beta ** 2
        o, Dp, dm = origin, D[:, :-1], D[:, -1]
        op, om = o[:-1], o[-1]
        qa = dm * dm - b2 * np.einsum("ij,ij->i", Dp, Dp)
        qb = 2 * (om * dm - b2 * (Dp @ op))
        qc = om * om - b2 * (op @ op)
        idx, lam = [], []
        lin = np.abs(qa) <= 1e-14
        with np.errstate(divide="ignore", invalid="ignore"):
            l_lin = np.where(np.abs(qb) > 0, -qc / qb, np.nan)
            disc = qb * qb - 4 * qa * qc
            root = np.sqrt(np.where(disc >= 0, disc, np.nan))
            cands = [np.where(lin, l_lin, np.nan),
                     np.where(~lin, (-qb - root) / (2 * qa), np.nan),
                     np.where(~lin, (-qb + root) / (2 * qa), np.nan)]
        for l in cands:
            good = np.isfinite(l) & (l > 0)
            pts = o + np.where(good, l, 0.0)[:, None] * D
            good &= pts[:, -1] >= -tol
            good &= self._distances(pts) <= tol
            idx.append(np.nonzero(good)[0])
            lam.append(l[good])
        idx = np.concatenate(idx)
        lam = np.concatenate(lam)
        if idx.size:
            key = np.round(lam, 12)
            _, first = np.unique(np.stack([idx, key]), axis=1, return_index=True)
            idx, lam = idx[first], lam[first]
        inplane = np.abs(qa) + np.abs(qb) + np.abs(qc) <= 1e-14
        return idx, lam, inplane

    @property
    def is_thin(self):
        return True

    def to_dict(self):
        return {"type": self.tag, "beta": self.beta, "dim": self.dim}


# ---------------------------------------------------------------------------
# sawtooth epigraph

class SawtoothEpigraph(SetDescriptor):
    """Epigraph of the sawtooth ``f(x) = 2^k (x - 2^k)`` on ``[2^k, 2^{k+1})``.

    Teeth cover ``k_min <= k <= k_max``.  Outside that window ``f`` is 0 on
    ``[0, 2^{k_min})``, continues as the next tooth on ``[2^{k_max+1}, inf)``
    and equals ``+inf`` for ``x < 0``.
    """

    tag = "sawtooth"
    dim = 2

    def __init__(self, k_min: int = -10, k_max: int = 1):
        k_min, k_max = int(k_min), int(k_max)
        if k_min > k_max:
            raise DescriptorError("k_min must not exceed k_max")
        self.k_min, self.k_max = k_min, k_max
        self._pieces = self._boundary_pieces()

    def f(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        out[x < 0] = np.inf
        with np.errstate(divide="ignore"):
            k = np.floor(np.log2(np.where(x > 0, x, 1.0)))
        k = np.clip(k, None, self.k_max + 1)
        tooth = (x >= 2.0 ** self.k_min)
        val = 2.0 ** k * (x - 2.0 ** k)
        out = np.where(tooth, val, out)
        out[x < 0] = np.inf
        return out

    def _boundary_pieces(self) -> list[SetDescriptor]:
        pieces: list[SetDescriptor] = [Ray([0.0, 0.0], [0.0, 1.0]),
                                       Segment([0.0, 0.0], [2.0 ** self.k_min, 0.0])]
        for k in range(self.k_min, self.k_max + 1):
            lo, hi = 2.0 ** k, 2.0 ** (k + 1)
            top = 4.0 ** k
            pieces.append(Segment([lo, 0.0], [hi, top]))
            pieces.append(Segment([hi, 0.0], [hi, top]))
        last = 2.0 ** (self.k_max + 1)
        pieces.append(Ray([last, 0.0], [1.0, last]))
        return pieces

    def _inside(self, X):
        return (X[:, 0] >= 0) & (X[:, 1] >= self.f(X[:, 0]))

    def _piece_arrays(self):
        if not hasattr(self, "_arrays"):
            P0 = np.array([p.p for p in self._pieces])
            E = np.array([p._edge() for p in self._pieces])
            smax = np.array([p._s_max() for p in self._pieces])
            self._arrays = (P0, E, smax)
        return self._arrays

    def _project_rows(self, X):
        inside = self._inside(X)
        best = X.copy()
        if not np.all(inside):
            best[~inside] = self._project_outside(X[~inside])
        return best

    def _project_outside(self, X):
        P0, E, smax = self._piece_arrays()
        W = X[:, None, :] - P0[None, :, :]
        t = np.clip(np.einsum("nmk,mk->nm", W, E) / np.sum(E * E, axis=1), 0.0, smax)
        pts = P0[None, :, :] + t[:, :, None] * E[None, :, :]
        d = np.linalg.norm(X[:, None, :] - pts, axis=2)
        dmin = d.min(axis=1, keepdims=True)
        cand = d <= dmin + tie_slack(dmin[:, 0], X)[:, None]
        # lexicographically smallest candidate
        for k in range(X.shape[1]):
            col = np.where(cand, pts[:, :, k], np.inf)
            cand &= col <= col.min(axis=1, keepdims=True)
        return pts[np.arange(X.shape[0]), np.argmax(cand, axis=1)]

    def _minimizers(self, x):
        if self._inside(x[None, :])[0]:
            return x[None, :].copy(), False
        cands = np.vstack([p._project_rows(x[None, :]) for p in self._pieces])
        d = np.linalg.norm(cands - x, axis=1)
        return cands[d <= d.min() + tie_slack(d.min(), x)[0]], False

    def anchor_points(self):
        return dedup_rows(np.vstack([p.anchor_points() for p in self._pieces]))

    def spanning_points(self):
        return np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam = [], []
        for p in self._pieces:
            i, l, _ = p._exact_ray_hits(origin, D, tol)
            idx.append(i)
            lam.append(l)
        return np.concatenate(idx).astype(int), np.concatenate(lam), None

    def to_dict(self):
        return {"type": self.tag, "k_min": self.k_min, "k_max": self.k_max}


# ---------------------------------------------------------------------------
# compositions

class Union(SetDescriptor):
    """Finite union of descriptors sharing one ambient dimension."""

    tag = "union"

    def __init__(self, parts: Sequence[SetDescriptor]):
        parts = list(parts)
        if not parts:
            raise DescriptorError("a union needs at least one part")
        dims = {p.dim for p in parts}
        if len(dims) != 1:
            raise DescriptorError(f"union parts have mixed dimensions {sorted(dims)}")
        self.parts = tuple(parts)
        self.dim = parts[0].dim

    def _project_rows(self, X):
        best, bd = None, None
        for part in self.parts:
            P = part._project_rows(X)
            d = np.linalg.norm(X - P, axis=1)
            if best is None:
                best, bd = P.copy(), d
                continue
            slack = tie_slack(np.minimum(d, bd), X)
            closer = d < bd - slack
            tie = (np.abs(d - bd) <= slack) & _lex_less(P, best)
            sw = closer | tie
            best[sw] = P[sw]
            bd = np.where(closer, d, np.minimum(bd, d))
        return best

    def _distances(self, X):
        return np.min(np.stack([p._distances(X) for p in self.parts]), axis=0)

    def _minimizers(self, x):
        found = []
        for part in self.parts:
            pts, cont = part._minimizers(x)
            d = float(np.min(np.linalg.norm(pts - x, axis=1)))
            found.append((d, pts, cont))
        dmin = min(f[0] for f in found)
        keep = [f for f in found if f[0] <= dmin + tie_slack(dmin, x)[0]]
        return np.vstack([f[1] for f in keep]), any(f[2] for f in keep)

    def anchor_points(self):
        pts = [p.anchor_points() for p in self.parts]
        pts = [p for p in pts if p.size]
        if not pts:
            return np.zeros((0, self.dim))
        return dedup_rows(np.vstack(pts))

    def spanning_points(self):
        return np.vstack([p.spanning_points() for p in self.parts])

    def ray_hits(self, origin, D, lams=(), tol: float = MEMBERSHIP_TOL):
        idx, lam = [], []
        for p in self.parts:
            i, l = p.ray_hits(origin, D, lams, tol)
            idx.append(i)
            lam.append(l)
        return np.concatenate(idx).astype(int), np.concatenate(lam)

    def _exact_ray_hits(self, origin, D, tol):
        idx, lam, inplane = [], [], np.zeros(D.shape[0], dtype=bool)
        for p in self.parts:
            i, l, m = p._exact_ray_hits(origin, D, tol)
            idx.append(i)
            lam.append(l)
            if m is not None:
                inplane |= m
        return np.concatenate(idx).astype(int), np.concatenate(lam), inplane

    @property
    def is_convex(self):
        return len(self.parts) == 1 and self.parts[0].is_convex

    @property
    def is_thin(self):
        return all(p.is_thin for p in self.parts)

    def translate(self, shift):
        return Union([p.translate(shift) for p in self.parts])

    def to_dict(self):
        return {"type": self.tag, "parts": [p.to_dict() for p in self.parts]}


class Embedded(SetDescriptor):
    """Image ``origin + frame^T s`` of a base set living in R^k, k <= dim.

    ``frame`` holds k orthonormal rows in R^dim.  Projection is exact because
    the frame is an isometry onto its affine span.
    """

    tag = "embedded"

    def __init__(self, base: SetDescriptor, origin, frame: OrthonormalBasis):
        self.base = base
        self.origin = as_vector(origin)
        if frame.rank != base.dim or frame.dim != self.origin.size:
            raise DescriptorError("frame rank must equal the base dimension")
        self.frame = frame
        self.dim = frame.dim

    def _to_local(self, X):
        return (X - self.origin) @ self.frame.vectors.T

    def _to_global(self, S):
        return self.origin + S @ self.frame.vectors

    def _project_rows(self, X):
        return self._to_global(self.base._project_rows(self._to_local(X)))

    def _minimizers(self, x):
        pts, cont = self.base._minimizers(self._to_local(x[None, :])[0])
        return self._to_global(pts), cont

    def anchor_points(self):
        a = self.base.anchor_points()
        return self._to_global(a) if a.size else np.zeros((0, self.dim))

    def spanning_points(self):
        return self._to_global(self.base.spanning_points())

    def hull(self) -> AffineSubspace:
        return AffineSubspace(self.origin, self.frame)

    def ray_hits(self, origin, D, lams=(), tol: float = MEMBERSHIP_TOL):
        origin = as_vector(origin, self.dim)
        D = _rows(D, self.dim)
        lams = np.asarray(lams, dtype=float)
        idx, lam, inplane = _affine_hits(origin, D, self.origin, self.frame, tol)
        keep = self._distances(origin + lam[:, None] * D[idx]) <= tol if idx.size else np.zeros(0, bool)
        out_i, out_l = [idx[keep]], [lam[keep]]
        if np.any(inplane):
            sel = np.nonzero(inplane)[0]
            o_loc = self._to_local(origin[None, :])[0]
            D_loc = D[sel] @ self.frame.vectors.T
            i2, l2 = self.base.ray_hits(o_loc, D_loc, lams, tol)
            out_i.append(sel[i2])
            out_l.append(l2)
        return np.concatenate(out_i).astype(int), np.concatenate(out_l)

    @property
    def is_convex(self):
        return self.base.is_convex

    @property
    def is_thin(self):
        return self.frame.rank < self.dim or self.base.is_thin

    def translate(self, shift):
        return Embedded(self.base, self.origin + as_vector(shift, self.dim), self.frame)

    def to_dict(self):
        return {"type": self.tag, "base": self.base.to_dict(), "origin": self.origin.tolist(),
                "frame": self.frame.to_list()}


# ---------------------------------------------------------------------------
# derived descriptors

def boundary_of(S: SetDescriptor) -> SetDescriptor:
    """Boundary of ``S`` relative to the ambient space."""
    if isinstance(S, Ball):
        return Sphere(S.center, S.radius)
    if isinstance(S, Halfspace):
        return S.boundary()
    if isinstance(S, (EpigraphAbs, IceCreamCone)):
        return S.boundary()
    if isinstance(S, FullSpace):
        raise UnsupportedBoundary("the full space has empty boundary")
    if S.is_thin:
        return S
    if isinstance(S, SawtoothEpigraph):
        return Union(S._pieces)
    if isinstance(S, Embedded):
        return Embedded(boundary_of(S.base), S.origin, S.frame)
    if isinstance(S, Union) and len(S.parts) == 1:
        return boundary_of(S.parts[0])
    raise UnsupportedBoundary(f"no boundary representation for {type(S).__name__}")


def on_boundary(S: SetDescriptor, x, tol: float = MEMBERSHIP_TOL) -> bool | None:
    """Whether ``x`` lies on ``bdry S``; ``None`` when no test is available.

    Thin sets (and unions of thin sets) have empty interior, so every member
    is a boundary point.
    """
    x = as_vector(x, S.dim)
    if S.is_thin:
        return S.distance(x) <= tol
    try:
        bd = boundary_of(S)
    except UnsupportedBoundary:
        return None
    return bd.distance(x) <= tol


def affine_hull_of_union(A: SetDescriptor, B: SetDescriptor) -> AffineSubspace:
    """Smallest affine subspace containing ``A ∪ B``."""
    if A.dim != B.dim:
        raise DimensionMismatch("sets live in different dimensions")
    pts = np.vstack([A.spanning_points(), B.spanning_points()])
    p0 = pts[0]
    basis = span_of(list(pts[1:] - p0), A.dim)
    if basis.rank == A.dim:
        return FullSpace(A.dim)
    # shift the anchor to the point of the hull closest to the origin
    p = p0 - basis.project(p0)
    if np.linalg.norm(p) <= 1e-12:
        return LinearSubspace(basis)
    return AffineSubspace(p, basis)


def union_of(parts: Sequence[SetDescriptor]) -> SetDescriptor:
    parts = list(parts)
    return parts[0] if len(parts) == 1 else Union(parts)


# ---------------------------------------------------------------------------
# serialization

_FIELDS = {
    "linear_subspace": ({"basis"}, {"dim"}),
    "affine_subspace": ({"point", "basis"}, set()),
    "full_space": ({"dim"}, set()),
    "hyperplane": ({"normal", "offset"}, set()),
    "ball": ({"center", "radius"}, set()),
    "sphere": ({"center", "radius"}, set()),
    "halfspace": ({"normal", "offset"}, set()),
    "segment": ({"p", "q"}, set()),
    "ray": ({"origin", "direction"}, set()),
    "point": ({"p"}, set()),
    "epigraph_abs": (set(), {"slope", "flip"}),
    "ice_cream_cone": (set(), {"beta", "dim"}),
    "ice_cream_boundary": (set(), {"beta", "dim"}),
    "sawtooth": (set(), {"k_min", "k_max"}),
    "union": ({"parts"}, set()),
    "embedded": ({"base", "origin", "frame"}, set()),
}

DESCRIPTOR_TYPES = tuple(sorted(_FIELDS))


def _vec(obj, where: str) -> np.ndarray:
    try:
        return as_vector(obj)
    except (TypeError, ValueError) as exc:
        raise DescriptorError(f"{where}: {exc}") from None


def _matrix(obj, where: str) -> list[np.ndarray]:
    if not isinstance(obj, list):
        raise DescriptorError(f"{where}: expected a list of vectors")
    return [_vec(v, f"{where}[{i}]") for i, v in enumerate(obj)]


def from_dict(obj: dict, where: str = "set") -> SetDescriptor:
    """Build a descriptor from its tagged JSON form ``{"type": ..., ...}``."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise DescriptorError(f"{where}: expected an object with a 'type' field")
    tag = obj["type"]
    if tag not in _FIELDS:
        raise DescriptorError(f"{where}: unknown set type {tag!r}; valid types: {', '.join(DESCRIPTOR_TYPES)}")
    required, optional = _FIELDS[tag]
    keys = set(obj) - {"type"}
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise DescriptorError(f"{where}: missing field(s) {sorted(missing)} for type {tag!r}")
    if unknown:
        raise DescriptorError(f"{where}: unknown field(s) {sorted(unknown)} for type {tag!r}")
    try:
        return _build(tag, obj, where)
    except DimensionMismatch as exc:
        raise DescriptorError(f"{where}: {exc}") from None


def _build(tag: str, obj: dict, where: str) -> SetDescriptor:
    if tag == "linear_subspace":
        vecs = _matrix(obj["basis"], f"{where}.basis")
        dim = obj.get("dim", vecs[0].size if vecs else None)
        if dim is None:
            raise DescriptorError(f"{where}: empty basis needs 'dim'")
        return LinearSubspace(span_of(vecs, int(dim)))
    if tag == "affine_subspace":
        p = _vec(obj["point"], f"{where}.point")
        return AffineSubspace(p, span_of(_matrix(obj["basis"], f"{where}.basis"), p.size))
    if tag == "full_space":
        return FullSpace(int(obj["dim"]))
    if tag == "hyperplane":
        return hyperplane(_vec(obj["normal"], f"{where}.normal"), float(obj["offset"]))
    if tag == "ball":
        return Ball(_vec(obj["center"], f"{where}.center"), float(obj["radius"]))
    if tag == "sphere":
        return Sphere(_vec(obj["center"], f"{where}.center"), float(obj["radius"]))
    if tag == "halfspace":
        return Halfspace(_vec(obj["normal"], f"{where}.normal"), float(obj["offset"]))
    if tag == "segment":
        p, q = _vec(obj["p"], f"{where}.p"), _vec(obj["q"], f"{where}.q")
        if p.size == q.size and np.linalg.norm(p - q) == 0:
            return SinglePoint(p)
        return Segment(p, q)
    if tag == "ray":
        return Ray(_vec(obj["origin"], f"{where}.origin"), _vec(obj["direction"], f"{where}.direction"))
    if tag == "point":
        return SinglePoint(_vec(obj["p"], f"{where}.p"))
    if tag == "epigraph_abs":
        return EpigraphAbs(float(obj.get("slope", 1.0)), bool(obj.get("flip", False)))
    if tag == "ice_cream_cone":
        return IceCreamCone(float(obj.get("beta", 1.0)), int(obj.get("dim", 3)))
    if tag == "ice_cream_boundary":
        return IceCreamBoundary(float(obj.get("beta", 1.0)), int(obj.get("dim", 3)))
    if tag == "sawtooth":
        return SawtoothEpigraph(int(obj.get("k_min", -10)), int(obj.get("k_max", 1)))
    if tag == "union":
        parts = obj["parts"]
        if not isinstance(parts, list):
            raise DescriptorError(f"{where}.parts: expected a list")
        return Union([from_dict(p, f"{where}.parts[{i}]") for i, p in enumerate(parts)])
    if tag == "embedded":
        base = from_dict(obj["base"], f"{where}.base")
        origin = _vec(obj["origin"], f"{where}.origin")
        frame = orthonormalize(_matrix(obj["frame"], f"{where}.frame"), dim=origin.size)
        return Embedded(base, origin, frame)
    raise AssertionError(tag)
