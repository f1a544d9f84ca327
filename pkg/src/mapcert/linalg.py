"""Dense vector and subspace utilities.

Subspaces are carried as :class:`OrthonormalBasis` values whose rows are the
basis vectors.  Principal cosines come from the singular values of the
cross-Gram matrix of two orthonormal bases.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

INTERSECTION_TOL = 1e-9


class DimensionMismatch(ValueError):
    """Raised when vectors or subspaces live in different ambient spaces."""


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Return ``x`` as a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size == 0:
        raise ValueError("vectors must have positive dimension")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    if dim is not None and v.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {v.size}")
    return v


def unit(x) -> np.ndarray:
    """Normalize a nonzero vector."""
    v = as_vector(x)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Orthonormal basis of a linear subspace of R^dim.

    Attributes
    ----------
    dim : int
        Ambient dimension.
    vectors : ndarray, shape (k, dim)
        Basis vectors as rows; ``k`` may be zero for the trivial subspace.
    """

    dim: int
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        vecs = np.asarray(self.vectors, dtype=float).reshape(-1, self.dim)
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def rank(self) -> int:
        return self.vectors.shape[0]

    def project(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of a point (or rows of points) onto the span."""
        x = np.asarray(x, dtype=float)
        return (x @ self.vectors.T) @ self.vectors

    def projector(self) -> np.ndarray:
        return self.vectors.T @ self.vectors

    def complement(self) -> "OrthonormalBasis":
        return orthogonal_complement(self)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim)
        return float(np.linalg.norm(x - self.project(x))) <= tol

    def to_list(self) -> list[list[float]]:
        return self.vectors.tolist()


@dataclass(frozen=True)
class AngleReport:
    """Principal cosines with the Dixmier and Friedrichs cosines of a pair."""

    principal_cosines: tuple[float, ...]
    dixmier_c0: float
    friedrichs_c: float
    intersection_dim: int


def _stack(vectors: Iterable, dim: int | None) -> np.ndarray:
    rows = [np.asarray(v, dtype=float).ravel() for v in vectors]
    if not rows:
        if dim is None:
            raise ValueError("dimension required for an empty vector list")
        return np.zeros((0, dim))
    sizes = {r.size for r in rows}
    if len(sizes) != 1:
        raise DimensionMismatch(f"vectors have mixed dimensions {sorted(sizes)}")
    if dim is not None and rows[0].size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {rows[0].size}")
    return np.vstack(rows)


def orthonormalize(vectors: Sequence, tol: float = 1e-9, dim: int | None = None) -> OrthonormalBasis:
    """Gram-Schmidt with re-orthogonalization.

    Vectors whose residual norm after removing the span of the previously
    accepted vectors is at most ``tol`` are dropped.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mat = _stack(vectors, dim)
    d = mat.shape[1]
    basis: list[np.ndarray] = []
    for row in mat:
        r = row.copy()
        for _ in range(2):
            for q in basis:
                r -= (q @ r) * q
        n = np.linalg.norm(r)
        if n > tol:
            basis.append(r / n)
    return OrthonormalBasis(d, np.array(basis).reshape(-1, d))


def span_of(vectors: Sequence, dim: int, tol: float = 1e-9) -> OrthonormalBasis:
    """Orthonormal basis of a span, robust to many (possibly redundant) vectors."""
    mat = _stack(vectors, dim)
    if mat.shape[0] == 0:
        return OrthonormalBasis(dim, np.zeros((0, dim)))
    _, s, vt = np.linalg.svd(mat, full_matrices=False)
    scale = max(1.0, float(s[0])) if s.size else 1.0
    keep = s > tol * scale
    return orthonormalize(vt[keep], tol=1e-12, dim=dim)


def orthogonal_complement(U: OrthonormalBasis) -> OrthonormalBasis:
    if U.rank == 0:
        return OrthonormalBasis(U.dim, np.eye(U.dim))
    _, s, vt = np.linalg.svd(U.vectors, full_matrices=True)
    rest = vt[U.rank:]
    return orthonormalize(rest, tol=1e-12, dim=U.dim)


def _check_pair(U: OrthonormalBasis, V: OrthonormalBasis) -> None:
    if U.dim != V.dim:
        raise DimensionMismatch(f"ambient dimensions differ: {U.dim} vs {V.dim}")


def _cross_svd(U: OrthonormalBasis, V: OrthonormalBasis):
    if U.rank == 0 or V.rank == 0:
        return np.zeros((U.rank, 0)), np.zeros(0), np.zeros((0, V.rank))
    return np.linalg.svd(U.vectors @ V.vectors.T, full_matrices=False)


def subspace_intersection(
    U: OrthonormalBasis, V: OrthonormalBasis, tol: float = INTERSECTION_TOL
) -> OrthonormalBasis:
    """Basis of U ∩ V: principal directions whose cosine is at least ``1 - tol``."""
    _check_pair(U, V)
    p, s, _ = _cross_svd(U, V)
    hit = s >= 1.0 - tol
    if not np.any(hit):
        return OrthonormalBasis(U.dim, np.zeros((0, U.dim)))
    dirs = p[:, hit].T @ U.vectors
    return orthonormalize(dirs, tol=1e-6, dim=U.dim)


def angles(U: OrthonormalBasis, V: OrthonormalBasis, tol: float = INTERSECTION_TOL) -> AngleReport:
    """Principal cosines, Dixmier cosine c0 and Friedrichs cosine c of (U, V).

    Removing U ∩ V from both sides leaves exactly the principal cosines below
    the intersection threshold, so the Friedrichs cosine is the largest of
    those (0 when none remain).
    """
    _check_pair(U, V)
    _, s, _ = _cross_svd(U, V)
    cosines = np.clip(np.sort(s)[::-1], 0.0, 1.0)
    inter = cosines >= 1.0 - tol
    rest = cosines[~inter]
    c0 = float(cosines[0]) if cosines.size else 0.0
    c = float(rest[0]) if rest.size else 0.0
    return AngleReport(
        principal_cosines=tuple(float(v) for v in cosines),
        dixmier_c0=c0,
        friedrichs_c=c,
        intersection_dim=int(np.count_nonzero(inter)),
    )


def subspace_sum(U: OrthonormalBasis, V: OrthonormalBasis) -> OrthonormalBasis:
    _check_pair(U, V)
    return span_of(list(U.vectors) + list(V.vectors), U.dim)


def random_subspace(rng: np.random.Generator, dim: int, rank: int) -> OrthonormalBasis:
    """Uniformly distributed subspace of the given rank (QR of a Gaussian matrix)."""
    if rank == 0:
        return OrthonormalBasis(dim, np.zeros((0, dim)))
    q, _ = np.linalg.qr(rng.standard_normal((dim, rank)))
    return orthonormalize(q.T, tol=1e-12, dim=dim)
