"""Independent reference computations used by the tests.

Nothing here calls into the package: bases come from scipy and
suprema come from dense grids.
"""

import numpy as np
from scipy.linalg import null_space, orth


def intersection_basis(U, V, tol=1e-9):
    """Orthonormal basis (columns) of span(U) ∩ span(V), U and V as columns."""
    N = null_space(np.hstack([U, -V]), rcond=tol)
    if N.size == 0:
        return np.zeros((U.shape[0], 0))
    return orth(U @ N[: U.shape[1]])


def _circle_grid(B, n):
    """Unit vectors of span(B) for a basis B with at most 2 columns."""
    if B.shape[1] == 0:
        return np.zeros((0, B.shape[0]))
    if B.shape[1] == 1:
        return B.T.copy()
    t = np.linspace(0.0, np.pi, n, endpoint=False)
    return np.cos(t)[:, None] * B[:, 0] + np.sin(t)[:, None] * B[:, 1]


def friedrichs_grid(U, V, n=2000):
    """Grid sup of |<a, b>| over unit a in U ∩ M^⊥, b in V ∩ M^⊥ (M = U ∩ V).

    Only subspaces whose reduced parts have dimension at most 2 are
    supported, which covers every pair in R^3 and generic 2-planes in R^4.
    """
    M = intersection_basis(U, V)
    parts = []
    for S in (U, V):
        if M.shape[1]:
            S = orth(S - M @ (M.T @ S), rcond=1e-9) if S.shape[1] > M.shape[1] else np.zeros((S.shape[0], 0))
        parts.append(S)
    Ua, Vb = _circle_grid(parts[0], n), _circle_grid(parts[1], n)
    if Ua.shape[0] == 0 or Vb.shape[0] == 0:
        return 0.0
    return float(np.max(np.abs(Ua @ Vb.T)))


def two_line_iterates(w_a, w_b, start, n):
    """Gaps of alternating projections between two lines via explicit matrices."""
    Pa, Pb = np.outer(w_a, w_a), np.outer(w_b, w_b)
    b = np.asarray(start, dtype=float)
    gaps = []
    for _ in range(n):
        a = Pa @ b
        b = Pb @ a
        gaps.append(np.linalg.norm(a - b))
    return np.array(gaps)
