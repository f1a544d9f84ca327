"""Sampling configuration and deterministic direction grids."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))


@dataclass(frozen=True)
class SamplingConfig:
    """Knobs shared by every sampler.

    Attributes
    ----------
    seed : int
        Seed of the generator; each sampler call starts a fresh generator
        from it so results never depend on call order.
    directions_per_shell : int or None
        Directions per harvesting shell; ``None`` picks 4096 in dims <= 3
        and 16384 above.
    radius_ladder : tuple of float
        Decreasing delta schedule for restricted normal cones.
    membership_tol : float
        Relative tolerance when re-verifying ``a in P_A(b)``.
    angular_dedup : float
        Resolution of the direction deduplication grid.
    shell_depth : int
        Sub-shells ``delta * 2**-j`` for ``j < shell_depth`` per ladder entry.
    shoot_directions : int
        Directions per base point for forward ray casting.
    base_points : int
        Seeded base points per ball for forward ray casting.
    """

    seed: int = 0
    directions_per_shell: int | None = None
    radius_ladder: tuple[float, ...] = (1e-1, 1e-2, 1e-3)
    membership_tol: float = 1e-9
    angular_dedup: float = 1e-3
    shell_depth: int = 6
    shoot_directions: int = 512
    base_points: int = 16

    def __post_init__(self):
        ladder = tuple(float(r) for r in self.radius_ladder)
        if not ladder or any(r <= 0 for r in ladder):
            raise ValueError("radius_ladder must be nonempty and positive")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("radius_ladder must be strictly decreasing")
        object.__setattr__(self, "radius_ladder", ladder)
        if self.membership_tol < 0 or self.angular_dedup <= 0:
            raise ValueError("tolerances must be positive")
        if self.directions_per_shell is not None and self.directions_per_shell < 4:
            raise ValueError("directions_per_shell must be at least 4")

    def n_directions(self, dim: int) -> int:
        if self.directions_per_shell is not None:
            return int(self.directions_per_shell)
        return 4096 if dim <= 3 else 16384

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([int(self.seed) & 0xFFFFFFFFFFFFFFFF, int(salt)])

    def with_ladder(self, ladder) -> "SamplingConfig":
        return replace(self, radius_ladder=tuple(ladder))

    def to_dict(self) -> dict:
        return {
            "seed": int(self.seed),
            "directions_per_shell": self.directions_per_shell,
            "radius_ladder": list(self.radius_ladder),
            "membership_tol": self.membership_tol,
            "angular_dedup": self.angular_dedup,
            "shell_depth": self.shell_depth,
            "shoot_directions": self.shoot_directions,
            "base_points": self.base_points,
        }


def _axis_directions(dim: int) -> np.ndarray:
    eye = np.eye(dim)
    dirs = [eye, -eye]
    if dim >= 2:
        diag = []
        for i in range(dim):
            for j in range(i + 1, dim):
                for si in (1.0, -1.0):
                    for sj in (1.0, -1.0):
                        v = np.zeros(dim)
                        v[i], v[j] = si, sj
                        diag.append(v / np.sqrt(2.0))
        dirs.append(np.array(diag))
    return np.vstack(dirs)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Nearly uniform deterministic points on the unit sphere in R^3."""
    k = np.arange(n) + 0.5
    z = 1.0 - 2.0 * k / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = GOLDEN_ANGLE * k
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def direction_grid(dim: int, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Unit directions: a deterministic grid plus coordinate and diagonal axes.

    In R^2 the grid is ``n`` equally spaced angles (which contains every axis
    direction when ``n`` is a multiple of 8); in R^3 a Fibonacci sphere; in
    higher dimensions seeded Gaussian directions.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        t = 2.0 * np.pi * np.arange(n) / n
        grid = np.stack([np.cos(t), np.sin(t)], axis=1)
    elif dim == 3:
        grid = fibonacci_sphere(n)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        g = rng.standard_normal((n, dim))
        grid = g / np.linalg.norm(g, axis=1, keepdims=True)
    grid = np.vstack([grid, _axis_directions(dim)])
    grid[np.abs(grid) < 1e-15] = 0.0
    return grid


def random_directions(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def ball_points(rng: np.random.Generator, n: int, center: np.ndarray, radius: float) -> np.ndarray:
    """Uniform samples in the closed ball ``B(center, radius)``."""
    dim = center.size
    d = random_directions(rng, n, dim)
    r = radius * rng.random(n) ** (1.0 / dim)
    return center + r[:, None] * d
