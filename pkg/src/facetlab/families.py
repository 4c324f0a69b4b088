"""Named polytope families used as test instances."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.linalg import helmert

from .polytope import PolytopeV
from .rng import RngStream
from .sphere import sample_sphere

FAMILIES = ("cube", "cross", "simplex", "slab", "random-hull")


def cube(n: int, side: float = 1.0) -> PolytopeV:
    """{±side}^n."""
    return PolytopeV(side * np.array(list(itertools.product([-1.0, 1.0], repeat=n))))


def cross_polytope(n: int) -> PolytopeV:
    eye = np.eye(n)
    return PolytopeV(np.vstack([eye, -eye]))


def regular_simplex(n: int) -> PolytopeV:
    """Regular simplex centred at 0 with circumradius 1."""
    basis = helmert(n + 1)  # (n, n+1), orthonormal rows orthogonal to the all-ones vector
    pts = (np.eye(n + 1) - 1.0 / (n + 1)) @ basis.T
    return PolytopeV(pts / np.linalg.norm(pts, axis=1, keepdims=True))


def slab(n: int, a: float = 1.8, b: float = 0.1) -> PolytopeV:
    """[-a, a] x [-b, b]^{n-1}."""
    half = np.array([a] + [b] * (n - 1))
    return PolytopeV(half * np.array(list(itertools.product([-1.0, 1.0], repeat=n))))


def random_hull(n: int, m: int, seed: int = 0, radius: float = 1.0) -> PolytopeV:
    """conv of ``m`` uniform points on ``radius * S^{n-1}``."""
    if m <= n:
        raise ValueError("need more than n points for a full-dimensional hull")
    rng = RngStream(seed, "random-hull").generator()
    return PolytopeV(radius * sample_sphere(n, rng, m))


def generate(family: str, n: int, m: int = 100, seed: int = 0, a: float = 1.8, b: float = 0.1,
             radius: float = 1.0) -> PolytopeV:
    if n < 2:
        raise ValueError("n must be at least 2")
    if family == "cube":
        return cube(n)
    if family == "cross":
        return cross_polytope(n)
    if family == "simplex":
        return regular_simplex(n)
    if family == "slab":
        if not (a > 0 and b > 0):
            raise ValueError("slab half-widths must be positive")
        return slab(n, a, b)
    if family == "random-hull":
        if not radius > 0:
            raise ValueError("radius must be positive")
        return random_hull(n, m, seed, radius)
    raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
