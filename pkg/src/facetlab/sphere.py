"""Uniform measure on the sphere: caps, cap bounds and the slab set A_eps.

``sigma`` is the rotation invariant probability measure on S^{n-1}.  The cap
``C(theta, h) = {u : <u, theta> >= h}`` has measure
``0.5 * I_{1-h^2}((n-1)/2, 1/2)`` for ``h >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import BLOCK_SIZE, RngStream, block_sizes, map_ordered

TAU = 1e-9
_CF_TOL = 1e-15
_CF_MAXITER = 100_000
_TINY = 1e-300


# ------------------------------------------------------- incomplete beta


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b) (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_incomplete_beta(a: float, b: float, x: float, y: float | None = None) -> float:
    """``I_x(a, b)``.  Pass ``y = 1 - x`` when it is known more accurately than ``1 - x``."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    y = 1.0 - x if y is None else y
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    log_front = a * math.log(x) + b * math.log(y) - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, y) / b


def exact_cap_measure(n: int, h: float) -> float:
    """sigma of a cap at height ``h`` in [0, 1) on S^{n-1}."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= h < 1.0:
        raise ValueError(f"cap height must lie in [0, 1), got {h}")
    if h == 0.0:
        return 0.5
    x = (1.0 - h) * (1.0 + h)
    return 0.5 * regularized_incomplete_beta((n - 1) / 2.0, 0.5, x, h * h)


def prop2_bound(n: int, eps: float) -> float:
    """Gaussian cap bound exp(-n eps^2 / 2)."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return math.exp(-0.5 * n * eps * eps)


def lemma5_bound_log10(n: int, h: float) -> float:
    if n < 3:
        raise ValueError("n must be at least 3")
    if not 0.0 < h < 1.0:
        raise ValueError(f"cap height must lie in (0, 1), got {h}")
    return ((n - 1) / 2.0) * math.log10(2.0 * (1.0 - h)) - math.log10(h * math.sqrt(n - 1))


def lemma5_bound(n: int, h: float) -> float:
    """(2(1-h))^{(n-1)/2} / (h sqrt(n-1)); sharp for small caps, may exceed 1."""
    lg = lemma5_bound_log10(n, h)
    return 10.0**lg if lg > -320 else 0.0


# ---------------------------------------------------------- ball volumes


def log_unit_ball_volume(n: int) -> float:
    return 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n + 1.0)


def unit_ball_volume(n: int) -> float:
    if n < 1:
        raise ValueError("n must be positive")
    return math.exp(log_unit_ball_volume(n))


def sphere_area(n: int) -> float:
    """(n-1)-dimensional area of S^{n-1}, i.e. n * kappa_n."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.exp(math.log(n) + log_unit_ball_volume(n))


# ------------------------------------------------------------- sampling


def sample_sphere(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    if n < 2:
        raise ValueError("n must be at least 2")
    shape = (n,) if size is None else (size, n)
    g = rng.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def sphere_block(n: int, stream: RngStream, index: int, size: int = BLOCK_SIZE) -> np.ndarray:
    """Block ``index`` of uniform directions for ``stream``; identical across runs."""
    return sample_sphere(n, stream.block(index), size)


# ----------------------------------------------------------------- A_eps


@dataclass(frozen=True, eq=False)
class Cap:
    center: np.ndarray
    height: float

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if abs(np.linalg.norm(c) - 1.0) > TAU:
            raise ValueError("cap center must be a unit vector")
        if not 0.0 < self.height < 1.0:
            raise ValueError("cap height must lie in (0, 1)")
        object.__setattr__(self, "center", c)

    def contains(self, u) -> np.ndarray | bool:
        return np.asarray(u) @ self.center >= self.height

    def measure(self) -> float:
        return exact_cap_measure(len(self.center), self.height)


@dataclass(frozen=True, eq=False)
class AEpsilonSpec:
    """Directions that are eps-orthogonal to every normalized covering center.

    Build with :meth:`from_centers`; centers at the origin are dropped.
    """

    dim: int
    normalized_centers: np.ndarray
    epsilon: float

    @classmethod
    def from_centers(cls, centers, epsilon: float, dim: int | None = None, tau: float = TAU) -> "AEpsilonSpec":
        if not 0.0 < epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
        x = np.asarray(centers, dtype=float)
        if x.size == 0:
            if dim is None:
                raise ValueError("dim is required when there are no centers")
            x = np.empty((0, dim))
        x = np.atleast_2d(x)
        dim = x.shape[1] if dim is None else dim
        if x.shape[1] != dim:
            raise ValueError("center dimension mismatch")
        lengths = np.linalg.norm(x, axis=1)
        keep = lengths > tau
        return cls(dim, x[keep] / lengths[keep, None], float(epsilon))


def in_A_epsilon(theta, spec: AEpsilonSpec):
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != spec.dim:
        raise ValueError("direction dimension mismatch")
    if len(spec.normalized_centers) == 0:
        return np.ones(theta.shape[:-1], dtype=bool) if theta.ndim > 1 else True
    inside = np.all(np.abs(theta @ spec.normalized_centers.T) <= spec.epsilon, axis=-1)
    return inside if theta.ndim > 1 else bool(inside)


@dataclass(frozen=True)
class MeasureEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int

    @classmethod
    def from_count(cls, hits: int, samples: int, seed: int) -> "MeasureEstimate":
        mean = hits / samples
        return cls(mean, math.sqrt(mean * (1.0 - mean) / samples), samples, seed)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


def measure_A_epsilon_mc(spec: AEpsilonSpec, samples: int, stream: RngStream) -> MeasureEstimate:
    """Indicator-mean estimate of sigma(A_eps); independent of the worker count."""
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    sizes = block_sizes(samples)

    def count(k: int) -> int:
        return int(np.count_nonzero(in_A_epsilon(sphere_block(spec.dim, stream, k, sizes[k]), spec)))

    hits = sum(map_ordered(count, range(len(sizes))))
    return MeasureEstimate.from_count(hits, samples, stream.seed)


class LowerBound(NamedTuple):
    value: float
    vacuous: bool


def a_epsilon_lower_bound(N: int, n: int, eps: float) -> LowerBound:
    """1 - 2 exp(log N - n eps^2 / 2), returned raw; vacuous when <= 0."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    expo = math.log(N) - 0.5 * n * eps * eps
    value = 1.0 - 2.0 * math.exp(expo) if expo < 700 else -math.inf
    return LowerBound(value, value <= 0.0)


def union_lower_bound(N: int, n: int, eps: float) -> LowerBound:
    """1 - 2 N sigma(C(u, eps)) with the exact cap measure."""
    value = 1.0 - 2.0 * N * exact_cap_measure(n, eps)
    return LowerBound(value, value <= 0.0)


# ------------------------------------------------------ cone complement


def cone_clearance(t: float, eps: float) -> float:
    """Distance from ``t*theta`` (t >= 0) to ``{x : |<x, theta>| <= eps |x|}``."""
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    return t * math.sqrt((1.0 - eps) * (1.0 + eps))


def cone_complement_radial(eps: float) -> float:
    """Radial function at theta of (complement of the double cone G(theta, eps)) + B."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return 1.0 / math.sqrt((1.0 - eps) * (1.0 + eps))
