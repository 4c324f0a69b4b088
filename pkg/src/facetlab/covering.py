"""Covering numbers N(K, B) with checkable certificates.

Upper bounds come from a cover whose every grid cell is certified: if a cell
centre lies within ``1 - delta*sqrt(n)/2`` of a ball centre, the whole cell
is inside that unit ball.  Lower bounds come from packing witnesses, points
of K pairwise more than 2 apart (a unit ball holds at most one of them).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .polytope import BudgetExceeded, Polytope, PolytopeV, TAU, contains
from .rng import RngStream, map_ordered

MAX_CELLS = 10**8
GREEDY_MAX_CELLS = 2_000_000
EXACT_SEARCH_BUDGET = 200_000
SCALED_COPIES = (0.25, 0.5, 0.75)
_CELL_CHUNK = 1 << 16

CERTIFIED = "certified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"


@dataclass(eq=False)
class CoveringCertificate:
    centers: np.ndarray
    grid_delta: float
    margin: float
    status: str
    witness: np.ndarray | None = None
    cells_tested: int = 0

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_dict(self) -> dict:
        out = {
            "centers": np.asarray(self.centers).tolist(),
            "grid_delta": self.grid_delta,
            "margin": self.margin,
            "status": self.status,
            "cells_tested": self.cells_tested,
        }
        if self.witness is not None:
            out["witness"] = np.asarray(self.witness).tolist()
        return out


@dataclass(eq=False)
class PackingWitness:
    points: np.ndarray

    def __len__(self):
        return len(self.points)


@dataclass(eq=False)
class CoveringBounds:
    n_low: int
    n_up: int | None
    certificate: CoveringCertificate
    packing: PackingWitness
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_low": self.n_low,
            "n_up": self.n_up,
            "centers": np.asarray(self.certificate.centers).tolist(),
            "grid_delta": self.certificate.grid_delta,
            "status": self.certificate.status,
            "packing": np.asarray(self.packing.points).tolist(),
        }


def default_delta(n: int) -> float:
    """Grid step with half-diagonal delta*sqrt(n)/2 = 0.05."""
    return 0.1 / math.sqrt(n)


def _vertices(K: Polytope) -> np.ndarray:
    return K.extreme_points if isinstance(K, PolytopeV) else K.vertices


class _Grid:
    """Cells of side delta anchored at ``anchor``, restricted to the bounding box of K."""

    def __init__(self, K: Polytope, delta: float, anchor=None):
        if not delta > 0:
            raise ValueError("grid step must be positive")
        verts = _vertices(K)
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        self.anchor = lo if anchor is None else np.asarray(anchor, dtype=float)
        self.delta = float(delta)
        self.jmin = np.floor((lo - self.anchor) / delta + 1e-9).astype(np.int64)
        jmax = np.ceil((hi - self.anchor) / delta - 1e-9).astype(np.int64)
        self.shape = tuple(int(s) for s in np.maximum(jmax - self.jmin, 1))
        self.size = math.prod(self.shape)
        self.half_diag = delta * math.sqrt(K.dim) / 2.0
        H = K.h if isinstance(K, PolytopeV) else K
        self._A, self._b = H.normals, H.offsets

    def chunk(self, start: int, stop: int):
        """Flat indices and centres of relevant cells in ``[start, stop)``."""
        flat = np.arange(start, stop, dtype=np.int64)
        idx = np.stack(np.unravel_index(flat, self.shape), axis=1) + self.jmin
        centres = self.anchor + (idx + 0.5) * self.delta
        # superset of the cells meeting K: centre within half_diag of every halfspace
        near = np.all(centres @ self._A.T <= self._b + self.half_diag, axis=1)
        return flat[near], centres[near]

    def chunks(self):
        return [(s, min(s + _CELL_CHUNK, self.size)) for s in range(0, self.size, _CELL_CHUNK)]

    def relevant_centres(self) -> np.ndarray:
        parts = [self.chunk(s, e)[1] for s, e in self.chunks()]
        return np.vstack(parts)


def _min_dist(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    if len(centers) == 0:
        return np.full(len(points), np.inf)
    d2 = (
        np.sum(points**2, axis=1)[:, None]
        - 2.0 * points @ centers.T
        + np.sum(centers**2, axis=1)[None, :]
    )
    return np.sqrt(np.maximum(np.min(d2, axis=1), 0.0))


def verify_covering(K: Polytope, centers, delta: float, anchor=None, tau: float = TAU) -> CoveringCertificate:
    """Check ``K`` is inside the union of unit balls at ``centers``.

    Returns a certified certificate, a refuted one carrying a point of K
    farther than 1 from every centre, or inconclusive.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if centers.size == 0:
        centers = np.empty((0, K.dim))
    grid = _Grid(K, delta, anchor)
    if grid.size > MAX_CELLS:
        raise BudgetExceeded(f"{grid.size} grid cells exceed the budget of {MAX_CELLS}")
    margin = grid.half_diag

    def check(span):
        flat, pts = grid.chunk(*span)
        d = _min_dist(pts, centers)
        ok = bool(np.all(d <= 1.0 - margin))
        best = None
        bad = (d > 1.0 + tau) & contains(K, pts, tau)
        if np.any(bad):
            k = int(np.argmax(np.where(bad, d, -np.inf)))
            best = (float(d[k]), -int(flat[k]), pts[k])
        return ok, len(flat), best

    spans = grid.chunks()
    results = map_ordered(lambda i: check(spans[i]), range(len(spans)))
    tested = sum(r[1] for r in results)
    if all(r[0] for r in results):
        return CoveringCertificate(centers, grid.delta, margin, CERTIFIED, None, tested)

    candidates = [r[2] for r in results if r[2] is not None]
    verts = _vertices(K)
    dv = _min_dist(verts, centers)
    if np.any(dv > 1.0 + tau):
        k = int(np.argmax(dv))
        candidates.append((float(dv[k]), 1, verts[k]))
    if candidates:
        witness = max(candidates, key=lambda c: (c[0], c[1]))[2]
        return CoveringCertificate(centers, grid.delta, margin, REFUTED, np.array(witness), tested)
    return CoveringCertificate(centers, grid.delta, margin, INCONCLUSIVE, None, tested)


def sample_body(K: Polytope, count: int, rng: np.random.Generator, max_tries: int = 200) -> np.ndarray:
    """Uniform points of K by rejection from its bounding box (may return fewer)."""
    verts = _vertices(K)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    got = []
    have = 0
    for _ in range(max_tries):
        u = lo + rng.random((max(count, 64), K.dim)) * (hi - lo)
        u = u[contains(K, u)]
        got.append(u)
        have += len(u)
        if have >= count:
            break
    pts = np.vstack(got) if got else np.empty((0, K.dim))
    return pts[:count]


def default_candidates(K: Polytope, stream: RngStream, n_random: int = 64) -> np.ndarray:
    """Vertices, their scaled copies, facet centroids (and halves), the origin, random points."""
    verts = _vertices(K)
    facets = K.facets
    centroids = np.array([K.vertices[list(f.incident_vertices)].mean(axis=0) for f in facets])
    parts = [verts]
    parts += [s * verts for s in SCALED_COPIES]
    parts += [centroids, 0.5 * centroids, np.zeros((1, K.dim))]
    parts.append(sample_body(K, n_random, stream.spawn("candidates").generator()))
    return np.vstack(parts)


def _bits(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row).tobytes(), "big")


def _exact_refine(cover: np.ndarray, upper: int, budget: int) -> list[int] | None:
    """Smallest candidate subset (< upper) covering every cell, scanning lexicographically."""
    n_cand, n_cells = cover.shape
    full = _bits(np.ones(n_cells, dtype=bool))
    masks = [_bits(r) for r in cover]
    useful = [i for i in range(n_cand) if masks[i]]
    for k in range(1, upper):
        if math.comb(len(useful), k) > budget:
            return None
        for combo in itertools.combinations(useful, k):
            acc = 0
            for i in combo:
                acc |= masks[i]
            if acc == full:
                return list(combo)
    return None


def greedy_cover_upper(
    K: Polytope,
    delta: float | None = None,
    stream: RngStream | None = None,
    candidates=None,
    anchor=None,
    exact_budget: int = EXACT_SEARCH_BUDGET,
):
    """Greedy unit-ball cover of K from a candidate set, re-verified on the grid.

    The candidate covering the most uncovered cells is taken (lowest index on
    ties).  A lexicographic exhaustive search for a smaller sub-cover follows
    when it fits ``exact_budget``.  Returns ``(N_up, centers, certificate)``;
    ``N_up`` is None when the candidates cannot cover K.
    """
    stream = stream or RngStream(0)
    delta = default_delta(K.dim) if delta is None else delta
    cand = default_candidates(K, stream) if candidates is None else np.atleast_2d(np.asarray(candidates, dtype=float))
    grid = _Grid(K, delta, anchor)
    if grid.size > GREEDY_MAX_CELLS:
        raise BudgetExceeded(f"{grid.size} grid cells exceed the greedy budget of {GREEDY_MAX_CELLS}")
    cells = grid.relevant_centres()
    reach = 1.0 - grid.half_diag
    cover = np.stack([np.linalg.norm(cells - c, axis=1) <= reach for c in cand])

    uncovered = np.ones(len(cells), dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        gains = cover[:, uncovered].sum(axis=1)
        best = int(np.argmax(gains))
        if gains[best] == 0:
            break
        chosen.append(best)
        uncovered &= ~cover[best]

    if not uncovered.any() and len(chosen) > 1:
        smaller = _exact_refine(cover, len(chosen), exact_budget)
        if smaller is not None:
            chosen = smaller
    centers = cand[chosen] if chosen else np.empty((0, K.dim))
    cert = verify_covering(K, centers, delta, grid.anchor)
    n_up = len(centers) if cert.certified else None
    return n_up, centers, cert


def packing_lower(K: Polytope, stream: RngStream | None = None, rounds: int = 32, pool_size: int = 512,
                  tau: float = TAU):
    """Greedy farthest-point packing with separation > 2, best of ``rounds`` restarts."""
    stream = stream or RngStream(0)
    rng = stream.spawn("packing").generator()
    pool = np.vstack([_vertices(K), sample_body(K, pool_size, rng)])
    best: list[int] = [0]
    for r in range(rounds):
        start = 0 if r == 0 else int(rng.integers(len(pool)))
        chosen = [start]
        mind = np.linalg.norm(pool - pool[start], axis=1)
        while True:
            j = int(np.argmax(mind))
            if mind[j] <= 2.0 + tau:
                break
            chosen.append(j)
            mind = np.minimum(mind, np.linalg.norm(pool - pool[j], axis=1))
        if len(chosen) > len(best):
            best = chosen
    return len(best), PackingWitness(pool[best])


def covering_number_bounds(
    K: Polytope,
    delta: float | None = None,
    stream: RngStream | None = None,
    candidates=None,
    rounds: int = 32,
    anchor=None,
) -> CoveringBounds:
    stream = stream or RngStream(0)
    n_low, witness = packing_lower(K, stream, rounds)
    n_up, _, cert = greedy_cover_upper(K, delta, stream, candidates, anchor)
    notes = []
    if n_up is None:
        notes.append(f"upper bound not certified ({cert.status})")
    elif n_low < n_up:
        notes.append(f"gap between packing lower bound {n_low} and cover {n_up}")
    if n_up is not None and n_low > n_up:
        raise AssertionError("packing lower bound exceeds certified cover size")
    return CoveringBounds(n_low, n_up, cert, witness, notes)
