"""Polytopes in V- and H-representation.

Facets are enumerated by an exhaustive scan over n-subsets of the vertices
while ``binomial(m, n)`` stays within :data:`ENUMERATION_BUDGET`.  Above the
budget, qhull proposes candidate hyperplanes and every candidate is re-checked
with the same incidence and side predicates the scan uses.

All functionals are taken about the origin: the inradius is the largest ``r``
with ``r*B`` inside the polytope, not the Chebyshev radius.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError, cKDTree

TAU = 1e-9
MERGE_TOL = 1e-8
ENUMERATION_BUDGET = 10**7
_CHUNK_ENTRIES = 2_000_000


class GeometryError(ValueError):
    pass


class NotFullDimensional(GeometryError):
    pass


class BudgetExceeded(GeometryError):
    pass


class OriginNotInterior(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The set ``{x : <normal, x> <= offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        a = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(a) - 1.0) > TAU:
            raise GeometryError("halfspace normal must be a unit vector; use HalfSpace.normalized")
        object.__setattr__(self, "normal", a)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def normalized(cls, normal, offset) -> "HalfSpace":
        a = np.asarray(normal, dtype=float)
        length = np.linalg.norm(a)
        if not np.isfinite(length) or length == 0:
            raise GeometryError("halfspace normal must be finite and nonzero")
        return cls(a / length, float(offset) / length)


@dataclass(frozen=True, eq=False)
class Facet:
    halfspace: HalfSpace
    incident_vertices: tuple[int, ...]

    @property
    def normal(self) -> np.ndarray:
        return self.halfspace.normal

    @property
    def offset(self) -> float:
        return self.halfspace.offset


def _as_points(points) -> np.ndarray:
    pts = np.array(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise GeometryError("expected a non-empty (m, n) array of points")
    if pts.shape[1] < 2:
        raise GeometryError("dimension must be at least 2")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("point coordinates must be finite")
    pts.setflags(write=False)
    return pts


class PolytopeV:
    """``conv(vertices)``.  Duplicate and non-extreme points are tolerated."""

    def __init__(self, vertices):
        self.vertices = _as_points(vertices)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def __repr__(self):
        return f"PolytopeV(dim={self.dim}, points={len(self.vertices)})"

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        return tuple(facet_enumeration(self))

    @cached_property
    def h(self) -> "PolytopeH":
        facets = self.facets
        return PolytopeH(
            np.array([f.normal for f in facets]), np.array([f.offset for f in facets])
        )

    @cached_property
    def extreme_points(self) -> np.ndarray:
        idx = sorted({i for f in self.facets for i in f.incident_vertices})
        return self.vertices[idx]


class PolytopeH:
    """``{x : A x <= b}``; normals are rescaled to unit length on ingest."""

    def __init__(self, normals, offsets):
        a = np.array(normals, dtype=float)
        b = np.array(offsets, dtype=float).reshape(-1)
        if a.ndim != 2 or a.shape[0] != b.shape[0] or a.shape[0] == 0:
            raise GeometryError("normals must be (k, n) and offsets (k,)")
        if a.shape[1] < 2:
            raise GeometryError("dimension must be at least 2")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise GeometryError("halfspace data must be finite")
        lengths = np.linalg.norm(a, axis=1)
        if np.any(lengths == 0):
            raise GeometryError("zero normal in halfspace list")
        a, b = a / lengths[:, None], b / lengths
        keep = _dedupe_rows(np.hstack([a, b[:, None]]), MERGE_TOL)
        self.normals, self.offsets = a[keep], b[keep]
        self.normals.setflags(write=False)
        self.offsets.setflags(write=False)

    @classmethod
    def from_halfspaces(cls, halfspaces: Sequence[HalfSpace]) -> "PolytopeH":
        return cls([h.normal for h in halfspaces], [h.offset for h in halfspaces])

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def halfspaces(self) -> list[HalfSpace]:
        return [HalfSpace(a, b) for a, b in zip(self.normals, self.offsets)]

    def __repr__(self):
        return f"PolytopeH(dim={self.dim}, halfspaces={len(self.offsets)})"

    @cached_property
    def vertices(self) -> np.ndarray:
        return vertex_enumeration(self)

    @cached_property
    def facets(self) -> tuple[Facet, ...]:
        """Irredundant halfspaces, with incidences into :attr:`vertices`."""
        verts = self.vertices
        tol = _tol(verts)
        out = []
        for a, b in zip(self.normals, self.offsets):
            inc = np.flatnonzero(np.abs(verts @ a - b) <= tol)
            if len(inc) >= self.dim and _affine_rank(verts[inc]) == self.dim - 1:
                out.append(Facet(HalfSpace(a, b), tuple(int(i) for i in inc)))
        return tuple(out)


Polytope = Union[PolytopeV, PolytopeH]


# ---------------------------------------------------------------- helpers


def _tol(points: np.ndarray, tau: float = TAU) -> float:
    scale = float(np.max(np.abs(points))) if points.size else 1.0
    return tau * max(1.0, scale)


def _affine_rank(points: np.ndarray, rtol: float = 1e-9) -> int:
    if len(points) <= 1:
        return 0
    diffs = points[1:] - points[0]
    s = np.linalg.svd(diffs, compute_uv=False)
    scale = max(1.0, float(np.max(np.abs(points))))
    return int(np.sum(s > rtol * scale))


def _dedupe_rows(rows: np.ndarray, tol: float) -> np.ndarray:
    """Indices of the first row of each cluster of rows equal within ``tol`` (max-norm)."""
    if len(rows) <= 1:
        return np.arange(len(rows))
    # collapse near-exact repeats first; the pair search is quadratic in cluster size
    _, first = np.unique(np.round(rows / tol).astype(np.int64), axis=0, return_index=True)
    first = np.sort(first)
    if len(first) < len(rows):
        return first[_dedupe_rows(rows[first], tol)]
    tree = cKDTree(rows)
    pairs = tree.query_pairs(tol, p=np.inf, output_type="ndarray")
    parent = np.arange(len(rows))
    for i, j in sorted(map(tuple, pairs)):
        ri, rj = parent[i], parent[j]
        while parent[ri] != ri:
            ri = parent[ri]
        while parent[rj] != rj:
            rj = parent[rj]
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = []
    for i in range(len(rows)):
        r = i
        while parent[r] != r:
            r = parent[r]
        roots.append(r)
    return np.unique(roots)


def _canonical_order(normals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    keys = np.round(np.hstack([normals, offsets[:, None]]), 9)
    return np.lexsort(keys.T[::-1])


def _check_full_dimensional(points: np.ndarray):
    if len(points) <= points.shape[1] or _affine_rank(points) < points.shape[1]:
        raise NotFullDimensional(
            f"points span an affine subspace of dimension < {points.shape[1]}"
        )


def _combination_chunks(m: int, k: int, chunk: int):
    it = itertools.combinations(range(m), k)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


# ------------------------------------------------------ facet enumeration


def _generalized_cross(diffs: np.ndarray) -> np.ndarray:
    """Vector orthogonal to the n-1 rows of each (n-1, n) matrix; zero iff rank-deficient."""
    n = diffs.shape[-1]
    out = np.empty(diffs.shape[:-2] + (n,))
    cols = np.arange(n)
    for i in range(n):
        minor = diffs[..., cols != i]
        out[..., i] = (-1) ** i * (np.linalg.det(minor) if n > 1 else 1.0)
    return out


def _scan_hyperplanes(pts: np.ndarray, tol: float):
    m, n = pts.shape
    chunk = max(1, _CHUNK_ENTRIES // max(m, n * n))
    normals, offsets = [], []
    for combos in _combination_chunks(m, n, chunk):
        sub = pts[combos]
        cross = _generalized_cross(sub[:, 1:, :] - sub[:, :1, :])
        length = np.linalg.norm(cross, axis=1)
        ok = length > tol
        if not np.any(ok):
            continue
        a = cross[ok] / length[ok, None]
        b = np.einsum("kn,kn->k", a, sub[ok, 0, :])
        side = pts @ a.T - b
        pos = np.all(side <= tol, axis=0)
        neg = np.all(side >= -tol, axis=0)
        a[neg & ~pos] *= -1
        b[neg & ~pos] *= -1
        keep = pos | neg
        if np.any(keep):
            rows = np.hstack([a[keep], b[keep, None]])
            rows = rows[_dedupe_rows(rows, MERGE_TOL)]
            normals.append(rows[:, :-1])
            offsets.append(rows[:, -1])
    if not normals:
        return np.empty((0, n)), np.empty(0)
    return np.vstack(normals), np.concatenate(offsets)


def _qhull_hyperplanes(pts: np.ndarray, tol: float):
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise NotFullDimensional(str(exc)) from exc
    a = hull.equations[:, :-1]
    a = a / np.linalg.norm(a, axis=1)[:, None]
    b = -hull.equations[:, -1] / np.linalg.norm(hull.equations[:, :-1], axis=1)
    side = pts @ a.T - b
    # qhull offsets are re-fitted below from the incident points; only keep
    # hyperplanes that are genuinely supporting
    refined_a, refined_b = [], []
    for k in range(len(b)):
        inc = np.flatnonzero(np.abs(side[:, k]) <= 1e3 * tol)
        if len(inc) < pts.shape[1]:
            continue
        centred = pts[inc] - pts[inc].mean(axis=0)
        _, s, vh = np.linalg.svd(centred)
        normal = vh[-1]
        if normal @ a[k] < 0:
            normal = -normal
        refined_a.append(normal)
        refined_b.append(float(np.max(pts[inc] @ normal)))
    a, b = np.array(refined_a), np.array(refined_b)
    return a, b


def facet_enumeration(
    P: PolytopeV,
    tau: float = TAU,
    budget: int = ENUMERATION_BUDGET,
    method: str = "auto",
) -> list[Facet]:
    """All facets of ``conv(P.vertices)``, sorted lexicographically by normal.

    ``method`` is ``"scan"`` (exhaustive n-subsets, raises
    :class:`BudgetExceeded` past ``budget``), ``"qhull"`` or ``"auto"``.
    Incident vertex indices refer to ``P.vertices`` and only include
    extreme points (the first copy of a duplicated point).
    """
    if method not in ("auto", "scan", "qhull"):
        raise ValueError(f"unknown facet enumeration method {method!r}")
    pts_all = P.vertices
    n = P.dim
    tol = _tol(pts_all, tau)
    uniq = _dedupe_rows(pts_all, tol)
    pts = pts_all[uniq]
    _check_full_dimensional(pts)

    too_big = math.comb(len(pts), n) > budget
    if method == "scan" and too_big:
        raise BudgetExceeded(
            f"binomial({len(pts)}, {n}) = {math.comb(len(pts), n)} exceeds budget {budget}"
        )
    if method == "qhull" or (method == "auto" and too_big):
        a, b = _qhull_hyperplanes(pts, tol)
    else:
        a, b = _scan_hyperplanes(pts, tol)

    # common acceptance predicate for both candidate sources
    side = pts @ a.T - b
    supporting = np.all(side <= tol, axis=0)
    a, b, side = a[supporting], b[supporting], side[:, supporting]
    incident = np.abs(side) <= tol
    spans = np.array(
        [_affine_rank(pts[incident[:, k]]) == n - 1 for k in range(len(b))], dtype=bool
    )
    a, b, incident = a[spans], b[spans], incident[:, spans]
    keep = _dedupe_rows(np.hstack([a, b[:, None]]), MERGE_TOL)
    a, b, incident = a[keep], b[keep], incident[:, keep]

    # a point is extreme iff the normals of its facets span R^n
    extreme = np.array(
        [np.linalg.matrix_rank(a[incident[i]], tol=1e-8) == n if incident[i].any() else False
         for i in range(len(pts))]
    )
    order = _canonical_order(a, b)
    facets = []
    for k in order:
        inc = tuple(int(uniq[i]) for i in np.flatnonzero(incident[:, k] & extreme))
        facets.append(Facet(HalfSpace(a[k] / np.linalg.norm(a[k]) + 0.0, b[k]), inc))
    return facets


def vertex_enumeration(
    H: PolytopeH, tau: float = TAU, budget: int = ENUMERATION_BUDGET, method: str = "auto"
) -> np.ndarray:
    """Vertices of ``{x : A x <= b}`` by scanning n-subsets of halfspaces.

    Above the budget, qhull's halfspace intersection is used, seeded at the
    origin or at the Chebyshev centre when the origin is not interior; its
    points are validated the same way.
    """
    A, b = H.normals, H.offsets
    n = H.dim
    if not is_bounded(H):
        raise GeometryError("halfspace system is unbounded")
    tol = tau * max(1.0, float(np.max(np.abs(b))))
    too_big = math.comb(len(b), n) > budget
    if method == "scan" and too_big:
        raise BudgetExceeded(f"binomial({len(b)}, {n}) exceeds budget {budget}")
    if method == "qhull" or (method == "auto" and too_big):
        seed = np.zeros(n)
        if not np.all(b > tol):
            seed, depth = _chebyshev_center(A, b)
            if depth <= tol:
                raise NotFullDimensional("halfspace system has empty interior")
        hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), seed)
        cands = hs.intersections
    else:
        found = []
        chunk = max(1, _CHUNK_ENTRIES // max(len(b), n * n))
        for combos in _combination_chunks(len(b), n, chunk):
            M = A[combos]
            s = np.linalg.svd(M, compute_uv=False)
            ok = s[:, -1] > 1e-10 * s[:, 0]
            if not np.any(ok):
                continue
            x = np.linalg.solve(M[ok], b[combos[ok]][..., None])[..., 0]
            feasible = np.all(x @ A.T <= b + tol, axis=1)
            found.append(x[feasible])
        cands = np.vstack(found) if found else np.empty((0, n))
    cands = cands[np.all(cands @ A.T <= b + 1e3 * tol, axis=1)]
    if len(cands) == 0:
        raise NotFullDimensional("halfspace system has no vertices")
    cands = cands[_dedupe_rows(cands, 1e3 * tol)]
    # keep only points lying on n independent constraints
    active = np.abs(cands @ A.T - b) <= 1e3 * tol
    ok = [np.linalg.matrix_rank(A[active[i]], tol=1e-8) == n for i in range(len(cands))]
    verts = cands[np.array(ok, dtype=bool)]
    return verts[np.lexsort(np.round(verts, 9).T[::-1])]


def _chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    """Centre and radius of the largest ball inside ``{x : A x <= b}`` (unit rows)."""
    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, np.ones((len(b), 1))]), b_ub=b,
                  bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        raise GeometryError(f"Chebyshev centre LP failed: {res.message}")
    return res.x[:n], float(res.x[-1])


def is_bounded(H: PolytopeH) -> bool:
    n = H.dim
    for sign in (1.0, -1.0):
        for i in range(n):
            c = np.zeros(n)
            c[i] = -sign
            res = linprog(c, A_ub=H.normals, b_ub=H.offsets, bounds=[(None, None)] * n, method="highs")
            if res.status == 3:
                return False
            if res.status == 2:
                raise GeometryError("halfspace system is infeasible")
    return True


# ----------------------------------------------------------- functionals


def _as_h(P: Polytope) -> PolytopeH:
    return P.h if isinstance(P, PolytopeV) else P


def _as_v_points(P: Polytope) -> np.ndarray:
    return P.vertices


def _check_dim(P: Polytope, x: np.ndarray):
    if x.shape[-1] != P.dim:
        raise DimensionMismatch(f"expected dimension {P.dim}, got {x.shape[-1]}")


def _check_unit(theta: np.ndarray, tau: float):
    lengths = np.linalg.norm(theta, axis=-1)
    if np.any(np.abs(lengths - 1.0) > max(tau, 1e-9)):
        raise GeometryError("direction must be a unit vector")


def _require_origin_interior(H: PolytopeH, tau: float = TAU):
    r = float(np.min(H.offsets))
    if r <= tau:
        raise OriginNotInterior(f"inradius about the origin is {r:.3g}")


def support(P: Polytope, theta, tau: float = TAU):
    """``h_P(theta) = max_{x in P} <x, theta>``; accepts one or many directions."""
    theta = np.asarray(theta, dtype=float)
    _check_dim(P, theta)
    _check_unit(theta, tau)
    if isinstance(P, PolytopeV):
        vals = theta @ P.vertices.T
        return np.max(vals, axis=-1) if theta.ndim > 1 else float(np.max(vals))
    flat = np.atleast_2d(theta)
    out = np.empty(len(flat))
    for k, t in enumerate(flat):
        res = linprog(-t, A_ub=P.normals, b_ub=P.offsets, bounds=[(None, None)] * P.dim, method="highs")
        if res.status != 0:
            raise GeometryError(f"support LP failed: {res.message}")
        out[k] = -res.fun
    return out if theta.ndim > 1 else float(out[0])


def radial(P: Polytope, theta, tau: float = TAU):
    """``rho_P(theta) = max{t >= 0 : t*theta in P}`` for unit ``theta``."""
    theta = np.asarray(theta, dtype=float)
    _check_dim(P, theta)
    _check_unit(theta, tau)
    H = _as_h(P)
    _require_origin_interior(H, tau)
    proj = theta @ H.normals.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(proj > 0, H.offsets / proj, np.inf)
    out = np.min(ratio, axis=-1)
    return out if theta.ndim > 1 else float(out)


def gauge(P: Polytope, x, tau: float = TAU):
    """Minkowski functional ``||x||_P = inf{t >= 0 : x in tP}``."""
    x = np.asarray(x, dtype=float)
    _check_dim(P, x)
    H = _as_h(P)
    _require_origin_interior(H, tau)
    vals = np.max(x @ H.normals.T / H.offsets, axis=-1)
    out = np.maximum(vals, 0.0)
    return out if x.ndim > 1 else float(out)


def contains(P: Polytope, x, tau: float = TAU):
    """Membership by halfspace checks; works whether or not 0 is interior."""
    x = np.asarray(x, dtype=float)
    H = _as_h(P)
    slack = x @ H.normals.T - H.offsets
    return np.all(slack <= tau * max(1.0, float(np.max(np.abs(H.offsets)))), axis=-1)


def inradius_at_origin(P: Polytope) -> float:
    """Largest r with r*B inside P; non-positive when 0 is not interior."""
    return float(np.min(_as_h(P).offsets))


def circumradius_at_origin(P: Polytope) -> float:
    return float(np.max(np.linalg.norm(_as_v_points(P), axis=1)))


def polar_dual(P: Polytope, tau: float = TAU) -> Polytope:
    """``P° = {y : <x, y> <= 1 for x in P}``.

    A V-polytope maps to the H-polytope ``{<v, y> <= 1}``; an H-polytope maps
    to the V-polytope ``conv{a_i / b_i}``.
    """
    H = _as_h(P)
    _require_origin_interior(H, tau)
    if isinstance(P, PolytopeV):
        verts = P.extreme_points
        return PolytopeH(verts, np.ones(len(verts)))
    return PolytopeV(H.normals / H.offsets[:, None])


def scale(P: Polytope, s: float) -> Polytope:
    if not s > 0:
        raise ValueError("scale factor must be positive")
    if isinstance(P, PolytopeV):
        return PolytopeV(P.vertices * s)
    return PolytopeH(P.normals, P.offsets * s)


def translate(P: Polytope, shift) -> Polytope:
    shift = np.asarray(shift, dtype=float)
    _check_dim(P, shift)
    if isinstance(P, PolytopeV):
        return PolytopeV(P.vertices + shift)
    return PolytopeH(P.normals, P.offsets + P.normals @ shift)


def facets_of(P: Polytope) -> tuple[Facet, ...]:
    return P.facets


def facet_index_at_direction(P: Polytope, theta, tau: float = TAU):
    """Index into ``P.facets`` of the facet hit by the ray along ``theta``.

    Ties (ray through a ridge) go to the lowest index.
    """
    theta = np.asarray(theta, dtype=float)
    _check_dim(P, theta)
    _check_unit(theta, tau)
    H = _as_h(P)
    _require_origin_interior(H, tau)
    facets = P.facets
    A = np.array([f.normal for f in facets])
    b = np.array([f.offset for f in facets])
    proj = np.atleast_2d(theta) @ A.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(proj > 0, b / proj, np.inf)
    rho = np.min(ratio, axis=1, keepdims=True)
    idx = np.argmax(ratio <= rho * (1 + 10 * tau), axis=1)
    return idx if theta.ndim > 1 else int(idx[0])


def facet_at_direction(P: Polytope, theta, tau: float = TAU) -> Facet:
    return P.facets[facet_index_at_direction(P, theta, tau)]


# ------------------------------------------------------------------ io


def polytope_from_dict(doc: dict) -> Polytope:
    if "dim" not in doc:
        raise GeometryError("polytope document needs a 'dim' field")
    n = int(doc["dim"])
    if "vertices" in doc:
        P = PolytopeV(doc["vertices"])
    elif "halfspaces" in doc:
        hs = doc["halfspaces"]
        P = PolytopeH([h["normal"] for h in hs], [h["offset"] for h in hs])
    else:
        raise GeometryError("polytope document needs 'vertices' or 'halfspaces'")
    if P.dim != n:
        raise DimensionMismatch(f"declared dim {n} but data has dimension {P.dim}")
    return P


def polytope_to_dict(P: Polytope) -> dict:
    if isinstance(P, PolytopeV):
        return {"dim": P.dim, "vertices": P.vertices.tolist()}
    return {
        "dim": P.dim,
        "halfspaces": [{"normal": a.tolist(), "offset": float(b)} for a, b in zip(P.normals, P.offsets)],
    }


def load_polytope(path) -> Polytope:
    return polytope_from_dict(json.loads(Path(path).read_text()))
