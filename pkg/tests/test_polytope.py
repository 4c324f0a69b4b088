import itertools
import math

import numpy as np
import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from facetlab import polytope as pt
from facetlab.families import cross_polytope, cube, random_hull, regular_simplex, slab

from conftest import unit


def brute_force_facets(points):
    """Hyperplanes through affinely independent n-subsets with all points on one side."""
    n = points.shape[1]
    found = []
    for combo in itertools.combinations(range(len(points)), n):
        sub = points[list(combo)]
        diffs = sub[1:] - sub[0]
        if np.linalg.matrix_rank(diffs) < n - 1:
            continue
        normal = np.linalg.svd(diffs)[2][-1]
        offset = normal @ sub[0]
        side = points @ normal - offset
        if np.all(side <= 1e-9):
            pass
        elif np.all(side >= -1e-9):
            normal, offset = -normal, -offset
        else:
            continue
        key = tuple(np.round(np.append(normal, offset), 8))
        found.append(key)
    return sorted(set(found))


# ----------------------------------------------------------- enumeration


def test_cube3_facets():
    facets = cube(3).facets
    assert len(facets) == 6
    normals = sorted(tuple(np.round(f.normal, 12)) for f in facets)
    expected = sorted(tuple(s * e) for e in np.eye(3) for s in (1.0, -1.0))
    np.testing.assert_allclose(normals, expected, atol=1e-12)
    assert all(abs(f.offset - 1.0) < 1e-12 for f in facets)
    assert all(len(f.incident_vertices) == 4 for f in facets)


def test_simplex4_has_five_facets():
    pts = np.vstack([np.zeros(4), np.eye(4)])
    assert len(pt.PolytopeV(pts).facets) == 5


def test_cross4_matches_brute_force_oracle():
    P = cross_polytope(4)
    oracle = brute_force_facets(np.asarray(P.vertices))
    assert len(oracle) == 16
    got = sorted(tuple(np.round(np.append(f.normal, f.offset), 8)) for f in P.facets)
    np.testing.assert_allclose(got, oracle, atol=1e-8)
    for f in P.facets:
        np.testing.assert_allclose(np.abs(f.normal), 0.5, atol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_scan_and_qhull_agree(seed):
    P = random_hull(4, 18, seed)
    scan = pt.facet_enumeration(P, method="scan")
    hull = pt.facet_enumeration(P, method="qhull")
    assert len(scan) == len(hull)
    for f, g in zip(scan, hull):
        np.testing.assert_allclose(f.normal, g.normal, atol=1e-9)
        assert f.incident_vertices == g.incident_vertices


def test_random_hull_matches_brute_force_oracle():
    P = random_hull(3, 14, 5)
    oracle = brute_force_facets(np.asarray(P.vertices))
    got = sorted(tuple(np.round(np.append(f.normal, f.offset), 8)) for f in P.facets)
    np.testing.assert_allclose(got, oracle, atol=1e-7)


def test_flat_input_rejected():
    pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]
    with pytest.raises(pt.NotFullDimensional):
        pt.PolytopeV(pts).facets


def test_budget_exceeded_for_scan():
    P = random_hull(3, 30, 0)
    with pytest.raises(pt.BudgetExceeded):
        pt.facet_enumeration(P, method="scan", budget=100)
    assert len(pt.facet_enumeration(P, budget=100)) == len(pt.facet_enumeration(P))


def test_duplicates_and_interior_points_are_dropped():
    base = np.asarray(cube(3).vertices)
    pts = np.vstack([base, base[:3], np.zeros((1, 3)), [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]])
    P = pt.PolytopeV(pts)
    assert len(P.facets) == 6
    assert len(P.extreme_points) == 8
    incident = {i for f in P.facets for i in f.incident_vertices}
    assert incident == set(range(8))


def test_facets_sorted_by_normal():
    normals = [tuple(f.normal) for f in cross_polytope(3).facets]
    assert normals == sorted(normals)


# ------------------------------------------------------------ functionals


def test_support_examples():
    C = cube(3)
    assert pt.support(C, [1.0, 0.0, 0.0]) == pytest.approx(1.0)
    th = unit([0.3, -0.5, 0.8])
    assert pt.support(C, th) == pytest.approx(np.abs(th).sum())
    assert pt.support(pt.PolytopeV([[2, 0], [0, 1], [-1, -1]]), [1.0, 0.0]) == pytest.approx(2.0)


def test_support_h_rep_uses_lp():
    H = cube(3).h
    th = unit([1.0, 2.0, -2.0])
    assert pt.support(H, th) == pytest.approx(np.abs(th).sum(), abs=1e-9)


def test_support_dimension_mismatch():
    with pytest.raises(pt.DimensionMismatch):
        pt.support(cube(3), [1.0, 0.0])


def test_radial_examples():
    assert pt.radial(cube(3), unit([1, 1, 1])) == pytest.approx(math.sqrt(3), abs=1e-12)
    assert pt.radial(cross_polytope(3), [1.0, 0.0, 0.0]) == pytest.approx(1.0)
    # gauge oracle: l1 norm of theta
    assert pt.radial(cross_polytope(3), unit([1, 1, 1])) == pytest.approx(1 / math.sqrt(3), abs=1e-12)


def test_gauge_examples():
    assert pt.gauge(cube(3), [0.5, 0, 0]) == pytest.approx(0.5)
    assert pt.gauge(cube(3), [0, 0, 0]) == 0.0
    assert pt.gauge(cross_polytope(3), [0.2, 0.2, 0.2]) == pytest.approx(0.6)


def test_origin_not_interior():
    P = pt.PolytopeV([[0, 0], [1, 0], [0, 1]])
    with pytest.raises(pt.OriginNotInterior):
        pt.radial(P, [1.0, 0.0])
    with pytest.raises(pt.OriginNotInterior):
        pt.gauge(P, [0.1, 0.1])
    assert pt.inradius_at_origin(P) <= 0


def test_inradius_examples():
    assert pt.inradius_at_origin(cube(3)) == pytest.approx(1.0)
    assert pt.inradius_at_origin(cross_polytope(3)) == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert pt.inradius_at_origin(pt.scale(cube(3), 2.0)) == pytest.approx(2.0)


def test_inradius_matches_support_minimum_oracle():
    # rB inside P iff h_P >= r everywhere, so the inradius is the minimum of the support function
    P = random_hull(3, 40, 3)
    dirs = np.random.default_rng(0).standard_normal((200_000, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    h = np.asarray(P.vertices) @ dirs.T
    sampled_min = h.max(axis=0).min()
    r = pt.inradius_at_origin(P)
    assert r <= sampled_min + 1e-12
    assert sampled_min - r < 5e-3


def test_circumradius_examples(rng):
    assert pt.circumradius_at_origin(cube(3)) == pytest.approx(math.sqrt(3))
    assert pt.circumradius_at_origin(cross_polytope(4)) == pytest.approx(1.0)
    assert pt.circumradius_at_origin(random_hull(3, 30, 1)) == pytest.approx(1.0, abs=1e-9)


def test_polar_dual_cube_is_cross():
    D = pt.polar_dual(cube(3))
    assert isinstance(D, pt.PolytopeH)
    verts = sorted(map(tuple, np.round(D.vertices, 12)))
    expected = sorted(tuple(s * e) for e in np.eye(3) for s in (1.0, -1.0))
    np.testing.assert_allclose(verts, expected, atol=1e-12)


def test_polar_dual_cross4_is_cube4():
    P = cross_polytope(4)
    D = pt.polar_dual(P)
    assert len(D.vertices) == 16 == len(P.facets)
    np.testing.assert_allclose(np.abs(D.vertices), 1.0, atol=1e-12)


def test_polar_of_scaled_is_inverse_scaled():
    P = random_hull(3, 25, 4)
    lhs = pt.polar_dual(pt.scale(P, 2.5))
    rhs = pt.scale(pt.polar_dual(P), 1 / 2.5)
    np.testing.assert_allclose(lhs.normals, rhs.normals)
    np.testing.assert_allclose(lhs.offsets, rhs.offsets)


@pytest.mark.parametrize("P", [cube(3), cross_polytope(4), regular_simplex(4), random_hull(3, 20, 8)],
                         ids=["cube3", "cross4", "simplex4", "hull3"])
def test_duality_counts(P):
    D = pt.polar_dual(P)
    assert len(D.vertices) == len(P.facets)
    D_v = pt.PolytopeV(D.vertices)
    assert len(D_v.facets) == len(P.extreme_points)


def test_facet_at_direction_examples():
    C = cube(3)
    f = pt.facet_at_direction(C, unit([3, 1, 1]))
    np.testing.assert_allclose(f.normal, [1, 0, 0])
    th = unit([1, 1, 1])
    idx = pt.facet_index_at_direction(C, th)
    tying = [i for i, g in enumerate(C.facets) if g.normal @ th > 0]
    assert idx == min(tying)


def test_facet_at_direction_simplex_centroid():
    S = regular_simplex(4)
    for k, f in enumerate(S.facets):
        centroid = S.vertices[list(f.incident_vertices)].mean(axis=0)
        assert pt.facet_index_at_direction(S, unit(centroid)) == k


def test_halfspace_normalisation():
    h = pt.HalfSpace.normalized([3.0, 4.0], 10.0)
    np.testing.assert_allclose(h.normal, [0.6, 0.8])
    assert h.offset == pytest.approx(2.0)
    with pytest.raises(pt.GeometryError):
        pt.HalfSpace([3.0, 4.0], 1.0)
    H = pt.PolytopeH([[2, 0], [-1, 0], [0, 5], [0, -1], [0, 10]], [2, 1, 5, 1, 10])
    assert len(H.offsets) == 4
    np.testing.assert_allclose(H.offsets, [1, 1, 1, 1])


def test_unbounded_h_rep():
    H = pt.PolytopeH([[1, 0], [0, 1]], [1, 1])
    assert not pt.is_bounded(H)
    with pytest.raises(pt.GeometryError):
        H.vertices


def test_json_round_trip(tmp_path):
    P = random_hull(3, 10, 2)
    path = tmp_path / "p.json"
    import json

    path.write_text(json.dumps(pt.polytope_to_dict(P)))
    Q = pt.load_polytope(path)
    np.testing.assert_array_equal(Q.vertices, P.vertices)
    H = pt.polytope_from_dict(pt.polytope_to_dict(P.h))
    np.testing.assert_allclose(H.offsets, P.h.offsets)
    with pytest.raises(pt.DimensionMismatch):
        pt.polytope_from_dict({"dim": 4, "vertices": [[0, 1, 2]]})
    with pytest.raises(pt.GeometryError):
        pt.polytope_from_dict({"dim": 2})


# ------------------------------------------------------------- properties

BODIES = {
    "cube3": cube(3),
    "cross4": cross_polytope(4),
    "simplex3": regular_simplex(3),
    "slab3": slab(3),
    "hull4": random_hull(4, 20, 11),
}


@given(name=st.sampled_from(sorted(BODIES)), seed=st.integers(0, 2**32 - 1))
def test_gauge_times_radial_is_one(name, seed):
    P = BODIES[name]
    th = unit(np.random.default_rng(seed).standard_normal(P.dim))
    assert pt.gauge(P, th) * pt.radial(P, th) == pytest.approx(1.0, abs=1e-8)


@given(name=st.sampled_from(sorted(BODIES)), seed=st.integers(0, 2**32 - 1))
def test_radial_between_in_and_circumradius(name, seed):
    P = BODIES[name]
    th = unit(np.random.default_rng(seed).standard_normal(P.dim))
    rho = pt.radial(P, th)
    assert pt.inradius_at_origin(P) - 1e-9 <= rho <= pt.circumradius_at_origin(P) + 1e-9


@given(name=st.sampled_from(sorted(BODIES)), seed=st.integers(0, 2**32 - 1))
def test_facet_at_direction_contains_boundary_point(name, seed):
    P = BODIES[name]
    th = unit(np.random.default_rng(seed).standard_normal(P.dim))
    f = pt.facet_at_direction(P, th)
    assert f.normal @ (pt.radial(P, th) * th) == pytest.approx(f.offset, abs=1e-8)


@pytest.mark.parametrize("name", sorted(BODIES))
def test_outwardness(name):
    P = BODIES[name]
    for f in P.facets:
        assert np.all(P.vertices @ f.normal <= f.offset + 1e-9)
        assert abs(np.linalg.norm(f.normal) - 1) < 1e-12


@pytest.mark.parametrize("name", sorted(BODIES))
def test_round_trip_recovers_extreme_points(name):
    P = BODIES[name]
    back = pt.vertex_enumeration(P.h)
    ext = np.asarray(P.extreme_points)
    ext = ext[np.lexsort(np.round(ext, 9).T[::-1])]
    np.testing.assert_allclose(back, ext, atol=1e-9)


@given(seed=st.integers(0, 2**32 - 1), m=st.integers(8, 20), n=st.integers(2, 5))
@example(seed=101247, m=14, n=5)  # origin outside the hull, qhull path
def test_random_hull_round_trip(seed, m, n):
    pts = np.random.default_rng(seed).standard_normal((m, n))
    P = pt.PolytopeV(pts)
    back = pt.vertex_enumeration(P.h)
    ext = np.asarray(P.extreme_points)
    assert len(back) == len(ext)
    d = np.linalg.norm(back[:, None, :] - ext[None, :, :], axis=2)
    assert np.all(d.min(axis=1) < 1e-8)
