import math

import numpy as np
import pytest

from facetlab import covering as cov
from facetlab import polytope as pt
from facetlab.families import cube, random_hull, slab
from facetlab.rng import RngStream

SQUARE = pt.PolytopeV([[-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5], [0.5, 0.5]])
BIG_SQUARE = cube(2, 2.0)
SLAB2 = slab(2, 1.8, 0.1)
SLAB3 = slab(3, 1.8, 0.1)


def _covering_violations(K, centers, count=10_000, seed=0):
    pts = cov.sample_body(K, count, np.random.default_rng(seed))
    assert len(pts) == count
    d = np.min(np.linalg.norm(pts[:, None, :] - np.asarray(centers)[None], axis=2), axis=1)
    return int(np.sum(d > 1 + 1e-9))


# ------------------------------------------------------- verify_covering


def test_square_single_center_certified():
    cert = cov.verify_covering(SQUARE, [[0.0, 0.0]], 0.05)
    assert cert.status == cov.CERTIFIED
    assert cert.margin == pytest.approx(0.05 * math.sqrt(2) / 2)
    # analytic check: half-diagonal 0.707 plus margin stays below 1
    assert math.sqrt(0.5) <= 1 - cert.margin


def test_square_far_center_refuted():
    cert = cov.verify_covering(SQUARE, [[2.0, 0.0]], 0.05)
    assert cert.status == cov.REFUTED
    np.testing.assert_allclose(cert.witness[0], -0.5, atol=0.05)
    assert abs(abs(cert.witness[1]) - 0.5) < 0.05
    assert np.all(pt.contains(SQUARE, cert.witness))
    assert np.linalg.norm(cert.witness - [2.0, 0.0]) > 1


def test_slab_two_centres_certified():
    cert = cov.verify_covering(SLAB2, [[0.9, 0.0], [-0.9, 0.0]], 0.02)
    assert cert.certified
    # worst point (0, 0.1) is at distance sqrt(0.82) from both centres
    assert math.sqrt(0.81 + 0.01) <= 1 - cert.margin


def test_inconclusive_when_margin_too_large():
    # the unit disk's own boundary cannot be certified with a positive margin
    disk = random_hull(2, 64, 0, 1.0)
    cert = cov.verify_covering(disk, [[0.0, 0.0]], 0.05)
    assert cert.status == cov.INCONCLUSIVE


def test_budget_exceeded():
    with pytest.raises(pt.BudgetExceeded):
        cov.verify_covering(cube(3, 10.0), [[0, 0, 0]], 1e-3)


@pytest.mark.parametrize("K, centers", [
    (SQUARE, [[0.0, 0.0]]),
    (SLAB2, [[0.9, 0.0], [-0.9, 0.0]]),
    (SLAB3, [[0.9, 0.0, 0.0], [-0.9, 0.0, 0.0]]),
])
def test_certificate_soundness(K, centers):
    cert = cov.verify_covering(K, centers, 0.02)
    assert cert.certified
    assert _covering_violations(K, centers) == 0


# --------------------------------------------------------------- greedy


def test_greedy_single_ball():
    n_up, centers, cert = cov.greedy_cover_upper(SQUARE, 0.05, RngStream(1))
    assert n_up == 1 and cert.certified


def test_greedy_slab_finds_two():
    n_up, centers, cert = cov.greedy_cover_upper(SLAB2, 0.02, RngStream(1))
    assert n_up == 2 and cert.certified
    xs = sorted(centers[:, 0])
    assert xs[0] == pytest.approx(-0.9, abs=0.3) and xs[1] == pytest.approx(0.9, abs=0.3)
    assert _covering_violations(SLAB2, centers) == 0


def test_greedy_ties_go_to_lowest_index():
    cands = np.array([[0.0, 0.0], [0.0, 0.0], [0.1, 0.0]])
    n_up, centers, _ = cov.greedy_cover_upper(SQUARE, 0.05, candidates=cands)
    assert n_up == 1
    np.testing.assert_array_equal(centers, [[0.0, 0.0]])


def test_greedy_reports_partial_cover():
    n_up, centers, cert = cov.greedy_cover_upper(SLAB2, 0.02, candidates=[[5.0, 5.0]])
    assert n_up is None and cert.status != cov.CERTIFIED


def test_greedy_monotone_under_inclusion():
    K = SLAB2
    K_small = slab(2, 1.0, 0.1)
    cands = cov.default_candidates(K, RngStream(2))
    anchor = [-1.8, -0.1]
    big, _, _ = cov.greedy_cover_upper(K, 0.02, candidates=cands, anchor=anchor)
    small, _, _ = cov.greedy_cover_upper(K_small, 0.02, candidates=cands, anchor=anchor)
    assert small <= big


# -------------------------------------------------------------- packing


def test_packing_inside_ball_is_one():
    n_low, w = cov.packing_lower(random_hull(3, 30, 1, 1.0), RngStream(0))
    assert n_low == 1


def test_packing_big_square_corners():
    n_low, w = cov.packing_lower(BIG_SQUARE, RngStream(0))
    assert n_low >= 4
    d = np.linalg.norm(w.points[:, None] - w.points[None], axis=2)
    assert np.all(d[np.triu_indices(len(w), 1)] > 2)
    assert np.all(pt.contains(BIG_SQUARE, w.points))


def test_packing_slab_endpoints():
    n_low, w = cov.packing_lower(SLAB2, RngStream(0))
    assert n_low == 2
    assert abs(w.points[0, 0] - w.points[1, 0]) > 2


# --------------------------------------------------------------- bounds


@pytest.mark.parametrize("K, expected", [(SQUARE, (1, 1)), (SLAB2, (2, 2)), (SLAB3, (2, 2))])
def test_bounds_exact(K, expected):
    b = cov.covering_number_bounds(K, stream=RngStream(0))
    assert (b.n_low, b.n_up) == expected
    assert b.certificate.certified


def test_bounds_big_square_gap_reported():
    b = cov.covering_number_bounds(BIG_SQUARE, stream=RngStream(0))
    assert b.n_low >= 4
    assert b.n_up is not None and b.n_low <= b.n_up
    if b.n_low < b.n_up:
        assert any("gap" in note for note in b.notes)
    d = b.to_dict()
    assert set(d) >= {"n_low", "n_up", "centers", "grid_delta", "status"}


@pytest.mark.parametrize("K", [SQUARE, SLAB2, BIG_SQUARE, cube(3, 0.8), random_hull(3, 40, 2, 1.4)],
                         ids=["square", "slab", "big-square", "cube3", "hull3"])
def test_low_le_up(K):
    b = cov.covering_number_bounds(K, stream=RngStream(3))
    assert b.n_up is None or b.n_low <= b.n_up


def test_translation_invariance():
    shift = np.array([3.3, -1.7])
    K = SLAB2
    cands = cov.default_candidates(K, RngStream(4))
    a = cov.covering_number_bounds(K, stream=RngStream(4), candidates=cands)
    b = cov.covering_number_bounds(pt.translate(K, shift), stream=RngStream(4), candidates=cands + shift)
    assert (a.n_low, a.n_up) == (b.n_low, b.n_up)
