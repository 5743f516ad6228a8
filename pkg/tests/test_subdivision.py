import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gpmirror.errors import BudgetExceeded, InfiniteVertexHeight, MpcpViolation, PreconditionViolation
from gpmirror.finitefield import field
from gpmirror.polytope import boundary_points, iota, mirror_potential
from gpmirror.subdivision import (bruteforce_smooth, factorize, fan_from_heights, find_smooth_member,
                                  lcm_lambda, mpcp_mpcs_check, newton_points, parse_height, polytope_volume,
                                  potential_heights, refining_heights, regular_subdivision, soundness_suite,
                                  tropical_smoothness)

LINE = [(0,), (1,), (2,)]
TRIANGLE2 = [(i, j) for i in range(3) for j in range(3 - i)]


def cell_sets(sub):
    return sorted(sorted(sub.points[i] for i in c.vertices) for c in sub.cells)


# -- small examples -----------------------------------------------------------

def test_line_examples():
    bent = tropical_smoothness(LINE, [0, 1, 0], char=2)
    assert cell_sets(bent.subdivision) == [[(0,), (2,)]]
    assert bent.verdict == "inconclusive"
    assert {r["reason"] for r in bent.reasons} >= {"meets_points_off_vertices"}

    split = tropical_smoothness(LINE, [1, 0, 1], char=2)
    assert cell_sets(split.subdivision) == [[(0,), (1,)], [(1,), (2,)]]
    assert split.verdict == "smooth"

    for hts in ([0, 0, 0], [0, None, 0], [0, "inf", 0]):
        sub = regular_subdivision(LINE, hts)
        assert cell_sets(sub) == [[(0,), (2,)]]
        assert sub.cells[0].extra_points == (1,)


def test_infinite_vertex_height():
    with pytest.raises(InfiniteVertexHeight):
        regular_subdivision(LINE, [None, 0, 0])


def test_height_parsing():
    assert parse_height("inf") is None and parse_height(None) is None
    assert parse_height(float("inf")) is None
    assert parse_height("3/2") == Fraction(3, 2)


def test_volume_divisible_by_characteristic():
    verdict = tropical_smoothness([(0,), (2,)], [0, 0], char=2)
    assert verdict.verdict == "inconclusive"
    assert verdict.reasons[0]["reason"] == "volume_divisible_by_char"
    assert tropical_smoothness([(0,), (2,)], [0, 0], char=3).verdict == "smooth"


def test_unimodular_triangulation_of_triangle():
    hts = [x * x + y * y + x * y for x, y in TRIANGLE2]
    sub = regular_subdivision(TRIANGLE2, hts)
    assert len(sub.cells) == 4
    assert all(sub.is_simplex(c) and c.volume == 1 for c in sub.cells)
    assert tropical_smoothness(TRIANGLE2, hts, char=2).smooth


def test_factorize_and_volume():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert polytope_volume(TRIANGLE2) == 4
    assert polytope_volume([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 3)]) == 3


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.data())
def test_lower_hull_certificates(size, data):
    pts = [(i, j) for i in range(size + 1) for j in range(size + 1 - i)]
    verts = {(0, 0), (size, 0), (0, size)}
    hts = [data.draw(st.integers(0, 4)) if p in verts else
           data.draw(st.one_of(st.none(), st.integers(0, 4))) for p in pts]
    sub = regular_subdivision(pts, hts)
    assert sub.total_volume == polytope_volume(pts)
    covered = set()
    for cell in sub.cells:
        for i, h in enumerate(sub.heights):
            if h is None:
                continue
            val = sub.functional_value(cell, i)
            assert val <= h
            assert (val == h) == (i in cell.points)
        covered.update(cell.vertices)
    assert {sub.points[i] for i in covered} >= verts


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=6, max_size=6), st.integers(1, 4), st.integers(-3, 3))
def test_affine_invariance(hts, scale, shift):
    a = regular_subdivision(TRIANGLE2, hts)
    moved = [scale * h + shift * x + 2 * y for h, (x, y) in zip(hts, TRIANGLE2)]
    b = regular_subdivision(TRIANGLE2, moved)
    assert cell_sets(a) == cell_sets(b)


# -- brute-force smoothness ---------------------------------------------------------

def test_bruteforce_small_examples():
    F2 = field(2)
    cube = bruteforce_smooth([((3, 0), 1)], F2)
    assert not cube.smooth and cube.witness == (0, 1)
    assert not bruteforce_smooth([((2, 0), 1), ((0, 2), 1)], F2).smooth
    assert bruteforce_smooth([((1, 1), 1)], F2).smooth
    assert bruteforce_smooth([((2, 0), 1), ((0, 2), 1)], field(3)).smooth
    # affine scan for non-homogeneous input: y - x^2 is smooth, (y - 1)^2 - x^3 has a cusp at (0, 1)
    assert bruteforce_smooth([((0, 1), 1), ((2, 0), -1)], field(3)).smooth
    cusp = bruteforce_smooth([((0, 2), 1), ((0, 1), -2), ((0, 0), 1), ((3, 0), -1)], field(5))
    assert cusp.witness == (0, 1)


def test_bruteforce_budget():
    with pytest.raises(BudgetExceeded):
        bruteforce_smooth([((1,) * 6, 1)], field(5), budget=100)
    with pytest.raises(PreconditionViolation):
        bruteforce_smooth([((1, 1), 0)], field(5))


def test_fermat_quintic_char5(quintic):
    P = boundary_points(quintic)
    terms = mirror_potential(quintic, P, 1)
    verdict = bruteforce_smooth(terms, field(5))
    assert verdict.verdict == "singular"
    assert sum(1 for x in verdict.witness if x == 0) >= 2
    pts, hts, verts = potential_heights(quintic, [1] * 5)
    assert len(pts) == len(newton_points(quintic)) == 126
    trop = tropical_smoothness(pts, hts, char=5, vertices=verts)
    assert trop.verdict == "inconclusive"
    assert "meets_points_off_vertices" in {r["reason"] for r in trop.reasons}


def test_hesse_cubic(cubic):
    # x^3 + y^3 + z^3 - xyz sits at psi = 1/3 of the Hesse pencil, singular iff psi^3 = 1
    terms = mirror_potential(cubic, boundary_points(cubic), 1)
    assert bruteforce_smooth(terms, field(5)).smooth
    assert bruteforce_smooth(terms, field(7)).smooth
    assert not bruteforce_smooth(terms, field(2)).smooth


# -- soundness harness --------------------------------------------------------------

def test_soundness_small_run():
    result = soundness_suite(instances=40, seed=7)
    assert result["false_positives"] == 0
    assert result["smooth_verdicts"] > 0


def test_soundness_catches_weakened_criterion():
    class Always:
        verdict = "smooth"

    result = soundness_suite(instances=200, seed=0, criterion=lambda *args: Always())
    assert result["false_positives"] > 0


def test_mutation_infinite_middle_char2():
    # (0, inf, 0) gives x^2 + y^2, singular in characteristic 2
    verdict = tropical_smoothness(LINE, [0, None, 0], char=2)
    assert verdict.verdict == "inconclusive"
    oracle = find_smooth_member("interval", 2, [0, None, 0], [1, 1, 1], 2)
    assert not oracle["smooth_member_found"]


# -- MPCP, MPCS and volumes -------------------------------------------------------------

def test_quintic_mpcs_and_volumes(quintic):
    rng = random.Random(5)
    for _ in range(5):
        lam = [Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in range(5)]
        assert mpcp_mpcs_check(quintic, lam).verdict == "mpcs"
        assert lcm_lambda(quintic, lam).lcm == 1
    deg = lcm_lambda(quintic, 1, "degree-sublattice")
    assert deg.volumes == [125] * 5 and deg.lcm == 125
    assert deg.extra["rescaled_volumes"] == [1] * 5 and deg.extra["image_index"] == 125
    with pytest.raises(PreconditionViolation):
        lcm_lambda(quintic, 1, "bogus")


def test_fan_scaling_invariance(mirror_quartic_dim3_n4):
    lam, _ = refining_heights(mirror_quartic_dim3_n4)
    a = fan_from_heights(mirror_quartic_dim3_n4, lam=lam)
    b = fan_from_heights(mirror_quartic_dim3_n4, lam=[3 * x for x in lam])
    assert a.cones == b.cones


def test_quartic_constant_heights_violate_mpcp(mirror_quartic_dim3_n4):
    report = mpcp_mpcs_check(mirror_quartic_dim3_n4, 1)
    assert report.verdict == "neither"
    assert report.witness[0]["reason"] == "not_simplicial"
    with pytest.raises(MpcpViolation):
        lcm_lambda(mirror_quartic_dim3_n4, 1)


def test_quartic_refining_heights_round_trip(mirror_quartic_dim3_n4):
    simplex = mirror_quartic_dim3_n4
    P = boundary_points(simplex)
    lam, coeffs = refining_heights(simplex, P)
    report = mpcp_mpcs_check(simplex, lam, P)
    assert report.verdict == "mpcs"
    h = [sum(c * x * x for c, x in zip(coeffs, p)) for p in P.points]
    for j in range(simplex.n):
        on = [i for i, p in enumerate(P.points) if j in simplex.tight_facets(p)]
        sub = regular_subdivision([P.points[i] for i in on], [h[i] for i in on])
        fan_cells = sorted(sorted(P.points[i] for i in c) for c in report.fan.cones
                           if all(j in simplex.tight_facets(P.points[i]) for i in c))
        assert cell_sets(sub) == fan_cells
    vols = lcm_lambda(simplex, lam, P=P)
    assert sum(vols.volumes) == polytope_volume(list(simplex.vertices))
