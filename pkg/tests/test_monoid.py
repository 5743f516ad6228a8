import itertools
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gpmirror.errors import NicenessViolation, PreconditionViolation
from gpmirror.monoid import (ConeOrder, KplusMembership, circuit_ray, default_grading, enumerate_knonneg,
                             enumerate_kp, enumerate_kplus, enumerate_monoid, extremal_elements,
                             freeness_witness, grading_from_weights, relation_lattice, strong_convexity)

HEXAGON = [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0), (0, -1)]


@pytest.fixture(scope="module")
def hexagon():
    K = relation_lattice(HEXAGON)
    return K, grading_from_weights(K, [1] * 6)


def nonneg_box(m, weights, budget):
    """Every x >= 0 in Z^m with sum w_j x_j <= budget, by plain recursion."""
    out = []

    def rec(prefix, room):
        if len(prefix) == m:
            out.append(tuple(prefix))
            return
        w = weights[len(prefix)]
        for c in range(int(room // w) + 1):
            rec(prefix + [c], room - c * w)

    rec([], budget)
    return out


def knonneg_oracle(K, g, N):
    return sorted(u for u in nonneg_box(K.size, g.weights, Fraction(N)) if K.contains(u))


def kp_oracle(K, g, p, N):
    mu = g.mu(p)
    cap = math.floor(Fraction(N) / min(mu[q] for q in range(K.size) if q != p))
    others = [q for q in range(K.size) if q != p]
    pt = K.points[p]
    k = next(i for i, c in enumerate(pt) if c)
    out = []
    for x in nonneg_box(len(others), [1] * len(others), cap):
        img = sum(c * K.points[q][k] for c, q in zip(x, others))
        if img % pt[k]:
            continue
        u = [0] * K.size
        for c, q in zip(x, others):
            u[q] = c
        u[p] = -img // pt[k]
        if K.contains(u) and g.grade(u) <= N:
            out.append(tuple(u))
    return sorted(out)


def test_quartic_lattice(quartic_K, quartic_grading):
    assert quartic_K.size == 22 and quartic_K.rank == 19
    assert all(quartic_K.contains(b) for b in quartic_K.basis)
    weights = sorted(set(quartic_grading.weights))
    assert weights == [1, Fraction(9, 8), Fraction(3, 2)]
    assert quartic_grading.slack == Fraction(1, 8)


def test_quintic_lattice(quintic):
    K = relation_lattice(quintic)
    assert K.basis == ((1, 1, 1, 1, 1),)
    g = default_grading(K)
    assert g.weights == (1,) * 5
    assert enumerate_knonneg(K, g, 10) == [(0,) * 5, (1,) * 5, (2,) * 5]
    assert enumerate_kplus(K, g, 4) == [(0,) * 5]


def test_grading_certificates(quartic_K, quartic_grading):
    for p in range(quartic_K.size):
        mu = quartic_grading.mu(p)
        assert mu[p] == 0
        assert all(mu[q] >= quartic_grading.slack for q in range(quartic_K.size) if q != p)


def test_grading_rejects_non_exposing(hexagon):
    K, _ = hexagon
    with pytest.raises(PreconditionViolation):
        grading_from_weights(K, [1, 1, 1, 1, 1, 10])
    with pytest.raises(PreconditionViolation):
        grading_from_weights(K, [1, 1, 1, 1, 1, 0])


@pytest.mark.parametrize("N", [0, 1, 2, 3, 4])
def test_knonneg_against_box_scan_quartic(quartic_K, quartic_grading, N):
    assert sorted(enumerate_knonneg(quartic_K, quartic_grading, N)) == knonneg_oracle(
        quartic_K, quartic_grading, N)


@pytest.mark.parametrize("N", range(0, 9))
def test_knonneg_against_box_scan_hexagon(hexagon, N):
    K, g = hexagon
    assert sorted(enumerate_knonneg(K, g, N)) == knonneg_oracle(K, g, N)


@pytest.mark.parametrize("N", range(0, 9))
def test_kp_against_box_scan_hexagon(hexagon, N):
    K, g = hexagon
    for p in range(K.size):
        assert sorted(enumerate_kp(K, g, p, N)) == kp_oracle(K, g, p, N)


def test_kp_elements_quartic(quartic_K, quartic_grading):
    for p in range(quartic_K.size):
        for u in enumerate_kp(quartic_K, quartic_grading, p, 2):
            assert quartic_K.in_kp(u, p)
            assert sum(u) >= 0
            assert 0 <= quartic_grading.grade(u) <= 2


def test_enumeration_order(quartic_K, quartic_grading):
    us = enumerate_monoid(("Kp", 0), quartic_K, quartic_grading, 2)
    keys = [(quartic_grading.grade(u), u) for u in us]
    assert keys == sorted(keys)
    with pytest.raises(PreconditionViolation):
        enumerate_monoid("Kminus", quartic_K, quartic_grading, 1)


def test_kplus_closure_and_membership(quartic_K, quartic_grading):
    N = Fraction(1, 2)
    members = enumerate_kplus(quartic_K, quartic_grading, N)
    s = set(members)
    for u, v in itertools.product(members[:60], repeat=2):
        w = tuple(a + b for a, b in zip(u, v))
        if quartic_grading.grade(w) <= N:
            assert w in s
    test = KplusMembership(quartic_K, quartic_grading, N)
    assert all(test(u) for u in members)


def test_kplus_membership_rejects(quartic_K, quartic_grading, quartic_labels):
    e = quartic_labels["e"]
    test = KplusMembership(quartic_K, quartic_grading, 4)
    u = [0] * quartic_K.size
    u[e[2]] = -1
    u[e[5]] = -1
    assert not test(u)  # -a has negative grade
    assert test(quartic_labels["a"])
    assert not test([1] + [0] * (quartic_K.size - 1))  # not a relation


def test_ambient_contains_nonneg_orthant(hexagon):
    K, g = hexagon
    amb = set(enumerate_monoid("AmbientNonneg", K, g, 2))
    for x in nonneg_box(K.size, g.weights, 2):
        assert x in amb


def test_circuit_rays(quartic_K, quartic_labels, mirror_quartic_dim3_n4):
    e = quartic_labels["e"]
    assert circuit_ray(quartic_K, [e[2], e[5]]) == quartic_labels["a"]
    assert circuit_ray(quartic_K, [e[1], e[3], e[5]]) == quartic_labels["c"]
    assert circuit_ray(quartic_K, [e[1], e[2]]) is None
    verts = [quartic_K.index(v) for v in mirror_quartic_dim3_n4.vertices]
    ray = circuit_ray(quartic_K, verts)
    assert [ray[i] for i in verts] == [1, 1, 1, 1]


def test_circuit_rays_are_extremal(quartic_K, quartic_grading, quartic_labels):
    members = enumerate_knonneg(quartic_K, quartic_grading, Fraction(9, 2))
    ext = set(extremal_elements(members))
    for key in "abcd":
        assert quartic_labels[key] in ext


def test_strong_convexity():
    assert strong_convexity([[1, 0], [0, 1], [1, 1]])
    assert not strong_convexity([[1, 0], [-1, 0], [0, 1]])
    assert strong_convexity([])


def test_freeness_witness_unrestricted(quartic_K, quartic_grading):
    report = freeness_witness(quartic_K, quartic_grading, Fraction(9, 2))
    assert len(report.extremal) == 38 and report.rank == 19
    assert not report.free_up_to_bound
    dep = report.dependence
    total = [0] * quartic_K.size
    for u, c in dep.items():
        total = [t + c * x for t, x in zip(total, u)]
    assert not any(total)
    assert sorted(abs(c) for c in dep.values()) == [1, 1, 1, 1]


def test_freeness_witness_requires_extremal_rays(quartic_K, quartic_grading, quartic_labels):
    a = quartic_labels["a"]
    with pytest.raises(PreconditionViolation):
        freeness_witness(quartic_K, quartic_grading, Fraction(9, 2),
                         rays=[tuple(2 * x for x in a)])


# -- the partial order --------------------------------------------------------

@pytest.fixture(scope="module")
def nice_cone():
    return ConeOrder([[2, 1], [0, 1]], [[2, 1]], 8)


def test_cone_order_rank_one_depth():
    order = ConeOrder([[1]], [[1]], 12)
    for m in range(0, 10):
        assert order.depth((m,)) == m


def test_cone_order_niceness_violation():
    with pytest.raises(NicenessViolation):
        ConeOrder([[1, 0], [0, 1]], [[1, 1]], 6).leq  # noqa: B018
    with pytest.raises(NicenessViolation):
        ConeOrder([[1, 1]], [[1, 1]], 4)


def test_cone_order_basic(nice_cone):
    small = [u for u in nice_cone.elements if nice_cone.grade(u) <= 4]
    for u in small:
        assert nice_cone.leq(u, u)
        assert nice_cone.leq((0, 0), u)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_cone_order_transitive(nice_cone, data):
    pool = [u for u in nice_cone.elements if nice_cone.grade(u) <= 4]
    u, v, w = (data.draw(st.sampled_from(pool)) for _ in range(3))
    if nice_cone.leq(u, v) and nice_cone.leq(v, w):
        assert nice_cone.leq(u, w)


def test_depth_strictly_increases(nice_cone):
    pool = [u for u in nice_cone.elements if nice_cone.grade(u) <= 3]
    for v in pool:
        for u in nice_cone.down_set(v):
            if u != v:
                assert nice_cone.depth(u) < nice_cone.depth(v)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_kp_sums_stay_in_kplus(quartic_K, quartic_grading, picks):
    lists = [enumerate_kp(quartic_K, quartic_grading, p, Fraction(1, 2)) for p in (0, 7)]
    u = lists[0][picks[0] % len(lists[0])]
    v = lists[1][picks[1] % len(lists[1])]
    w = tuple(a + b for a, b in zip(u, v))
    assert KplusMembership(quartic_K, quartic_grading, 1)(w)


def test_random_relations_in_kplus_iff_enumerated(quartic_K, quartic_grading):
    rng = random.Random(3)
    members = set(enumerate_kplus(quartic_K, quartic_grading, Fraction(1, 2)))
    test = KplusMembership(quartic_K, quartic_grading, Fraction(1, 2))
    hits = 0
    for _ in range(300):
        u = [0] * quartic_K.size
        for b in rng.sample(quartic_K.basis, 2):
            c = rng.choice([-1, 1])
            u = [x + c * y for x, y in zip(u, b)]
        u = tuple(u)
        g = quartic_grading.grade(u)
        if 0 <= g <= Fraction(1, 2):
            hits += 1
            assert test(u) == (u in members)
    assert hits > 0
