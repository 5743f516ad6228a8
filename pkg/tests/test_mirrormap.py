from fractions import Fraction
from math import factorial

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gpmirror.errors import NegativeArgument, NegativeEntry, NotInK, NotInKnonneg, PreconditionViolation
from gpmirror.mirrormap import (build_bundle, comb, comb_p, harmonic, hypersurface_fast_path,
                                integrality_report, mirror_map_image, phi_power, support_outside_kplus)
from gpmirror.polytope import hypersurface_simplex


def quintic_q_oracle(order):
    """q(T) = T exp(w1/w0) for the quintic, straight from sympy."""
    T = sympy.Symbol("T")
    w0 = sum(sympy.factorial(5 * k) / sympy.factorial(k) ** 5 * T ** k for k in range(order + 1))
    w1 = sum(sympy.factorial(5 * k) / sympy.factorial(k) ** 5 * 5 * (sympy.harmonic(5 * k) - sympy.harmonic(k))
             * T ** k for k in range(order + 1))
    q = sympy.series(T * sympy.exp(w1 / w0), T, 0, order + 1).removeO()
    return [sympy.Rational(q.coeff(T, k)) for k in range(order + 1)]


@pytest.fixture(scope="module")
def quartic_bundle(mirror_quartic_dim3_n4, quartic_K, quartic_grading):
    return build_bundle(mirror_quartic_dim3_n4, 2, grading=quartic_grading, K=quartic_K)


def test_harmonic():
    assert harmonic(0) == 0
    assert harmonic(4) == Fraction(25, 12)
    with pytest.raises(NegativeArgument):
        harmonic(-1)


def test_comb():
    assert comb((2, 1, 1)) == 12
    assert comb((0, 0)) == 1
    assert comb((5,) * 5) == factorial(25) // factorial(5) ** 5
    with pytest.raises(NegativeEntry):
        comb((1, -1))


def test_comb_p():
    # u = (1, 1, -2): sum 0, (-u_p - 1)! = 1, sign (-1)^(-1) = -1
    assert comb_p((1, 1, -2), 2) == -1
    assert comb_p((2, 1, -1), 2) == 1
    assert comb_p((2, 2, -3), 2) == Fraction(1, 2)
    with pytest.raises(PreconditionViolation):
        comb_p((1, 1, 0), 2)
    with pytest.raises(PreconditionViolation):
        comb_p((-1, 1, -1), 2)


def test_fast_path_quintic_against_sympy():
    hs = hypersurface_fast_path(5, 8)
    assert hs.q == [Fraction(int(c.p), int(c.q)) for c in quintic_q_oracle(8)]
    assert hs.q[2] == 770 and hs.q[3] == 1014275 and hs.q[4] == 1703916750


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_fast_path_integral(n):
    hs = hypersurface_fast_path(n, 10)
    assert hs.to_json()["integral"]
    assert hs.F[1] == factorial(n)


def test_fast_path_validation():
    with pytest.raises(PreconditionViolation):
        hypersurface_fast_path(2, 4)
    with pytest.raises(PreconditionViolation):
        hypersurface_fast_path(5, -1)
    assert hypersurface_fast_path(5, 4, power=1).phi_n == hypersurface_fast_path(5, 4).phi


@pytest.mark.parametrize("n", [3, 4, 5])
def test_general_pipeline_matches_fast_path(n):
    N = 6
    bundle = build_bundle(hypersurface_simplex(n), n * N)
    ones = (1,) * n
    hs = hypersurface_fast_path(n, N, power=n)
    series = phi_power(bundle, ones)
    for k in range(N + 1):
        assert bundle.tau.coefficient((k,) * n) == hs.F[k]
        assert series.coefficient((k,) * n) == hs.phi_n[k]


def test_quartic_bundle_shape(quartic_bundle):
    assert len(quartic_bundle.tau_p) == 22
    assert quartic_bundle.tau.constant_term() == 1
    assert all(t.constant_term() == 0 for t in quartic_bundle.tau_p)
    # gamma only sees K_p minus K>=0
    for p, g in enumerate(quartic_bundle.gamma_p):
        assert all(u[p] < 0 for u, _ in g)


def test_quartic_gamma_example(quartic_bundle, quartic_labels):
    e = quartic_labels["e"]
    u = [0] * 22
    u[e[1]], u[e[3]], u[e[2]] = 1, 1, -2
    assert quartic_bundle.gamma_p[e[2]].coefficient(u) == comb_p(u, e[2]) == -1


def test_phi_power_rejects_non_relations(quartic_bundle):
    with pytest.raises(NotInK):
        phi_power(quartic_bundle, [1] + [0] * 21)
    with pytest.raises(PreconditionViolation):
        phi_power(quartic_bundle, quartic_bundle.K.basis[0], method="magic")


def test_phi_power_methods_agree(quartic_bundle):
    for u in quartic_bundle.K.basis[:4]:
        assert phi_power(quartic_bundle, u, "exp") == phi_power(quartic_bundle, u, "product")


def sparse_relations(bundle, labels):
    """Signed basis vectors and the four named rays; generic sums fill all of K_+."""
    basis = list(bundle.K.basis) + [labels[k] for k in "abcd"]
    return st.tuples(st.sampled_from(basis), st.sampled_from([1, -1]))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_phi_power_homomorphism(quartic_bundle, quartic_labels, data):
    (u, su), (v, sv) = (data.draw(sparse_relations(quartic_bundle, quartic_labels)) for _ in range(2))
    u = tuple(su * x for x in u)
    v = tuple(sv * x for x in v)
    w = tuple(a + b for a, b in zip(u, v))
    assert phi_power(quartic_bundle, w) == phi_power(quartic_bundle, u) * phi_power(quartic_bundle, v)


def test_quartic_integrality_low_grade(quartic_bundle):
    report = integrality_report(quartic_bundle, check_support=True)
    assert report["all_integral"]
    assert all(r["support_in_kplus"] for r in report["results"])


def test_mirror_map_image(quartic_bundle, quartic_labels):
    a = quartic_labels["a"]
    img = mirror_map_image(quartic_bundle, a)
    assert img.coefficient(a) == 1
    assert not support_outside_kplus(quartic_bundle, img, shift=a)
    with pytest.raises(NotInKnonneg):
        mirror_map_image(quartic_bundle, tuple(-x for x in a))


def test_gamma_conventions_differ_only_in_sign(mirror_quartic_dim3_n4, quartic_K, quartic_grading):
    single = build_bundle(mirror_quartic_dim3_n4, 2, quartic_grading, "single", quartic_K)
    double = build_bundle(mirror_quartic_dim3_n4, 2, quartic_grading, "double", quartic_K)
    for gs, gd in zip(single.gamma_p, double.gamma_p):
        for u, c in gs:
            sign = -1 if (u[next(i for i, x in enumerate(u) if x < 0)] + 1) % 2 else 1
            assert gd.coefficient(u) == sign * c
    with pytest.raises(PreconditionViolation):
        build_bundle(mirror_quartic_dim3_n4, 1, quartic_grading, "triple", quartic_K)


def test_jobs_do_not_change_results(mirror_quartic_dim3_n4, quartic_K, quartic_grading, quartic_bundle):
    threaded = build_bundle(mirror_quartic_dim3_n4, 2, quartic_grading, K=quartic_K, jobs=4)
    assert threaded.kp == quartic_bundle.kp
    assert all(a == b for a, b in zip(threaded.phi, quartic_bundle.phi))
