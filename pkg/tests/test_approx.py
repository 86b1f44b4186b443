from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from approxring.approx import (
    approx_constant,
    bound_suite,
    commensurability,
    dichotomy_report,
    four_x_plus_x_four_x,
    remark_bound_holds,
    thickness,
    zero_divisors,
)
from approxring.errors import NotSymmetricError, SubstructureError
from approxring.ring import Integers, MatrixRing, ZMod
from approxring.setops import ElementSet, interval, random_symmetric
from approxring.structure import verify_substructure

from conftest import symmetric_subsets
from oracles import brute_thickness


# ---------------------------------------------------------------------------
# approximate constant
# ---------------------------------------------------------------------------


def test_approx_constant_examples():
    R8 = ZMod(8)
    rep = approx_constant(ElementSet(R8, [0, 2, 4, 6]))
    assert rep.K == 1 and rep.growth_ratio == 1
    Z = Integers()
    assert approx_constant(interval(Z, -2, 2), mode="exact").K == 2
    assert approx_constant(ElementSet(Z, [0])).K == 1
    with pytest.raises(NotSymmetricError):
        approx_constant(ElementSet(Z, [0, 1]))


@pytest.mark.parametrize("n", range(1, 9))
def test_k_equals_one_iff_subring(n):
    for X in symmetric_subsets(n):
        K = approx_constant(X, mode="exact").K
        assert (K == 1) == bool(verify_substructure("subring", X)), X.encode()


def test_growth_ratio_is_exact_fraction():
    X = ElementSet(ZMod(7), [0, 1, 6])
    rep = approx_constant(X)
    # X+X+X*X = {0,1,2,5,6} + {0,1,6} = {-3..3}
    assert rep.growth_ratio == Fraction(7, 3)


# ---------------------------------------------------------------------------
# commensurability
# ---------------------------------------------------------------------------


def test_commensurability_examples():
    Z = Integers()
    X = ElementSet(Z, range(-10, 11, 2))
    Y = ElementSet(Z, range(-9, 10, 3))
    a, b = commensurability(X, Y, mode="exact")
    a.validate()
    b.validate()
    assert len(X) == 11 and len(Y) == 7
    # translates of a set of multiples of 3 meet the even numbers at most 4 times
    assert a.K >= 3 and b.K >= 2
    one, one_b = commensurability(X, X)
    assert (one.K, one_b.K) == (1, 1)
    s, t = commensurability(X, ElementSet(Z, [0]))
    assert (s.K, t.K) == (11, 1)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=8), st.lists(st.integers(0, 20), min_size=1, max_size=8))
def test_commensurability_is_symmetric(a, b):
    R = ZMod(21)
    X, Y = ElementSet(R, a), ElementSet(R, b)
    p, q = commensurability(X, Y, mode="exact")
    q2, p2 = commensurability(Y, X, mode="exact")
    assert (p.K, q.K) == (p2.K, q2.K)


# ---------------------------------------------------------------------------
# thickness
# ---------------------------------------------------------------------------


def test_thickness_examples():
    R = ZMod(10)
    U = ElementSet.universe(R)
    assert thickness(U, U).N == 2
    assert thickness(ElementSet(R, [0]), U).N == 11
    res = thickness(ElementSet(R, [0, 2, 4, 6, 8]), U)
    assert res.N == 3 and len(res.witness) == 2
    assert (res.witness.sorted()[1] - res.witness.sorted()[0]) % 2 == 1
    with pytest.raises(ValueError):
        thickness(ElementSet(R, [2, 8]), U)


def _thickness_corpus():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n = int(rng.integers(5, 16))
        R = ZMod(n)
        D = random_symmetric(R, int(rng.integers(1, n)), rng)
        Y = random_symmetric(R, int(rng.integers(1, n + 1)), rng)
        yield D, Y


@pytest.mark.parametrize("case", range(25))
def test_thickness_exact_matches_brute_force_and_covering_bound(case):
    D, Y = list(_thickness_corpus())[case]
    exact = thickness(D, Y, mode="exact")
    assert exact.N == brute_thickness(D, Y)
    assert len(exact.witness) == exact.N - 1
    assert remark_bound_holds(D, Y, exact)
    greedy = thickness(D, Y, mode="greedy")
    assert greedy.N <= exact.N <= greedy.N_upper
    with pytest.raises(ValueError):
        remark_bound_holds(D, Y, greedy)


# ---------------------------------------------------------------------------
# bound suite
# ---------------------------------------------------------------------------


def test_bound_suite_interval_example():
    X = interval(Integers(), -3, 3)
    checks = {c.name: c for c in bound_suite(X)}
    c = checks["sumset |2X-2X|"]
    # 2X-2X = {-12..12}; 13 is the size of 2X = {-6..6}
    assert (c.hypothesis_K, c.value, c.bound, c.status) == (2, 25, 112, "pass")
    assert checks["sumset |2X-0X|"].value == 13


def test_bound_suite_subring_all_pass_with_k_one():
    checks = bound_suite(ElementSet(ZMod(8), [0, 2, 4, 6]), H=ElementSet.universe(ZMod(8)))
    assert all(c.status == "pass" and c.hypothesis_K == 1 for c in checks)


def test_bound_suite_difference_set_example():
    checks = {c.name: c for c in bound_suite(ElementSet(ZMod(7), [0, 1, 6]))}
    assert checks["difference set approximate subring"].status == "pass"


def test_bound_suite_rejects_non_subring_h():
    with pytest.raises(SubstructureError):
        bound_suite(ElementSet(ZMod(8), [0, 1, 7]), H=ElementSet(ZMod(8), [0, 3, 5]))


def test_bound_suite_never_fails_on_random_corpus():
    rng = np.random.default_rng(8)
    for _ in range(20):
        n = int(rng.integers(5, 40))
        R = ZMod(n)
        X = random_symmetric(R, int(rng.integers(1, min(n, 9) + 1)), rng)
        for c in bound_suite(X, H=ElementSet.universe(R), budget_nodes=2000):
            assert c.status != "fail", (X.encode(), c.to_dict())


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------


def test_dichotomy_examples():
    rep = dichotomy_report(ElementSet(ZMod(7), [0, 1, 6]))
    assert rep.Y == ElementSet.universe(ZMod(7)) and rep.is_subring
    sub = ElementSet(ZMod(8), [0, 2, 4, 6])
    rep = dichotomy_report(sub)
    assert rep.Y == sub and rep.is_subring

    M = MatrixRing(ZMod(3), 2)
    e12 = M.unit(1, 2)
    X = ElementSet(M, [M.zero, e12, M.neg(e12)])
    rep = dichotomy_report(X)
    assert rep.zero_divisors == rep.Y
    assert rep.thickness.N == 2


def test_four_x_plus_x_four_x_literal():
    Z = Integers()
    X = interval(Z, -1, 1)
    Y = four_x_plus_x_four_x(X)
    assert Y.members == set(range(-8, 9))


def test_zero_divisors_inside_span():
    R = ZMod(12)
    S = ElementSet(R, [0, 1, 2, 3, 4])
    assert zero_divisors(S, ElementSet.universe(R)).members == {0, 2, 3, 4}


def test_dichotomy_holds_on_random_corpus():
    rng = np.random.default_rng(13)
    for _ in range(15):
        n = int(rng.integers(4, 30))
        X = random_symmetric(ZMod(n), int(rng.integers(1, min(n, 5) + 1)), rng)
        rep = dichotomy_report(X)
        assert rep.is_subring or rep.thickness.N <= len(rep.Y) + 1


def test_bound_check_serialises_huge_bounds():
    from approxring.approx import BoundCheck

    check = BoundCheck("huge", 5, 1, 7**1000, "pass")
    assert check.to_dict()["bound"].startswith("1.253256e+845")
    assert BoundCheck("small", 1, 1, 12, "pass").to_dict()["bound"] == 12
