from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from approxring.errors import NotSymmetricError
from approxring.escape import (
    escape_norm,
    norm_table,
    norm_zero_is_ideal,
    norm_zero_set,
    strong_norm_check,
)
from approxring.ring import MatrixRing, ZMod
from approxring.setops import ElementSet, random_symmetric
from approxring.structure import generated_subring

from conftest import strictly_upper, symmetric_subsets


def naive_norm(X, r):
    """inf over nu of 1/(nu+1) with 0, r, ..., nu*r all in X, scanning one full cycle."""
    ring = X.ring
    order = ring.additive_order(r)
    acc = ring.zero
    for i in range(order + 1):
        if acc not in X.members:
            return Fraction(1, i)
        acc = ring.add(acc, r)
    return Fraction(0)


def test_escape_norm_examples(z7):
    X = ElementSet(z7, [0, 1, 2, 5, 6])
    assert escape_norm(X, 1).value == Fraction(1, 3)
    assert escape_norm(X, 0).value == 0
    assert escape_norm(X, 3).value == 1
    with pytest.raises(ValueError):
        escape_norm(ElementSet(z7, [1]), 1)


def test_norm_zero_set_examples(z7):
    assert norm_zero_set(ElementSet(z7, [0, 1, 2, 5, 6])).members == {0}
    sub = ElementSet(ZMod(8), [0, 2, 4, 6])
    assert norm_zero_set(sub) == sub and norm_zero_is_ideal(sub)
    assert norm_zero_set(ElementSet(z7, [0])).members == {0}


@pytest.mark.parametrize("n", range(1, 9))
def test_norm_properties_exhaustive(n):
    R = ZMod(n)
    subsets = list(symmetric_subsets(n))
    for X in subsets:
        table = norm_table(X, R.elements())
        for r in R.elements():
            v = table[r].value
            assert v == naive_norm(X, r)
            assert (v <= Fraction(1, 2)) == (r in X.members)
            assert v == table[R.neg(r)].value
        for Y in subsets:
            if X <= Y:
                assert all(escape_norm(Y, r).value <= table[r].value for r in R.elements())


def test_strong_norm_examples(z7):
    rep = strong_norm_check(ElementSet(z7, [0, 1, 2, 5, 6]))
    assert not rep.passed["2"]
    assert ["2", "2", "4"] in rep.counterexamples["2"]
    assert strong_norm_check(ElementSet(ZMod(9), [0, 3, 6])).all_passed
    with pytest.raises(NotSymmetricError):
        strong_norm_check(ElementSet(z7, [0, 1]))


@pytest.mark.parametrize(
    "S",
    [
        ElementSet(ZMod(12), [0, 3, 6, 9]),
        ElementSet.universe(ZMod(10)),
        strictly_upper(ZMod(2), 3)[1],
        ElementSet.universe(MatrixRing(ZMod(2), 2)),
    ],
    ids=["z12-3", "z10", "upper3", "m2f2"],
)
def test_strong_norm_passes_on_subrings(S):
    rep = strong_norm_check(S)
    assert rep.exhaustive and rep.all_passed


def test_strong_norm_vectorised_matches_scalar_scan():
    rng = np.random.default_rng(2)
    for _ in range(10):
        n = int(rng.integers(5, 30))
        R = ZMod(n)
        Z = random_symmetric(R, int(rng.integers(1, n)), rng)
        rep = strong_norm_check(Z, max_reported=10**6)
        span = generated_subring(Z).sorted()
        nz = lambda x: escape_norm(Z, x).value if x in Z.members else Fraction(1)  # noqa: E731
        bad1 = sum(1 for x in span for y in span if nz(R.add(x, y)) > 4 * max(nz(x), nz(y)))
        bad2 = sum(
            1 for x in Z.sorted() for y in Z.sorted() if nz(R.mul(x, y)) > 2 * nz(x) * nz(y)
        )
        bad3 = sum(
            1 for x in span for y in span if (nz(x) == 0 or nz(y) == 0) and nz(R.mul(x, y)) != 0
        )
        assert (len(rep.counterexamples["1"]), len(rep.counterexamples["2"]), len(rep.counterexamples["3"])) == (
            bad1,
            bad2,
            bad3,
        )


def test_strong_norm_sampling_is_seeded():
    R = ZMod(1009)
    Z = random_symmetric(R, 41, np.random.default_rng(0))
    a = strong_norm_check(Z, sample_budget=2000, seed=5)
    b = strong_norm_check(Z, sample_budget=2000, seed=5)
    assert not a.exhaustive and a.to_dict() == b.to_dict()
