from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from approxring.growth import (
    C_of_d,
    claim_premise,
    fit_degree,
    gromov_report,
    growth_series,
    reduction_map,
    scale_finder,
    series_csv,
)
from approxring.ring import Integers, MatrixRing, ZMod
from approxring.setops import ElementSet, interval, random_symmetric, word_ball


def _integer_series(n_max=20):
    Z = Integers()
    return growth_series(Z, interval(Z, -1, 1), n_max)


def test_integer_series_matches_word_ball():
    Z = Integers()
    X = interval(Z, -1, 1)
    s = _integer_series(12)
    assert s.sizes == [len(word_ball(Z, X, n)) for n in range(13)]
    # {-n..n} until products of sums appear: 2*3 = 6 needs five letters
    assert s.sizes[:5] == [1, 3, 5, 7, 9]
    assert s.sizes[5] == 13


def test_series_invariants():
    rng = np.random.default_rng(0)
    for _ in range(8):
        R = ZMod(int(rng.integers(10, 300)))
        s = growth_series(R, random_symmetric(R, 5, rng), 15)
        assert s.sizes[0] == 1
        assert all(a <= b for a, b in zip(s.sizes, s.sizes[1:]))


def test_zero_ring_series_constant():
    R = ZMod(1)
    s = growth_series(R, ElementSet(R, [0]), 10)
    assert s.sizes == [1] * 11
    assert fit_degree(s).d == 0


def test_series_truncation_flag():
    s = growth_series(Integers(), interval(Integers(), -1, 1), 40, max_elements=500)
    assert s.truncated and s.requested == 40 and s.n_max < 40


def test_fit_linear_series():
    fit = fit_degree([2 * n + 1 for n in range(51)])
    assert abs(fit.d - 1) <= 0.1 and not fit.super_polynomial


def test_fit_polynomial_degrees():
    for d in (2, 3):
        fit = fit_degree([(n + 1) ** d for n in range(61)])
        assert abs(fit.d - d) <= 0.15 and not fit.super_polynomial


def test_fit_exponential_flags_super_polynomial():
    short = fit_degree([2**n for n in range(21)])
    long = fit_degree([2**n for n in range(41)])
    assert short.super_polynomial and long.super_polynomial
    assert long.d > short.d


def test_fit_integer_word_ball_is_super_polynomial():
    assert fit_degree(_integer_series(24)).super_polynomial


def test_fit_degenerate_inputs():
    assert fit_degree([5] * 10).d == 0
    with pytest.raises(ValueError):
        fit_degree([1, 3, 5, 7])
    with pytest.raises(ValueError):
        fit_degree([1, 1, 1, 1, 1, 1, 1, 1, 2, 3])


def test_scale_finder_examples():
    assert scale_finder([2 * n + 1 for n in range(41)], 1, 1) == 1
    assert scale_finder([3**n for n in range(41)], 1, 1) is None
    assert scale_finder([2**n for n in range(41)], Fraction(1, 2), 1) is None
    with pytest.raises(ValueError):
        scale_finder([2 * n + 1 for n in range(20)], 1, 5)
    with pytest.raises(ValueError):
        scale_finder([2 * n + 1 for n in range(20)], 0, 1)


def test_scale_comparison_is_exact():
    # 8^(1/3) = 2 exactly: sizes[4] = 2 * sizes[1] must pass, one more must not
    assert scale_finder([1, 5, 7, 8, 10], Fraction(1, 3), 1) == 1
    assert scale_finder([1, 5, 7, 8, 11], Fraction(1, 3), 1) is None


def _premise_corpus():
    rng = np.random.default_rng(3)
    out = []
    for n in (97, 500, 1000):
        R = ZMod(n)
        out.append(growth_series(R, interval(R, -1, 1), 70))
    for _ in range(4):
        R = ZMod(int(rng.integers(50, 400)))
        out.append(growth_series(R, random_symmetric(R, 3, rng), 70))
    return out


@pytest.mark.parametrize("d", [1, 2, Fraction(3, 2)])
def test_claim_premise_implies_scale(d):
    hits = 0
    for s in _premise_corpus():
        n = claim_premise(s, d, 1)
        if n is not None:
            hits += 1
            n1 = scale_finder(s, d, 1)
            assert n1 is not None and 1 <= n1 <= n
    assert hits > 0


def test_claim_premise_unmet_in_short_range():
    assert claim_premise(_integer_series(20), 1, 1) is None


def test_c_of_d():
    assert C_of_d(1) == 8**5 + 8**19
    # integer ceilings of 2^7.5 = 181.02... and 2^28.5 = 379625062.5...
    assert C_of_d(Fraction(1, 2)) == 182 + 379625063
    # large denominators and exponents stay fast and exact
    assert C_of_d(Fraction(20, 7)).bit_length() == 163


@given(st.fractions(Fraction(1, 7), 3, max_denominator=7))
def test_c_of_d_is_upper_bound(d):
    c = C_of_d(d)
    assert c >= 8 ** (5 * float(d)) + 8 ** (19 * float(d)) - 1e-6 * c


def test_reduction_map():
    target, red = reduction_map(Integers(), 8)
    assert target.size == 8 and red(-3) == 5
    target, red = reduction_map(MatrixRing(Integers(), 2), 4)
    assert target.size == 4**4 and red((5, -1, 0, 9)) == (1, 3, 0, 1)
    with pytest.raises(ValueError):
        reduction_map(ZMod(5), 2)


def test_series_csv():
    text = series_csv(_integer_series(3))
    assert text == "n,size\n0,1\n1,3\n2,5\n3,7\n"


def test_gromov_report_integers():
    Z = Integers()
    rep = gromov_report(Z, interval(Z, -1, 1), 16, quotient_modulus=16)
    assert rep["scale"]["n_prime"] == 1
    xp = rep["X_prime"]
    assert xp["size"] == 5 and xp["approx_K"] == 2 and xp["within_C(d)"]
    assert rep["assumptions"] == ["torsion-free ambient (not verifiable here)"]
    assert rep["certificate"]["status"] == "found"


def test_gromov_report_zero_ring():
    R = ZMod(1)
    rep = gromov_report(R, ElementSet(R, [0]), 12)
    assert rep["certificate"]["class"] == 0


def test_gromov_x_prime_within_c_of_d_on_corpus():
    rng = np.random.default_rng(9)
    for _ in range(5):
        R = ZMod(int(rng.integers(20, 120)))
        rep = gromov_report(R, random_symmetric(R, 3, rng), 16, d=1)
        if rep["scale"].get("n_prime") is not None:
            assert rep["X_prime"]["within_C(d)"]
            assert rep["X_prime"]["approx_K"] <= C_of_d(1)
        assert math.isfinite(float(rep["fit"].get("d", 0)))
