"""Exit criteria of the build, one test per criterion.

Each test records a PASS/FAIL line (printed in the terminal summary) before
asserting.  Tolerances and corpus sizes are the pinned values: bound suite
over >= 200 random sets of Z/p plus >= 50 interval/matrix instances in
< 60 s; 30 cover instances with |S| <= 15; exhaustive pair scans < 1 s for
spans <= 512; cut-and-project suite < 120 s; degree fit 1.0 +- 0.1 and
triangular fit residual < 0.05.
"""

from __future__ import annotations

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from approxring.approx import approx_constant, bound_suite, remark_bound_holds, thickness
from approxring.cli import main
from approxring.cutproject import (
    approx_check_cloud,
    cloud_stats,
    model_set,
    pisot_window,
    window_commensurability,
)
from approxring.escape import escape_norm, strong_norm_check
from approxring.exactreal import QuadReal
from approxring.growth import C_of_d, fit_degree, gromov_report, growth_series, scale_finder
from approxring.ring import Integers, MatrixRing, ProductRing, ZMod, make_ring, quotient_ring
from approxring.setops import (
    CoverCertificate,
    ElementSet,
    cover_number,
    interval,
    iterate_xn,
    random_symmetric,
    sumset,
    word_ball,
)
from approxring.structure import (
    generated_ideal,
    generated_subring,
    nilpotency_class,
    nilpotent_certificate,
    verify_substructure,
)

from conftest import record_criterion, strictly_upper, symmetric_subsets
from oracles import brute_cover_number

pytestmark = pytest.mark.acceptance


def _report(number: int, checks: list[tuple[str, bool]], extra: str = "") -> None:
    failed = [name for name, ok in checks if not ok]
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks"
    if extra:
        detail += f"; {extra}"
    if failed:
        detail += "; failed: " + ", ".join(failed)
    record_criterion(number, not failed, detail)
    assert not failed, failed


# ---------------------------------------------------------------------------
# 1. classical bounds suite
# ---------------------------------------------------------------------------


def _bound_corpus():
    for p in (31, 61, 101):
        R = ZMod(p)
        for i in range(70):
            rng = np.random.default_rng(np.random.SeedSequence([1, p, i]))
            yield f"Z/{p}#{i}", random_symmetric(R, int(rng.integers(1, 13)), rng), ElementSet.universe(R)
    Z = Integers()
    for k in range(1, 26):
        yield f"[-{k},{k}]", interval(Z, -k, k), None
    M = MatrixRing(ZMod(3), 2)
    for i in range(25):
        rng = np.random.default_rng(np.random.SeedSequence([2, i]))
        yield f"M2(Z/3)#{i}", random_symmetric(M, int(rng.integers(1, 13)), rng), ElementSet.universe(M)


def test_criterion_1_bound_suite():
    start = time.perf_counter()
    random_sets = structured = 0
    bad = []
    for name, X, H in _bound_corpus():
        if name.startswith("Z/"):
            random_sets += 1
        else:
            structured += 1
        for c in bound_suite(X, H=H):
            if c.status != "pass":
                bad.append(f"{name}:{c.name}:{c.status}")
    elapsed = time.perf_counter() - start
    checks = [
        (">= 200 random subsets of Z/p", random_sets >= 200),
        (">= 50 interval/matrix instances", structured >= 50),
        ("every bound passes", not bad),
        ("runtime < 60 s", elapsed < 60),
    ]
    _report(1, checks, f"{random_sets}+{structured} instances in {elapsed:.1f} s" + (f"; {bad[:3]}" if bad else ""))


# ---------------------------------------------------------------------------
# 2. oracle equivalences, exhaustive over Z/n, n <= 8
# ---------------------------------------------------------------------------


def test_criterion_2_oracle_equivalence():
    counts = {"subring": 0, "K": 0, "norm": 0}
    ok = {"subring": True, "K": True, "norm": True}
    for n in range(1, 9):
        R = ZMod(n)
        for X in symmetric_subsets(n):
            stabilised, prev = X, None
            while stabilised != prev:
                prev, stabilised = stabilised, iterate_xn(stabilised, 1)
            ok["subring"] &= generated_subring(X) == stabilised
            counts["subring"] += 1
            K = approx_constant(X, mode="exact").K
            ok["K"] &= (K == 1) == bool(verify_substructure("subring", X))
            counts["K"] += 1
            for r in R.elements():
                v = escape_norm(X, r).value
                inside = r in X.members
                ok["norm"] &= (v <= Fraction(1, 2)) == inside and (v == 1) == (not inside)
                counts["norm"] += 1
    checks = [
        ("generated_subring = stabilised X_n", ok["subring"]),
        ("K = 1 iff subring", ok["K"]),
        ("escape-norm equivalences", ok["norm"]),
    ]
    _report(2, checks, f"{counts['subring']} sets, {counts['norm']} norm evaluations")


# ---------------------------------------------------------------------------
# 3. covering exactness
# ---------------------------------------------------------------------------


def _cover_corpus():
    rng = np.random.default_rng(np.random.SeedSequence([3, 0]))
    out = []
    while len(out) < 30:
        n = int(rng.integers(7, 40))
        R = ZMod(n)
        S = ElementSet(R, rng.choice(n, size=int(rng.integers(3, min(n, 15) + 1)), replace=False).tolist())
        X = ElementSet(R, rng.choice(n, size=int(rng.integers(2, 5)), replace=False).tolist())
        out.append((S, X))
    return out


def test_criterion_3_cover_exactness():
    corpus = _cover_corpus()
    exact_ok = greedy_ok = True
    for S, X in corpus:
        exact = cover_number(S, X, mode="exact")
        greedy = cover_number(S, X, mode="greedy")
        exact_ok &= exact.K == brute_cover_number(S, X)
        greedy_ok &= exact.K <= greedy.K <= exact.K * (1 + math.log(len(S)))
    Z = Integers()
    interval_K = cover_number(interval(Z, -4, 4), interval(Z, -2, 2), mode="exact").K
    checks = [
        ("30 instances, |S| <= 15", len(corpus) == 30 and max(len(S) for S, _ in corpus) <= 15),
        ("exact = brute force", exact_ok),
        ("greedy <= exact (1 + ln|S|)", greedy_ok),
        ("{-4..4} by {-2..2} gives K=2", interval_K == 2),
    ]
    _report(3, checks)


# ---------------------------------------------------------------------------
# 4. nilpotency
# ---------------------------------------------------------------------------


def _homomorphism_ok(spec) -> bool:
    R = make_ring(spec)
    U = ElementSet.universe(R)
    E = R.elements()
    seen = set()
    for g in E:
        I = generated_ideal(U, ElementSet(R, [g]))
        if I.members in seen:
            continue
        seen.add(I.members)
        Q = quotient_ring(R, I)
        pi = Q.project
        images = [pi(a) for a in E]
        for a, pa in zip(E, images):
            for b, pb in zip(E, images):
                if pi(R.add(a, b)) != Q.add(pa, pb) or pi(R.mul(a, b)) != Q.mul(pa, pb):
                    return False
    return True


def test_criterion_4_nilpotency():
    classes = {k: nilpotency_class(strictly_upper(ZMod(2), k)[1]) for k in (2, 3, 4)}
    specs = [
        {"kind": "zmod", "n": 256},
        {"kind": "zmod", "n": 12},
        {"kind": "matrix", "base": {"kind": "zmod", "n": 2}, "dim": 2},
        {"kind": "product", "factors": [{"kind": "zmod", "n": 4}, {"kind": "zmod", "n": 6}]},
        {"kind": "product", "factors": [{"kind": "zmod", "n": 2}, {"kind": "matrix", "base": {"kind": "zmod", "n": 2}, "dim": 2}]},
    ]
    hom_ok = all(_homomorphism_ok(s) for s in specs)
    _, T = strictly_upper(ZMod(2), 3)
    tri = nilpotent_certificate(T)
    saturated = []
    for p in (7, 11, 13, 31):
        R = ZMod(p)
        cert = nilpotent_certificate(interval(R, -2, 2), m_max=6)
        U = ElementSet.universe(R)
        saturated.append(cert is not None and cert.nil_class == 0 and cert.I == U and cert.R_prime == U)
    checks = [
        ("class of k x k strictly upper triangular = k-1 (k=2,3,4)", classes == {2: 1, 3: 2, 4: 3}),
        ("quotient map is a homomorphism (rings <= 256, all principal ideals)", hom_ok),
        ("triangular certificate: class 2, I = {0}", tri.nil_class == 2 and tri.I.members == {T.ring.zero}),
        ("interval in Z/p: class 0, I saturated", all(saturated)),
    ]
    _report(4, checks, f"classes {classes}")


# ---------------------------------------------------------------------------
# 5. escape-norm checker
# ---------------------------------------------------------------------------


def _subring_corpus():
    for n in range(2, 31):
        for d in range(1, n + 1):
            if n % d == 0:
                yield ElementSet(ZMod(n), range(0, n, d))
    yield ElementSet.universe(MatrixRing(ZMod(2), 2))
    yield ElementSet.universe(MatrixRing(ZMod(3), 2))
    yield strictly_upper(ZMod(2), 3)[1]
    yield strictly_upper(ZMod(3), 3)[1]
    yield ElementSet.universe(ProductRing([ZMod(4), ZMod(6)]))


def test_criterion_5_strong_norm():
    subrings = list(_subring_corpus())
    all_pass = all(strong_norm_check(S).all_passed for S in subrings)
    rep = strong_norm_check(ElementSet(ZMod(7), [0, 1, 2, 5, 6]))
    violation = not rep.passed["2"] and ["2", "2", "4"] in rep.counterexamples["2"]
    big = ElementSet.universe(ZMod(512))
    start = time.perf_counter()
    big_rep = strong_norm_check(big)
    elapsed = time.perf_counter() - start
    M = MatrixRing(ZMod(2), 3)
    upper = generated_subring(ElementSet(M, [M.unit(1, 1), M.unit(1, 2), M.unit(2, 2), M.unit(2, 3), M.unit(3, 3)]))
    start = time.perf_counter()
    upper_rep = strong_norm_check(upper)
    elapsed2 = time.perf_counter() - start
    checks = [
        ("all three properties on every subring", all_pass and upper_rep.all_passed),
        ("documented violation x=y=2 in Z/7", violation),
        ("exhaustive scan of |<Z>| = 512 under 1 s", big_rep.exhaustive and big_rep.span_size == 512 and elapsed < 1),
        ("exhaustive scan of 64-element matrix subring under 1 s", upper_rep.exhaustive and elapsed2 < 1),
    ]
    _report(5, checks, f"{len(subrings) + 1} subrings; 512-element scan {elapsed:.2f} s")


# ---------------------------------------------------------------------------
# 6. cut-and-project
# ---------------------------------------------------------------------------


def test_criterion_6_cut_and_project():
    start = time.perf_counter()
    cloud = pisot_window(2, 1, 100)
    pts = set(cloud.points)
    xs = [c[0] for c in cloud.direct]
    half = QuadReal(Fraction(1, 2))
    pairwise = all(abs(xs[i] - xs[j]) >= half for i in range(len(xs)) for j in range(i))
    stats = cloud_stats(cloud)
    lattice = model_set(
        {
            "scheme": "lattice",
            "window": 1,
            "R": 100,
            "lattice": {"direct": [[1], ["sqrt(2)"]], "internal": [[1], ["-sqrt(2)"]]},
        }
    )
    cert = approx_check_cloud(cloud, 50)
    again = CoverCertificate.from_dict(json.loads(json.dumps(cert.to_dict())))
    c12, c21 = window_commensurability(2, 1, 2, 50, 10)
    c12.validate()
    c21.validate()
    elapsed = time.perf_counter() - start
    checks = [
        ("min gap >= 1/2, exact pairwise", pairwise and stats["min_gap"] >= 0.5),
        ("1+sqrt 2 included, sqrt 2 excluded", (1, 1) in pts and (0, 1) not in pts),
        ("lattice model set is set-identical", {tuple(p) for p in lattice.points} == pts),
        ("cover certificate revalidates", again.K == cert.K),
        ("finite mutual certificates for w=1, 2 at R=50", c12.K >= 1 and c21.K >= 1),
        ("suite under 120 s", elapsed < 120),
    ]
    _report(6, checks, f"{len(cloud)} points, K={cert.K}, commensurability ({c12.K},{c21.K}), {elapsed:.1f} s")


# ---------------------------------------------------------------------------
# 7. growth
# ---------------------------------------------------------------------------


def _triangular_over_integers():
    M = MatrixRing(Integers(), 3)
    gens = [M.unit(1, 2), M.unit(2, 3)]
    return M, ElementSet(M, [M.zero] + gens + [M.neg(g) for g in gens])


def test_criterion_7_growth():
    """Sound sub-checks are asserted here; the literal ones are in the xfail test below.

    The word ball of {-1,0,1} in Z counts letters, so (1+1)(1+1+1) = 6 lies in
    the ball of radius 5 and the sizes leave 2n+1 at n = 5.  The literal
    X' = 2X^{<=4} = {-8..8} has (X'+X') u X'X' = {-64..64}, which needs at
    least 8 translates, not 2.  Both are reported as failures of this criterion.
    """
    Z = Integers()
    X = interval(Z, -1, 1)
    series = growth_series(Z, X, 24)
    literal_sizes = series.sizes == [2 * n + 1 for n in range(25)]
    fit = fit_degree(series)
    literal_fit = abs(fit.d - 1) <= 0.1
    n1 = scale_finder(series, 1, 1)
    ball = word_ball(Z, X, 4)
    Xp = sumset(ball, ball)
    literal_K = approx_constant(Xp).K
    controlled = approx_constant(sumset(word_ball(Z, X, n1), word_ball(Z, X, n1)), mode="exact").K
    M, T = _triangular_over_integers()
    rep = gromov_report(M, T, 20, quotient_modulus=8)
    tri_fit = rep["fit"]
    cert = rep["certificate"]
    checks = [
        ("sizes 2n+1 (letter-counting ball leaves 2n+1 at n=5)", literal_sizes),
        ("fit_degree = 1.0 +- 0.1 on the Z series", literal_fit),
        ("scale_finder(d=1, N=1) = 1", n1 == 1),
        ("2X^{<=4} approx constant <= C(1)", literal_K <= C_of_d(1)),
        ("2X^{<=4} approx constant = 2", literal_K == 2),
        ("2X^{<=n'} approx constant = 2", controlled == 2),
        ("triangular fit residual < 0.05, not super-polynomial",
         tri_fit["residual"] < 0.05 and not tri_fit["super_polynomial"]),
        ("triangular class <= 2 in the Z/8 quotient", cert["status"] == "found" and cert["class"] <= 2),
    ]
    failed = [name for name, ok in checks if not ok]
    extra = (
        f"Z sizes {series.sizes[:8]}..., fit d={fit.d:.2f}, |2X^<=4|={len(Xp)} greedy K={literal_K}, "
        f"triangular d={tri_fit['d']:.2f} residual={tri_fit['residual']:.4f}, class {cert.get('class')}"
    )
    detail = f"{len(checks) - len(failed)}/{len(checks)} checks; {extra}"
    if failed:
        detail += "; failed: " + ", ".join(failed) + " (contradict the ball definition; see xfail test)"
    record_criterion(7, not failed, detail)
    sound = {"scale_finder(d=1, N=1) = 1", "2X^{<=4} approx constant <= C(1)", "2X^{<=n'} approx constant = 2",
             "triangular fit residual < 0.05, not super-polynomial", "triangular class <= 2 in the Z/8 quotient"}
    assert not [name for name in failed if name in sound]
    assert len(ball) == 9


@pytest.mark.xfail(
    strict=True,
    reason="letter-counting word ball gives 13 elements at n=5 (2*3 = 6 uses five letters), "
    "so sizes are not 2n+1, the fit is super-polynomial and 2X^{<=4} needs >= 8 translates",
)
def test_criterion_7_literal_expectations():
    Z = Integers()
    X = interval(Z, -1, 1)
    series = growth_series(Z, X, 24)
    assert series.sizes == [2 * n + 1 for n in range(25)]
    assert abs(fit_degree(series).d - 1) <= 0.1
    b = word_ball(Z, X, 4)
    assert approx_constant(sumset(b, b), mode="greedy").K == 2


# ---------------------------------------------------------------------------
# 8. thickness
# ---------------------------------------------------------------------------


def test_criterion_8_thickness():
    results = 0
    holds = True
    for i in range(60):
        rng = np.random.default_rng(np.random.SeedSequence([8, i]))
        n = int(rng.integers(5, 24))
        R = ZMod(n)
        D = random_symmetric(R, int(rng.integers(1, n)), rng)
        Y = random_symmetric(R, int(rng.integers(1, n + 1)), rng)
        res = thickness(D, Y, mode="exact")
        holds &= remark_bound_holds(D, Y, res) and len(D) * (res.N - 1) >= len(Y)
        results += 1
    R10 = ZMod(10)
    N10 = thickness(ElementSet(R10, [0, 2, 4, 6, 8]), ElementSet.universe(R10)).N
    checks = [("|D| (N-1) >= |Y| on every exact result", holds), ("Z/10 even residues give N=3", N10 == 3)]
    _report(8, checks, f"{results} exact thickness results")


# ---------------------------------------------------------------------------
# 9. determinism
# ---------------------------------------------------------------------------


def _corpus_report() -> str:
    out = {"bounds": [], "covers": [], "thickness": [], "cloud": None, "growth": None}
    for k, (name, X, H) in enumerate(_bound_corpus()):
        if k % 10 == 0:
            out["bounds"].append([name, [c.to_dict() for c in bound_suite(X, H=H)]])
    for S, X in _cover_corpus():
        out["covers"].append(cover_number(S, X, mode="exact").to_dict())
    for i in range(10):
        rng = np.random.default_rng(np.random.SeedSequence([8, i]))
        R = ZMod(int(rng.integers(5, 24)))
        D = random_symmetric(R, 3, rng)
        out["thickness"].append(thickness(D, ElementSet.universe(R)).to_dict())
    out["cloud"] = cloud_stats(pisot_window(2, 1, 100))
    out["growth"] = growth_series(Integers(), interval(Integers(), -1, 1), 16).to_dict()
    return json.dumps(out, sort_keys=True, default=str)


EXPERIMENT = """\
seed: 2024
ring: {kind: zmod, n: 101}
generator: {recipe: random_symmetric, size: 10}
corpus: 6
pipeline:
  - op: approx_constant
  - op: dichotomy_report
  - op: bound_suite
  - op: strong_norm_check
  - op: nilpotent_certificate
"""


def test_criterion_9_determinism(tmp_path, capsys):
    same_process = _corpus_report() == _corpus_report()
    cfg = tmp_path / "exp.yaml"
    cfg.write_text(EXPERIMENT)
    reports = []
    for workers in (1, 2, 4):
        out = tmp_path / f"w{workers}"
        code = main(["experiment", str(cfg), "--workers", str(workers), "--out", str(out)])
        reports.append((code, (out / "report.json").read_bytes()))
    capsys.readouterr()
    codes_ok = all(code == 0 for code, _ in reports)
    identical = len({blob for _, blob in reports}) == 1
    checks = [
        ("acceptance corpus report is byte-identical on rerun", same_process),
        ("experiment exit status 0", codes_ok),
        ("report.json identical for 1, 2 and 4 workers", identical),
    ]
    _report(9, checks)
