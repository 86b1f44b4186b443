"""Growth of word balls X^{<=n}, degree fitting, the scale search behind the
polynomial-growth argument, and a combined nilpotency report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .approx import approx_constant
from .errors import BudgetExceeded
from .ring import Integers, MatrixRing, Ring, ZMod
from .setops import ElementSet, WordBallBuilder, sumset
from .structure import nilpotent_certificate

__all__ = [
    "GrowthSeries",
    "growth_series",
    "DegreeFit",
    "fit_degree",
    "scale_finder",
    "claim_premise",
    "reduction_map",
    "gromov_report",
    "series_csv",
    "C_of_d",
]


@dataclass
class GrowthSeries:
    """sizes[n] = |X^{<=n}| for n = 0..len(sizes)-1."""

    sizes: list[int]
    generators: list[str]
    ring_spec: dict
    truncated: bool = False
    requested: int = 0

    @property
    def n_max(self) -> int:
        return len(self.sizes) - 1

    def to_dict(self) -> dict:
        return {
            "ring": self.ring_spec,
            "generators": self.generators,
            "sizes": self.sizes,
            "truncated": self.truncated,
            "requested_n_max": self.requested,
        }


def growth_series(ring: Ring, X: ElementSet, n_max: int, max_elements: int | None = None) -> GrowthSeries:
    """Sizes of X^{<=n} for n <= n_max, each ball built from the previous one.

    When ``max_elements`` would be exceeded the series stops early and is
    flagged ``truncated``.
    """
    builder = WordBallBuilder(ring, X, max_elements)
    sizes = [1]
    truncated = False
    for _ in range(n_max):
        try:
            sizes.append(builder.step())
        except BudgetExceeded:
            truncated = True
            break
    return GrowthSeries(sizes, X.encode(), ring.spec, truncated, n_max)


@dataclass
class DegreeFit:
    """Least-squares slope of log size against log n over the series tail.

    ``residual`` is the root-mean-square log residual.  ``super_polynomial``
    is set when an exponential model (log size linear in n) fits the tail
    better than the power law and the local slope grows along the tail.
    """

    d: float
    residual: float
    points: int
    super_polynomial: bool
    exp_residual: float | None = None
    local_slopes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "residual": self.residual,
            "points": self.points,
            "super_polynomial": self.super_polynomial,
            "exp_residual": self.exp_residual,
        }


def _lstsq(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def fit_degree(series: GrowthSeries | list, tail_fraction: float = 0.5) -> DegreeFit:
    """Estimate d in |X^{<=n}| ~ C n^d from the upper ``tail_fraction`` of the series."""
    sizes = series.sizes if isinstance(series, GrowthSeries) else list(series)
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    n_max = len(sizes) - 1
    start = max(1, int(math.floor(n_max * (1 - tail_fraction))) + 1) if tail_fraction < 1 else 1
    ns = np.arange(start, n_max + 1)
    if len(ns) < 4:
        raise ValueError("degree fit needs at least 4 tail points")
    ys = np.array([sizes[n] for n in ns], dtype=float)
    if ys.min() == ys.max():
        return DegreeFit(0.0, 0.0, len(ns), False, 0.0)
    if ys.min() < 2:
        raise ValueError("degree fit needs sizes >= 2 on the tail")
    logy = np.log(ys)
    d, res = _lstsq(np.log(ns.astype(float)), logy)
    _, exp_res = _lstsq(ns.astype(float), logy)
    half = len(ns) // 2
    slopes = []
    if half >= 2:
        slopes = [
            _lstsq(np.log(ns[:half].astype(float)), logy[:half])[0],
            _lstsq(np.log(ns[half:].astype(float)), logy[half:])[0],
        ]
    growing = len(slopes) == 2 and slopes[1] > slopes[0] * 1.05 + 1e-9
    return DegreeFit(d, res, len(ns), bool(exp_res < res and growing), exp_res, slopes)


def _pow_le(a: int, b: int, d: Fraction, c: int = 8) -> bool:
    """a <= c^d * b for rational d = p/q, decided as a^q <= c^p * b^q."""
    d = Fraction(d)
    if d < 0:
        raise ValueError("d must be nonnegative")
    p, q = d.numerator, d.denominator
    return a**q <= c**p * b**q


def scale_finder(series: GrowthSeries | list, d, N: int) -> int | None:
    """Smallest n' in [N, n_max/4] with |X^{<=4n'}| <= 8^d |X^{<=n'}|, or None.

    The comparison is exact for rational d.
    """
    sizes = series.sizes if isinstance(series, GrowthSeries) else list(series)
    d = Fraction(d)
    if d <= 0 or N < 1:
        raise ValueError("d must be positive and N >= 1")
    top = (len(sizes) - 1) // 4
    if N > top:
        raise ValueError(f"empty range: N={N} exceeds n_max/4={top}")
    for n1 in range(N, top + 1):
        if _pow_le(sizes[4 * n1], sizes[n1], d):
            return n1
    return None


def claim_premise(series: GrowthSeries | list, d, N: int) -> int | None:
    """Least n > 64 N^3 in range with |X^{<=n}| <= n^d |X|, or None when unmet in range.

    |X| is read off the series as sizes[1], which equals |X| for a generating
    set containing 0.
    """
    sizes = series.sizes if isinstance(series, GrowthSeries) else list(series)
    d = Fraction(d)
    p, q = d.numerator, d.denominator
    x = sizes[1]
    for n in range(64 * N**3 + 1, len(sizes)):
        if sizes[n] ** q <= n**p * x**q:
            return n
    return None


def C_of_d(d) -> Fraction | int:
    """8^{5d} + 8^{19d}, exact when d is an integer, else rounded up to an integer."""
    d = Fraction(d)
    if d.denominator == 1:
        return 8 ** (5 * d.numerator) + 8 ** (19 * d.numerator)
    # 8^(k d) = 2^(3 k d); bound each term by an integer ceiling of the real power
    def ceil_pow2(e: Fraction) -> int:
        p, q = e.numerator, e.denominator
        target = 1 << p
        # Newton iteration for the integer q-th root, started above the root
        r = 1 << (p // q + 1)
        while True:
            nxt = ((q - 1) * r + target // r ** (q - 1)) // q
            if nxt >= r:
                break
            r = nxt
        while r**q > target:
            r -= 1
        return r if r**q == target else r + 1

    return ceil_pow2(15 * d) + ceil_pow2(57 * d)


def reduction_map(source: Ring, modulus: int) -> tuple[Ring, callable]:
    """Target ring and entrywise reduction map mod ``modulus`` for Z or M_k(Z)."""
    if isinstance(source, Integers):
        target = ZMod(modulus)
        return target, lambda x: x % modulus
    if isinstance(source, MatrixRing) and isinstance(source.base, Integers):
        target = MatrixRing(ZMod(modulus), source.k)
        return target, lambda x: tuple(e % modulus for e in x)
    raise ValueError(f"no reduction map for {source.describe()}")


def series_csv(series: GrowthSeries) -> str:
    lines = ["n,size"] + [f"{n},{s}" for n, s in enumerate(series.sizes)]
    return "\n".join(lines) + "\n"


def gromov_report(
    ring: Ring,
    X: ElementSet,
    n_max: int,
    class_max: int = 8,
    d=None,
    N: int = 1,
    quotient_modulus: int | None = None,
    max_elements: int | None = 200_000,
    cover_mode: str = "greedy",
) -> dict:
    """Growth series, degree fit, scale search and the derived approximate subring.

    With n' from the scale search, X' = X^{<=n'} satisfies
    |X'+X'+X'X'| <= 8^d |X'|, so 2X' is a C(d)-approximate subring with
    C(d) = 8^{5d} + 8^{19d}; its measured constant is compared with C(d).
    The larger set 2X^{<=4n'} is measured too.  Nilpotency is certified on
    the image of 2X' in a finite quotient (entries mod ``quotient_modulus``)
    for infinite ambients; torsion-freeness is recorded as an assumption.
    """
    series = growth_series(ring, X, n_max, max_elements)
    report: dict = {"series": series.to_dict()}
    try:
        fit = fit_degree(series)
        report["fit"] = fit.to_dict()
    except ValueError as exc:
        fit = None
        report["fit"] = {"error": str(exc)}
    if d is None:
        d = max(1, math.ceil(fit.d - 1e-9)) if fit is not None and fit.d > 0 else 1
    d = Fraction(d)
    report["d"] = str(d)
    report["C(d)"] = str(C_of_d(d))
    premise = claim_premise(series, d, N)
    report["claim_premise_n"] = premise
    report["claim_premise"] = "met" if premise is not None else "premise unmet in range"
    try:
        n1 = scale_finder(series, d, N)
    except ValueError as exc:
        report["scale"] = {"error": str(exc)}
        return report
    report["scale"] = {"n_prime": n1}
    if n1 is None:
        return report
    ball = _ball(ring, X, n1)
    X1 = sumset(ball, ball)
    rep1 = approx_constant(X1, mode=cover_mode)
    C = C_of_d(d)
    report["X_prime"] = {
        "definition": f"2 X^<={n1}",
        "size": len(X1),
        "approx_K": rep1.K,
        "exactness": rep1.certificate.exactness,
        "within_C(d)": rep1.K <= C,
    }
    big = _ball(ring, X, 4 * n1)
    X4 = sumset(big, big)
    try:
        rep4 = approx_constant(X4, mode="greedy")
        report["X_prime_4"] = {"definition": f"2 X^<={4 * n1}", "size": len(X4), "approx_K": rep4.K}
    except BudgetExceeded as exc:
        report["X_prime_4"] = {"definition": f"2 X^<={4 * n1}", "error": str(exc)}
    # nilpotency certificate, in a finite quotient when the ambient is infinite
    target, image = ring, X1
    if not ring.finite:
        report["assumptions"] = ["torsion-free ambient (not verifiable here)"]
        if quotient_modulus is None:
            report["certificate"] = {"status": "skipped: infinite ambient and no finite quotient given"}
            return report
        target, red = reduction_map(ring, quotient_modulus)
        image = ElementSet(target, {red(x) for x in X1.members})
        report["quotient"] = f"entries mod {quotient_modulus}: {target.describe()}"
    cert = nilpotent_certificate(image, m_max=3, class_max=class_max)
    if cert is None:
        report["certificate"] = {"status": "none within budget"}
    else:
        report["certificate"] = {
            "status": "found",
            "class": cert.nil_class,
            "m": cert.m,
            "subring_order": len(cert.R_prime),
            "ideal_order": len(cert.I),
        }
    return report


def _ball(ring: Ring, X: ElementSet, n: int) -> ElementSet:
    b = WordBallBuilder(ring, X)
    for _ in range(n):
        b.step()
    return b.current()
