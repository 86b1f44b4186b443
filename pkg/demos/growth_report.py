"""Word-ball growth and what polynomial growth buys.

The word ball B(n) holds every sum or product of words of at most n letters
from X.  In Z even {-1,0,1} grows quickly because products of sums appear,
while the Heisenberg-type triangular matrices grow polynomially.  The report
then finds a scale n', builds X' from the ball at that scale, and certifies
nilpotency in a finite quotient.
"""

from __future__ import annotations

from approxring.growth import fit_degree, gromov_report, growth_series
from approxring.ring import Integers, MatrixRing
from approxring.setops import ElementSet, interval


def main() -> None:
    Z = Integers()
    X = interval(Z, -1, 1)
    series = growth_series(Z, X, 16)
    fit = fit_degree(series)
    print("Z with X = {-1,0,1}")
    print(f"  ball sizes: {series.sizes}")
    print(f"  fitted degree {fit.d:.2f}, super-polynomial: {fit.super_polynomial}")

    M = MatrixRing(Integers(), 3)
    gens = [M.unit(1, 2), M.unit(2, 3)]
    T = ElementSet(M, [M.zero, *gens, *(M.neg(g) for g in gens)])
    rep = gromov_report(M, T, 14, quotient_modulus=8)
    print("\nStrictly upper triangular 3x3 integer matrices")
    print(f"  ball sizes: {rep['series']['sizes']}")
    print(f"  fitted degree {rep['fit']['d']:.2f}, residual {rep['fit']['residual']:.4f}")
    print(f"  scale: {rep['scale']}")
    print(f"  certificate in the quotient mod 8: {rep['certificate']['status']}, class {rep['certificate'].get('class')}")


if __name__ == "__main__":
    main()
