"""How far is a set from being closed under ring operations?

We take a few symmetric sets, measure how many translates of X are needed
to cover (X+X) u X*X, and then look at Y = 4X + X*4X: either Y is a
subring, or its zero divisors are thick inside it.
"""

from __future__ import annotations

import numpy as np

from approxring.approx import approx_constant, dichotomy_report
from approxring.errors import BudgetExceeded
from approxring.ring import Integers, ZMod
from approxring.setops import ElementSet, interval, random_symmetric


def show(label: str, X: ElementSet) -> None:
    try:
        rep, note = approx_constant(X, mode="exact"), ""
    except BudgetExceeded:
        # exact cover search is exponential; greedy gives an upper bound within a log factor
        rep, note = approx_constant(X, mode="greedy"), " (greedy upper bound)"
    print(f"{label:<28} |X|={len(X):<3} K={rep.K:<3} growth ratio={rep.growth_ratio}{note}")


def main() -> None:
    print("Approximate constants (exact cover search)")
    Z = Integers()
    for k in (1, 2, 4):
        show(f"[-{k},{k}] in Z", interval(Z, -k, k))
    show("even residues in Z/12", ElementSet(ZMod(12), range(0, 12, 2)))
    show("{0,1,6} in Z/7", ElementSet(ZMod(7), [0, 1, 6]))
    rng = np.random.default_rng(7)
    show("random 9-set in Z/101", random_symmetric(ZMod(101), 9, rng))

    print("\nThe dichotomy for Y = 4X + X*4X")
    for label, X in [
        ("{0,3,6,9} in Z/12", ElementSet(ZMod(12), [0, 3, 6, 9])),
        ("{-1,0,1} in Z/15", interval(ZMod(15), -1, 1)),
        ("{-1,0,1} in Z/16", interval(ZMod(16), -1, 1)),
        ("{-1,0,1} in Z/101", interval(ZMod(101), -1, 1)),
    ]:
        rep = dichotomy_report(X)
        thick = rep.thickness.N if rep.thickness else None
        print(
            f"{label:<20} |Y|={len(rep.Y):<3} subring={rep.is_subring!s:<5} "
            f"zero divisors={len(rep.zero_divisors):<3} thickness={thick}"
        )


if __name__ == "__main__":
    main()
