"""Approximate-subring constants, commensurability, thickness, the classical
sumset bounds and the zero-divisor dichotomy report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import _closure
from .errors import BudgetExceeded, NotSymmetricError, SubstructureError
from .setops import (
    CoverCertificate,
    ElementSet,
    cover_number,
    difference_set,
    nfold_sum,
    nm_difference,
    productset,
    sumset,
)

__all__ = [
    "ApproxReport",
    "approx_constant",
    "commensurability",
    "ThicknessResult",
    "thickness",
    "BoundCheck",
    "bound_suite",
    "DichotomyReport",
    "dichotomy_report",
    "four_x_plus_x_four_x",
    "zero_divisors",
    "remark_bound_holds",
]


# ---------------------------------------------------------------------------
# approximate constant and commensurability
# ---------------------------------------------------------------------------


@dataclass
class ApproxReport:
    """Cover certificate for (X+X) u X*X by translates of X, and |X+X+X*X| / |X|."""

    X: ElementSet
    certificate: CoverCertificate
    growth_ratio: Fraction

    @property
    def K(self) -> int:
        return self.certificate.K

    def to_dict(self) -> dict:
        return {
            "X_size": len(self.X),
            "K": self.K,
            "exactness": self.certificate.exactness,
            "translates": self.certificate.translates.encode(),
            "growth_ratio": str(self.growth_ratio),
        }


def approx_constant(
    X: ElementSet, mode: str = "greedy", budget_nodes: int = 10**6, require_symmetric: bool = True
) -> ApproxReport:
    """Fewest translates of X covering (X+X) u X*X, plus the growth ratio."""
    if require_symmetric and not X.is_symmetric:
        raise NotSymmetricError("approximate subrings are additively symmetric")
    if not X.members:
        raise ValueError("X is empty")
    s, p = sumset(X, X), productset(X, X)
    cert = cover_number(s | p, X, mode=mode, budget_nodes=budget_nodes)
    ratio = Fraction(len(sumset(s, p)), len(X))
    return ApproxReport(X, cert, ratio)


def commensurability(
    X: ElementSet, Y: ElementSet, mode: str = "greedy", budget_nodes: int = 10**6
) -> tuple[CoverCertificate, CoverCertificate]:
    """(X covered by translates of Y, Y covered by translates of X)."""
    return (
        cover_number(X, Y, mode=mode, budget_nodes=budget_nodes),
        cover_number(Y, X, mode=mode, budget_nodes=budget_nodes),
    )


# ---------------------------------------------------------------------------
# thickness
# ---------------------------------------------------------------------------


@dataclass
class ThicknessResult:
    """N = 1 + (largest D-free subset of Y).

    In exact mode ``N == N_upper`` and ``witness`` is a largest D-free
    subset.  In greedy mode ``witness`` is a D-free subset found greedily, so
    ``N = 1 + |witness|`` is a lower bound, and ``N_upper`` comes from a
    clique cover of the difference graph.
    """

    N: int
    witness: ElementSet
    exactness: str
    N_upper: int
    nodes: int = 0

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "N_upper": self.N_upper,
            "exactness": self.exactness,
            "witness": self.witness.encode(),
        }


def _difference_graph(D: ElementSet, Y: list) -> list[int]:
    """Adjacency bitmasks: i ~ j when y_i - y_j or y_j - y_i lies in D (i != j)."""
    ring = D.ring
    d = D.members
    n = len(Y)
    adj = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if ring.sub(Y[i], Y[j]) in d or ring.sub(Y[j], Y[i]) in d:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _greedy_independent(adj: list[int], n: int) -> list[int]:
    """Minimum-degree greedy independent set."""
    alive = (1 << n) - 1
    out = []
    while alive:
        v = min(_bits(alive), key=lambda u: ((adj[u] & alive).bit_count(), u))
        out.append(v)
        alive &= ~(adj[v] | (1 << v))
    return out


def _clique_cover_size(adj: list[int], n: int) -> int:
    """Greedy colouring of the complement graph: a clique cover of the graph."""
    cliques: list[int] = []
    for v in sorted(range(n), key=lambda u: -adj[u].bit_count()):
        for k, c in enumerate(cliques):
            if c & ~adj[v] == 0:  # v adjacent to every member of clique k
                cliques[k] = c | (1 << v)
                break
        else:
            cliques.append(1 << v)
    return len(cliques)


def _max_independent(adj: list[int], n: int, lower: list[int], budget: int) -> tuple[list[int], int]:
    """Maximum independent set = maximum clique of the complement graph.

    Branch and bound in the style of Tomita's MCQ: candidates are coloured
    greedily in the complement and the colour count bounds the clique size.
    """
    full = (1 << n) - 1
    comp = [full & ~adj[v] & ~(1 << v) for v in range(n)]
    best = list(lower)
    nodes = 0

    def colour_order(P: int):
        order, bounds = [], []
        colour = 0
        uncol = P
        while uncol:
            colour += 1
            Q = uncol
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~low & ~comp[v]  # same colour class: pairwise non-adjacent in comp
                uncol &= ~low
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(C: list[int], P: int):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"independent-set search exceeded {budget} nodes", reached=nodes)
        order, bounds = colour_order(P)
        for k in range(len(order) - 1, -1, -1):
            if len(C) + bounds[k] <= len(best):
                return
            v = order[k]
            C.append(v)
            newP = P & comp[v]
            if newP:
                expand(C, newP)
            elif len(C) > len(best):
                best = list(C)
            C.pop()
            P &= ~(1 << v)

    if n:
        expand([], full)
    return best, nodes


def thickness(D: ElementSet, Y: ElementSet, mode: str = "exact", budget_nodes: int = 10**6) -> ThicknessResult:
    """Least N such that any N elements of Y contain two whose difference lies in D.

    Requires 0 in D, which makes repeated elements automatically D-close so
    only distinct elements matter.  D need not lie inside Y.
    """
    D._check(Y)
    ring = D.ring
    if ring.zero not in D.members:
        raise ValueError("thickness needs 0 in D")
    elems = Y.sorted()
    n = len(elems)
    adj = _difference_graph(D, elems)
    greedy = _greedy_independent(adj, n)
    upper = _clique_cover_size(adj, n)
    if mode == "greedy":
        chosen, nodes, exactness, hi = greedy, 0, "greedy-bounds", upper
    elif mode == "exact":
        chosen, nodes = _max_independent(adj, n, greedy, budget_nodes)
        exactness, hi = "exact", len(chosen)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    witness = ElementSet._wrap(ring, frozenset(elems[i] for i in chosen))
    return ThicknessResult(1 + len(chosen), witness, exactness, 1 + hi, nodes)


# ---------------------------------------------------------------------------
# classical bounds
# ---------------------------------------------------------------------------


@dataclass
class BoundCheck:
    """One verified conclusion: ``value`` against ``bound``.

    status is "pass", "fail" (a cardinality inequality is violated: a bug,
    since these are theorems) or "inconclusive" (no cover within the bound
    was found inside the search budget).
    """

    name: str
    hypothesis_K: int
    value: int
    bound: int
    status: str
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        bound = self.bound if self.bound < 10**18 else _sci(self.bound)
        return {
            "name": self.name,
            "K": self.hypothesis_K,
            "value": self.value,
            "bound": bound,
            "status": self.status,
            **({"detail": self.detail} if self.detail else {}),
        }


def _sci(n: int) -> str:
    """Scientific notation for a positive int too large for a float (truncated mantissa)."""
    digits = str(n)
    return f"{digits[0]}.{digits[1:7]}e+{len(digits) - 1}"


def _ceil_ratio(a: int, b: int) -> int:
    return -(-a // b)


def _cover_check(name: str, K: int, target: ElementSet, by: ElementSet, bound: int, budget: int) -> BoundCheck:
    cert = cover_number(target, by, mode="greedy")
    if cert.K > bound:
        try:
            cert = cover_number(target, by, mode="exact", budget_nodes=budget)
        except BudgetExceeded:
            return BoundCheck(name, K, cert.K, bound, "inconclusive", {"reason": "exact search over budget"})
    status = "pass" if cert.K <= bound else "inconclusive"
    return BoundCheck(name, K, cert.K, bound, status, {"exactness": cert.exactness})


def bound_suite(
    X: ElementSet, H: ElementSet | None = None, budget_nodes: int = 10**5, max_nm: int = 4
) -> list[BoundCheck]:
    """Check the classical sumset and approximate-subring bounds on X.

    * Plunnecke-Ruzsa: with K = ceil(|X+X| / |X|), |nX - mX| <= K^{n+m} |X|
      for 1 <= n+m <= ``max_nm``, and 2(X-X) is covered by K^5 translates
      of X-X.
    * With K = ceil(|X+X+X*X| / |X|), X-X is a (K^5 + K^19)-approximate
      subring.
    * With K the certified approximate constant of X (X symmetric),
      Z = X + X*X satisfies Z + Z within K^2 translates of Z.
    * Given a subring H, Y = (4X + X*4X) n H is a (K^510 + K^22)-approximate
      subring.
    """
    if not X.members:
        raise ValueError("X is empty")
    checks: list[BoundCheck] = []
    size = len(X)
    XX = sumset(X, X)
    K1 = _ceil_ratio(len(XX), size)
    for total in range(1, max_nm + 1):
        for n in range(total, -1, -1):
            m = total - n
            value = len(nm_difference(X, n, m))
            bound = K1**total * size
            checks.append(
                BoundCheck(f"sumset |{n}X-{m}X|", K1, value, bound, "pass" if value <= bound else "fail")
            )
    D = difference_set(X)
    checks.append(_cover_check("difference set approximate subgroup", K1, sumset(D, D), D, K1**5, budget_nodes))

    K2 = _ceil_ratio(len(sumset(XX, productset(X, X))), size)
    target = sumset(D, D) | productset(D, D)
    checks.append(_cover_check("difference set approximate subring", K2, target, D, K2**5 + K2**19, budget_nodes))

    if X.is_symmetric:
        K3 = approx_constant(X).K
        Z = sumset(X, productset(X, X))
        checks.append(_cover_check("X+X*X approximate subgroup", K3, sumset(Z, Z), Z, K3**2, budget_nodes))
        if H is not None:
            if not _closure_ok(H):
                raise SubstructureError("H is not a subring")
            Y = four_x_plus_x_four_x(X) & H
            tgt = sumset(Y, Y) | productset(Y, Y)
            checks.append(
                _cover_check("intersection with a subring", K3, tgt, Y, K3**510 + K3**22, budget_nodes)
            )
    return checks


def _closure_ok(H: ElementSet) -> bool:
    from .structure import verify_substructure

    return bool(verify_substructure("subring", H))


# ---------------------------------------------------------------------------
# dichotomy
# ---------------------------------------------------------------------------


def four_x_plus_x_four_x(X: ElementSet) -> ElementSet:
    """{a + x*b : a, b in 4X, x in X}."""
    F = nfold_sum(X, 4)
    return sumset(F, productset(X, F))


def zero_divisors(S: ElementSet, R: ElementSet) -> ElementSet:
    """Members s of S with s*r = 0 or r*s = 0 for some nonzero r in R.

    0 counts as a zero divisor whenever R is nonzero.
    """
    ring = S.ring
    zero = ring.zero
    nonzero = [r for r in R.sorted() if r != zero]
    out = [s for s in S.sorted() if any(ring.mul(s, r) == zero or ring.mul(r, s) == zero for r in nonzero)]
    return ElementSet._wrap(ring, frozenset(out))


@dataclass
class DichotomyReport:
    """Y = 4X + X*4X, whether Y is a subring, and the thickness of its zero divisors."""

    Y: ElementSet
    is_subring: bool
    zero_divisors: ElementSet
    thickness: ThicknessResult | None
    growth_ratio: Fraction
    remark: str = ""

    def to_dict(self) -> dict:
        return {
            "Y_size": len(self.Y),
            "is_subring": self.is_subring,
            "zero_divisor_count": len(self.zero_divisors),
            "zero_divisors": self.zero_divisors.encode(),
            "thickness": None if self.thickness is None else self.thickness.to_dict(),
            "growth_ratio": str(self.growth_ratio),
            "remark": self.remark,
        }


def dichotomy_report(X: ElementSet, mode: str = "exact", budget_nodes: int = 10**6) -> DichotomyReport:
    """Measure both sides of the zero-divisor / subring dichotomy for Y = 4X + X*4X.

    Zero divisors are taken inside <X>.  The symmetrised set
    D = Z u -Z u {0} is measured for thickness in Y in every case, so the
    number is available even when Y is a subring.
    """
    if not X.is_symmetric:
        raise NotSymmetricError("X must be additively symmetric")
    from .structure import verify_substructure

    ring = X.ring
    Y = four_x_plus_x_four_x(X)
    is_sub = bool(verify_substructure("subring", Y))
    span = ElementSet._wrap(ring, frozenset(_closure.subring_closure(ring, X.sorted())))
    Z = zero_divisors(Y, span)
    D = Z.symmetrized()
    try:
        th = thickness(D, Y, mode=mode, budget_nodes=budget_nodes)
        remark = ""
    except BudgetExceeded:
        th = thickness(D, Y, mode="greedy")
        remark = "exact thickness over budget; greedy bounds reported"
    ratio = Fraction(len(sumset(sumset(X, X), productset(X, X))), len(X))
    return DichotomyReport(Y, is_sub, Z, th, ratio, remark)


def remark_bound_holds(D: ElementSet, Y: ElementSet, result: ThicknessResult) -> bool:
    """|D| >= |Y| / (N-1), the covering consequence of exact N-thickness."""
    if result.exactness != "exact":
        raise ValueError("the inequality is only asserted for exact thickness")
    if result.N <= 1:
        return len(Y) == 0
    return len(D) * (result.N - 1) >= len(Y)

