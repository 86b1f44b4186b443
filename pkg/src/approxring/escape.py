"""Escape norms with respect to a finite set, and a checker for the three
strong-norm inequalities.

||r||_X = 1/(nu+1) where nu is the largest integer with 0, r, 2r, ..., nu*r
all in X, and ||r||_X = 0 when the whole additive cycle of r stays in X.
For finite X the scan always stops: an element of infinite additive order
has pairwise distinct multiples, so one of them leaves X.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _closure
from .errors import NotSymmetricError
from .setops import ElementSet

__all__ = [
    "NormValue",
    "escape_norm",
    "norm_table",
    "norm_zero_set",
    "norm_zero_is_ideal",
    "strong_norm_check",
    "StrongNormReport",
]


@dataclass(frozen=True)
class NormValue:
    """Escape norm; ``nu`` is None when no multiple ever leaves X (value 0)."""

    nu: int | None

    @property
    def value(self) -> Fraction:
        return Fraction(0) if self.nu is None else Fraction(1, self.nu + 1)

    # value as num/den with small integers, for vectorised comparisons
    @property
    def num_den(self) -> tuple[int, int]:
        return (0, 1) if self.nu is None else (1, self.nu + 1)

    def __str__(self):
        return str(self.value)


def escape_norm(X: ElementSet, r) -> NormValue:
    """||r||_X for an element r of X's ring."""
    ring = X.ring
    r = ring.canon(r)
    members = X.members
    if ring.zero not in members:
        raise ValueError("escape norm needs 0 in X")
    acc, nu = r, 0
    while acc in members:
        if acc == ring.zero:
            return NormValue(None)
        nu += 1
        acc = ring.add(acc, r)
    return NormValue(nu)


def norm_table(X: ElementSet, elems) -> dict:
    """Escape norms of many elements (norm 1 for everything outside X)."""
    ring = X.ring
    members = X.members
    if ring.zero not in members:
        raise ValueError("escape norm needs 0 in X")
    return {r: escape_norm(X, r) if r in members else NormValue(0) for r in elems}


def norm_zero_set(X: ElementSet) -> ElementSet:
    """{r in <X> : ||r||_X = 0}; such r lie in X together with all their multiples."""
    ring = X.ring
    return ElementSet._wrap(ring, frozenset(r for r in X.members if escape_norm(X, r).nu is None))


def norm_zero_is_ideal(X: ElementSet) -> bool:
    """Whether the norm-zero set is a two-sided ideal of <X>."""
    from .structure import generated_subring, verify_substructure

    return bool(verify_substructure("ideal", norm_zero_set(X), generated_subring(X)))


@dataclass
class StrongNormReport:
    """Per-property verdicts and counterexample pairs (encoded)."""

    span_size: int
    exhaustive: bool
    passed: dict
    counterexamples: dict
    checked_pairs: dict

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def first(self, prop: str):
        c = self.counterexamples[prop]
        return c[0] if c else None

    def to_dict(self) -> dict:
        return {
            "span_size": self.span_size,
            "exhaustive": self.exhaustive,
            "passed": self.passed,
            "counterexamples": self.counterexamples,
            "checked_pairs": self.checked_pairs,
        }


def _op_index_table(ring, elems: list, op: str) -> np.ndarray:
    """Matrix T with elems[T[i, j]] = elems[i] op elems[j]; elems must be closed under op."""
    n = len(elems)
    index = {x: i for i, x in enumerate(elems)}
    if ring.vec_dim:
        arr = ring.to_array(elems)
        if arr is not None:
            out = (ring.mul_outer if op == "mul" else ring.add_outer)(arr, arr)
            if out is not None:
                arr = np.ascontiguousarray(arr)
                out = np.ascontiguousarray(out)
                vt = np.dtype((np.void, arr.dtype.itemsize * arr.shape[1]))
                keys = arr.view(vt).ravel()
                order = np.argsort(keys)
                pos = np.searchsorted(keys[order], out.view(vt).ravel())
                return order[pos].reshape(n, n)
    f = ring.mul if op == "mul" else ring.add
    return np.array([[index[f(a, b)] for b in elems] for a in elems], dtype=np.int64)


def strong_norm_check(
    Z: ElementSet,
    sample_budget: int = 200_000,
    seed: int = 0,
    exhaustive_limit: int = 512,
    max_reported: int = 20,
) -> StrongNormReport:
    """Test the three strong-norm inequalities for ||.||_Z on <Z>.

    (1) ||x+y|| <= 4 max(||x||, ||y||) for x, y in <Z>;
    (2) ||xy|| <= 2 ||x|| ||y|| for x, y in Z;
    (3) ||xy|| = ||yx|| = 0 whenever ||x|| = 0, for y in <Z>.
    Pairs are scanned exhaustively when |<Z>| <= ``exhaustive_limit``,
    otherwise ``sample_budget`` seeded random pairs are drawn per property.
    Counterexamples are data, not errors: the inequalities are guaranteed
    only for specially constructed Z.
    """
    ring = Z.ring
    if not Z.is_symmetric:
        raise NotSymmetricError("Z must be additively symmetric with 0 in Z")
    span = sorted(_closure.subring_closure(ring, Z.sorted()), key=ring.sort_key)
    n = len(span)
    norms = norm_table(Z, span)
    num = np.array([norms[x].num_den[0] for x in span], dtype=np.int64)
    den = np.array([norms[x].num_den[1] for x in span], dtype=np.int64)
    in_z = np.array([x in Z.members for x in span])
    exhaustive = n <= exhaustive_limit
    rng = np.random.default_rng(np.random.SeedSequence([seed, n]))

    if exhaustive:
        add_t = _op_index_table(ring, span, "add")
        mul_t = _op_index_table(ring, span, "mul")
        I, J = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        I, J = I.ravel(), J.ravel()
        S, P = add_t[I, J], mul_t[I, J]
    else:
        I = rng.integers(0, n, size=sample_budget)
        J = rng.integers(0, n, size=sample_budget)
        index = {x: i for i, x in enumerate(span)}
        S = np.array([index[ring.add(span[i], span[j])] for i, j in zip(I.tolist(), J.tolist())])
        P = np.array([index[ring.mul(span[i], span[j])] for i, j in zip(I.tolist(), J.tolist())])

    # (1) num_s/den_s <= 4 * max(num_i/den_i, num_j/den_j)
    i_bigger = num[I] * den[J] >= num[J] * den[I]
    mnum = np.where(i_bigger, num[I], num[J])
    mden = np.where(i_bigger, den[I], den[J])
    bad1 = num[S] * mden > 4 * mnum * den[S]
    # (2) only pairs inside Z: num_p/den_p <= 2 num_i num_j / (den_i den_j)
    both_z = in_z[I] & in_z[J]
    bad2 = both_z & (num[P] * den[I] * den[J] > 2 * num[I] * num[J] * den[P])
    # (3) a zero-norm factor on either side forces a zero-norm product
    zero_factor = (num[I] == 0) | (num[J] == 0)
    bad3 = zero_factor & (num[P] != 0)

    def report(bad, op):
        idx = np.flatnonzero(bad)[:max_reported]
        f = ring.add if op == "add" else ring.mul
        return [
            [ring.encode(span[I[k]]), ring.encode(span[J[k]]), ring.encode(f(span[I[k]], span[J[k]]))]
            for k in idx.tolist()
        ]

    counter = {"1": report(bad1, "add"), "2": report(bad2, "mul"), "3": report(bad3, "mul")}
    return StrongNormReport(
        span_size=n,
        exhaustive=exhaustive,
        passed={k: not v for k, v in counter.items()},
        counterexamples=counter,
        checked_pairs={"1": int(len(I)), "2": int(both_z.sum()), "3": int(zero_factor.sum())},
    )
