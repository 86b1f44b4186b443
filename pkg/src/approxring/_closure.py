"""Closure primitives over finite additive orders.

All three closures keep an explicit list of additive generators, so the
multiplicative checks cost O(#generators * |R|) rather than O(|I| * |R|).
Every extension at least doubles the subgroup, which keeps the generator
list logarithmic in its size.
"""

from __future__ import annotations

import math

from .errors import InfiniteRingError


def extend_subgroup(ring, group: set, g) -> set:
    """Return the additive subgroup generated by ``group`` and ``g``.

    ``group`` must already be an additive subgroup (it may be mutated-free:
    a new set is returned).
    """
    if g in group:
        return group
    cosets = [group]
    k_g = g
    steps = 1
    while k_g not in group:
        cosets.append({ring.add(h, k_g) for h in group})
        k_g = ring.add(k_g, g)
        steps += 1
        if steps > 1 << 22 and not ring.finite:
            raise InfiniteRingError("element of infinite additive order: no finite subgroup")
    out = set()
    for c in cosets:
        out |= c
    return out


def additive_closure(ring, gens) -> tuple[set, list]:
    """Subgroup generated by ``gens``; also returns a generating subset."""
    group = {ring.zero}
    basis = []
    for g in gens:
        if g not in group:
            if not ring.finite and ring.additive_order(g) == math.inf:
                raise InfiniteRingError(f"{ring.encode(g)} has infinite additive order")
            group = extend_subgroup(ring, group, g)
            basis.append(g)
    return group, basis


def ideal_closure(ring, r_elems, seeds) -> set:
    """Two-sided ideal of the subring ``r_elems`` generated by ``seeds``."""
    r_elems = list(r_elems)
    group, basis = additive_closure(ring, seeds)
    queue = list(basis)
    while queue:
        g = queue.pop()
        for r in r_elems:
            for p in (ring.mul(r, g), ring.mul(g, r)):
                if p not in group:
                    group = extend_subgroup(ring, group, p)
                    queue.append(p)
    return group


def subring_closure(ring, seeds) -> set:
    """Least subring (not necessarily unital) containing ``seeds``."""
    group, basis = additive_closure(ring, seeds)
    gens = list(basis)
    i = 0
    # products of every ordered pair of generators, including newly created ones
    while i < len(gens):
        for j in range(i + 1):
            for p in (ring.mul(gens[i], gens[j]), ring.mul(gens[j], gens[i])):
                if p not in group:
                    group = extend_subgroup(ring, group, p)
                    gens.append(p)
        i += 1
    return group
