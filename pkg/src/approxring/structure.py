"""Generated subrings and ideals, nilpotency, and nilpotent-quotient certificates.

A "subring" here is an :class:`ElementSet` closed under +, - and *; rings
need not be unital.  Powers R^k are additive spans, R^1 = R and
R^{k+1} = span(R * R^k), so R is nilpotent of class n when R^{n+1} = {0}
and R^n != {0} (the zero ring has class 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import _closure
from .errors import InfiniteRingError, NotSymmetricError, SubstructureError
from .ring import Ring, _closed_under, _ideal_violation
from .setops import CoverCertificate, ElementSet, cover_number, iterate_xn, xn_step

__all__ = [
    "CheckResult",
    "verify_substructure",
    "generated_subring",
    "generated_ideal",
    "largest_ideal_within",
    "ring_powers",
    "nilpotency_class",
    "nilpotent_base",
    "is_nilpotent_base",
    "NilpotentCertificate",
    "nilpotent_certificate",
]


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a closure check; truthy iff the check passed."""

    ok: bool
    witness: tuple | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _as_members(ring: Ring, R) -> list:
    if R is None:
        return ring.elements()
    if isinstance(R, ElementSet):
        return R.sorted()
    return sorted((ring.canon(x) for x in R), key=ring.sort_key)


def verify_substructure(kind: str, S: ElementSet, parent: ElementSet | None = None) -> CheckResult:
    """Check that S is a subring, or a two-sided ideal of ``parent``.

    ``kind`` is ``"subring"`` or ``"ideal"``; an ideal is checked against
    ``parent`` (default: the whole ambient ring).  On failure the witness is
    ``(description, a, b)`` with the offending operands.
    """
    ring = S.ring
    if kind == "subring":
        bad = _closed_under(ring, S.members)
    elif kind == "ideal":
        if parent is not None:
            S._check(parent)
            outside = [s for s in S.sorted() if s not in parent.members]
            if outside:
                return CheckResult(False, ("not inside R'", outside[0], None), "S is not inside R'")
        bad = _ideal_violation(ring, _as_members(ring, parent), S.members)
    else:
        raise ValueError(f"unknown substructure kind {kind!r}")
    if bad is None:
        return CheckResult(True)
    desc, a, b = bad
    shown = ", ".join(ring.encode(x) for x in (a, b) if x is not None)
    return CheckResult(False, bad, f"{desc} ({shown})")


def generated_subring(X: ElementSet, truncation=None, max_steps: int = 64) -> ElementSet:
    """Least subring containing X.

    Finite rings use generator-based closure.  Over a discrete infinite ring
    the X_n recursion is run under ``truncation`` and must stabilise within
    ``max_steps`` steps without losing elements to the truncation.
    """
    ring = X.ring
    if ring.finite:
        return ElementSet._wrap(ring, frozenset(_closure.subring_closure(ring, X.sorted())))
    if truncation is None:
        raise InfiniteRingError("generated_subring over an infinite ring needs a truncation")
    cur = X.symmetrized().members
    for _ in range(max_steps):
        nxt = xn_step(ring, cur)
        if any(not truncation(x) for x in nxt):
            raise InfiniteRingError("generated subring leaves the truncation region")
        if nxt == cur:
            return ElementSet._wrap(ring, cur)
        cur = nxt
    raise InfiniteRingError(f"no stabilisation within {max_steps} steps")


def generated_ideal(R_prime: ElementSet, S: ElementSet) -> ElementSet:
    """Least two-sided ideal of the subring R' containing S (S itself included)."""
    R_prime._check(S)
    if not S.members <= R_prime.members:
        extra = next(s for s in S.sorted() if s not in R_prime.members)
        raise SubstructureError(
            f"{S.ring.encode(extra)} is not in R'", witness=("outside", extra, None)
        )
    ring = S.ring
    return ElementSet._wrap(ring, frozenset(_closure.ideal_closure(ring, R_prime.sorted(), S.sorted())))


def largest_ideal_within(R_prime: ElementSet, S: ElementSet, return_unique: bool = False):
    """A largest two-sided ideal of R' contained in S.

    Principal ideals inside S are collected in sorted order and merged as
    long as the merged ideal stays inside S.  When the ideal generated by
    all of them fits inside S it is the unique largest one; otherwise ideals
    inside S have no single maximum and the result is one maximal choice.
    With ``return_unique`` the pair ``(ideal, unique)`` is returned.
    """
    ring = S.ring
    R_prime._check(S)
    if ring.zero not in S.members:
        raise SubstructureError("0 is not in S", witness=("0 missing", ring.zero, None))
    r_elems = R_prime.sorted()
    inside = S.members & R_prime.members
    qualifying = []
    for r in sorted(inside, key=ring.sort_key):
        if r == ring.zero:
            continue
        principal = _closure.ideal_closure(ring, r_elems, [r])
        if principal <= inside:
            qualifying.append(r)
    total = _closure.ideal_closure(ring, r_elems, qualifying)
    unique = total <= inside
    if unique:
        ideal = total
    else:
        ideal = {ring.zero}
        gens: list = []
        for r in qualifying:
            if r in ideal:
                continue
            trial = _closure.ideal_closure(ring, r_elems, gens + [r])
            if trial <= inside:
                ideal, gens = trial, gens + [r]
    out = ElementSet._wrap(ring, frozenset(ideal))
    return (out, unique) if return_unique else out


def ring_powers(R, max_power: int, modulo: ElementSet | None = None) -> list[frozenset]:
    """[R^1, R^2, ...] as additive spans (each taken + I when ``modulo`` = I).

    Stops after ``max_power`` terms, or as soon as a term is inside I
    (or is {0}), or when the sequence becomes stationary.
    """
    if isinstance(R, Ring):
        ring, members = R, R.elements()
    else:
        ring = R.ring
        members = R.sorted()
    base = set(modulo.members) if modulo is not None else {ring.zero}
    base_gens = modulo.sorted() if modulo is not None else []
    group, _ = _closure.additive_closure(ring, list(members) + base_gens)
    r_gens = _closure.additive_closure(ring, members)[1]
    powers = [frozenset(group)]
    while len(powers) < max_power and not powers[-1] <= base:
        cur_gens = _closure.additive_closure(ring, sorted(powers[-1], key=ring.sort_key))[1]
        prods = [ring.mul(a, b) for a in r_gens for b in cur_gens]
        nxt, _ = _closure.additive_closure(ring, base_gens + prods)
        nxt = frozenset(nxt)
        if nxt == powers[-1]:
            break
        powers.append(nxt)
    return powers


def nilpotency_class(R, max_class: int = 32, modulo: ElementSet | None = None) -> int | None:
    """Least n <= max_class with R^{n+1} = {0} (inside ``modulo`` when given).

    ``R`` is a finite :class:`Ring` or a subring given as an ElementSet;
    ``modulo`` = I computes the class of R/I without building the quotient.
    Returns None when R is not nilpotent of class <= max_class.
    """
    ring = R if isinstance(R, Ring) else R.ring
    base = modulo.members if modulo is not None else frozenset({ring.zero})
    powers = ring_powers(R, max_class + 1, modulo)
    for n, P in enumerate(powers):
        if P <= base:
            return n  # P = R^{n+1}
    return None


def _annihilator_size(ring: Ring, members: list, u) -> int:
    zero = ring.zero
    return sum(1 for r in members if ring.mul(u, r) == zero and ring.mul(r, u) == zero)


def is_nilpotent_base(R, base: list, modulo: ElementSet | None = None) -> CheckResult:
    """Check the nilpotent-base conditions for an ordered tuple u_1..u_n.

    For i <= j both u_i*u_j and u_j*u_i must lie in the subring generated
    by u_1..u_{i-1} (plus I when ``modulo`` = I), and u_1..u_n (plus I) must
    generate R.
    """
    ring = R if isinstance(R, Ring) else R.ring
    members = frozenset(_as_members(ring, None if isinstance(R, Ring) else R))
    extra = modulo.sorted() if modulo is not None else []
    prefix = [frozenset(_closure.subring_closure(ring, extra))]
    for k in range(len(base)):
        prefix.append(frozenset(_closure.subring_closure(ring, extra + list(base[:k + 1]))))
    for i, ui in enumerate(base):
        for j in range(i, len(base)):
            uj = base[j]
            for p in (ring.mul(ui, uj), ring.mul(uj, ui)):
                if p not in prefix[i]:
                    return CheckResult(False, ("product escapes", ui, uj), f"u{i + 1}*u{j + 1} not in earlier span")
    if prefix[-1] != members:
        return CheckResult(False, ("does not generate", None, None), "base does not generate R")
    return CheckResult(True)


def nilpotent_base(
    R, n: int, modulo: ElementSet | None = None, budget_nodes: int = 100_000
) -> list | None:
    """Search for a nilpotent base of length <= n.

    Candidates are tried in order of decreasing annihilator size (then
    element order), with iterative deepening on the length.  A return of
    None means no base was found within ``n`` and the node budget; it does
    not prove that none exists.
    """
    ring = R if isinstance(R, Ring) else R.ring
    members = _as_members(ring, None if isinstance(R, Ring) else R)
    target = frozenset(members)
    extra = modulo.sorted() if modulo is not None else []
    start = frozenset(_closure.subring_closure(ring, extra))
    if start >= target:
        return []
    order = sorted(
        (u for u in members if u not in start),
        key=lambda u: (-_annihilator_size(ring, members, u), ring.sort_key(u)),
    )
    nodes = 0

    def extend(chain: list, spans: list, depth: int):
        nonlocal nodes
        if spans[-1] >= target:
            return list(chain)
        if len(chain) == depth:
            return None
        for u in order:
            if u in spans[-1]:
                continue
            nodes += 1
            if nodes > budget_nodes:
                return None
            # u joins at position j = len(chain); every earlier u_k must satisfy
            # u_k*u, u*u_k in span(u_1..u_{k-1}); u*u must lie in span(u_1..u_{j-1})
            ok = all(
                ring.mul(uk, u) in spans[k] and ring.mul(u, uk) in spans[k]
                for k, uk in enumerate(chain)
            ) and ring.mul(u, u) in spans[-1]
            if not ok:
                continue
            new_span = frozenset(_closure.subring_closure(ring, extra + chain + [u]))
            chain.append(u)
            spans.append(new_span)
            found = extend(chain, spans, depth)
            chain.pop()
            spans.pop()
            if found is not None:
                return found
        return None

    for depth in range(1, n + 1):
        found = extend([], [start], depth)
        if found is not None:
            return found
        if nodes > budget_nodes:
            return None
    return None


@dataclass
class NilpotentCertificate:
    """R' a subring, I an ideal of R' inside X_m, and R'/I nilpotent of class ``nil_class``.

    All claims are rechecked on construction.
    """

    X: ElementSet
    R_prime: ElementSet
    I: ElementSet
    m: int
    nil_class: int
    base: list | None = None
    coset_count: CoverCertificate | None = None
    notes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not verify_substructure("subring", self.R_prime):
            raise SubstructureError("R' is not a subring")
        check = verify_substructure("ideal", self.I, self.R_prime)
        if not check:
            raise SubstructureError(f"I is not an ideal of R': {check.message}", witness=check.witness)
        if not self.I.members <= iterate_xn(self.X, self.m).members:
            raise SubstructureError(f"I is not inside X_{self.m}")
        if nilpotency_class(self.R_prime, self.nil_class, modulo=self.I) != self.nil_class:
            raise SubstructureError(f"R'/I does not have class {self.nil_class}")
        if self.base is not None and not is_nilpotent_base(self.R_prime, self.base, modulo=self.I):
            raise SubstructureError("recorded base is not a nilpotent base of R'/I")

    def to_dict(self) -> dict:
        ring = self.X.ring
        return {
            "ring": ring.spec,
            "X": self.X.encode(),
            "R_prime": self.R_prime.encode(),
            "I": self.I.encode(),
            "m": self.m,
            "class": self.nil_class,
            "base": None if self.base is None else [ring.encode(u) for u in self.base],
            "coset_count": None if self.coset_count is None else self.coset_count.K,
            "cosets": None if self.coset_count is None else self.coset_count.translates.encode(),
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> NilpotentCertificate:
        from .ring import make_ring

        ring = make_ring(d["ring"])
        load = lambda key: ElementSet.from_encodings(ring, d[key])  # noqa: E731
        base = None if d.get("base") is None else [ring.decode(s) for s in d["base"]]
        return cls(load("X"), load("R_prime"), load("I"), d["m"], d["class"], base, None, d.get("notes", {}))


def nilpotent_certificate(
    X: ElementSet,
    m_max: int = 3,
    class_max: int = 8,
    with_base: bool = True,
    base_budget: int = 20_000,
) -> NilpotentCertificate | None:
    """Find R' = <X>, an ideal I of R' inside some X_m, and class(R'/I) <= class_max.

    R'/I has class <= c exactly when I contains R'^{c+1}, so the smallest
    admissible ideal is I = R'^{class_max+1}.  It is accepted at the least
    m <= m_max with I inside X_m.  The class reported is the true class of
    R'/I, which may be smaller than ``class_max``.  Returns None when I does
    not fit inside X_{m_max}.
    """
    ring = X.ring
    if not ring.finite:
        raise InfiniteRingError("nilpotent certificates need a finite ambient ring")
    if not X.is_symmetric:
        raise NotSymmetricError("X must be additively symmetric")
    R_prime = generated_subring(X)
    powers = ring_powers(R_prime, class_max + 1)
    # the sequence stops early once it reaches {0} or becomes stationary, and in
    # both cases its last term equals R'^{class_max+1}
    ideal = powers[-1]
    I = ElementSet._wrap(ring, ideal)
    nil_class = nilpotency_class(R_prime, class_max, modulo=I)
    Xm = X
    for m in range(1, m_max + 1):
        Xm = iterate_xn(Xm, 1)
        if ideal <= Xm.members:
            break
    else:
        return None
    base = None
    if with_base and nil_class is not None:
        dim_bound = max(1, len(R_prime).bit_length())
        base = nilpotent_base(R_prime, dim_bound, modulo=I, budget_nodes=base_budget)
    cosets = cover_number(X, R_prime, mode="greedy")
    largest = largest_ideal_within(R_prime, Xm)
    notes = {"largest_ideal_in_X_m": len(largest), "subring_order": len(R_prime), "ideal_order": len(I)}
    return NilpotentCertificate(X, R_prime, I, m, nil_class, base, cosets, notes)
