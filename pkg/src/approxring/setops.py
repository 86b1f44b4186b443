"""Exact set calculus over a ring: sumsets, product sets, the X_n recursion,
word balls, Alg_n and translate covers.

Two kernels do the heavy lifting.  Pairwise sets go through numpy outer
operations whenever the ring exposes integer coordinates (``Z/n``, ``Z``,
quadratic integers, matrices over those, index-table rings); everything else
falls back to Python set comprehensions.  Covers are computed from an
incidence structure (candidate translate -> covered targets) built in one
pass over S x X.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import (
    BudgetExceeded,
    InfiniteRingError,
    InvalidCertificate,
    NoCoverError,
    NotAFieldError,
    NotSymmetricError,
    RingMismatchError,
)
from .ring import Ring, ZMod

__all__ = [
    "ElementSet",
    "CoverCertificate",
    "pairwise_set",
    "sumset",
    "productset",
    "difference_set",
    "nfold_sum",
    "iterate_xn",
    "word_ball",
    "WordBallBuilder",
    "alg_set",
    "cover_number",
    "load_set",
    "dump_set",
    "interval",
    "norm_bound",
    "parse_set_text",
    "nm_difference",
    "xn_step",
    "random_symmetric",
]

_VEC_MIN_PAIRS = 64
_CHUNK_PAIRS = 1 << 21


class ElementSet:
    """A finite set of canonical elements of one ring.

    ``truncated`` marks sets produced under a truncation predicate in an
    infinite ambient ring.
    """

    __slots__ = ("ring", "members", "truncated", "_sorted")

    def __init__(self, ring: Ring, members: Iterable = (), *, truncated: bool = False):
        self.ring = ring
        self.members = frozenset(ring.canon(m) for m in members)
        self.truncated = truncated
        self._sorted = None

    @classmethod
    def _wrap(cls, ring: Ring, members, truncated: bool = False) -> ElementSet:
        out = cls.__new__(cls)
        out.ring = ring
        out.members = members if isinstance(members, frozenset) else frozenset(members)
        out.truncated = truncated
        out._sorted = None
        return out

    @classmethod
    def from_encodings(cls, ring: Ring, lines: Iterable[str]) -> ElementSet:
        return cls._wrap(ring, {ring.decode(s) for s in lines})

    @classmethod
    def universe(cls, ring: Ring) -> ElementSet:
        return cls._wrap(ring, ring.elements())

    # -- flags (always recomputed) ------------------------------------------
    @property
    def contains_zero(self) -> bool:
        return self.ring.zero in self.members

    @property
    def is_symmetric(self) -> bool:
        neg = self.ring.neg
        return self.contains_zero and all(neg(x) in self.members for x in self.members)

    # -- container protocol ----------------------------------------------------
    def sorted(self) -> list:
        if self._sorted is None:
            self._sorted = sorted(self.members, key=self.ring.sort_key)
        return self._sorted

    def __iter__(self):
        return iter(self.sorted())

    def __len__(self):
        return len(self.members)

    def __contains__(self, x):
        return x in self.members

    def __eq__(self, other):
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.ring == other.ring and self.members == other.members

    def __hash__(self):
        return hash((self.ring, self.members))

    def __repr__(self):
        shown = ", ".join(self.ring.encode(x) for x in self.sorted()[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"ElementSet({{{shown}{more}}} in {self.ring.describe()}, size={len(self)})"

    def _check(self, other: ElementSet):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring.describe()} vs {other.ring.describe()}")

    def __or__(self, other):
        self._check(other)
        return ElementSet._wrap(self.ring, self.members | other.members, self.truncated or other.truncated)

    def __and__(self, other):
        self._check(other)
        return ElementSet._wrap(self.ring, self.members & other.members, self.truncated or other.truncated)

    def minus(self, other) -> ElementSet:
        """Set difference (not the ring difference set)."""
        self._check(other)
        return ElementSet._wrap(self.ring, self.members - other.members, self.truncated)

    def __le__(self, other):
        self._check(other)
        return self.members <= other.members

    def __ge__(self, other):
        self._check(other)
        return self.members >= other.members

    def negated(self) -> ElementSet:
        neg = self.ring.neg
        return ElementSet._wrap(self.ring, {neg(x) for x in self.members}, self.truncated)

    def symmetrized(self) -> ElementSet:
        """X u -X u {0}."""
        neg = self.ring.neg
        out = set(self.members)
        out.update(neg(x) for x in self.members)
        out.add(self.ring.zero)
        return ElementSet._wrap(self.ring, out, self.truncated)

    def encode(self) -> list[str]:
        return [self.ring.encode(x) for x in self.sorted()]


def interval(ring: Ring, lo: int, hi: int) -> ElementSet:
    """{lo, ..., hi} as elements of Z or Z/n."""
    return ElementSet(ring, range(lo, hi + 1))


def norm_bound(ring: Ring, bound) -> Callable:
    """Truncation predicate for discrete infinite rings.

    Integers: |x| <= bound.  Quadratic integers: both real embeddings bounded.
    Matrices over Z: every entry bounded.
    """
    from .ring import Integers, MatrixRing, QuadField

    if isinstance(ring, Integers):
        return lambda x: -bound <= x <= bound
    if isinstance(ring, QuadField):
        return lambda x: abs(ring.sigma(x)) <= bound and abs(ring.sigma_conj(x)) <= bound
    if isinstance(ring, MatrixRing) and isinstance(ring.base, Integers):
        return lambda x: all(-bound <= e <= bound for e in x)
    raise TypeError(f"no norm bound for {ring.describe()}")


def random_symmetric(ring: Ring, size: int, rng: np.random.Generator) -> ElementSet:
    """Random additively symmetric subset of a finite ring, containing 0.

    Whole pairs {x, -x} are drawn in random order and kept while they fit,
    so the result has ``size`` elements unless parity forbids it, in which
    case it has one fewer.
    """
    if size < 1:
        raise ValueError("size must be positive")
    elems = ring.elements()
    if size > len(elems):
        raise ValueError(f"size {size} exceeds |R| = {len(elems)}")
    seen, orbits = {ring.zero}, []
    for x in sorted(elems, key=ring.sort_key):
        if x not in seen:
            orb = frozenset({x, ring.neg(x)})
            seen |= orb
            orbits.append(orb)
    members = {ring.zero}
    for k in rng.permutation(len(orbits)).tolist():
        if len(members) + len(orbits[k]) <= size:
            members |= orbits[k]
    return ElementSet._wrap(ring, frozenset(members))


def load_set(path, ring: Ring) -> ElementSet:
    """Read a set file: one element encoding per line, '#' lines ignored."""
    with open(path, encoding="utf-8") as fh:
        return parse_set_text(fh.read(), ring)


def parse_set_text(text: str, ring: Ring) -> ElementSet:
    lines = [ln.strip() for ln in text.splitlines()]
    return ElementSet.from_encodings(ring, [ln for ln in lines if ln and not ln.startswith("#")])


def dump_set(X: ElementSet, path=None, header: str | None = None) -> str:
    out = []
    if header:
        out.extend(f"# {h}" for h in header.splitlines())
    out.extend(X.encode())
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# pairwise kernel
# ---------------------------------------------------------------------------


def _unique_rows(arr: np.ndarray, universe: int | None = None) -> np.ndarray:
    if arr.shape[1] == 1:
        col = arr[:, 0]
        if universe is not None:
            mask = np.zeros(universe, dtype=bool)
            mask[col] = True
            return np.flatnonzero(mask).reshape(-1, 1)
        return np.unique(col).reshape(-1, 1)
    arr = np.ascontiguousarray(arr)
    view = arr.view(np.dtype((np.void, arr.dtype.itemsize * arr.shape[1]))).ravel()
    _, idx = np.unique(view, return_index=True)
    return arr[idx]


def _index_universe(ring: Ring) -> int | None:
    if isinstance(ring, ZMod) or getattr(ring, "kind", None) in ("table", "quotient"):
        return ring.size
    if getattr(ring, "kind", None) == "subring" and not ring.parent.vec_dim:
        return ring.size
    return None


def _vector_pairwise(ring: Ring, A, B, op: str):
    if not ring.vec_dim:
        return None
    if op == "sub":
        neg = ring.neg
        B = [neg(b) for b in B]
    arrA, arrB = ring.to_array(A), ring.to_array(B)
    if arrA is None or arrB is None:
        return None
    outer = ring.mul_outer if op == "mul" else ring.add_outer
    universe = _index_universe(ring)
    step = max(1, _CHUNK_PAIRS // max(1, len(arrB)))
    parts = []
    for start in range(0, len(arrA), step):
        out = outer(arrA[start : start + step], arrB)
        if out is None:
            return None
        parts.append(_unique_rows(out, universe))
    merged = parts[0] if len(parts) == 1 else _unique_rows(np.concatenate(parts), universe)
    return frozenset(ring.from_array(merged))


def _pairwise(ring: Ring, A, B, op: str) -> frozenset:
    """{a op b : a in A, b in B} for op in add/mul/sub."""
    if not A or not B:
        return frozenset()
    if len(A) * len(B) >= _VEC_MIN_PAIRS:
        out = _vector_pairwise(ring, A, B, op)
        if out is not None:
            return out
    f = {"add": ring.add, "mul": ring.mul, "sub": ring.sub}[op]
    return frozenset(f(a, b) for a in A for b in B)


def pairwise_set(kind: str, A: ElementSet, B: ElementSet | None = None) -> ElementSet:
    """Exact sumset, product set or difference set.

    ``kind='difference'`` ignores ``B`` and returns A - A.
    """
    if kind == "difference":
        return ElementSet._wrap(A.ring, _pairwise(A.ring, A.members, A.members, "sub"), A.truncated)
    if B is None:
        raise TypeError(f"{kind} needs two operands")
    A._check(B)
    op = {"sum": "add", "product": "mul"}.get(kind)
    if op is None:
        raise ValueError(f"unknown pairwise kind {kind!r}")
    return ElementSet._wrap(A.ring, _pairwise(A.ring, A.members, B.members, op), A.truncated or B.truncated)


def sumset(A: ElementSet, B: ElementSet) -> ElementSet:
    return pairwise_set("sum", A, B)


def productset(A: ElementSet, B: ElementSet) -> ElementSet:
    return pairwise_set("product", A, B)


def difference_set(A: ElementSet) -> ElementSet:
    return pairwise_set("difference", A)


def nfold_sum(X: ElementSet, n: int) -> ElementSet:
    """nX = X + ... + X (n summands); 0X = {0}."""
    ring = X.ring
    out = frozenset({ring.zero})
    for _ in range(n):
        out = _pairwise(ring, out, X.members, "add")
    return ElementSet._wrap(ring, out, X.truncated)


def nm_difference(X: ElementSet, n: int, m: int) -> ElementSet:
    """nX - mX."""
    a = nfold_sum(X, n).members
    b = nfold_sum(X, m).members
    return ElementSet._wrap(X.ring, _pairwise(X.ring, a, b, "sub"), X.truncated)


# ---------------------------------------------------------------------------
# X_n recursion and word balls
# ---------------------------------------------------------------------------


def xn_step(ring: Ring, cur: frozenset) -> frozenset:
    """X + X + X*X."""
    s = _pairwise(ring, cur, cur, "add")
    p = _pairwise(ring, cur, cur, "mul")
    return _pairwise(ring, s, p, "add")


def iterate_xn(X: ElementSet, n: int, truncation: Callable | None = None) -> ElementSet:
    """X_n where X_0 = X and X_{k+1} = X_k + X_k + X_k * X_k.

    Over an infinite ring a ``truncation`` predicate is mandatory; each level
    is intersected with it and the result is flagged ``truncated``.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not X.is_symmetric:
        raise NotSymmetricError("X_n recursion needs an additively symmetric X")
    ring = X.ring
    if not ring.finite and truncation is None:
        raise InfiniteRingError("iterate_xn over an infinite ring needs a truncation predicate")
    cur = X.members
    truncated = X.truncated
    for _ in range(n):
        nxt = xn_step(ring, cur)
        if truncation is not None:
            kept = frozenset(x for x in nxt if truncation(x))
            truncated = truncated or len(kept) < len(nxt)
            nxt = kept
        if nxt == cur:
            break
        cur = nxt
    return ElementSet._wrap(ring, cur, truncated)


class WordBallBuilder:
    """Incremental word balls B(0) = {0}, B(1) = {0} u X, ...

    B(n) adds every sum and product of elements from B(i), B(j) with
    i + j = n.  Only the new layers D(i) = B(i) - B(i-1) need combining:
    anything built from shallower layers already sits in B(n-1).
    """

    def __init__(self, ring: Ring, X: ElementSet, max_elements: int | None = None):
        self.ring = ring
        self.X = X.members
        self.max_elements = max_elements
        self.ball = {ring.zero}
        self.layers = [frozenset({ring.zero})]
        self.n = 0

    def step(self) -> int:
        ring, n = self.ring, self.n + 1
        if n == 1:
            cand = set(self.X)
        else:
            cand = set()
            L = self.layers
            for i in range(1, n // 2 + 1):
                if L[i] and L[n - i]:
                    cand |= _pairwise(ring, L[i], L[n - i], "add")
            for i in range(1, n):
                if L[i] and L[n - i]:
                    cand |= _pairwise(ring, L[i], L[n - i], "mul")
        new = frozenset(cand - self.ball)
        if self.max_elements is not None and len(self.ball) + len(new) > self.max_elements:
            raise BudgetExceeded(
                f"word ball B({n}) would exceed {self.max_elements} elements",
                reached=self.n,
                partial=len(self.ball),
            )
        self.ball |= new
        self.layers.append(new)
        self.n = n
        return len(self.ball)

    def current(self) -> ElementSet:
        return ElementSet._wrap(self.ring, frozenset(self.ball))


def word_ball(ring: Ring, X: ElementSet, n: int, max_elements: int | None = None) -> ElementSet:
    """X^{<=n}: elements built with + and * from at most n letters of X."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    b = WordBallBuilder(ring, X, max_elements)
    for _ in range(n):
        b.step()
    return b.current()


# ---------------------------------------------------------------------------
# Alg_n in finite fields
# ---------------------------------------------------------------------------


def _field_inverses(ring: Ring) -> dict:
    if isinstance(ring, ZMod):
        p = ring.n
        if p < 2:
            raise NotAFieldError("the zero ring is not a field")
        for q in range(2, math.isqrt(p) + 1):
            if p % q == 0:
                raise NotAFieldError(f"Z/{p} is not a field: {q} is not invertible", element=q)
        return {a: pow(a, -1, p) for a in range(1, p)}
    elems = ring.elements()
    if len(elems) < 2:
        raise NotAFieldError("the zero ring is not a field")
    unit = next(
        (e for e in elems if all(ring.mul(e, a) == a and ring.mul(a, e) == a for a in elems)), None
    )
    if unit is None:
        raise NotAFieldError("ring has no multiplicative identity")
    inv = {}
    for a in elems:
        if a == ring.zero:
            continue
        b = next((b for b in elems if ring.mul(a, b) == unit and ring.mul(b, a) == unit), None)
        if b is None:
            raise NotAFieldError(f"{ring.encode(a)} is not invertible", element=a)
        inv[a] = b
    return inv


def alg_set(field: Ring, X: ElementSet, n: int) -> ElementSet:
    """Alg_n(X): quotients of sums of <= n terms, each a product of <= n elements of X."""
    if n < 1:
        raise ValueError("n must be positive")
    inv = _field_inverses(field)
    prods = frozenset(X.members)
    for _ in range(n - 1):
        prods = prods | _pairwise(field, prods, X.members, "mul")
    sums = prods
    for _ in range(n - 1):
        sums = sums | _pairwise(field, sums, prods, "add")
    denominators = frozenset(inv[b] for b in sums if b != field.zero)
    out = set(sums) | _pairwise(field, sums, denominators, "mul")
    return ElementSet._wrap(field, out)


# ---------------------------------------------------------------------------
# translate covers
# ---------------------------------------------------------------------------


@dataclass
class CoverCertificate:
    """Witness that ``target`` is contained in ``translates + cover``.

    Revalidated element by element on construction.
    """

    target: ElementSet
    cover: ElementSet
    translates: ElementSet
    exactness: str = "greedy-upper-bound"
    stats: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.exactness not in ("exact", "greedy-upper-bound"):
            raise ValueError(f"bad exactness {self.exactness!r}")
        self.target._check(self.cover)
        self.target._check(self.translates)
        self.validate()

    @property
    def K(self) -> int:
        return len(self.translates)

    def validate(self):
        ring, X = self.target.ring, self.cover.members
        F = self.translates.sorted()
        for s in self.target.sorted():
            if not any(ring.sub(s, f) in X for f in F):
                raise InvalidCertificate(f"{ring.encode(s)} is not covered by any translate")

    def to_dict(self) -> dict:
        return {
            "ring": self.target.ring.spec,
            "target": self.target.encode(),
            "cover": self.cover.encode(),
            "translates": self.translates.encode(),
            "K": self.K,
            "exactness": self.exactness,
        }

    @classmethod
    def from_dict(cls, d: dict) -> CoverCertificate:
        from .ring import make_ring

        ring = make_ring(d["ring"])
        cert = cls(
            ElementSet.from_encodings(ring, d["target"]),
            ElementSet.from_encodings(ring, d["cover"]),
            ElementSet.from_encodings(ring, d["translates"]),
            d["exactness"],
        )
        if "K" in d and d["K"] != cert.K:
            raise InvalidCertificate(f"recorded K={d['K']} but {cert.K} translates listed")
        return cert


class _Incidence:
    """CSR incidence: candidate translate c covers targets indices[indptr[c]:indptr[c+1]]."""

    def __init__(self, ring: Ring, targets: list, X: frozenset, pool: frozenset | None, max_pairs: int | None):
        m = len(targets)
        if max_pairs is not None and m * len(X) > max_pairs:
            raise BudgetExceeded(
                f"cover incidence needs {m * len(X)} pairs, budget {max_pairs}", reached=0
            )
        pairs = self._vector(ring, targets, X)
        if pairs is None:
            groups: dict = {}
            sub = ring.sub
            for i, s in enumerate(targets):
                for x in X:
                    groups.setdefault(sub(s, x), []).append(i)
            cands = list(groups)
            lists = [groups[c] for c in cands]
        else:
            cands, lists = pairs
        if pool is not None:
            keep = [k for k, c in enumerate(cands) if c in pool]
            cands = [cands[k] for k in keep]
            lists = [lists[k] for k in keep]
        order = sorted(range(len(cands)), key=lambda k: ring.sort_key(cands[k]))
        self.cands = [cands[k] for k in order]
        lists = [lists[k] for k in order]
        self.indptr = np.zeros(len(lists) + 1, dtype=np.int64)
        np.cumsum([len(l) for l in lists], out=self.indptr[1:])
        self.indices = (
            np.fromiter((i for l in lists for i in l), dtype=np.int64, count=int(self.indptr[-1]))
            if lists
            else np.zeros(0, dtype=np.int64)
        )
        self.m = m

    @staticmethod
    def _vector(ring, targets, X):
        if not ring.vec_dim or len(targets) * len(X) < 4096:
            return None
        arrS = ring.to_array(targets)
        arrX = ring.to_array([ring.neg(x) for x in X])
        if arrS is None or arrX is None:
            return None
        diffs = ring.add_outer(arrS, arrX)
        if diffs is None:
            return None
        s_idx = np.repeat(np.arange(len(targets)), len(arrX))
        diffs = np.ascontiguousarray(diffs)
        view = diffs.view(np.dtype((np.void, diffs.dtype.itemsize * diffs.shape[1]))).ravel()
        uniq, first, inverse = np.unique(view, return_index=True, return_inverse=True)
        cands = ring.from_array(diffs[first])
        order = np.argsort(inverse, kind="stable")
        bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
        sorted_s = s_idx[order]
        lists = [np.unique(sorted_s[bounds[k] : bounds[k + 1]]).tolist() for k in range(len(uniq))]
        return cands, lists

    def members(self, c: int) -> np.ndarray:
        return self.indices[self.indptr[c] : self.indptr[c + 1]]

    def greedy(self) -> list[int]:
        uncovered = np.ones(self.m, dtype=bool)
        remaining = self.m
        heap = [(-(self.indptr[c + 1] - self.indptr[c]), c) for c in range(len(self.cands))]
        heapq.heapify(heap)
        chosen = []
        while remaining:
            if not heap:
                raise NoCoverError(f"{remaining} target elements cannot be covered from the pool")
            neg_gain, c = heapq.heappop(heap)
            gain = int(uncovered[self.members(c)].sum())
            if gain == -neg_gain:
                chosen.append(c)
                uncovered[self.members(c)] = False
                remaining -= gain
            elif gain > 0:
                heapq.heappush(heap, (-gain, c))
        return chosen

    def exact(self, upper: list[int], budget: int) -> tuple[list[int], int]:
        m = self.m
        if m == 0:
            return [], 0
        masks: dict[int, int] = {}
        for c in range(len(self.cands)):
            mask = 0
            for i in self.members(c).tolist():
                mask |= 1 << i
            masks.setdefault(mask, c)  # identical coverage: keep the smallest candidate
        items = sorted(masks.items(), key=lambda kv: (-kv[0].bit_count(), kv[1]))
        if len(items) <= 4000:
            kept = []
            for mask, c in items:
                if not any(mask & ~big == 0 for big, _ in kept):
                    kept.append((mask, c))
            items = kept
        cmasks = [mk for mk, _ in items]
        cids = [c for _, c in items]
        covers_of = [[] for _ in range(m)]
        for k, mk in enumerate(cmasks):
            x = mk
            while x:
                low = x & -x
                covers_of[low.bit_length() - 1].append(k)
                x ^= low
        maxcov = max(mk.bit_count() for mk in cmasks)
        best = list(upper)
        nodes = 0

        def rec(U: int, chosen: list[int]):
            nonlocal best, nodes
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"exact cover search exceeded {budget} nodes", reached=nodes)
            if U == 0:
                if len(chosen) < len(best):
                    best = list(chosen)
                return
            lb = -(-U.bit_count() // maxcov)
            if len(chosen) + lb >= len(best):
                return
            # branch on the uncovered target with the fewest covering candidates
            x, pick, fewest = U, -1, None
            while x:
                low = x & -x
                i = low.bit_length() - 1
                cnt = len(covers_of[i])
                if fewest is None or cnt < fewest:
                    pick, fewest = i, cnt
                x ^= low
            opts = sorted(covers_of[pick], key=lambda k: -(cmasks[k] & U).bit_count())
            for k in opts:
                chosen.append(cids[k])
                rec(U & ~cmasks[k], chosen)
                chosen.pop()

        rec((1 << m) - 1, [])
        return best, nodes


def cover_number(
    S: ElementSet,
    X: ElementSet,
    mode: str = "greedy",
    pool: ElementSet | str = "auto",
    budget_nodes: int = 10**6,
    max_pairs: int | None = None,
) -> CoverCertificate:
    """Fewest translates F with S contained in F + X.

    ``mode='greedy'`` picks the translate covering most uncovered targets
    until done (ties go to the smallest candidate); ``mode='exact'`` runs a
    branch-and-bound seeded with the greedy answer and raises
    :class:`BudgetExceeded` after ``budget_nodes`` nodes.  The automatic pool
    S - X contains every translate that meets S, so exact answers over it
    are global minima.
    """
    S._check(X)
    if not X.members:
        raise ValueError("cannot cover with translates of the empty set")
    ring = S.ring
    targets = S.sorted()
    pool_set = None if isinstance(pool, str) else pool.members
    if isinstance(pool, str) and pool != "auto":
        raise ValueError(f"unknown pool {pool!r}")
    inc = _Incidence(ring, targets, X.members, pool_set, max_pairs)
    chosen = inc.greedy()
    stats = {"candidates": len(inc.cands), "greedy_K": len(chosen)}
    exactness = "greedy-upper-bound"
    if mode == "exact":
        chosen, nodes = inc.exact(chosen, budget_nodes)
        stats["nodes"] = nodes
        exactness = "exact"
    elif mode != "greedy":
        raise ValueError(f"unknown mode {mode!r}")
    F = ElementSet._wrap(ring, {inc.cands[c] for c in chosen})
    return CoverCertificate(S, X, F, exactness, stats)
