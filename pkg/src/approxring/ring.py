"""Exact arithmetic for the ambient rings.

A ring is built from a small self-describing tree (a ``dict`` or a JSON/YAML
document)::

    {"kind": "zmod", "n": 7}
    {"kind": "matrix", "base": {"kind": "zmod", "n": 2}, "dim": 3}
    {"kind": "product", "factors": [...]}
    {"kind": "quotient", "base": {...}, "ideal": ["4"]}
    {"kind": "table", "add": [[...]], "mul": [[...]]}
    {"kind": "integers"}
    {"kind": "quadfield", "d": 2}

Elements are plain hashable payloads (``int``, tuples of payloads) kept in
canonical form; :class:`Element` wraps one together with its ring when
operator syntax is wanted.  Rings never assume a multiplicative unit.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Any, Iterable

import numpy as np
import yaml

from . import _closure
from .errors import (
    BudgetExceeded,
    ElementError,
    InfiniteRingError,
    RingMismatchError,
    RingSpecError,
    SubstructureError,
)
from .exactreal import QuadReal, is_squarefree

__all__ = [
    "Ring",
    "ZMod",
    "Integers",
    "QuadField",
    "MatrixRing",
    "ProductRing",
    "LatticeRing",
    "TableRing",
    "QuotientRing",
    "SubringRing",
    "Element",
    "make_ring",
    "load_ring_spec",
    "arith",
    "additive_order",
    "quotient_ring",
    "INFINITE",
]

INFINITE = math.inf

#: finite rings larger than this are never enumerated element by element
UNIVERSE_LIMIT = 1 << 20
#: index-table vectorisation for table-like rings
_TABLE_LIMIT = 512
_INT64_SAFE = 1 << 62


def _split_top(s: str) -> list[str]:
    """Split on commas that are not nested inside brackets/parentheses."""
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur).strip()
    if tail or parts:
        parts.append(tail)
    return parts


def _strip_brackets(s: str, open_: str, close: str) -> str:
    s = s.strip()
    if not (s.startswith(open_) and s.endswith(close)):
        raise ElementError(f"expected {open_}...{close}: {s!r}")
    return s[1:-1]


class Ring:
    """Common interface.  Subclasses fill in the arithmetic."""

    kind = "abstract"
    finite = True

    # -- identity ---------------------------------------------------------
    @property
    def spec(self) -> dict:
        raise NotImplementedError

    @cached_property
    def key(self) -> str:
        return json.dumps(self.spec, sort_keys=True, separators=(",", ":"))

    def __eq__(self, other):
        return isinstance(other, Ring) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"{type(self).__name__}({self.describe()})"

    def describe(self) -> str:
        return self.key

    # -- arithmetic -------------------------------------------------------
    zero: Any = 0

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def smul(self, n: int, a):
        """n*a by double-and-add (n may be negative)."""
        if n < 0:
            n, a = -n, self.neg(a)
        acc, base = self.zero, a
        while n:
            if n & 1:
                acc = self.add(acc, base)
            base = self.add(base, base)
            n >>= 1
        return acc

    # -- elements -----------------------------------------------------------
    def canon(self, x):
        """Canonical payload for ``x`` (a payload, an encoding string, or an Element)."""
        raise NotImplementedError

    def contains(self, x) -> bool:
        try:
            return self.canon(x) == x
        except (ElementError, TypeError, ValueError):
            return False

    def sort_key(self, x):
        return x

    def encode(self, x) -> str:
        return str(x)

    def decode(self, s: str):
        raise NotImplementedError

    def element(self, x) -> Element:
        return Element(self, self.canon(x))

    @property
    def size(self) -> int | None:
        return None

    def elements(self) -> list:
        if not self.finite:
            raise InfiniteRingError(f"{self.describe()} is discrete and unbounded; no universe")
        if self.size > UNIVERSE_LIMIT:
            raise BudgetExceeded(
                f"universe of size {self.size} exceeds the enumeration limit {UNIVERSE_LIMIT}",
                reached=0,
            )
        return self._universe

    @cached_property
    def _universe(self) -> list:
        return sorted(self._enumerate(), key=self.sort_key)

    def _enumerate(self) -> Iterable:
        raise NotImplementedError

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.elements())}

    @cached_property
    def _order_cache(self) -> dict:
        return {}

    def additive_order(self, a):
        """Least n >= 1 with n*a = 0, or INFINITE."""
        cache = self._order_cache
        if a in cache:
            return cache[a]
        n = self._additive_order(a)
        cache[a] = n
        return n

    def _additive_order(self, a):
        n, acc = 1, a
        while acc != self.zero:
            acc = self.add(acc, a)
            n += 1
        return n

    @property
    def exponent(self):
        """Additive exponent (lcm of all additive orders) of a finite ring."""
        if not self.finite:
            return INFINITE
        return reduce(math.lcm, (self.additive_order(x) for x in self.elements()), 1)

    # -- vectorised kernels (optional) ----------------------------------------
    #: number of int64 coordinates per element, or None when not vectorisable
    vec_dim: int | None = None

    def to_array(self, elems) -> np.ndarray | None:
        return None

    def from_array(self, arr: np.ndarray) -> list:
        raise NotImplementedError

    def add_outer(self, A: np.ndarray, B: np.ndarray) -> np.ndarray | None:
        return None

    def mul_outer(self, A: np.ndarray, B: np.ndarray) -> np.ndarray | None:
        return None


# ---------------------------------------------------------------------------
# Z/n
# ---------------------------------------------------------------------------


class ZMod(Ring):
    kind = "zmod"

    def __init__(self, n: int):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise RingSpecError(f"zmod needs a positive integer modulus, got {n!r}")
        self.n = n
        self.zero = 0
        if n < 1 << 31:
            self.vec_dim = 1

    @property
    def spec(self):
        return {"kind": "zmod", "n": self.n}

    def describe(self):
        return f"Z/{self.n}"

    @property
    def size(self):
        return self.n

    def add(self, a, b):
        s = a + b
        return s - self.n if s >= self.n else s

    def neg(self, a):
        return (self.n - a) % self.n

    def mul(self, a, b):
        return a * b % self.n

    def sub(self, a, b):
        return (a - b) % self.n

    def smul(self, k, a):
        return k * a % self.n

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if isinstance(x, (bool, float)) or not isinstance(x, (int, np.integer)):
            raise ElementError(f"not a residue: {x!r}")
        return int(x) % self.n

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.n

    def decode(self, s):
        try:
            return int(s.strip()) % self.n
        except ValueError as exc:
            raise ElementError(f"bad residue {s!r}") from exc

    def _enumerate(self):
        return range(self.n)

    @cached_property
    def _universe(self):
        return list(range(self.n))

    @cached_property
    def index(self):
        return _IdentityIndex(self.n)

    def _additive_order(self, a):
        return self.n // math.gcd(a, self.n)

    @property
    def exponent(self):
        return self.n

    def to_array(self, elems):
        return np.fromiter(elems, dtype=np.int64).reshape(-1, 1)

    def from_array(self, arr):
        return arr[:, 0].tolist()

    def add_outer(self, A, B):
        return ((A[:, None, 0] + B[None, :, 0]) % self.n).reshape(-1, 1)

    def mul_outer(self, A, B):
        return ((A[:, None, 0] * B[None, :, 0]) % self.n).reshape(-1, 1)


class _IdentityIndex:
    """Stand-in for {x: x for x in range(n)} without building the dict."""

    def __init__(self, n):
        self.n = n

    def __getitem__(self, x):
        if isinstance(x, int) and 0 <= x < self.n:
            return x
        raise KeyError(x)

    def __contains__(self, x):
        return isinstance(x, int) and 0 <= x < self.n

    def __len__(self):
        return self.n


# ---------------------------------------------------------------------------
# Z and the ring of integers of a real quadratic field
# ---------------------------------------------------------------------------


class Integers(Ring):
    kind = "integers"
    finite = False
    vec_dim = 1

    def __init__(self):
        self.zero = 0

    @property
    def spec(self):
        return {"kind": "integers"}

    def describe(self):
        return "Z"

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def sub(self, a, b):
        return a - b

    def smul(self, k, a):
        return k * a

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if isinstance(x, (bool, float)) or not isinstance(x, (int, np.integer)):
            raise ElementError(f"not an integer: {x!r}")
        return int(x)

    def contains(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def decode(self, s):
        try:
            return int(s.strip())
        except ValueError as exc:
            raise ElementError(f"bad integer {s!r}") from exc

    def _additive_order(self, a):
        return 1 if a == 0 else INFINITE

    def to_array(self, elems):
        elems = list(elems)
        if elems and max(abs(min(elems)), abs(max(elems))) >= 1 << 30:
            return None
        return np.array(elems, dtype=np.int64).reshape(-1, 1)

    def from_array(self, arr):
        return arr[:, 0].tolist()

    def add_outer(self, A, B):
        return (A[:, None, 0] + B[None, :, 0]).reshape(-1, 1)

    def mul_outer(self, A, B):
        return (A[:, None, 0] * B[None, :, 0]).reshape(-1, 1)


_QUAD_RE = re.compile(
    r"^\s*(?:(?P<a>[+-]?\s*\d+)(?![\d*w]))?\s*(?:(?P<sign>[+-])?\s*(?P<b>\d+)?\s*\*?\s*w)?\s*$"
)


class QuadField(Ring):
    """Ring of integers O_K of K = Q(sqrt d), d squarefree >= 2.

    Payload ``(a, b)`` stands for a + b*w with w = sqrt(d) when d != 1 mod 4
    and w = (1 + sqrt d)/2 when d == 1 mod 4.
    """

    kind = "quadfield"
    finite = False
    vec_dim = 2

    def __init__(self, d: int):
        if not isinstance(d, int) or d < 2 or not is_squarefree(d):
            raise RingSpecError(f"quadfield needs a squarefree integer d >= 2, got {d!r}")
        self.d = d
        self.half = d % 4 == 1
        self.t = (d - 1) // 4 if self.half else d  # w^2 = w + t  (half)  or  w^2 = d
        self.zero = (0, 0)

    @property
    def spec(self):
        return {"kind": "quadfield", "d": self.d}

    def describe(self):
        return f"O(Q(sqrt {self.d}))"

    def add(self, x, y):
        return (x[0] + y[0], x[1] + y[1])

    def neg(self, x):
        return (-x[0], -x[1])

    def sub(self, x, y):
        return (x[0] - y[0], x[1] - y[1])

    def mul(self, x, y):
        a, b = x
        c, e = y
        if self.half:
            be = b * e
            return (a * c + self.t * be, a * e + b * c + be)
        return (a * c + self.d * b * e, a * e + b * c)

    def smul(self, k, x):
        return (k * x[0], k * x[1])

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            return (int(x), 0)
        if isinstance(x, (tuple, list)) and len(x) == 2 and all(
            isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in x
        ):
            return (int(x[0]), int(x[1]))
        raise ElementError(f"not an element of {self.describe()}: {x!r}")

    def contains(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == 2
            and all(isinstance(v, int) and not isinstance(v, bool) for v in x)
        )

    def encode(self, x):
        return f"{x[0]}{x[1]:+d}*w"

    def decode(self, s):
        m = _QUAD_RE.match(s)
        if not m or not s.strip():
            raise ElementError(f"bad quadratic integer {s!r} (expected 'a+b*w')")
        a = int(m.group("a").replace(" ", "")) if m.group("a") else 0
        if "w" in s:
            b = int(m.group("b")) if m.group("b") else 1
            if m.group("sign") == "-":
                b = -b
        else:
            b = 0
        return (a, b)

    def _additive_order(self, x):
        return 1 if x == (0, 0) else INFINITE

    # -- real embeddings (exact) ---------------------------------------
    def sigma(self, x) -> QuadReal:
        """The embedding sending w to the +sqrt(d) side."""
        a, b = x
        if self.half:
            return QuadReal(Fraction(2 * a + b, 2), Fraction(b, 2), self.d)
        return QuadReal(a, b, self.d)

    def sigma_conj(self, x) -> QuadReal:
        """The conjugate embedding (w to the -sqrt(d) side)."""
        a, b = x
        if self.half:
            return QuadReal(Fraction(2 * a + b, 2), Fraction(-b, 2), self.d)
        return QuadReal(a, -b, self.d)

    def norm(self, x) -> int:
        a, b = x
        if self.half:
            return a * a + a * b - self.t * b * b
        return a * a - self.d * b * b

    def _safe(self, *arrays):
        m = max((int(np.abs(A).max()) if A.size else 0) for A in arrays)
        return m * m * (self.d + 3) < _INT64_SAFE

    def to_array(self, elems):
        arr = np.array(list(elems), dtype=object).reshape(-1, 2)
        if arr.size and int(np.abs(arr).max()) >= 1 << 30:
            return None
        return arr.astype(np.int64)

    def from_array(self, arr):
        return list(map(tuple, arr.tolist()))

    def add_outer(self, A, B):
        return (A[:, None, :] + B[None, :, :]).reshape(-1, 2)

    def mul_outer(self, A, B):
        if not self._safe(A, B):
            return None
        a, b = A[:, None, 0], A[:, None, 1]
        c, e = B[None, :, 0], B[None, :, 1]
        be = b * e
        if self.half:
            r0, r1 = a * c + self.t * be, a * e + b * c + be
        else:
            r0, r1 = a * c + self.d * be, a * e + b * c
        return np.stack([r0.ravel(), r1.ravel()], axis=1)


# ---------------------------------------------------------------------------
# matrices and products
# ---------------------------------------------------------------------------


class MatrixRing(Ring):
    kind = "matrix"

    def __init__(self, base: Ring, dim: int):
        if not isinstance(dim, int) or dim < 1:
            raise RingSpecError(f"matrix dim must be a positive integer, got {dim!r}")
        self.base, self.k = base, dim
        self.finite = base.finite
        self.zero = tuple([base.zero] * (dim * dim))
        if isinstance(base, ZMod):
            self.vec_dim = dim * dim if base.n * base.n * dim < _INT64_SAFE else None
        elif isinstance(base, Integers):
            self.vec_dim = dim * dim

    @property
    def spec(self):
        return {"kind": "matrix", "base": self.base.spec, "dim": self.k}

    def describe(self):
        return f"M{self.k}({self.base.describe()})"

    @property
    def size(self):
        return self.base.size ** (self.k * self.k) if self.finite else None

    def add(self, x, y):
        ba = self.base.add
        return tuple(ba(a, b) for a, b in zip(x, y))

    def neg(self, x):
        bn = self.base.neg
        return tuple(bn(a) for a in x)

    def sub(self, x, y):
        bs = self.base.sub
        return tuple(bs(a, b) for a, b in zip(x, y))

    def mul(self, x, y):
        k, B = self.k, self.base
        out = []
        for i in range(k):
            row = x[i * k : (i + 1) * k]
            for j in range(k):
                acc = B.zero
                for t in range(k):
                    a = row[t]
                    if a != B.zero:
                        b = y[t * k + j]
                        if b != B.zero:
                            acc = B.add(acc, B.mul(a, b))
                out.append(acc)
        return tuple(out)

    def smul(self, n, x):
        return tuple(self.base.smul(n, a) for a in x)

    def unit(self, i: int, j: int, value=1):
        """Matrix unit E_ij (1-based) scaled by ``value``."""
        entries = [self.base.zero] * (self.k * self.k)
        entries[(i - 1) * self.k + (j - 1)] = self.base.canon(value)
        return tuple(entries)

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if not isinstance(x, (tuple, list)):
            raise ElementError(f"not a matrix: {x!r}")
        k = self.k
        if len(x) == k and all(isinstance(r, (tuple, list)) and len(r) == k for r in x):
            flat = [e for r in x for e in r]
        elif len(x) == k * k:
            flat = list(x)
        else:
            raise ElementError(f"not a {k}x{k} matrix: {x!r}")
        return tuple(self.base.canon(e) for e in flat)

    def contains(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == self.k * self.k
            and all(self.base.contains(e) for e in x)
        )

    def sort_key(self, x):
        bk = self.base.sort_key
        return tuple(bk(e) for e in x)

    def encode(self, x):
        k, be = self.k, self.base.encode
        return "[" + ",".join(
            "[" + ",".join(be(e) for e in x[i * k : (i + 1) * k]) + "]" for i in range(k)
        ) + "]"

    def decode(self, s):
        rows = _split_top(_strip_brackets(s, "[", "]"))
        if len(rows) != self.k:
            raise ElementError(f"expected {self.k} rows in {s!r}")
        flat = []
        for r in rows:
            entries = _split_top(_strip_brackets(r, "[", "]"))
            if len(entries) != self.k:
                raise ElementError(f"expected {self.k} entries in row {r!r}")
            flat.extend(self.base.decode(e) for e in entries)
        return tuple(flat)

    def _enumerate(self):
        return itertools.product(self.base.elements(), repeat=self.k * self.k)

    def _additive_order(self, x):
        return reduce(math.lcm, (self.base.additive_order(e) for e in x), 1)

    @property
    def exponent(self):
        return self.base.exponent

    # vectorised kernels for Z/n and Z entries
    def to_array(self, elems):
        if self.vec_dim is None:
            return None
        arr = np.array(list(elems), dtype=object).reshape(-1, self.vec_dim)
        if isinstance(self.base, Integers) and arr.size and int(np.abs(arr).max()) >= 1 << 30:
            return None
        return arr.astype(np.int64)

    def from_array(self, arr):
        return list(map(tuple, arr.tolist()))

    def add_outer(self, A, B):
        out = (A[:, None, :] + B[None, :, :]).reshape(-1, self.vec_dim)
        if isinstance(self.base, ZMod):
            out %= self.base.n
        return out

    def mul_outer(self, A, B):
        k = self.k
        if isinstance(self.base, Integers):
            m = max(int(np.abs(A).max()) if A.size else 0, int(np.abs(B).max()) if B.size else 0)
            if m * m * k >= _INT64_SAFE:
                return None
        out = np.einsum("aij,bjl->abil", A.reshape(-1, k, k), B.reshape(-1, k, k))
        out = out.reshape(-1, k * k)
        if isinstance(self.base, ZMod):
            out %= self.base.n
        return out


class ProductRing(Ring):
    kind = "product"

    def __init__(self, factors: list[Ring]):
        if not factors:
            raise RingSpecError("product needs at least one factor")
        self.factors = list(factors)
        self.finite = all(f.finite for f in factors)
        self.zero = tuple(f.zero for f in factors)
        if all(f.vec_dim for f in factors):
            self.vec_dim = sum(f.vec_dim for f in factors)

    @property
    def spec(self):
        return {"kind": "product", "factors": [f.spec for f in self.factors]}

    def describe(self):
        return " x ".join(f.describe() for f in self.factors)

    @property
    def size(self):
        return math.prod(f.size for f in self.factors) if self.finite else None

    def add(self, x, y):
        return tuple(f.add(a, b) for f, a, b in zip(self.factors, x, y))

    def neg(self, x):
        return tuple(f.neg(a) for f, a in zip(self.factors, x))

    def mul(self, x, y):
        return tuple(f.mul(a, b) for f, a, b in zip(self.factors, x, y))

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if not isinstance(x, (tuple, list)) or len(x) != len(self.factors):
            raise ElementError(f"not a {len(self.factors)}-tuple: {x!r}")
        return tuple(f.canon(a) for f, a in zip(self.factors, x))

    def sort_key(self, x):
        return tuple(f.sort_key(a) for f, a in zip(self.factors, x))

    def encode(self, x):
        return "(" + ",".join(f.encode(a) for f, a in zip(self.factors, x)) + ")"

    def decode(self, s):
        parts = _split_top(_strip_brackets(s, "(", ")"))
        if len(parts) != len(self.factors):
            raise ElementError(f"expected {len(self.factors)} components in {s!r}")
        return tuple(f.decode(p) for f, p in zip(self.factors, parts))

    def _enumerate(self):
        return itertools.product(*(f.elements() for f in self.factors))

    def _additive_order(self, x):
        orders = [f.additive_order(a) for f, a in zip(self.factors, x)]
        if INFINITE in orders:
            return INFINITE
        return reduce(math.lcm, orders, 1)

    def _slices(self):
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.vec_dim))
            start += f.vec_dim
        return out

    def to_array(self, elems):
        if not self.vec_dim:
            return None
        elems = list(elems)
        cols = []
        for i, f in enumerate(self.factors):
            a = f.to_array([e[i] for e in elems])
            if a is None:
                return None
            cols.append(a.reshape(-1, f.vec_dim))
        return np.hstack(cols) if cols else np.zeros((0, 0), dtype=np.int64)

    def from_array(self, arr):
        parts = [f.from_array(arr[:, sl]) for f, sl in zip(self.factors, self._slices())]
        return list(zip(*parts))

    def _outer(self, A, B, which):
        cols = []
        for f, sl in zip(self.factors, self._slices()):
            r = getattr(f, which)(A[:, sl], B[:, sl])
            if r is None:
                return None
            cols.append(r)
        return np.hstack(cols)

    def add_outer(self, A, B):
        return self._outer(A, B, "add_outer")

    def mul_outer(self, A, B):
        return self._outer(A, B, "mul_outer")


class LatticeRing(Ring):
    """Z^m with componentwise addition and a bilinear product.

    ``mul[i][j]`` lists the integer coordinates of b_i * b_j in the basis
    b_1..b_m.  Without a table the ring supports addition only.
    """

    kind = "lattice"
    finite = False

    def __init__(self, rank: int, mul=None):
        if not isinstance(rank, int) or rank < 1:
            raise RingSpecError("lattice rank must be a positive integer")
        self.rank = rank
        self.vec_dim = rank
        self.zero = (0,) * rank
        if mul is not None:
            table = [[tuple(int(c) for c in mul[i][j]) for j in range(rank)] for i in range(rank)]
            if any(len(table[i][j]) != rank for i in range(rank) for j in range(rank)):
                raise RingSpecError("lattice multiplication table has the wrong shape")
            self.table = table
            basis = [tuple(int(i == k) for k in range(rank)) for i in range(rank)]
            for a, b, c in itertools.product(basis, repeat=3):
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                    raise RingSpecError(
                        f"lattice product not associative at basis triple {(a, b, c)}", witness=(a, b, c)
                    )
        else:
            self.table = None

    @property
    def spec(self):
        mul = None if self.table is None else [[list(c) for c in row] for row in self.table]
        return {"kind": "lattice", "rank": self.rank, "mul": mul}

    def describe(self):
        return f"lattice Z^{self.rank}"

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def sub(self, x, y):
        return tuple(a - b for a, b in zip(x, y))

    def mul(self, x, y):
        if self.table is None:
            raise RingSpecError("this lattice has no multiplication table")
        out = [0] * self.rank
        for i, a in enumerate(x):
            if a:
                row = self.table[i]
                for j, b in enumerate(y):
                    if b:
                        ab = a * b
                        for k, c in enumerate(row[j]):
                            if c:
                                out[k] += ab * c
        return tuple(out)

    def smul(self, k, x):
        return tuple(k * a for a in x)

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if (
            isinstance(x, (tuple, list))
            and len(x) == self.rank
            and all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in x)
        ):
            return tuple(int(v) for v in x)
        raise ElementError(f"not an element of {self.describe()}: {x!r}")

    def encode(self, x):
        return "(" + ",".join(str(a) for a in x) + ")"

    def decode(self, s):
        parts = _split_top(_strip_brackets(s.strip(), "(", ")"))
        try:
            return self.canon(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ElementError(f"bad lattice element {s!r}") from exc

    def _additive_order(self, x):
        return 1 if x == self.zero else INFINITE

    def to_array(self, elems):
        arr = np.array(list(elems), dtype=object).reshape(-1, self.rank)
        if arr.size and int(np.abs(arr).max()) >= 1 << 30:
            return None
        return arr.astype(np.int64)

    def from_array(self, arr):
        return list(map(tuple, arr.tolist()))

    def add_outer(self, A, B):
        return (A[:, None, :] + B[None, :, :]).reshape(-1, self.rank)


# ---------------------------------------------------------------------------
# finite rings given by index tables (tables, quotients, subrings)
# ---------------------------------------------------------------------------


class _IndexedFinite(Ring):
    """Finite ring whose elements can be numbered 0..N-1 for table kernels."""

    @cached_property
    def _tables(self):
        if self.size > _TABLE_LIMIT:
            return None
        elems = self.elements()
        idx = self.index
        n = len(elems)
        add = np.empty((n, n), dtype=np.int32)
        mul = np.empty((n, n), dtype=np.int32)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                add[i, j] = idx[self.add(a, b)]
                mul[i, j] = idx[self.mul(a, b)]
        return add, mul

    @property
    def vec_dim(self):  # type: ignore[override]
        return 1 if self.size <= _TABLE_LIMIT else None

    def to_array(self, elems):
        if self._tables is None:
            return None
        idx = self.index
        return np.fromiter((idx[e] for e in elems), dtype=np.int64).reshape(-1, 1)

    def from_array(self, arr):
        elems = self.elements()
        return [elems[i] for i in arr[:, 0].tolist()]

    def add_outer(self, A, B):
        return self._tables[0][A[:, None, 0], B[None, :, 0]].reshape(-1, 1).astype(np.int64)

    def mul_outer(self, A, B):
        return self._tables[1][A[:, None, 0], B[None, :, 0]].reshape(-1, 1).astype(np.int64)


class TableRing(_IndexedFinite):
    """Ring on {0..N-1} given by explicit addition and multiplication tables."""

    kind = "table"
    _EAGER = 64

    def __init__(self, add_table, mul_table, check: bool = True):
        add = np.asarray(add_table, dtype=np.int64)
        mul = np.asarray(mul_table, dtype=np.int64)
        if add.ndim != 2 or add.shape[0] != add.shape[1] or add.shape != mul.shape:
            raise RingSpecError("table ring needs two square tables of equal size")
        n = add.shape[0]
        if n < 1:
            raise RingSpecError("table ring needs at least one element")
        if add.min() < 0 or add.max() >= n or mul.min() < 0 or mul.max() >= n:
            raise RingSpecError("table entries must be element indices 0..N-1")
        self.n = n
        self.add_t, self.mul_t = add, mul
        zeros = [z for z in range(n) if np.all(add[z] == np.arange(n))]
        if not zeros:
            raise RingSpecError("addition has no neutral element")
        self.zero = zeros[0]
        self._neg = np.full(n, -1, dtype=np.int64)
        rows, cols = np.nonzero(add == self.zero)
        self._neg[rows] = cols
        if check:
            self._check_axioms()

    def _check_axioms(self):
        n, add, mul = self.n, self.add_t, self.mul_t
        if np.any(self._neg < 0):
            a = int(np.argmax(self._neg < 0))
            raise RingSpecError(f"element {a} has no additive inverse", witness=(a,))
        if np.any(add != add.T):
            a, b = map(int, np.argwhere(add != add.T)[0])
            raise RingSpecError(f"addition not commutative at ({a}, {b})", witness=(a, b))
        if n <= self._EAGER:
            a, b, c = (g.ravel() for g in np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij"))
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, n, size=(3, 200_000))
        checks = [
            ("addition not associative", add[add[a, b], c] != add[a, add[b, c]]),
            ("multiplication not associative", mul[mul[a, b], c] != mul[a, mul[b, c]]),
            ("left distributivity fails", mul[a, add[b, c]] != add[mul[a, b], mul[a, c]]),
            ("right distributivity fails", mul[add[a, b], c] != add[mul[a, c], mul[b, c]]),
        ]
        for msg, bad in checks:
            if np.any(bad):
                i = int(np.argmax(bad))
                triple = (int(a[i]), int(b[i]), int(c[i]))
                raise RingSpecError(f"{msg} at triple {triple}", witness=triple)

    @property
    def spec(self):
        return {"kind": "table", "add": self.add_t.tolist(), "mul": self.mul_t.tolist()}

    def describe(self):
        return f"table ring of order {self.n}"

    @property
    def size(self):
        return self.n

    def add(self, a, b):
        return int(self.add_t[a, b])

    def neg(self, a):
        return int(self._neg[a])

    def mul(self, a, b):
        return int(self.mul_t[a, b])

    def canon(self, x):
        if isinstance(x, Element):
            x = _unwrap(self, x)
        if isinstance(x, str):
            return self.decode(x)
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool) and 0 <= x < self.n:
            return int(x)
        raise ElementError(f"not an element index of {self.describe()}: {x!r}")

    def decode(self, s):
        try:
            return self.canon(int(s.strip()))
        except ValueError as exc:
            raise ElementError(f"bad element index {s!r}") from exc

    def _enumerate(self):
        return range(self.n)

    @cached_property
    def _tables(self):
        return self.add_t, self.mul_t

    @property
    def vec_dim(self):  # type: ignore[override]
        return 1

    def to_array(self, elems):
        return np.fromiter(elems, dtype=np.int64).reshape(-1, 1)

    def from_array(self, arr):
        return arr[:, 0].tolist()


class SubringRing(_IndexedFinite):
    """A finite subring of ``parent`` treated as a ring in its own right."""

    kind = "subring"

    def __init__(self, parent: Ring, members, check: bool = True):
        members = frozenset(parent.canon(m) for m in members)
        self.parent = parent
        self.members = members
        self.zero = parent.zero
        if check:
            missing = _closed_under(parent, members)
            if missing is not None:
                raise SubstructureError(f"not a subring: {missing[0]}", witness=missing)

    @property
    def spec(self):
        return {
            "kind": "subring",
            "parent": self.parent.spec,
            "members": sorted(self.parent.encode(m) for m in self.members),
        }

    def describe(self):
        return f"subring of order {len(self.members)} in {self.parent.describe()}"

    @property
    def size(self):
        return len(self.members)

    def add(self, a, b):
        return self.parent.add(a, b)

    def neg(self, a):
        return self.parent.neg(a)

    def mul(self, a, b):
        return self.parent.mul(a, b)

    def sub(self, a, b):
        return self.parent.sub(a, b)

    def canon(self, x):
        y = self.parent.canon(x)
        if y not in self.members:
            raise ElementError(f"{self.parent.encode(y)} is not in the subring")
        return y

    def contains(self, x):
        return x in self.members

    def sort_key(self, x):
        return self.parent.sort_key(x)

    def encode(self, x):
        return self.parent.encode(x)

    def decode(self, s):
        return self.canon(self.parent.decode(s))

    def _enumerate(self):
        return self.members

    def _additive_order(self, a):
        return self.parent.additive_order(a)

    # delegate vector kernels to the parent when it has them
    @property
    def vec_dim(self):  # type: ignore[override]
        return self.parent.vec_dim or super().vec_dim

    def to_array(self, elems):
        return self.parent.to_array(elems) if self.parent.vec_dim else super().to_array(elems)

    def from_array(self, arr):
        return self.parent.from_array(arr) if self.parent.vec_dim else super().from_array(arr)

    def add_outer(self, A, B):
        return self.parent.add_outer(A, B) if self.parent.vec_dim else super().add_outer(A, B)

    def mul_outer(self, A, B):
        return self.parent.mul_outer(A, B) if self.parent.vec_dim else super().mul_outer(A, B)


class QuotientRing(_IndexedFinite):
    """R/I for a finite ring R and a two-sided ideal I.

    Cosets are represented by their least member under ``base.sort_key``.
    """

    kind = "quotient"

    def __init__(self, base: Ring, ideal, generators=None):
        if not base.finite:
            raise InfiniteRingError("quotients are only built over finite rings")
        self.base = base
        self.ideal = frozenset(ideal)
        self.generators = list(generators) if generators is not None else None
        self.zero = self._rep_map[base.zero]

    @cached_property
    def _rep_map(self) -> dict:
        base = self.base
        ideal = sorted(self.ideal, key=base.sort_key)
        rep = {}
        for x in base.elements():
            if x in rep:
                continue
            coset = [base.add(x, i) for i in ideal]
            r = min(coset, key=base.sort_key)
            for y in coset:
                rep[y] = r
        return rep

    @property
    def spec(self):
        gens = self.generators if self.generators is not None else self.ideal
        return {
            "kind": "quotient",
            "base": self.base.spec,
            "ideal": sorted(self.base.encode(g) for g in gens),
        }

    def describe(self):
        return f"{self.base.describe()} / ideal of order {len(self.ideal)}"

    @property
    def size(self):
        return self.base.size // len(self.ideal)

    def project(self, x):
        """Natural projection R -> R/I."""
        return self._rep_map[x]

    def add(self, a, b):
        return self._rep_map[self.base.add(a, b)]

    def neg(self, a):
        return self._rep_map[self.base.neg(a)]

    def mul(self, a, b):
        return self._rep_map[self.base.mul(a, b)]

    def canon(self, x):
        return self._rep_map[self.base.canon(x)]

    def contains(self, x):
        return self._rep_map.get(x, None) == x

    def sort_key(self, x):
        return self.base.sort_key(x)

    def encode(self, x):
        return self.base.encode(x)

    def decode(self, s):
        return self.canon(self.base.decode(s))

    def _enumerate(self):
        return set(self._rep_map.values())


def _closed_under(ring: Ring, members: frozenset):
    """First violation of subring closure, as (description, a, b), or None."""
    if ring.zero not in members:
        return ("0 missing", ring.zero, None)
    ordered = sorted(members, key=ring.sort_key)
    # sums and products first: in a finite ring additive closure already
    # forces negatives, so an escaping sum is the more informative witness
    for a in ordered:
        for b in ordered:
            if ring.add(a, b) not in members:
                return ("sum escapes", a, b)
            if ring.mul(a, b) not in members:
                return ("product escapes", a, b)
    for a in ordered:
        if ring.neg(a) not in members:
            return (f"-{ring.encode(a)} missing", a, None)
    return None


# ---------------------------------------------------------------------------
# Element wrapper and the public operations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Element:
    """A payload tagged with its ring; supports ``+ - *`` and equality."""

    ring: Ring
    payload: Any

    def _other(self, other):
        if isinstance(other, Element):
            if other.ring != self.ring:
                raise RingMismatchError(
                    f"{self.ring.describe()} vs {other.ring.describe()}"
                )
            return other.payload
        return self.ring.canon(other)

    def __add__(self, other):
        return Element(self.ring, self.ring.add(self.payload, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Element(self.ring, self.ring.sub(self.payload, self._other(other)))

    def __rsub__(self, other):
        return Element(self.ring, self.ring.sub(self._other(other), self.payload))

    def __mul__(self, other):
        return Element(self.ring, self.ring.mul(self.payload, self._other(other)))

    def __rmul__(self, other):
        return Element(self.ring, self.ring.mul(self._other(other), self.payload))

    def __neg__(self):
        return Element(self.ring, self.ring.neg(self.payload))

    def __str__(self):
        return self.ring.encode(self.payload)


def _unwrap(ring: Ring, x: Element):
    if x.ring != ring:
        raise RingMismatchError(f"element of {x.ring.describe()} used in {ring.describe()}")
    return x.payload


def make_ring(spec) -> Ring:
    """Build a ring from a spec tree (dict), or a JSON/YAML document string."""
    if isinstance(spec, Ring):
        return spec
    if isinstance(spec, str):
        try:
            spec = yaml.safe_load(spec)
        except yaml.YAMLError as exc:
            raise RingSpecError(f"ring spec does not parse: {exc}") from exc
    if not isinstance(spec, dict) or "kind" not in spec:
        raise RingSpecError(f"ring spec must be a mapping with a 'kind': {spec!r}")
    kind = spec["kind"]
    try:
        if kind == "zmod":
            return ZMod(spec["n"])
        if kind == "integers":
            return Integers()
        if kind == "quadfield":
            return QuadField(spec["d"])
        if kind == "matrix":
            return MatrixRing(make_ring(spec["base"]), spec["dim"])
        if kind == "product":
            return ProductRing([make_ring(f) for f in spec["factors"]])
        if kind == "lattice":
            return LatticeRing(spec["rank"], spec.get("mul"))
        if kind == "table":
            return TableRing(spec["add"], spec["mul"])
        if kind == "subring":
            parent = make_ring(spec["parent"])
            return SubringRing(parent, [parent.canon(m) for m in spec["members"]])
        if kind == "quotient":
            base = make_ring(spec["base"])
            if not base.finite:
                raise RingSpecError("quotient needs a finite base ring")
            gens = []
            for g in spec.get("ideal", []):
                try:
                    gens.append(base.canon(g))
                except (ElementError, TypeError) as exc:
                    raise RingSpecError(f"ideal generator {g!r} is not in the base ring") from exc
            ideal = _closure.ideal_closure(base, base.elements(), gens)
            return QuotientRing(base, ideal, generators=gens)
    except KeyError as exc:
        raise RingSpecError(f"{kind} spec is missing field {exc}") from exc
    raise RingSpecError(f"unknown ring kind {kind!r}")


def load_ring_spec(path) -> Ring:
    with open(path, encoding="utf-8") as fh:
        return make_ring(fh.read())


def arith(ring: Ring, op: str, a, b=None) -> Element:
    """One ring operation on elements (or raw payloads) of ``ring``."""
    x = ring.canon(a) if not isinstance(a, Element) else _unwrap(ring, a)
    if op == "neg":
        return Element(ring, ring.neg(x))
    if b is None:
        raise ValueError(f"{op} needs two operands")
    y = ring.canon(b) if not isinstance(b, Element) else _unwrap(ring, b)
    if op == "add":
        return Element(ring, ring.add(x, y))
    if op == "mul":
        return Element(ring, ring.mul(x, y))
    if op == "sub":
        return Element(ring, ring.sub(x, y))
    raise ValueError(f"unknown operation {op!r}")


def additive_order(ring: Ring, a):
    x = ring.canon(a) if not isinstance(a, Element) else _unwrap(ring, a)
    return ring.additive_order(x)


def quotient_ring(ring: Ring, ideal) -> QuotientRing:
    """R/I for a finite ring R; ``ideal`` (an ElementSet or iterable) must be an ideal."""
    if not ring.finite:
        raise InfiniteRingError("quotient_ring needs a finite ring")
    members = frozenset(ring.canon(x) for x in ideal)
    witness = _ideal_violation(ring, ring.elements(), members)
    if witness is not None:
        raise SubstructureError(f"not an ideal: {witness[0]}", witness=witness)
    return QuotientRing(ring, members)


def _ideal_violation(ring: Ring, r_elems, members: frozenset):
    if ring.zero not in members:
        return ("0 missing", ring.zero, None)
    ordered = sorted(members, key=ring.sort_key)
    for i in ordered:
        for j in ordered:
            if ring.add(i, j) not in members:
                return ("i+j escapes", i, j)
    for i in ordered:
        if ring.neg(i) not in members:
            return ("-i escapes", i, None)
    for r in r_elems:
        for i in ordered:
            if ring.mul(r, i) not in members:
                return ("r*i escapes", r, i)
            if ring.mul(i, r) not in members:
                return ("i*r escapes", i, r)
    return None
