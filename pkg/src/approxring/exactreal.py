"""Exact numbers of the form p + q*sqrt(d) with rational p, q.

Every window-membership and truncation test in the package is decided with
these, never with floats.  Floats appear only in reports.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

__all__ = ["QuadReal", "is_squarefree", "as_quadreal", "sqrt_bounds"]


def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def sqrt_bounds(d: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational interval of width 2**-bits containing sqrt(d)."""
    scale = 1 << bits
    lo = math.isqrt(d * scale * scale)
    hi = lo if lo * lo == d * scale * scale else lo + 1
    return Fraction(lo, scale), Fraction(hi, scale)


class QuadReal:
    """Real number p + q*sqrt(d).

    ``d`` is a squarefree integer >= 2, or 1 for plain rationals (then q is
    folded into p).  Two values can be combined when they share ``d`` or one
    of them is rational.
    """

    __slots__ = ("p", "q", "d")

    def __init__(self, p=0, q=0, d: int = 1):
        p, q = Fraction(p), Fraction(q)
        if d == 1:
            p, q = p + q, Fraction(0)
        self.p, self.q, self.d = p, q, int(d)

    # -- plumbing -------------------------------------------------------
    def _common(self, other) -> tuple[QuadReal, int]:
        other = as_quadreal(other, self.d)
        if self.d == other.d:
            return other, self.d
        if other.q == 0:
            return QuadReal(other.p, 0, self.d), self.d
        if self.q == 0:
            return other, other.d
        raise ValueError(f"cannot combine sqrt({self.d}) and sqrt({other.d}) values")

    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def conjugate(self) -> QuadReal:
        return QuadReal(self.p, -self.q, self.d)

    def norm(self) -> Fraction:
        return self.p * self.p - self.d * self.q * self.q

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        o, d = self._common(other)
        return QuadReal(self.p + o.p, self.q + o.q, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadReal(-self.p, -self.q, self.d)

    def __sub__(self, other):
        o, d = self._common(other)
        return QuadReal(self.p - o.p, self.q - o.q, d)

    def __rsub__(self, other):
        return as_quadreal(other, self.d) - self

    def __mul__(self, other):
        o, d = self._common(other)
        return QuadReal(self.p * o.p + d * self.q * o.q, self.p * o.q + self.q * o.p, d)

    __rmul__ = __mul__

    def inverse(self) -> QuadReal:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QuadReal(self.p / n, -self.q / n, self.d)

    def __truediv__(self, other):
        o, _ = self._common(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return as_quadreal(other, self.d) * self.inverse()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # -- exact order ----------------------------------------------------
    def sign(self) -> int:
        p, q = self.p, self.q
        sp = (p > 0) - (p < 0)
        sq = (q > 0) - (q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with d q^2 (never equal: d is not a square)
        return sp if p * p > self.d * q * q else sq

    def __eq__(self, other):
        if not isinstance(other, (QuadReal, int, Rational)):
            return NotImplemented
        try:
            return (self - other).sign() == 0
        except ValueError:
            return False

    def __hash__(self):
        if self.q == 0:
            return hash(self.p)
        return hash((self.p, self.q, self.d))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor(self) -> int:
        """Exact floor; irrational values are refined until the floor is pinned."""
        if self.q == 0:
            return math.floor(self.p)
        bits = 32
        while True:
            lo, hi = self.interval(bits)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            bits *= 2

    def ceil(self) -> int:
        return -(-self).floor()

    # -- approximations -------------------------------------------------
    def interval(self, bits: int = 53) -> tuple[Fraction, Fraction]:
        """Rational enclosure; the width shrinks as ``bits`` grows."""
        if self.q == 0:
            return self.p, self.p
        lo, hi = sqrt_bounds(self.d, bits)
        a, b = self.p + self.q * lo, self.p + self.q * hi
        return (a, b) if a <= b else (b, a)

    def __float__(self):
        if self.q == 0:
            return float(self.p)
        lo, hi = self.interval(64)
        return float((lo + hi) / 2)

    def __repr__(self):
        if self.q == 0:
            return f"QuadReal({self.p})"
        return f"QuadReal({self.p}, {self.q}, d={self.d})"

    def __str__(self):
        if self.q == 0:
            return str(self.p)
        return f"{self.p}{'+' if self.q > 0 else '-'}{abs(self.q)}*sqrt({self.d})"

    def to_json(self):
        return {"p": str(self.p), "q": str(self.q), "d": self.d}


def as_quadreal(x, d: int = 1) -> QuadReal:
    if isinstance(x, QuadReal):
        return x
    if isinstance(x, (int, Fraction, Rational)):
        return QuadReal(Fraction(x), 0, d)
    if isinstance(x, str):
        return QuadReal(Fraction(x), 0, d)
    if isinstance(x, float):
        # floats are accepted only when they are exact binary rationals the caller meant
        return QuadReal(Fraction(x), 0, d)
    raise TypeError(f"not an exact real: {x!r}")
