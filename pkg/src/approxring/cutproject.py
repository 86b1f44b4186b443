"""Cut-and-project sets: Pisot windows in real quadratic fields, generic
lattice schemes, discreteness statistics, cover checks, span ideals and
model sets inside matrix algebras.

Membership in windows and truncation regions is always decided with exact
arithmetic in Q(sqrt d).  Floats are used only to bound enumeration ranges
(with slack, followed by an exact filter) and for reported distances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, CloudError
from .exactreal import QuadReal, as_quadreal
from .ring import LatticeRing, QuadField, Ring
from .setops import CoverCertificate, ElementSet, cover_number, productset, sumset

__all__ = [
    "QuadFieldData",
    "Window",
    "LatticeScheme",
    "ModelSetSpec",
    "PointCloud",
    "pisot_window",
    "model_set",
    "cloud_stats",
    "approx_check_cloud",
    "window_commensurability",
    "span_ideal",
    "algebra_model_set",
    "write_cloud",
    "write_cloud_svg",
]

DEFAULT_POINT_BUDGET = 2_000_000


def _rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


@dataclass(frozen=True)
class QuadFieldData:
    """Real quadratic field Q(sqrt d) with its ring of integers and both real embeddings."""

    d: int

    @property
    def ring(self) -> QuadField:
        return QuadField(self.d)

    @property
    def basis(self) -> str:
        return "1, (1+sqrt d)/2" if self.d % 4 == 1 else "1, sqrt d"

    def sigma(self, x) -> QuadReal:
        return self.ring.sigma(x)

    def sigma_conj(self, x) -> QuadReal:
        return self.ring.sigma_conj(x)


@dataclass(frozen=True)
class Window:
    """Symmetric window {v : |v_i| <= r} (box) or {v : |v| <= r} (ball)."""

    shape: str
    radius: Fraction

    def __post_init__(self):
        if self.shape not in ("box", "ball"):
            raise CloudError(f"window shape must be box or ball, not {self.shape!r}")
        if self.radius is None or _rat(self.radius) <= 0:
            raise CloudError("window must be bounded with nonempty interior (radius > 0)")
        object.__setattr__(self, "radius", _rat(self.radius))

    def contains(self, v) -> bool:
        r = self.radius
        if self.shape == "box":
            return all(abs(as_quadreal(c)) <= r for c in v)
        total = QuadReal(0)
        for c in v:
            c = as_quadreal(c)
            total = total + c * c
        return total <= r * r

    def to_dict(self):
        return {"shape": self.shape, "radius": str(self.radius)}


@dataclass
class LatticeScheme:
    """Lattice Z^m embedded in direct x internal space.

    ``direct[k]`` and ``internal[k]`` are the exact coordinates of the k-th
    basis vector (rationals or QuadReal values sharing one sqrt d).
    ``mul`` optionally makes Z^m a ring (see :class:`LatticeRing`).
    """

    direct: list
    internal: list
    mul: list | None = None

    def __post_init__(self):
        self.direct = [[as_quadreal(_parse_coord(c)) for c in row] for row in self.direct]
        self.internal = [[as_quadreal(_parse_coord(c)) for c in row] for row in self.internal]
        m = len(self.direct)
        if m == 0 or len(self.internal) != m:
            raise CloudError("lattice needs the same number of direct and internal basis rows")
        if len({len(r) for r in self.direct}) != 1 or len({len(r) for r in self.internal}) != 1:
            raise CloudError("inconsistent coordinate dimensions in the lattice basis")

    @property
    def rank(self) -> int:
        return len(self.direct)

    @property
    def dim_direct(self) -> int:
        return len(self.direct[0])

    @property
    def dim_internal(self) -> int:
        return len(self.internal[0])

    @property
    def ring(self) -> LatticeRing:
        return LatticeRing(self.rank, self.mul)

    def to_dict(self):
        return {
            "direct": [[str(c) for c in row] for row in self.direct],
            "internal": [[str(c) for c in row] for row in self.internal],
            "mul": self.mul,
        }


def _parse_coord(c):
    """Coordinates may be numbers, QuadReal, {"p","q","d"} maps or "p+q*sqrt(d)" text."""
    if isinstance(c, QuadReal):
        return c
    if isinstance(c, dict):
        return QuadReal(Fraction(c.get("p", 0)), Fraction(c.get("q", 0)), int(c.get("d", 1)))
    if isinstance(c, str) and "sqrt(" in c:
        prefix, _, rest = c.replace(" ", "").partition("sqrt(")
        if not rest.endswith(")"):
            raise CloudError(f"bad coordinate {c!r}")
        d = int(rest[:-1])
        prefix = prefix.rstrip("*")
        cut = max(prefix.rfind("+"), prefix.rfind("-"))
        if cut > 0:
            p_text, q_text = prefix[:cut], prefix[cut:]
        else:
            p_text, q_text = "0", prefix
        if q_text in ("", "+", "-"):
            q_text += "1"
        try:
            return QuadReal(Fraction(p_text), Fraction(q_text), d)
        except (ValueError, ZeroDivisionError) as exc:
            raise CloudError(f"bad coordinate {c!r}") from exc
    return _rat(c)


@dataclass
class ModelSetSpec:
    """Description of a weak model set.

    ``scheme`` is ``"quad"`` (with ``d``) or ``"lattice"`` (with
    ``lattice``).  The quad scheme embeds O_K by x -> (sigma x, sigma' x).
    ``R`` bounds the direct coordinate (box of half-width R, or ball when
    ``truncation_shape`` is "ball").
    """

    scheme: str
    window: Window
    R: Fraction
    d: int | None = None
    lattice: LatticeScheme | None = None
    truncation_shape: str = "box"

    def __post_init__(self):
        self.R = _rat(self.R)
        if self.R <= 0:
            raise CloudError("truncation R must be positive")
        if self.scheme == "quad" and self.d is None:
            raise CloudError("quad scheme needs d")
        if self.scheme == "lattice" and self.lattice is None:
            raise CloudError("lattice scheme needs a lattice")
        if self.scheme not in ("quad", "lattice"):
            raise CloudError(f"unknown scheme {self.scheme!r}")

    @classmethod
    def from_dict(cls, d: dict) -> ModelSetSpec:
        win = d.get("window")
        if win is None:
            raise CloudError("window must be bounded: no window given")
        if not isinstance(win, dict):
            win = {"shape": "box", "radius": win}
        window = Window(win.get("shape", "box"), win.get("radius"))
        lattice = None
        if d.get("scheme") == "lattice":
            lat = d.get("lattice") or {}
            lattice = LatticeScheme(lat.get("direct", []), lat.get("internal", []), lat.get("mul"))
        return cls(d.get("scheme", "quad"), window, d["R"], d.get("d"), lattice, d.get("truncation_shape", "box"))

    def to_dict(self):
        out = {
            "scheme": self.scheme,
            "window": self.window.to_dict(),
            "R": str(self.R),
            "truncation_shape": self.truncation_shape,
        }
        if self.d is not None:
            out["d"] = self.d
        if self.lattice is not None:
            out["lattice"] = self.lattice.to_dict()
        return out


@dataclass
class PointCloud:
    """Enumerated points with exact direct (and internal) coordinates.

    ``points`` are ring payloads (quadratic integers, lattice coordinate
    vectors, or coefficient tuples for algebra clouds) in a fixed order;
    ``direct[i]`` is the tuple of exact direct coordinates of ``points[i]``.
    """

    points: list
    direct: list
    internal: list
    ring: Ring | None
    R: Fraction
    truncation_shape: str = "box"
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return len(self.direct[0]) if self.direct else 0

    def as_set(self) -> ElementSet:
        if self.ring is None:
            raise CloudError("this cloud has no ambient ring for set arithmetic")
        return ElementSet._wrap(self.ring, frozenset(self.points))

    def restricted(self, radius) -> PointCloud:
        """Sub-cloud with direct coordinates inside the truncation shape of the given radius."""
        win = Window(self.truncation_shape, radius)
        keep = [i for i in range(len(self.points)) if win.contains(self.direct[i])]
        return PointCloud(
            [self.points[i] for i in keep],
            [self.direct[i] for i in keep],
            [self.internal[i] for i in keep] if self.internal else [],
            self.ring,
            radius,
            self.truncation_shape,
            dict(self.provenance, restricted_to=str(radius)),
        )

    def float_direct(self) -> np.ndarray:
        return np.array([[float(c) for c in v] for v in self.direct], dtype=float).reshape(len(self.direct), -1)

    def encode_point(self, i: int) -> str:
        if self.ring is not None:
            return self.ring.encode(self.points[i])
        return repr(self.points[i])

    @classmethod
    def from_coordinates(cls, coords, R=None) -> PointCloud:
        """A bare cloud from exact coordinate tuples (no ambient ring)."""
        direct = [tuple(as_quadreal(_parse_coord(c)) for c in v) for v in coords]
        if R is None:
            R = max((max((abs(c) for c in v), default=QuadReal(0)) for v in direct), default=QuadReal(1))
            R = max(Fraction(1), Fraction(math.ceil(float(R))))
        return cls(list(range(len(direct))), direct, [], None, _rat(R), "box", {"scheme": "explicit"})


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def pisot_window(field: QuadFieldData | int, w, R, budget_points: int = DEFAULT_POINT_BUDGET) -> PointCloud:
    """All x in O_K with |sigma'(x)| <= w and |sigma(x)| <= R.

    For each omega-coefficient b the admissible a form an integer interval
    whose endpoints are exact floors and ceilings of values in Q(sqrt d).
    """
    if isinstance(field, int):
        field = QuadFieldData(field)
    w, R = _rat(w), _rat(R)
    if w <= 0 or R <= 0:
        raise CloudError("window w and truncation R must be positive")
    ring = field.ring
    d = field.d
    # sigma - sigma' = b*sqrt(d) (half basis) or 2b*sqrt(d); isqrt(d) <= sqrt(d) keeps this a superset
    scale = 1 if ring.half else 2
    bmax = math.floor((R + w) / (scale * math.isqrt(d)))
    points, direct, internal = [], [], []
    for b in range(-bmax, bmax + 1):
        beta, beta_c = ring.sigma((0, b)), ring.sigma_conj((0, b))
        lo = max((-R - beta).ceil(), (-w - beta_c).ceil())
        hi = min((R - beta).floor(), (w - beta_c).floor())
        for a in range(lo, hi + 1):
            x = (a, b)
            points.append(x)
            direct.append((beta + a,))
            internal.append((beta_c + a,))
            if len(points) > budget_points:
                raise BudgetExceeded(
                    f"Pisot window exceeds the point budget {budget_points}", reached=b, partial=len(points)
                )
    order = sorted(range(len(points)), key=lambda i: (float(direct[i][0]), points[i]))
    return PointCloud(
        [points[i] for i in order],
        [direct[i] for i in order],
        [internal[i] for i in order],
        ring,
        R,
        "box",
        {"scheme": "quad", "d": d, "w": str(w), "R": str(R)},
    )


def _integer_ranges(M: np.ndarray, bounds: np.ndarray, slack: float = 1e-6) -> list[range]:
    """Coefficient ranges containing every n with |(n @ M)_j| <= bounds_j."""
    m = M.shape[0]
    if np.linalg.matrix_rank(M) < m:
        raise CloudError("the lattice embedding is not injective (rank deficient); the window region is unbounded")
    pinv = np.linalg.pinv(M)  # n = y @ pinv for y in the row space
    reach = np.abs(pinv).T @ bounds  # |n_k| <= sum_j |pinv[j, k]| * bounds_j
    out = []
    for r in reach:
        top = math.floor(r * (1 + slack) + slack)
        out.append(range(-top, top + 1))
    return out


def model_set(spec: ModelSetSpec | dict, budget_points: int = DEFAULT_POINT_BUDGET) -> PointCloud:
    """Enumerate the weak model set pi_direct[lattice n (direct box R x window)].

    Projection injectivity is verified on the enumerated points; a collision
    raises :class:`CloudError` naming both lattice points.
    """
    if isinstance(spec, dict):
        spec = ModelSetSpec.from_dict(spec)
    if spec.scheme == "quad":
        if spec.window.shape != "box" or spec.truncation_shape != "box":
            raise CloudError("the quad scheme uses box windows (absolute values in one coordinate)")
        return pisot_window(QuadFieldData(spec.d), spec.window.radius, spec.R, budget_points)
    lat = spec.lattice
    m = lat.rank
    M = np.array(
        [[float(c) for c in lat.direct[k]] + [float(c) for c in lat.internal[k]] for k in range(m)], dtype=float
    )
    bounds = np.array([float(spec.R)] * lat.dim_direct + [float(spec.window.radius)] * lat.dim_internal)
    ranges = _integer_ranges(M, bounds)
    total = math.prod(len(r) for r in ranges)
    if total > 50 * budget_points:
        raise BudgetExceeded(f"lattice scan of {total} candidates exceeds the budget", reached=0)
    grids = np.array(np.meshgrid(*[np.arange(r.start, r.stop) for r in ranges], indexing="ij")).reshape(m, -1).T
    coords = grids @ M
    tol = 1e-7 * (1 + np.abs(bounds))
    ok = np.all(np.abs(coords) <= bounds + tol, axis=1)
    trunc = Window(spec.truncation_shape, spec.R)
    points, direct, internal = [], [], []
    for n in grids[ok].tolist():
        dv = tuple(sum((lat.direct[k][j] * n[k] for k in range(m) if n[k]), QuadReal(0)) for j in range(lat.dim_direct))
        iv = tuple(
            sum((lat.internal[k][j] * n[k] for k in range(m) if n[k]), QuadReal(0)) for j in range(lat.dim_internal)
        )
        if trunc.contains(dv) and (not iv or spec.window.contains(iv)):
            points.append(tuple(n))
            direct.append(dv)
            internal.append(iv)
            if len(points) > budget_points:
                raise BudgetExceeded(f"model set exceeds the point budget {budget_points}", partial=len(points))
    seen: dict = {}
    for p, dv in zip(points, direct):
        key = tuple((c.p, c.q, c.d) for c in dv)
        if key in seen:
            raise CloudError(f"projection collision between lattice points {seen[key]} and {p}", witness=(seen[key], p))
        seen[key] = p
    order = sorted(range(len(points)), key=lambda i: (tuple(float(c) for c in direct[i]), points[i]))
    return PointCloud(
        [points[i] for i in order],
        [direct[i] for i in order],
        [internal[i] for i in order],
        lat.ring,
        spec.R,
        spec.truncation_shape,
        {"scheme": "lattice", **spec.to_dict()},
    )


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def _min_pair_nd(F: np.ndarray, exact: list) -> tuple[QuadReal, tuple]:
    """Closest pair: float screening in chunks, then exact comparison of the near-minimal pairs."""
    n = len(F)
    eps = 1e-9 * (1.0 + float(np.abs(F).max()) ** 2)
    best = math.inf
    cands: list[tuple[int, int]] = []
    chunk = max(1, 2_000_000 // max(1, n))
    cols = np.arange(n)
    for s in range(0, n, chunk):
        block = F[s : s + chunk]
        d2 = ((block[:, None, :] - F[None, :, :]) ** 2).sum(-1)
        d2[cols[None, :] <= np.arange(s, s + len(block))[:, None]] = np.inf  # keep pairs i < j
        mb = float(d2.min())
        if mb <= best + eps:
            best = min(best, mb)
            ii, jj = np.nonzero(d2 <= best + eps)
            cands.extend((int(i) + s, int(j)) for i, j in zip(ii, jj))
    best_exact, pair = None, None
    for i, j in cands:
        if float(((F[i] - F[j]) ** 2).sum()) > best + eps:
            continue
        d2 = QuadReal(0)
        for a, b in zip(exact[i], exact[j]):
            diff = as_quadreal(a) - as_quadreal(b)
            d2 = d2 + diff * diff
        if best_exact is None or d2 < best_exact:
            best_exact, pair = d2, (i, j)
    return best_exact, pair


def cloud_stats(cloud: PointCloud, margin=None, grid_points: int = 4000) -> dict:
    """Uniform-discreteness and syndeticity statistics.

    * ``min_gap``: smallest distance between distinct points; exact
      (``min_gap_exact``, or its square in dimension > 1).
    * ``max_gap``: in one dimension the largest gap between consecutive
      points with both points in the interior |x| <= R - margin; in higher
      dimension twice the covering radius measured from a regular grid of
      interior reference points.
    * ``density``: points per unit measure of the truncation region.

    Gap statistics are None for a single point.  Margin defaults to 0 in
    one dimension and R/4 otherwise.
    """
    n = len(cloud)
    if n == 0:
        raise CloudError("empty cloud")
    dim = cloud.dim
    R = cloud.R
    if margin is None:
        margin = Fraction(0) if dim == 1 else R / 4
    margin = _rat(margin)
    if not 0 <= margin < R:
        raise CloudError("margin must satisfy 0 <= margin < R")
    if cloud.truncation_shape == "box":
        measure = float((2 * R) ** dim)
    else:
        measure = math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * float(R) ** dim
    out = {
        "count": n,
        "dim": dim,
        "density": n / measure,
        "min_gap": None,
        "min_gap_exact": None,
        "max_gap": None,
        "covering_radius": None,
        "margin": str(margin),
    }
    if n < 2:
        return out
    if dim == 1:
        xs = sorted((as_quadreal(v[0]) for v in cloud.direct))
        diffs = [xs[i + 1] - xs[i] for i in range(n - 1)]
        g = min(diffs)
        out["min_gap"] = float(g)
        out["min_gap_exact"] = str(g)
        inner = R - margin
        interior = [i for i in range(n - 1) if abs(xs[i]) <= inner and abs(xs[i + 1]) <= inner]
        if interior:
            G = max(diffs[i] for i in interior)
            out["max_gap"] = float(G)
            out["max_gap_exact"] = str(G)
            out["covering_radius"] = float(G) / 2
        return out
    F = cloud.float_direct()
    best_exact, pair = _min_pair_nd(F, cloud.direct)
    out["min_gap"] = math.sqrt(float(best_exact))
    out["min_gap_squared_exact"] = str(best_exact)
    out["min_gap_pair"] = [cloud.encode_point(pair[0]), cloud.encode_point(pair[1])]
    inner = float(R - margin)
    side = max(2, int(round(grid_points ** (1 / dim))))
    axes = [np.linspace(-inner, inner, side)] * dim
    grid = np.array(np.meshgrid(*axes, indexing="ij")).reshape(dim, -1).T
    if cloud.truncation_shape == "ball":
        grid = grid[(grid**2).sum(1) <= inner**2]
    radius = 0.0
    for s in range(0, len(grid), 512):
        d2 = ((grid[s : s + 512, None, :] - F[None, :, :]) ** 2).sum(-1)
        radius = max(radius, float(np.sqrt(d2.min(1)).max()))
    out["covering_radius"] = radius
    out["max_gap"] = 2 * radius
    return out


# ---------------------------------------------------------------------------
# cover checks
# ---------------------------------------------------------------------------


def approx_check_cloud(
    cloud: PointCloud, margin, mode: str = "greedy", budget_nodes: int = 10**6
) -> CoverCertificate:
    """Cover (M'+M') u M'M' by translates of M, where M' is the cloud restricted to R - margin.

    Sums and products are computed in the cloud's ring (O_K or the lattice
    ring), never from projected approximations.  Translates come from the
    full difference pool, so the certificate is valid even where sums and
    products leave the enumerated range.
    """
    margin = _rat(margin)
    if not 0 <= margin < cloud.R:
        raise CloudError("margin must satisfy 0 <= margin < R")
    M = cloud.as_set()
    inner = cloud.restricted(cloud.R - margin).as_set()
    if isinstance(cloud.ring, LatticeRing) and cloud.ring.table is None:
        raise CloudError("lattice scheme has no multiplication table; products are undefined")
    target = sumset(inner, inner) | productset(inner, inner)
    cert = cover_number(target, M, mode=mode, budget_nodes=budget_nodes)
    cert.stats["inner_points"] = len(inner)
    cert.stats["target_size"] = len(target)
    return cert


def window_commensurability(
    field: QuadFieldData | int,
    w1,
    w2,
    R,
    margin,
    mode: str = "greedy",
    budget_nodes: int = 10**6,
    budget_points: int = DEFAULT_POINT_BUDGET,
) -> tuple[CoverCertificate, CoverCertificate]:
    """Mutual covers between the Pisot windows of widths w1 and w2.

    Returns (cover of M1' by translates of M2, cover of M2' by translates of
    M1), where Mi' is the window-i cloud restricted to |sigma| <= R - margin.
    """
    if isinstance(field, int):
        field = QuadFieldData(field)
    margin = _rat(margin)
    R = _rat(R)
    if not 0 <= margin < R:
        raise CloudError("margin must satisfy 0 <= margin < R")
    c1 = pisot_window(field, w1, R, budget_points)
    c2 = pisot_window(field, w2, R, budget_points)
    i1 = c1.restricted(R - margin).as_set()
    i2 = c2.restricted(R - margin).as_set()
    return (
        cover_number(i1, c2.as_set(), mode=mode, budget_nodes=budget_nodes),
        cover_number(i2, c1.as_set(), mode=mode, budget_nodes=budget_nodes),
    )


# ---------------------------------------------------------------------------
# exact linear algebra over Q(sqrt d)
# ---------------------------------------------------------------------------


def _rref(rows: list[list[QuadReal]]) -> tuple[list[list[QuadReal]], list[int], list[int]]:
    """Reduced row echelon form; also the pivot columns and the indices of
    input rows that were independent (in input order)."""
    basis: list[list[QuadReal]] = []
    pivots: list[int] = []
    chosen: list[int] = []
    for idx, row in enumerate(rows):
        v = _reduce(row, basis, pivots)
        nz = next((j for j, c in enumerate(v) if c.sign() != 0), None)
        if nz is None:
            continue
        inv = v[nz].inverse()
        v = [c * inv for c in v]
        for b in range(len(basis)):
            f = basis[b][nz]
            if f.sign() != 0:
                basis[b] = [x - f * y for x, y in zip(basis[b], v)]
        basis.append(v)
        pivots.append(nz)
        chosen.append(idx)
    return basis, pivots, chosen


def _reduce(row, basis, pivots):
    v = [as_quadreal(c) for c in row]
    for b, p in zip(basis, pivots):
        f = v[p]
        if f.sign() != 0:
            v = [x - f * y for x, y in zip(v, b)]
    return v


def _in_span(row, basis, pivots) -> bool:
    return all(c.sign() == 0 for c in _reduce(row, basis, pivots))


def _algebra_mul(u, v, consts) -> list:
    n = len(u)
    out = [QuadReal(0)] * n
    for i in range(n):
        if u[i].sign() == 0:
            continue
        for j in range(n):
            if v[j].sign() == 0:
                continue
            uv = u[i] * v[j]
            for k in range(n):
                c = consts[i][j][k]
                if c:
                    out[k] = out[k] + uv * c
    return out


def span_ideal(cloud: PointCloud, structure_constants, grid_samples: int = 200, seed: int = 0) -> dict:
    """Linear span V of the cloud and whether cloud points multiply V into V.

    ``structure_constants[i][j][k]`` gives e_i e_j = sum_k c_ijk e_k for the
    direct-space algebra.  Because lambda -> lambda*v is linear and V is
    spanned by cloud points, checking a spanning subset of the cloud decides
    the condition for every cloud point.
    """
    consts = [[[_rat(c) for c in row] for row in plane] for plane in structure_constants]
    n = len(consts)
    if any(len(plane) != n or any(len(row) != n for row in plane) for plane in consts):
        raise CloudError("structure constants must form an n x n x n array")
    if cloud.dim != n:
        raise CloudError(f"cloud dimension {cloud.dim} does not match algebra dimension {n}")
    vecs = [[as_quadreal(c) for c in v] for v in cloud.direct]
    basis, pivots, chosen = _rref(vecs)
    gens = [vecs[i] for i in chosen]
    left = all(_in_span(_algebra_mul(g, b, consts), basis, pivots) for g in gens for b in basis)
    right = all(_in_span(_algebra_mul(b, g, consts), basis, pivots) for g in gens for b in basis)
    units = [[QuadReal(int(i == k)) for k in range(n)] for i in range(n)]
    ambient = all(
        _in_span(_algebra_mul(e, b, consts), basis, pivots) and _in_span(_algebra_mul(b, e, consts), basis, pivots)
        for e in units
        for b in basis
    )
    defect = None
    if basis and len(cloud) > 0:
        F = cloud.float_direct()
        B = np.array([[float(c) for c in g] for g in gens])
        rng = np.random.default_rng(np.random.SeedSequence([seed, len(cloud)]))
        coef = rng.uniform(-1, 1, size=(grid_samples, len(gens)))
        samples = coef @ B
        scale = float(cloud.R) / 2 / max(1e-12, float(np.abs(samples).max()))
        samples = samples * min(1.0, scale)
        d2 = ((samples[:, None, :] - F[None, :, :]) ** 2).sum(-1)
        defect = float(np.sqrt(d2.min(1)).max())
    return {
        "dimension": len(basis),
        "ambient_dimension": n,
        "basis": [[str(c) for c in b] for b in basis],
        "left_closed": left,
        "right_closed": right,
        "ideal_of_span": left and right,
        "ideal_of_ambient": ambient,
        "max_cloud_distance_to_V": 0.0,
        "max_V_sample_distance_to_cloud": defect,
    }


# ---------------------------------------------------------------------------
# model sets in a matrix algebra
# ---------------------------------------------------------------------------


def _frob2(mat) -> QuadReal:
    total = QuadReal(0)
    for c in mat:
        total = total + c * c
    return total


def _structure_constants(basis: list[list[Fraction]], size: int) -> list:
    """c_ijk with e_i e_j = sum_k c_ijk e_k; raises if the span is not a subalgebra."""
    mats = [np.array(b, dtype=object).reshape(size, size) for b in basis]
    rows = [[as_quadreal(c) for c in b] for b in basis]
    ech, piv, chosen = _rref(rows)
    if len(chosen) < len(basis):
        raise CloudError("basis elements are linearly dependent")
    n = len(basis)
    consts = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            prod = (mats[i].dot(mats[j])).ravel().tolist()
            coeffs = _solve_in_basis([Fraction(x) for x in prod], basis)
            if coeffs is None:
                raise CloudError(f"e{i + 1}*e{j + 1} leaves the span: the basis must span a subalgebra")
            consts[i][j] = coeffs
    return consts


def _solve_in_basis(target: list[Fraction], basis: list[list[Fraction]]) -> list[Fraction] | None:
    """Rational coefficients x with sum x_i basis_i = target, or None."""
    n, L = len(basis), len(target)
    A = [[Fraction(basis[i][r]) for i in range(n)] + [Fraction(target[r])] for r in range(L)]
    row, where = 0, [-1] * n
    for col in range(n):
        sel = next((r for r in range(row, L) if A[r][col] != 0), None)
        if sel is None:
            continue
        A[row], A[sel] = A[sel], A[row]
        piv = A[row][col]
        A[row] = [x / piv for x in A[row]]
        for r in range(L):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        where[col] = row
        row += 1
    if any(all(A[r][c] == 0 for c in range(n)) and A[r][n] != 0 for r in range(L)):
        return None
    return [A[where[c]][n] if where[c] >= 0 else Fraction(0) for c in range(n)]


def algebra_model_set(
    field: QuadFieldData | int,
    w,
    R,
    basis,
    margin=None,
    sample_pairs: int = 500,
    seed: int = 0,
    budget_points: int = DEFAULT_POINT_BUDGET,
) -> tuple[PointCloud, dict]:
    """Cloud {sum alpha_i e_i : alpha_i in the w-window} with Frobenius norm <= R.

    ``basis`` is a list of square rational matrices (flattened row-major or
    nested) spanning a subalgebra.  The closure report samples pairs from
    the cloud restricted to norm <= R - margin and checks that every product
    coefficient gamma_k = sum c_ijk alpha_i beta_j satisfies
    |sigma'(gamma_k)| <= w^2 * sum_ij |c_ijk|, i.e. products land in the
    enlarged window set.  Pairs whose product exceeds the truncation are
    excluded and counted.
    """
    if isinstance(field, int):
        field = QuadFieldData(field)
    w, R = _rat(w), _rat(R)
    flat = [np.array(b, dtype=object).ravel().tolist() for b in basis]
    if not flat:
        raise CloudError("empty basis")
    size = math.isqrt(len(flat[0]))
    if size * size != len(flat[0]) or any(len(b) != len(flat[0]) for b in flat):
        raise CloudError("basis elements must be square matrices of one size")
    flat = [[_rat(x) for x in b] for b in flat]
    consts = _structure_constants(flat, size)
    n = len(flat)
    # coefficient bound: |coef| <= R / s_min, with s_min the least singular value of the basis
    B = np.array([[float(x) for x in b] for b in flat])
    s_min = float(np.linalg.svd(B, compute_uv=False).min())
    coef_R = Fraction(math.ceil(float(R) / (s_min * (1 - 1e-9)) + 1e-9))
    alphas = pisot_window(field, w, coef_R, budget_points)
    if len(alphas) ** n > 50 * budget_points:
        raise BudgetExceeded(f"{len(alphas)}^{n} coefficient combinations exceed the budget", reached=0)
    sig = [a[0] for a in alphas.direct]
    ring = field.ring
    R2 = R * R
    points, direct = [], []
    for combo in itertools.product(range(len(alphas)), repeat=n):
        mat = [QuadReal(0)] * (size * size)
        for i, k in enumerate(combo):
            s = sig[k]
            if s.sign() == 0:
                continue
            for e, x in enumerate(flat[i]):
                if x:
                    mat[e] = mat[e] + s * x
        if _frob2(mat) <= R2:
            points.append(tuple(alphas.points[k] for k in combo))
            direct.append(tuple(mat))
            if len(points) > budget_points:
                raise BudgetExceeded(f"algebra cloud exceeds the point budget {budget_points}", partial=len(points))
    cloud = PointCloud(
        points,
        direct,
        [],
        None,
        R,
        "ball",
        {"scheme": "algebra", "d": field.d, "w": str(w), "R": str(R), "size": size, "basis_rank": n},
    )
    # closure sample
    if margin is None:
        margin = R / 2
    margin = _rat(margin)
    if not 0 <= margin < R:
        raise CloudError("margin must satisfy 0 <= margin < R")
    inner_r2 = (R - margin) ** 2
    inner = [i for i in range(len(points)) if _frob2(direct[i]) <= inner_r2]
    rng = np.random.default_rng(np.random.SeedSequence([seed, len(points)]))
    limits = [w * w * sum(abs(consts[i][j][k]) for i in range(n) for j in range(n)) for k in range(n)]
    checked = excluded = 0
    failures = []
    if inner:
        picks = rng.integers(0, len(inner), size=(sample_pairs, 2))
        for a, b in picks.tolist():
            x, y = points[inner[a]], points[inner[b]]
            gamma = []
            for k in range(n):
                g = (0, 0)
                for i in range(n):
                    for j in range(n):
                        c = consts[i][j][k]
                        if c:
                            if c.denominator != 1:
                                raise CloudError("structure constants must be integers for exact products")
                            g = ring.add(g, ring.smul(int(c), ring.mul(x[i], y[j])))
                gamma.append(g)
            prod_mat = [QuadReal(0)] * (size * size)
            for k, g in enumerate(gamma):
                s = ring.sigma(g)
                for e, v in enumerate(flat[k]):
                    if v:
                        prod_mat[e] = prod_mat[e] + s * v
            if _frob2(prod_mat) > R2:
                excluded += 1
                continue
            checked += 1
            if any(abs(ring.sigma_conj(g)) > limits[k] for k, g in enumerate(gamma)):
                failures.append([[ring.encode(v) for v in x], [ring.encode(v) for v in y]])
    report = {
        "points": len(points),
        "inner_points": len(inner),
        "sampled_pairs": sample_pairs if inner else 0,
        "checked_pairs": checked,
        "excluded_beyond_truncation": excluded,
        "failures": failures[:20],
        "passed": not failures,
        "coefficient_window_bounds": [str(x) for x in limits],
    }
    return cloud, report


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------


def write_cloud(cloud: PointCloud, path) -> str:
    """One point per line: payload encoding, then exact direct coordinates (tab separated)."""
    lines = ["# point\tdirect coordinates (exact)"]
    for k, p in enumerate(cloud.direct):
        coords = "\t".join(str(c) for c in p)
        lines.append(f"{cloud.encode_point(k)}\t{coords}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def write_cloud_svg(cloud: PointCloud, path, size: int = 600) -> str:
    """Scatter plot of a 1D or 2D cloud as a standalone SVG document."""
    if cloud.dim not in (1, 2):
        raise CloudError("SVG plots are available for 1D and 2D direct spaces only")
    F = cloud.float_direct()
    if cloud.dim == 1:
        F = np.hstack([F, np.zeros_like(F)])
    R = float(cloud.R) or 1.0
    to_px = lambda v: (v / R + 1) * (size / 2 - 10) + 10  # noqa: E731
    dots = "\n".join(
        f'<circle cx="{to_px(x):.2f}" cy="{size - to_px(y):.2f}" r="2" />' for x, y in F.tolist()
    )
    svg = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n<g fill="black">\n{dots}\n</g>\n</svg>\n'
    )
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg
