"""Exact lattice geometry: hulls, lattice point enumeration, Minkowski sums,
normality checks and the combinatorial invariants of interior polytopes.

Points are plain tuples of Python ints. Everything here is exact; no floating
point is involved anywhere.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import (
    AmbientDimensionTooLarge,
    CoordinateOverflow,
    ParseError,
    UnsupportedDimension,
)

LatticePoint = tuple  # tuple[int, ...]

COORD_BOUND = 2**20
MAX_AMBIENT_DIM = 6


def _check_coords(points: Iterable[Sequence[int]], bound: int = COORD_BOUND) -> None:
    for p in points:
        for c in p:
            if abs(c) > bound:
                raise CoordinateOverflow(f"coordinate {c} exceeds guard {bound}")


def add(p: Sequence[int], q: Sequence[int]) -> tuple:
    return tuple(a + b for a, b in zip(p, q))


def sub(p: Sequence[int], q: Sequence[int]) -> tuple:
    return tuple(a - b for a, b in zip(p, q))


def dot(p: Sequence[int], q: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(p, q))


def primitive(v: Sequence[int]) -> tuple:
    g = 0
    for c in v:
        g = math.gcd(g, c)
    if g == 0:
        return tuple(v)
    return tuple(c // g for c in v)


# ---------------------------------------------------------------------------
# small dense exact helpers


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rational_rank(rows: Sequence[Sequence[int]], ncols: int) -> int:
    if not rows:
        return 0
    return len(_rref([[Fraction(x) for x in r] for r in rows], ncols)[1])


def integer_nullspace(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple]:
    """Primitive integer vectors spanning the rational nullspace of ``rows``."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    red, pivots = _rref([[Fraction(x) for x in r] for r in rows], ncols)
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        lcm = 1
        for x in v:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        out.append(primitive([int(x * lcm) for x in v]))
    return out


def _det(m: list[list[int]]) -> int:
    # Bareiss fraction-free elimination
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _cross(rows: list[Sequence[int]], n: int) -> tuple:
    """Generalized cross product of n-1 integer vectors in Z^n."""
    out = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        out.append((-1) ** j * _det(minor))
    return tuple(out)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


def unimodular_to_e1(v: Sequence[int]) -> list[list[int]]:
    """Integer matrix U with det +-1 and U v = e_1, for primitive nonzero v."""
    n = len(v)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    w = list(v)
    for i in range(1, n):
        a, b = w[0], w[i]
        if b == 0:
            continue
        x, y, g = xgcd(a, b)
        # rows (0, i) <- [[x, y], [-b/g, a/g]] applied to (row0, rowi)
        r0 = [x * s + y * t for s, t in zip(U[0], U[i])]
        ri = [(-b // g) * s + (a // g) * t for s, t in zip(U[0], U[i])]
        U[0], U[i] = r0, ri
        w[0], w[i] = g, 0
    if w[0] == -1:
        U[0] = [-c for c in U[0]]
        w[0] = 1
    if w[0] != 1:
        raise ValueError(f"vector {tuple(v)} is not primitive")
    return U


def apply_matrix(U: Sequence[Sequence[int]], p: Sequence[int]) -> tuple:
    return tuple(dot(row, p) for row in U)


def integer_kernel_basis(rows: Sequence[Sequence[int]], ncols: int) -> list[tuple]:
    """Basis of the lattice {x in Z^n : A x = 0} via unimodular column operations."""
    # columns of V track the unimodular transform; A V is reduced column by column
    A = [list(r) for r in rows]
    V = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    active = list(range(ncols))
    for r in A:
        # gather the row entries of active columns into the first nonzero one
        cols = [c for c in active if r[c] != 0]
        if not cols:
            continue
        piv = cols[0]
        for c in cols[1:]:
            a, b = r[piv], r[c]
            if b == 0:
                continue
            x, y, g = xgcd(a, b)
            # new piv column = x*piv + y*c ; new c column = -b/g*piv + a/g*c
            for M in (A, V):
                for row in M:
                    s, t = row[piv], row[c]
                    row[piv] = x * s + y * t
                    row[c] = (-b // g) * s + (a // g) * t
        active.remove(piv)
    return [tuple(V[i][c] for i in range(ncols)) for c in active]


# ---------------------------------------------------------------------------
# point sets


class PointSet:
    """Deduplicated, lexicographically sorted finite set of lattice points."""

    __slots__ = ("points", "_index", "_dim")

    def __init__(self, points: Iterable[Sequence[int]] = ()):
        pts = sorted({tuple(int(c) for c in p) for p in points})
        if pts:
            n = len(pts[0])
            if any(len(p) != n for p in pts):
                raise ValueError("points of mixed ambient dimension")
        self.points = tuple(pts)
        self._index = None
        self._dim = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __contains__(self, p):
        return tuple(p) in self.index

    def __eq__(self, other):
        if isinstance(other, PointSet):
            return self.points == other.points
        return NotImplemented

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        return f"PointSet({list(self.points)!r})"

    @property
    def index(self) -> dict:
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.points)}
        return self._index

    @property
    def ambient_dim(self) -> Optional[int]:
        return len(self.points[0]) if self.points else None

    @property
    def dim(self) -> int:
        if self._dim is None:
            self._dim = affine_dim(self.points)
        return self._dim

    def translate(self, v: Sequence[int]) -> "PointSet":
        return PointSet(add(p, v) for p in self.points)

    def issubset(self, other: "PointSet") -> bool:
        idx = other.index
        return all(p in idx for p in self.points)


def affine_dim(points: Sequence[Sequence[int]]) -> int:
    points = list(points)
    if not points:
        return -1
    base = points[0]
    diffs = [sub(p, base) for p in points[1:]]
    return rational_rank(diffs, len(base))


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class Polytope:
    """Convex hull of lattice points with its exact H-description.

    ``facets`` holds pairs ``(normal, offset)`` meaning ``<normal, x> >= offset``
    with inner normals of gcd 1. For lower-dimensional polytopes the facet
    normals lie in the direction space of the affine hull, and ``equations``
    pins the hull down with pairs ``(a, b)`` meaning ``<a, x> == b``.
    """

    vertices: PointSet
    facets: tuple
    equations: tuple = ()
    affine_hull: tuple = ()
    dim: int = 0

    @property
    def ambient_dim(self) -> int:
        return self.vertices.ambient_dim

    def contains(self, p: Sequence[int], strict: bool = False) -> bool:
        for a, b in self.equations:
            if dot(a, p) != b:
                return False
        if strict:
            return all(dot(w, p) > c for w, c in self.facets)
        return all(dot(w, p) >= c for w, c in self.facets)

    def bounding_box(self) -> list[tuple[int, int]]:
        n = self.ambient_dim
        return [
            (min(v[i] for v in self.vertices), max(v[i] for v in self.vertices))
            for i in range(n)
        ]


def hull_facets(vertices: Iterable[Sequence[int]]) -> Polytope:
    """Minimal inner-normal facet description of conv(vertices)."""
    pts = vertices if isinstance(vertices, PointSet) else PointSet(vertices)
    if not len(pts):
        raise ValueError("hull of an empty point set")
    n = pts.ambient_dim
    if n > MAX_AMBIENT_DIM:
        raise AmbientDimensionTooLarge(f"ambient dimension {n} > {MAX_AMBIENT_DIM}")
    _check_coords(pts)

    base = pts[0]
    diffs = [sub(p, base) for p in pts[1:]]
    eq_normals = integer_nullspace(diffs, n) if diffs else integer_nullspace([], n)
    k = n - len(eq_normals)
    equations = tuple(sorted((a, dot(a, base)) for a in eq_normals))
    lattice_basis = tuple(integer_kernel_basis([a for a, _ in equations], n))

    if k == 0:
        return Polytope(pts, (), equations, lattice_basis, 0)

    facets = set()
    for combo in itertools.combinations(pts.points, k):
        q0 = combo[0]
        rows = [sub(q, q0) for q in combo[1:]] + [a for a, _ in equations]
        w = _cross(rows, n)
        if not any(w):
            continue
        w = primitive(w)
        c = dot(w, q0)
        vals = [dot(w, p) for p in pts]
        if all(v >= c for v in vals):
            facets.add((w, c))
        elif all(v <= c for v in vals):
            facets.add((tuple(-x for x in w), -c))
    facets = tuple(sorted(facets))

    verts = []
    for p in pts:
        tight = [w for w, c in facets if dot(w, p) == c]
        if len(tight) >= k and rational_rank(tight, n) == k:
            verts.append(p)
    return Polytope(PointSet(verts), facets, equations, lattice_basis, k)


def polytope_from_points(points: Iterable[Sequence[int]]) -> Polytope:
    return hull_facets(points)


def lattice_points(poly: Polytope) -> PointSet:
    """All lattice points of ``poly`` via bounding box plus membership test."""
    box = poly.bounding_box()
    _check_coords([[lo, hi] for lo, hi in box])
    out = [
        p
        for p in itertools.product(*(range(lo, hi + 1) for lo, hi in box))
        if poly.contains(p)
    ]
    return PointSet(out)


def interior_lattice_points(poly: Polytope) -> PointSet:
    """Lattice points in the relative interior of ``poly``."""
    if poly.dim <= 0:
        return PointSet()
    box = poly.bounding_box()
    out = [
        p
        for p in itertools.product(*(range(lo, hi + 1) for lo, hi in box))
        if poly.contains(p, strict=True)
    ]
    return PointSet(out)


def minkowski_points(A: PointSet, B: PointSet) -> PointSet:
    if len(A) and len(B) and A.ambient_dim != B.ambient_dim:
        raise ValueError("ambient dimensions differ")
    out = PointSet(add(a, b) for a in A for b in B)
    _check_coords(out)
    return out


def dilate(poly: Polytope, q: int) -> Polytope:
    if q < 1:
        raise ValueError("dilation factor must be >= 1")
    verts = PointSet(tuple(q * c for c in v) for v in poly.vertices)
    _check_coords(verts)
    return Polytope(
        verts,
        tuple((w, q * c) for w, c in poly.facets),
        tuple((a, q * b) for a, b in poly.equations),
        poly.affine_hull,
        poly.dim,
    )


class NormalityReport(NamedTuple):
    normal: bool
    failing: Optional[tuple[int, int]]
    bound: int


def is_normal(poly: Polytope, bound: Optional[int] = None) -> NormalityReport:
    """Check aP + bP = (a+b)P on lattice points for all a, b >= 1, a+b <= bound.

    The default bound is ``n + 1``. Normality is only certified up to the bound
    that is reported back.
    """
    if bound is None:
        bound = poly.ambient_dim + 1
    cache = {}

    def pts(q):
        if q not in cache:
            cache[q] = lattice_points(dilate(poly, q))
        return cache[q]

    for total in range(2, bound + 1):
        target = pts(total)
        for a in range(1, total // 2 + 1):
            b = total - a
            if minkowski_points(pts(a), pts(b)) != target:
                return NormalityReport(False, (a, b), bound)
    return NormalityReport(True, None, bound)


def translations_into(T: PointSet, S: PointSet) -> PointSet:
    """X = {P : P + T is contained in S}."""
    if not len(T):
        raise ValueError("T must be non-empty")
    t0 = T[0]
    sidx = S.index
    out = []
    for s in S:
        P = sub(s, t0)
        if all(add(P, t) in sidx for t in T):
            out.append(P)
    return PointSet(out)


class InteriorProfile(NamedTuple):
    T: PointSet
    interior_dim: int
    ell: Optional[int]
    direction: Optional[tuple]


def primitive_direction(T: PointSet) -> tuple:
    """Primitive direction of a one-dimensional point set, pointing lex-upwards."""
    return primitive(sub(T[-1], T[0]))


def count_lines(S: PointSet, direction: Sequence[int]) -> int:
    """Number of lattice lines parallel to ``direction`` that meet S."""
    U = unimodular_to_e1(direction)
    return len({apply_matrix(U, s)[1:] for s in S})


def interior_profile(poly: Polytope) -> InteriorProfile:
    S = lattice_points(poly)
    T = interior_lattice_points(poly)
    idim = T.dim
    if idim != 1:
        return InteriorProfile(T, idim, None, None)
    v = primitive_direction(T)
    ell = count_lines(S, v)
    X = translations_into(PointSet([tuple(0 for _ in v), v]), S)
    if ell != len(S) - len(X):
        raise AssertionError(f"line count {ell} != N - #X = {len(S) - len(X)}")
    return InteriorProfile(T, idim, ell, v)


def lattice_width(poly: Polytope, direction_bound: Optional[int] = None) -> int:
    """Minimal width over primitive directions w with max|w_i| <= direction_bound.

    The default bound is the largest coordinate spread of the polygon. The
    result is always an upper bound on the true lattice width, and it is exact
    whenever a minimizing direction lies inside the searched box, which holds
    for every width <= 2 polygon (the width-2 case is the one that matters
    for the explicit Betti tables).
    """
    if poly.ambient_dim != 2:
        raise UnsupportedDimension("lattice width is implemented for polygons only")
    verts = poly.vertices.points
    if direction_bound is None:
        direction_bound = max(1, max(hi - lo for lo, hi in poly.bounding_box()))
    best = None
    for a in range(0, direction_bound + 1):
        for b in range(-direction_bound, direction_bound + 1):
            if (a == 0 and b <= 0) or math.gcd(a, b) != 1:
                continue
            vals = [a * x + b * y for x, y in verts]
            w = max(vals) - min(vals)
            if best is None or w < best:
                best = w
    return best


# ---------------------------------------------------------------------------
# text format


def parse_polytope(text: str) -> Polytope:
    """Parse the ``dim n`` / ``v c1 ... cn`` polytope format."""
    n = None
    verts = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "dim":
            if n is not None:
                raise ParseError("duplicate dim line", lineno)
            if len(tokens) != 2:
                raise ParseError("expected 'dim <n>'", lineno)
            try:
                n = int(tokens[1])
            except ValueError:
                raise ParseError(f"bad dimension {tokens[1]!r}", lineno) from None
            if n < 1:
                raise ParseError("dimension must be positive", lineno)
        elif tokens[0] == "v":
            if n is None:
                raise ParseError("vertex before dim line", lineno)
            if len(tokens) != n + 1:
                raise ParseError(f"expected {n} coordinates", lineno)
            try:
                verts.append(tuple(int(t) for t in tokens[1:]))
            except ValueError:
                raise ParseError("non-integer coordinate", lineno) from None
        else:
            raise ParseError(f"unknown directive {tokens[0]!r}", lineno)
    if n is None:
        raise ParseError("missing dim line")
    if not verts:
        raise ParseError("no vertices")
    return hull_facets(verts)


def load_polytope(path) -> Polytope:
    return parse_polytope(Path(path).read_text())


def format_polytope(poly: Polytope) -> str:
    lines = [f"dim {poly.ambient_dim}"]
    lines += ["v " + " ".join(str(c) for c in v) for v in poly.vertices]
    return "\n".join(lines) + "\n"


def simplex(n: int, d: int = 1) -> Polytope:
    """The dilated standard simplex {x >= 0, x_1 + ... + x_n <= d}."""
    verts = [tuple(0 for _ in range(n))]
    verts += [tuple(d * int(i == j) for j in range(n)) for i in range(n)]
    return hull_facets(verts)


def box(*sides: int) -> Polytope:
    return hull_facets(itertools.product(*((0, s) for s in sides)))
