"""Shipped polytopes and seeded random generators used by the verify suites."""
from __future__ import annotations

import random
from typing import Iterator, NamedTuple, Optional

from .polytope import (
    PointSet,
    Polytope,
    box,
    hull_facets,
    interior_lattice_points,
    lattice_points,
    lattice_width,
    simplex,
    translations_into,
)

DEFAULT_SEED = 20131


def named_polytopes() -> dict[str, Polytope]:
    """Small polytopes with known or easily checked Betti tables."""
    return {
        "unit-simplex": simplex(2, 1),
        "veronese-2-2": simplex(2, 2),
        "veronese-2-3": simplex(2, 3),
        "square-2": box(2, 2),
        "box-3x2": box(3, 2),
        "box-3x1": box(3, 1),
        "hexagon": hull_facets([(1, 0), (2, 0), (3, 1), (3, 2), (2, 3), (1, 3), (0, 2), (0, 1)]),
        "trapezoid": hull_facets([(0, 0), (4, 0), (2, 2), (0, 2)]),
        "reflexive-6": hull_facets([(0, 1), (1, 0), (2, 1), (1, 2)]),
        "segment-3": simplex(1, 3),
        "cube": box(1, 1, 1),
    }


def _canonical(points: PointSet) -> tuple:
    lo = points.points[0]
    return tuple(tuple(c - m for c, m in zip(P, lo)) for P in points)


def random_polygon(rng: random.Random, size: int = 4, npts: Optional[int] = None) -> Polytope:
    """Hull of a few random points of [0, size]^2, redrawn until two-dimensional."""
    grid = [(x, y) for x in range(size + 1) for y in range(size + 1)]
    while True:
        k = npts or rng.randint(3, 6)
        poly = hull_facets(rng.sample(grid, k))
        if poly.dim == 2:
            return poly


class KernelFixture(NamedTuple):
    S: PointSet
    T: PointSet
    S_poly: Polytope
    T_poly: Polytope


def random_kernel_fixtures(
    count: int, seed: int = DEFAULT_SEED, size: int = 4, max_t: int = 5, max_n: int = 18
) -> list[KernelFixture]:
    """Pairs (S, T) of lattice points of polygons, T inside S, dim conv(T) = 2.

    #T stays in 3..max_t and #S below max_n so the kernel at p = #T - 1 is
    small enough for exact elimination with a basis.
    """
    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < count:
        outer = random_polygon(rng, size)
        S = lattice_points(outer)
        if len(S) > max_n:
            continue
        # T from a small window so that it has several translations into S
        ax, ay = rng.choice(S.points)
        window = [P for P in S if 0 <= P[0] - ax <= 2 and 0 <= P[1] - ay <= 2]
        if len(window) < 3:
            continue
        T_poly = hull_facets(rng.sample(window, 3))
        if T_poly.dim != 2:
            continue
        T = lattice_points(T_poly)
        if not 3 <= len(T) <= max_t:
            continue
        if len(translations_into(T, S)) < 2 and rng.random() < 0.8:
            continue
        key = (S.points, T.points)
        if key in seen:
            continue
        seen.add(key)
        out.append(KernelFixture(S, T, outer, T_poly))
    return out


def random_segment_fixtures(
    count: int, seed: int = DEFAULT_SEED, size: int = 4, max_d: int = 3, max_n: int = 16
) -> list[tuple[PointSet, PointSet, int]]:
    """Triples (S, T, d) with T the lattice points of a segment of length d."""
    rng = random.Random(seed + 1)
    directions = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2)]
    out, seen = [], set()
    while len(out) < count:
        S = lattice_points(random_polygon(rng, size))
        if len(S) > max_n:
            continue
        d = rng.randint(1, max_d)
        v = rng.choice(directions)
        start = rng.choice(S.points)
        T = PointSet(tuple(s + i * c for s, c in zip(start, v)) for i in range(d + 1))
        key = (S.points, T.points)
        if key in seen:
            continue
        seen.add(key)
        out.append((S, T, d))
    return out


def random_interior_polygons(
    count: int, seed: int = DEFAULT_SEED, size: int = 3, max_n: int = 12
) -> list[Polytope]:
    """Distinct (up to translation) polygons with non-empty interior and at
    most ``max_n`` lattice points. Lattice polygons are always normal."""
    rng = random.Random(seed + 2)
    out, seen = [], set()
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 20000:
            raise RuntimeError("could not generate enough interior polygons")
        poly = random_polygon(rng, size)
        S = lattice_points(poly)
        if len(S) > max_n or not len(interior_lattice_points(poly)):
            continue
        key = _canonical(S)
        if key in seen:
            continue
        seen.add(key)
        out.append(poly)
    return out


def width_two_polygons(max_n: int = 12) -> list[Polytope]:
    """Lattice-width-two polygons used for the closed-form row checks."""
    cands = [
        box(2, 2),
        box(3, 2),
        hull_facets([(0, 0), (3, 0), (1, 2), (0, 2)]),
        hull_facets([(0, 0), (2, 0), (3, 2), (0, 2)]),
        hull_facets([(0, 0), (4, 0), (2, 2), (0, 2)]),
        hull_facets([(1, 0), (2, 0), (3, 1), (2, 2), (1, 2), (0, 1)]),
        hull_facets([(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)]),
        hull_facets([(0, 0), (2, 1), (0, 2)]),
    ]
    return [P for P in cands if len(lattice_points(P)) <= max_n and lattice_width(P) == 2]


def iter_small_triples(count: int, seed: int = DEFAULT_SEED, max_p: int = 3) -> Iterator[tuple]:
    """Random (S, T, p) with small S and T for matrix identity checks."""
    rng = random.Random(seed + 3)
    produced = 0
    while produced < count:
        S = lattice_points(random_polygon(rng, 2))
        if len(S) > 7:
            continue
        k = rng.randint(1, min(3, len(S)))
        T = PointSet(rng.sample(S.points, k))
        p = rng.randint(1, max_p)
        produced += 1
        yield S, T, p
