"""Closed-form Betti numbers and kernel dimensions.

Everything is exact Python integer arithmetic. These functions double as fast
paths and as oracles for the elimination pipeline in ``koszul``.
"""
from __future__ import annotations

import math
from typing import NamedTuple, Optional

from .errors import (
    InvalidProfile,
    NegativeUpperIndex,
    RangeViolation,
    RegimeViolation,
)
from .polytope import Polytope, interior_profile, lattice_points, translations_into


class NotCovered:
    """Marker for an entry the closed forms do not determine."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_COVERED"

    def __str__(self):
        return "not covered"

    def __bool__(self):
        return False


NOT_COVERED = NotCovered()


def binomial(a: int, b: int) -> int:
    """C(a, b) for a >= 0; zero when b < 0 or b > a."""
    if a < 0:
        raise NegativeUpperIndex(f"binomial({a}, {b}) has a negative upper index")
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


class RowNProfile(NamedTuple):
    """Counts that determine the start of the last row of a Betti table.

    ``t`` is the number of translations of the interior points into the
    lattice points (used when the interior is not a segment), ``ell`` the
    number of lines parallel to the interior segment that meet the lattice
    points (used when it is).
    """

    N: int
    N1: int
    n: int
    interior_dim: int
    t: Optional[int] = None
    ell: Optional[int] = None

    def validate(self) -> None:
        if self.n < 1:
            raise InvalidProfile("n must be positive")
        if not self.N >= self.N1 >= 0:
            raise InvalidProfile(f"need N >= N1 >= 0, got N={self.N}, N1={self.N1}")
        if self.N1 == 0 and self.interior_dim >= 0:
            raise InvalidProfile("an empty interior has dimension -1")
        if self.N1 > 0 and not 0 <= self.interior_dim <= self.n:
            raise InvalidProfile(f"interior dimension {self.interior_dim} out of range")
        if self.interior_dim == 1:
            if self.ell is None or not 1 <= self.ell <= self.N:
                raise InvalidProfile("a segment interior needs 1 <= ell <= N")
        elif self.N1 >= 1 and (self.t is None or self.t < 1):
            raise InvalidProfile("t >= 1 is required when the interior is non-empty")

    @property
    def first_index(self) -> int:
        return self.N - self.N1 - self.n


def profile_from_polytope(poly: Polytope) -> RowNProfile:
    S = lattice_points(poly)
    prof = interior_profile(poly)
    T = prof.T
    t = None
    if prof.interior_dim != 1 and len(T):
        t = len(translations_into(T, S))
    return RowNProfile(len(S), len(T), poly.dim, prof.interior_dim, t, prof.ell)


def row_n_entry(profile: RowNProfile, p: int):
    """kappa_{p,n} for a normal n-dimensional polytope, or ``NOT_COVERED``.

    Zero below N - N1 - n. At that index the value is C(t + N1 - 2, N1 - 1)
    unless the interior is a segment; in the segment case every later entry
    is (p' + 1) C(N - ell, N1 - p' - 1) with p' the offset from the first index.
    Past the first index in the non-segment case nothing is claimed.
    """
    profile.validate()
    p0 = profile.first_index
    if p < p0 or profile.N1 == 0:
        return 0
    if profile.interior_dim == 1:
        k = p - p0
        return (k + 1) * binomial(profile.N - profile.ell, profile.N1 - k - 1)
    if p == p0:
        return binomial(profile.t + profile.N1 - 2, profile.N1 - 1)
    return NOT_COVERED


def veronese_first_entry(n: int, b: int, d: int) -> tuple[int, int]:
    """(p*, kappa_{p*,n}) for O(b) on the d-th Veronese embedding of P^n.

    p* = C(d+n, n) - C(d-b-1, n) - n is the first nonzero position in row n.
    Valid for d >= b + n + 1.
    """
    if n < 1 or d < 1:
        raise RegimeViolation("n and d must be positive")
    if d < b + n + 1:
        raise RegimeViolation(f"need d >= b + n + 1, got n={n}, b={b}, d={d}")
    if b + 2 * n + 1 < 0:
        raise RegimeViolation("b is too negative for the formula")
    m = binomial(d - b - 1, n)
    pstar = binomial(d + n, n) - m - n
    value = binomial(binomial(b + 2 * n + 1, n) + m - 2, m - 1)
    return pstar, value


def width2_entries(N: int, N1: int, p: int) -> tuple[int, int]:
    """(kappa_{p,2}, kappa_{p,1}) for a polygon of lattice width two.

    Only twice the area, N + N1 - 2, enters, so N + N1 may be odd.
    """
    if p < 0:
        raise ValueError("p must be non-negative")

    def row2(k):
        if k < 0:
            return 0
        return max(k - N + N1 + 3, 0) * binomial(N - 3, k)

    if p == 0:
        return row2(0), 0
    area2 = N + N1 - 2  # twice the area
    k1 = row2(p - 1) + p * binomial(N - 1, p + 1) - area2 * binomial(N - 3, p - 1)
    return row2(p), k1


def generic_kernel_dim(p: int, x_count: int) -> int:
    """Number of degree-p monomials in x_count variables."""
    if p < 0 or x_count < 0:
        raise ValueError("p and x_count must be non-negative")
    if p == 0:
        return 1
    if x_count == 0:
        return 0
    return binomial(p + x_count - 1, p)


def segment_kernel_dim(d: int, p: int, x_count: int) -> int:
    """Kernel dimension for a lattice segment T of length d: (d-p+1) C(#X, p)."""
    if not 0 <= p <= d + 1:
        raise RangeViolation(f"need 0 <= p <= d + 1, got p={p}, d={d}")
    return (d - p + 1) * binomial(x_count, p)


def tetragonal_row(g: int, b1: int, b2: int, p: int) -> int:
    """kappa_{p,2} (= kappa_{g-p-2,1}) of a canonical tetragonal curve of genus g."""
    if g < 4:
        raise ValueError("genus must be at least 4")
    if p < 0:
        raise ValueError("p must be non-negative")
    if p > g - 2:
        return 0
    val = (g - p - 2) * binomial(g - 3, p - 2)
    for b in (b1, b2):
        val += max(p - b - 1, 0) * binomial(g - 3, p)
    return val
