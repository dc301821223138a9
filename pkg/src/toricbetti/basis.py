"""Explicit kernel elements of the combinatorial Koszul differentials.

Elements are stored by lattice points rather than by basis indices: a wedge
term is ``(P_1, ..., P_p), Q`` with the P's strictly increasing in the
lexicographic order of points (which is also the order of the indices into a
sorted ``PointSet``), a tensor term is ``(P_1, ..., P_p), Q`` with the P's in
slot order.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import (
    BadT,
    NoUniqueMaximum,
    NotInKernel,
    NotInX,
    NotOneDimensional,
    ParseError,
    SizeGuard,
    WrongTSize,
)
from .koszul import (
    WEDGE_CAP,
    TENSOR_CAP,
    build_delta,
    build_delta_i,
    combo_rank,
    _tensor_rank_index,
)
from .linalg import EchelonBasis, FieldSpec, SparseMatrix, kernel_basis
from .polytope import (
    PointSet,
    add,
    apply_matrix,
    hull_facets,
    lattice_points,
    minkowski_points,
    primitive,
    rational_rank,
    sub,
    translations_into,
    unimodular_to_e1,
)


def perm_sign(seq: Sequence) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _hull_vertices(points: Iterable[Sequence[int]]) -> PointSet:
    pts = PointSet(points)
    if not len(pts):
        return pts
    return hull_facets(pts).vertices


# ---------------------------------------------------------------------------
# element types


@dataclass
class WedgeTensorElement:
    """Element of wedge^p S (x) T, canonical: sorted wedges, no zero coefficients."""

    terms: dict  # (wedge points tuple, Q) -> field element
    S: PointSet
    T: PointSet
    p: int
    field: FieldSpec

    @classmethod
    def from_terms(cls, items, S, T, p, field: FieldSpec = FieldSpec()):
        """Build from ``(coeff, wedge_points, Q)``; unsorted wedges pick up the
        permutation sign, wedges with a repeated point vanish."""
        acc: dict = {}
        for coeff, wedge, Q in items:
            wedge = tuple(tuple(P) for P in wedge)
            if len(wedge) != p:
                raise ValueError(f"wedge of length {len(wedge)}, expected {p}")
            sgn = perm_sign(wedge)
            if sgn == 0:
                continue
            key = (tuple(sorted(wedge)), tuple(Q))
            acc[key] = field(acc.get(key, 0) + sgn * field(coeff))
        return cls({k: v for k, v in acc.items() if v != 0}, S, T, p, field)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, WedgeTensorElement):
            return NotImplemented
        return self.p == other.p and self.field == other.field and self.terms == other.terms

    def __neg__(self):
        f = self.field
        return WedgeTensorElement({k: f.neg(v) for k, v in self.terms.items()}, self.S, self.T, self.p, f)

    def combine(self, other: "WedgeTensorElement", a=1, b=1) -> "WedgeTensorElement":
        f = self.field
        acc = {k: f(a * v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            acc[k] = f(acc.get(k, 0) + b * v)
        return WedgeTensorElement({k: v for k, v in acc.items() if v != 0}, self.S, self.T, self.p, f)

    def wedge_points(self) -> set:
        return {P for (w, _), v in self.terms.items() for P in w}

    def to_vector(self) -> dict:
        """Coordinates in the basis of ``enumerate_wedge_basis(S, p, T)``."""
        sidx, tidx, nS, nT = self.S.index, self.T.index, len(self.S), len(self.T)
        out = {}
        for (w, Q), v in self.terms.items():
            try:
                combo = tuple(sidx[P] for P in w)
                t = tidx[Q]
            except KeyError as exc:
                raise ValueError(f"point {exc.args[0]} outside the ambient sets") from None
            out[combo_rank(combo, nS) * nT + t] = v
        return out

    @classmethod
    def from_vector(cls, vec, S, T, p, field: FieldSpec = FieldSpec()):
        nT = len(T)
        combos = list(itertools.combinations(range(len(S)), p))
        terms = {}
        for k, v in vec.items():
            if v == 0:
                continue
            c, t = divmod(k, nT)
            terms[(tuple(S[i] for i in combos[c]), T[t])] = field(v)
        return cls(terms, S, T, p, field)

    def delta(self) -> "WedgeTensorElement":
        """Image under delta in wedge^(p-1) S (x) (S + T)."""
        f = self.field
        acc: dict = {}
        for (w, Q), v in self.terms.items():
            for i in range(self.p):
                key = (w[:i] + w[i + 1:], add(Q, w[i]))
                sign = -1 if i % 2 == 0 else 1
                acc[key] = f(acc.get(key, 0) + sign * v)
        U = minkowski_points(self.S, self.T)
        return WedgeTensorElement(
            {k: v for k, v in acc.items() if v != 0}, self.S, U, self.p - 1, f
        )

    def support(self) -> PointSet:
        return support(self)

    def __str__(self):
        return format_element(self)


@dataclass
class TensorElement:
    """Element of S^(x)p (x) T."""

    terms: dict  # (slot points tuple, Q) -> field element
    S: PointSet
    T: PointSet
    p: int
    field: FieldSpec

    @classmethod
    def from_terms(cls, items, S, T, p, field: FieldSpec = FieldSpec()):
        acc: dict = {}
        for coeff, slots, Q in items:
            slots = tuple(tuple(P) for P in slots)
            if len(slots) != p:
                raise ValueError(f"tensor of length {len(slots)}, expected {p}")
            key = (slots, tuple(Q))
            acc[key] = field(acc.get(key, 0) + field(coeff))
        return cls({k: v for k, v in acc.items() if v != 0}, S, T, p, field)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.p == other.p and self.field == other.field and self.terms == other.terms

    def combine(self, other: "TensorElement", a=1, b=1) -> "TensorElement":
        f = self.field
        acc = {k: f(a * v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            acc[k] = f(acc.get(k, 0) + b * v)
        return TensorElement({k: v for k, v in acc.items() if v != 0}, self.S, self.T, self.p, f)

    def act(self, perm: Sequence[int]) -> "TensorElement":
        """Right action of S_p: slots permuted by ``perm`` (0-based), times its sign."""
        f = self.field
        s = perm_sign(perm)
        terms = {
            (tuple(slots[j] for j in perm), Q): f(s * v) for (slots, Q), v in self.terms.items()
        }
        return TensorElement(terms, self.S, self.T, self.p, f)

    def to_vector(self) -> dict:
        sidx, tidx, nS, nT = self.S.index, self.T.index, len(self.S), len(self.T)
        out = {}
        for (slots, Q), v in self.terms.items():
            out[_tensor_rank_index([sidx[P] for P in slots], nS) * nT + tidx[Q]] = v
        return out

    @classmethod
    def from_vector(cls, vec, S, T, p, field: FieldSpec = FieldSpec()):
        nS, nT = len(S), len(T)
        terms = {}
        for k, v in vec.items():
            if v == 0:
                continue
            rest, t = divmod(k, nT)
            slots = []
            for _ in range(p):
                rest, s = divmod(rest, nS)
                slots.append(S[s])
            terms[(tuple(reversed(slots)), T[t])] = field(v)
        return cls(terms, S, T, p, field)

    def delta_i(self, i: int) -> "TensorElement":
        f = self.field
        acc: dict = {}
        for (slots, Q), v in self.terms.items():
            key = (slots[: i - 1] + slots[i:], add(Q, slots[i - 1]))
            acc[key] = f(acc.get(key, 0) + v)
        U = minkowski_points(self.S, self.T)
        return TensorElement({k: v for k, v in acc.items() if v != 0}, self.S, U, self.p - 1, f)

    def in_intersection(self) -> bool:
        return all(not self.delta_i(i) for i in range(1, self.p + 1))

    def support_i(self, i: int) -> PointSet:
        return support_i(self, i)

    def __str__(self):
        return format_element(self)


class Monomial:
    """Product of points of X with positive exponents; degree = sum of exponents."""

    __slots__ = ("exponents",)

    def __init__(self, exponents):
        if not isinstance(exponents, dict):
            exponents = Counter(tuple(P) for P in exponents)
        ex = {tuple(P): int(a) for P, a in exponents.items() if a}
        if any(a < 0 for a in ex.values()):
            raise ValueError("negative exponent")
        self.exponents = dict(sorted(ex.items()))

    @property
    def degree(self) -> int:
        return sum(self.exponents.values())

    def points(self) -> list:
        """Points with multiplicity, in lexicographic order."""
        return [P for P, a in self.exponents.items() for _ in range(a)]

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __hash__(self):
        return hash(tuple(self.exponents.items()))

    def __repr__(self):
        if not self.exponents:
            return "Monomial(1)"
        return "Monomial(" + "*".join(
            f"{P}^{a}" if a > 1 else f"{P}" for P, a in self.exponents.items()
        ) + ")"


def monomials(X: PointSet, p: int) -> list:
    """All degree-p monomials over X, graded colex order."""
    combos = itertools.combinations_with_replacement(range(len(X)), p)
    ordered = sorted(combos, key=lambda c: tuple(reversed(c)))
    return [Monomial([X[i] for i in c]) for c in ordered]


@dataclass(frozen=True)
class LatticeOrder:
    """Compare points by the linear form ``weights``; lexicographic tie-break
    makes it a total (lattice) order, without it a pre-order."""

    weights: tuple
    tiebreak: bool = True

    def key(self, P: Sequence[int]):
        v = sum(w * c for w, c in zip(self.weights, P))
        return (v, tuple(P)) if self.tiebreak else (v,)

    def less(self, P, Q) -> bool:
        return self.key(P) < self.key(Q)

    def maxima(self, points: Iterable[Sequence[int]]) -> list:
        pts = sorted(set(tuple(P) for P in points))
        if not pts:
            return []
        top = max(self.key(P) for P in pts)
        return [P for P in pts if self.key(P) == top]


# ---------------------------------------------------------------------------
# constructions


def _check_x(points: Iterable, X: PointSet):
    for P in points:
        if P not in X:
            raise NotInX(f"{P} is not a translation of T into S")


def _class_representatives(plist: Sequence, m: int):
    """Permutations sigma of range(m) (m = len(plist) + 1), one per class of
    sigma ~ sigma' iff they send each group {i : P_i = P} to the same set.

    The representative is increasing on each group. Yields (sign, sigma).
    """
    groups: dict = {}
    for i, P in enumerate(plist):
        groups.setdefault(P, []).append(i)
    group_list = list(groups.values())

    def assign(k, remaining, sigma):
        if k == len(group_list):
            (last,) = remaining
            sigma[m - 1] = last
            yield tuple(sigma)
            return
        positions = group_list[k]
        for chosen in itertools.combinations(sorted(remaining), len(positions)):
            for pos, val in zip(positions, chosen):
                sigma[pos] = val
            yield from assign(k + 1, remaining - set(chosen), sigma)

    for sigma in assign(0, set(range(m)), [None] * m):
        yield perm_sign(sigma), sigma


def make_xA(
    A: Monomial, S: PointSet, T: PointSet, field: FieldSpec = FieldSpec(),
    p_order: Optional[Sequence] = None, q_order: Optional[Sequence] = None,
) -> WedgeTensorElement:
    """The kernel element attached to a monomial over X, characteristic free.

    Sums sgn(sigma) (P_1 + Q_sigma(1)) ^ ... ^ (P_p + Q_sigma(p)) (x) Q_sigma(p+1)
    over one permutation per class of permutations giving equal terms. By
    default the P's are in lexicographic order and Q_1 < ... < Q_{p+1} are the
    points of T; other listings (``p_order``, ``q_order``) change the result
    by a global sign only.
    """
    p = A.degree
    if len(T) != p + 1:
        raise WrongTSize(f"#T = {len(T)} but the monomial has degree {p}")
    X = translations_into(T, S)
    plist = A.points()
    if p_order is not None:
        p_order = [tuple(P) for P in p_order]
        if sorted(p_order) != sorted(plist):
            raise ValueError("p_order is not a listing of the monomial's variables")
        plist = p_order
    _check_x(plist, X)
    Q = T.points
    if q_order is not None:
        q_order = [tuple(P) for P in q_order]
        if sorted(q_order) != list(Q):
            raise ValueError("q_order is not a listing of T")
        Q = q_order
    items = []
    for sgn, sigma in _class_representatives(plist, p + 1):
        wedge = [add(plist[i], Q[sigma[i]]) for i in range(p)]
        items.append((sgn, wedge, Q[sigma[p]]))
    return WedgeTensorElement.from_terms(items, S, T, p, field)


def make_xP(seq: Sequence, S: PointSet, T: PointSet, field: FieldSpec = FieldSpec()) -> TensorElement:
    """Signed sum over all of S_{p+1} of (P_1+Q_s(1)) (x) ... (x) (P_p+Q_s(p)) (x) Q_s(p+1)."""
    seq = [tuple(P) for P in seq]
    p = len(seq)
    if len(T) != p + 1:
        raise WrongTSize(f"#T = {len(T)} but the sequence has length {p}")
    _check_x(seq, translations_into(T, S))
    Q = T.points
    items = []
    for sigma in itertools.permutations(range(p + 1)):
        slots = [add(seq[i], Q[sigma[i]]) for i in range(p)]
        items.append((perm_sign(sigma), slots, Q[sigma[p]]))
    return TensorElement.from_terms(items, S, T, p, field)


def iota(x: WedgeTensorElement) -> TensorElement:
    """Full antisymmetrization wedge^p S (x) T -> S^(x)p (x) T."""
    f = x.field
    acc: dict = {}
    for (w, Q), v in x.terms.items():
        for tau in itertools.permutations(range(x.p)):
            key = (tuple(w[j] for j in tau), Q)
            acc[key] = f(acc.get(key, 0) + perm_sign(tau) * v)
    return TensorElement({k: v for k, v in acc.items() if v != 0}, x.S, x.T, x.p, f)


def symmetrization_matrix(
    S: PointSet, T: PointSet, p: int, field: FieldSpec = FieldSpec(), cap: int = TENSOR_CAP
) -> SparseMatrix:
    """Matrix of iota from the wedge basis to the tensor basis (also serves as g)."""
    nS, nT = len(S), len(T)
    if nS**p * nT > cap:
        raise SizeGuard(f"tensor space {nS ** p * nT} above cap {cap}")
    perms = [(tau, perm_sign(tau)) for tau in itertools.permutations(range(p))]
    cols = []
    for combo in itertools.combinations(range(nS), p):
        for t in range(nT):
            col = {}
            for tau, s in perms:
                k = _tensor_rank_index([combo[j] for j in tau], nS) * nT + t
                col[k] = field(s)
            cols.append(col)
    return SparseMatrix(nS**p * nT, len(cols), field, cols)


def coset_sum(A: Monomial, S: PointSet, T: PointSet, field: FieldSpec = FieldSpec()) -> TensorElement:
    """Sum of x_seq over the distinct rearrangements seq of A's point list."""
    plist = A.points()
    total = None
    for seq in sorted(set(itertools.permutations(plist))):
        xp = make_xP(seq, S, T, field)
        total = xp if total is None else total.combine(xp)
    return total


# ---------------------------------------------------------------------------
# supports and leading terms


def support(x: WedgeTensorElement) -> PointSet:
    """Vertices of the convex hull of all points in the wedge parts."""
    return _hull_vertices(x.wedge_points())


def support_i(x: TensorElement, i: int) -> PointSet:
    """Vertices of the convex hull of all points in slot i (1-based)."""
    return _hull_vertices({slots[i - 1] for slots, _ in x.terms})


def support_lattice_points(vertices: PointSet) -> PointSet:
    if not len(vertices):
        return PointSet()
    return lattice_points(hull_facets(vertices))


class LeadingExtract(NamedTuple):
    y: object  # WedgeTensorElement or TensorElement
    maximum: tuple
    S_prime: PointSet
    T_prime: PointSet


def _non_maximal(T: PointSet, order: LatticeOrder) -> PointSet:
    top = max(order.key(Q) for Q in T)
    return PointSet(Q for Q in T if order.key(Q) < top)


def leading_extract(x: WedgeTensorElement, order: LatticeOrder) -> LeadingExtract:
    """Strip the unique maximum P_M of supp(x) from every term containing it,
    so that x = P_M ^ y + (terms without P_M); y lies in the kernel of the
    differential on wedge^(p-1) S' (x) T'."""
    if not x:
        raise NotInKernel("x is zero")
    if x.p < 1:
        raise ValueError("need p >= 1")
    if x.delta():
        raise NotInKernel("delta(x) != 0")
    tops = order.maxima(x.wedge_points())
    if len(tops) != 1:
        raise NoUniqueMaximum(f"supp(x) has {len(tops)} maximal points: {tops}")
    PM = tops[0]
    hull_pts = support_lattice_points(support(x))
    S1 = PointSet(P for P in hull_pts if P != PM)
    T1 = _non_maximal(x.T, order)
    f = x.field
    terms = {}
    for (w, Q), v in x.terms.items():
        if PM in w:
            k = w.index(PM)
            terms[(w[:k] + w[k + 1:], Q)] = v if k % 2 == 0 else f.neg(v)
    y = WedgeTensorElement(terms, S1, T1, x.p - 1, f)
    if any(Q not in T1 for _, Q in terms) or y.delta():
        raise AssertionError("leading term extraction produced a non-kernel element")
    return LeadingExtract(y, PM, S1, T1)


def leading_extract_tensor(x: TensorElement, order: LatticeOrder, i: int) -> LeadingExtract:
    """Slot-i analogue of ``leading_extract`` on the intersection of kernels."""
    if not x:
        raise NotInKernel("x is zero")
    if not x.in_intersection():
        raise NotInKernel("x is not in every ker delta_i")
    tops = order.maxima(slots[i - 1] for slots, _ in x.terms)
    if len(tops) != 1:
        raise NoUniqueMaximum(f"supp_{i}(x) has {len(tops)} maximal points: {tops}")
    PM = tops[0]
    T1 = _non_maximal(x.T, order)
    terms = {}
    for (slots, Q), v in x.terms.items():
        if slots[i - 1] == PM:
            terms[(slots[: i - 1] + slots[i:], Q)] = v
    y = TensorElement(terms, x.S, T1, x.p - 1, x.field)
    if any(Q not in T1 for _, Q in terms) or not y.in_intersection():
        raise AssertionError("leading term extraction produced a non-kernel element")
    return LeadingExtract(y, PM, x.S, T1)


# ---------------------------------------------------------------------------
# one-dimensional T


class UnimodularMap(NamedTuple):
    matrix: list  # rows of an integer matrix with determinant +-1
    translation: tuple
    image: PointSet
    d: int

    def __call__(self, P):
        return add(apply_matrix(self.matrix, P), self.translation)


def _inverse_unimodular(U):
    from .polytope import _rref

    n = len(U)
    rows = [[Fraction(x) for x in U[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    red, _ = _rref(rows, 2 * n)
    return [[int(x) for x in r[n:]] for r in red]


def unimodular_normalize(T: PointSet) -> UnimodularMap:
    """Affine unimodular map sending T onto {0, e_1, 2 e_1, ..., d e_1}."""
    n = T.ambient_dim
    if T.dim > 1:
        raise NotOneDimensional(f"conv(T) has dimension {T.dim}")
    if T.dim <= 0:
        U = [[int(i == j) for j in range(n)] for i in range(n)]
        t = tuple(-c for c in T[0])
        return UnimodularMap(U, t, PointSet([add(T[0], t)]), 0)
    v = primitive(sub(T[-1], T[0]))
    U = unimodular_to_e1(v)
    t = tuple(-c for c in apply_matrix(U, T[0]))
    image = PointSet(add(apply_matrix(U, P), t) for P in T)
    d = max(P[0] for P in image)
    expected = PointSet(tuple(k * int(j == 0) for j in range(n)) for k in range(d + 1))
    if image != expected:
        raise NotOneDimensional("T is not the full set of lattice points of a segment")
    return UnimodularMap(U, t, image, d)


def hypercube_basis(
    S: PointSet, d: int, p: int, field: FieldSpec = FieldSpec(), T: Optional[PointSet] = None
) -> list:
    """Kernel basis of delta for T = {0, e_1, ..., d e_1}.

    One element per P_1 < ... < P_p in X = {P : P, P + e_1 in S} and per Q in T
    with first coordinate in {p, ..., d}:
    sum over i in {0,1}^p of (-1)^|i| (P_1 + i_1 e_1) ^ ... ^ (P_p + i_p e_1) (x) (Q - |i| e_1).
    """
    if len(S) == 0:
        return []
    n = S.ambient_dim
    e1 = tuple(int(j == 0) for j in range(n))
    segment = PointSet(tuple(k * c for c in e1) for k in range(d + 1))
    if T is not None and T != segment:
        raise BadT("T must be {0, e_1, ..., d e_1}; normalize it first")
    if not 0 <= p <= d + 1:
        raise ValueError(f"need 0 <= p <= d + 1, got p={p}, d={d}")
    X = translations_into(PointSet([tuple(0 for _ in e1), e1]), S)
    out = []
    for Ps in itertools.combinations(X.points, p):
        for k in range(p, d + 1):
            Q = tuple(k * c for c in e1)
            items = []
            for bits in itertools.product((0, 1), repeat=p):
                s = sum(bits)
                wedge = [add(P, tuple(b * c for c in e1)) for P, b in zip(Ps, bits)]
                items.append(((-1) ** s, wedge, sub(Q, tuple(s * c for c in e1))))
            out.append(WedgeTensorElement.from_terms(items, S, segment, p, field))
    return out


def segment_kernel_basis(S: PointSet, T: PointSet, p: int, field: FieldSpec = FieldSpec()) -> list:
    """Hypercube basis for any T whose hull is a lattice segment (or a point),
    transported back through the normalizing unimodular map."""
    m = unimodular_normalize(T)
    inv = _inverse_unimodular(m.matrix)

    def back(P):
        return apply_matrix(inv, sub(P, m.translation))

    S_img = PointSet(m(P) for P in S)
    out = []
    for x in hypercube_basis(S_img, m.d, p, field):
        items = [(v, [back(P) for P in w], back(Q)) for (w, Q), v in x.terms.items()]
        out.append(WedgeTensorElement.from_terms(items, S, T, p, field))
    return out


# ---------------------------------------------------------------------------
# basis theorem verification


@dataclass
class BasisTheoremReport:
    p: int
    x_count: int
    expected: int
    monomials: int
    kernel_dim: int
    in_kernel: bool
    independent: bool
    spans: bool
    counterexample: Optional[str] = None

    @property
    def passed(self) -> bool:
        return (
            self.in_kernel
            and self.independent
            and self.spans
            and self.monomials == self.expected == self.kernel_dim
        )


def verify_basis_theorem(
    S: PointSet, T: PointSet, field: FieldSpec = FieldSpec(), cap: int = WEDGE_CAP
) -> BasisTheoremReport:
    """Check that the x_A, A of degree #T - 1 over X, form a basis of ker(delta)."""
    if T.dim < 2:
        raise ValueError("the basis theorem needs conv(T) of dimension >= 2")
    p = len(T) - 1
    X = translations_into(T, S)
    expected = math.comb(p + len(X) - 1, p) if len(X) else 0
    m = build_delta(S, T, p, field, cap)
    mons = monomials(X, p)
    ech = EchelonBasis(field)
    in_kernel = independent = True
    counterexample = None
    for A in mons:
        vec = make_xA(A, S, T, field).to_vector()
        if m.apply(vec):
            in_kernel = False
            counterexample = counterexample or f"delta(x_A) != 0 for {A}"
        if not ech.add(vec):
            independent = False
            counterexample = counterexample or f"x_A dependent at {A}"
    kb = kernel_basis(m)
    spans = True
    for v in kb:
        if not ech.contains(v):
            spans = False
            counterexample = counterexample or "kernel vector outside the span of the x_A"
            break
    return BasisTheoremReport(
        p, len(X), expected, len(mons), len(kb), in_kernel, independent, spans, counterexample
    )


# ---------------------------------------------------------------------------
# text format


def _fmt_point(P) -> str:
    return "(" + ",".join(str(c) for c in P) + ")"


def _fmt_coeff(v, field: FieldSpec) -> str:
    c = field.to_signed(v)
    return f"+{c}" if c > 0 else f"{c}"


def format_element(x) -> str:
    """One term per line: ``+c  P1 ^ P2 (x) Q`` (tensor elements use ``(x)`` between slots)."""
    lines = []
    joiner = " ^ " if isinstance(x, WedgeTensorElement) else " (x) "
    for (pts, Q), v in sorted(x.terms.items()):
        left = joiner.join(_fmt_point(P) for P in pts)
        body = f"{left} (x) {_fmt_point(Q)}" if left else f"(x) {_fmt_point(Q)}"
        lines.append(f"{_fmt_coeff(v, x.field)}  {body}")
    return "\n".join(lines)


def _parse_point(tok: str, lineno: int) -> tuple:
    tok = tok.strip()
    if not (tok.startswith("(") and tok.endswith(")")):
        raise ParseError(f"bad point {tok!r}", lineno)
    try:
        return tuple(int(c) for c in tok[1:-1].split(","))
    except ValueError:
        raise ParseError(f"bad point {tok!r}", lineno) from None


def parse_element(text: str, S, T, p, field: FieldSpec = FieldSpec(), tensor: bool = False):
    items = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        coeff, _, rest = line.partition(" ")
        try:
            c = Fraction(coeff)
        except ValueError:
            raise ParseError(f"bad coefficient {coeff!r}", lineno) from None
        parts = rest.split("(x)")
        Q = _parse_point(parts[-1], lineno)
        if tensor:
            pts = [_parse_point(s, lineno) for s in parts[:-1]]
        else:
            if len(parts) != 2:
                raise ParseError("expected exactly one '(x)'", lineno)
            left = parts[0].strip()
            pts = [_parse_point(s, lineno) for s in left.split("^")] if left else []
        items.append((c, pts, Q))
    cls = TensorElement if tensor else WedgeTensorElement
    return cls.from_terms(items, S, T, p, field)
