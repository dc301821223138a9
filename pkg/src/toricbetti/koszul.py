"""Koszul differentials on wedge and tensor spaces of lattice points, Koszul
cohomology dimensions and graded Betti tables.

Multiplication of monomials is addition of lattice points, so every
differential here preserves the total lattice degree (sum of all points in a
basis element). Ranks are computed one degree block at a time.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional, Sequence

from .errors import NotNormalWarning, SizeGuard
from .linalg import FieldSpec, SparseMatrix, kernel_basis, rank, vstack, _component_rank
from .polytope import (
    PointSet,
    Polytope,
    dilate,
    interior_lattice_points,
    is_normal,
    lattice_points,
    minkowski_points,
    simplex,
    add,
)

WEDGE_CAP = 5_000_000
TENSOR_CAP = 2_000_000


class WedgeBasisIndex(NamedTuple):
    wedge: tuple  # strictly increasing indices into S
    tpart: int


class TensorBasisIndex(NamedTuple):
    slots: tuple  # indices into S, repeats allowed
    tpart: int


def _guard(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise SizeGuard(f"{what} has dimension {size}, above the cap {cap}")


def wedge_space_dim(nS: int, p: int, nT: int) -> int:
    if p < 0:
        return 0
    return math.comb(nS, p) * nT


def combo_rank(combo: Sequence[int], n: int) -> int:
    """Position of a strictly increasing tuple among all k-subsets of range(n), lex order."""
    k = len(combo)
    r = 0
    prev = -1
    for i, c in enumerate(combo):
        for j in range(prev + 1, c):
            r += math.comb(n - 1 - j, k - 1 - i)
        prev = c
    return r


def enumerate_wedge_basis(S: PointSet, p: int, T: PointSet, cap: int = WEDGE_CAP) -> list:
    """Basis of wedge^p S (x) T in lexicographic order of (wedge, tpart)."""
    if not 0 <= p <= len(S):
        raise ValueError(f"p={p} outside 0..{len(S)}")
    _guard(wedge_space_dim(len(S), p, len(T)), cap, "wedge space")
    return [
        WedgeBasisIndex(w, t)
        for w in itertools.combinations(range(len(S)), p)
        for t in range(len(T))
    ]


def enumerate_tensor_basis(S: PointSet, p: int, T: PointSet, cap: int = TENSOR_CAP) -> list:
    _guard(len(S) ** p * len(T), cap, "tensor space")
    return [
        TensorBasisIndex(s, t)
        for s in itertools.product(range(len(S)), repeat=p)
        for t in range(len(T))
    ]


# ---------------------------------------------------------------------------
# explicit matrices


def wedge_differential(
    V: PointSet, W: PointSet, Wout: PointSet, p: int, field: FieldSpec = FieldSpec(),
    cap: int = WEDGE_CAP,
) -> SparseMatrix:
    """Matrix of wedge^p V (x) W -> wedge^(p-1) V (x) Wout.

    v_1 ^ ... ^ v_p (x) w  maps to  sum_i (-1)^i (... no v_i ...) (x) (w + v_i),
    with i counted from 1. Bases are ordered as in ``enumerate_wedge_basis``.
    """
    nV, nW, nO = len(V), len(W), len(Wout)
    if p <= 0 or p > nV:
        ncols = wedge_space_dim(nV, p, nW) if 0 <= p <= nV else 0
        nrows = wedge_space_dim(nV, p - 1, nO) if 1 <= p <= nV + 1 else 0
        return SparseMatrix.zeros(nrows, ncols, field)
    _guard(wedge_space_dim(nV, p, nW), cap, "wedge space")
    row_rank = {c: k for k, c in enumerate(itertools.combinations(range(nV), p - 1))}
    out_idx = Wout.index
    one, minus = field(1), field(-1)
    cols = []
    for combo in itertools.combinations(range(nV), p):
        faces = [row_rank[combo[:i] + combo[i + 1:]] for i in range(p)]
        for w in W:
            col = {}
            for i in range(p):
                u = add(w, V[combo[i]])
                k = out_idx.get(u)
                if k is None:
                    raise ValueError(f"{u} is not in the target point set")
                col[faces[i] * nO + k] = minus if i % 2 == 0 else one
            cols.append(col)
    return SparseMatrix(math.comb(nV, p - 1) * nO, len(cols), field, cols)


def build_delta(
    S: PointSet, T: PointSet, p: int, field: FieldSpec = FieldSpec(), cap: int = WEDGE_CAP
) -> SparseMatrix:
    """Matrix of delta: wedge^p S (x) T -> wedge^(p-1) S (x) (S + T)."""
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        return SparseMatrix.zeros(0, len(T), field)
    return wedge_differential(S, T, minkowski_points(S, T), p, field, cap)


def delta_codomain(S: PointSet, T: PointSet, p: int) -> list:
    """Row labels of ``build_delta``: pairs (wedge index tuple, point of S + T)."""
    U = minkowski_points(S, T)
    return [
        (c, u) for c in itertools.combinations(range(len(S)), p - 1) for u in U
    ]


def _tensor_rank_index(slots: Sequence[int], nS: int) -> int:
    k = 0
    for s in slots:
        k = k * nS + s
    return k


def build_delta_i(
    S: PointSet, T: PointSet, p: int, i: int, field: FieldSpec = FieldSpec(),
    cap: int = TENSOR_CAP, target: Optional[PointSet] = None,
) -> SparseMatrix:
    """Matrix of delta_i: S^(x)p (x) T -> S^(x)(p-1) (x) (S + T), no signs.

    P_1 (x) ... (x) P_p (x) Q maps to the tensor with P_i removed and Q + P_i
    as the last factor. ``i`` is 1-based.
    """
    if not 1 <= i <= p:
        raise ValueError(f"need 1 <= i <= p, got i={i}, p={p}")
    nS, nT = len(S), len(T)
    _guard(nS**p * nT, cap, "tensor space")
    U = target if target is not None else minkowski_points(S, T)
    nU = len(U)
    uidx = U.index
    one = field(1)
    cols = []
    for slots in itertools.product(range(nS), repeat=p):
        rest = _tensor_rank_index(slots[: i - 1] + slots[i:], nS)
        P = S[slots[i - 1]]
        for Q in T:
            cols.append({rest * nU + uidx[add(P, Q)]: one})
    return SparseMatrix(nS ** (p - 1) * nU, len(cols), field, cols)


class KernelData(NamedTuple):
    dim: int
    basis: list


def intersect_kernels(
    S: PointSet, T: PointSet, p: int, field: FieldSpec = FieldSpec(),
    cap: int = TENSOR_CAP, with_basis: bool = True,
) -> KernelData:
    """Kernel of delta_1, ..., delta_p stacked; for p = 0 the whole of T."""
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        one = field(1)
        return KernelData(len(T), [{t: one} for t in range(len(T))] if with_basis else [])
    m = vstack([build_delta_i(S, T, p, i, field, cap) for i in range(1, p + 1)])
    if with_basis:
        kb = kernel_basis(m)
        return KernelData(len(kb), kb)
    return KernelData(m.ncols - rank(m), [])


# ---------------------------------------------------------------------------
# graded rank computations (no global matrix)

_PACK_OFFSET = 1 << 22
_PACK_RADIX = 1 << 32


def _pack(points: Sequence[Sequence[int]]) -> list[int]:
    # each coordinate shifted to be non-negative; sums of a few dozen packed
    # points cannot carry between coordinate slots
    out = []
    for pt in points:
        k = 0
        for c in reversed(pt):
            k = k * _PACK_RADIX + (c + _PACK_OFFSET)
        out.append(k)
    return out


def graded_wedge_rank(
    V: PointSet, W: PointSet, p: int, field: FieldSpec = FieldSpec(), cap: int = WEDGE_CAP
) -> int:
    """Rank of wedge^p V (x) W -> wedge^(p-1) V (x) (V + W), block by block."""
    nV = len(V)
    if p <= 0 or p > nV or not len(W):
        return 0
    _guard(wedge_space_dim(nV, p, len(W)), cap, "wedge space")
    Vp = _pack(V)
    Wp = _pack(W)
    buckets: dict = defaultdict(list)
    for combo in itertools.combinations(range(nV), p):
        s = 0
        for i in combo:
            s += Vp[i]
        for w in Wp:
            buckets[s + w].append((combo, w))
    one, minus = field(1), field(-1)
    total = 0
    for items in buckets.values():
        if len(items) == 1:
            total += 1  # every column of the differential is nonzero for p >= 1
            continue
        rowid: dict = {}
        rows: dict = {}
        for j, (combo, w) in enumerate(items):
            for i in range(p):
                key = (combo[:i] + combo[i + 1:], w + Vp[combo[i]])
                r = rowid.get(key)
                if r is None:
                    r = rowid[key] = len(rowid)
                    rows[r] = {}
                rows[r][j] = minus if i % 2 == 0 else one
        total += _rank_of_rows(rows, len(items), field)
    return total


def _rank_of_rows(rows: dict, ncols: int, field: FieldSpec) -> int:
    cols = [dict() for _ in range(ncols)]
    for r, row in rows.items():
        for c, v in row.items():
            cols[c][r] = v
    m = SparseMatrix(len(rows), ncols, field, cols)
    return _component_rank(m, list(range(ncols)), 10**9)


def kernel_dim_delta(
    S: PointSet, T: PointSet, p: int, field: FieldSpec = FieldSpec(), cap: int = WEDGE_CAP
) -> int:
    """dim ker(delta) on wedge^p S (x) T."""
    if p < 0:
        raise ValueError("p must be non-negative")
    if p > len(S):
        return 0
    return wedge_space_dim(len(S), p, len(T)) - graded_wedge_rank(S, T, p, field, cap)


# ---------------------------------------------------------------------------
# graded modules and Betti tables


@dataclass(frozen=True)
class GradedModuleSpec:
    """The module sum_q W_q whose degree-q piece has the points ``W_q`` as basis.

    kind ``trivial``: W_q = lattice points of q*base (W_0 = {0}).
    kind ``interior``: W_q = interior lattice points of q*base (W_0 empty).
    kind ``veronese_twist``: V = points of d*simplex, W_q = points of
    (b + q*d)*simplex, empty when b + q*d < 0.
    """

    kind: str
    base: Optional[Polytope] = None
    n: Optional[int] = None
    b: int = 0
    d: int = 1

    @classmethod
    def trivial(cls, poly: Polytope) -> "GradedModuleSpec":
        return cls("trivial", poly, poly.ambient_dim)

    @classmethod
    def interior(cls, poly: Polytope) -> "GradedModuleSpec":
        return cls("interior", poly, poly.ambient_dim)

    @classmethod
    def veronese_twist(cls, n: int, b: int, d: int) -> "GradedModuleSpec":
        if d < 1 or n < 1:
            raise ValueError("need n >= 1 and d >= 1")
        return cls("veronese_twist", None, n, b, d)

    def __post_init__(self):
        if self.kind not in ("trivial", "interior", "veronese_twist"):
            raise ValueError(f"unknown module kind {self.kind!r}")

    def generators(self) -> PointSet:
        if self.kind == "veronese_twist":
            return lattice_points(simplex(self.n, self.d))
        return lattice_points(self.base)

    def piece(self, q: int) -> PointSet:
        if q < 0:
            return PointSet()
        if self.kind == "veronese_twist":
            k = self.b + q * self.d
            if k < 0:
                return PointSet()
            if k == 0:
                return PointSet([tuple(0 for _ in range(self.n))])
            return lattice_points(simplex(self.n, k))
        zero = PointSet([tuple(0 for _ in range(self.base.ambient_dim))])
        if self.kind == "trivial":
            return zero if q == 0 else lattice_points(dilate(self.base, q))
        return PointSet() if q == 0 else interior_lattice_points(dilate(self.base, q))


class _RankCache:
    """Ranks r(p, q) of the differential leaving wedge^p V (x) W_q."""

    def __init__(self, spec: GradedModuleSpec, field: FieldSpec, cap: int):
        self.spec = spec
        self.field = field
        self.cap = cap
        self.V = spec.generators()
        self._pieces: dict = {}
        self._ranks: dict = {}

    def piece(self, q):
        if q not in self._pieces:
            self._pieces[q] = self.spec.piece(q)
        return self._pieces[q]

    def dim(self, p, q):
        return wedge_space_dim(len(self.V), p, len(self.piece(q))) if 0 <= p <= len(self.V) else 0

    def needed(self, cells):
        out = set()
        for p, q in cells:
            out.add((p, q))
            if q >= 1:
                out.add((p + 1, q - 1))
        return sorted(k for k in out if k not in self._ranks)

    def fill(self, keys, workers: int = 1):
        todo = [k for k in keys if k not in self._ranks]
        jobs = [(self.V, self.piece(q), p, self.field, self.cap) for p, q in todo]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                results = list(ex.map(_rank_job, jobs))
        else:
            results = [_rank_job(j) for j in jobs]
        self._ranks.update(zip(todo, results))

    def rank(self, p, q):
        if (p, q) not in self._ranks:
            self.fill([(p, q)])
        return self._ranks[(p, q)]

    def kappa(self, p, q):
        if p < 0 or q < 0:
            return 0
        return self.dim(p, q) - self.rank(p, q) - (self.rank(p + 1, q - 1) if q >= 1 else 0)


def _rank_job(args):
    V, W, p, field, cap = args
    return graded_wedge_rank(V, W, p, field, cap)


def koszul_cohomology_dim(
    spec: GradedModuleSpec, p: int, q: int, field: FieldSpec = FieldSpec(),
    cap: int = WEDGE_CAP,
) -> int:
    """dim K_{p,q}: homology at wedge^p V (x) W_q of the Koszul complex."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be non-negative")
    return _RankCache(spec, field, cap).kappa(p, q)


@dataclass
class BettiTable:
    entries: dict  # (p, q) -> int, only computed cells
    field: FieldSpec
    N: int
    n: int
    pmax: int = 0
    qmax: int = 0
    normal: Optional[bool] = None
    normal_bound: Optional[int] = None
    warnings: list = dc_field(default_factory=list)

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def row(self, q: int) -> list[int]:
        return [self[(p, q)] for p in range(self.pmax + 1)]

    def nonzero(self) -> dict:
        return {k: v for k, v in self.entries.items() if v}

    def to_text(self) -> str:
        width = max([len(str(v)) for v in self.entries.values()] + [len(str(self.pmax)), 1])
        head = " " * 4 + "|" + " ".join(str(p).rjust(width) for p in range(self.pmax + 1))
        lines = [head, "-" * len(head)]
        for q in range(self.qmax + 1):
            cells = [
                (str(v) if v else ".").rjust(width) for v in self.row(q)
            ]
            lines.append(f"{q:>3} |" + " ".join(cells))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["q"] + [str(p) for p in range(self.pmax + 1)])
        for q in range(self.qmax + 1):
            w.writerow([q] + self.row(q))
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "N": self.N,
            "field": self.field.name(),
            "entries": [
                {"p": p, "q": q, "value": v} for (p, q), v in sorted(self.entries.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "BettiTable":
        d = json.loads(text)
        entries = {(e["p"], e["q"]): e["value"] for e in d["entries"]}
        return cls(
            entries,
            FieldSpec.parse(d["field"]),
            d["N"],
            d["n"],
            max((p for p, _ in entries), default=0),
            max((q for _, q in entries), default=0),
        )


def betti_table(
    poly: Polytope,
    field: FieldSpec = FieldSpec(),
    pmax: Optional[int] = None,
    qmax: Optional[int] = None,
    normal_bound: Optional[int] = None,
    workers: int = 1,
    cap: int = WEDGE_CAP,
) -> BettiTable:
    """Graded Betti table of the toric embedding given by ``poly``."""
    spec = GradedModuleSpec.trivial(poly)
    cache = _RankCache(spec, field, cap)
    N = len(cache.V)
    n = poly.dim
    if pmax is None:
        pmax = N - 1
    if qmax is None:
        qmax = n
    if pmax > N - 1:
        raise ValueError(f"pmax={pmax} exceeds N-1={N - 1}")
    report = is_normal(poly, normal_bound)
    notes = []
    if not report.normal:
        msg = f"polytope is not normal: failing (a, b) = {report.failing}"
        warnings.warn(msg, NotNormalWarning, stacklevel=2)
        notes.append(msg)
    cells = [(p, q) for q in range(qmax + 1) for p in range(pmax + 1)]
    for p, q in cells:
        _guard(cache.dim(p, q), cap, f"wedge^{p} V (x) W_{q}")
    cache.fill(cache.needed(cells), workers)
    entries = {(p, q): cache.kappa(p, q) for p, q in cells}
    for (p, q), v in entries.items():
        if q > n and v:
            notes.append(f"nonzero entry {v} at (p={p}, q={q}) above row n={n}")
    return BettiTable(entries, field, N, n, pmax, qmax, report.normal, report.bound, notes)


def row_entries(
    spec: GradedModuleSpec, q: int, ps: Sequence[int], field: FieldSpec = FieldSpec(),
    cap: int = WEDGE_CAP, workers: int = 1,
) -> dict:
    """kappa_{p,q} for the listed p, sharing rank computations."""
    cache = _RankCache(spec, field, cap)
    cells = [(p, q) for p in ps]
    cache.fill(cache.needed(cells), workers)
    return {p: cache.kappa(p, q) for p in ps}


class DualityRow(NamedTuple):
    p: int
    full_index: int
    full_value: int
    kernel_value: int
    match: bool


@dataclass
class DualityReport:
    N: int
    N1: int
    n: int
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.match for r in self.rows)


def dual_row_check(
    poly: Polytope, field: FieldSpec = FieldSpec(), cap: int = WEDGE_CAP, workers: int = 1
) -> DualityReport:
    """Compare kappa_{N-1-n-p, n} with dim ker(delta) on wedge^p S (x) interior."""
    S = lattice_points(poly)
    T = interior_lattice_points(poly)
    N, n = len(S), poly.dim
    top = N - 1 - n
    full = row_entries(GradedModuleSpec.trivial(poly), n, range(top + 1), field, cap, workers)
    rows = []
    for p in range(top + 1):
        k = len(T) if p == 0 else kernel_dim_delta(S, T, p, field, cap)
        v = full[top - p]
        rows.append(DualityRow(p, top - p, v, k, v == k))
    return DualityReport(N, len(T), n, rows)
