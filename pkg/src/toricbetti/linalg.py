"""Exact sparse linear algebra over GF(p) and over the rationals.

Matrices are stored column-major as one ``{row: value}`` dict per column.
Rank is computed with Markowitz-style pivoting after splitting the matrix into
its connected row/column components; the Koszul differentials are block
diagonal with respect to the lattice grading, so the split is where most of
the speed comes from.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import NotPrime, OutOfMemory, ParseError, SizeGuard

DEFAULT_PRIME = 32003
DEFAULT_FILL_CAP = 50_000_000
DEFAULT_KERNEL_COLS_CAP = 5_000_000
DENSE_DENSITY = 0.2
DENSE_MAX_CELLS = 16_000_000


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Either GF(p) for a prime p < 2**31, or the rationals (``p is None``)."""

    p: Optional[int] = DEFAULT_PRIME

    def __post_init__(self):
        if self.p is not None:
            if not (1 < self.p < 2**31) or not is_prime(self.p):
                raise NotPrime(f"{self.p} is not a prime below 2**31")

    @classmethod
    def rational(cls) -> "FieldSpec":
        return cls(None)

    @classmethod
    def parse(cls, text: Union[str, int, "FieldSpec"]) -> "FieldSpec":
        if isinstance(text, FieldSpec):
            return text
        if isinstance(text, int):
            return cls(text)
        t = str(text).strip().lower()
        if t in ("rational", "q", "qq", "0"):
            return cls(None)
        try:
            return cls(int(t))
        except ValueError:
            raise ValueError(f"unknown field {text!r}") from None

    @property
    def kind(self) -> str:
        return "rational" if self.p is None else "prime"

    @property
    def characteristic(self) -> int:
        return 0 if self.p is None else self.p

    def __str__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    def name(self) -> str:
        return "rational" if self.p is None else str(self.p)

    def __call__(self, x):
        """Coerce an integer (or Fraction) into the field."""
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p is None:
            return 1 / x
        return pow(x, -1, self.p)

    def neg(self, x):
        return -x if self.p is None else (-x) % self.p

    def to_signed(self, x):
        """Readable representative: symmetric residue for GF(p)."""
        if self.p is None:
            return x
        return x - self.p if x > self.p // 2 else x


class SparseMatrix:
    """Immutable sparse matrix; ``cols[j]`` maps row index to nonzero value."""

    __slots__ = ("nrows", "ncols", "field", "cols")

    def __init__(self, nrows: int, ncols: int, field: FieldSpec, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.cols = tuple(cols) if cols is not None else tuple({} for _ in range(ncols))
        if len(self.cols) != ncols:
            raise ValueError("column count mismatch")

    @classmethod
    def from_triplets(cls, nrows, ncols, field: FieldSpec, triplets: Iterable[tuple]):
        """Build from ``(row, col, value)``; duplicates are summed, zeros dropped."""
        cols = [dict() for _ in range(ncols)]
        for r, c, v in triplets:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) out of range")
            col = cols[c]
            col[r] = field(col.get(r, 0) + field(v))
        for col in cols:
            for r in [r for r, v in col.items() if v == 0]:
                del col[r]
        return cls(nrows, ncols, field, cols)

    @classmethod
    def from_columns(cls, nrows, field: FieldSpec, columns: Sequence[Mapping[int, int]]):
        """Build from per-column dicts whose values are already field elements."""
        cols = [{r: v for r, v in col.items() if v != 0} for col in columns]
        return cls(nrows, len(cols), field, cols)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence], field: FieldSpec):
        nrows = len(rows)
        ncols = len(rows[0]) if nrows else 0
        return cls.from_triplets(
            nrows, ncols, field,
            ((i, j, v) for i, row in enumerate(rows) for j, v in enumerate(row) if v),
        )

    @classmethod
    def zeros(cls, nrows, ncols, field: FieldSpec):
        return cls(nrows, ncols, field)

    @classmethod
    def identity(cls, n, field: FieldSpec):
        return cls(n, n, field, [{i: field(1)} for i in range(n)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def entries(self):
        for j, col in enumerate(self.cols):
            for i in sorted(col):
                yield i, j, col[i]

    def to_dense(self) -> list[list]:
        out = [[self.field(0)] * self.ncols for _ in range(self.nrows)]
        for i, j, v in self.entries():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseMatrix":
        cols = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                cols[i][j] = v
        return SparseMatrix(self.ncols, self.nrows, self.field, cols)

    def apply(self, vec: Mapping[int, object]) -> dict:
        """Matrix times a sparse column vector ``{index: value}``."""
        f = self.field
        out: dict = {}
        for j, a in vec.items():
            if a == 0:
                continue
            for i, v in self.cols[j].items():
                out[i] = f(out.get(i, 0) + a * v)
        return {i: v for i, v in out.items() if v != 0}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        if self.field != other.field:
            raise ValueError("field mismatch")
        return SparseMatrix(
            self.nrows, other.ncols, self.field, [self.apply(c) for c in other.cols]
        )

    def scale(self, c) -> "SparseMatrix":
        f = self.field
        c = f(c)
        return SparseMatrix.from_columns(
            self.nrows, f, [{i: f(v * c) for i, v in col.items()} for col in self.cols]
        )

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        f = self.field
        cols = []
        for a, b in zip(self.cols, other.cols):
            col = dict(a)
            for i, v in b.items():
                col[i] = f(col.get(i, 0) - v)
            cols.append(col)
        return SparseMatrix.from_columns(self.nrows, f, cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.field == other.field
            and all(a == b for a, b in zip(self.cols, other.cols))
        )

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, {self.field})"


def vstack(blocks: Sequence[SparseMatrix]) -> SparseMatrix:
    if not blocks:
        raise ValueError("nothing to stack")
    ncols = blocks[0].ncols
    field = blocks[0].field
    cols = [dict() for _ in range(ncols)]
    offset = 0
    for b in blocks:
        if b.ncols != ncols or b.field != field:
            raise ValueError("incompatible blocks")
        for j, col in enumerate(b.cols):
            for i, v in col.items():
                cols[j][offset + i] = v
        offset += b.nrows
    return SparseMatrix(offset, ncols, field, cols)


# ---------------------------------------------------------------------------
# elimination


def _components(m: SparseMatrix) -> list[list[int]]:
    """Column index groups of the connected components of the nonzero pattern."""
    parent = list(range(m.ncols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first_col_of_row: dict = {}
    for j, col in enumerate(m.cols):
        for i in col:
            k = first_col_of_row.setdefault(i, j)
            if k != j:
                a, b = find(j), find(k)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    groups: dict = {}
    for j, col in enumerate(m.cols):
        if col:
            groups.setdefault(find(j), []).append(j)
    return list(groups.values())


def _dense_rank_modp(rows: list[dict], colmap: dict, p: int) -> int:
    A = np.zeros((len(rows), len(colmap)), dtype=np.int64)
    for i, row in enumerate(rows):
        for c, v in row.items():
            A[i, colmap[c]] = v
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        below = A[r + 1:, c]
        hit = np.nonzero(below)[0]
        if hit.size:
            idx = hit + r + 1
            A[idx] = (A[idx] - np.outer(A[idx, c], A[r])) % p
        r += 1
    return r


def _dense_rank_generic(rows: list[dict], colmap: dict, field: FieldSpec) -> int:
    n = len(colmap)
    A = [[field(0)] * n for _ in rows]
    for i, row in enumerate(rows):
        for c, v in row.items():
            A[i][colmap[c]] = v
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.inv(A[r][c])
        pr = A[r]
        for i in range(r + 1, len(A)):
            if A[i][c] != 0:
                f = A[i][c] * inv
                A[i] = [field(a - f * b) for a, b in zip(A[i], pr)]
        r += 1
        if r == len(A):
            break
    return r


def _markowitz_rank(rows: dict, field: FieldSpec, fill_cap: int) -> int:
    """Sparse elimination on ``{row: {col: val}}``; consumes ``rows``."""
    p = field.p
    colrows: dict = {}
    for r, row in rows.items():
        for c in row:
            colrows.setdefault(c, set()).add(r)
    heap = [(len(rs), c) for c, rs in colrows.items()]
    heapq.heapify(heap)
    nnz = sum(len(r) for r in rows.values())
    rank = 0
    while heap:
        cnt, c = heapq.heappop(heap)
        cur = colrows.get(c)
        if not cur:
            continue
        if len(cur) != cnt:
            heapq.heappush(heap, (len(cur), c))
            continue
        # min row length among candidate rows; ties by lowest row index
        r = min(cur, key=lambda i: (len(rows[i]), i))
        prow = rows.pop(r)
        for cc in prow:
            colrows[cc].discard(r)
        inv = field.inv(prow[c])
        others = sorted(colrows.pop(c))
        for r2 in others:
            row2 = rows[r2]
            f = row2.pop(c) * inv
            for cc, v in prow.items():
                if cc == c:
                    continue
                old = row2.get(cc)
                if old is None:
                    new = (-f * v) % p if p else -f * v
                    row2[cc] = new
                    colrows[cc].add(r2)
                    nnz += 1
                else:
                    new = (old - f * v) % p if p else old - f * v
                    if new == 0:
                        del row2[cc]
                        colrows[cc].discard(r2)
                        nnz -= 1
                    else:
                        row2[cc] = new
            if not row2:
                del rows[r2]
        for cc in prow:
            if cc != c and colrows.get(cc):
                heapq.heappush(heap, (len(colrows[cc]), cc))
        nnz -= len(prow) + len(others)
        if nnz > fill_cap:
            raise OutOfMemory(f"fill-in exceeded cap of {fill_cap} nonzeros")
        rank += 1
    return rank


def _component_rank(m: SparseMatrix, cols: list[int], fill_cap: int) -> int:
    rows: dict = {}
    for j in cols:
        for i, v in m.cols[j].items():
            rows.setdefault(i, {})[j] = v
    nr, nc = len(rows), len(cols)
    if nr == 0:
        return 0
    if nr == 1 or nc == 1:
        return 1
    nnz = sum(len(m.cols[j]) for j in cols)
    if nnz > DENSE_DENSITY * nr * nc and nr * nc <= DENSE_MAX_CELLS:
        colmap = {c: k for k, c in enumerate(cols)}
        row_list = [rows[i] for i in sorted(rows)]
        if m.field.p is not None:
            return _dense_rank_modp(row_list, colmap, m.field.p)
        return _dense_rank_generic(row_list, colmap, m.field)
    return _markowitz_rank(rows, m.field, fill_cap)


def rank(m: SparseMatrix, fill_cap: int = DEFAULT_FILL_CAP) -> int:
    """Exact rank over the matrix's field."""
    return sum(_component_rank(m, comp, fill_cap) for comp in _components(m))


def _rref_kernel(m: SparseMatrix, cols: list[int]) -> list[dict]:
    """Kernel vectors of the submatrix on ``cols`` (a union of components)."""
    field = m.field
    p = field.p
    rows: dict = {}
    for j in cols:
        for i, v in m.cols[j].items():
            rows.setdefault(i, {})[j] = v
    by_col: dict = {}
    for i, row in rows.items():
        for c in row:
            by_col.setdefault(c, set()).add(i)
    pivot_of: dict = {}  # pivot column -> row id
    used: set = set()
    free = []
    for c in sorted(cols):
        holders = by_col.get(c, set())
        cand = [i for i in holders if i not in used]
        if not cand:
            free.append(c)
            continue
        r = min(cand, key=lambda i: (len(rows[i]), i))
        used.add(r)
        pivot_of[c] = r
        prow = rows[r]
        inv = field.inv(prow[c])
        for cc in prow:
            prow[cc] = (prow[cc] * inv) % p if p else prow[cc] * inv
        for r2 in sorted(holders - {r}):
            row2 = rows[r2]
            f = row2[c]
            for cc, v in prow.items():
                old = row2.get(cc, 0)
                new = (old - f * v) % p if p else old - f * v
                if new == 0:
                    if cc in row2:
                        del row2[cc]
                        by_col[cc].discard(r2)
                else:
                    if cc not in row2:
                        by_col[cc].add(r2)
                    row2[cc] = new
    out = []
    one = field(1)
    for f_col in free:
        vec = {f_col: one}
        for pc, r in pivot_of.items():
            v = rows[r].get(f_col)
            if v is not None:
                vec[pc] = field.neg(v)
        out.append(vec)
    return out


def kernel_basis(m: SparseMatrix, cols_cap: int = DEFAULT_KERNEL_COLS_CAP) -> list[dict]:
    """Basis of ker(m) as sparse vectors ``{column: value}``.

    Each vector is 1 at one non-pivot column and otherwise supported on pivot
    columns of smaller index, so its highest-index coordinate equals 1.
    Vectors are ordered by that coordinate.
    """
    if m.ncols > cols_cap:
        raise SizeGuard(f"{m.ncols} columns exceed the kernel cap {cols_cap}")
    one = m.field(1)
    out = [{j: one} for j, col in enumerate(m.cols) if not col]
    for comp in _components(m):
        out.extend(_rref_kernel(m, comp))
    out.sort(key=lambda v: max(v))
    return out


def nullity(m: SparseMatrix, fill_cap: int = DEFAULT_FILL_CAP) -> int:
    return m.ncols - rank(m, fill_cap)


class EchelonBasis:
    """Incrementally maintained echelon form of a set of sparse vectors."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.pivots: dict = {}  # leading index -> normalized vector

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec) -> dict:
        f = self.field
        p = f.p
        v = {i: f(x) for i, x in _as_sparse(vec).items() if f(x) != 0}
        while v:
            lead = min(v)
            pv = self.pivots.get(lead)
            if pv is None:
                # no basis vector can cancel this leading index
                return v
            c = v[lead]
            for i, x in pv.items():
                new = (v.get(i, 0) - c * x) % p if p else v.get(i, 0) - c * x
                if new == 0:
                    v.pop(i, None)
                else:
                    v[i] = new
        return v

    def add(self, vec) -> bool:
        """Insert ``vec``; return True when it was independent of the basis."""
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        inv = self.field.inv(v[lead])
        p = self.field.p
        self.pivots[lead] = {i: (x * inv) % p if p else x * inv for i, x in v.items()}
        return True

    def contains(self, vec) -> bool:
        return not self.reduce(vec)


def _as_sparse(vec) -> dict:
    if isinstance(vec, Mapping):
        return dict(vec)
    return {i: x for i, x in enumerate(vec) if x != 0}


def in_span(vectors: Sequence, candidate, field: FieldSpec = FieldSpec()) -> bool:
    """True iff ``candidate`` is a linear combination of ``vectors``."""
    basis = EchelonBasis(field)
    for v in vectors:
        basis.add(v)
    return basis.contains(candidate)


def span_rank(vectors: Sequence, field: FieldSpec = FieldSpec()) -> int:
    basis = EchelonBasis(field)
    for v in vectors:
        basis.add(v)
    return len(basis)


# ---------------------------------------------------------------------------
# triplet dump format


def dump_matrix(m: SparseMatrix) -> str:
    f = m.field
    lines = [f"{m.nrows} {m.ncols} {f.name()}"]
    for i, j, v in sorted(m.entries()):
        lines.append(f"{i + 1} {j + 1} {f.to_signed(v)}")
    lines.append("0 0 0")
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> SparseMatrix:
    lines = [ln for ln in text.splitlines()]
    if not lines:
        raise ParseError("empty matrix dump", 1)
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError("expected 'nrows ncols field'", 1)
    try:
        nrows, ncols = int(head[0]), int(head[1])
        field = FieldSpec.parse(head[2])
    except (ValueError, NotPrime) as exc:
        raise ParseError(str(exc), 1) from None
    trip = []
    for lineno, line in enumerate(lines[1:], start=2):
        tok = line.split()
        if not tok:
            continue
        if len(tok) != 3:
            raise ParseError("expected 'r c v'", lineno)
        if tok == ["0", "0", "0"]:
            return SparseMatrix.from_triplets(nrows, ncols, field, trip)
        try:
            r, c = int(tok[0]), int(tok[1])
            v = Fraction(tok[2])
        except ValueError:
            raise ParseError("bad entry", lineno) from None
        trip.append((r - 1, c - 1, v))
    raise ParseError("missing '0 0 0' terminator", len(lines))


def save_matrix(m: SparseMatrix, path) -> None:
    Path(path).write_text(dump_matrix(m))
