import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from toricbetti.errors import NotPrime, ParseError, SizeGuard
from toricbetti.koszul import build_delta
from toricbetti.linalg import (
    EchelonBasis,
    FieldSpec,
    SparseMatrix,
    dump_matrix,
    in_span,
    kernel_basis,
    load_matrix,
    nullity,
    rank,
    save_matrix,
    span_rank,
    vstack,
)
from toricbetti.polytope import PointSet, box, lattice_points, simplex

GF = FieldSpec()
QQ = FieldSpec.rational()


def naive_rank_modp(rows, p):
    """Textbook Gaussian elimination on a dense list of lists mod p."""
    a = [[x % p for x in r] for r in rows]
    if not a:
        return 0
    r = 0
    ncols = len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


def random_dense(rng, nrows, ncols, density=0.3, lo=-3, hi=3):
    return [
        [rng.randint(lo, hi) if rng.random() < density else 0 for _ in range(ncols)]
        for _ in range(nrows)
    ]


def test_field_spec_parse():
    assert FieldSpec.parse("32003") == GF
    assert FieldSpec.parse("QQ").p is None
    assert FieldSpec.parse(7).p == 7
    assert GF(-1) == 32002
    assert GF.to_signed(32002) == -1
    assert QQ(Fraction(1, 2)) == Fraction(1, 2)


@pytest.mark.parametrize("p", [1, 4, 32001, 2**31 + 11])
def test_not_prime(p):
    with pytest.raises(NotPrime):
        FieldSpec(p)


def test_zero_and_identity():
    assert rank(SparseMatrix.zeros(5, 7, GF)) == 0
    assert len(kernel_basis(SparseMatrix.zeros(5, 7, GF))) == 7
    assert rank(SparseMatrix.identity(4, GF)) == 4
    assert kernel_basis(SparseMatrix.identity(4, GF)) == []


def test_one_by_two_kernel():
    m = SparseMatrix.from_dense([[1, 1]], QQ)
    (v,) = kernel_basis(m)
    assert v == {0: -1, 1: 1}


def test_delta_for_doubled_triangle():
    S = lattice_points(simplex(2, 2))
    T = lattice_points(simplex(2, 1))
    m = build_delta(S, T, 2, GF)
    assert m.shape == (6 * 10, 15 * 3)
    assert rank(m) == 39
    assert len(kernel_basis(m)) == 6


def test_segment_kernel_on_strip():
    S = lattice_points(box(3, 1))
    T = PointSet([(0, 0), (1, 0), (2, 0)])
    m = build_delta(S, T, 1, GF)
    assert nullity(m) == 12
    assert len(kernel_basis(build_delta(S, T, 1, QQ))) == 12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 9), st.integers(1, 9))
def test_rank_matches_sympy_and_naive(seed, nrows, ncols):
    rng = random.Random(seed)
    rows = random_dense(rng, nrows, ncols)
    want_q = sympy.Matrix(rows).rank()
    assert rank(SparseMatrix.from_dense(rows, QQ)) == want_q
    assert rank(SparseMatrix.from_dense(rows, GF)) == naive_rank_modp(rows, 32003)
    for p in (2, 3, 5):
        assert rank(SparseMatrix.from_dense(rows, FieldSpec(p))) == naive_rank_modp(rows, p)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 10), st.integers(1, 10), st.sampled_from([None, 2, 3, 32003]))
def test_rank_kernel_invariants(seed, nrows, ncols, p):
    rng = random.Random(seed)
    field = FieldSpec(p)
    m = SparseMatrix.from_dense(random_dense(rng, nrows, ncols, 0.4), field)
    r = rank(m)
    assert r == rank(m.transpose())
    ker = kernel_basis(m)
    assert r + len(ker) == ncols
    for v in ker:
        assert all(x == 0 for x in m.apply(v).values())
        assert v[max(v)] == 1
    assert span_rank(ker, field) == len(ker)


def test_fields_agree_on_small_integer_matrices():
    # entries in {-1, 0, 1}, small size: no prime divisor of a minor reaches 32003
    rng = random.Random(3)
    for _ in range(40):
        rows = random_dense(rng, 6, 6, 0.5, -1, 1)
        a = SparseMatrix.from_dense(rows, GF)
        b = SparseMatrix.from_dense(rows, QQ)
        assert rank(a) == rank(b)


def test_large_sparse_rank_matches_sympy():
    rng = random.Random(11)
    rows = random_dense(rng, 40, 35, 0.08)
    assert rank(SparseMatrix.from_dense(rows, QQ)) == sympy.Matrix(rows).rank()
    assert rank(SparseMatrix.from_dense(rows, GF)) == naive_rank_modp(rows, 32003)


def test_block_diagonal_components():
    a = [[1, 2], [2, 4]]
    b = [[1, 0, 1], [0, 1, 1]]
    dense = [[0] * 5 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            dense[i][j] = a[i][j]
        for j in range(3):
            dense[2 + i][2 + j] = b[i][j]
    m = SparseMatrix.from_dense(dense, QQ)
    assert rank(m) == 3
    assert len(kernel_basis(m)) == 2


def test_matrix_algebra():
    a = SparseMatrix.from_dense([[1, 2], [0, 1]], GF)
    b = SparseMatrix.from_dense([[1, -2], [0, 1]], GF)
    assert (a @ b) == SparseMatrix.identity(2, GF)
    assert (a - a).is_zero()
    assert a.scale(2).to_dense() == [[2, 4], [0, 2]]
    assert a.transpose().to_dense() == [[1, 0], [2, 1]]
    stacked = vstack([a, b])
    assert stacked.shape == (4, 2)
    assert rank(stacked) == 2


def test_in_span_and_echelon():
    vecs = [[1, 0, 1], [0, 1, 1]]
    assert in_span(vecs, [1, 1, 2], QQ)
    assert not in_span(vecs, [1, 1, 1], QQ)
    assert in_span(vecs, {0: 2, 1: -1, 2: 1}, QQ)
    eb = EchelonBasis(GF)
    assert eb.add([1, 2, 3])
    assert not eb.add([2, 4, 6])
    assert eb.contains([3, 6, 9])
    assert len(eb) == 1
    assert eb.reduce([1, 2, 3]) == {}


def test_dump_roundtrip(tmp_path):
    rng = random.Random(2)
    for field in (GF, QQ):
        m = SparseMatrix.from_dense(random_dense(rng, 5, 6), field)
        text = dump_matrix(m)
        assert text.endswith("0 0 0\n")
        back = load_matrix(text)
        assert back == m
        path = tmp_path / f"m-{field.name()}.txt"
        save_matrix(m, path)
        assert load_matrix(path.read_text()) == m


def test_dump_uses_signed_one_based_entries():
    m = SparseMatrix.from_dense([[0, -1]], GF)
    assert dump_matrix(m).splitlines() == ["1 2 32003", "1 2 -1", "0 0 0"]


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("2 2\n", 1),
        ("2 2 4\n0 0 0\n", 1),
        ("2 2 QQ\n1 1\n0 0 0\n", 2),
        ("2 2 QQ\n1 x 1\n0 0 0\n", 2),
        ("2 2 QQ\n1 1 1\n", 2),
    ],
)
def test_load_errors(text, line):
    with pytest.raises(ParseError) as exc:
        load_matrix(text)
    assert exc.value.line == line


def test_kernel_guard():
    with pytest.raises(SizeGuard):
        kernel_basis(SparseMatrix.zeros(1, 10, GF), cols_cap=5)
