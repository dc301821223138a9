import itertools
import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from toricbetti.basis import (
    LatticeOrder,
    _hull_vertices,
    Monomial,
    TensorElement,
    WedgeTensorElement,
    coset_sum,
    format_element,
    hypercube_basis,
    iota,
    leading_extract,
    leading_extract_tensor,
    make_xA,
    make_xP,
    monomials,
    parse_element,
    perm_sign,
    segment_kernel_basis,
    support,
    support_i,
    symmetrization_matrix,
    unimodular_normalize,
    verify_basis_theorem,
)
from toricbetti.errors import (
    BadT,
    NoUniqueMaximum,
    NotInKernel,
    NotInX,
    NotOneDimensional,
    ParseError,
    WrongTSize,
)
from toricbetti.fixtures import random_kernel_fixtures
from toricbetti.koszul import build_delta, build_delta_i, kernel_dim_delta
from toricbetti.linalg import EchelonBasis, FieldSpec, kernel_basis, vstack
from toricbetti.polytope import (
    PointSet,
    box,
    lattice_points,
    minkowski_points,
    simplex,
    translations_into,
)

GF = FieldSpec()
QQ = FieldSpec.rational()

TRI = lattice_points(simplex(2, 2))
UNIT = lattice_points(simplex(2, 1))
STRIP = lattice_points(box(3, 1))
SQUARE = lattice_points(box(1, 1))


def wedge(items, S, T, p, field=QQ):
    return WedgeTensorElement.from_terms(items, S, T, p, field)


def tensor(items, S, T, p, field=QQ):
    return TensorElement.from_terms(items, S, T, p, field)


def test_perm_sign():
    assert perm_sign([0, 1, 2]) == 1
    assert perm_sign([1, 0, 2]) == -1
    assert perm_sign([2, 0, 1]) == 1
    assert perm_sign([(1, 0), (0, 1)]) == -1
    assert perm_sign([(1, 0), (1, 0)]) == 0


def test_wedge_canonical_form():
    x = wedge([(1, [(1, 0), (0, 0)], (0, 0)), (1, [(0, 0), (0, 0)], (1, 0))], TRI, UNIT, 2)
    assert x.terms == {(((0, 0), (1, 0)), (0, 0)): -1}


def test_xA_doubled_triangle_matches_listing():
    A = Monomial([(1, 0), (0, 1)])
    x = make_xA(A, TRI, UNIT, QQ, p_order=[(1, 0), (0, 1)], q_order=[(1, 0), (0, 1), (0, 0)])
    want = wedge(
        [
            (1, [(1, 0), (1, 1)], (0, 1)),
            (-1, [(1, 0), (0, 2)], (1, 0)),
            (1, [(2, 0), (0, 2)], (0, 0)),
            (-1, [(2, 0), (0, 1)], (0, 1)),
            (1, [(1, 1), (0, 1)], (1, 0)),
            (-1, [(1, 1), (1, 1)], (0, 0)),
        ],
        TRI, UNIT, 2,
    )
    assert x == want
    assert len(x) == 5
    # each term is P ^ Q (x) ((2,2) - P - Q)
    for (w, Q), _ in x.terms.items():
        assert tuple(a + b + c for a, b, c in zip(*w, Q)) == (2, 2)
    assert not x.delta()


def test_xA_strip_matches_listing():
    A = Monomial({(0, 0): 2, (2, 0): 1})
    rows = [
        (-1, [(0, 0), (1, 0), (3, 1)], (0, 1)), (1, [(0, 0), (1, 0), (2, 1)], (1, 1)),
        (-1, [(0, 0), (1, 1), (2, 1)], (1, 0)), (1, [(0, 0), (1, 1), (3, 0)], (0, 1)),
        (-1, [(0, 0), (0, 1), (3, 0)], (1, 1)), (1, [(0, 0), (0, 1), (3, 1)], (1, 0)),
        (-1, [(1, 0), (0, 1), (3, 1)], (0, 0)), (1, [(1, 0), (0, 1), (2, 0)], (1, 1)),
        (-1, [(1, 0), (1, 1), (2, 0)], (0, 1)), (1, [(1, 0), (1, 1), (2, 1)], (0, 0)),
        (-1, [(0, 1), (1, 1), (3, 0)], (0, 0)), (1, [(0, 1), (1, 1), (2, 0)], (1, 0)),
    ]
    want = wedge(rows, STRIP, SQUARE, 3)
    x = make_xA(A, STRIP, SQUARE, QQ, q_order=[(0, 0), (0, 1), (1, 1), (1, 0)])
    assert x == want
    # other listings agree up to a global sign
    default = make_xA(A, STRIP, SQUARE, QQ)
    assert default == -want
    assert len(default) == 12
    assert not default.delta()
    # characteristic free: nothing is divided by 2
    x2 = make_xA(A, STRIP, SQUARE, FieldSpec(2))
    assert len(x2) == 12 and not x2.delta()


def test_xA_listing_signs():
    A = Monomial([(0, 0), (0, 0), (1, 0)])
    base = make_xA(A, STRIP, SQUARE, QQ)
    for po in set(itertools.permutations(A.points())):
        for qo in itertools.permutations(SQUARE.points):
            x = make_xA(A, STRIP, SQUARE, QQ, p_order=po, q_order=qo)
            assert x == base or x == -base
    with pytest.raises(ValueError):
        make_xA(A, STRIP, SQUARE, QQ, p_order=[(0, 0), (1, 0), (1, 0)])
    with pytest.raises(ValueError):
        make_xA(A, STRIP, SQUARE, QQ, q_order=[(0, 0), (1, 0), (1, 1), (2, 1)])


def test_xA_degree_zero():
    T = PointSet([(1, 1)])
    x = make_xA(Monomial({}), TRI, T, QQ)
    assert x.terms == {((), (1, 1)): 1}


def test_xA_errors():
    with pytest.raises(WrongTSize):
        make_xA(Monomial([(0, 0)]), TRI, UNIT, QQ)
    with pytest.raises(NotInX):
        make_xA(Monomial([(2, 0), (0, 0)]), TRI, UNIT, QQ)
    with pytest.raises(NotInX):
        make_xP([(1, 1), (0, 0)], TRI, UNIT, QQ)
    with pytest.raises(WrongTSize):
        make_xP([(0, 0)], TRI, UNIT, QQ)


def test_xP_examples():
    x = make_xP([(0, 0), (0, 1)], TRI, UNIT, QQ)
    assert len(x) == 6
    assert x.in_intersection()
    y = make_xP([(0, 1), (0, 0)], TRI, UNIT, QQ)
    assert y == x.act([1, 0])
    z = make_xP([], TRI, PointSet([(0, 1)]), QQ)
    assert z.terms == {((), (0, 1)): 1}


def test_iota_definition():
    P, Q = (1, 0), (0, 1)
    x = wedge([(1, [P], (0, 0))], TRI, UNIT, 1)
    assert iota(x).terms == {((P,), (0, 0)): 1}
    x2 = wedge([(1, [P, Q], (0, 0))], TRI, UNIT, 2)
    assert iota(x2) == tensor([(1, [P, Q], (0, 0)), (-1, [Q, P], (0, 0))], TRI, UNIT, 2)


def test_iota_matrix_matches_elementwise():
    m = symmetrization_matrix(TRI, UNIT, 2, QQ)
    A = Monomial([(1, 0), (0, 1)])
    x = make_xA(A, TRI, UNIT, QQ)
    assert m.apply(x.to_vector()) == iota(x).to_vector()


def test_coset_identity_examples():
    for A in monomials(translations_into(UNIT, TRI), 2):
        assert iota(make_xA(A, TRI, UNIT, QQ)) == coset_sum(A, TRI, UNIT, QQ)
    A = Monomial({(0, 0): 2, (2, 0): 1})
    assert iota(make_xA(A, STRIP, SQUARE, QQ)) == coset_sum(A, STRIP, SQUARE, QQ)


def test_intertwining_identity():
    rng = random.Random(7)
    for _ in range(6):
        S = PointSet(rng.sample(TRI.points, 4))
        T = PointSet(rng.sample(UNIT.points, 2))
        for p in (1, 2, 3):
            iota_m = symmetrization_matrix(S, T, p, QQ)
            U = minkowski_points(S, T)
            g = symmetrization_matrix(S, U, p - 1, QQ)
            d = build_delta(S, T, p, QQ)
            for i in range(1, p + 1):
                lhs = build_delta_i(S, T, p, i, QQ, target=U) @ iota_m
                rhs = (g @ d).scale((-1) ** i)
                assert lhs == rhs


def test_supports_from_examples():
    x = wedge([(1, [(0, 2), (1, 1)], (1, 0)), (-1, [(0, 2), (0, 1)], (2, 0)), (1, [(1, 1), (0, 1)], (1, 1))], TRI, TRI, 2)
    assert set(support(x)) == {(0, 2), (1, 1), (0, 1)}
    t = tensor(
        [(1, [(1, 0), (0, 1)], (0, 0)), (-1, [(1, 0), (0, 0)], (0, 1)),
         (-1, [(0, 0), (0, 1)], (1, 0)), (1, [(0, 0), (0, 0)], (1, 1))],
        SQUARE, SQUARE, 2,
    )
    assert t.in_intersection()
    assert set(support_i(t, 1)) == {(1, 0), (0, 0)}
    assert set(support_i(t, 2)) == {(0, 1), (0, 0)}
    single = wedge([(1, [(0, 0), (1, 0)], (0, 0))], TRI, UNIT, 2)
    assert set(support(single)) == {(0, 0), (1, 0)}
    assert len(support(wedge([], TRI, UNIT, 2))) == 0


def test_leading_extract_wedge_example():
    x = wedge([(1, [(0, 2), (1, 1)], (1, 0)), (-1, [(0, 2), (0, 1)], (2, 0)), (1, [(1, 1), (0, 1)], (1, 1))], TRI, TRI, 2)
    ext = leading_extract(x, LatticeOrder((0, 1)))
    assert ext.maximum == (0, 2)
    want = wedge([(1, [(1, 1)], (1, 0)), (-1, [(0, 1)], (2, 0))], ext.S_prime, ext.T_prime, 1)
    assert ext.y.terms == want.terms
    assert (0, 2) not in ext.S_prime


def test_leading_extract_tensor_example():
    t = tensor(
        [(1, [(1, 0), (0, 1)], (0, 0)), (-1, [(1, 0), (0, 0)], (0, 1)),
         (-1, [(0, 0), (0, 1)], (1, 0)), (1, [(0, 0), (0, 0)], (1, 1))],
        SQUARE, SQUARE, 2,
    )
    ext = leading_extract_tensor(t, LatticeOrder((0, 1)), 2)
    assert ext.maximum == (0, 1)
    assert ext.y.terms == {(((1, 0),), (0, 0)): 1, (((0, 0),), (1, 0)): -1}


def test_leading_extract_errors():
    x = make_xA(Monomial([(1, 0), (0, 1)]), TRI, UNIT, QQ)
    # x + y is constant on the edge from (2,0) to (0,2)
    with pytest.raises(NoUniqueMaximum):
        leading_extract(x, LatticeOrder((1, 1), tiebreak=False))
    bad = wedge([(1, [(0, 0), (1, 0)], (0, 0))], TRI, UNIT, 2)
    with pytest.raises(NotInKernel):
        leading_extract(bad, LatticeOrder((1, 0)))
    with pytest.raises(NotInKernel):
        leading_extract(wedge([], TRI, UNIT, 2), LatticeOrder((1, 0)))
    with pytest.raises(NotInKernel):
        leading_extract_tensor(tensor([(1, [(0, 0)], (0, 0))], SQUARE, SQUARE, 1), LatticeOrder((1, 0)), 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 5))
def test_leading_extract_on_xA(a, b, k):
    if (a, b) == (0, 0):
        return
    mons = monomials(translations_into(UNIT, TRI), 2)
    x = make_xA(mons[k % len(mons)], TRI, UNIT, QQ)
    ext = leading_extract(x, LatticeOrder((a, b)))
    assert ext.y
    assert not ext.y.delta()
    assert ext.maximum in x.wedge_points()


def test_lattice_order_is_translation_invariant():
    rng = random.Random(1)
    for _ in range(50):
        order = LatticeOrder((rng.randint(-3, 3), rng.randint(-3, 3)))
        P, Q, R = [(rng.randint(-5, 5), rng.randint(-5, 5)) for _ in range(3)]
        PR = (P[0] + R[0], P[1] + R[1])
        QR = (Q[0] + R[0], Q[1] + R[1])
        assert order.less(P, Q) == order.less(PR, QR)
        if P != Q:
            assert order.less(P, Q) != order.less(Q, P)


def test_monomial_counts():
    X = PointSet([(0, 0), (1, 0), (0, 1), (1, 1)])
    for p in range(5):
        mons = monomials(X, p)
        assert len(mons) == comb(p + len(X) - 1, p)
        assert len(set(mons)) == len(mons)
        assert all(m.degree == p for m in mons)


def test_basis_theorem_examples():
    rep = verify_basis_theorem(TRI, UNIT, QQ)
    assert rep.passed and rep.monomials == 6
    big = lattice_points(simplex(2, 3))
    T6 = lattice_points(simplex(2, 2))
    rep = verify_basis_theorem(big, T6, GF)
    X = translations_into(T6, big)
    assert rep.p == 5 and rep.expected == comb(5 + len(X) - 1, 5)
    assert rep.passed
    with pytest.raises(ValueError):
        verify_basis_theorem(STRIP, PointSet([(0, 0), (1, 0)]))


def test_basis_theorem_on_random_fixtures():
    for fx in random_kernel_fixtures(6, seed=5):
        assert verify_basis_theorem(fx.S, fx.T, GF).passed


def test_tensor_basis_dimension():
    # the x_P over sequences from X span the intersection of kernels
    X = translations_into(UNIT, TRI)
    vecs = [make_xP(seq, TRI, UNIT, QQ).to_vector() for seq in itertools.product(X.points, repeat=2)]
    ech = EchelonBasis(QQ)
    for v in vecs:
        assert ech.add(v)
    m = vstack([build_delta_i(TRI, UNIT, 2, i, QQ) for i in (1, 2)])
    for v in kernel_basis(m):
        assert ech.contains(v)


def test_unimodular_normalize():
    m = unimodular_normalize(PointSet([(0, 0), (1, 1), (2, 2)]))
    assert m.image.points == ((0, 0), (1, 0), (2, 0))
    assert m.d == 2
    det = m.matrix[0][0] * m.matrix[1][1] - m.matrix[0][1] * m.matrix[1][0]
    assert det in (1, -1)
    ident = unimodular_normalize(PointSet([(0, 0), (1, 0)]))
    assert ident.matrix == [[1, 0], [0, 1]] and ident.translation == (0, 0)
    pt = unimodular_normalize(PointSet([(3, 5)]))
    assert pt.image.points == ((0, 0),) and pt((3, 5)) == (0, 0)
    with pytest.raises(NotOneDimensional):
        unimodular_normalize(UNIT)
    with pytest.raises(NotOneDimensional):
        unimodular_normalize(PointSet([(0, 0), (2, 0)]))


def test_hypercube_examples():
    S = STRIP
    zero = hypercube_basis(S, 2, 0, QQ)
    assert [x.terms for x in zero] == [{((), (k, 0)): 1} for k in range(3)]
    seg1 = PointSet([(0, 0), (1, 0)])
    (x,) = [e for e in hypercube_basis(PointSet([(0, 0), (1, 0)]), 1, 1, QQ)]
    assert x == wedge([(1, [(0, 0)], (1, 0)), (-1, [(1, 0)], (0, 0))], seg1, seg1, 1)
    elems = hypercube_basis(S, 2, 1, QQ)
    assert len(elems) == 12
    T = PointSet([(0, 0), (1, 0), (2, 0)])
    assert kernel_dim_delta(S, T, 1, QQ) == 12
    ech = EchelonBasis(QQ)
    for e in elems:
        assert not e.delta()
        assert ech.add(e.to_vector())
    with pytest.raises(BadT):
        hypercube_basis(S, 2, 1, QQ, T=PointSet([(0, 0), (0, 1), (0, 2)]))


@pytest.mark.parametrize("T", [
    PointSet([(0, 0), (1, 1)]),
    PointSet([(1, 0), (1, 1), (1, 2)]),
    PointSet([(0, 1), (1, 0)]),
])
def test_segment_basis_after_normalizing(T):
    S = lattice_points(box(3, 3))
    for p in range(len(T) + 1):
        elems = segment_kernel_basis(S, T, p, GF)
        assert len(elems) == kernel_dim_delta(S, T, p, GF)
        ech = EchelonBasis(GF)
        for e in elems:
            assert not e.delta()
            assert ech.add(e.to_vector())


def test_one_dimensional_support_counterexample():
    # with a one-dimensional T the support-difference property can fail
    S = T = PointSet([(0,), (1,), (2,)])
    x = tensor(
        [(1, [(0,), (0,)], (2,)), (-1, [(0,), (1,)], (1,)),
         (-1, [(1,), (0,)], (1,)), (1, [(1,), (1,)], (0,))],
        S, T, 2,
    )
    assert x.in_intersection()
    assert set(support_i(x, 1)) == {(0,), (1,)}


def test_format_parse_roundtrip():
    A = Monomial({(0, 0): 2, (2, 0): 1})
    x = make_xA(A, STRIP, SQUARE, QQ)
    text = format_element(x)
    assert text.splitlines()[0].startswith("+1  (0,0) ^ ")
    assert parse_element(text, STRIP, SQUARE, 3, QQ) == x
    t = make_xP([(0, 0), (0, 1)], TRI, UNIT, QQ)
    assert parse_element(format_element(t), TRI, UNIT, 2, QQ, tensor=True) == t
    with pytest.raises(ParseError) as exc:
        parse_element("+1  (0,0) ^ (1,0)\n", TRI, UNIT, 2, QQ)
    assert exc.value.line == 1
    with pytest.raises(ParseError):
        parse_element("x  (0,0) (x) (1,0)\n", TRI, UNIT, 1, QQ)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_random_combinations_have_hull_support(seed):
    rng = random.Random(seed)
    X = translations_into(UNIT, TRI)
    mons = monomials(X, 2)
    chosen = rng.sample(mons, rng.randint(1, len(mons)))
    total = None
    pts = set()
    for A in chosen:
        c = rng.choice([1, -1, 2, 3])
        x = make_xA(A, TRI, UNIT, QQ)
        pts |= x.wedge_points()
        total = x.combine(x, c, 0) if total is None else total.combine(x, 1, c)
    assert total
    assert set(support(total)) == set(_hull_vertices(pts))
