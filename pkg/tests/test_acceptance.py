"""Acceptance criteria 1-10. Each test prints one ``CRITERION k: PASS|FAIL`` line.

Run ``pytest -v tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
import sys
import time

import pytest

from toricbetti.basis import TensorElement, support_i
from toricbetti.fixtures import (
    DEFAULT_SEED,
    random_interior_polygons,
    random_kernel_fixtures,
    random_segment_fixtures,
    width_two_polygons,
)
from toricbetti.formulas import profile_from_polytope, veronese_first_entry
from toricbetti.koszul import betti_table
from toricbetti.linalg import FieldSpec
from toricbetti.polytope import PointSet, hull_facets, simplex
from toricbetti.verify import run_suite

FIELD = FieldSpec()

# collected here, printed by the terminal summary hook in conftest.py
RESULTS: dict = {}


def report(k: int, ok: bool, detail: str = "") -> None:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
    RESULTS[k] = line
    assert ok, line


def suite_detail(rep) -> str:
    fails = rep.failures()
    head = f"{len(rep.cases)} cases, {rep.seconds:.1f}s"
    return head if not fails else head + f"; first failure {fails[0].name}: {fails[0].detail}"


def test_criterion_01_golden_table():
    start = time.perf_counter()
    tab = betti_table(simplex(2, 2), FIELD, qmax=2)
    seconds = time.perf_counter() - start
    want = {(0, 0): 1, (1, 1): 6, (2, 1): 8, (3, 1): 3}
    exact = all(tab[(p, q)] == want.get((p, q), 0) for p in range(tab.pmax + 1) for q in range(3))
    report(1, exact and seconds < 5, f"rows {tab.row(0)} {tab.row(1)} {tab.row(2)}, {seconds:.2f}s")


def test_criterion_02_generic_kernel_dims():
    fixtures = random_kernel_fixtures(20, DEFAULT_SEED)
    ok_fixtures = len(fixtures) >= 20 and all(
        fx.T_poly.dim == 2 and max(max(P) for P in fx.S) <= 4 and min(min(P) for P in fx.S) >= 0
        for fx in fixtures
    )
    rep = run_suite("kernel-dims", FIELD, count=20)
    report(2, ok_fixtures and rep.ok and rep.seconds < 60, suite_detail(rep))


def test_criterion_03_segment_kernels():
    fixtures = random_segment_fixtures(10, DEFAULT_SEED)
    ok_fixtures = len(fixtures) >= 10 and all(d <= 3 for _, _, d in fixtures)
    rep = run_suite("segment", FIELD, count=10)
    report(3, ok_fixtures and rep.ok, suite_detail(rep))


def test_criterion_04_basis_theorem():
    rep = run_suite("basis-theorem", FIELD, count=20)
    report(4, rep.ok and len(rep.cases) >= 20 and rep.seconds < 120, suite_detail(rep))


def test_criterion_05_vanishing():
    rep = run_suite("vanishing", FIELD, count=20)
    wedge = [c for c in rep.cases if c.name.startswith("wedge")]
    tensor = [c for c in rep.cases if c.name.startswith("tensor")]
    report(5, rep.ok and wedge and tensor, suite_detail(rep) + f" ({len(wedge)} wedge, {len(tensor)} tensor)")


def test_criterion_06_duality():
    polys = random_interior_polygons(10, DEFAULT_SEED)
    rep = run_suite("duality", FIELD, count=10)
    report(6, len(polys) >= 10 and rep.ok and rep.seconds < 300, suite_detail(rep))


def test_criterion_07_last_row():
    rep = run_suite("row-n", FIELD, count=10)
    widths = width_two_polygons()
    has_segment = any(profile_from_polytope(P).interior_dim == 1 for P in widths)
    report(7, rep.ok and len(widths) >= 5 and has_segment, suite_detail(rep) + f", {len(widths)} width-two polygons")


def test_criterion_08_veronese():
    closed = veronese_first_entry(2, 0, 3) == (7, 1) and veronese_first_entry(2, 0, 4) == (10, 55)
    rep = run_suite("veronese", FIELD)
    names = {c.name for c in rep.cases}
    both = "(2,0,3) full complex" in names and "(2,0,4) full complex" in names
    report(8, closed and both and rep.ok, suite_detail(rep))


def test_criterion_09_identities():
    cx = run_suite("complex", FIELD)
    ids = run_suite("identities", FIELD, count=12)
    triples = {c.name.rsplit(" i=", 1)[0] for c in ids.cases if not c.name.startswith("coset")}
    cosets = [c for c in ids.cases if c.name.startswith("coset")]
    ok = cx.ok and ids.ok and len(triples) >= 10 and len(cosets) > 0
    report(9, ok, f"complex: {suite_detail(cx)}; identities: {suite_detail(ids)}; {len(triples)} triples")


def test_criterion_10_supports():
    rep = run_suite("supports", FIELD, count=100)
    combos = [c for c in rep.cases if c.name.startswith("combination")]
    # pinned regression: a one-dimensional T where the difference property fails
    I = PointSet([(0,), (1,), (2,)])
    x = TensorElement.from_terms(
        [(1, [(0,), (0,)], (2,)), (-1, [(0,), (1,)], (1,)), (-1, [(1,), (0,)], (1,)), (1, [(1,), (1,)], (0,))],
        I, I, 2, FIELD,
    )
    pinned = x.in_intersection() and set(support_i(x, 1)) == {(0,), (1,)}
    diff = hull_facets([(a[0] - b[0],) for a in support_i(x, 1) for b in support_i(x, 1)])
    pinned = pinned and not diff.contains((2,))
    report(10, rep.ok and len(combos) >= 100 and pinned, suite_detail(rep))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
