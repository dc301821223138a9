"""Invariant suites run by ``toricbetti verify`` and by the acceptance tests.

Each suite returns a ``SuiteReport`` listing one ``Case`` per check. A suite
passes when every case passes.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field as dc_field
from typing import Callable, NamedTuple, Optional

from .basis import (
    LatticeOrder,
    Monomial,
    TensorElement,
    WedgeTensorElement,
    _hull_vertices,
    coset_sum,
    iota,
    make_xA,
    make_xP,
    monomials,
    segment_kernel_basis,
    support,
    support_i,
    symmetrization_matrix,
    verify_basis_theorem,
)
from .fixtures import (
    DEFAULT_SEED,
    iter_small_triples,
    named_polytopes,
    random_interior_polygons,
    random_kernel_fixtures,
    random_segment_fixtures,
    width_two_polygons,
)
from .formulas import (
    generic_kernel_dim,
    profile_from_polytope,
    row_n_entry,
    segment_kernel_dim,
    veronese_first_entry,
    width2_entries,
)
from .koszul import (
    GradedModuleSpec,
    betti_table,
    build_delta,
    build_delta_i,
    dual_row_check,
    intersect_kernels,
    kernel_dim_delta,
    koszul_cohomology_dim,
    wedge_differential,
)
from .linalg import EchelonBasis, FieldSpec, SparseMatrix, kernel_basis, rank
from .polytope import (
    PointSet,
    hull_facets,
    lattice_points,
    minkowski_points,
    simplex,
    translations_into,
)


class Case(NamedTuple):
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    name: str
    cases: list = dc_field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return bool(self.cases) and all(c.passed for c in self.cases)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.cases.append(Case(name, bool(passed), detail))

    def failures(self) -> list:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
            "cases": [c._asdict() for c in self.cases],
        }

    def to_text(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        lines = [f"{self.name}: {status} ({len(self.cases)} cases, {self.seconds:.1f}s)"]
        for c in self.failures():
            lines.append(f"  FAIL {c.name}: {c.detail}")
        return "\n".join(lines)


def _timed(name: str, body: Callable[[SuiteReport], None]) -> SuiteReport:
    rep = SuiteReport(name)
    start = time.perf_counter()
    body(rep)
    rep.seconds = time.perf_counter() - start
    return rep


def _label(S: PointSet, T: PointSet) -> str:
    return f"S#{len(S)} T={list(T)}"


# ---------------------------------------------------------------------------
# suites


def golden_suite(field: FieldSpec = FieldSpec()) -> SuiteReport:
    """Betti table of the quadratic Veronese surface."""

    def body(rep):
        tab = betti_table(simplex(2, 2), field, qmax=2)
        want = {(0, 0): 1, (1, 1): 6, (2, 1): 8, (3, 1): 3}
        for (p, q), v in sorted(tab.entries.items()):
            rep.add(f"kappa[{p},{q}]", v == want.get((p, q), 0), f"got {v}")

    return _timed("golden", body)


def kernel_dims_suite(count: int = 20, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """dim ker(delta) at p = #T - 1 against the monomial count over X."""

    def body(rep):
        for fx in random_kernel_fixtures(count, seed):
            p = len(fx.T) - 1
            x = len(translations_into(fx.T, fx.S))
            got = kernel_dim_delta(fx.S, fx.T, p, field)
            want = generic_kernel_dim(p, x)
            rep.add(_label(fx.S, fx.T), got == want, f"elimination {got}, formula {want}")

    return _timed("kernel-dims", body)


def segment_suite(count: int = 10, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """Kernel dimensions and the hypercube basis for segment T."""

    def body(rep):
        for S, T, d in random_segment_fixtures(count, seed):
            x = len(translations_into(PointSet([T.points[0], T.points[1]]), S))
            for p in range(d + 2):
                want = segment_kernel_dim(d, p, x)
                got = kernel_dim_delta(S, T, p, field) if p else len(T)
                basis = segment_kernel_basis(S, T, p, field)
                m = build_delta(S, T, p, field)
                ech = EchelonBasis(field)
                closed = independent = True
                for b in basis:
                    vec = b.to_vector()
                    closed &= not m.apply(vec)
                    independent &= ech.add(vec)
                spans = all(ech.contains(v) for v in kernel_basis(m)) if p else True
                ok = got == want == len(basis) and closed and independent and spans
                rep.add(
                    f"{_label(S, T)} p={p}", ok,
                    f"elimination {got}, formula {want}, basis {len(basis)}, "
                    f"closed={closed} independent={independent} spans={spans}",
                )

    return _timed("segment", body)


def basis_theorem_suite(count: int = 20, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """The x_A are closed, independent and span ker(delta)."""

    def body(rep):
        for fx in random_kernel_fixtures(count, seed):
            r = verify_basis_theorem(fx.S, fx.T, field)
            rep.add(
                _label(fx.S, fx.T), r.passed,
                f"#X={r.x_count} monomials={r.monomials} kernel={r.kernel_dim} "
                f"closed={r.in_kernel} independent={r.independent} spans={r.spans}",
            )

    return _timed("basis-theorem", body)


def vanishing_suite(count: int = 20, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """ker(delta) = 0 for #T <= p and the intersection of ker(delta_i) = 0 for p >= #T."""

    def body(rep):
        pairs = [(fx.S, fx.T) for fx in random_kernel_fixtures(count, seed)]
        pairs += [(S, T) for S, T, _ in random_segment_fixtures(count // 2, seed)]
        for S, T in pairs:
            for p in range(len(T), len(T) + 2):
                if p <= len(S):
                    k = kernel_dim_delta(S, T, p, field)
                    rep.add(f"wedge {_label(S, T)} p={p}", k == 0, f"kernel {k}")
            p = len(T)
            if len(S) ** p * len(T) <= 200_000:
                k = intersect_kernels(S, T, p, field, with_basis=False).dim
                rep.add(f"tensor {_label(S, T)} p={p}", k == 0, f"kernel {k}")

    return _timed("vanishing", body)


def duality_suite(count: int = 10, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec(), workers: int = 1) -> SuiteReport:
    """Last row of the full complex against ker(delta) with T the interior points."""

    def body(rep):
        for poly in random_interior_polygons(count, seed):
            r = dual_row_check(poly, field, workers=workers)
            for row in r.rows:
                rep.add(
                    f"N={r.N} N1={r.N1} verts={list(poly.vertices)} p={row.p}", row.match,
                    f"kappa[{row.full_index},{r.n}]={row.full_value} kernel={row.kernel_value}",
                )

    return _timed("duality", body)


def row_n_suite(count: int = 10, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec(), workers: int = 1) -> SuiteReport:
    """First entry of the last row and full width-two rows against the closed forms."""

    def body(rep):
        for poly in random_interior_polygons(count, seed):
            prof = profile_from_polytope(poly)
            p0 = prof.first_index
            got = koszul_cohomology_dim(GradedModuleSpec.trivial(poly), p0, 2, field)
            below = [koszul_cohomology_dim(GradedModuleSpec.trivial(poly), p, 2, field) for p in range(max(p0 - 2, 0), p0)]
            want = row_n_entry(prof, p0)
            rep.add(
                f"first entry verts={list(poly.vertices)}", got == want and not any(below),
                f"kappa[{p0},2]={got}, formula {want}, preceding {below}",
            )
        for poly in width_two_polygons():
            prof = profile_from_polytope(poly)
            tab = betti_table(poly, field, workers=workers)
            for p in range(prof.N):
                k2, k1 = width2_entries(prof.N, prof.N1, p)
                r = row_n_entry(prof, p)
                ok = tab[(p, 2)] == k2 and tab[(p, 1)] == k1
                if isinstance(r, int):
                    ok &= r == k2
                rep.add(
                    f"width two N={prof.N} N1={prof.N1} p={p}", ok,
                    f"table ({tab[(p, 1)]}, {tab[(p, 2)]}), closed forms ({k1}, {k2}), row-n {r}",
                )

    return _timed("row-n", body)


def veronese_suite(field: FieldSpec = FieldSpec(), include_d4: bool = True) -> SuiteReport:
    """First nonzero entry of the last row for O(b) on Veronese surfaces."""

    def body(rep):
        cases = [(2, 0, 3)] + ([(2, 0, 4)] if include_d4 else []) + [(1, 0, 3), (1, 1, 4), (2, -1, 3)]
        for n, b, d in cases:
            pstar, value = veronese_first_entry(n, b, d)
            got = koszul_cohomology_dim(GradedModuleSpec.veronese_twist(n, b, d), pstar, n, field)
            rep.add(f"({n},{b},{d}) full complex", got == value, f"p*={pstar} formula {value} pipeline {got}")
            # dual side: first row of O(d - b - n - 1)
            dual = GradedModuleSpec.veronese_twist(n, -b - n - 1, d)
            top = len(dual.generators()) - 1 - n - pstar
            got2 = koszul_cohomology_dim(dual, top, 1, field)
            rep.add(f"({n},{b},{d}) dual row", got2 == value, f"kappa[{top},1] of the dual twist = {got2}")

    return _timed("veronese", body)


def complex_suite(field: FieldSpec = FieldSpec()) -> SuiteReport:
    """delta o delta = 0 on the assembled Koszul complexes."""

    def body(rep):
        for name, poly in named_polytopes().items():
            if poly.dim < 1:
                continue
            for spec in (GradedModuleSpec.trivial(poly), GradedModuleSpec.interior(poly)):
                V = spec.generators()
                if len(V) > 12:
                    continue
                for q in range(0, 2):
                    W0, W1, W2 = spec.piece(q), spec.piece(q + 1), spec.piece(q + 2)
                    for p in range(2, min(len(V), 5) + 1):
                        a = wedge_differential(V, W0, W1, p, field)
                        b = wedge_differential(V, W1, W2, p - 1, field)
                        rep.add(f"{name} {spec.kind} p={p} q={q}", (b @ a).is_zero())
        for S, T, p in iter_small_triples(10, DEFAULT_SEED):
            if p < 2:
                continue
            U = minkowski_points(S, T)
            a = build_delta(S, T, p, field)
            b = wedge_differential(S, U, minkowski_points(S, U), p - 1, field)
            rep.add(f"random {_label(S, T)} p={p}", (b @ a).is_zero())

    return _timed("complex", body)


def identities_suite(count: int = 12, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """delta_i o iota = (-1)^i g o delta as matrices, and the coset identity."""

    def body(rep):
        for S, T, p in iter_small_triples(count, seed):
            U = minkowski_points(S, T)
            iota_m = symmetrization_matrix(S, T, p, field)
            g = symmetrization_matrix(S, U, p - 1, field)
            gd = g @ build_delta(S, T, p, field)
            for i in range(1, p + 1):
                lhs = build_delta_i(S, T, p, i, field) @ iota_m
                rhs = gd if i % 2 == 0 else gd.scale(-1)
                rep.add(f"{_label(S, T)} p={p} i={i}", lhs == rhs)
        for fx in random_kernel_fixtures(count, seed):
            p = len(fx.T) - 1
            if p > 3:
                continue
            X = translations_into(fx.T, fx.S)
            for A in monomials(X, p)[:6]:
                left = iota(make_xA(A, fx.S, fx.T, field))
                right = coset_sum(A, fx.S, fx.T, field)
                rep.add(f"coset {_label(fx.S, fx.T)} A={A}", left == right)

    return _timed("identities", body)


def _diff_polytope(points) -> object:
    pts = list(points)
    return hull_facets([tuple(a - b for a, b in zip(P, Q)) for P in pts for Q in pts])


def supports_suite(count: int = 100, seed: int = DEFAULT_SEED, field: FieldSpec = FieldSpec()) -> SuiteReport:
    """Support of combinations of x_A and the support-difference property of x_P."""

    def body(rep):
        rng = random.Random(seed + 7)
        fixtures = [fx for fx in random_kernel_fixtures(20, seed) if len(translations_into(fx.T, fx.S)) >= 2]
        made = 0
        while made < count:
            fx = fixtures[made % len(fixtures)]
            p = len(fx.T) - 1
            X = translations_into(fx.T, fx.S)
            mons = monomials(X, p)
            chosen = rng.sample(mons, rng.randint(1, min(4, len(mons))))
            x, parts = None, []
            for A in chosen:
                xa = make_xA(A, fx.S, fx.T, field)
                c = rng.randint(1, 1000)
                x = xa.combine(xa, 0, c) if x is None else x.combine(xa, 1, c)
                parts.append(xa)
            union = set()
            for xa in parts:
                union |= set(support(xa).points)
            want = _hull_vertices(union)
            rep.add(f"combination {made} {_label(fx.S, fx.T)} k={len(chosen)}", support(x) == want,
                    f"support {list(support(x))}, hull of supports {list(want)}")
            # tensor side
            seqs = [tuple(rng.choice(X.points) for _ in range(p)) for _ in range(rng.randint(1, 3))]
            y = None
            for seq in seqs:
                xp = make_xP(seq, fx.S, fx.T, field)
                c = rng.randint(1, 1000)
                y = xp.combine(xp, 0, c) if y is None else y.combine(xp, 1, c)
            if y:
                dT = _diff_polytope(fx.T)
                for i in range(1, p + 1):
                    dsup = _diff_polytope(support_i(y, i))
                    ok = all(dsup.contains(v) for v in dT.vertices)
                    rep.add(f"difference {made} i={i}", ok)
            made += 1
        # one-dimensional T: the difference property fails
        I = PointSet([(0,), (1,), (2,)])
        c = TensorElement.from_terms(
            [(1, [(0,), (0,)], (2,)), (-1, [(0,), (1,)], (1,)), (-1, [(1,), (0,)], (1,)), (1, [(1,), (1,)], (0,))],
            I, I, 2, field,
        )
        fails = not all(_diff_polytope(support_i(c, 1)).contains(v) for v in _diff_polytope(I).vertices)
        rep.add("segment counterexample is in the kernel", c.in_intersection())
        rep.add("segment counterexample violates the difference property", fails)

    return _timed("supports", body)


SUITES: dict[str, Callable[..., SuiteReport]] = {
    "golden": golden_suite,
    "kernel-dims": kernel_dims_suite,
    "segment": segment_suite,
    "basis-theorem": basis_theorem_suite,
    "vanishing": vanishing_suite,
    "duality": duality_suite,
    "row-n": row_n_suite,
    "veronese": veronese_suite,
    "complex": complex_suite,
    "identities": identities_suite,
    "supports": supports_suite,
}


def run_suite(name: str, field: FieldSpec = FieldSpec(), **kwargs) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name](field=field, **kwargs)


def reports_to_json(reports: list) -> str:
    return json.dumps({"ok": all(r.ok for r in reports), "suites": [r.to_dict() for r in reports]}, indent=2)
