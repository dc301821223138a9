"""Command-line interface for toricbetti."""
from __future__ import annotations

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from . import basis as basis_mod
from .errors import ParseError, SizeGuard, ToricBettiError
from .formulas import (
    NOT_COVERED,
    profile_from_polytope,
    row_n_entry,
    segment_kernel_dim,
    veronese_first_entry,
    width2_entries,
)
from .koszul import (
    WEDGE_CAP,
    BettiTable,
    GradedModuleSpec,
    betti_table,
    build_delta,
    kernel_dim_delta,
    koszul_cohomology_dim,
)
from .linalg import EchelonBasis, FieldSpec, kernel_basis
from .polytope import (
    PointSet,
    interior_lattice_points,
    is_normal,
    lattice_points,
    lattice_width,
    load_polytope,
    simplex,
    translations_into,
)
from .verify import SUITES, reports_to_json, run_suite

EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_VERIFY = 4

FORMATS = click.Choice(["text", "csv", "json"])


def _fmt(P) -> str:
    return "(" + ",".join(str(c) for c in P) + ")"


def _fmt_set(points) -> str:
    return " ".join(_fmt(P) for P in points) if len(points) else "(none)"


def parse_inline_points(text: str) -> PointSet:
    """Parse ``"(1,1);(2,1)"`` into a point set."""
    pts = []
    for tok in text.split(";"):
        tok = tok.strip()
        if not tok:
            continue
        if not (tok.startswith("(") and tok.endswith(")")):
            raise ParseError(f"bad point {tok!r} in inline point list")
        try:
            pts.append(tuple(int(c) for c in tok[1:-1].split(",")))
        except ValueError:
            raise ParseError(f"bad point {tok!r} in inline point list") from None
    if not pts:
        raise ParseError("empty inline point list")
    try:
        return PointSet(pts)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _field(text: str) -> FieldSpec:
    try:
        return FieldSpec.parse(text)
    except (ValueError, ToricBettiError) as exc:
        raise click.BadParameter(str(exc), param_hint="--field") from None


def _cap(override: Optional[int]) -> int:
    return override if override is not None else WEDGE_CAP


def handle_errors(func):
    """Map package errors to the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ParseError as exc:
            click.echo(f"parse error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except SizeGuard as exc:
            click.echo(f"size guard: {exc} (raise it with --guard-override)", err=True)
            sys.exit(EXIT_GUARD)
        except ToricBettiError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(1)

    return wrapper


field_option = click.option(
    "--field", "field_text", default="32003", show_default=True,
    help="Prime characteristic, or 'rational' for exact rational arithmetic.",
)
format_option = click.option("--format", "fmt", type=FORMATS, default="text", show_default=True)
guard_option = click.option(
    "--guard-override", type=int, default=None,
    help=f"Cap on vector-space dimensions (default {WEDGE_CAP}).",
)
threads_option = click.option(
    "--threads", type=click.IntRange(min=1), default=1, show_default=True,
    help="Worker processes for rank computations; output does not depend on it.",
)


@click.group()
@click.version_option(version=__version__, prog_name="toricbetti")
def cli() -> None:
    """Graded Betti tables of toric embeddings and explicit Koszul kernels."""


@cli.command(name="points")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--normal-bound", type=int, default=None, help="Largest a + b checked for normality.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@handle_errors
def points_cmd(file: Path, normal_bound: Optional[int], fmt: str) -> None:
    """List lattice points, interior points, translations and normality."""
    poly = load_polytope(file)
    S = lattice_points(poly)
    T = interior_lattice_points(poly)
    X = translations_into(T, S) if len(T) else PointSet()
    prof = profile_from_polytope(poly) if poly.dim >= 1 else None
    report = is_normal(poly, normal_bound)
    width = lattice_width(poly) if poly.dim == 2 else None
    data = {
        "dim": poly.dim,
        "N": len(S),
        "N1": len(T),
        "S": [list(P) for P in S],
        "T": [list(P) for P in T],
        "X": [list(P) for P in X],
        "t": len(X) if len(T) else None,
        "interior_dim": T.dim if len(T) else -1,
        "ell": prof.ell if prof else None,
        "lattice_width": width,
        "normal": report.normal,
        "normal_bound": report.bound,
        "normal_failing": list(report.failing) if report.failing else None,
    }
    if fmt == "json":
        click.echo(json.dumps(data))
        return
    click.echo(f"dim {poly.dim}")
    click.echo(f"N = {len(S)}: {_fmt_set(S)}")
    click.echo(f"N1 = {len(T)}: {_fmt_set(T)}")
    click.echo(f"interior dim = {data['interior_dim']}")
    if len(T):
        click.echo(f"X (t = {len(X)}): {_fmt_set(X)}")
    if data["ell"] is not None:
        click.echo(f"ell = {data['ell']} (lines parallel to the interior segment)")
    if width is not None:
        click.echo(f"lattice width = {width}")
    verdict = "normal" if report.normal else f"NOT normal, fails at (a, b) = {report.failing}"
    click.echo(f"normality: {verdict} (checked a + b <= {report.bound})")


def _row_n_checks(poly, tab: BettiTable) -> list[dict]:
    n = tab.n
    if n < 1 or tab.qmax < n:
        return []
    prof = profile_from_polytope(poly)
    width2 = n == 2 and lattice_width(poly) == 2
    checks = []
    for p in range(tab.pmax + 1):
        got = tab[(p, n)]
        claim = row_n_entry(prof, p)
        if claim is not NOT_COVERED:
            checks.append({"p": p, "q": n, "source": "row-n", "expected": claim, "value": got, "match": claim == got})
        if width2:
            k2, k1 = width2_entries(prof.N, prof.N1, p)
            checks.append({"p": p, "q": 2, "source": "width-2", "expected": k2, "value": got, "match": k2 == got})
            if tab.qmax >= 1:
                v1 = tab[(p, 1)]
                checks.append({"p": p, "q": 1, "source": "width-2", "expected": k1, "value": v1, "match": k1 == v1})
    return checks


@cli.command(name="betti")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@field_option
@click.option("--pmax", type=int, default=None, help="Largest homological index (default N - 1).")
@click.option("--qmax", type=int, default=None, help="Largest row (default the dimension).")
@format_option
@threads_option
@guard_option
@click.option("--normal-bound", type=int, default=None)
@handle_errors
def betti_cmd(file, field_text, pmax, qmax, fmt, threads, guard_override, normal_bound) -> None:
    """Compute the graded Betti table of the toric embedding of FILE."""
    poly = load_polytope(file)
    tab = betti_table(
        poly, _field(field_text), pmax, qmax, normal_bound=normal_bound,
        workers=threads, cap=_cap(guard_override),
    )
    checks = _row_n_checks(poly, tab)
    if fmt == "json":
        d = tab.to_dict()
        d["normal"] = tab.normal
        d["warnings"] = tab.warnings
        d["checks"] = checks
        click.echo(json.dumps(d))
        return
    if fmt == "csv":
        click.echo(tab.to_csv(), nl=False)
        return
    click.echo(f"Betti table over {tab.field}, N = {tab.N}, n = {tab.n}")
    click.echo(tab.to_text())
    for w in tab.warnings:
        click.echo(f"warning: {w}")
    if checks:
        bad = [c for c in checks if not c["match"]]
        srcs = sorted({c["source"] for c in checks})
        click.echo(f"closed-form check ({', '.join(srcs)}): {len(checks) - len(bad)}/{len(checks)} entries match")
        for c in bad:
            click.echo(
                f"  MISMATCH {c['source']} kappa[{c['p']},{c['q']}]: table {c['value']}, formula {c['expected']}"
            )


def _load_T(t_inline: Optional[str], t_file: Optional[Path], S_poly) -> PointSet:
    if t_inline and t_file:
        raise click.UsageError("give either --t or --t-file, not both")
    if t_inline:
        return parse_inline_points(t_inline)
    if t_file:
        return lattice_points(load_polytope(t_file))
    T = interior_lattice_points(S_poly)
    if not len(T):
        raise click.UsageError("no T given and the polytope has no interior points")
    return T


def _element_json(x) -> dict:
    f = x.field
    return {
        "terms": [
            {"coeff": str(f.to_signed(v)), "wedge": [list(P) for P in w], "t": list(Q)}
            for (w, Q), v in sorted(x.terms.items())
        ]
    }


def _explicit_basis(S: PointSet, T: PointSet, p: int, field: FieldSpec, cap: int):
    """(kind, elements) for ker(delta) on wedge^p S (x) T."""
    if T.dim >= 2 and p == len(T) - 1:
        X = translations_into(T, S)
        return "monomial", [basis_mod.make_xA(A, S, T, field) for A in basis_mod.monomials(X, p)]
    if T.dim <= 1 and len(T) and p <= len(T):
        return "hypercube", basis_mod.segment_kernel_basis(S, T, p, field)
    m = build_delta(S, T, p, field, cap)
    vecs = kernel_basis(m) if p else [{t: field(1)} for t in range(len(T))]
    return "elimination", [basis_mod.WedgeTensorElement.from_vector(v, S, T, p, field) for v in vecs]


@cli.command(name="kernel")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--t", "t_inline", default=None, help='Inline T, e.g. "(1,1);(2,1)".')
@click.option("--t-file", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
              help="Polytope file whose lattice points form T (default: interior points of FILE).")
@click.option("-p", "--p", "p", type=int, default=None, help="Wedge degree (default #T - 1).")
@click.option("--basis", "want_basis", is_flag=True, help="Also print an explicit kernel basis.")
@field_option
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@guard_option
@handle_errors
def kernel_cmd(file, t_inline, t_file, p, want_basis, field_text, fmt, guard_override) -> None:
    """Dimension of ker(delta) on wedge^p S (x) T with S the lattice points of FILE."""
    field = _field(field_text)
    cap = _cap(guard_override)
    S_poly = load_polytope(file)
    S = lattice_points(S_poly)
    T = _load_T(t_inline, t_file, S_poly)
    if p is None:
        p = len(T) - 1
    if p < 0:
        raise click.BadParameter("p must be non-negative", param_hint="--p")
    if T.ambient_dim != S.ambient_dim:
        raise ParseError("T and S live in different dimensions")
    X = translations_into(T, S)
    dim = 0 if p > len(S) else (len(T) if p == 0 else kernel_dim_delta(S, T, p, field, cap))
    kind, elements = (None, [])
    if want_basis:
        kind, elements = _explicit_basis(S, T, p, field, cap) if p <= len(S) else ("empty", [])
        if len(elements) != dim:
            raise AssertionError(f"basis has {len(elements)} elements but the kernel has dimension {dim}")
    if fmt == "json":
        out = {"p": p, "dim": dim, "field": field.name(), "N": len(S), "T": [list(P) for P in T],
               "X": [list(P) for P in X]}
        if want_basis:
            out["basis_kind"] = kind
            out["basis"] = [_element_json(x) for x in elements]
        click.echo(json.dumps(out))
        return
    click.echo(f"#S = {len(S)}, #T = {len(T)}, dim conv(T) = {T.dim}, #X = {len(X)}, p = {p}")
    click.echo(f"dim ker delta = {dim}")
    if want_basis:
        click.echo(f"basis ({kind}, {len(elements)} elements):")
        for k, x in enumerate(elements, start=1):
            click.echo(f"[{k}]")
            click.echo(basis_mod.format_element(x))


@cli.command(name="basis")
@click.argument("file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--t", "t_inline", default=None, help='Inline T, e.g. "(0,0);(1,0);(0,1)".')
@click.option("--t-file", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--monomial", default=None, help='Only this x_A, e.g. "(0,0);(0,0);(2,0)".')
@field_option
@click.option("--check/--no-check", default=True, show_default=True,
              help="Verify closedness, independence and spanning by elimination.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@guard_option
@handle_errors
def basis_cmd(file, t_inline, t_file, monomial, field_text, check, fmt, guard_override) -> None:
    """Explicit kernel basis at p = #T - 1 (monomial or hypercube form)."""
    field = _field(field_text)
    cap = _cap(guard_override)
    S_poly = load_polytope(file)
    S = lattice_points(S_poly)
    T = _load_T(t_inline, t_file, S_poly)
    p = len(T) - 1
    if monomial:
        A = basis_mod.Monomial(list(parse_inline_points_multi(monomial)))
        elements = [basis_mod.make_xA(A, S, T, field)]
        kind = "monomial"
    else:
        kind, elements = _explicit_basis(S, T, p, field, cap)
    report = None
    if check and not monomial:
        if kind == "monomial":
            report = basis_mod.verify_basis_theorem(S, T, field, cap)
            ok = report.passed
        else:
            m = build_delta(S, T, p, field, cap)
            ech = EchelonBasis(field)
            ok = all(not m.apply(x.to_vector()) and ech.add(x.to_vector()) for x in elements)
            ok = ok and all(ech.contains(v) for v in kernel_basis(m))
    else:
        ok = None
    if fmt == "json":
        click.echo(json.dumps({
            "p": p, "kind": kind, "count": len(elements), "verified": ok,
            "basis": [_element_json(x) for x in elements],
        }))
    else:
        click.echo(f"{kind} basis, p = {p}, {len(elements)} elements")
        for k, x in enumerate(elements, start=1):
            click.echo(f"[{k}]")
            click.echo(basis_mod.format_element(x))
        if ok is not None:
            click.echo(f"verification: {'PASS' if ok else 'FAIL'}")
            if report is not None and report.counterexample:
                click.echo(f"  {report.counterexample}")
    if ok is False:
        sys.exit(EXIT_VERIFY)


def parse_inline_points_multi(text: str) -> list:
    """Like ``parse_inline_points`` but keeps repeated points (for monomials)."""
    pts = []
    for tok in text.split(";"):
        tok = tok.strip()
        if tok:
            pts.extend(parse_inline_points(tok).points)
    return pts


@cli.command(name="verify")
@click.argument("suites", nargs=-1)
@field_option
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--seed", type=int, default=None, help="Seed for the randomized fixtures.")
@handle_errors
def verify_cmd(suites, field_text, fmt, seed) -> None:
    """Run invariant suites: all, or any of the named ones."""
    names = list(suites) or ["all"]
    if "all" in names:
        names = list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise click.BadParameter(
            f"unknown suite(s) {', '.join(unknown)}; choose from all, {', '.join(SUITES)}"
        )
    field = _field(field_text)
    reports = []
    for name in names:
        kwargs = {}
        if seed is not None and "seed" in SUITES[name].__code__.co_varnames:
            kwargs["seed"] = seed
        rep = run_suite(name, field, **kwargs)
        reports.append(rep)
        if fmt == "text":
            click.echo(rep.to_text())
    if fmt == "json":
        click.echo(reports_to_json(reports))
    if not all(r.ok for r in reports):
        sys.exit(EXIT_VERIFY)


@cli.command(name="veronese")
@click.argument("n", type=int)
@click.argument("b", type=int)
@click.argument("d", type=int)
@field_option
@click.option("--check/--no-check", default=True, show_default=True,
              help="Confirm by elimination when the spaces fit under the guard.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@guard_option
@handle_errors
def veronese_cmd(n, b, d, field_text, check, fmt, guard_override) -> None:
    """First nonzero entry of the last row for O(B) on the D-th Veronese of P^N."""
    field = _field(field_text)
    cap = _cap(guard_override)
    pstar, value = veronese_first_entry(n, b, d)
    out = {"n": n, "b": b, "d": d, "p_star": pstar, "value": value, "pipeline": None, "match": None}
    if check:
        try:
            got = koszul_cohomology_dim(GradedModuleSpec.veronese_twist(n, b, d), pstar, n, field, cap)
            out["pipeline"], out["match"] = got, got == value
        except SizeGuard as exc:
            out["skipped"] = str(exc)
    if n == 1:
        # dual side: ker(delta) for a segment of length d - b - 2 inside [0, d]
        N = d + 1
        top = N - 2 - pstar
        seg = segment_kernel_dim(d - b - 2, top, b + 3) if 0 <= top <= d - b - 1 else None
        out["segment_formula"] = seg
        out["segment_match"] = seg == value if seg is not None else None
    if fmt == "json":
        click.echo(json.dumps(out))
    else:
        click.echo(f"p* = {pstar}")
        click.echo(f"kappa[{pstar},{n}] = {value} (closed form)")
        if out["pipeline"] is not None:
            click.echo(f"elimination: {out['pipeline']} ({'match' if out['match'] else 'MISMATCH'})")
        elif "skipped" in out:
            click.echo(f"elimination skipped: {out['skipped']}")
        if n == 1 and out.get("segment_formula") is not None:
            tag = "match" if out["segment_match"] else "MISMATCH"
            click.echo(f"segment kernel dimension on the dual side: {out['segment_formula']} ({tag})")
    if out["match"] is False or out.get("segment_match") is False:
        sys.exit(EXIT_VERIFY)


@cli.command(name="probe")
@click.argument("n", type=int)
@click.argument("d", type=int)
@field_option
@click.option("--qmax", type=int, default=None, help="Largest row (default n).")
@format_option
@threads_option
@guard_option
@handle_errors
def probe_cmd(n, d, field_text, qmax, fmt, threads, guard_override) -> None:
    """Betti table of the D-th Veronese of P^N against the 3d - 3 vanishing bound.

    This is a probe, not a proof: it reports what one table shows.
    """
    field = _field(field_text)
    poly = simplex(n, d)
    tab = betti_table(poly, field, qmax=qmax, workers=threads, cap=_cap(guard_override))
    bound = 3 * d - 3
    rows = []
    for q in range(2, tab.qmax + 1):
        zeros = 0
        for p in range(1, tab.pmax + 1):
            if tab[(p, q)]:
                break
            zeros = p
        rows.append({"q": q, "zero_through": zeros, "bound": bound, "consistent": zeros >= bound})
    if fmt == "json":
        d_ = tab.to_dict()
        d_["probe"] = rows
        d_["label"] = "probe, not proof"
        click.echo(json.dumps(d_))
        return
    if fmt == "csv":
        click.echo(tab.to_csv(), nl=False)
        return
    click.echo(f"probe, not proof: d = {d} Veronese of P^{n} over {tab.field}")
    click.echo(tab.to_text())
    for r in rows:
        verdict = "consistent with" if r["consistent"] else "BELOW"
        click.echo(
            f"row {r['q']}: kappa[p,{r['q']}] = 0 for 1 <= p <= {r['zero_through']}; "
            f"{verdict} the conjectured range p <= {bound}"
        )


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
