"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 singular Q matrix, 4 verification
failure. Results go to stdout as tab-separated ``key value`` lines; with
``--out DIR`` the JSON/CSV reports are written there, and ``--figures`` adds
PNG renderings beside them.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import bounds as B
from . import generators as gens
from .complexity import PointSet, rademacher_table
from .domain import VECTOR_TOL, Tag, audit
from .errors import EquiauditError, SpecError, VerificationError
from .io import (
    AUDIT_HEADER,
    BOUND_HEADER,
    audit_summary,
    bound_rows,
    bound_to_json,
    canonical_dumps,
    domain_to_json,
    format_float,
    fraction_str,
    load_domain,
    rademacher_rows,
    write_csv,
    write_json,
)
from .predictors import empirical_error, empirical_error_exact, optimal_predictors, predictor_violations

METHOD_ALIASES = {
    "cls": "classification",
    "cls-finite": "classification_finite_special",
    "inv-reg": "invariant_regression",
    "equi-reg": "equivariant_regression",
    "equi-orth": "equivariant_orthogonal",
}
PATH_TOL = 1e-9
GAP_TOL = 1e-9


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(SpecError.exit_code, f"{self.prog}: error: {message}\n")


def _emit(key, *values):
    cells = [format_float(v) if isinstance(v, float) else str(v) for v in values]
    print("\t".join([key, *cells]))


def _outdir(args) -> Path | None:
    if args.out is None:
        if getattr(args, "figures", False):
            raise SpecError("--figures needs --out")
        return None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---- generate ------------------------------------------------------------


def _pairs(text: str):
    pairs = []
    for chunk in filter(None, text.split(";")):
        a, b = chunk.split(",")
        pairs.append((int(a), int(b)))
    return pairs


def cmd_generate(args) -> int:
    name = args.name
    if name == "fig3":
        out = gens.gen_fig3_instance()
    elif name == "square":
        out = gens.gen_square(args.c, args.m, args.grid)
    elif name == "swiss":
        out = gens.gen_swiss_roll(args.c, args.i, args.e, args.n, args.seed)
    elif name == "xor":
        out = gens.gen_xor_extrinsic()
    elif name == "c4reg":
        out = gens.gen_c4_regression(args.seed, args.n_theta, args.equivariant)
    elif name == "merge":
        probs = [float(v) for v in args.probs.split(",")] if args.probs else None
        out = gens.gen_label_merge(args.n_classes, _pairs(args.pairs), probs)
    elif name == "robot":
        out = gens.gen_robot_mixture(args.c)
    else:  # argparse restricts choices
        raise SpecError(f"unknown generator {name!r}")
    path = Path(args.out)
    path.write_text(canonical_dumps(domain_to_json(out.domain)))
    _emit("wrote", path)
    if out.closed_form_bound is not None:
        _emit("closed_form_bound", float(out.closed_form_bound), out.formula)
    if args.figures and out.domain.coordinates is not None:
        from .plots import plot_domain

        _emit("figure", plot_domain(out.domain, path.with_suffix(".png")))
    return 0


# ---- audit ---------------------------------------------------------------


def cmd_audit(args) -> int:
    domain = load_domain(args.spec)
    report = audit(domain, args.tol)
    summary = audit_summary(report, args.tol)
    for t in Tag:
        _emit(f"mu_{t.letter}", float(report.exact_measures[t]))
    out = _outdir(args)
    if out is not None:
        write_json(out / "audit.json", summary)
        write_csv(out / "audit_pairs.csv", AUDIT_HEADER, report.rows())
        _emit("wrote", out / "audit.json")
        _emit("wrote", out / "audit_pairs.csv")
        if args.figures:
            from .plots import plot_audit

            _emit("figure", plot_audit(report, out / "audit.png"))
    return 0


# ---- bound ---------------------------------------------------------------


def _close(a: float, b: float, tol: float = PATH_TOL) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def path_checks(domain, reports: dict) -> list[dict]:
    """Equalities that must hold between the applicable bound routes."""
    checks = []
    if "classification" in reports:
        via = B.classification_lower_bound_via_incorrect_set(domain)
        checks.append(
            {
                "name": "dissent == incorrect-set route",
                "lhs": reports["classification"].total,
                "rhs": via.total,
                "ok": via.exact_total == reports["classification"].exact_total,
            }
        )
    if "classification_finite_special" in reports:
        checks.append(
            {
                "name": "finite special case == classification",
                "lhs": reports["classification_finite_special"].total,
                "rhs": reports["classification"].total,
                "ok": reports["classification_finite_special"].exact_total == reports["classification"].exact_total,
            }
        )
    if "equivariant_orthogonal" in reports:
        a, b = reports["equivariant_orthogonal"].total, reports["equivariant_regression"].total
        checks.append({"name": "orthogonal == equivariant", "lhs": a, "rhs": b, "ok": _close(a, b)})
    if "equivariant_regression" in reports and domain.rep_y.is_identity:
        a, b = reports["equivariant_regression"].total, reports["invariant_regression"].total
        checks.append({"name": "equivariant(identity rep) == invariant", "lhs": a, "rhs": b, "ok": _close(a, b)})
    return checks


def cmd_bound(args) -> int:
    domain = load_domain(args.spec)
    if args.method == "all":
        methods = B.applicable_methods(domain)
    else:
        methods = [METHOD_ALIASES[args.method]]
    reports = {m: B.compute_bound(domain, m) for m in methods}
    for m, rep in reports.items():
        _emit(m, rep.total)
    out = _outdir(args)
    doc = {"methods": {m: bound_to_json(r) for m, r in reports.items()}}
    failed = []
    if args.method == "all":
        checks = path_checks(domain, reports)
        doc["checks"] = checks
        for c in checks:
            _emit("check", c["name"], "ok" if c["ok"] else "FAIL")
        failed = [c for c in checks if not c["ok"]]
        if "invariant_regression" in reports and "equivariant_regression" in reports:
            ge = reports["invariant_regression"].total >= reports["equivariant_regression"].total
            doc["inv_ge_equi"] = ge
            _emit("inv_ge_equi", str(ge).lower())
    if out is not None:
        write_json(out / f"bound_{args.method}.json", doc)
        for m, rep in reports.items():
            write_csv(out / f"bound_{m}.csv", BOUND_HEADER, bound_rows(rep))
            if args.figures:
                from .plots import plot_bound

                _emit("figure", plot_bound(rep, out / f"bound_{m}.png"))
        _emit("wrote", out / f"bound_{args.method}.json")
    if failed:
        raise VerificationError("path equality violated: " + "; ".join(c["name"] for c in failed))
    return 0


# ---- verify --------------------------------------------------------------


def verify_domain(domain) -> list[dict]:
    rows = []
    for method, predictor in optimal_predictors(domain).items():
        bound = B.compute_bound(domain, method)
        violations = predictor_violations(domain, predictor)
        if method == "classification":
            emp_exact = empirical_error_exact(domain, predictor)
            gap_exact = emp_exact - bound.exact_total
            ok = gap_exact == 0
            emp, gap = float(emp_exact), float(gap_exact)
        else:
            emp = empirical_error(domain, predictor)
            gap = emp - bound.total
            ok = abs(gap) <= GAP_TOL * max(1.0, abs(bound.total))
        ratio = emp / bound.total if bound.total > 0 else (1.0 if emp == 0 else float("inf"))
        rows.append(
            {
                "method": method,
                "predictor": predictor.kind,
                "bound": bound.total,
                "empirical": emp,
                "gap": gap,
                "ratio": ratio,
                "symmetry_violations": len(violations),
                "ok": bool(ok and not violations),
                "table": predictor.to_json(),
            }
        )
    return rows


def cmd_verify(args) -> int:
    domain = load_domain(args.spec)
    rows = verify_domain(domain)
    for r in rows:
        _emit(r["method"], r["bound"], r["empirical"], r["gap"], "ok" if r["ok"] else "FAIL")
    out = _outdir(args)
    if out is not None:
        write_json(out / "verify.json", {"results": rows})
        _emit("wrote", out / "verify.json")
    bad = [r["method"] for r in rows if not r["ok"]]
    if bad:
        raise VerificationError("optimal predictor does not attain the bound: " + ", ".join(bad))
    return 0


# ---- rademacher ----------------------------------------------------------


def _load_points(config: str) -> PointSet:
    if config == "xor":
        return gens.xor_point_set()
    try:
        doc = json.loads(Path(config).read_text())
    except OSError as exc:
        raise SpecError(f"cannot read {config}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or "points" not in doc:
        raise SpecError("point-set file needs a 'points' array", "/points")
    return PointSet(doc["points"], group=doc.get("group"), labels=tuple(doc["labels"]) if "labels" in doc else None)


def cmd_rademacher(args) -> int:
    points = _load_points(args.config)
    tables = {"none": rademacher_table(points, "none", args.cap)}
    if points.group is not None:
        tables["invariant"] = rademacher_table(points, "invariant", args.cap)
    summary = {}
    for name, t in tables.items():
        summary[name] = {
            "realizable_patterns": t.realizable,
            "patterns": 2**t.m,
            "correlation": fraction_str(t.correlation),
            "accuracy": fraction_str(t.accuracy),
            "conventions_disagree": t.conventions_disagree,
        }
        _emit(f"{name}.correlation", fraction_str(t.correlation))
        _emit(f"{name}.accuracy", fraction_str(t.accuracy))
        if t.conventions_disagree:
            _emit(f"{name}.flag", "correlation and accuracy conventions disagree")
    out = _outdir(args)
    if out is not None:
        header, rows = rademacher_rows(tables)
        write_csv(out / "rademacher.csv", header, rows)
        write_json(out / "rademacher.json", {"m": points.m, "classes": summary})
        _emit("wrote", out / "rademacher.csv")
        if args.figures:
            from .plots import plot_rademacher

            _emit("figure", plot_rademacher(tables, out / "rademacher.png"))
    return 0


# ---- parser --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="equiaudit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a generated domain spec")
    g.add_argument("name", choices=sorted(gens.GENERATORS))
    g.add_argument("--out", required=True, help="output spec path")
    g.add_argument("--c", type=float, default=0.5, help="correct ratio (square, swiss, robot)")
    g.add_argument("--m", type=float, default=0.5, help="majority ratio (square)")
    g.add_argument("--i", type=float, default=0.5, help="incorrect ratio (swiss)")
    g.add_argument("--e", type=float, default=0.0, help="extrinsic ratio (swiss)")
    g.add_argument("--grid", type=int, default=200)
    g.add_argument("--n", type=int, default=24, help="samples per arm and component (swiss)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--n-theta", type=int, default=32)
    g.add_argument("--equivariant", action="store_true", help="c4reg: make f exactly equivariant")
    g.add_argument("--n-classes", type=int, default=10)
    g.add_argument("--pairs", default="6,9", help="merge pairs, e.g. '6,9;2,5'")
    g.add_argument("--probs", default=None, help="comma-separated class probabilities")
    g.add_argument("--figures", action="store_true")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("audit", help="tag every (point, element) pair")
    a.add_argument("spec")
    a.add_argument("--tol", type=float, default=VECTOR_TOL)
    a.add_argument("--out")
    a.add_argument("--figures", action="store_true")
    a.set_defaults(func=cmd_audit)

    b = sub.add_parser("bound", help="error lower bounds")
    b.add_argument("spec")
    b.add_argument("--method", choices=[*METHOD_ALIASES, "all"], default="all")
    b.add_argument("--out")
    b.add_argument("--figures", action="store_true")
    b.set_defaults(func=cmd_bound)

    v = sub.add_parser("verify", help="check optimal predictors attain the bounds")
    v.add_argument("spec")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify, figures=False)

    r = sub.add_parser("rademacher", help="empirical Rademacher complexity tables")
    r.add_argument("--config", default="xor", help="'xor' or a JSON point-set file")
    r.add_argument("--cap", type=int, default=16)
    r.add_argument("--out")
    r.add_argument("--figures", action="store_true")
    r.set_defaults(func=cmd_rademacher)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EquiauditError as exc:
        print(f"equiaudit: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
