"""Domain-spec JSON ingestion and canonical JSON / CSV report emission.

Canonical form: sorted keys, two-space indentation for objects, arrays on one
line, floats with 17 significant digits. Re-serializing a loaded file gives
the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import jsonschema
import numpy as np

from .bounds import BoundReport
from .domain import AuditReport, DomainSpec, Tag, TargetSpec
from .errors import SpecError
from .groups import (
    PermutationAction,
    Representation,
    build_group,
    identity_representation,
    rotation2d_representation,
)

SPEC_VERSION = 1

_NUM = {"type": "number"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUM}}

DOMAIN_SCHEMA = {
    "type": "object",
    "required": ["version", "density", "target", "group", "action"],
    "additionalProperties": False,
    "properties": {
        "version": {"const": SPEC_VERSION},
        "points": {"type": "array", "items": {"type": "array", "items": _NUM}},
        "density": {"type": "array", "minItems": 1, "items": {"type": "number", "minimum": 0}},
        "target": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["kind", "values"],
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"const": "labels"},
                        "values": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    },
                },
                {
                    "type": "object",
                    "required": ["kind", "dim", "values"],
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"const": "vectors"},
                        "dim": {"type": "integer", "minimum": 1},
                        "values": {"type": "array", "items": {"type": "array", "items": _NUM}},
                    },
                },
            ]
        },
        "group": {
            "type": "object",
            "required": ["kind", "n"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["cyclic", "dihedral", "explicit"]},
                "n": {"type": "integer", "minimum": 1},
                "compose": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            },
        },
        "action": {
            "type": "object",
            "required": ["kind", "perms"],
            "additionalProperties": False,
            "properties": {
                "kind": {"const": "permutation"},
                "perms": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
            },
        },
        "rep_y": {
            "type": "object",
            "required": ["kind", "dim"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["identity", "rotation2d", "explicit"]},
                "dim": {"type": "integer", "minimum": 1},
                "matrices": {"type": "array", "items": _MATRIX},
            },
        },
        "provenance": {"type": "object"},
    },
}


def _pointer(path: Iterable) -> str:
    return "".join(f"/{p}" for p in path)


def domain_from_json(doc: Any) -> DomainSpec:
    validator = jsonschema.Draft202012Validator(DOMAIN_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SpecError(err.message, _pointer(err.absolute_path) or "/")

    g = doc["group"]
    if g["kind"] == "explicit":
        if "compose" not in g:
            raise SpecError("explicit group requires 'compose'", "/group")
        if len(g["compose"]) != g["n"]:
            raise SpecError(f"compose has {len(g['compose'])} rows but n={g['n']}", "/group/compose")
    group = build_group(g["kind"], g["n"], g.get("compose"))
    action = PermutationAction.from_perms(group, doc["action"]["perms"])

    t = doc["target"]
    if t["kind"] == "labels":
        target = TargetSpec.labels(t["values"])
    else:
        if any(len(v) != t["dim"] for v in t["values"]):
            bad = next(i for i, v in enumerate(t["values"]) if len(v) != t["dim"])
            raise SpecError(f"vector has length {len(t['values'][bad])}, expected {t['dim']}", f"/target/values/{bad}")
        target = TargetSpec.vectors(np.asarray(t["values"], dtype=float).reshape(-1, t["dim"]), t["dim"])

    rep = None
    if "rep_y" in doc:
        r = doc["rep_y"]
        if r["kind"] == "identity":
            rep = identity_representation(group, r["dim"])
        elif r["kind"] == "rotation2d":
            if r["dim"] != 2:
                raise SpecError("rotation2d representation has dim 2", "/rep_y/dim")
            rep = rotation2d_representation(group)
        else:
            if "matrices" not in r:
                raise SpecError("explicit representation requires 'matrices'", "/rep_y")
            rep = Representation.from_matrices(group, r["matrices"])
            if rep.dim != r["dim"]:
                raise SpecError(f"matrices are {rep.dim}x{rep.dim}, declared dim {r['dim']}", "/rep_y/dim")

    coords = None
    if "points" in doc:
        if len(doc["points"]) != len(doc["density"]):
            raise SpecError("one point per density entry required", "/points")
        widths = {len(p) for p in doc["points"]}
        if len(widths) > 1:
            raise SpecError("points must share one dimension", "/points")
        coords = np.asarray(doc["points"], dtype=float)

    return DomainSpec(
        density=np.asarray(doc["density"], dtype=float),
        target=target,
        action=action,
        rep_y=rep,
        coordinates=coords,
        provenance=dict(doc.get("provenance", {})),
    )


def domain_to_json(domain: DomainSpec) -> dict:
    group = domain.group
    doc: dict = {
        "version": SPEC_VERSION,
        "density": domain.density.tolist(),
        "group": {"kind": group.kind, "n": int(group.n if group.n is not None else group.order)},
        "action": {"kind": "permutation", "perms": domain.action.table.tolist()},
    }
    if group.kind == "explicit":
        doc["group"]["compose"] = group.compose.tolist()
    if domain.target.kind == "labels":
        doc["target"] = {"kind": "labels", "values": domain.target.values.tolist()}
    else:
        doc["target"] = {"kind": "vectors", "dim": domain.target.dim, "values": domain.target.values.tolist()}
    if domain.rep_y is not None:
        rep = domain.rep_y
        doc["rep_y"] = {"kind": rep.kind, "dim": rep.dim}
        if rep.kind == "explicit":
            doc["rep_y"]["matrices"] = rep.matrices.tolist()
    if domain.coordinates is not None:
        doc["points"] = domain.coordinates.tolist()
    if domain.provenance:
        doc["provenance"] = domain.provenance
    return doc


def load_domain(path) -> DomainSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return domain_from_json(doc)


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Fraction):
        return fraction_str(obj)
    return obj


def _encode(obj, indent: int) -> str:
    obj = _plain(obj)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v, indent) for v in obj) + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        pad = "  " * (indent + 1)
        items = [f"{pad}{json.dumps(str(k))}: {_encode(obj[k], indent + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj) -> str:
    return _encode(obj, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(canonical_dumps(obj))


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _cell(v) -> str:
    v = _plain(v)
    if isinstance(v, float):
        return format_float(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(t) for t in v)
    return "" if v is None else str(v)


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))


# ---- report layouts ------------------------------------------------------

AUDIT_HEADER = ("point_index", "element_index", "tag")
BOUND_HEADER = (
    "representative",
    "size",
    "stabilizer_order",
    "mass",
    "dissent",
    "majority_label",
    "variance",
    "residual",
    "minimizer",
    "contribution",
)


def audit_summary(report: AuditReport, tol: float) -> dict:
    return {
        "n_points": int(report.tags.shape[0]),
        "order": int(report.tags.shape[1]),
        "tol": tol,
        "measures": {t.letter: float(report.exact_measures[t]) for t in Tag},
        "measures_exact": {t.letter: fraction_str(report.exact_measures[t]) for t in Tag},
        "counts": {t.letter: report.counts[t] for t in Tag},
    }


def bound_rows(report: BoundReport) -> list[list]:
    rows = []
    for s in report.per_orbit:
        minimizer = s.equi_minimizer if s.equi_minimizer is not None else s.orbit_mean
        rows.append(
            [
                s.representative,
                s.orbit.size,
                s.orbit.stabilizer_order,
                s.orbit_mass,
                s.dissent,
                s.majority_label,
                s.orbit_variance,
                s.equi_residual,
                None if minimizer is None else [float(v) for v in minimizer],
                s.contribution,
            ]
        )
    return rows


def bound_to_json(report: BoundReport) -> dict:
    doc = {
        "method": report.method,
        "total": report.total,
        "per_orbit": [dict(zip(BOUND_HEADER, row)) for row in bound_rows(report)],
    }
    if report.exact_total is not None:
        doc["total_exact"] = fraction_str(report.exact_total)
    return doc


def rademacher_rows(tables: dict) -> tuple[list[str], list[list]]:
    names = list(tables)
    header = ["sigma"]
    for name in names:
        header += [f"best_{name}", f"correlation_{name}", f"accuracy_{name}"]
    first = tables[names[0]]
    rows = []
    for k, r in enumerate(first.rows):
        row = [" ".join(f"{s:+d}" for s in r.sigma)]
        for name in names:
            rr = tables[name].rows[k]
            row += [rr.best_agreement, fraction_str(rr.correlation), fraction_str(rr.accuracy)]
        rows.append(row)
    return header, rows
