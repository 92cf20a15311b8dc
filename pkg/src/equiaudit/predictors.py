"""Optimal symmetric predictors as per-orbit lookup tables, and their error.

The tables realize the bounds in ``bounds``: majority label per orbit,
orbit mean per orbit, and the equivariant minimizer at a base point expanded
along the orbit by rho_Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .bounds import _dissent_numerator, equivariant_minimizer, orbit_mean_and_variance
from .domain import DomainSpec
from .errors import SpecError

KINDS = ("invariant_labels", "invariant_vectors", "equivariant_vectors")


@dataclass(frozen=True, eq=False)
class PredictorTable:
    kind: str
    orbit_values: dict  # representative -> label or base vector
    point_values: np.ndarray  # output at every point

    def __call__(self, i: int):
        return self.point_values[i]

    def to_json(self) -> dict:
        def enc(v):
            return int(v) if self.kind == "invariant_labels" else [float(t) for t in v]

        return {
            "kind": self.kind,
            "orbit_values": [{"representative": int(r), "value": enc(v)} for r, v in self.orbit_values.items()],
            "point_values": [enc(v) for v in self.point_values],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PredictorTable":
        kind = doc["kind"]
        if kind not in KINDS:
            raise SpecError(f"unknown predictor kind {kind!r}", "/kind")
        if kind == "invariant_labels":
            pts = np.asarray(doc["point_values"], dtype=np.int64)
            orbit_values = {int(r["representative"]): int(r["value"]) for r in doc["orbit_values"]}
        else:
            pts = np.asarray(doc["point_values"], dtype=float)
            orbit_values = {int(r["representative"]): np.asarray(r["value"], dtype=float) for r in doc["orbit_values"]}
        return cls(kind, orbit_values, pts)


def build_majority_classifier(domain: DomainSpec) -> PredictorTable:
    domain.require_labels()
    labels = domain.target.values
    out = np.empty(domain.n_points, dtype=np.int64)
    chosen = {}
    for orb in domain.orbits:
        _, label = _dissent_numerator(domain, orb)
        if label is None:  # massless orbit: any label is optimal
            label = int(min(labels[list(orb.members)]))
        out[list(orb.members)] = label
        chosen[orb.representative] = label
    return PredictorTable("invariant_labels", chosen, out)


def build_orbit_mean_regressor(domain: DomainSpec) -> PredictorTable:
    domain.require_vectors()
    out = np.zeros_like(domain.target.values)
    chosen = {}
    for orb in domain.orbits:
        _, mean, _ = orbit_mean_and_variance(domain, orb)
        out[list(orb.members)] = mean
        chosen[orb.representative] = mean
    return PredictorTable("invariant_vectors", chosen, out)


def build_equivariant_regressor(domain: DomainSpec) -> PredictorTable:
    domain.require_vectors(need_rep=True)
    rho = domain.rep_y.matrices
    table = domain.action.table
    out = np.zeros_like(domain.target.values)
    chosen = {}
    for orb in domain.orbits:
        x = orb.representative
        if math.fsum(domain.density[list(orb.members)]) > 0:
            _, base = equivariant_minimizer(domain, orb, x)
        else:
            base = np.zeros(domain.target.dim)
        # h(gx) = rho(g) h(x); every g reaching a member gives the same value
        # when the stabilizer acts trivially on the base, so write in element order
        for g in range(domain.group.order):
            out[table[g, x]] = rho[g] @ base
        chosen[x] = base
    return PredictorTable("equivariant_vectors", chosen, out)


def empirical_error_exact(domain: DomainSpec, predictor: PredictorTable) -> Fraction:
    if predictor.kind != "invariant_labels" or domain.target.kind != "labels":
        raise SpecError("exact error is defined for label predictors only")
    nums, _ = domain.exact
    wrong = np.flatnonzero(predictor.point_values != domain.target.values).tolist()
    return domain.exact_mass(sum(nums[i] for i in wrong))


def empirical_error(domain: DomainSpec, predictor: PredictorTable) -> float:
    """Classification error rate or mean squared L2 error under p."""
    if predictor.kind == "invariant_labels":
        if domain.target.kind != "labels":
            raise SpecError("label predictor applied to vector targets")
        return float(empirical_error_exact(domain, predictor))
    if domain.target.kind != "vectors":
        raise SpecError("vector predictor applied to label targets")
    if predictor.point_values.shape != domain.target.values.shape:
        raise SpecError("predictor table does not match the domain's shape")
    sq = np.sum((predictor.point_values - domain.target.values) ** 2, axis=1)
    return math.fsum(domain.density * sq)


def predictor_violations(domain: DomainSpec, predictor: PredictorTable, tol: float = 1e-9) -> list:
    """Pairs (x, g) where the table breaks invariance or equivariance."""
    table = domain.action.table
    vals = predictor.point_values
    bad = []
    for g in range(domain.group.order):
        moved = vals[table[g]]
        if predictor.kind == "invariant_labels":
            diff = moved != vals
        elif predictor.kind == "invariant_vectors":
            diff = np.max(np.abs(moved - vals), axis=1) > tol
        else:
            expect = vals @ domain.rep_y.matrices[g].T
            diff = np.max(np.abs(moved - expect), axis=1) > tol
        bad.extend((int(x), g) for x in np.flatnonzero(diff))
    return bad


def optimal_predictors(domain: DomainSpec) -> dict[str, PredictorTable]:
    if domain.target.kind == "labels":
        return {"classification": build_majority_classifier(domain)}
    out = {"invariant_regression": build_orbit_mean_regressor(domain)}
    if domain.rep_y is not None:
        out["equivariant_regression"] = build_equivariant_regressor(domain)
    return out
