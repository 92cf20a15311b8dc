"""Error lower bounds for invariant classifiers and for invariant and
equivariant regressors over a finite group acting by permutations.

Classification quantities are computed exactly on the dyadic integer form of
the densities and converted to float at the end. Regression quantities are
float64 with a fixed ascending-index summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .domain import AuditReport, DomainSpec, Tag, audit
from .errors import DensityNotPreservedError, SingularQError, SpecError
from .groups import Orbit

SINGULAR_RTOL = 1e-12
PRESERVE_TOL = 1e-9

METHODS = (
    "classification",
    "classification_finite_special",
    "invariant_regression",
    "equivariant_regression",
    "equivariant_orthogonal",
)


@dataclass
class OrbitStatistics:
    orbit: Orbit
    representative: int
    orbit_mass: float
    positive_support: tuple[int, ...]
    dissent: Optional[float] = None
    majority_label: Optional[int] = None
    orbit_mean: Optional[np.ndarray] = None
    orbit_variance: Optional[float] = None
    q_matrix: Optional[np.ndarray] = None
    equi_minimizer: Optional[np.ndarray] = None
    equi_residual: Optional[float] = None
    contribution: float = 0.0
    exact_contribution: Optional[Fraction] = None


@dataclass
class BoundReport:
    method: str
    total: float
    per_orbit: list[OrbitStatistics] = field(default_factory=list)
    exact_total: Optional[Fraction] = None


def _positive(domain: DomainSpec, orbit: Orbit) -> tuple[int, ...]:
    p = domain.density
    return tuple(z for z in orbit.members if p[z] > 0)


def _label_masses(domain: DomainSpec, orbit: Orbit) -> tuple[int, dict[int, int]]:
    nums = domain.exact[0]
    labels = domain.target.values
    total, by_label = 0, {}
    for z in orbit.members:
        total += nums[z]
        if nums[z] > 0:
            y = int(labels[z])
            by_label[y] = by_label.get(y, 0) + nums[z]
    return total, by_label


def _dissent_numerator(domain: DomainSpec, orbit: Orbit) -> tuple[int, Optional[int]]:
    """Integer numerator of k(Gx) and the minimizing (majority) label."""
    total, by_label = _label_masses(domain, orbit)
    if not by_label:
        return 0, None
    # smallest label id wins ties
    best = min(by_label, key=lambda y: (total - by_label[y], y))
    return total - by_label[best], best


def total_dissent(domain: DomainSpec, orbit: Orbit) -> float:
    """min over labels y of the orbit mass carrying a label other than y."""
    domain.require_labels()
    num, _ = _dissent_numerator(domain, orbit)
    return float(domain.exact_mass(num))


def incorrect_set_sums(domain: DomainSpec, orbit: Orbit, report: AuditReport) -> dict[int, Fraction]:
    """For each x' in the positive support, sum_g p(gx') 1[(x',g) in I] / |G_x'|."""
    nums, _ = domain.exact
    table = domain.action.table
    out = {}
    for x in _positive(domain, orbit):
        row = report.tags[x]
        acc = 0
        for g in np.flatnonzero(row == Tag.INCORRECT).tolist():
            acc += nums[int(table[g, x])]
        out[x] = domain.exact_mass(acc) / orbit.stabilizer_order
    return out


def total_dissent_via_incorrect_set(
    domain: DomainSpec, orbit: Orbit, report: Optional[AuditReport] = None
) -> float:
    domain.require_labels()
    return float(_dissent_via_incorrect_exact(domain, orbit, report or audit(domain)))


def _dissent_via_incorrect_exact(domain, orbit, report) -> Fraction:
    sums = incorrect_set_sums(domain, orbit, report)
    return min(sums.values()) if sums else Fraction(0)


def _orbit_stats_base(domain: DomainSpec, orbit: Orbit, rep: Optional[int] = None) -> OrbitStatistics:
    positive = _positive(domain, orbit)
    mass = math.fsum(domain.density[list(orbit.members)])
    return OrbitStatistics(
        orbit=orbit,
        representative=orbit.representative if rep is None else rep,
        orbit_mass=mass,
        positive_support=positive,
    )


def classification_lower_bound(domain: DomainSpec) -> BoundReport:
    domain.require_labels()
    if not np.any(domain.density > 0):
        raise SpecError("density has empty support", "/density")
    rows, acc = [], 0
    for orb in domain.orbits:
        num, label = _dissent_numerator(domain, orb)
        acc += num
        stats = _orbit_stats_base(domain, orb)
        stats.dissent = float(domain.exact_mass(num))
        stats.majority_label = label
        stats.contribution = stats.dissent
        stats.exact_contribution = domain.exact_mass(num)
        rows.append(stats)
    exact = domain.exact_mass(acc)
    return BoundReport("classification", float(exact), rows, exact)


def classification_lower_bound_via_incorrect_set(
    domain: DomainSpec, report: Optional[AuditReport] = None
) -> BoundReport:
    """Same bound, with each orbit's dissent taken as the minimum over the
    positive support of the incorrect-set sums.
    """
    domain.require_labels()
    report = report or audit(domain)
    rows, acc = [], Fraction(0)
    for orb in domain.orbits:
        k = _dissent_via_incorrect_exact(domain, orb, report)
        acc += k
        stats = _orbit_stats_base(domain, orb)
        stats.dissent = float(k)
        stats.contribution = float(k)
        stats.exact_contribution = k
        rows.append(stats)
    return BoundReport("classification", float(acc), rows, acc)


def check_density_preserving(domain: DomainSpec, tol: float = PRESERVE_TOL) -> None:
    p = domain.density
    table = domain.action.table
    diff = np.abs(p[table] - p[None, :])
    if diff.max() > tol:
        g, x = np.argwhere(diff > tol)[0]
        raise DensityNotPreservedError(int(x), int(g), float(p[x]), float(p[table[g, x]]))


def classification_lower_bound_finite_special(domain: DomainSpec) -> BoundReport:
    """``total mass - sum_q q * c_q`` where ``q`` is the fraction of orbit
    points carrying the orbit's most frequent label and ``c_q`` the mass of
    points whose orbit has that fraction.
    """
    domain.require_labels()
    check_density_preserving(domain)
    nums, _ = domain.exact
    labels = domain.target.values
    mass_by_q: dict[Fraction, int] = {}
    rows = []
    for orb in domain.orbits:
        counts: dict[int, int] = {}
        for z in orb.members:
            counts[int(labels[z])] = counts.get(int(labels[z]), 0) + 1
        q = Fraction(max(counts.values()), orb.size)
        orbit_num = sum(nums[z] for z in orb.members)
        mass_by_q[q] = mass_by_q.get(q, 0) + orbit_num
        stats = _orbit_stats_base(domain, orb)
        stats.exact_contribution = domain.exact_mass(orbit_num) * (1 - q)
        stats.dissent = float(stats.exact_contribution)
        stats.contribution = stats.dissent
        rows.append(stats)
    # the total mass stands in for 1 so float densities summing to 1 +- ulp stay exact
    total_mass = domain.exact_mass(sum(nums))
    exact = total_mass - sum(q * domain.exact_mass(c) for q, c in sorted(mass_by_q.items()))
    return BoundReport("classification_finite_special", float(exact), rows, exact)


def orbit_mean_and_variance(domain: DomainSpec, orbit: Orbit) -> tuple[float, np.ndarray, float]:
    """Return (p(Gx), E_Gx[f], V_Gx[f]); mean is zeros and variance 0 on a massless orbit."""
    p = domain.density
    f = domain.target.values
    pos = list(_positive(domain, orbit))
    if not pos:
        return 0.0, np.zeros(f.shape[1]), 0.0
    w = p[pos]
    mass = math.fsum(w)
    mean = (w[:, None] * f[pos]).sum(axis=0) / mass
    var = math.fsum(w * np.sum((f[pos] - mean) ** 2, axis=1)) / mass
    return mass, mean, var


def invariant_regression_bound(domain: DomainSpec) -> BoundReport:
    domain.require_vectors()
    rows, parts = [], []
    for orb in domain.orbits:
        mass, mean, var = orbit_mean_and_variance(domain, orb)
        stats = _orbit_stats_base(domain, orb)
        stats.orbit_mean = mean
        stats.orbit_variance = var
        stats.contribution = mass * var
        parts.append(stats.contribution)
        rows.append(stats)
    return BoundReport("invariant_regression", math.fsum(parts), rows)


def _orbit_point(orbit: Orbit, x: Optional[int]) -> int:
    if x is None:
        return orbit.representative
    if x not in orbit.members:
        raise SpecError(f"point {x} is not in the orbit of {orbit.representative}")
    return x


def q_matrix(domain: DomainSpec, orbit: Orbit, x: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """Q_Gx and the per-element weight matrices q(gx), shape (order, n, n)."""
    domain.require_vectors(need_rep=True)
    x = _orbit_point(orbit, x)
    rho = domain.rep_y.matrices
    pg = domain.density[domain.action.table[:, x]]  # p(gx) for every g
    gram = np.einsum("gji,gjk->gik", rho, rho)  # rho^T rho
    weighted = pg[:, None, None] * gram / orbit.stabilizer_order
    Q = weighted.sum(axis=0)
    sv = np.linalg.svd(Q, compute_uv=False)
    if sv[0] == 0 or sv[-1] < SINGULAR_RTOL * sv[0]:
        raise SingularQError(orbit.representative, float(sv[-1]), float(sv[0]))
    q = np.linalg.solve(Q[None, :, :], weighted)
    return Q, q


def stabilized_values(domain: DomainSpec, x: int) -> np.ndarray:
    """rho(g)^{-1} f(gx) for every g, shape (order, n)."""
    rho_inv = domain.rep_y.matrices[domain.group.inverse]
    fg = domain.target.values[domain.action.table[:, x]]
    return np.einsum("gij,gj->gi", rho_inv, fg)


def equivariant_minimizer(domain: DomainSpec, orbit: Orbit, x: Optional[int] = None) -> tuple[np.ndarray, np.ndarray]:
    """(Q_Gx, E_G[f, x]) for the orbit, evaluated at base point ``x``."""
    x = _orbit_point(orbit, x)
    Q, q = q_matrix(domain, orbit, x)
    E = np.einsum("gij,gj->i", q, stabilized_values(domain, x))
    return Q, E


def _equi_residual(domain: DomainSpec, orbit: Orbit, x: int, base: np.ndarray) -> float:
    table = domain.action.table
    pg = domain.density[table[:, x]]
    fitted = np.einsum("gij,j->gi", domain.rep_y.matrices, base)
    resid = np.sum((domain.target.values[table[:, x]] - fitted) ** 2, axis=1)
    return math.fsum(pg * resid) / orbit.stabilizer_order


def _pick(orbit: Orbit, representatives: Optional[Sequence[int]], k: int) -> int:
    return orbit.representative if representatives is None else int(representatives[k])


def equivariant_regression_bound(
    domain: DomainSpec, representatives: Optional[Sequence[int]] = None
) -> BoundReport:
    """Per orbit, the weighted residual of f(gx) against rho(g) E_G[f, x].
    Orbits without mass contribute zero and are not inverted.
    """
    domain.require_vectors(need_rep=True)
    rows, parts = [], []
    for k, orb in enumerate(domain.orbits):
        x = _orbit_point(orb, _pick(orb, representatives, k))
        stats = _orbit_stats_base(domain, orb, x)
        if stats.orbit_mass > 0:
            Q, E = equivariant_minimizer(domain, orb, x)
            stats.q_matrix = Q
            stats.equi_minimizer = E
            stats.equi_residual = _equi_residual(domain, orb, x, E)
        else:
            stats.equi_minimizer = np.zeros(domain.target.dim)
            stats.equi_residual = 0.0
        stats.contribution = stats.equi_residual
        parts.append(stats.contribution)
        rows.append(stats)
    return BoundReport("equivariant_regression", math.fsum(parts), rows)


def equivariant_orthogonal_bound(
    domain: DomainSpec, representatives: Optional[Sequence[int]] = None
) -> BoundReport:
    """p(Gx) times the variance of the G-stabilized targets under the
    probability weights p(gx) / (|G_x| p(Gx)) on G.
    """
    domain.require_vectors(need_rep=True)
    if not domain.rep_y.orthogonal_flag:
        raise SpecError("equivariant_orthogonal needs an orthogonal rep_y", "/rep_y/matrices")
    rows, parts = [], []
    for k, orb in enumerate(domain.orbits):
        x = _orbit_point(orb, _pick(orb, representatives, k))
        stats = _orbit_stats_base(domain, orb, x)
        if stats.orbit_mass > 0:
            pg = domain.density[domain.action.table[:, x]]
            weights = pg / (orb.stabilizer_order * stats.orbit_mass)
            fx = stabilized_values(domain, x)
            mean = (weights[:, None] * fx).sum(axis=0)
            var = math.fsum(weights * np.sum((fx - mean) ** 2, axis=1))
            stats.equi_minimizer = mean
            stats.orbit_variance = var
            stats.contribution = stats.orbit_mass * var
        else:
            stats.equi_minimizer = np.zeros(domain.target.dim)
            stats.orbit_variance = 0.0
        parts.append(stats.contribution)
        rows.append(stats)
    return BoundReport("equivariant_orthogonal", math.fsum(parts), rows)


def applicable_methods(domain: DomainSpec) -> list[str]:
    if domain.target.kind == "labels":
        methods = ["classification"]
        try:
            check_density_preserving(domain)
            methods.append("classification_finite_special")
        except DensityNotPreservedError:
            pass
        return methods
    methods = ["invariant_regression"]
    if domain.rep_y is not None:
        methods.append("equivariant_regression")
        if domain.rep_y.orthogonal_flag:
            methods.append("equivariant_orthogonal")
    return methods


def compute_bound(domain: DomainSpec, method: str) -> BoundReport:
    dispatch = {
        "classification": classification_lower_bound,
        "classification_finite_special": classification_lower_bound_finite_special,
        "invariant_regression": invariant_regression_bound,
        "equivariant_regression": equivariant_regression_bound,
        "equivariant_orthogonal": equivariant_orthogonal_bound,
    }
    if method not in dispatch:
        raise SpecError(f"unknown bound method {method!r}")
    return dispatch[method](domain)
