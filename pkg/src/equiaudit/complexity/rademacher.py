"""Empirical Rademacher complexity of affine threshold classifiers on tiny
point sets, optionally constrained to be invariant under a linear group
action on the coordinates.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ..errors import SpecError
from .simplex import feasible_point

EXHAUSTIVE_CAP = 16
MARGIN = Fraction(1, 10**9)
CONVENTIONS = ("correlation", "accuracy")


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray  # (m, d)
    group: Optional[np.ndarray] = None  # (k, d, d) linear action on coordinates
    labels: Optional[tuple[int, ...]] = None  # +1/-1, informational only
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise SpecError("points must be a non-empty list of vectors", "/points")
        if len({tuple(p) for p in pts.tolist()}) != pts.shape[0]:
            raise SpecError("points must be distinct", "/points")
        object.__setattr__(self, "points", pts)
        if self.group is not None:
            mats = np.asarray(self.group, dtype=float)
            d = pts.shape[1]
            if mats.ndim != 3 or mats.shape[1:] != (d, d):
                raise SpecError(f"group must be a list of {d}x{d} matrices", "/group")
            object.__setattr__(self, "group", mats)

    @property
    def m(self) -> int:
        return int(self.points.shape[0])


def _exact(matrix) -> list[list[Fraction]]:
    return [[Fraction(float(v)) for v in row] for row in np.atleast_2d(matrix)]


def invariant_features(points: PointSet) -> list[list[Fraction]]:
    """Project each point with the group average P = mean_g rho(g).

    An affine map w.x + b is invariant iff rho(g)^T w = w for all g, and those
    maps are exactly x -> w'.(P x) + b, so invariant classifiers of the
    original points are unconstrained classifiers of the projected points.
    """
    if points.group is None:
        raise SpecError("invariant constraint needs a group", "/group")
    mats = [_exact(g) for g in points.group]
    k = len(mats)
    d = points.points.shape[1]
    P = [[sum(g[i][j] for g in mats) / k for j in range(d)] for i in range(d)]
    X = _exact(points.points)
    return [[sum(P[i][j] * x[j] for j in range(d)) for i in range(d)] for x in X]


def is_separable(features: Sequence[Sequence[Fraction]], signs: Sequence[int], margin=MARGIN) -> bool:
    """Does an affine classifier put every point strictly on its sign's side?

    Solved as feasibility of sigma_i (w.x_i + b) - s_i = margin with w, b free
    (split into nonnegative parts) and slack s_i >= 0.
    """
    m = len(features)
    d = len(features[0])
    A, rhs = [], []
    for i, (x, s) in enumerate(zip(features, signs)):
        row = []
        for v in list(x) + [Fraction(1)]:
            row += [s * v, -s * v]
        slack = [Fraction(0)] * m
        slack[i] = Fraction(-1)
        A.append(row + slack)
        rhs.append(Fraction(margin))
    return feasible_point(A, rhs) is not None


def _patterns(m: int):
    # -1 before +1, first coordinate most significant
    return list(itertools.product((-1, 1), repeat=m))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("EQUIAUDIT_THREADS", "1")))
    except ValueError:
        return 1


def _feature_matrix(points: PointSet, constraint: str):
    if constraint == "none":
        return _exact(points.points)
    if constraint == "invariant":
        return invariant_features(points)
    raise SpecError(f"unknown constraint {constraint!r}", "/constraint")


def realizable_dichotomies(
    points: PointSet, constraint: str = "none", cap: int = EXHAUSTIVE_CAP, margin=MARGIN
) -> frozenset:
    if points.m > cap:
        raise SpecError(f"{points.m} points exceeds the exhaustive cap of {cap}", "/points")
    feats = _feature_matrix(points, constraint)
    pats = _patterns(points.m)
    workers = _workers()
    if workers > 1 and len(pats) >= 256:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            ok = list(pool.map(is_separable, [feats] * len(pats), pats, [margin] * len(pats), chunksize=32))
    else:
        ok = [is_separable(feats, s, margin) for s in pats]
    return frozenset(s for s, good in zip(pats, ok) if good)


@dataclass
class RademacherRow:
    sigma: tuple[int, ...]
    best_agreement: int
    correlation: Fraction
    accuracy: Fraction


@dataclass
class RademacherTable:
    constraint: str
    m: int
    rows: list[RademacherRow]
    realizable: int

    @property
    def correlation(self) -> Fraction:
        return sum((r.correlation for r in self.rows), Fraction(0)) / len(self.rows)

    @property
    def accuracy(self) -> Fraction:
        return sum((r.accuracy for r in self.rows), Fraction(0)) / len(self.rows)

    def value(self, convention: str) -> Fraction:
        if convention not in CONVENTIONS:
            raise SpecError(f"unknown convention {convention!r}", "/convention")
        return getattr(self, convention)

    @property
    def conventions_disagree(self) -> bool:
        return self.correlation != self.accuracy


def rademacher_table(points: PointSet, constraint: str = "none", cap: int = EXHAUSTIVE_CAP) -> RademacherTable:
    """Per sign vector, the best achievable agreement over the class.

    correlation = sup (1/m) sum sigma_i f(x_i) = (2a - m)/m for a agreements;
    accuracy = a/m.
    """
    real = realizable_dichotomies(points, constraint, cap)
    m = points.m
    rows = []
    for sigma in _patterns(m):
        a = max(sum(1 for s, t in zip(sigma, pat) if s == t) for pat in real)
        rows.append(RademacherRow(sigma, a, Fraction(2 * a - m, m), Fraction(a, m)))
    return RademacherTable(constraint, m, rows, len(real))


def empirical_rademacher(points: PointSet, constraint: str = "none", convention: str = "accuracy") -> Fraction:
    return rademacher_table(points, constraint).value(convention)
