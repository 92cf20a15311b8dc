"""Discretized tasks (points, density, targets, action) and the pointwise
correct / incorrect / extrinsic / undefined audit of X x G.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional

import numpy as np

from .errors import SpecError
from .groups import Orbit, PermutationAction, Representation, orbit_index, orbits

DENSITY_TOL = 1e-9
VECTOR_TOL = 1e-9


class Tag(enum.IntEnum):
    CORRECT = 0
    INCORRECT = 1
    EXTRINSIC = 2
    UNDEFINED = 3

    @property
    def letter(self) -> str:
        return self.name[0]


@dataclass(frozen=True, eq=False)
class TargetSpec:
    kind: str  # "labels" | "vectors"
    values: np.ndarray

    @classmethod
    def labels(cls, values) -> "TargetSpec":
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise SpecError("labels must be a flat list", "/target/values")
        if arr.size and (not np.all(np.equal(np.mod(arr, 1), 0)) or arr.min() < 0):
            raise SpecError("labels must be nonnegative integers", "/target/values")
        arr = arr.astype(np.int64)
        arr.setflags(write=False)
        return cls("labels", arr)

    @classmethod
    def vectors(cls, values, dim: Optional[int] = None) -> "TargetSpec":
        arr = np.array(values, dtype=float)
        if arr.ndim != 2:
            raise SpecError("vector targets must be a list of equal-length vectors", "/target/values")
        if dim is not None and arr.shape[1] != dim:
            raise SpecError(f"vector targets have dim {arr.shape[1]}, declared {dim}", "/target/dim")
        if not np.all(np.isfinite(arr)):
            raise SpecError("vector targets must be finite", "/target/values")
        arr.setflags(write=False)
        return cls("vectors", arr)

    @property
    def dim(self) -> Optional[int]:
        return int(self.values.shape[1]) if self.kind == "vectors" else None

    def __len__(self) -> int:
        return int(self.values.shape[0])


def dyadic_masses(density: np.ndarray) -> tuple[list[int], int]:
    """Write every float density exactly as ``num / 2**shift`` with a shared
    shift, so that all classification sums are exact integer arithmetic.
    """
    ratios = [float(p).as_integer_ratio() for p in density]
    shift = max(d.bit_length() - 1 for _, d in ratios) if ratios else 0
    return [n << (shift - (d.bit_length() - 1)) for n, d in ratios], shift


@dataclass(frozen=True, eq=False)
class DomainSpec:
    density: np.ndarray
    target: TargetSpec
    action: PermutationAction
    rep_y: Optional[Representation] = None
    coordinates: Optional[np.ndarray] = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.density, dtype=float)
        if p.ndim != 1 or p.size < 1:
            raise SpecError("density must be a non-empty list", "/density")
        if not np.all(np.isfinite(p)) or p.min() < 0:
            bad = int(np.flatnonzero(~np.isfinite(p) | (p < 0))[0])
            raise SpecError("density entries must be finite and nonnegative", f"/density/{bad}")
        if abs(float(np.sum(p)) - 1.0) > DENSITY_TOL:
            raise SpecError(f"density sums to {float(np.sum(p))!r}, expected 1", "/density")
        if len(self.target) != p.size:
            raise SpecError(f"target has {len(self.target)} entries for {p.size} points", "/target/values")
        if self.action.n_points != p.size:
            raise SpecError(
                f"action permutes {self.action.n_points} points but domain has {p.size}", "/action/perms"
            )
        if self.rep_y is not None:
            if self.rep_y.group is not self.action.group:
                raise SpecError("rep_y must be defined on the action's group", "/rep_y")
            if self.target.kind == "vectors" and self.rep_y.dim != self.target.dim:
                raise SpecError(
                    f"rep_y has dim {self.rep_y.dim} but targets have dim {self.target.dim}", "/rep_y/dim"
                )
        if self.coordinates is not None:
            coords = np.asarray(self.coordinates, dtype=float)
            if coords.ndim != 2 or coords.shape[0] != p.size:
                raise SpecError("coordinates must list one vector per point", "/points")
            object.__setattr__(self, "coordinates", coords)
        p.setflags(write=False)
        object.__setattr__(self, "density", p)

    @property
    def n_points(self) -> int:
        return int(self.density.size)

    @property
    def group(self):
        return self.action.group

    @cached_property
    def orbits(self) -> list[Orbit]:
        return orbits(self.action)

    @cached_property
    def orbit_of(self) -> np.ndarray:
        return orbit_index(self.action, self.orbits)

    @cached_property
    def exact(self) -> tuple[list[int], int]:
        return dyadic_masses(self.density)

    def exact_mass(self, num: int) -> Fraction:
        return Fraction(num, 1 << self.exact[1])

    def require_labels(self):
        if self.target.kind != "labels":
            raise SpecError("operation needs label targets; use the regression bounds", "/target/kind")

    def require_vectors(self, need_rep: bool = False):
        if self.target.kind != "vectors":
            raise SpecError("operation needs vector targets", "/target/kind")
        if need_rep and self.rep_y is None:
            raise SpecError("operation needs an output representation rep_y", "/rep_y")


def classify_pair(domain: DomainSpec, x: int, g: int, tol: float = VECTOR_TOL) -> Tag:
    p = domain.density
    if domain.target.kind == "vectors" and domain.rep_y is None:
        raise SpecError("vector targets need rep_y to audit equivariance", "/rep_y")
    if p[x] == 0:
        return Tag.UNDEFINED
    gx = domain.action.apply(g, x)
    if p[gx] == 0:
        return Tag.EXTRINSIC
    f = domain.target.values
    if domain.target.kind == "labels":
        ok = f[gx] == f[x]
    else:
        ok = np.max(np.abs(f[gx] - domain.rep_y.matrix(g) @ f[x])) <= tol
    return Tag.CORRECT if ok else Tag.INCORRECT


@dataclass(frozen=True, eq=False)
class AuditReport:
    tags: np.ndarray  # (n_points, order) of Tag codes
    exact_measures: dict  # Tag -> Fraction
    counts: dict  # Tag -> number of pairs

    @property
    def measures(self) -> dict:
        return {t: float(m) for t, m in self.exact_measures.items()}

    def tag(self, x: int, g: int) -> Tag:
        return Tag(int(self.tags[x, g]))

    def rows(self):
        n, order = self.tags.shape
        for x in range(n):
            for g in range(order):
                yield x, g, Tag(int(self.tags[x, g])).letter


def audit(domain: DomainSpec, tol: float = VECTOR_TOL) -> AuditReport:
    """Tag every (point, element) pair and integrate the tags against
    p(x) x uniform(G). Sums run in ascending point order on exact masses.
    """
    if domain.target.kind == "vectors" and domain.rep_y is None:
        raise SpecError("vector targets need rep_y to audit equivariance", "/rep_y")
    p = domain.density
    img = domain.action.table.T  # img[x, g] = gx
    f = domain.target.values
    if domain.target.kind == "labels":
        agree = f[img] == f[:, None]
    else:
        moved = np.einsum("gij,xj->xgi", domain.rep_y.matrices, f)
        agree = np.max(np.abs(f[img] - moved), axis=2) <= tol
    tags = np.where(agree, Tag.CORRECT, Tag.INCORRECT).astype(np.int8)
    tags[p[img] == 0] = Tag.EXTRINSIC
    tags[p == 0, :] = Tag.UNDEFINED

    nums, shift = domain.exact
    order = domain.group.order
    per_point = {t: np.count_nonzero(tags == t, axis=1) for t in Tag}
    exact_measures = {}
    for t in Tag:
        acc = 0
        for num, cnt in zip(nums, per_point[t].tolist()):
            acc += num * cnt
        exact_measures[t] = Fraction(acc, order << shift)
    counts = {t: int(per_point[t].sum()) for t in Tag}
    tags.setflags(write=False)
    return AuditReport(tags, exact_measures, counts)
