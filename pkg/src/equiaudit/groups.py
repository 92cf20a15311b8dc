"""Finite groups given by explicit tables, their matrix representations and
permutation actions on finite point sets.

Element 0 is always the identity. Cyclic groups index ``r^k`` as ``k``;
dihedral groups of order ``2n`` index ``r^k s^f`` as ``f*n + k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import GroupAxiomError, SpecError

MATRIX_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    compose: np.ndarray
    inverse: np.ndarray
    kind: str = "explicit"
    n: Optional[int] = None

    @property
    def order(self) -> int:
        return int(self.compose.shape[0])

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return int(self.compose[a, b])

    def inv(self, g: int) -> int:
        return int(self.inverse[g])

    def elements(self):
        return range(self.order)

    @classmethod
    def from_table(cls, compose, kind="explicit", n=None) -> "FiniteGroup":
        table = np.asarray(compose)
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] < 1:
            raise GroupAxiomError("composition table must be a non-empty square array")
        if not np.issubdtype(table.dtype, np.integer):
            if not np.all(np.equal(np.mod(table, 1), 0)):
                raise GroupAxiomError("composition table entries must be integers")
        table = table.astype(np.int64)
        order = table.shape[0]
        if table.min() < 0 or table.max() >= order:
            bad = np.argwhere((table < 0) | (table >= order))[0]
            raise GroupAxiomError(
                f"entry compose[{bad[0]}][{bad[1]}] out of range", triple=(int(bad[0]), int(bad[1]), None)
            )
        inverse = _check_axioms(table)
        table.setflags(write=False)
        inverse.setflags(write=False)
        return cls(table, inverse, kind, n)


def _check_axioms(table: np.ndarray) -> np.ndarray:
    order = table.shape[0]
    idx = np.arange(order)
    for g in idx:
        if table[0, g] != g or table[g, 0] != g:
            raise GroupAxiomError(
                f"element 0 is not an identity: compose(0,{g})={table[0, g]}, compose({g},0)={table[g, 0]}",
                triple=(0, int(g), None),
            )
    # associativity, one left factor at a time to bound memory at order^2
    for a in idx:
        lhs = table[table[a, :], :]  # (ab)c indexed [b, c]
        rhs = table[a, table]  # a(bc)
        if not np.array_equal(lhs, rhs):
            b, c = np.argwhere(lhs != rhs)[0]
            raise GroupAxiomError(
                f"associativity fails for triple ({a}, {b}, {c})", triple=(int(a), int(b), int(c))
            )
    inverse = np.empty(order, dtype=np.int64)
    for g in idx:
        hits = np.flatnonzero(table[g] == 0)
        if hits.size != 1 or table[hits[0], g] != 0:
            raise GroupAxiomError(f"element {g} has no two-sided inverse", triple=(int(g), None, None))
        inverse[g] = hits[0]
    return inverse


def build_group(kind: str, n: Optional[int] = None, compose=None) -> FiniteGroup:
    """Construct a cyclic group ``C_n``, a dihedral group ``D_n`` (order 2n)
    or a group from an explicit composition table.
    """
    if kind == "explicit":
        if compose is None:
            raise SpecError("explicit group requires a composition table", "/group/compose")
        return FiniteGroup.from_table(compose, kind="explicit", n=len(compose))
    if n is None or int(n) != n or n < 1:
        raise SpecError(f"group size must be a positive integer, got {n!r}", "/group/n")
    n = int(n)
    if kind == "cyclic":
        k = np.arange(n)
        table = (k[:, None] + k[None, :]) % n
    elif kind == "dihedral":
        # r^a s^f * r^b s^h = r^(a + (-1)^f b) s^(f+h)
        elems = [(f, a) for f in (0, 1) for a in range(n)]
        table = np.empty((2 * n, 2 * n), dtype=np.int64)
        for i, (f, a) in enumerate(elems):
            for j, (h, b) in enumerate(elems):
                rot = (a + (b if f == 0 else -b)) % n
                table[i, j] = ((f + h) % 2) * n + rot
    else:
        raise SpecError(f"unknown group kind {kind!r}", "/group/kind")
    return FiniteGroup.from_table(table, kind=kind, n=n)


@dataclass(frozen=True, eq=False)
class Representation:
    group: FiniteGroup
    matrices: np.ndarray  # (order, dim, dim)
    kind: str = "explicit"

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[1])

    @cached_property
    def orthogonal_flag(self) -> bool:
        eye = np.eye(self.dim)
        gram = np.einsum("gji,gjk->gik", self.matrices, self.matrices)
        return bool(np.all(np.abs(gram - eye) <= MATRIX_TOL))

    @cached_property
    def is_identity(self) -> bool:
        return bool(np.all(np.abs(self.matrices - np.eye(self.dim)) <= MATRIX_TOL))

    def matrix(self, g: int) -> np.ndarray:
        return self.matrices[g]

    def inverse_matrix(self, g: int) -> np.ndarray:
        return self.matrices[self.group.inverse[g]]

    @classmethod
    def from_matrices(cls, group: FiniteGroup, matrices, kind: str = "explicit") -> "Representation":
        mats = np.array(matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[0] != group.order or mats.shape[1] != mats.shape[2]:
            raise SpecError(
                f"expected {group.order} square matrices, got array of shape {mats.shape}",
                "/rep_y/matrices",
            )
        if not np.all(np.isfinite(mats)):
            raise SpecError("representation matrices must be finite", "/rep_y/matrices")
        dim = mats.shape[1]
        if np.max(np.abs(mats[0] - np.eye(dim))) > MATRIX_TOL:
            raise SpecError("identity element must map to the identity matrix", "/rep_y/matrices/0")
        products = np.einsum("gij,hjk->ghik", mats, mats)
        expected = mats[group.compose]
        diff = np.abs(products - expected).max(axis=(2, 3))
        if diff.max() > MATRIX_TOL:
            g, h = np.argwhere(diff > MATRIX_TOL)[0]
            raise SpecError(
                f"not a homomorphism: rho({g})rho({h}) != rho({group.compose[g, h]})",
                "/rep_y/matrices",
            )
        mats.setflags(write=False)
        return cls(group, mats, kind)


def _snap(values: np.ndarray) -> np.ndarray:
    # cos/sin of multiples of pi/2 should be exact
    out = values.copy()
    for target in (-1.0, -0.5, 0.0, 0.5, 1.0):
        out[np.abs(out - target) < 1e-15] = target
    return out


def _rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return _snap(np.array([[c, -s], [s, c]]))


def rotation2d_representation(group: FiniteGroup) -> Representation:
    """``r^k`` acts on R^2 as rotation by ``2*pi*k/n``."""
    if group.kind != "cyclic":
        raise SpecError("rotation2d representation requires a cyclic group", "/rep_y/kind")
    n = group.order
    mats = np.stack([_rotation(2 * math.pi * k / n) for k in range(n)])
    return Representation.from_matrices(group, mats, kind="rotation2d")


def dihedral2d_representation(group: FiniteGroup) -> Representation:
    """Rotations by ``2*pi*k/n`` composed with the reflection ``diag(1, -1)``."""
    if group.kind != "dihedral":
        raise SpecError("dihedral2d representation requires a dihedral group", "/rep_y/kind")
    n = group.n
    flip = np.diag([1.0, -1.0])
    mats = [_rotation(2 * math.pi * k / n) @ np.linalg.matrix_power(flip, f) for f in (0, 1) for k in range(n)]
    return Representation.from_matrices(group, np.stack(mats))


def identity_representation(group: FiniteGroup, dim: int) -> Representation:
    if dim < 1:
        raise SpecError(f"representation dimension must be positive, got {dim}", "/rep_y/dim")
    mats = np.broadcast_to(np.eye(dim), (group.order, dim, dim))
    return Representation.from_matrices(group, mats, kind="identity")


@dataclass(frozen=True, eq=False)
class PermutationAction:
    group: FiniteGroup
    table: np.ndarray  # (order, n_points); table[g, i] = index of g·x_i

    @property
    def n_points(self) -> int:
        return int(self.table.shape[1])

    def apply(self, g: int, i: int) -> int:
        return int(self.table[g, i])

    @classmethod
    def from_perms(cls, group: FiniteGroup, perms) -> "PermutationAction":
        table = np.array(perms)
        if table.ndim != 2 or table.shape[0] != group.order or table.shape[1] < 1:
            raise SpecError(
                f"expected {group.order} permutations, got array of shape {table.shape}", "/action/perms"
            )
        table = table.astype(np.int64)
        n = table.shape[1]
        ref = np.arange(n)
        for g in range(group.order):
            if not np.array_equal(np.sort(table[g]), ref):
                raise SpecError(f"row {g} is not a permutation of 0..{n - 1}", f"/action/perms/{g}")
        if not np.array_equal(table[0], ref):
            raise SpecError("identity element must act trivially", "/action/perms/0")
        # table[gh][i] == table[g][table[h][i]]; elements satisfying this for
        # every h are closed under products, so generators suffice
        for g in generating_set(group):
            lhs = table[group.compose[g]]  # (order_h, n)
            rhs = table[g][table]  # (order_h, n)
            if not np.array_equal(lhs, rhs):
                h, i = np.argwhere(lhs != rhs)[0]
                raise SpecError(
                    f"action incompatible with group law at g={g}, h={h}, point {i}", "/action/perms"
                )
        table.setflags(write=False)
        return cls(group, table)


def trivial_action(group: FiniteGroup, n_points: int) -> PermutationAction:
    return PermutationAction.from_perms(group, np.tile(np.arange(n_points), (group.order, 1)))


def regular_action(group: FiniteGroup) -> PermutationAction:
    """Left multiplication of the group on itself."""
    return PermutationAction.from_perms(group, group.compose)


def coset_action(group: FiniteGroup, subgroup: Sequence[int]) -> PermutationAction:
    """Action of ``group`` on the left cosets ``gH`` of ``subgroup``."""
    members = sorted(set(int(h) for h in subgroup))
    cosets: list[frozenset] = []
    lookup: dict[int, int] = {}
    for g in range(group.order):
        if g in lookup:
            continue
        coset = frozenset(int(group.compose[g, h]) for h in members)
        for x in coset:
            lookup[x] = len(cosets)
        cosets.append(coset)
    rep = [min(c) for c in cosets]
    perms = [[lookup[int(group.compose[g, r])] for r in rep] for g in range(group.order)]
    return PermutationAction.from_perms(group, perms)


def generating_set(group: FiniteGroup) -> list[int]:
    gens: list[int] = []
    covered = {0}
    for g in range(group.order):
        if g not in covered:
            gens.append(g)
            covered = set(generated_subgroup(group, gens))
    return gens


def generated_subgroup(group: FiniteGroup, generators: Sequence[int]) -> list[int]:
    found = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for s in generators:
            y = int(group.compose[x, s])
            if y not in found:
                found.add(y)
                frontier.append(y)
    return sorted(found)


def disjoint_union(actions: Sequence[PermutationAction]) -> PermutationAction:
    group = actions[0].group
    blocks, offset = [], 0
    for act in actions:
        if act.group is not group:
            raise SpecError("actions must share a group")
        blocks.append(act.table + offset)
        offset += act.n_points
    return PermutationAction.from_perms(group, np.concatenate(blocks, axis=1))


def relabel(action: PermutationAction, new_index: Sequence[int]) -> PermutationAction:
    """Rename point ``i`` to ``new_index[i]``."""
    sigma = np.asarray(new_index, dtype=np.int64)
    inv = np.argsort(sigma)
    return PermutationAction.from_perms(action.group, sigma[action.table[:, inv]])


@dataclass(frozen=True)
class Orbit:
    representative: int
    members: tuple[int, ...]
    stabilizer_order: int

    @property
    def size(self) -> int:
        return len(self.members)

    def lift_factor(self, member: int, g: int) -> float:
        """The discrete Jacobian weight 1/|G_x|; identical for every member and g."""
        return 1.0 / self.stabilizer_order


def orbits(action: PermutationAction) -> list[Orbit]:
    """Orbits ordered by representative, the minimal member index."""
    seen = np.zeros(action.n_points, dtype=bool)
    out = []
    for i in range(action.n_points):
        if seen[i]:
            continue
        images = action.table[:, i]
        members = np.unique(images)
        seen[members] = True
        stab = int(np.count_nonzero(images == i))
        out.append(Orbit(i, tuple(int(m) for m in members), stab))
    return out


def orbit_index(action: PermutationAction, orbit_list: Optional[Sequence[Orbit]] = None) -> np.ndarray:
    """Map each point to the position of its orbit in ``orbit_list``."""
    orbit_list = orbits(action) if orbit_list is None else orbit_list
    idx = np.empty(action.n_points, dtype=np.int64)
    for k, orb in enumerate(orbit_list):
        idx[list(orb.members)] = k
    return idx


def fundamental_domain(orbit_list: Sequence[Orbit]) -> list[int]:
    return [orb.representative for orb in orbit_list]
