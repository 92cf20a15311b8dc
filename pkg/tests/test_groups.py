import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equiaudit.errors import GroupAxiomError, SpecError
from equiaudit.groups import (
    PermutationAction,
    Representation,
    build_group,
    coset_action,
    dihedral2d_representation,
    fundamental_domain,
    generated_subgroup,
    generating_set,
    identity_representation,
    orbit_index,
    orbits,
    regular_action,
    rotation2d_representation,
    trivial_action,
)

from strategies import random_action, random_group


def _is_group(G):
    n = G.order
    for a, b, c in itertools.product(range(n), repeat=3):
        if G.mul(G.mul(a, b), c) != G.mul(a, G.mul(b, c)):
            return False
    return all(G.mul(g, G.inv(g)) == 0 == G.mul(G.inv(g), g) for g in range(n))


@pytest.mark.parametrize("kind,n,order", [("cyclic", 1, 1), ("cyclic", 4, 4), ("cyclic", 7, 7), ("dihedral", 1, 2), ("dihedral", 4, 8)])
def test_builtin_groups_satisfy_axioms(kind, n, order):
    G = build_group(kind, n)
    assert G.order == order
    assert _is_group(G)


def test_dihedral_relations():
    n = 5
    G = build_group("dihedral", n)
    r, s = 1, n
    rk = 0
    for _ in range(n):
        rk = G.mul(rk, r)
    assert rk == 0
    assert G.mul(s, s) == 0
    # s r s = r^-1
    assert G.mul(G.mul(s, r), s) == G.inv(r)


def test_explicit_table_rejects_non_associative():
    # a Latin square with identity 0 that is not associative (order 5 loop)
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(GroupAxiomError) as info:
        build_group("explicit", compose=table)
    assert len(info.value.triple) == 3


def test_explicit_table_rejects_bad_identity():
    with pytest.raises(GroupAxiomError):
        build_group("explicit", compose=[[1, 0], [0, 1]])


def test_explicit_table_accepts_klein_four():
    table = [[a ^ b for b in range(4)] for a in range(4)]
    G = build_group("explicit", compose=table)
    assert [G.inv(g) for g in range(4)] == [0, 1, 2, 3]


@pytest.mark.parametrize("bad", [0, -3, 2.5])
def test_group_size_must_be_positive_integer(bad):
    with pytest.raises(SpecError):
        build_group("cyclic", bad)


@pytest.mark.parametrize("kind,n", [("cyclic", 6), ("dihedral", 3), ("dihedral", 4)])
def test_two_dimensional_reps_are_orthogonal_homomorphisms(kind, n):
    G = build_group(kind, n)
    rep = rotation2d_representation(G) if kind == "cyclic" else dihedral2d_representation(G)
    assert rep.orthogonal_flag
    for a, b in itertools.product(range(G.order), repeat=2):
        np.testing.assert_allclose(rep.matrix(G.mul(a, b)), rep.matrix(a) @ rep.matrix(b), atol=1e-12)
    for g in range(G.order):
        np.testing.assert_allclose(rep.inverse_matrix(g), rep.matrix(g).T, atol=1e-12)


def test_rotation_entries_snap_to_exact_values():
    rep = rotation2d_representation(build_group("cyclic", 4))
    assert rep.matrix(1).tolist() == [[0.0, -1.0], [1.0, 0.0]]


def test_rotation_rep_needs_cyclic_group():
    with pytest.raises(SpecError):
        rotation2d_representation(build_group("dihedral", 3))


def test_from_matrices_rejects_non_homomorphism():
    G = build_group("cyclic", 2)
    with pytest.raises(SpecError):
        Representation.from_matrices(G, [np.eye(2), 2 * np.eye(2)])


def test_skew_rep_is_not_orthogonal():
    G = build_group("cyclic", 4)
    A = np.array([[1.0, 0.5], [0.0, 1.0]])
    mats = A @ rotation2d_representation(G).matrices @ np.linalg.inv(A)
    rep = Representation.from_matrices(G, mats)
    assert not rep.orthogonal_flag
    assert identity_representation(G, 3).is_identity


def test_action_rejects_non_permutation():
    G = build_group("cyclic", 2)
    with pytest.raises(SpecError):
        PermutationAction.from_perms(G, [[0, 1], [0, 0]])


def test_action_rejects_non_identity_first_row():
    G = build_group("cyclic", 2)
    with pytest.raises(SpecError):
        PermutationAction.from_perms(G, [[1, 0], [0, 1]])


def test_action_rejects_incompatible_perms():
    G = build_group("cyclic", 3)
    # rows are permutations but g=2 is not g=1 applied twice
    with pytest.raises(SpecError):
        PermutationAction.from_perms(G, [[0, 1, 2], [1, 2, 0], [0, 2, 1]])


def test_generating_set_generates():
    for kind, n in [("cyclic", 8), ("dihedral", 4), ("dihedral", 6)]:
        G = build_group(kind, n)
        assert generated_subgroup(G, generating_set(G)) == list(range(G.order))


def test_regular_and_trivial_orbits():
    G = build_group("dihedral", 3)
    reg = orbits(regular_action(G))
    assert len(reg) == 1 and reg[0].stabilizer_order == 1
    triv = orbits(trivial_action(G, 4))
    assert [o.members for o in triv] == [(0,), (1,), (2,), (3,)]
    assert all(o.stabilizer_order == 6 for o in triv)


def test_coset_action_stabilizer_is_subgroup_size():
    G = build_group("dihedral", 4)
    H = generated_subgroup(G, [4])  # a reflection: order-2 subgroup
    act = coset_action(G, H)
    assert act.n_points == 4
    (orb,) = orbits(act)
    assert orb.stabilizer_order == 2
    assert orb.lift_factor(orb.representative, 3) == 0.5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_orbit_stabilizer_and_partition(seed):
    rng = np.random.default_rng(seed)
    G = random_group(rng)
    act = random_action(rng, G)
    orbs = orbits(act)
    members = sorted(x for o in orbs for x in o.members)
    assert members == list(range(act.n_points))
    for o in orbs:
        assert o.representative == min(o.members)
        assert o.size * o.stabilizer_order == G.order
        for x in o.members:
            fixed = sum(act.apply(g, x) == x for g in range(G.order))
            assert fixed == o.stabilizer_order
    idx = orbit_index(act, orbs)
    for g in range(G.order):
        assert np.array_equal(idx[act.table[g]], idx)
    assert fundamental_domain(orbs) == [o.representative for o in orbs]
