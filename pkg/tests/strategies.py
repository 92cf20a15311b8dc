"""Random small instances shared by the property, oracle and acceptance tests.

Instances are disjoint unions of coset actions (every transitive action is one)
with shuffled point indices and dyadic densities k / 2**10, so float sums
are exact and classification results can be compared with ``==``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from equiaudit.domain import DomainSpec, TargetSpec
from equiaudit.groups import (
    Representation,
    build_group,
    coset_action,
    dihedral2d_representation,
    disjoint_union,
    generated_subgroup,
    identity_representation,
    orbits,
    relabel,
    rotation2d_representation,
)

MAX_POINTS = 12
DYADIC = 2**10
GROUP_CHOICES = [("cyclic", n) for n in range(1, 9)] + [("dihedral", n) for n in range(1, 5)]


def random_group(rng):
    kind, n = GROUP_CHOICES[rng.integers(len(GROUP_CHOICES))]
    return build_group(kind, n)


def random_action(rng, group, max_points=MAX_POINTS):
    blocks, used = [], 0
    while True:
        gens = rng.choice(group.order, size=rng.integers(0, 3), replace=True).tolist()
        act = coset_action(group, generated_subgroup(group, gens))
        if used + act.n_points > max_points:
            if blocks:
                break
            continue
        blocks.append(act)
        used += act.n_points
        if rng.random() < 0.35:
            break
    action = disjoint_union(blocks)
    return relabel(action, rng.permutation(action.n_points))


def dyadic_density(rng, n, zero_prob=0.25):
    """Nonnegative multiples of 1/1024 summing to exactly 1."""
    while True:
        alive = rng.random(n) >= zero_prob
        if alive.any():
            break
    weights = np.zeros(n, dtype=np.int64)
    cuts = np.sort(rng.integers(0, DYADIC + 1, size=int(alive.sum()) - 1))
    weights[alive] = np.diff(np.concatenate([[0], cuts, [DYADIC]]))
    return weights / DYADIC


def preserving_density(rng, action, orbit_list):
    """Constant on each orbit, so p(gx) = p(x) everywhere."""
    shares = dyadic_density(rng, len(orbit_list), zero_prob=0.2)
    p = np.zeros(action.n_points)
    for share, orb in zip(shares, orbit_list):
        p[list(orb.members)] = share / orb.size
    return p


def random_rep(rng, group, style):
    if style == "identity":
        return identity_representation(group, 2)
    base = rotation2d_representation(group) if group.kind == "cyclic" else dihedral2d_representation(group)
    if style == "orthogonal":
        return base
    # a non-orthogonal conjugate A R A^-1 of the orthogonal rep
    A = np.eye(2) + rng.uniform(-0.6, 0.6, size=(2, 2))
    while abs(np.linalg.det(A)) < 0.2:
        A = np.eye(2) + rng.uniform(-0.6, 0.6, size=(2, 2))
    mats = A[None] @ base.matrices @ np.linalg.inv(A)[None]
    return Representation.from_matrices(group, mats)


def random_label_domain(seed, preserving=False, n_labels=3):
    rng = np.random.default_rng(seed)
    group = random_group(rng)
    action = random_action(rng, group)
    n = action.n_points
    labels = rng.integers(0, n_labels, size=n)
    if preserving:
        p = preserving_density(rng, action, orbits(action))
    else:
        p = dyadic_density(rng, n)
    return DomainSpec(p, TargetSpec.labels(labels), action)


def random_vector_domain(seed, style=None):
    """Targets in R^2; style is identity, orthogonal or skew (non-orthogonal rep)."""
    rng = np.random.default_rng(seed)
    group = random_group(rng)
    action = random_action(rng, group)
    n = action.n_points
    if style is None:
        style = ("identity", "orthogonal", "skew")[rng.integers(3)]
    rep = random_rep(rng, group, style)
    values = np.round(rng.uniform(-2, 2, size=(n, 2)) * 8) / 8
    return DomainSpec(dyadic_density(rng, n), TargetSpec.vectors(values, 2), action, rep_y=rep)


seeds = st.integers(min_value=0, max_value=2**32 - 1)
label_domains = seeds.map(random_label_domain)
preserving_label_domains = seeds.map(lambda s: random_label_domain(s, preserving=True))
vector_domains = seeds.map(random_vector_domain)
orthogonal_vector_domains = seeds.map(lambda s: random_vector_domain(s, "orthogonal"))
identity_vector_domains = seeds.map(lambda s: random_vector_domain(s, "identity"))


# ---- independent oracles -------------------------------------------------


def brute_force_classification(domain):
    """Minimize error over every invariant labeling, one orbit at a time.

    Invariant classifiers are exactly the orbit-constant labelings and the
    error is additive over orbits, so per-orbit exhaustion is exhaustive.
    Returns the exact error as a Fraction.
    """
    labels = domain.target.values
    candidates = sorted(set(labels.tolist())) + [int(labels.max()) + 1]
    total = Fraction(0)
    for orb in domain.orbits:
        best = None
        for h in candidates:
            err = sum((Fraction(float(domain.density[z])) for z in orb.members if labels[z] != h), Fraction(0))
            best = err if best is None else min(best, err)
        total += best
    return total


def grid_minimize(loss, center, radius, dim, rounds=40, steps=11):
    """Zooming grid search; converges for convex quadratics.

    ``loss`` maps a (k, dim) batch of candidates to k values.
    """
    center = np.asarray(center, dtype=float)
    axes = np.linspace(-1.0, 1.0, steps)
    mesh = np.stack(np.meshgrid(*([axes] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    for _ in range(rounds):
        cand = center + radius * mesh
        center = cand[int(np.argmin(loss(cand)))]
        radius *= 0.5
    return float(loss(center[None])[0])


def brute_force_invariant_regression(domain):
    f, p = domain.target.values, domain.density
    total = 0.0
    for orb in domain.orbits:
        mem = list(orb.members)

        def loss(c, mem=mem):
            diff = f[mem][None] - c[:, None, :]
            return np.sum(p[mem] * np.sum(diff**2, axis=2), axis=1)

        total += grid_minimize(loss, np.zeros(f.shape[1]), 4.0, f.shape[1])
    return total


def brute_force_equivariant_regression(domain):
    """Minimize over the value v at each representative; h(gx) = rho(g) v."""
    f, p = domain.target.values, domain.density
    rho = domain.rep_y.matrices
    total = 0.0
    for orb in domain.orbits:
        pts = domain.action.table[:, orb.representative]

        def loss(v, pts=pts, k=orb.stabilizer_order):
            fitted = np.einsum("gij,kj->kgi", rho, v)
            return np.sum(p[pts] * np.sum((f[pts][None] - fitted) ** 2, axis=2), axis=1) / k

        total += grid_minimize(loss, np.zeros(f.shape[1]), 8.0, f.shape[1])
    return total
