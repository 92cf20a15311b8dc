"""Deterministic builders for the analytic environments.

Each returns a ``GeneratorOutput``: the discretized domain, the closed-form
bound where one is known, and provenance recording every parameter.
Random coefficients come from numpy's PCG64 generator seeded explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .domain import DomainSpec, TargetSpec
from .errors import SpecError
from .groups import (
    PermutationAction,
    build_group,
    rotation2d_representation,
)

SWISS_T_RANGE = (1.5 * math.pi, 4.5 * math.pi)
RNG_NAME = "numpy.random.PCG64"


@dataclass
class GeneratorOutput:
    domain: DomainSpec
    closed_form_bound: Optional[float] = None
    formula: Optional[str] = None
    provenance: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)


def _domain(density, target, action, rep_y=None, coords=None, provenance=None) -> DomainSpec:
    return DomainSpec(
        density=np.asarray(density, dtype=float),
        target=target,
        action=action,
        rep_y=rep_y,
        coordinates=coords,
        provenance=provenance or {},
    )


def gen_fig3_instance() -> GeneratorOutput:
    """Four points, C2 swapping x0<->x1 and x2<->x3, labels (A, B, C, C).

    The densities are a reconstruction: any choice giving the per-point
    incorrect-set sums (0.4, 0.3, 0, 0) works, and this one does.
    """
    group = build_group("cyclic", 2)
    action = PermutationAction.from_perms(group, [[0, 1, 2, 3], [1, 0, 3, 2]])
    prov = {"generator": "fig3", "params": {}, "seed": None}
    dom = _domain([0.3, 0.4, 0.2, 0.1], TargetSpec.labels([0, 1, 2, 2]), action, provenance=prov)
    return GeneratorOutput(dom, 0.3, "min(p(x0), p(x1))", prov)


def _square_row_labels(grid: int, majority: int) -> np.ndarray:
    """Majority label 1 on the first ``majority`` columns; the remainder is cut
    into contiguous segments no longer than the majority run, each with its
    own label 2, 3, ...
    """
    row = np.empty(grid, dtype=np.int64)
    row[:majority] = 1
    seg = max(majority, 1)
    for k, start in enumerate(range(majority, grid, seg)):
        row[start : start + seg] = 2 + k
    return row


def gen_square(c: float, m: float, grid: int = 200) -> GeneratorOutput:
    """Unit square on a grid x grid lattice; the group is cyclic shifts along u.

    Rows v < round(c*grid) carry one label across the row. The other rows
    have a majority run of round(m*grid) cells plus minority segments.
    """
    if not (0 <= c <= 1 and 0 <= m <= 1):
        raise SpecError("c and m must lie in [0, 1]")
    if int(grid) != grid or grid < 4:
        raise SpecError("grid must be an integer >= 4")
    grid = int(grid)
    correct_rows = int(round(c * grid))
    majority = int(round(m * grid))
    group = build_group("cyclic", grid)
    u = np.arange(grid)
    # point index = v*grid + u; shift k sends u -> u + k (mod grid)
    perms = (np.arange(grid)[None, :, None] * grid + (u[None, None, :] + u[:, None, None]) % grid).reshape(grid, -1)
    action = PermutationAction.from_perms(group, perms)
    labels = np.empty((grid, grid), dtype=np.int64)
    labels[:correct_rows] = 0
    labels[correct_rows:] = _square_row_labels(grid, majority)
    vv, uu = np.meshgrid(np.arange(grid), u, indexing="ij")
    coords = np.stack([(uu.ravel() + 0.5) / grid, (vv.ravel() + 0.5) / grid], axis=1)
    density = np.full(grid * grid, 1.0 / (grid * grid))
    prov = {"generator": "square", "params": {"c": c, "m": m, "grid": grid}, "seed": None}
    dom = _domain(density, TargetSpec.labels(labels.ravel()), action, coords=coords, provenance=prov)
    return GeneratorOutput(dom, (1 - c) * (1 - m), "(1-c)*(1-m)", prov)


def _spiral_params(count: int) -> np.ndarray:
    """``count`` parameters t evenly spaced in arc length along r = t."""
    lo, hi = SWISS_T_RANGE
    t = np.linspace(lo, hi, 4096)
    arc = 0.5 * (t * np.sqrt(1 + t * t) + np.arcsinh(t))
    targets = np.linspace(arc[0], arc[-1], count)
    return np.interp(targets, arc, t)


def gen_swiss_roll(c: float, i: float, e: float, n: int = 24, seed: int = 0) -> GeneratorOutput:
    """Two interleaved spiral arms on the planes z=0 and z=1; C2 swaps the planes.

    Samples along each arm are dealt round-robin to the three components so
    no two components share a location:

    * correct: both arms on both planes, labels matching across planes;
    * incorrect: both arms on both planes, labels swapped on z=1;
    * extrinsic: arm 0 on z=0 and arm 1 on z=1 only; mirrored sites carry no mass.

    Every positive-mass point of a component gets an equal share of its ratio.
    ``seed`` is recorded but unused: the layout is deterministic.
    """
    ratios = {"correct": c, "incorrect": i, "extrinsic": e}
    if min(ratios.values()) < 0 or abs(c + i + e - 1) > 1e-9:
        raise SpecError("c, i, e must be nonnegative and sum to 1")
    if int(n) != n or n < 1:
        raise SpecError("n must be a positive integer")
    n = int(n)
    ts = _spiral_params(3 * n)
    comps = ("correct", "incorrect", "extrinsic")
    sites = []  # (component, arm, t)
    for k, comp in enumerate(comps):
        for arm in (0, 1):
            for t in ts[k::3]:
                sites.append((comp, arm, float(t)))

    coords, labels, density = [], [], []
    pairs = []
    for comp, arm, t in sites:
        phase = math.pi * arm
        xy = (t * math.cos(t + phase), t * math.sin(t + phase))
        lower, upper = len(coords), len(coords) + 1
        coords += [(xy[0], xy[1], 0.0), (xy[0], xy[1], 1.0)]
        pairs.append((lower, upper))
        if comp == "correct":
            labels += [arm, arm]
            mass = [1, 1]
        elif comp == "incorrect":
            labels += [arm, 1 - arm]
            mass = [1, 1]
        else:
            labels += [arm, arm]
            mass = [1, 0] if arm == 0 else [0, 1]
        density += mass

    density = np.asarray(density, dtype=float)
    comp_of = np.repeat([comps.index(s[0]) for s in sites], 2)
    for k, comp in enumerate(comps):
        sel = comp_of == k
        support = density[sel] > 0
        count = int(np.count_nonzero(support))
        density[sel] = np.where(support, ratios[comp] / count, 0.0)

    group = build_group("cyclic", 2)
    swap = np.arange(len(coords))
    for lo_, hi_ in pairs:
        swap[lo_], swap[hi_] = hi_, lo_
    action = PermutationAction.from_perms(group, [np.arange(len(coords)), swap])
    prov = {
        "generator": "swiss_roll",
        "params": {"c": c, "i": i, "e": e, "n": n, "t_range": list(SWISS_T_RANGE), "sampling": "equal arc length"},
        "seed": seed,
    }
    dom = _domain(density, TargetSpec.labels(labels), action, coords=np.asarray(coords), provenance=prov)
    return GeneratorOutput(dom, 0.5 * i, "0.5*i", prov)


XOR_POINTS = ((0.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, 0.0, -1.0), (0.0, 1.0, -1.0))
XOR_SIGNS = (1, 1, -1, -1)


def gen_xor_extrinsic() -> GeneratorOutput:
    """Four samples in R^3 labelled (+1, +1, -1, -1), separable by x3 = 0,
    whose images under x3 -> -x3 form an exclusive-or layout. The mirrored
    points are included with zero mass so the flip acts by permutation.
    """
    pts = np.array(XOR_POINTS)
    mirror = pts * np.array([1.0, 1.0, -1.0])
    coords = np.vstack([pts, mirror])
    group = build_group("cyclic", 2)
    action = PermutationAction.from_perms(group, [list(range(8)), [4, 5, 6, 7, 0, 1, 2, 3]])
    labels = [1 if s > 0 else 0 for s in XOR_SIGNS] * 2
    density = [0.25] * 4 + [0.0] * 4
    prov = {"generator": "xor", "params": {}, "seed": None}
    dom = _domain(density, TargetSpec.labels(labels), action, coords=coords, provenance=prov)
    extras = {
        "points": pts.tolist(),
        "signs": list(XOR_SIGNS),
        "invariance_matrices": [np.eye(3).tolist(), np.diag([1.0, 1.0, -1.0]).tolist()],
    }
    return GeneratorOutput(dom, 0.0, "0 (no incorrect pairs)", prov, extras)


def xor_point_set():
    from .complexity import PointSet

    out = gen_xor_extrinsic()
    return PointSet(
        np.array(out.extras["points"]),
        group=np.array(out.extras["invariance_matrices"]),
        labels=tuple(out.extras["signs"]),
    )


def _cubic(coeffs: np.ndarray, theta: np.ndarray) -> np.ndarray:
    a, b, c, d = coeffs
    return ((a * theta + b) * theta + c) * theta + d


def gen_c4_regression(seed: int = 0, n_theta: int = 32, equivariant: bool = False) -> GeneratorOutput:
    """Points (theta_j, x_k) for k in 0..3; C4 cycles k, rho_Y rotates by k*pi/2.

    l_x(theta) = (p_x(theta), q_x(theta)) with cubic p_x, q_x whose
    coefficients are drawn U[-1, 1] per x from PCG64(seed). With
    ``equivariant`` the x0 curve is rotated onto the other three, making f
    exactly equivariant.
    """
    if int(n_theta) != n_theta or n_theta < 1:
        raise SpecError("n_theta must be a positive integer")
    n_theta = int(n_theta)
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(4, 2, 4))
    theta = np.linspace(-1.0, 1.0, n_theta)
    group = build_group("cyclic", 4)
    rep = rotation2d_representation(group)
    curves = np.stack([np.stack([_cubic(coeffs[k, 0], theta), _cubic(coeffs[k, 1], theta)], axis=1) for k in range(4)])
    if equivariant:
        curves = np.stack([curves[0] @ rep.matrices[k].T for k in range(4)])
    # point index = j*4 + k
    values = curves.transpose(1, 0, 2).reshape(-1, 2)
    base = np.arange(n_theta)[:, None] * 4
    perms = [(base + (np.arange(4)[None, :] + k) % 4).ravel() for k in range(4)]
    action = PermutationAction.from_perms(group, perms)
    coords = np.stack([np.repeat(theta, 4), np.tile(np.arange(4.0), n_theta)], axis=1)
    density = np.full(4 * n_theta, 1.0 / (4 * n_theta))
    prov = {
        "generator": "c4reg",
        "params": {"n_theta": n_theta, "equivariant": equivariant, "theta_range": [-1.0, 1.0]},
        "seed": seed,
        "rng": RNG_NAME,
    }
    dom = _domain(density, TargetSpec.vectors(values), action, rep_y=rep, coords=coords, provenance=prov)
    return GeneratorOutput(dom, 0.0 if equivariant else None, "0 (f equivariant)" if equivariant else None, prov)


def gen_label_merge(
    n_classes: int = 10,
    merge_pairs: Sequence[Sequence[int]] = ((6, 9),),
    class_probs: Optional[Sequence[float]] = None,
) -> GeneratorOutput:
    """One point per class; a C2 element swaps each merged pair of classes
    and fixes the rest, so a pair can only receive one shared label.
    """
    if int(n_classes) != n_classes or n_classes < 1:
        raise SpecError("n_classes must be a positive integer")
    n_classes = int(n_classes)
    probs = np.full(n_classes, 1.0 / n_classes) if class_probs is None else np.asarray(class_probs, dtype=float)
    if probs.shape != (n_classes,):
        raise SpecError(f"class_probs needs {n_classes} entries")
    used: set[int] = set()
    swap = list(range(n_classes))
    for pair in merge_pairs:
        a, b = (int(v) for v in pair)
        if a == b or a in used or b in used or not (0 <= a < n_classes and 0 <= b < n_classes):
            raise SpecError(f"merge pairs must be disjoint pairs of distinct classes, got {tuple(pair)}")
        used.update((a, b))
        swap[a], swap[b] = b, a
    group = build_group("cyclic", 2)
    action = PermutationAction.from_perms(group, [list(range(n_classes)), swap])
    prov = {
        "generator": "label_merge",
        "params": {
            "n_classes": n_classes,
            "merge_pairs": [list(map(int, p)) for p in merge_pairs],
            "class_probs": probs.tolist(),
        },
        "seed": None,
    }
    dom = _domain(probs, TargetSpec.labels(range(n_classes)), action, provenance=prov)
    # each swapped pair keeps one label, so the lighter class is always wrong
    closed = math.fsum(min(probs[a], probs[b]) for a, b in ((int(a), int(b)) for a, b in merge_pairs))
    return GeneratorOutput(dom, closed, "sum over merged pairs of min(p_a, p_b)", prov)


def gen_robot_mixture(c: float) -> GeneratorOutput:
    """Mass c on a class the flip leaves alone, 1-c split over a swapped pair."""
    if not 0 <= c <= 1:
        raise SpecError("c must lie in [0, 1]")
    out = gen_label_merge(3, [(1, 2)], [c, (1 - c) / 2, (1 - c) / 2])
    out.provenance["generator"] = "robot"
    out.provenance["params"] = {"c": c}
    out.domain.provenance.update(out.provenance)
    out.closed_form_bound = 0.5 * (1 - c)
    out.formula = "0.5*(1-c)"
    return out


GENERATORS = {
    "fig3": gen_fig3_instance,
    "square": gen_square,
    "swiss": gen_swiss_roll,
    "xor": gen_xor_extrinsic,
    "c4reg": gen_c4_regression,
    "merge": gen_label_merge,
    "robot": gen_robot_mixture,
}
