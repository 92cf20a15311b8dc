import numpy as np
import pytest

from equiaudit import bounds as B
from equiaudit.domain import Tag, audit
from equiaudit.errors import SpecError
from equiaudit.generators import (
    gen_c4_regression,
    gen_fig3_instance,
    gen_label_merge,
    gen_robot_mixture,
    gen_square,
    gen_swiss_roll,
    gen_xor_extrinsic,
)
from equiaudit.io import canonical_dumps, domain_to_json
from equiaudit.predictors import build_majority_classifier, empirical_error_exact


def test_fig3_closed_form():
    out = gen_fig3_instance()
    assert B.classification_lower_bound(out.domain).total == out.closed_form_bound == 0.3


@pytest.mark.parametrize("c,m", [(0.2, 0.4), (0.0, 1.0), (1.0, 0.2), (0.6, 0.6)])
def test_square_close_to_formula(c, m):
    out = gen_square(c, m, grid=40)
    assert abs(B.classification_lower_bound(out.domain).total - (1 - c) * (1 - m)) <= 0.03


def test_square_majority_survives_small_m():
    # with m = 0.2 the minority must be split or the bound would use it
    out = gen_square(0.0, 0.2, grid=50)
    assert B.classification_lower_bound(out.domain).total == pytest.approx(0.8)
    assert {s.majority_label for s in B.classification_lower_bound(out.domain).per_orbit} == {1}


def test_square_rejects_bad_params():
    with pytest.raises(SpecError):
        gen_square(1.5, 0.2)
    with pytest.raises(SpecError):
        gen_square(0.2, 0.2, grid=2)


@pytest.mark.parametrize("c,i,e", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0.25, 0.5, 0.25)])
def test_swiss_roll_bound_and_measures(c, i, e):
    out = gen_swiss_roll(c, i, e, n=12)
    d = out.domain
    assert B.classification_lower_bound(d).total == pytest.approx(0.5 * i, abs=1e-12)
    assert float(empirical_error_exact(d, build_majority_classifier(d))) == pytest.approx(0.5 * i, abs=1e-12)
    meas = audit(d).measures
    assert meas[Tag.EXTRINSIC] == pytest.approx(0.5 * e, abs=1e-12)
    # only the flip element is incorrect, and it carries half the product measure
    assert meas[Tag.INCORRECT] == pytest.approx(0.5 * i, abs=1e-12)


def test_swiss_roll_rejects_bad_ratios():
    with pytest.raises(SpecError):
        gen_swiss_roll(0.5, 0.5, 0.5)


def test_swiss_roll_coordinates_are_distinct():
    coords = gen_swiss_roll(0.25, 0.5, 0.25, n=10).domain.coordinates
    assert len({tuple(np.round(r, 9)) for r in coords}) == coords.shape[0]


def test_xor_extras_shape():
    out = gen_xor_extrinsic()
    assert out.domain.n_points == 8
    assert len(out.extras["points"]) == 4
    assert B.classification_lower_bound(out.domain).total == 0


def test_c4_regression_is_deterministic():
    a = canonical_dumps(domain_to_json(gen_c4_regression(7).domain))
    b = canonical_dumps(domain_to_json(gen_c4_regression(7).domain))
    c = canonical_dumps(domain_to_json(gen_c4_regression(8).domain))
    assert a == b != c


def test_c4_regression_provenance_names_generator():
    prov = gen_c4_regression(1).provenance
    assert prov["seed"] == 1 and prov["rng"] == "numpy.random.PCG64"


def test_label_merge_ten_classes():
    out = gen_label_merge()
    assert out.closed_form_bound == pytest.approx(0.1)
    assert B.classification_lower_bound(out.domain).total == pytest.approx(0.1, abs=1e-15)


def test_label_merge_uneven_probabilities():
    probs = [0.5, 0.3, 0.2]
    out = gen_label_merge(3, [(1, 2)], probs)
    assert out.closed_form_bound == 0.2
    assert B.classification_lower_bound(out.domain).total == 0.2


def test_label_merge_rejects_overlapping_pairs():
    with pytest.raises(SpecError):
        gen_label_merge(10, [(1, 2), (2, 3)])


@pytest.mark.parametrize("c", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_robot_mixture(c):
    out = gen_robot_mixture(c)
    assert out.closed_form_bound == 0.5 * (1 - c)
    assert B.classification_lower_bound(out.domain).total == 0.5 * (1 - c)
