import numpy as np
import pytest
from hypothesis import given, settings

from equiaudit import bounds as B
from equiaudit.errors import SpecError
from equiaudit.generators import gen_c4_regression, gen_fig3_instance
from equiaudit.predictors import (
    PredictorTable,
    build_equivariant_regressor,
    build_majority_classifier,
    build_orbit_mean_regressor,
    empirical_error,
    empirical_error_exact,
    optimal_predictors,
    predictor_violations,
)

from strategies import label_domains, vector_domains


def test_majority_classifier_on_fig3():
    d = gen_fig3_instance().domain
    h = build_majority_classifier(d)
    assert h.point_values.tolist() == [1, 1, 2, 2]
    assert empirical_error(d, h) == 0.3
    assert predictor_violations(d, h) == []


@settings(max_examples=80, deadline=None)
@given(label_domains)
def test_majority_classifier_attains_bound_exactly(d):
    h = build_majority_classifier(d)
    assert predictor_violations(d, h) == []
    assert empirical_error_exact(d, h) == B.classification_lower_bound(d).exact_total


@settings(max_examples=60, deadline=None)
@given(vector_domains)
def test_regressors_attain_bounds(d):
    inv = build_orbit_mean_regressor(d)
    assert predictor_violations(d, inv) == []
    assert abs(empirical_error(d, inv) - B.invariant_regression_bound(d).total) <= 1e-9
    equi = build_equivariant_regressor(d)
    assert predictor_violations(d, equi) == []
    assert abs(empirical_error(d, equi) - B.equivariant_regression_bound(d).total) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(vector_domains)
def test_perturbing_an_orbit_value_never_helps(d):
    equi = build_equivariant_regressor(d)
    best = empirical_error(d, equi)
    rho = d.rep_y.matrices
    for orb in d.orbits:
        x = orb.representative
        # stay inside the stabilizer-fixed subspace so the table remains a function
        stab = [g for g in range(d.group.order) if d.action.table[g, x] == x]
        P = np.mean(rho[stab], axis=0)
        bumped = equi.point_values.copy()
        delta = P @ np.array([0.3, -0.2])
        for g in range(d.group.order):
            bumped[d.action.table[g, x]] = rho[g] @ (equi.orbit_values[x] + delta)
        assert empirical_error(d, PredictorTable(equi.kind, equi.orbit_values, bumped)) >= best - 1e-12


def test_equivariant_regressor_zero_error_on_equivariant_data():
    d = gen_c4_regression(2, equivariant=True).domain
    assert empirical_error(d, build_equivariant_regressor(d)) == pytest.approx(0, abs=1e-20)


def test_violations_detect_broken_table():
    d = gen_fig3_instance().domain
    h = build_majority_classifier(d)
    broken = PredictorTable(h.kind, h.orbit_values, np.array([1, 0, 2, 2]))
    assert (0, 1) in predictor_violations(d, broken)


def test_table_json_round_trip():
    d = gen_c4_regression(4).domain
    for h in optimal_predictors(d).values():
        back = PredictorTable.from_json(h.to_json())
        assert back.kind == h.kind
        np.testing.assert_array_equal(back.point_values, h.point_values)
    h = build_majority_classifier(gen_fig3_instance().domain)
    assert PredictorTable.from_json(h.to_json()).point_values.tolist() == h.point_values.tolist()


def test_kind_mismatch_is_rejected():
    d = gen_fig3_instance().domain
    reg = build_orbit_mean_regressor(gen_c4_regression(0).domain)
    with pytest.raises(SpecError):
        empirical_error(d, reg)
    with pytest.raises(SpecError):
        PredictorTable.from_json({"kind": "bogus", "orbit_values": [], "point_values": []})
