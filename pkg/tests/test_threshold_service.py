import math

import numpy as np
import pytest

from class_defs.problem_def import SparsityModel, TreeRegime
from class_defs.threshold_def import ExponentPoint, PhasePoint, ThresholdParams
from infrastructure.errors import DomainError, NoTransitionError
from services.threshold_service import (
    delta_of_rho,
    maximize_exponent,
    net_exponent_leading,
    rate_coefficient,
    rho_of_delta,
    sample_curve,
    simple_threshold,
    structure_rate,
    threshold_exponent,
    threshold_first_zero,
    validity_edge,
)

SMALL_K = SparsityModel.tree(TreeRegime.SMALL_K)
LARGE_K = SparsityModel.tree(TreeRegime.LARGE_K)


def test_structure_rates():
    assert structure_rate(SparsityModel.block(zeta=0.5), 0.1) == pytest.approx(-0.1)
    assert structure_rate(SparsityModel.block(zeta=1.0), 0.3) == 0.0
    assert structure_rate(SparsityModel.simple(), 0.3) == 0.0
    assert structure_rate(SMALL_K, 0.1) == pytest.approx(0.138629, abs=1e-6)
    assert structure_rate(LARGE_K, 0.1) == pytest.approx(0.0772589, abs=1e-6)


def test_closed_form_exponent_is_negated_rate():
    assert threshold_exponent(SMALL_K) * 0.1 == pytest.approx(-0.138629, abs=1e-6)
    for model in (SparsityModel.block(zeta=0.25), LARGE_K, SparsityModel.simple()):
        assert threshold_exponent(model) == -rate_coefficient(model)


def test_unresolved_models_are_rejected():
    with pytest.raises(DomainError):
        rate_coefficient(SparsityModel.tree())
    with pytest.raises(DomainError):
        rate_coefficient(SparsityModel.block(clusters=3))


@pytest.mark.parametrize(
    "model, expected",
    [
        (SparsityModel.block(zeta=1.0), 0.08966),
        (SparsityModel.block(zeta=0.5), 0.0739),
        (SMALL_K, 0.1138),
        (LARGE_K, 0.1028),
    ],
)
def test_delta_of_rho_examples(model, expected):
    assert delta_of_rho(model, 0.1) == pytest.approx(expected, abs=1e-4)


def test_delta_of_rho_domain():
    with pytest.raises(DomainError):
        delta_of_rho(SparsityModel.simple(), 0.0)
    with pytest.raises(DomainError):
        delta_of_rho(SparsityModel.simple(), 0.6)


def test_round_trip_is_consistent(all_models):
    for model in all_models:
        for rho in np.linspace(1e-3, 0.45, 25):
            delta = delta_of_rho(model, float(rho))
            assert rho_of_delta(model, delta) == pytest.approx(rho, abs=1e-8), (model.param, rho)


def test_first_zero_agrees_with_closed_form(all_models):
    for model in all_models:
        for delta in np.geomspace(1e-3, 0.25, 50):
            first_zero = threshold_first_zero(model, float(delta))
            assert first_zero == pytest.approx(rho_of_delta(model, float(delta)), abs=1e-6)


def test_first_zero_follows_non_default_tau(all_models):
    params = ThresholdParams(tau=3.0 * math.e)
    for model in all_models:
        for delta in (0.01, 0.05, 0.15):
            first_zero = threshold_first_zero(model, delta, params)
            assert first_zero == pytest.approx(rho_of_delta(model, delta, params), abs=1e-6)
    assert threshold_first_zero(SparsityModel.simple(), 0.05, params) < threshold_first_zero(SparsityModel.simple(), 0.05)
    assert net_exponent_leading(
        SparsityModel.simple(), PhasePoint(0.05, rho_of_delta(SparsityModel.simple(), 0.05, params)), params,
    ) == pytest.approx(0.0, abs=1e-9)


def test_net_exponent_changes_sign_at_threshold():
    model = SparsityModel.block(zeta=0.5)
    rho_star = rho_of_delta(model, 0.1)
    assert net_exponent_leading(model, PhasePoint(0.1, rho_star / 2)) < 0.0
    assert net_exponent_leading(model, PhasePoint(0.1, min(2 * rho_star, 0.5))) > 0.0
    assert abs(net_exponent_leading(model, PhasePoint(0.1, rho_star))) < 1e-10


def test_block_curves_decline_with_zeta():
    zetas = (0.25, 0.5, 0.75, 1.0)
    curves = [sample_curve(SparsityModel.block(zeta=z), 1e-3, 0.5, 200) for z in zetas]
    maps = [dict(zip(c.deltas, c.rhos)) for c in curves]
    common = set(maps[0])
    for m in maps[1:]:
        common &= set(m)
    assert len(common) > 100
    for delta in common:
        values = [m[delta] for m in maps]
        assert all(a > b for a, b in zip(values, values[1:])), delta


def test_full_cluster_block_matches_simple():
    block = sample_curve(SparsityModel.block(zeta=1.0), 1e-3, 0.5, 200)
    simple = sample_curve(SparsityModel.simple(), 1e-3, 0.5, 200)
    assert block.deltas == simple.deltas
    for a, b in zip(block.rhos, simple.rhos):
        assert a == pytest.approx(b, abs=1e-12)


def test_small_k_tree_curve_is_below_large_k():
    small = sample_curve(SMALL_K, 1e-3, 0.5, 200)
    large_curve = sample_curve(LARGE_K, 1e-3, 0.5, 200)
    large = dict(zip(large_curve.deltas, large_curve.rhos))
    compared = 0
    for delta, rho in zip(small.deltas, small.rhos):
        if delta in large:
            assert rho < large[delta]
            compared += 1
    assert compared > 100


def test_curve_drops_samples_beyond_validity_edge():
    curve = sample_curve(SparsityModel.simple(), 1e-3, 0.5, 200)
    assert curve.dropped > 0
    assert len(curve.points) + curve.dropped == 200
    assert all(a < b for a, b in zip(curve.deltas, curve.deltas[1:]))
    assert max(curve.deltas) <= validity_edge(SparsityModel.simple())


def test_linear_spacing_and_minimum_points():
    curve = sample_curve(SparsityModel.simple(), 0.01, 0.2, 2, spacing="linear")
    assert curve.deltas == pytest.approx([0.01, 0.2])
    with pytest.raises(DomainError):
        sample_curve(SparsityModel.simple(), 0.01, 0.2, 1)
    with pytest.raises(DomainError):
        sample_curve(SparsityModel.simple(), 0.2, 0.01, 10)


def test_validity_edge_and_no_transition():
    edge = validity_edge(SparsityModel.simple())
    assert edge == pytest.approx(0.390533, abs=1e-5)
    with pytest.raises(NoTransitionError):
        rho_of_delta(SparsityModel.simple(), 0.45)
    with pytest.raises(NoTransitionError):
        threshold_first_zero(SparsityModel.simple(), 0.45)


def test_simple_threshold_grows_with_delta():
    values = [simple_threshold(d) for d in (0.001, 0.01, 0.1, 0.3)]
    assert all(a < b for a, b in zip(values, values[1:]))


def test_tau_is_bounded_below():
    with pytest.raises(DomainError):
        ThresholdParams(tau=5.0)
    larger = ThresholdParams(tau=4.0 * math.e)
    assert rho_of_delta(SparsityModel.simple(), 0.1, larger) < rho_of_delta(SparsityModel.simple(), 0.1)


def test_maximize_exponent_interior_and_boundary():
    def bump(point: ExponentPoint) -> float:
        return -(point.v - 0.5) ** 2 - (point.gamma - 0.1) ** 2

    assert maximize_exponent(bump, 0.2, 0.3) == pytest.approx(0.0, abs=1e-8)

    def ramp(point: ExponentPoint) -> float:
        return point.v + point.gamma

    assert maximize_exponent(ramp, 0.2, 0.3) == pytest.approx(1.3, abs=1e-12)
