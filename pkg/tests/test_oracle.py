from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from engine.errors import BadSpec, BudgetExceeded, PreconditionViolated
from engine.monge_ampere import generalized_product, ma_power
from engine.oracle import (
    OracleCheck,
    OracleSettings,
    Region,
    RegularizedWeight,
    compare_to_symbolic,
    complex_hessian,
    contained_in_polar_set,
    elementary_symmetric,
    extrapolate_to_zero,
    numeric_lelong,
    numeric_ma_mass,
    quadrature_grid,
)
from engine.pipeline import run_scenario
from engine.projective import MetricSpec, SymbolRules, segre_current
from engine.scenario import parse_scenario
from engine.types import Ambient, BasePoint
from engine.weights import FiberFSWeight, MonomialLog, NormLog, SmoothWeight, Weight

C1 = Ambient(1)
C2 = Ambient(2)


def test_settings_validation():
    with pytest.raises(BadSpec):
        OracleSettings(radial_points=8)
    with pytest.raises(BadSpec):
        OracleSettings(epsilon=0)
    assert OracleSettings().grid_label == "48x16"


def test_grid_budget():
    with pytest.raises(BudgetExceeded):
        quadrature_grid(2, Region(), OracleSettings(max_points=1000), 1e-3)


def test_quadrature_integrates_area_and_volume():
    settings = OracleSettings()
    _nodes, w = quadrature_grid(1, Region("ball", 0.5), settings, 1e-3)
    assert math.isclose(w.sum(), math.pi * 0.25, rel_tol=2e-2)
    _nodes, w = quadrature_grid(2, Region("ball", 1.0), settings, 1e-3)
    assert math.isclose(w.sum(), math.pi ** 2 / 2, rel_tol=5e-2)
    _nodes, w = quadrature_grid(2, Region("polydisc", 1.0), settings, 1e-3)
    assert math.isclose(w.sum(), math.pi ** 2, rel_tol=3e-2)


def test_complex_hessian_of_the_norm_square():
    u = lambda z: np.sum(np.abs(z) ** 2, axis=-1)  # noqa: E731
    z = np.array([[0.3 + 0.1j, -0.2j], [1.0, 0.5]])
    H = complex_hessian(u, z, 1e-3, 1.0)
    assert np.allclose(H, np.eye(2)[None, :, :], atol=1e-6)
    assert np.allclose(elementary_symmetric(H, 1), 2.0)
    assert np.allclose(elementary_symmetric(H, 2), 1.0)


@pytest.mark.parametrize(
    "atoms",
    [
        (MonomialLog((1, 1)),),
        (MonomialLog((2, 1)),),
        (NormLog(frozenset({1, 2})),),
        (MonomialLog((1, 0)), SmoothWeight("norm_sq")),
    ],
)
def test_closed_form_hessian_agrees_with_finite_differences(atoms):
    u = RegularizedWeight.of(Weight(atoms, C2), 0.3)
    z = np.array([[0.3 + 0.1j, -0.2 + 0.4j], [0.7 - 0.2j, 0.1j]])
    assert np.allclose(u.hessian(z, 1e-3), complex_hessian(u, z, 1e-4, 1.0), atol=1e-5)


def test_double_divisor_hessian_near_its_curvature_scale():
    eps = 5e-4
    u = RegularizedWeight.of(Weight((MonomialLog((2,)),), C1), eps)
    r = np.array([7.2e-6, 1e-3, np.sqrt(eps), 0.1])
    H = u.hessian(r[:, None].astype(complex), 1e-3)
    exact = 4 * eps ** 2 * r ** 2 / (r ** 4 + eps ** 2) ** 2
    assert np.allclose(H[:, 0, 0].real, exact, rtol=1e-12)
    assert np.all(H[:, 0, 0].real > 0)


def test_sliced_hessian_keeps_the_free_coordinates():
    u = RegularizedWeight.of(Weight((NormLog(frozenset({1, 2})),), C2), 0.5).sliced(frozenset({1}))
    z = np.array([[0.5 + 0j]])
    # log(|x2|^2 + eps^2) on the slice x1 = 0
    assert np.allclose(u.hessian(z, 1e-3), 0.25 / (0.25 + 0.25) ** 2)


def test_extrapolation_removes_the_rho_squared_bias():
    radii = [0.5, 0.25, 0.125]
    value, error = extrapolate_to_zero(radii, [2 + 0.3 * r ** 2 for r in radii])
    assert math.isclose(value, 2.0, abs_tol=1e-12)
    assert error < 1e-12

    value, error = extrapolate_to_zero([0.5, 0.25], [2.075, 2.01875])
    assert math.isclose(value, 2.0, abs_tol=1e-12)
    assert math.isclose(error, 0.01875, abs_tol=1e-12)

    assert extrapolate_to_zero([0.5], [1.5]) == (1.5, 0.0)
    with pytest.raises(BadSpec):
        extrapolate_to_zero([0.5, 0.25], [1.0])


def test_regularized_weight_refuses_fiber_atoms():
    with pytest.raises(BadSpec):
        RegularizedWeight.of(Weight((FiberFSWeight(1),), Ambient(1, rank=2, factors=1)), 1e-3)
    with pytest.raises(BadSpec):
        RegularizedWeight.of(Weight((SmoothWeight("unknown"),), C1), 1e-3)


def test_polar_set_detection():
    u = RegularizedWeight.of(Weight((MonomialLog((1, 1)),), C2), 1e-3)
    assert contained_in_polar_set(u, frozenset({1}))
    v = RegularizedWeight.of(Weight((MonomialLog((1, 0)),), C2), 1e-3)
    assert not contained_in_polar_set(v, frozenset({2}))


@pytest.mark.oracle
def test_divisor_mass_on_the_line():
    u = RegularizedWeight.of(Weight((MonomialLog((1,)),), C1), 1e-3)
    mass = numeric_ma_mass(u, 1, Region("ball", 1.0))
    assert abs(mass - 1.0) < 0.02


@pytest.mark.oracle
def test_king_mass_of_the_norm_log():
    u = RegularizedWeight.of(Weight((NormLog(frozenset({1, 2})),), C2), 1e-3)
    mass = numeric_ma_mass(u, 2, Region("ball", 1.0))
    assert abs(mass - 1.0) < 0.03


@pytest.mark.oracle
def test_lelong_number_of_a_double_divisor():
    u = RegularizedWeight.of(Weight((MonomialLog((2,)),), C1), 1e-3)
    est = numeric_lelong(u, 1, BasePoint.origin(1))
    assert abs(est.value - 2.0) < 0.05
    assert len(est.ratios) == 3


@pytest.mark.oracle
def test_lelong_number_of_two_crossing_divisors():
    u = RegularizedWeight.of(Weight((MonomialLog((1, 1)),), C2), 1e-3)
    est = numeric_lelong(u, 1, BasePoint.origin(2))
    assert abs(est.value - 2.0) < 0.1


@pytest.mark.oracle
def test_lelong_ratios_are_extrapolated_to_the_point():
    # mass of dd^c(log|x1|^2 + |x1|^2) on the disc of radius rho is about 1 + rho^2
    u = RegularizedWeight.of(Weight((MonomialLog((1,)), SmoothWeight("norm_sq")), C1), 1e-3)
    est = numeric_lelong(u, 1, BasePoint.origin(1))
    assert est.ratios[-1][1] - 1.0 > 0.01
    assert abs(est.value - 1.0) < 0.005
    assert est.error < 0.005


@pytest.mark.oracle
def test_regularized_mass_grows_as_epsilon_shrinks():
    u = Weight((NormLog(frozenset({1, 2})),), C2)
    masses = [numeric_ma_mass(RegularizedWeight.of(u, eps), 2, Region("ball", 1.0)) for eps in (0.4, 0.2, 0.05)]
    assert masses[0] < masses[1] < masses[2]
    for eps, mass in zip((0.4, 0.2, 0.05), masses):
        assert abs(mass - (1 / (1 + eps ** 2)) ** 2) < 0.03


@pytest.mark.oracle
def test_ma_check_against_the_symbolic_engine():
    u = Weight((MonomialLog((1, 0)),), C2)
    row = compare_to_symbolic(OracleCheck("ma u 1", "ma", (u,), 1, ma_power(u, 1)), 0.05)
    assert row.symbolic_value == 1
    assert row.passed


@pytest.mark.oracle
def test_slicing_check_sees_the_order_of_factors():
    u1 = Weight((MonomialLog((1, 0)),), C2)
    u2 = Weight((MonomialLog((1, 1)),), C2)
    ordered = [(u2, None), (u1, None)]
    row = compare_to_symbolic(OracleCheck("u1 after u2", "product", (u2, u1), 2, generalized_product(ordered)), 0.05)
    assert row.symbolic_value == 1 and row.passed
    swapped = [(u1, None), (u2, None)]
    row = compare_to_symbolic(OracleCheck("u2 after u1", "product", (u1, u2), 2, generalized_product(swapped)), 0.05)
    assert row.symbolic_value == 0 and row.passed
    assert abs(row.value) < 1e-12


@pytest.mark.oracle
def test_segre_check_for_the_conformal_metric():
    spec = MetricSpec(2, "conformal", Weight((NormLog(frozenset({1, 2})),), Ambient(2, rank=2)))
    symbolic = segre_current(2, spec, SymbolRules())
    row = compare_to_symbolic(OracleCheck("segre 2", "segre", (spec.weight,), 2, symbolic, rank=2), 0.1)
    assert row.symbolic_value == Fraction(3)
    assert row.passed


@pytest.mark.oracle
def test_oracle_request_in_a_scenario():
    text = "space = 1\nweight u = log|x1|^2\ncompute = oracle(ma u 1, 0.05)\n"
    report = run_scenario(parse_scenario(text))
    (result,) = report.results
    assert result.status == "ok"
    assert result.output.startswith("pass numeric=")
    assert report.oracle_rows[0].symbolic_value == 1


def test_oracle_is_limited_to_small_dimensions():
    u = RegularizedWeight.of(Weight((MonomialLog((1, 0, 0)),), Ambient(3)), 1e-3)
    with pytest.raises(PreconditionViolated):
        numeric_ma_mass(u, 1, Region())
