from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product

import pytest

from engine.currents import monomial, unit
from engine.errors import ImproperIntersection, NotSmoothAlpha, PreconditionViolated
from engine.monge_ampere import (
    bracket_apply,
    bracket_expand,
    bracket_power,
    ddc_weight_times,
    generalized_product,
    ma_power,
    ma_powers,
)
from engine.types import Ambient, ConstructibleSet, CoordCycle, FSForm, NamedForm, SigmaSym, ThetaSym
from engine.weights import (
    FiberFSWeight,
    FiberSectionLog,
    MonomialLog,
    NormLog,
    Weight,
    locus_codim,
    transverse_family,
    unbounded_locus,
)

C2 = Ambient(2)
P1 = Ambient(2, rank=2, factors=1)
SIGMA = SigmaSym(frozenset({1, 2}))

U1 = Weight((MonomialLog((1, 0)),), C2)
U2 = Weight((MonomialLog((1, 1)),), C2)
V2 = Weight((MonomialLog((0, 1)),), C2)
CONFORMAL = Weight((NormLog(frozenset({1, 2})), FiberFSWeight(1)), P1)


def theta(ambient: Ambient):
    return monomial(ambient, 1, smooth=[ThetaSym(1)])


def test_ddc_weight_times_examples():
    T = monomial(P1, 2, smooth=[FSForm(1), SIGMA])
    assert ddc_weight_times(CONFORMAL, T).render() == "2*fs_1*[x1=0,x2=0]"
    assert ddc_weight_times(U1, monomial(C2, cycle=CoordCycle.of(base=[2]))).render() == "1*[x1=0,x2=0]"
    assert ddc_weight_times(U1, monomial(C2, 0)).is_zero()


def test_ddc_weight_times_needs_the_locus_removed():
    with pytest.raises(ImproperIntersection):
        ddc_weight_times(U1, monomial(C2, cycle=CoordCycle.of(base=[1])))


def test_ma_powers_of_divisor_weights_stop_after_one():
    assert ma_power(U2, 1).render() == "1*[x1=0] + 1*[x2=0]"
    assert ma_power(U2, 2).is_zero()
    assert ma_power(U1, 0) == unit(C2)


def test_ma_powers_of_the_norm_log():
    v = Weight((NormLog(frozenset({1, 2})),), C2)
    assert ma_power(v, 2).render() == "1*[x1=0,x2=0]"
    assert ma_power(v, 3).is_zero()


def test_ma_powers_on_the_projectivized_bundle():
    assert ma_power(CONFORMAL, 2).render() == "2*fs_1*sigma{x1,x2} + 1*[x1=0,x2=0]"
    assert ma_power(CONFORMAL, 3).render() == "2*fs_1*[x1=0,x2=0]"
    assert ma_powers(CONFORMAL, 3)[1:] == [ma_power(CONFORMAL, m) for m in (1, 2, 3)]


def test_product_is_not_commutative():
    # factor list is inner first
    assert generalized_product([(U2, None), (U1, None)]).render() == "1*[x1=0,x2=0]"
    assert generalized_product([(U1, None), (U2, None)]).is_zero()


def test_product_of_separated_variables_commutes():
    a = generalized_product([(U1, None), (V2, None)])
    b = generalized_product([(V2, None), (U1, None)])
    assert a == b
    assert a.render() == "1*[x1=0,x2=0]"


def test_single_factor_product_is_ddc():
    assert generalized_product([(U2, None)]) == ma_power(U2, 1)


def _exponent_vectors(n: int):
    return [e for e in product(range(3), repeat=n) if any(e)]


def _generated_weights():
    for n in (1, 2, 3):
        ambient = Ambient(n)
        for e in _exponent_vectors(n):
            yield Weight((MonomialLog(e),), ambient)
        for size in range(2, n + 1):
            for idx in combinations(range(1, n + 1), size):
                yield Weight((NormLog(frozenset(idx)),), ambient)


GENERATED = list(_generated_weights())


@pytest.mark.parametrize("u", GENERATED, ids=lambda u: f"C{u.ambient.base_dim}:{u.render()}")
def test_bracket_law_over_generated_weights(u):
    alpha = monomial(u.ambient, smooth=[NamedForm("beta", 1)])
    codim = locus_codim(unbounded_locus(u))
    for m in range(5):
        bracket = bracket_power(u, alpha, m)
        assert bracket == bracket_expand(u, alpha, m)
        if m <= codim:
            assert bracket == ma_power(u, m)


def _transverse_monomial_families():
    for n in (2, 3):
        ambient = Ambient(n)
        weights = [Weight((MonomialLog(e),), ambient) for e in _exponent_vectors(n)]
        for k in (2, 3):
            for family in combinations(weights, k):
                if transverse_family(family):
                    yield family


def test_products_of_transverse_families_do_not_depend_on_the_order():
    families = list(_transverse_monomial_families())
    assert len(families) == 48
    for family in families:
        first, *rest = [generalized_product([(u, None) for u in order]) for order in permutations(family)]
        assert all(T == first for T in rest), [u.render() for u in family]


@pytest.mark.parametrize(
    "factors",
    [
        [U2, U1],
        [U1, V2],
        [Weight((NormLog(frozenset({1, 2})),), C2), U1],
    ],
)
def test_product_is_linear_in_each_weight(factors):
    base = generalized_product([(u, None) for u in factors])
    for pos in range(len(factors)):
        scaled = [u.scaled(Fraction(3, 2)) if i == pos else u for i, u in enumerate(factors)]
        assert generalized_product([(u, None) for u in scaled]) == base.scale(Fraction(3, 2))


@pytest.mark.parametrize(
    "u",
    [
        U2,
        Weight((NormLog(frozenset({1, 2})),), C2),
        CONFORMAL,
        Weight((FiberFSWeight(1),), P1),
        Weight((MonomialLog((1, 0, 0)), FiberSectionLog(1, 2)), Ambient(3, rank=2, factors=1)),
    ],
)
def test_ma_powers_vanish_past_the_dimension(u):
    for m in (u.ambient.total_dim + 1, u.ambient.total_dim + 2):
        assert ma_power(u, m).is_zero()


def test_explicit_sets_are_checked_against_the_locus():
    off_z = ConstructibleSet.complement([CoordCycle.of(base=[1])])
    assert generalized_product([(U2, None), (U1, off_z)]).render() == "1*[x1=0,x2=0]"
    with pytest.raises(PreconditionViolated):
        generalized_product([(U2, None), (U1, ConstructibleSet.whole())])
    with pytest.raises(PreconditionViolated):
        generalized_product([(U2, None), (U1, ConstructibleSet.union([CoordCycle.of(base=[1])]))])


def test_smaller_sets_select_fewer_components():
    only_x2 = ConstructibleSet(inside=(CoordCycle.of(base=[2]),), outside=(CoordCycle.of(base=[1]),))
    assert generalized_product([(U2, None), (U1, only_x2)]).render() == "1*[x1=0,x2=0]"


def test_whole_space_members_are_checked_like_the_whole_set():
    with pytest.raises(PreconditionViolated):
        generalized_product([(U2, None), (U1, ConstructibleSet.union([CoordCycle()]))])
    with pytest.raises(PreconditionViolated):
        generalized_product([(U2, None), (U1, ConstructibleSet.union([CoordCycle(), CoordCycle.of(base=[2])]))])
    whole_minus_z = ConstructibleSet(inside=(CoordCycle(),), outside=(CoordCycle.of(base=[1]),))
    assert generalized_product([(U2, None), (U1, whole_minus_z)]).render() == "1*[x1=0,x2=0]"


def test_bracket_adds_alpha_on_the_locus():
    line = Ambient(4, rank=1, factors=1)
    phi = Weight((MonomialLog((1, 0, 0, 0)),), line)
    th = theta(line)
    assert bracket_power(phi, th, 1).render() == "1*[x1=0]"
    assert bracket_power(phi, th, 2).render() == "1*theta_1*[x1=0]"
    assert bracket_power(phi, th, 3).render() == "1*(theta_1)^2*[x1=0]"
    assert bracket_power(phi, th, 4).render() == "1*(theta_1)^3*[x1=0]"


def test_bracket_on_the_conformal_weight():
    assert bracket_power(CONFORMAL, theta(P1), 3).render() == "1*theta_1*[x1=0,x2=0] + 2*fs_1*[x1=0,x2=0]"


def test_bracket_expand_matches_the_recursion():
    section_weight = Weight((MonomialLog((1, 0, 0)), FiberSectionLog(1, 2)), Ambient(3, rank=2, factors=1))
    for u in (CONFORMAL, section_weight):
        th = theta(u.ambient)
        for m in range(4):
            assert bracket_expand(u, th, m) == bracket_power(u, th, m)


def test_bracket_without_locus_is_plain_ma():
    smooth = Weight((FiberFSWeight(1),), P1)
    for m in range(3):
        assert bracket_power(smooth, theta(P1), m) == ma_power(smooth, m)


def test_alpha_must_be_smooth():
    with pytest.raises(NotSmoothAlpha):
        bracket_apply(U1, monomial(C2, cycle=CoordCycle.of(base=[2])), unit(C2))
    with pytest.raises(NotSmoothAlpha):
        bracket_power(U1, monomial(C2, smooth=[SIGMA]), 1)


def test_bracket_is_linear_in_alpha():
    ambient = Ambient(3, rank=1, factors=1)
    u = Weight((MonomialLog((1, 0, 0)),), ambient)
    a = monomial(ambient, smooth=[NamedForm("a")])
    b = monomial(ambient, 2, smooth=[NamedForm("b")])
    T = ma_power(u, 1)
    assert bracket_apply(u, a + b, T) == bracket_apply(u, a, T) + bracket_apply(u, b, T)
