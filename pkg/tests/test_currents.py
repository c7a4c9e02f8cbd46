from __future__ import annotations

import random
from itertools import combinations

import pytest

from engine.currents import monomial, restrict_off, restrict_to, split_signs, total, unit, wedge, zero
from engine.errors import ImproperIntersection
from engine.types import Ambient, ConstructibleSet, CoordCycle, Current, SigmaSym, Term, ThetaSym

C2 = Ambient(2)


def divisor(ambient: Ambient, *idx: int, coeff: int = 1) -> Current:
    return monomial(ambient, coeff, cycle=CoordCycle.of(base=idx))


def test_coordinate_divisors_meet_in_the_origin():
    assert wedge(divisor(C2, 1), divisor(C2, 2)).render() == "1*[x1=0,x2=0]"


def test_unit_is_neutral():
    T = divisor(C2, 1) + monomial(C2, 3, smooth=[SigmaSym(frozenset({1, 2}))])
    assert wedge(unit(C2), T) == T
    assert wedge(T, unit(C2)) == T


def test_self_intersection_is_refused():
    with pytest.raises(ImproperIntersection):
        wedge(divisor(C2, 1), divisor(C2, 1))


def test_restrict_to_selects_components():
    T = divisor(C2, 1) + divisor(C2, 2)
    S = ConstructibleSet.union([CoordCycle.of(base=[1])])
    assert restrict_to(T, S) == divisor(C2, 1)


def test_smooth_terms_do_not_charge_subvarieties():
    T = monomial(C2, 1, smooth=[SigmaSym(frozenset({1, 2}))])
    assert restrict_to(T, ConstructibleSet.union([CoordCycle.of(base=[1, 2])])).is_zero()
    assert restrict_off(T, [CoordCycle.of(base=[1])]) == T


def test_restrict_off_drops_components_in_the_polar_set():
    assert restrict_off(divisor(C2, 1), [CoordCycle.of(base=[1])]).is_zero()
    T = divisor(C2, 1) + divisor(C2, 2)
    assert restrict_off(T, [CoordCycle.of(base=[1])]) == divisor(C2, 2)


def test_fiber_components_are_selected_too():
    ambient = Ambient(3, rank=2, factors=1)
    z = CoordCycle.of(base=[1])
    w = CoordCycle.of(fiber=[(1, 2)])
    T = monomial(ambient, 1, smooth=[ThetaSym(1)], cycle=z)
    assert restrict_to(T, ConstructibleSet.union([z, w])) == T
    assert restrict_to(monomial(ambient, 1, cycle=w), ConstructibleSet.union([z])).is_zero()


def test_whole_space_and_empty_set():
    T = divisor(C2, 1) + monomial(C2, 2)
    assert restrict_to(T, ConstructibleSet.whole()) == T
    assert restrict_to(T, ConstructibleSet.empty()).is_zero()


def test_split_signs():
    T = divisor(C2, 1, coeff=2) + divisor(C2, 2, coeff=-3)
    plus, minus = split_signs(T)
    assert plus == divisor(C2, 1, coeff=2)
    assert minus == divisor(C2, 2, coeff=3)
    assert plus - minus == T


def test_zero_renders_as_zero():
    assert zero(C2).render() == "0"
    assert unit(C2).render() == "1*1"


def _all_cycles(n: int):
    idx = range(1, n + 1)
    for size in range(n + 1):
        for c in combinations(idx, size):
            yield CoordCycle.of(base=c)


def _random_set(rng: random.Random, cycles) -> ConstructibleSet:
    members = tuple(c for c in cycles if c.codim and rng.random() < 0.3)
    if rng.random() < 0.5:
        return ConstructibleSet.union(members)
    return ConstructibleSet.complement(members)


def test_restriction_laws_on_random_families():
    ambient = Ambient(3)
    cycles = list(_all_cycles(3))
    T = total(ambient, (monomial(ambient, i + 1, cycle=c) for i, c in enumerate(cycles)))
    rng = random.Random(7)
    for _ in range(200):
        s1, s2 = _random_set(rng, cycles), _random_set(rng, cycles)
        once = restrict_to(T, s1)
        assert restrict_to(once, s1) == once
        assert restrict_to(once, s2) == restrict_to(T, s1.intersect(s2))

        Z = [c for c in cycles if c.codim and rng.random() < 0.3]
        assert restrict_off(T, Z) + restrict_to(T, ConstructibleSet.union(Z)) == T


def test_wedge_is_commutative_and_associative_on_disjoint_supports():
    ambient = Ambient(3)
    a = divisor(ambient, 1) + monomial(ambient, 2, smooth=[SigmaSym(frozenset({1, 2}))])
    b = divisor(ambient, 2, coeff=5)
    c = divisor(ambient, 3, coeff=-1)
    assert wedge(a, b) == wedge(b, a)
    assert wedge(wedge(a, c), b) == wedge(a, wedge(c, b))
    assert wedge(a, b + c) == wedge(a, b) + wedge(a, c)


def test_set_polarity_and_coefficients():
    z = CoordCycle.of(base=[1])
    assert ConstructibleSet.union([z]).polarity == "union"
    assert ConstructibleSet.complement([z]).polarity == "complement"
    assert ConstructibleSet(inside=(CoordCycle.of(base=[1, 2]),), outside=(z,)).polarity == "mixed"
    T = divisor(C2, 1, coeff=4) + monomial(C2, 3, smooth=[SigmaSym(frozenset({1, 2}))])
    assert T.coefficient_of(cycle=z) == 4
    assert T.coefficient_of(smooth=[SigmaSym(frozenset({1, 2}))]) == 3
    assert T.coefficient_of(cycle=CoordCycle.of(base=[2])) == 0
