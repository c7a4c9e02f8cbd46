from __future__ import annotations

from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from .errors import ImproperIntersection, MalformedTerm
from .normalize import normalize
from .types import (
    WHOLE_SPACE,
    Ambient,
    ConstructibleSet,
    CoordCycle,
    Current,
    SmoothFactor,
    Term,
)


def zero(ambient: Ambient) -> Current:
    return Current(ambient)


def unit(ambient: Ambient) -> Current:
    return Current(ambient, (Term.make(1),))


def current(ambient: Ambient, *terms: Term) -> Current:
    return normalize(terms, ambient)


def monomial(
    ambient: Ambient,
    coeff: Union[int, Fraction] = 1,
    smooth: Iterable[SmoothFactor] = (),
    cycle: CoordCycle = WHOLE_SPACE,
) -> Current:
    return normalize([Term.make(coeff, smooth, cycle)], ambient)


def total(ambient: Ambient, currents: Iterable[Current]) -> Current:
    out = zero(ambient)
    for c in currents:
        out = out + c
    return out


def wedge(a: Current, b: Current) -> Current:
    if a.ambient != b.ambient:
        raise MalformedTerm(f"cannot wedge currents on {a.ambient} and {b.ambient}")
    raw: List[Term] = []
    for s in a.terms:
        for t in b.terms:
            if s.cycle.meets_improperly(t.cycle):
                raise ImproperIntersection(
                    f"{s.cycle.render()} and {t.cycle.render()} share a coordinate; "
                    "restrict off the polar set before multiplying"
                )
            raw.append(Term.make(s.coeff * t.coeff, s.smooth + t.smooth, s.cycle.union(t.cycle)))
    return normalize(raw, a.ambient)


def power(a: Current, m: int) -> Current:
    out = unit(a.ambient)
    for _ in range(m):
        out = wedge(a, out)
    return out


def restrict_to(T: Current, S: ConstructibleSet) -> Current:
    # Irreducible supports are either contained in S or meet it in a proper,
    # uncharged subset; terms are selected whole.
    return Current(T.ambient, tuple(t for t in T.terms if S.admits(t.cycle)))


def restrict_off(T: Current, Z: Sequence[CoordCycle]) -> Current:
    return restrict_to(T, ConstructibleSet.complement(Z))


def split_signs(T: Current) -> Tuple[Current, Current]:
    """T = S_plus - S_minus with every coefficient of both parts positive."""
    plus = tuple(t for t in T.terms if t.coeff > 0)
    minus = tuple(t.with_coeff(-t.coeff) for t in T.terms if t.coeff < 0)
    return Current(T.ambient, plus), Current(T.ambient, minus)


def is_smooth(T: Current) -> bool:
    return all(t.cycle.is_trivial() for t in T.terms)
