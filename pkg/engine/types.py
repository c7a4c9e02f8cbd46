from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import MalformedTerm


@dataclass(frozen=True)
class Ambient:
    """Base C^n times a fiber product of `factors` copies of P^{rank-1}."""

    base_dim: int
    rank: int = 1
    factors: int = 0

    def __post_init__(self) -> None:
        if self.base_dim < 1:
            raise MalformedTerm(f"base dimension must be positive, got {self.base_dim}")
        if self.rank < 1:
            raise MalformedTerm(f"rank must be positive, got {self.rank}")
        if self.factors < 0:
            raise MalformedTerm(f"negative number of fiber factors: {self.factors}")

    @property
    def fiber_dim(self) -> int:
        return self.rank - 1

    @property
    def total_dim(self) -> int:
        return self.base_dim + self.factors * self.fiber_dim

    def base(self) -> "Ambient":
        return Ambient(self.base_dim, self.rank, 0)


@dataclass(frozen=True)
class CoordCycle:
    """
    Coordinate subvariety {x_i = 0, i in base_zero} cut with the fiber
    hyperplanes {xi^(j)_a = 0} for (j, a) in fiber_zero. Empty sets give the
    whole space, i.e. the fundamental current 1.
    """

    base_zero: FrozenSet[int] = frozenset()
    fiber_zero: FrozenSet[Tuple[int, int]] = frozenset()

    @staticmethod
    def of(base: Iterable[int] = (), fiber: Iterable[Tuple[int, int]] = ()) -> "CoordCycle":
        return CoordCycle(frozenset(base), frozenset(fiber))

    @property
    def codim(self) -> int:
        return len(self.base_zero) + len(self.fiber_zero)

    def is_trivial(self) -> bool:
        return not self.base_zero and not self.fiber_zero

    def fiber_codim(self, factor: int) -> int:
        return sum(1 for j, _a in self.fiber_zero if j == factor)

    def fiber_indices(self, factor: int) -> FrozenSet[int]:
        return frozenset(a for j, a in self.fiber_zero if j == factor)

    def lies_in(self, other: "CoordCycle") -> bool:
        # Coordinate subspaces: more vanishing coordinates means a smaller set.
        return other.base_zero <= self.base_zero and other.fiber_zero <= self.fiber_zero

    def meets_improperly(self, other: "CoordCycle") -> bool:
        return bool(self.base_zero & other.base_zero) or bool(self.fiber_zero & other.fiber_zero)

    def union(self, other: "CoordCycle") -> "CoordCycle":
        return CoordCycle(self.base_zero | other.base_zero, self.fiber_zero | other.fiber_zero)

    def project(self) -> "CoordCycle":
        return CoordCycle(self.base_zero, frozenset())

    def sort_key(self) -> Tuple:
        return (tuple(sorted(self.base_zero)), tuple(sorted(self.fiber_zero)))

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if self.is_trivial():
            return "1"
        parts: List[str] = []
        if self.base_zero:
            parts.append(",".join(f"{coord_name(i, names)}=0" for i in sorted(self.base_zero)))
        for j in sorted({j for j, _a in self.fiber_zero}):
            idx = sorted(self.fiber_indices(j))
            parts.append(f"{j}:" + ",".join(f"xi_{a}=0" for a in idx))
        return "[" + "; ".join(parts) + "]"


WHOLE_SPACE = CoordCycle()


def coord_name(i: int, names: Optional[Sequence[str]] = None) -> str:
    if names and 0 < i <= len(names):
        return names[i - 1]
    return f"x{i}"


# --- Smooth factors -----------------------------------------------------------

@dataclass(frozen=True)
class ThetaSym:
    """First Chern form of O(1) on factor `factor` for the reference metric `tag`."""

    factor: int
    tag: str = "theta"

    @property
    def degree(self) -> int:
        return 1

    def sort_key(self) -> Tuple:
        return (0, self.factor, self.tag)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        return f"{self.tag}_{self.factor}"


@dataclass(frozen=True)
class FSForm:
    factor: int

    @property
    def degree(self) -> int:
        return 1

    def sort_key(self) -> Tuple:
        return (1, self.factor, "")

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        return f"fs_{self.factor}"


@dataclass(frozen=True)
class SigmaSym:
    """dd^c log|x_I|^2 for a base index set I with |I| >= 2."""

    indices: FrozenSet[int]

    @property
    def degree(self) -> int:
        return 1

    def sort_key(self) -> Tuple:
        return (2, tuple(sorted(self.indices)), "")

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        return "sigma{" + ",".join(coord_name(i, names) for i in sorted(self.indices)) + "}"


@dataclass(frozen=True)
class NamedForm:
    name: str
    degree: int = 1

    def sort_key(self) -> Tuple:
        return (3, self.degree, self.name)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        return self.name


SmoothFactor = Union[ThetaSym, FSForm, SigmaSym, NamedForm]


def sort_factors(factors: Iterable[SmoothFactor]) -> Tuple[SmoothFactor, ...]:
    return tuple(sorted(factors, key=lambda f: f.sort_key()))


@dataclass(frozen=True)
class Term:
    coeff: Fraction
    smooth: Tuple[SmoothFactor, ...] = ()
    cycle: CoordCycle = WHOLE_SPACE

    @staticmethod
    def make(coeff: Union[int, Fraction] = 1, smooth: Iterable[SmoothFactor] = (), cycle: CoordCycle = WHOLE_SPACE) -> "Term":
        return Term(Fraction(coeff), sort_factors(smooth), cycle)

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.smooth) + self.cycle.codim

    def monomial_key(self) -> Tuple:
        return (self.cycle.sort_key(), tuple(f.sort_key() for f in self.smooth))

    def with_coeff(self, coeff: Fraction) -> "Term":
        return Term(coeff, self.smooth, self.cycle)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        parts = [_render_coeff(self.coeff)]
        counts = Counter(self.smooth)
        for f in sort_factors(counts):
            k = counts[f]
            parts.append(f.render(names) if k == 1 else f"({f.render(names)})^{k}")
        if not self.cycle.is_trivial() or not self.smooth:
            parts.append(self.cycle.render(names))
        return "*".join(parts)


def _render_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# --- Currents -----------------------------------------------------------------

@dataclass(frozen=True)
class Current:
    """
    Exact-rational formal sum of model terms. Instances built through
    `normalize` are canonical: like terms merged, zeros dropped, sorted.
    Addition of canonical currents stays canonical.
    """

    ambient: Ambient
    terms: Tuple[Term, ...] = ()

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Current") -> "Current":
        _same_ambient(self, other)
        return Current(self.ambient, merge_terms(self.terms + other.terms))

    def __neg__(self) -> "Current":
        return self.scale(-1)

    def __sub__(self, other: "Current") -> "Current":
        return self + (-other)

    def scale(self, c: Union[int, Fraction]) -> "Current":
        c = Fraction(c)
        if c == 0:
            return Current(self.ambient)
        return Current(self.ambient, tuple(t.with_coeff(t.coeff * c) for t in self.terms))

    def coefficient_of(self, smooth: Iterable[SmoothFactor] = (), cycle: CoordCycle = WHOLE_SPACE) -> Fraction:
        key = Term.make(1, smooth, cycle).monomial_key()
        for t in self.terms:
            if t.monomial_key() == key:
                return t.coeff
        return Fraction(0)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.terms:
            return "0"
        return " + ".join(t.render(names) for t in self.terms)

    def __str__(self) -> str:
        return self.render()


def merge_terms(terms: Iterable[Term]) -> Tuple[Term, ...]:
    acc: Dict[Tuple, Term] = {}
    for t in terms:
        key = t.monomial_key()
        if key in acc:
            acc[key] = acc[key].with_coeff(acc[key].coeff + t.coeff)
        else:
            acc[key] = t
    kept = [t for t in acc.values() if t.coeff != 0]
    return tuple(sorted(kept, key=lambda t: t.monomial_key()))


def _same_ambient(a: Current, b: Current) -> None:
    if a.ambient != b.ambient:
        raise MalformedTerm(f"currents live on different ambients: {a.ambient} vs {b.ambient}")


# --- Constructible sets -------------------------------------------------------

@dataclass(frozen=True)
class ConstructibleSet:
    """
    (union of `inside` members, or everything when inside is None) minus the
    union of `outside` members. The two plain polarities are
    union(members) and complement(members); intersections mix them.
    """

    inside: Optional[Tuple[CoordCycle, ...]] = None
    outside: Tuple[CoordCycle, ...] = ()

    @staticmethod
    def union(members: Iterable[CoordCycle]) -> "ConstructibleSet":
        return ConstructibleSet(inside=tuple(members), outside=())

    @staticmethod
    def complement(members: Iterable[CoordCycle]) -> "ConstructibleSet":
        return ConstructibleSet(inside=None, outside=tuple(members))

    @staticmethod
    def whole() -> "ConstructibleSet":
        return ConstructibleSet(inside=None, outside=())

    @staticmethod
    def empty() -> "ConstructibleSet":
        return ConstructibleSet(inside=(), outside=())

    @property
    def polarity(self) -> str:
        if self.inside is None:
            return "complement"
        if not self.outside:
            return "union"
        return "mixed"

    def admits(self, cycle: CoordCycle) -> bool:
        """Does the irreducible support of `cycle` lie in this set (up to a proper subset)?"""
        if self.inside is not None and not any(cycle.lies_in(m) for m in self.inside):
            return False
        return not any(cycle.lies_in(m) for m in self.outside)

    def intersect(self, other: "ConstructibleSet") -> "ConstructibleSet":
        if self.inside is None:
            inside = other.inside
        elif other.inside is None:
            inside = self.inside
        else:
            inside = tuple(a.union(b) for a in self.inside for b in other.inside)
        return ConstructibleSet(inside=inside, outside=self.outside + other.outside)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        def members(ms: Tuple[CoordCycle, ...]) -> str:
            return "{" + " | ".join(m.render(names) for m in ms) + "}"

        if self.inside is None:
            return "off" + members(self.outside) if self.outside else "all"
        text = "in" + members(self.inside)
        if self.outside:
            text += " off" + members(self.outside)
        return text


@dataclass(frozen=True)
class BasePoint:
    """Coordinate-adapted base point: coordinates in `zeros` vanish, the rest are generic."""

    base_dim: int
    zeros: FrozenSet[int] = field(default_factory=frozenset)

    @staticmethod
    def origin(base_dim: int) -> "BasePoint":
        return BasePoint(base_dim, frozenset(range(1, base_dim + 1)))

    @staticmethod
    def generic(base_dim: int) -> "BasePoint":
        return BasePoint(base_dim, frozenset())

    def lies_on(self, cycle: CoordCycle) -> bool:
        return not cycle.fiber_zero and cycle.base_zero <= self.zeros

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if self.zeros == frozenset(range(1, self.base_dim + 1)):
            return "origin"
        if not self.zeros:
            return "generic"
        return "zero[" + ",".join(coord_name(i, names) for i in sorted(self.zeros)) + "]"
