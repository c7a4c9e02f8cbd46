from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from .currents import monomial, total
from .errors import BadSpec
from .types import (
    Ambient,
    CoordCycle,
    Current,
    FSForm,
    NamedForm,
    SigmaSym,
    ThetaSym,
    coord_name,
)


@dataclass(frozen=True)
class MonomialLog:
    """c * log|x^m|^2."""

    exponents: Tuple[int, ...]
    coeff: Fraction = Fraction(1)


@dataclass(frozen=True)
class NormLog:
    """c * log(|x_i|^2 + ... ) over the base coordinates in `indices`."""

    indices: FrozenSet[int]
    coeff: Fraction = Fraction(1)


@dataclass(frozen=True)
class FiberSectionLog:
    """O(1)-weight of factor j with curvature the section divisor [xi_a = 0]."""

    factor: int
    index: int


@dataclass(frozen=True)
class FiberFSWeight:
    factor: int


@dataclass(frozen=True)
class SmoothWeight:
    name: str


@dataclass(frozen=True)
class ReferenceWeight:
    """Smooth reference weight psi on O(1) of factor j; curvature theta_j."""

    factor: int
    tag: str = "theta"


WeightAtom = Union[MonomialLog, NormLog, FiberSectionLog, FiberFSWeight, SmoothWeight, ReferenceWeight]

_FIBER_ATOMS = (FiberSectionLog, FiberFSWeight, ReferenceWeight)
_SINGULAR_ATOMS = (MonomialLog, NormLog, FiberSectionLog)


@dataclass(frozen=True)
class Weight:
    atoms: Tuple[WeightAtom, ...]
    ambient: Ambient

    def __post_init__(self) -> None:
        n, t, r = self.ambient.base_dim, self.ambient.factors, self.ambient.rank
        fs_seen = set()
        for a in self.atoms:
            if isinstance(a, MonomialLog):
                if len(a.exponents) != n:
                    raise BadSpec(f"monomial exponent vector {a.exponents} does not have length {n}")
                if any(e < 0 for e in a.exponents) or not any(a.exponents):
                    raise BadSpec(f"monomial exponents must be nonnegative and not all zero: {a.exponents}")
                if a.coeff <= 0:
                    raise BadSpec("weight coefficients must be positive")
            elif isinstance(a, NormLog):
                if len(a.indices) < 2:
                    raise BadSpec("a norm log needs at least two coordinates; write log|x_i|^2 as a monomial")
                if any(not 1 <= i <= n for i in a.indices) or a.coeff <= 0:
                    raise BadSpec(f"bad norm log over {sorted(a.indices)}")
            elif isinstance(a, _FIBER_ATOMS):
                if not 1 <= a.factor <= t:
                    raise BadSpec(f"fiber atom references factor {a.factor}, ambient has {t}")
                if isinstance(a, FiberSectionLog) and not 1 <= a.index <= r:
                    raise BadSpec(f"section xi_{a.index} out of range for rank {r}")
                if isinstance(a, FiberFSWeight):
                    if a.factor in fs_seen:
                        raise BadSpec(f"two Fubini-Study weights on factor {a.factor}")
                    fs_seen.add(a.factor)

    @property
    def is_smooth(self) -> bool:
        return not any(isinstance(a, _SINGULAR_ATOMS) for a in self.atoms)

    @property
    def has_fiber_atoms(self) -> bool:
        return any(isinstance(a, _FIBER_ATOMS) for a in self.atoms)

    def lift(self, ambient: Ambient, factor: int = 1) -> "Weight":
        """Re-address fiber atoms written on factor 1 to `factor` of a larger ambient."""
        atoms = tuple(replace(a, factor=factor) if isinstance(a, _FIBER_ATOMS) else a for a in self.atoms)
        return Weight(atoms, ambient)

    def plus(self, *atoms: WeightAtom) -> "Weight":
        return Weight(self.atoms + tuple(atoms), self.ambient)

    def scaled(self, c: Union[int, Fraction]) -> "Weight":
        c = Fraction(c)
        atoms = tuple(
            replace(a, coeff=a.coeff * c) if isinstance(a, (MonomialLog, NormLog)) else a for a in self.atoms
        )
        return Weight(atoms, self.ambient)

    def render(self, names: Optional[Sequence[str]] = None) -> str:
        if not self.atoms:
            return "0"
        return " + ".join(render_atom(a, names) for a in self.atoms)


def render_atom(a: WeightAtom, names: Optional[Sequence[str]] = None) -> str:
    suffix = ""
    if isinstance(a, _FIBER_ATOMS) and a.factor != 1:
        suffix = f"@{a.factor}"
    if isinstance(a, MonomialLog):
        factors = [
            coord_name(i, names) + (f"^{e}" if e > 1 else "")
            for i, e in enumerate(a.exponents, start=1)
            if e
        ]
        return _coeff_prefix(a.coeff) + "log|" + "*".join(factors) + "|^2"
    if isinstance(a, NormLog):
        return _coeff_prefix(a.coeff) + "log|" + ",".join(coord_name(i, names) for i in sorted(a.indices)) + "|^2"
    if isinstance(a, FiberSectionLog):
        return f"section(xi_{a.index})" + suffix
    if isinstance(a, FiberFSWeight):
        return "fs" + suffix
    if isinstance(a, SmoothWeight):
        return f"smooth({a.name})"
    return f"ref({a.tag})" + suffix


def _coeff_prefix(c: Fraction) -> str:
    if c == 1:
        return ""
    return (str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}") + "*"


# --- Poincare-Lelong ----------------------------------------------------------

def ddc_atom(a: WeightAtom, ambient: Ambient) -> Current:
    if isinstance(a, MonomialLog):
        return total(
            ambient,
            (
                monomial(ambient, a.coeff * e, cycle=CoordCycle.of(base=[i]))
                for i, e in enumerate(a.exponents, start=1)
                if e
            ),
        )
    if isinstance(a, NormLog):
        return monomial(ambient, a.coeff, smooth=[SigmaSym(frozenset(a.indices))])
    if isinstance(a, FiberSectionLog):
        return monomial(ambient, 1, cycle=CoordCycle.of(fiber=[(a.factor, a.index)]))
    if isinstance(a, FiberFSWeight):
        return monomial(ambient, 1, smooth=[FSForm(a.factor)])
    if isinstance(a, SmoothWeight):
        return monomial(ambient, 1, smooth=[NamedForm(a.name, 1)])
    if isinstance(a, ReferenceWeight):
        return monomial(ambient, 1, smooth=[ThetaSym(a.factor, a.tag)])
    raise BadSpec(f"unknown weight atom {a!r}")


def ddc_weight(u: Weight) -> Current:
    return total(u.ambient, (ddc_atom(a, u.ambient) for a in u.atoms))


# --- Unbounded loci -----------------------------------------------------------

def atom_locus(a: WeightAtom) -> List[CoordCycle]:
    if isinstance(a, MonomialLog):
        return [CoordCycle.of(base=[i]) for i, e in enumerate(a.exponents, start=1) if e]
    if isinstance(a, NormLog):
        return [CoordCycle.of(base=a.indices)]
    if isinstance(a, FiberSectionLog):
        return [CoordCycle.of(fiber=[(a.factor, a.index)])]
    return []


def unbounded_locus(u: Weight) -> List[CoordCycle]:
    comps: List[CoordCycle] = []
    for a in u.atoms:
        comps.extend(atom_locus(a))
    return prune_components(comps)


def prune_components(comps: Sequence[CoordCycle]) -> List[CoordCycle]:
    """Irredundant, sorted component list of a union of coordinate subvarieties."""
    uniq = set(comps)
    kept = [c for c in uniq if not any(c != d and c.lies_in(d) for d in uniq)]
    return sorted(kept, key=lambda c: c.sort_key())


def _is_empty_in(c: CoordCycle, ambient: Ambient) -> bool:
    return any(c.fiber_codim(j) > ambient.fiber_dim for j in {j for j, _a in c.fiber_zero})


def intersect_loci(loci: Sequence[Sequence[CoordCycle]], ambient: Ambient) -> List[CoordCycle]:
    comps: List[CoordCycle] = [CoordCycle()]
    for locus in loci:
        comps = [c.union(d) for c in comps for d in locus]
        comps = [c for c in comps if not _is_empty_in(c, ambient)]
        if not comps:
            return []
    return prune_components(comps)


def locus_codim(locus: Sequence[CoordCycle]) -> Optional[int]:
    """Codimension of a union of components; None for the empty set."""
    if not locus:
        return None
    return min(c.codim for c in locus)


def transverse_family(weights: Sequence[Weight]) -> bool:
    """codim(Z_i1 cap ... cap Z_il) >= l for every subfamily."""
    if not weights:
        return True
    ambient = weights[0].ambient
    loci = [unbounded_locus(u) for u in weights]
    for size in range(1, len(loci) + 1):
        for group in combinations(loci, size):
            codim = locus_codim(intersect_loci(group, ambient))
            if codim is not None and codim < size:
                return False
    return True
