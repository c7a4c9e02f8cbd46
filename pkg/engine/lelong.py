from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import MultipleSigmaFamilies, PreconditionViolated
from .projective import MetricSpec, SymbolRules, chern_current, segre_current
from .types import BasePoint, Current, SigmaSym, Term


def lelong_number(T: Current, point: BasePoint) -> Fraction:
    if T.ambient.factors:
        raise PreconditionViolated("Lelong numbers are taken on the base; push the current forward first")
    if point.base_dim != T.ambient.base_dim:
        raise PreconditionViolated(f"point has {point.base_dim} coordinates, base has {T.ambient.base_dim}")
    return sum((_term_density(t, point) for t in T.terms), Fraction(0))


def _term_density(t: Term, point: BasePoint) -> Fraction:
    if not point.lies_on(t.cycle):
        return Fraction(0)
    families = {f for f in t.smooth if isinstance(f, SigmaSym)}
    if len(families) > 1:
        raise MultipleSigmaFamilies(
            "no density rule for " + " ^ ".join(f.render() for f in sorted(families, key=lambda f: f.sort_key()))
        )
    if any(not isinstance(f, SigmaSym) for f in t.smooth):
        return Fraction(0)
    if not families:
        return t.coeff
    (sigma,) = families
    free = sigma.indices - t.cycle.base_zero
    return t.coeff if free <= point.zeros else Fraction(0)


def coordinate_points(base_dim: int) -> List[BasePoint]:
    """All 2^n coordinate-adapted points, origin first."""
    out = []
    for size in range(base_dim, -1, -1):
        for zeros in combinations(range(1, base_dim + 1), size):
            out.append(BasePoint(base_dim, frozenset(zeros)))
    return out


@dataclass
class ThetaMismatch:
    quantity: str
    point: BasePoint
    value_a: Fraction
    value_b: Fraction


@dataclass
class ThetaCheckReport:
    k_max: int
    values: Dict[Tuple[str, str], Fraction] = field(default_factory=dict)
    mismatches: List[ThetaMismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def theta_independence_check(
    spec: MetricSpec,
    rules_a: SymbolRules,
    rules_b: SymbolRules,
    k_max: int,
    points: Optional[Sequence[BasePoint]] = None,
) -> ThetaCheckReport:
    pts = list(points) if points is not None else coordinate_points(spec.base_dim)
    report = ThetaCheckReport(k_max=k_max)
    for k in range(k_max + 1):
        for name, fn in (("s", segre_current), ("c", chern_current)):
            quantity = f"{name}_{k}"
            ta, tb = fn(k, spec, rules_a), fn(k, spec, rules_b)
            for p in pts:
                va, vb = lelong_number(ta, p), lelong_number(tb, p)
                report.values[(quantity, p.render())] = va
                if va != vb:
                    report.mismatches.append(ThetaMismatch(quantity, p, va, vb))
    return report
