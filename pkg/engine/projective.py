from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from .currents import current, monomial, total, unit, wedge, zero
from .errors import BadSpec, PreconditionViolated, UnsupportedPushforward
from .monge_ampere import bracket_power, ma_power
from .types import (
    Ambient,
    CoordCycle,
    Current,
    FSForm,
    NamedForm,
    SigmaSym,
    Term,
    ThetaSym,
)
from .weights import (
    FiberFSWeight,
    Weight,
    prune_components,
    unbounded_locus,
)

LOGGER = logging.getLogger(__name__)

METRIC_KINDS = ("line", "conformal", "o1weight")


@dataclass(frozen=True)
class MetricSpec:
    """
    Singular metric h on a trivial rank-r bundle, given by its induced O(1) weight:
      line       r = 1, phi = w
      conformal  h = e^{-w} Id, phi = w + fs
      o1weight   phi = w given directly on P(E), fiber atoms written on factor 1
    `weight` lives on Ambient(n, r, 1) for o1weight and on Ambient(n, r, 0) otherwise.
    """

    rank: int
    kind: str
    weight: Weight

    def __post_init__(self) -> None:
        if self.kind not in METRIC_KINDS:
            raise BadSpec(f"unknown metric kind {self.kind!r}")
        if self.weight.ambient.rank != self.rank:
            raise BadSpec(f"weight declared for rank {self.weight.ambient.rank}, metric has rank {self.rank}")
        if self.kind == "line" and self.rank != 1:
            raise BadSpec("a line-bundle metric needs rank 1")
        if self.kind != "o1weight" and self.weight.has_fiber_atoms:
            raise BadSpec(f"a {self.kind} metric takes a base weight; fiber atoms need o1weight")

    @property
    def base_dim(self) -> int:
        return self.weight.ambient.base_dim

    def ambient(self, factors: int = 1) -> Ambient:
        return Ambient(self.base_dim, self.rank, factors)

    @property
    def is_smooth(self) -> bool:
        return self.weight.is_smooth


@dataclass(frozen=True)
class Substitution:
    """theta_j wedge [fiber cycle with exactly `pattern` on factor j] -> 0 or fs_j wedge [...]."""

    tag: str
    pattern: FrozenSet[int]
    replacement: str = "zero"

    def __post_init__(self) -> None:
        if self.replacement not in ("zero", "fs"):
            raise BadSpec(f"substitution target must be 0 or fs, got {self.replacement!r}")
        if not self.pattern:
            raise BadSpec("substitution pattern needs at least one fiber hyperplane")


@dataclass(frozen=True)
class SymbolRules:
    theta_tag: str = "theta"
    # k -> trivial-cycle base terms of s_k(E, g); missing k >= 1 means 0
    segre_symbols: Dict[int, Tuple[Term, ...]] = field(default_factory=dict)
    substitutions: Tuple[Substitution, ...] = ()

    def __post_init__(self) -> None:
        for k, terms in self.segre_symbols.items():
            if k < 1:
                raise BadSpec("s_0(E, g) is always 1 and cannot be declared")
            for t in terms:
                if not t.cycle.is_trivial() or any(not isinstance(f, NamedForm) for f in t.smooth):
                    raise BadSpec(f"s_{k}(E, g) must be a combination of named forms")
                if t.degree != k:
                    raise BadSpec(f"s_{k}(E, g) has a term of degree {t.degree}")

    def segre_symbol(self, k: int, base: Ambient) -> Current:
        if k == 0:
            return unit(base)
        return current(base, *self.segre_symbols.get(k, ()))

    def with_tag(self, tag: str, segre_symbols: Optional[Dict[int, Tuple[Term, ...]]] = None) -> "SymbolRules":
        return SymbolRules(
            theta_tag=tag,
            segre_symbols=self.segre_symbols if segre_symbols is None else segre_symbols,
            substitutions=tuple(replace(s, tag=tag) for s in self.substitutions),
        )

    def theta(self, ambient: Ambient, factor: int) -> Current:
        return monomial(ambient, 1, smooth=[ThetaSym(factor, self.theta_tag)])


# --- Induced weights ----------------------------------------------------------

def induced_weight(spec: MetricSpec, factor: int, ambient: Ambient) -> Weight:
    if ambient.rank != spec.rank or ambient.base_dim != spec.base_dim:
        raise BadSpec(f"metric on rank {spec.rank}, n={spec.base_dim} cannot act on {ambient}")
    if spec.kind == "conformal":
        if spec.weight.has_fiber_atoms:
            raise BadSpec("conformal metrics take base weights only")
        return Weight(spec.weight.atoms, ambient).plus(FiberFSWeight(factor))
    return spec.weight.lift(ambient, factor)


def degeneracy_locus(spec: MetricSpec) -> List[CoordCycle]:
    """Base projection of L(phi); a single trivial cycle means the whole base."""
    phi = induced_weight(spec, 1, spec.ambient(1))
    return prune_components([c.project() for c in unbounded_locus(phi)])


# --- Pushforward --------------------------------------------------------------

def pushforward(T: Current, rules: SymbolRules) -> Current:
    ambient = T.ambient
    base = ambient.base()
    out = zero(base)
    for term in T.terms:
        pushed = _push_term(term, ambient, base, rules)
        if pushed is not None:
            out = out + pushed
    return out


def _push_term(term: Term, ambient: Ambient, base: Ambient, rules: SymbolRules) -> Optional[Current]:
    term = _substitute(term, ambient, rules)
    if term is None:
        return None

    base_smooth = [f for f in term.smooth if isinstance(f, (SigmaSym, NamedForm))]
    acc = monomial(base, term.coeff, smooth=base_smooth, cycle=term.cycle.project())
    for j in range(1, ambient.factors + 1):
        fiber = _push_factor(term, j, ambient, base, rules)
        if fiber.is_zero():
            return None
        acc = wedge(acc, fiber)
        if acc.is_zero():
            return None
    return acc


def _substitute(term: Term, ambient: Ambient, rules: SymbolRules) -> Optional[Term]:
    for j in range(1, ambient.factors + 1):
        thetas = [f for f in term.smooth if isinstance(f, ThetaSym) and f.factor == j]
        if not thetas:
            continue
        pattern = term.cycle.fiber_indices(j)
        for rule in rules.substitutions:
            if rule.pattern != pattern or any(f.tag != rule.tag for f in thetas):
                continue
            if rule.replacement == "zero":
                return None
            rest = [f for f in term.smooth if f not in thetas]
            term = Term.make(term.coeff, rest + [FSForm(j)] * len(thetas), term.cycle)
            break
    return term


def _push_factor(term: Term, j: int, ambient: Ambient, base: Ambient, rules: SymbolRules) -> Current:
    thetas = [f for f in term.smooth if isinstance(f, ThetaSym) and f.factor == j]
    fs = sum(1 for f in term.smooth if isinstance(f, FSForm) and f.factor == j)
    z = term.cycle.fiber_codim(j)
    r = ambient.rank

    if thetas and (fs or z):
        raise UnsupportedPushforward(
            f"factor {j} mixes {thetas[0].render()} with fiber content in {term.render()}; "
            "declare a substitution for this pattern"
        )
    if thetas:
        tags = {f.tag for f in thetas}
        if len(tags) > 1:
            raise UnsupportedPushforward(f"factor {j} mixes reference forms {sorted(tags)}")
        a = len(thetas)
        if r == 1:
            return monomial(base, 1, smooth=[NamedForm(thetas[0].tag, 1)] * a)
        if tags != {rules.theta_tag}:
            raise UnsupportedPushforward(
                f"no Segre symbols declared for reference form {thetas[0].tag}"
            )
        if a < r - 1:
            return zero(base)
        k = a - r + 1
        return rules.segre_symbol(k, base).scale((-1) ** k)
    if fs + z == r - 1:
        return unit(base)
    return zero(base)


# --- Segre and Chern currents -------------------------------------------------

def segre_current(k: int, spec: MetricSpec, rules: SymbolRules) -> Current:
    if k < 0:
        raise BadSpec(f"negative Segre index {k}")
    if k == 0:
        return unit(spec.ambient(0))
    return segre_product((k,), spec, rules)


def segre_product(ks: Sequence[int], spec: MetricSpec, rules: SymbolRules) -> Current:
    """s_{k_t} ^ ... ^ s_{k_1} with ks = (k_t, ..., k_1); factor 1 is applied first."""
    if not ks:
        raise BadSpec("segre_product needs a nonempty index list")
    if any(k < 1 for k in ks):
        raise BadSpec(f"segre_product indices must be positive, got {list(ks)}")
    t = len(ks)
    ambient = spec.ambient(t)
    T = unit(ambient)
    for j in range(1, t + 1):
        k = ks[t - j]
        phi = induced_weight(spec, j, ambient)
        T = bracket_power(phi, rules.theta(ambient, j), k + spec.rank - 1, on=T)
        LOGGER.debug("segre_product %s: factor %d done, %d terms", list(ks), j, len(T.terms))
    return pushforward(T, rules).scale((-1) ** sum(ks))


def naive_segre_current(k: int, spec: MetricSpec, rules: SymbolRules) -> Current:
    """(-1)^k pi_*(dd^c phi)^{k+r-1}, without the reference-form correction on L(phi)."""
    if k < 0:
        raise BadSpec(f"negative Segre index {k}")
    ambient = spec.ambient(1)
    phi = induced_weight(spec, 1, ambient)
    return pushforward(ma_power(phi, k + spec.rank - 1), rules).scale((-1) ** k)


def compositions(k: int) -> Iterator[Tuple[int, ...]]:
    """Ordered compositions (k_1, ..., k_t) of k, in lexicographic order."""
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in compositions(k - first):
            yield (first,) + rest


def chern_current(k: int, spec: MetricSpec, rules: SymbolRules) -> Current:
    base = spec.ambient(0)
    if k < 0:
        raise BadSpec(f"negative Chern index {k}")
    if k == 0:
        return unit(base)
    if k > spec.base_dim:
        return zero(base)
    parts = []
    for comp in compositions(k):
        s = segre_product(tuple(reversed(comp)), spec, rules)
        parts.append(s.scale((-1) ** len(comp)))
    LOGGER.info("chern_current(%d): summed %d compositions", k, len(parts))
    return total(base, parts)


# --- Checks -------------------------------------------------------------------

def decomposition_check(spec: MetricSpec, rules: SymbolRules, m: int) -> Current:
    """Terms of [dd^c phi]_theta^m - (dd^c phi)^m that are not carried by a cycle."""
    ambient = spec.ambient(1)
    phi = induced_weight(spec, 1, ambient)
    diff = bracket_power(phi, rules.theta(ambient, 1), m) - ma_power(phi, m)
    return Current(ambient, tuple(t for t in diff.terms if t.cycle.is_trivial()))


@dataclass
class SegreCheckReport:
    max_k: int
    segre: List[Current]
    chern: List[Current]
    failures: List[Tuple[int, Current]] = field(default_factory=list)
    decomposition_failures: List[Tuple[int, Current]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.decomposition_failures


def smooth_segre_check(spec: MetricSpec, rules: SymbolRules, max_k: int) -> SegreCheckReport:
    """Checks sum_{i+j=k} s_i c_j = 0 for 1 <= k <= max_k, plus the decomposition shape."""
    if not spec.is_smooth:
        raise PreconditionViolated("smooth_segre_check needs a metric without singular atoms")
    base = spec.ambient(0)
    segre = [segre_current(k, spec, rules) for k in range(max_k + 1)]
    chern = [chern_current(k, spec, rules) for k in range(max_k + 1)]
    report = SegreCheckReport(max_k=max_k, segre=segre, chern=chern)
    for k in range(1, max_k + 1):
        identity = total(base, (wedge(segre[i], chern[k - i]) for i in range(k + 1)))
        if not identity.is_zero():
            report.failures.append((k, identity))
    for m in range(max_k + spec.rank):
        residue = decomposition_check(spec, rules, m)
        if not residue.is_zero():
            report.decomposition_failures.append((m, residue))
    LOGGER.debug("smooth_segre_check up to %d: %d failures", max_k, len(report.failures))
    return report

