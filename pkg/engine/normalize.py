from __future__ import annotations

from collections import Counter
from typing import Iterable, List, Optional

from .errors import DegenerateSigma, MalformedTerm
from .types import (
    Ambient,
    CoordCycle,
    Current,
    FSForm,
    NamedForm,
    SigmaSym,
    Term,
    ThetaSym,
    merge_terms,
    sort_factors,
)


def normalize(raw: Iterable[Term], ambient: Ambient) -> Current:
    kept: List[Term] = []
    for term in raw:
        if term.coeff == 0:
            continue
        _check_references(term, ambient)
        reduced = king_reduce(term)
        if reduced is None or _vanishes_for_degree(reduced, ambient):
            continue
        kept.append(reduced)
    return Current(ambient, merge_terms(kept))


def king_reduce(term: Term) -> Optional[Term]:
    """
    Collapse saturated sigma powers: on the cycle V, sigma_I only sees the
    coordinates I' = I minus base_zero(V), and (dd^c log|x_I'|^2)^|I'| = [x_I' = 0].
    Returns None when a power exceeds |I'|.
    """
    smooth = list(term.smooth)
    cycle = term.cycle
    changed = True
    while changed:
        changed = False
        counts = Counter(f for f in smooth if isinstance(f, SigmaSym))
        for sigma in sorted(counts, key=lambda f: f.sort_key()):
            k = counts[sigma]
            free = sigma.indices - cycle.base_zero
            if not free:
                raise DegenerateSigma(
                    f"sigma{sorted(sigma.indices)} on a cycle inside its own polar set {cycle.render()}"
                )
            if k > len(free):
                return None
            if k == len(free):
                smooth = [f for f in smooth if f != sigma]
                cycle = CoordCycle(cycle.base_zero | free, cycle.fiber_zero)
                changed = True
                break
    return Term(term.coeff, sort_factors(smooth), cycle)


def _vanishes_for_degree(term: Term, ambient: Ambient) -> bool:
    if term.degree > ambient.total_dim:
        return True

    base_load = len(term.cycle.base_zero)
    fiber_load = Counter(j for j, _a in term.cycle.fiber_zero)
    for f in term.smooth:
        if isinstance(f, FSForm):
            fiber_load[f.factor] += 1
        elif isinstance(f, SigmaSym):
            base_load += 1
        elif isinstance(f, NamedForm):
            base_load += f.degree

    if base_load > ambient.base_dim:
        return True
    return any(load > ambient.fiber_dim for load in fiber_load.values())


def _check_references(term: Term, ambient: Ambient) -> None:
    n, t, r = ambient.base_dim, ambient.factors, ambient.rank

    def bad(msg: str) -> MalformedTerm:
        return MalformedTerm(f"{msg} (ambient n={n}, rank={r}, factors={t})")

    for i in term.cycle.base_zero:
        if not 1 <= i <= n:
            raise bad(f"unknown base coordinate x{i}")
    for j, a in term.cycle.fiber_zero:
        if not 1 <= j <= t:
            raise bad(f"unknown fiber factor {j}")
        if not 1 <= a <= r:
            raise bad(f"unknown fiber coordinate xi_{a} on factor {j}")
    for f in term.smooth:
        if isinstance(f, (ThetaSym, FSForm)) and not 1 <= f.factor <= t:
            raise bad(f"{f.render()} references unknown fiber factor {f.factor}")
        if isinstance(f, SigmaSym):
            if len(f.indices) < 2:
                raise bad("sigma needs at least two coordinates; use a divisor for one")
            if any(not 1 <= i <= n for i in f.indices):
                raise bad(f"{f.render()} references an unknown base coordinate")
        if isinstance(f, NamedForm) and f.degree < 1:
            raise bad(f"named form {f.name} must have positive degree")
