from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .currents import power, restrict_off, restrict_to, total, unit, wedge
from .errors import MalformedTerm, NotSmoothAlpha, PreconditionViolated
from .types import ConstructibleSet, CoordCycle, Current, SigmaSym
from .weights import Weight, ddc_atom, unbounded_locus

ProductFactor = Tuple[Weight, Optional[ConstructibleSet]]


def ddc_weight_times(u: Weight, T: Current) -> Current:
    """dd^c(u T) for T already restricted off L(u): atomwise divisor/curvature wedges."""
    _check_ambient(u, T)
    return total(T.ambient, (wedge(ddc_atom(a, u.ambient), T) for a in u.atoms))


def ma_power(u: Weight, m: int) -> Current:
    if m < 0:
        raise MalformedTerm(f"negative power {m}")
    Z = unbounded_locus(u)
    T = unit(u.ambient)
    for _ in range(m):
        T = ddc_weight_times(u, restrict_off(T, Z))
    return T


def generalized_product(factors: Sequence[ProductFactor]) -> Current:
    """
    Recursive product with factor 0 applied first:
    T_k = dd^c(u_k 1_{U_k} T_{k-1}). A missing U_k means the complement of L(u_k).
    """
    if not factors:
        raise MalformedTerm("a generalized product needs at least one factor")
    ambient = factors[0][0].ambient
    T = unit(ambient)
    for pos, (u, U) in enumerate(factors, start=1):
        Z = unbounded_locus(u)
        if U is None:
            U = ConstructibleSet.complement(Z)
        else:
            check_avoids_locus(U, Z, pos)
        T = ddc_weight_times(u, restrict_to(T, U))
    return T


def check_avoids_locus(U: ConstructibleSet, Z: Sequence[CoordCycle], pos: int = 1) -> None:
    if U.inside is None or any(c.is_trivial() for c in U.inside):
        candidates = list(Z)
    else:
        candidates = list(U.inside)
    for cand in candidates:
        if not any(cand.lies_in(c) for c in Z):
            continue
        if any(cand.lies_in(m) for m in U.outside):
            continue
        raise PreconditionViolated(
            f"factor {pos}: the set {U.render()} meets the unbounded locus in {cand.render()}"
        )


# --- Bracket operator [dd^c u]_alpha -------------------------------------------

def check_smooth_alpha(alpha: Current) -> None:
    for t in alpha.terms:
        if not t.cycle.is_trivial():
            raise NotSmoothAlpha(f"alpha carries the cycle {t.cycle.render()}")
        if any(isinstance(f, SigmaSym) for f in t.smooth):
            raise NotSmoothAlpha(f"alpha carries the singular factor in {t.render()}")


def bracket_apply(u: Weight, alpha: Current, T: Current) -> Current:
    check_smooth_alpha(alpha)
    _check_ambient(u, alpha)
    Z = unbounded_locus(u)
    outside = ddc_weight_times(u, restrict_off(T, Z))
    on_locus = restrict_to(T, ConstructibleSet.union(Z))
    if on_locus.is_zero():
        return outside
    return outside + wedge(alpha, on_locus)


def bracket_power(u: Weight, alpha: Current, m: int, on: Optional[Current] = None) -> Current:
    """[dd^c u]_alpha^m, applied to `on` (default 1)."""
    if m < 0:
        raise MalformedTerm(f"negative power {m}")
    check_smooth_alpha(alpha)
    T = unit(u.ambient) if on is None else on
    for _ in range(m):
        T = bracket_apply(u, alpha, T)
    return T


def bracket_expand(u: Weight, alpha: Current, m: int) -> Current:
    """(dd^c u)^m + sum over l < m of alpha^(m-l) 1_Z (dd^c u)^l."""
    check_smooth_alpha(alpha)
    Z = ConstructibleSet.union(unbounded_locus(u))
    out = ma_power(u, m)
    for ell in range(m):
        on_locus = restrict_to(ma_power(u, ell), Z)
        if not on_locus.is_zero():
            out = out + wedge(power(alpha, m - ell), on_locus)
    return out


def ma_powers(u: Weight, m_max: int) -> List[Current]:
    out = [unit(u.ambient)]
    Z = unbounded_locus(u)
    for _ in range(m_max):
        out.append(ddc_weight_times(u, restrict_off(out[-1], Z)))
    return out


def _check_ambient(u: Weight, T: Current) -> None:
    if u.ambient != T.ambient:
        raise MalformedTerm(f"weight lives on {u.ambient}, current on {T.ambient}")
