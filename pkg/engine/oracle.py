from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .errors import BadSpec, BudgetExceeded, NoConvergence, NonHermitianHessian, PreconditionViolated
from .lelong import lelong_number
from .types import BasePoint, Current
from .weights import MonomialLog, NormLog, SmoothWeight, Weight, WeightAtom

LOGGER = logging.getLogger(__name__)

# Smooth psh potentials the oracle knows how to evaluate, keyed by SmoothWeight name.
SMOOTH_POTENTIALS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "norm_sq": lambda z: np.sum(np.abs(z) ** 2, axis=-1),
    "zeta_sq": lambda z: np.sum(np.abs(z[..., 1:]) ** 2, axis=-1),
}

GENERIC_COORD = 0.5


@dataclass(frozen=True)
class OracleSettings:
    radial_points: int = 48
    angular_points: int = 16
    radial_floor: float = 1e-2
    fd_step: float = 1e-3
    max_points: int = 2_000_000
    epsilon: float = 1e-3
    radii: Tuple[float, ...] = (0.5, 0.25, 0.125)

    def __post_init__(self) -> None:
        if self.radial_points < 16 or self.angular_points < 16:
            raise BadSpec("quadrature needs at least 16 points per axis")
        if self.epsilon <= 0 or self.fd_step <= 0 or self.radial_floor <= 0:
            raise BadSpec("epsilon, fd_step and radial_floor must be positive")

    @property
    def grid_label(self) -> str:
        return f"{self.radial_points}x{self.angular_points}"


@dataclass(frozen=True)
class Region:
    """Ball or polydisc of `radius` around `center` (complex coordinates)."""

    kind: str = "ball"
    radius: float = 1.0
    center: Tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("ball", "polydisc"):
            raise BadSpec(f"unknown region kind {self.kind!r}")
        if self.radius <= 0:
            raise BadSpec("region radius must be positive")


@dataclass(frozen=True)
class RegularizedWeight:
    """
    u_eps = sum of c log(|F|^2 + eps^2) over the singular atoms, smooth atoms as is.
    Coordinates in `zero_coords` are frozen at 0, which restricts u to a
    coordinate slice; evaluation then takes the remaining coordinates only.
    """

    atoms: Tuple[WeightAtom, ...]
    base_dim: int
    epsilon: float
    zero_coords: FrozenSet[int] = frozenset()

    def __post_init__(self) -> None:
        if self.epsilon <= 0:
            raise BadSpec("epsilon must be positive")
        for a in self.atoms:
            if isinstance(a, SmoothWeight):
                if a.name not in SMOOTH_POTENTIALS:
                    raise BadSpec(f"no numerical potential registered for smooth({a.name})")
            elif not isinstance(a, (MonomialLog, NormLog)):
                raise BadSpec(f"the oracle only evaluates base weights, got {a!r}")

    @staticmethod
    def of(u: Weight, epsilon: float) -> "RegularizedWeight":
        return RegularizedWeight(u.atoms, u.ambient.base_dim, epsilon)

    @property
    def dim(self) -> int:
        return self.base_dim - len(self.zero_coords)

    def sliced(self, zero_coords: FrozenSet[int]) -> "RegularizedWeight":
        return RegularizedWeight(self.atoms, self.base_dim, self.epsilon, self.zero_coords | zero_coords)

    def with_epsilon(self, epsilon: float) -> "RegularizedWeight":
        return RegularizedWeight(self.atoms, self.base_dim, epsilon, self.zero_coords)

    def _full(self, z: np.ndarray) -> np.ndarray:
        if not self.zero_coords:
            return z
        full = np.zeros(z.shape[:-1] + (self.base_dim,), dtype=complex)
        free = [i for i in range(self.base_dim) if i + 1 not in self.zero_coords]
        full[..., free] = z
        return full

    def hessian(self, z: np.ndarray, fd_step: float) -> np.ndarray:
        """
        d^2 u_eps / dz_j dzbar_k at each row of z, in the free coordinates.
        Log atoms are differentiated in closed form; smooth potentials by
        central differences.
        """
        full = self._full(z)
        N, n = full.shape
        H = np.zeros((N, n, n), dtype=complex)
        eps2 = self.epsilon ** 2
        for a in self.atoms:
            if isinstance(a, MonomialLog):
                exps = [int(e) for e in a.exponents]
                value = np.ones(N, dtype=complex)
                for i, e in enumerate(exps):
                    if e:
                        value = value * full[:, i] ** e
                grad = np.zeros((N, n), dtype=complex)
                for j, e in enumerate(exps):
                    if not e:
                        continue
                    rest = np.ones(N, dtype=complex)
                    for i, f in enumerate(exps):
                        if i != j and f:
                            rest = rest * full[:, i] ** f
                    grad[:, j] = e * rest * (full[:, j] ** (e - 1) if e > 1 else 1.0)
                s = np.abs(value) ** 2 + eps2
                H += float(a.coeff) * eps2 * (grad[:, :, None] * np.conj(grad[:, None, :])) / (s ** 2)[:, None, None]
            elif isinstance(a, NormLog):
                mask = np.zeros(n)
                mask[[i - 1 for i in a.indices]] = 1.0
                zi = full * mask
                s = np.sum(np.abs(zi) ** 2, axis=-1) + eps2
                outer = np.conj(zi)[:, :, None] * zi[:, None, :]
                H += float(a.coeff) * (np.diag(mask)[None, :, :] / s[:, None, None] - outer / (s ** 2)[:, None, None])
            else:
                potential = SMOOTH_POTENTIALS[a.name]
                H += complex_hessian(potential, full, fd_step, 1.0)
        free = [i for i in range(self.base_dim) if i + 1 not in self.zero_coords]
        return H[:, free][:, :, free]

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = self._full(z)
        eps2 = self.epsilon ** 2
        out = np.zeros(z.shape[:-1])
        for a in self.atoms:
            if isinstance(a, MonomialLog):
                sq = np.ones(z.shape[:-1])
                for i, e in enumerate(a.exponents):
                    if e:
                        sq = sq * np.abs(z[..., i]) ** (2 * e)
                out = out + float(a.coeff) * np.log(sq + eps2)
            elif isinstance(a, NormLog):
                idx = [i - 1 for i in sorted(a.indices)]
                sq = np.sum(np.abs(z[..., idx]) ** 2, axis=-1)
                out = out + float(a.coeff) * np.log(sq + eps2)
            else:
                out = out + SMOOTH_POTENTIALS[a.name](z)
        return out


# --- Quadrature ---------------------------------------------------------------

def _log_radial(r_lo: float, r_hi: float, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoints in log r and the weight r^2 d(log r) of r dr."""
    edges = np.linspace(math.log(r_lo), math.log(r_hi), count + 1)
    mids = np.exp(0.5 * (edges[:-1] + edges[1:]))
    return mids, mids ** 2 * np.diff(edges)


def _angles(count: int) -> Tuple[np.ndarray, float]:
    return 2 * np.pi * (np.arange(count) + 0.5) / count, 2 * np.pi / count


def quadrature_grid(dim: int, region: Region, settings: OracleSettings, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes (N, dim) and weights (N,) for Lebesgue measure on the region, polar in
    every complex coordinate. For the ball the inner radius range adapts to the
    outer coordinate, so the boundary is exact.
    """
    R, A = settings.radial_points, settings.angular_points
    n_points = (R * A) ** dim
    if n_points > settings.max_points:
        raise BudgetExceeded(f"{n_points} quadrature points exceed the budget of {settings.max_points}")
    r_min = settings.radial_floor * scale
    if r_min >= region.radius:
        raise BadSpec("regularization scale is not small against the region radius")
    theta, dtheta = _angles(A)
    phase = np.exp(1j * theta)

    if dim == 1:
        r, w = _log_radial(r_min, region.radius, R)
        nodes = (r[:, None] * phase[None, :]).reshape(-1, 1)
        weights = np.repeat(w * dtheta, A)
    elif dim == 2:
        r1, w1 = _log_radial(r_min, region.radius, R)
        blocks, wblocks = [], []
        for a, wa in zip(r1, w1):
            top = math.sqrt(region.radius ** 2 - a ** 2) if region.kind == "ball" else region.radius
            if top <= r_min:
                continue
            r2, w2 = _log_radial(r_min, top, R)
            z1 = np.repeat(a * phase, len(r2) * A)
            z2 = np.tile((r2[:, None] * phase[None, :]).reshape(-1), A)
            blocks.append(np.stack([z1, z2], axis=-1))
            wblocks.append(np.full(len(z1), wa * dtheta) * np.tile(np.repeat(w2 * dtheta, A), A))
        nodes = np.concatenate(blocks)
        weights = np.concatenate(wblocks)
    else:
        raise PreconditionViolated(f"numerics are limited to base dimension 2, got {dim}")

    if region.center:
        nodes = nodes + np.asarray(region.center, dtype=complex)[None, :]
    LOGGER.debug("quadrature grid: dim=%d, %d nodes, radius %.3g", dim, len(weights), region.radius)
    return nodes, weights


# --- Finite differences -------------------------------------------------------

def complex_hessian(u: Callable[[np.ndarray], np.ndarray], z: np.ndarray, fd_step: float, scale: float) -> np.ndarray:
    """
    d^2 u / dz_j dzbar_k at each row of z, from central differences of the real
    Hessian with per-coordinate steps fd_step * (|z_j| + scale).
    """
    N, n = z.shape
    x = np.concatenate([z.real, z.imag], axis=1)  # x_1..x_n, y_1..y_n
    d = 2 * n
    steps = fd_step * (np.tile(np.abs(z), 2) + scale)

    def f(pts: np.ndarray) -> np.ndarray:
        return u(pts[:, :n] + 1j * pts[:, n:])

    f0 = f(x)
    real_h = np.empty((N, d, d))
    for a in range(d):
        ea = np.zeros(d)
        ea[a] = 1.0
        ha = steps[:, a]
        sa = ha[:, None] * ea
        real_h[:, a, a] = (f(x + sa) - 2 * f0 + f(x - sa)) / ha ** 2
        for b in range(a + 1, d):
            eb = np.zeros(d)
            eb[b] = 1.0
            hb = steps[:, b]
            sb = hb[:, None] * eb
            val = (f(x + sa + sb) - f(x + sa - sb) - f(x - sa + sb) + f(x - sa - sb)) / (4 * ha * hb)
            real_h[:, a, b] = val
            real_h[:, b, a] = val

    xx = real_h[:, :n, :n]
    yy = real_h[:, n:, n:]
    xy = real_h[:, :n, n:]
    yx = real_h[:, n:, :n]
    return 0.25 * ((xx + yy) + 1j * (xy - yx))


def _check_hessian(H: np.ndarray) -> None:
    if not np.all(np.isfinite(H)):
        raise NonHermitianHessian("non-finite Hessian entries")
    if not np.allclose(H, np.conj(np.swapaxes(H, -1, -2)), rtol=1e-6, atol=1e-9 * float(np.max(np.abs(H)))):
        raise NonHermitianHessian("finite-difference Hessian is not hermitian")
    eig = np.linalg.eigvalsh(H)
    top = np.max(np.abs(eig), axis=-1)
    if np.any(eig[:, 0] < -1e-3 * top - 1e-9):
        raise NonHermitianHessian("finite-difference Hessian of a psh weight has a negative eigenvalue")


def elementary_symmetric(H: np.ndarray, k: int) -> np.ndarray:
    """Sum of principal k x k minors, for n <= 2."""
    n = H.shape[-1]
    if k == 0:
        return np.ones(H.shape[0])
    if k == 1:
        return np.real(np.trace(H, axis1=-2, axis2=-1))
    if k == n:
        return np.real(np.linalg.det(H))
    raise PreconditionViolated(f"no minor sum for k={k}, n={n}")


def ma_density(H: np.ndarray, k: int) -> np.ndarray:
    """Density of (dd^c u)^k ^ (dd^c |z|^2)^(n-k) against Lebesgue measure."""
    n = H.shape[-1]
    const = math.factorial(k) * math.factorial(n - k) / math.pi ** n
    return const * elementary_symmetric(H, k)


def numeric_ma_mass(u_eps: RegularizedWeight, k: int, region: Region, settings: OracleSettings = OracleSettings()) -> float:
    n = u_eps.dim
    if n > 2:
        raise PreconditionViolated(f"numerics are limited to base dimension 2, got {n}")
    if not 0 <= k <= n:
        raise PreconditionViolated(f"power {k} out of range for dimension {n}")
    nodes, weights = quadrature_grid(n, region, settings, u_eps.epsilon)
    H = u_eps.hessian(nodes, settings.fd_step)
    _check_hessian(H)
    density = ma_density(H, k)
    return math.fsum((density * weights).tolist())


# --- Lelong densities ---------------------------------------------------------

@dataclass
class LelongEstimate:
    value: float
    error: float
    epsilon: float
    ratios: List[Tuple[float, float]] = field(default_factory=list)


def point_coords(point: BasePoint, zero_coords: FrozenSet[int] = frozenset()) -> Tuple[complex, ...]:
    return tuple(
        0j if i in point.zeros else complex(GENERIC_COORD)
        for i in range(1, point.base_dim + 1)
        if i not in zero_coords
    )


def extrapolate_to_zero(radii: Sequence[float], values: Sequence[float]) -> Tuple[float, float]:
    """
    Limit of the density ratios as rho -> 0, from a least squares line in rho^2.
    The error is the largest fit residual; with two radii it is the size of
    the extrapolation step.
    """
    if len(values) != len(radii) or not values:
        raise BadSpec("need one ratio per radius")
    if len(values) == 1:
        return float(values[0]), 0.0
    t = np.asarray(radii, dtype=float) ** 2
    v = np.asarray(values, dtype=float)
    if len(values) == 2:
        limit = float((t[0] * v[1] - t[1] * v[0]) / (t[0] - t[1]))
        return limit, abs(limit - float(v[-1]))
    slope, limit = np.polyfit(t, v, 1)
    residual = v - (slope * t + limit)
    return float(limit), float(np.max(np.abs(residual)))


def numeric_lelong(
    u: RegularizedWeight,
    k: int,
    point: BasePoint,
    settings: OracleSettings = OracleSettings(),
    radii: Optional[Sequence[float]] = None,
    scale: float = 1.0,
    tolerance: float = 0.05,
) -> LelongEstimate:
    """
    scale * mass(ball rho) / rho^(2(n-k)) of (dd^c u_eps)^k over decreasing rho,
    with eps = settings.epsilon * rho. The value is the limit of the ratios
    extrapolated to rho = 0.
    """
    rs = sorted(radii or settings.radii, reverse=True)
    n = u.dim
    center = point_coords(point, u.zero_coords)
    ratios: List[Tuple[float, float]] = []
    eps = settings.epsilon
    for rho in rs:
        eps = settings.epsilon * rho
        mass = numeric_ma_mass(u.with_epsilon(eps), k, Region("ball", rho, center), settings)
        ratios.append((rho, scale * mass / rho ** (2 * (n - k))))
    values = [v for _rho, v in ratios]
    diffs = [b - a for a, b in zip(values, values[1:])]
    bound = tolerance * max(1.0, abs(values[-1]))
    if any(d > bound for d in diffs) and any(d < -bound for d in diffs):
        raise NoConvergence(f"density ratios {['%.4f' % v for v in values]} are not monotone")
    value, error = extrapolate_to_zero([rho for rho, _v in ratios], values)
    LOGGER.debug("numeric_lelong k=%d: ratios %s", k, ratios)
    return LelongEstimate(value=value, error=error, epsilon=eps, ratios=ratios)


# --- Comparison with the symbolic engine --------------------------------------

CHECK_KINDS = ("ma", "product", "segre")


@dataclass(frozen=True)
class OracleCheck:
    """
    quantity  label of the request
    kind      "ma": (dd^c u)^k; "product": two-factor product, inner weight first;
              "segre": conformal metric e^{-w} Id of rank `rank`, Segre index k
    symbolic  the engine's current, compared through its Lelong number at `point`
    """

    quantity: str
    kind: str
    weights: Tuple[Weight, ...]
    k: int
    symbolic: Current
    point: Optional[BasePoint] = None
    rank: int = 1

    def __post_init__(self) -> None:
        if self.kind not in CHECK_KINDS:
            raise BadSpec(f"unknown oracle check {self.kind!r}")


@dataclass
class OracleRow:
    quantity: str
    epsilon: float
    grid: str
    value: float
    error_estimate: float
    symbolic_value: Fraction
    passed: bool
    kind: str = ""


def compare_to_symbolic(check: OracleCheck, tolerance: float, settings: OracleSettings = OracleSettings()) -> OracleRow:
    base_dim = check.weights[0].ambient.base_dim
    point = check.point or BasePoint.origin(base_dim)
    symbolic = lelong_number(check.symbolic, point)

    if check.kind == "ma":
        est = numeric_lelong(RegularizedWeight.of(check.weights[0], settings.epsilon), check.k, point, settings)
    elif check.kind == "segre":
        scale = float(_segre_coefficient(check.rank, check.k))
        w = RegularizedWeight.of(check.weights[0], settings.epsilon)
        est = numeric_lelong(w, check.k, point, settings, scale=scale)
    else:
        est = _slicing_product(check.weights, point, settings)

    passed = abs(est.value - float(symbolic)) <= tolerance
    LOGGER.info("oracle %s: numeric %.4f vs symbolic %s (%s)", check.quantity, est.value, symbolic, "pass" if passed else "FAIL")
    return OracleRow(
        quantity=check.quantity,
        epsilon=est.epsilon,
        grid=settings.grid_label,
        value=est.value,
        error_estimate=est.error,
        symbolic_value=symbolic,
        passed=passed,
        kind=check.kind,
    )


def _segre_coefficient(r: int, k: int) -> int:
    """s_k of e^{-w} Id is (-1)^k C(r+k-1, k) (dd^c w)^k."""
    return (-1) ** k * math.comb(r + k - 1, k)


def contained_in_polar_set(u: RegularizedWeight, zero_coords: FrozenSet[int], drop: float = 1.0) -> bool:
    """Does u_eps tend to -infinity at a generic point of {x_i = 0, i in zero_coords}?"""
    sample = np.array([[0j if i in zero_coords else complex(GENERIC_COORD) for i in range(1, u.base_dim + 1)]])
    coarse = float(u.with_epsilon(u.epsilon)(sample)[0])
    fine = float(u.with_epsilon(u.epsilon * 1e-2)(sample)[0])
    return coarse - fine > drop


def _slicing_product(weights: Sequence[Weight], point: BasePoint, settings: OracleSettings) -> LelongEstimate:
    """
    dd^c(u_outer 1_U dd^c u_inner) for a monomial inner weight: the inner current is
    a sum of coordinate divisors; each one outside the outer polar set carries the
    regularized outer mass of the slice.
    """
    if len(weights) != 2:
        raise PreconditionViolated("the slicing oracle handles two-factor products")
    inner, outer = weights
    if any(not isinstance(a, MonomialLog) for a in inner.atoms):
        raise PreconditionViolated("the slicing oracle needs a monomial inner weight")
    n = inner.ambient.base_dim
    if n != 2:
        raise PreconditionViolated("the slicing oracle runs on C^2")

    mult: Dict[int, Fraction] = {}
    for a in inner.atoms:
        for i, e in enumerate(a.exponents, start=1):
            if e:
                mult[i] = mult.get(i, Fraction(0)) + a.coeff * e

    outer_eps = RegularizedWeight.of(outer, settings.epsilon)
    value, error, eps = 0.0, 0.0, settings.epsilon
    for i in sorted(mult):
        divisor = frozenset([i])
        if i not in point.zeros:
            continue
        if contained_in_polar_set(outer_eps, divisor):
            LOGGER.debug("slice x%d=0 lies in the outer polar set", i)
            continue
        est = numeric_lelong(outer_eps.sliced(divisor), n - 1, point, settings)
        value += float(mult[i]) * est.value
        error += float(mult[i]) * est.error
        eps = est.epsilon
    return LelongEstimate(value=value, error=error, epsilon=eps)
