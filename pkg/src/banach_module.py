"""
The Banach A-module E = C(T) with action (F phi)(z) = sum_n F(n, z) sigma^n phi(z - n theta).

The one-sided sigma^n (not sigma^|n|) is kept as is; u_n 1 = sigma^n 1 is what
rules out an isometric action of Z on any Hilbert space containing E.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_SIGMA
from .crossed_algebra import (
    AlgebraElement,
    RotationParameter,
    Weight,
    embed_torus_function,
    unit_element,
    zero_element,
)
from .errors import NotCovered, PreconditionError, ToleranceNotMet
from .torus_function import (
    Interval,
    TorusFunction,
    min_abs,
    multiply,
    reciprocal,
    reduce_circle,
    sup_norm,
    translate,
)

logger = logging.getLogger(__name__)

SUPERLEVELS = (0.5, 0.25, 0.125, 0.0625)
RADII = (2, 4, 8, 16)


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """A vector phi of E with its cached sup-norm interval."""
    fn: TorusFunction
    sup: Interval

    @classmethod
    def of(cls, fn: TorusFunction, grid: int = DEFAULT_GRID) -> "ModuleVector":
        return cls(fn=fn, sup=sup_norm(fn, grid))

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        return ModuleVector.of(self.fn + other.fn)

    def scale(self, a: complex) -> "ModuleVector":
        return ModuleVector.of(self.fn.scale(a))


@dataclass
class CyclicSolution:
    """Element F with act(F, phi) ~ 1, and how it was built."""
    element: AlgebraElement
    translates: List[int]
    chi: TorusFunction
    chi_lower: float                   # Certified min of chi
    reciprocal_degree: int
    residual: float                    # Upper bound of ||act(F, phi) - 1||_inf


@dataclass
class NonUnitarizabilityRow:
    n: int
    norm: float                        # ||act(u_n, 1)||_inf
    ratio: float                       # To the previous row (1 at n = 0)


def act(F: AlgebraElement, phi: ModuleVector, grid: int = DEFAULT_GRID) -> ModuleVector:
    """
    (F phi)(z) = sum_n F(n, z) sigma^n phi(z - n theta), summed in increasing n.

    Args:
        F: Algebra element
        phi: Module vector

    Returns:
        The module vector F phi
    """
    base = F.weight.sigma
    th = F.theta.theta
    parts = []
    for n in F.support:
        piece = multiply(F.terms[n], translate(phi.fn, reduce_circle(n * th)))
        if not piece.is_zero:
            parts.append(piece.scale(base ** n))
    if not parts:
        return ModuleVector.of(TorusFunction.zero(), grid)
    if len(parts) == 1:
        return ModuleVector.of(parts[0], grid)
    lo = min(p.offset for p in parts)
    hi = max(p.offset + p.data.size for p in parts)
    acc = np.zeros(hi - lo, dtype=complex)
    for p in parts:
        acc[p.offset - lo:p.offset - lo + p.data.size] += p.data
    return ModuleVector.of(TorusFunction.from_dense(lo, acc), grid)


def action_bound(F: AlgebraElement, grid: int = DEFAULT_GRID) -> float:
    """sum_n sigma^n upper(||F(n)||_inf); bounds the operator norm of phi -> F phi."""
    base = F.weight.sigma
    return sum(base ** n * sup_norm(F.terms[n], grid)[1] for n in F.support)


def _candidates(radius: int) -> Iterator[int]:
    """0, 1, -1, 2, -2, ...: smallest |n| first, positive before negative."""
    yield 0
    for r in range(1, radius + 1):
        yield r
        yield -r


def covering_sum(psi: TorusFunction, translates: List[int], theta: RotationParameter, sigma: float) -> TorusFunction:
    """chi = sum_i sigma^{n_i} psi(z - n_i theta)."""
    chi = TorusFunction.zero()
    for n in translates:
        chi = chi + translate(psi, reduce_circle(n * theta.theta)).scale(sigma ** n)
    return chi


def _greedy_cover(psi: TorusFunction, theta: RotationParameter, level: float, radius: int, kmax: int, G: int) -> Optional[List[int]]:
    peak = float(np.max(psi.grid_values(G).real))
    masks = {}
    for n in _candidates(radius):
        vals = translate(psi, reduce_circle(n * theta.theta)).grid_values(G).real
        masks[n] = vals > level * peak

    covered = np.zeros(G, dtype=bool)
    chosen: List[int] = []
    while not covered.all():
        if len(chosen) >= kmax:
            return None
        best, best_gain = None, 0
        for n in _candidates(radius):
            if n in chosen:
                continue
            gain = int(np.count_nonzero(masks[n] & ~covered))
            if gain > best_gain:
                best, best_gain = n, gain
        if best is None:
            return None
        chosen.append(best)
        covered |= masks[best]
    return chosen


def find_covering_translates(
    psi: ModuleVector,
    theta: RotationParameter,
    kmax: int = 32,
    sigma: float = DEFAULT_SIGMA,
    grid: int = DEFAULT_GRID,
) -> List[int]:
    """
    Translates n_1..n_k with chi = sum_i sigma^{n_i} psi(z - n_i theta) certifiably positive.

    Greedy: repeatedly pick the translate whose superlevel set {psi > level * max}
    covers the most still-uncovered grid points. Search starts with half-max
    superlevel sets and |n| <= 2, then lowers the level and widens the radius,
    so the weights sigma^{n_i} stay in a narrow range.

    Args:
        psi: Nonnegative, not identically zero
        theta: Rotation parameter
        kmax: Maximum number of translates
        sigma: Action base
        grid: Minimum grid size

    Returns:
        The translates, in the order chosen

    Raises:
        PreconditionError: If psi is zero, not real, or negative on the grid
        NotCovered: If no admissible covering with at most kmax translates exists
    """
    fn = psi.fn
    if fn.is_zero or psi.sup[1] == 0.0:
        raise PreconditionError("psi is identically zero")
    if not fn.allclose(fn.conjugate(), 1e-12 * max(1.0, psi.sup[1])):
        raise PreconditionError("psi is not real-valued")
    G = max(grid, 16 * (fn.degree + 1))
    values = fn.grid_values(G).real
    if values.min() < -1e-12 * max(1.0, psi.sup[1]):
        raise PreconditionError(f"psi takes the negative value {values.min():.3e}")

    for radius in RADII:
        for level in SUPERLEVELS:
            chosen = _greedy_cover(fn, theta, level, radius, kmax, G)
            if chosen is None:
                continue
            chi = covering_sum(fn, chosen, theta, sigma)
            lower, _ = min_abs(chi, grid=G)
            if lower > 0.0:
                logger.debug(
                    "covering: %s (level %.4f, radius %d), certified min %.3e",
                    chosen, level, radius, lower,
                )
                return chosen
    raise NotCovered(f"no certified covering with at most {kmax} translates")


def cyclic_solution(
    phi: ModuleVector,
    tol: float,
    theta: RotationParameter,
    weight: Weight,
    kmax: int = 8,
    maxdeg_cap: int = 4096,
    grid: int = DEFAULT_GRID,
) -> CyclicSolution:
    """
    Build F = embed(1/chi) * (sum_i u_{n_i}) * embed(conj phi) with act(F, phi) ~ 1.

    psi = |phi|^2 = act(embed(conj phi), phi); chi = sum_i u_{n_i} psi; the
    reciprocal degree is doubled until the residual meets tol.

    Raises:
        PreconditionError: If phi is identically zero
        NotBoundedAway, ToleranceNotMet, NotCovered: From the steps above
    """
    if phi.fn.is_zero or phi.sup[0] <= 0.0:
        raise PreconditionError("phi is identically zero")
    sigma = weight.sigma
    conj_elem = embed_torus_function(phi.fn.conjugate(), theta, weight)
    psi = act(conj_elem, phi, grid)
    translates = find_covering_translates(psi, theta, kmax=kmax, sigma=sigma, grid=grid)
    shifts = zero_element(theta, weight)
    for n in translates:
        shifts = shifts + unit_element(theta, weight, n)
    chi = act(shifts, psi, grid).fn
    chi_lower, _ = min_abs(chi, grid=grid)

    maxdeg = max(16, 2 * chi.degree)
    last_error: Optional[Exception] = None
    while maxdeg <= maxdeg_cap:
        try:
            rho = reciprocal(chi, tol=tol / 2, maxdeg=maxdeg, grid=grid)
        except ToleranceNotMet as e:
            last_error = e
            maxdeg *= 2
            continue
        F = embed_torus_function(rho, theta, weight) * shifts * conj_elem
        residual = sup_norm(act(F, phi, grid).fn - 1.0, grid, refine=False)[1]
        if residual < tol:
            return CyclicSolution(
                element=F,
                translates=translates,
                chi=chi,
                chi_lower=chi_lower,
                reciprocal_degree=maxdeg,
                residual=residual,
            )
        last_error = ToleranceNotMet(f"residual {residual:.3e} >= {tol:.3e} at maxdeg={maxdeg}")
        maxdeg *= 2
    raise ToleranceNotMet(f"cyclic construction failed up to maxdeg={maxdeg_cap}: {last_error}")


def cyclic_solver(
    phi: ModuleVector,
    tol: float,
    theta: RotationParameter,
    weight: Weight,
    grid: int = DEFAULT_GRID,
) -> AlgebraElement:
    """F in A with ||act(F, phi) - 1||_inf < tol."""
    return cyclic_solution(phi, tol, theta, weight, grid=grid).element


def reach_target(
    phi: ModuleVector,
    eta: TorusFunction,
    tol: float,
    theta: RotationParameter,
    weight: Weight,
    grid: int = DEFAULT_GRID,
) -> Tuple[AlgebraElement, float]:
    """
    F_eta = embed(eta) * F with act(F_eta, phi) ~ eta.

    F is solved to tol / 4 so the residual stays below tol * ||eta||_inf
    after the sup-norm slack of the product.

    Returns:
        (F_eta, upper bound of ||act(F_eta, phi) - eta||_inf)
    """
    F = cyclic_solver(phi, tol / 4, theta, weight, grid)
    F_eta = embed_torus_function(eta, theta, weight) * F
    residual = sup_norm(act(F_eta, phi, grid).fn - eta, grid, refine=False)[1]
    return F_eta, residual


def nonunitarizability_report(
    nmax: int,
    sigma: float = DEFAULT_SIGMA,
    theta: Optional[RotationParameter] = None,
) -> List[NonUnitarizabilityRow]:
    """
    ||act(u_n, 1)||_inf for n = 0..nmax against the isometric value 1.

    Raises:
        PreconditionError: If nmax < 1
    """
    if nmax < 1:
        raise PreconditionError("nmax must be >= 1")
    theta = theta or RotationParameter.golden()
    weight = Weight(sigma)
    one = ModuleVector.of(TorusFunction.constant(1.0))
    rows: List[NonUnitarizabilityRow] = []
    for n in range(nmax + 1):
        norm = act(unit_element(theta, weight, n), one).sup[1]
        ratio = 1.0 if n == 0 else norm / rows[-1].norm
        rows.append(NonUnitarizabilityRow(n=n, norm=norm, ratio=ratio))
    return rows
