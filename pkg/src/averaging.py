"""
Averaging by unimodular characters: conjugation, plan search and the
approximation of the projection P by (1/M) sum_j u_j* F u_j.

Conjugating by the character e_k(z) = exp(2 pi i k z) multiplies the n-th term
by exp(-2 pi i k n theta), so averaging over k = q, 2q, ..., Mq damps every
n != 0 term by a geometric sum while fixing F(0).
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .config import DEFAULT_GRID, PLAN_M_CEILING, UNIMODULAR_TOLERANCE
from .crossed_algebra import (
    AlgebraElement,
    RotationParameter,
    embed_torus_function,
    norm_A,
    project_P,
    truncate_support,
)
from .errors import NoPlanFound, NotUnimodular, PreconditionError
from .torus_function import TorusFunction, reduce_circle

logger = logging.getLogger(__name__)

_CHUNK = 1 << 16
# Explicit conjugation sums are only attempted for small families
EXPLICIT_M_LIMIT = 4096


@dataclass
class AveragingPlan:
    """Character family e_{jq}, j = 1..M, with its a priori damping error."""
    N: int                             # Support cutoff
    epsilon: float                     # Target for predicted_error
    M: int                             # Family size
    q: int                             # Frequency step (a convergent denominator)
    theta: float
    predicted_error: float             # max_{0<|n|<=N} |character mean at n|

    @property
    def frequencies(self) -> List[int]:
        return [j * self.q for j in range(1, self.M + 1)]


@dataclass
class SimplicityReport:
    """Quantities of the averaging estimate for one element."""
    epsilon: float
    N: int
    tail: float
    plan: AveragingPlan
    error_bound: float
    measured: float

    @property
    def passed(self) -> bool:
        return self.measured < 2.0 * self.epsilon


def _damping(M: int, x: float) -> float:
    """|sin(pi M x) / (M sin(pi x))|, the modulus of the mean of M roots."""
    s = math.sin(math.pi * x)
    if abs(s) < 1e-15:
        return 1.0
    return abs(math.sin(math.pi * M * x) / (M * s))


def character_mean(q: int, M: int, theta: float, n: int) -> complex:
    """
    (1/M) sum_{j=1..M} exp(-2 pi i j q n theta), summed in increasing j.

    Args:
        q: Frequency step
        M: Family size
        theta: Rotation number
        n: Term index

    Returns:
        The averaged phase applied to the n-th term
    """
    if n == 0:
        return 1.0 + 0.0j
    x = reduce_circle(q * n * theta)
    total = 0.0 + 0.0j
    for start in range(1, M + 1, _CHUNK):
        j = np.arange(start, min(start + _CHUNK, M + 1), dtype=float)
        total += np.sum(np.exp(-2j * np.pi * reduce_circle(j * x)))
    return complex(total / M)


def _max_mean(q: int, M: int, theta: float, N: int) -> float:
    return max(abs(character_mean(q, M, theta, n)) for n in range(1, N + 1))


def plan_average(
    N: int,
    epsilon: float,
    theta: RotationParameter,
    ceiling: int = PLAN_M_CEILING,
) -> AveragingPlan:
    """
    Choose a character family that damps every 0 < |n| <= N below epsilon.

    For each convergent denominator q of theta, M runs through 1, 2, 4, ...
    (the damping never increases along doublings) until the geometric sums
    meet the target. The smallest M wins, ties going to the smaller q. The
    recorded predicted_error is the direct evaluation of the sums.

    Args:
        N: Support cutoff, N >= 0
        epsilon: Target error, > 0
        theta: Rotation parameter
        ceiling: Largest admissible M

    Returns:
        AveragingPlan

    Raises:
        NoPlanFound: If epsilon <= 0 or no family within the ceiling works
    """
    if N < 0:
        raise PreconditionError(f"N must be >= 0, got {N}")
    if not epsilon > 0:
        raise NoPlanFound("epsilon must be positive; exact cancellation is not attempted")
    th = theta.theta
    if N == 0:
        return AveragingPlan(N=0, epsilon=epsilon, M=1, q=1, theta=th, predicted_error=0.0)

    best = None
    for q in theta.denominators():
        xs = [reduce_circle(q * n * th) for n in range(1, N + 1)]
        M = 1
        while M <= ceiling and max(_damping(M, x) for x in xs) > epsilon:
            M *= 2
        if M <= ceiling and (best is None or M < best[0]):
            best = (M, q)
        logger.debug("plan_average: q=%d needs M=%d", q, M)

    if best is None:
        raise NoPlanFound(f"no character family with M <= {ceiling} reaches {epsilon:g} for N={N}")

    M, q = best
    predicted = _max_mean(q, M, th, N)
    while predicted > epsilon and 2 * M <= ceiling:
        M *= 2
        predicted = _max_mean(q, M, th, N)
    if predicted > epsilon:
        raise NoPlanFound(f"direct evaluation {predicted:.3e} exceeds {epsilon:g} at the ceiling")
    return AveragingPlan(N=N, epsilon=epsilon, M=M, q=q, theta=th, predicted_error=predicted)


def conjugate_by_character(F: AlgebraElement, k: int) -> AlgebraElement:
    """Closed form of e_k* F e_k: the n-th term times exp(-2 pi i k n theta)."""
    th = F.theta.theta
    return F.with_terms({
        n: f.scale(np.exp(-2j * np.pi * reduce_circle(k * n * th)))
        for n, f in F.terms.items()
    })


def conjugate_by_unimodular(F: AlgebraElement, u: TorusFunction, grid: int = DEFAULT_GRID) -> AlgebraElement:
    """
    u* F u, computed with the algebra product.

    Args:
        F: Element
        u: Unimodular function
        grid: Grid size for the unimodularity check

    Returns:
        embed(conj u) * F * embed(u)

    Raises:
        NotUnimodular: If | |u(z)| - 1 | exceeds the tolerance on the grid
    """
    if u.is_zero:
        raise NotUnimodular("zero function")
    G = max(grid, 8 * (u.degree + 1))
    deviation = float(np.max(np.abs(np.abs(u.grid_values(G)) - 1.0)))
    if deviation > UNIMODULAR_TOLERANCE:
        raise NotUnimodular(f"| |u| - 1 | reaches {deviation:.3e} on the grid")
    left = embed_torus_function(u.conjugate(), F.theta, F.weight)
    right = embed_torus_function(u, F.theta, F.weight)
    return left * F * right


def average_toward_P(
    F: AlgebraElement,
    plan: AveragingPlan,
    explicit: bool = False,
    grid: int = DEFAULT_GRID,
) -> Tuple[AlgebraElement, float]:
    """
    (1/M) sum_j e_{f_j}* F e_{f_j} and an a priori bound on its distance to P(F).

    The default path multiplies each term by its character mean, which equals
    the average of the M character conjugations; explicit=True sums the
    conjugations themselves (small M only).

    Args:
        F: Element
        plan: Averaging plan
        explicit: Sum the generic conjugations
        grid: Sup-norm grid size

    Returns:
        (avg, error_bound) with error_bound = tail beyond N + predicted_error * ||F_head||_A
    """
    if plan.theta != F.theta.theta:
        raise PreconditionError("plan was built for a different theta")
    F1, tail = truncate_support(F, plan.N, grid)
    head = F1.with_terms({n: f for n, f in F1.terms.items() if n != 0})
    # Outward rounding of the floating-point sum
    error_bound = (tail + plan.predicted_error * norm_A(head, grid)[1]) * (1.0 + 1e-12)

    if explicit:
        if plan.M > EXPLICIT_M_LIMIT:
            raise PreconditionError(f"explicit averaging limited to M <= {EXPLICIT_M_LIMIT}")
        total = F.scale(0.0)
        for k in plan.frequencies:
            total = total + conjugate_by_unimodular(F, TorusFunction.character(k), grid)
        return total.scale(1.0 / plan.M), error_bound

    terms = {}
    for n, f in F.terms.items():
        terms[n] = f if n == 0 else f.scale(character_mean(plan.q, plan.M, plan.theta, n))
    return F.with_terms(terms), error_bound


def choose_cutoff(F: AlgebraElement, epsilon: float, grid: int = DEFAULT_GRID) -> Tuple[int, float]:
    """Smallest N with tail ||F - F_N||_A < epsilon."""
    for N in range(F.width + 1):
        _, tail = truncate_support(F, N, grid)
        if tail < epsilon:
            return N, tail
    return F.width, 0.0


def reproduce_estimate(
    F: AlgebraElement,
    epsilon: float,
    grid: int = DEFAULT_GRID,
    ceiling: int = PLAN_M_CEILING,
) -> SimplicityReport:
    """
    Run cutoff, plan and average for F and measure ||embed(P(F)) - avg||_A.

    The plan target is epsilon / max(1, ||F_head||_A), so the averaged head
    contributes at most epsilon and the total stays below 2 epsilon.

    Raises:
        NoPlanFound: If epsilon <= 0 or the ceiling is too small
    """
    if not epsilon > 0:
        raise NoPlanFound("epsilon must be positive; exact cancellation is not attempted")
    N, tail = choose_cutoff(F, epsilon, grid)
    F1, _ = truncate_support(F, N, grid)
    head_norm = norm_A(F1.with_terms({n: f for n, f in F1.terms.items() if n != 0}), grid)[1]
    plan = plan_average(N, epsilon / max(1.0, head_norm), F.theta, ceiling)
    avg, bound = average_toward_P(F, plan, grid=grid)
    measured = norm_A(embed_torus_function(project_P(F), F.theta, F.weight) - avg, grid)[1]
    return SimplicityReport(
        epsilon=epsilon, N=N, tail=tail, plan=plan, error_bound=bound, measured=measured
    )
