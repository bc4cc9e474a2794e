"""
Finite sections of the regular representation on l2(Z), norm and spectrum
estimates, Gelfand spectral radii in A, Neumann-series inversion and the
non-spectrality witness u_1 - lambda.

The representation pi_z0 sends F to the operator with matrix entries
M[m, m - n] = F(n, z0 + m theta); it is cut to indices |m| <= L.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .config import DEFAULT_GRID, DEFAULT_SIGMA, SELF_ADJOINT_TOLERANCE
from .crossed_algebra import (
    AlgebraElement,
    RotationParameter,
    Weight,
    adjoint,
    embed_torus_function,
    norm_A,
    norm_l1,
    project_P,
    unit_element,
)
from .errors import NotBoundedAway, NotSelfAdjoint, OutOfRange, PreconditionError, TooSmallL, ToleranceNotMet
from .sweep_runner import SweepRunner, grid_pairs
from .torus_function import evaluate, reciprocal

logger = logging.getLogger(__name__)

WITNESS_NOTE = (
    "The witness u_1 - lambda is a constructive reading of non-spectrality: "
    "the module action scales u_n 1 by sigma^n, exactly the weight, so the "
    "B-inverse -sum lambda^(-n-1) u_1^n has A-norm partial sums growing like (sigma/|lambda|)^N."
)


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """Compression of pi_z0(F) to indices |m| <= L."""
    L: int
    z0: float
    matrix: np.ndarray                 # (2L+1) x (2L+1), row/col m stored at m + L

    def entry(self, m: int, k: int) -> complex:
        return complex(self.matrix[m + self.L, k + self.L])

    def interior(self, margin: int) -> np.ndarray:
        """Rows |m| <= L - margin (all columns)."""
        lo, hi = margin, 2 * self.L + 1 - margin
        return self.matrix[lo:hi, :]


@dataclass
class NoCertificate:
    """Outcome of a failed Neumann-series inversion."""
    reason: str
    growth_ratio: Optional[float] = None       # Last observed ||R^k|| / ||R^(k-1)||
    norms: List[float] = field(default_factory=list)


@dataclass
class SectionRecord:
    """Finite-section data for one (L, z0) pair."""
    L: int
    z0: float
    opnorm_lower: float
    smallest_singular_value: float
    eigenvalues: Optional[List[float]] = None           # Self-adjoint case only
    interior_eigenvalues: Optional[List[float]] = None


@dataclass
class SpectralReport:
    """Norm sandwich, finite sections and the A-norm power sequence of one element."""
    element_id: str
    norm_A: Tuple[float, float]
    norm_l1: Tuple[float, float]
    opnorm: Tuple[float, float]
    records: List[SectionRecord]
    power_sequence: List[float]
    certified_upper: float


@dataclass
class WitnessReport:
    """Evidence that u_1 - lambda lies in A, is invertible in B, and not in A."""
    lam: complex
    sigma: float
    N: int
    L: int
    min_singular_value: float
    singular_bound: float                       # |lambda| - 1
    b_invertible: bool
    checked_diagonals: int
    coefficient_deviation: float
    coefficients_match: bool
    partial_sum_lower_bounds: List[float]
    ratios: List[float]
    limit_ratio: float                          # sigma / |lambda|
    a_divergent: bool
    a_inversion: Optional[NoCertificate]
    note: str = WITNESS_NOTE

    @property
    def passed(self) -> bool:
        return self.b_invertible and self.coefficients_match and self.a_divergent

    @property
    def verdict(self) -> str:
        if self.passed:
            return "element of A, invertible in B, A-norm of unique inverse diverges"
        return "inconclusive"


def default_base_points(seed: int = 0, count: int = 5) -> List[float]:
    """z0 = 0 plus `count` pseudo-random base points."""
    rng = np.random.default_rng(seed)
    return [0.0] + [float(z) for z in rng.random(count)]


def represent(F: AlgebraElement, L: int, z0: float = 0.0) -> TruncatedOperator:
    """
    Matrix of pi_z0(F) cut to |m| <= L.

    Args:
        F: Element
        L: Half-size, at least the support width
        z0: Base point

    Returns:
        TruncatedOperator

    Raises:
        TooSmallL: If L < width(F)
    """
    if L < F.width:
        raise TooSmallL(f"L={L} is smaller than the support width {F.width}")
    ms = np.arange(-L, L + 1)
    points = z0 + ms * F.theta.theta
    matrix = np.zeros((2 * L + 1, 2 * L + 1), dtype=complex)
    for n, f in F.terms.items():
        cols = ms - n
        mask = np.abs(cols) <= L
        matrix[ms[mask] + L, cols[mask] + L] = evaluate(f, points[mask])
    return TruncatedOperator(L=L, z0=float(z0), matrix=matrix)


def _largest_singular_value(F: AlgebraElement, L: int, z0: float) -> float:
    return float(scipy.linalg.svdvals(represent(F, L, z0).matrix)[0])


def opnorm_estimate(
    F: AlgebraElement,
    Ls: Sequence[int],
    z0s: Sequence[float],
    workers: int = 1,
    grid: int = DEFAULT_GRID,
) -> Tuple[float, float]:
    """
    Sandwich for the C*-norm ||F||_B.

    Compressions of pi(F) have norm at most ||F||_B, so their largest singular
    values bound it from below; the l1 norm bounds it from above.

    Args:
        F: Element
        Ls: Truncation sizes (each >= support width)
        z0s: Base points
        workers: Sweep threads
        grid: Sup-norm grid size

    Returns:
        (lower, upper) with lower <= upper
    """
    upper = norm_l1(F, grid)[1]
    if F.is_zero:
        return (0.0, 0.0)
    results = SweepRunner(workers).run(
        lambda L, z0: _largest_singular_value(F, L, z0), grid_pairs(Ls, z0s)
    )
    lower = max(value for _, value in results)
    return (min(lower, upper), upper)


def is_self_adjoint(F: AlgebraElement, tol: float = SELF_ADJOINT_TOLERANCE) -> bool:
    gap = norm_l1(F - adjoint(F))[1]
    return gap <= tol * max(1.0, norm_l1(F)[1])


def _hermitian_section(F: AlgebraElement, L: int, z0: float) -> np.ndarray:
    if not is_self_adjoint(F):
        raise NotSelfAdjoint("element differs from its adjoint by more than the tolerance")
    M = represent(F, L, z0).matrix
    return (M + M.conj().T) / 2.0


def eig_selfadjoint(F: AlgebraElement, L: int, z0: float = 0.0) -> List[float]:
    """
    Eigenvalues of the Hermitian finite section, ascending.

    Raises:
        NotSelfAdjoint: If F != F* within tolerance
        TooSmallL: If L < width(F)
    """
    return [float(x) for x in scipy.linalg.eigvalsh(_hermitian_section(F, L, z0))]


def section_record(F: AlgebraElement, L: int, z0: float, with_eigenvalues: bool) -> SectionRecord:
    """
    Norm, smallest singular value and (self-adjoint case) eigenvalues of one section.

    Eigenvalues whose eigenvectors keep more than 90% of their mass on
    |m| <= L/2 are also listed separately as interior eigenvalues.
    """
    M = represent(F, L, z0).matrix
    svals = scipy.linalg.svdvals(M)
    record = SectionRecord(
        L=L,
        z0=z0,
        opnorm_lower=float(svals[0]),
        smallest_singular_value=float(svals[-1]),
    )
    if with_eigenvalues:
        H = _hermitian_section(F, L, z0)
        values, vectors = scipy.linalg.eigh(H)
        ms = np.arange(-L, L + 1)
        inner = np.abs(ms) <= L / 2
        mass = np.sum(np.abs(vectors[inner, :]) ** 2, axis=0)
        record.eigenvalues = [float(x) for x in values]
        record.interior_eigenvalues = [float(x) for x in values[mass > 0.9]]
    return record


def spectral_radius_A(F: AlgebraElement, nmax: int, grid: int = DEFAULT_GRID) -> Tuple[List[float], float]:
    """
    Gelfand sequence s_n = upper(||F^n||_A)^(1/n), n = 1..nmax.

    Returns:
        (sequence, certified_upper) with certified_upper = min_n s_n
    """
    if nmax < 1:
        raise PreconditionError("nmax must be >= 1")
    sequence = []
    P = F
    for n in range(1, nmax + 1):
        if n > 1:
            P = P * F
        sequence.append(norm_A(P, grid)[1] ** (1.0 / n))
    return sequence, min(sequence)


def _reciprocal_of_zero_term(F: AlgebraElement, maxdeg_cap: int):
    """Reciprocal of F(0), raising the degree until a tight residual is met."""
    phi0 = project_P(F)
    maxdeg = 8
    while maxdeg <= maxdeg_cap:
        try:
            return reciprocal(phi0, tol=1e-12, maxdeg=maxdeg)
        except ToleranceNotMet:
            maxdeg *= 2
    # A loose reciprocal still works; its error ends up in R
    return reciprocal(phi0, tol=0.5, maxdeg=maxdeg_cap)


def invert_in_A(
    F: AlgebraElement,
    tol: float,
    max_terms: int,
    maxdeg_cap: int = 256,
    grid: int = DEFAULT_GRID,
) -> Union[AlgebraElement, NoCertificate]:
    """
    Certified inverse in A by a Neumann series.

    Writes F = embed(phi0) (u_0 - R) with rho ~ 1/phi0 and R = u_0 - embed(rho) F,
    then G = (sum_k R^k) embed(rho). Stops when ||R^K||_A is below the
    tolerance and both residuals ||FG - u_0||_A, ||GF - u_0||_A verify.

    Args:
        F: Element to invert
        tol: Residual tolerance
        max_terms: Maximum number of series terms
        maxdeg_cap: Largest degree tried for the reciprocal of F(0)
        grid: Sup-norm grid size

    Returns:
        G, or NoCertificate with the observed growth ratio of ||R^k||_A
    """
    if F.is_zero or project_P(F).is_zero:
        return NoCertificate(reason="F(0) vanishes")
    try:
        rho = _reciprocal_of_zero_term(F, maxdeg_cap)
    except (NotBoundedAway, ToleranceNotMet) as e:
        return NoCertificate(reason=f"F(0) not invertible in C(T): {e}")

    u0 = unit_element(F.theta, F.weight, 0)
    rho_elem = embed_torus_function(rho, F.theta, F.weight)
    R = u0 - rho_elem * F
    # ||F G - u_0|| <= ||phi0|| ||R^K|| ||rho||
    right_factor = max(1.0, norm_A(rho_elem, grid)[1] * norm_A(F, grid)[1])

    S = u0
    Rk = u0
    norms: List[float] = []
    ratio = None
    rising = 0
    for k in range(1, max_terms + 1):
        Rk = Rk * R
        nk = norm_A(Rk, grid)[1]
        if norms and norms[-1] > 0:
            ratio = nk / norms[-1]
            rising = rising + 1 if ratio >= 1.0 else 0
        norms.append(nk)

        if nk * right_factor < tol / 2:
            G = S * rho_elem
            left = norm_A(G * F - u0, grid)[1]
            right = norm_A(F * G - u0, grid)[1]
            if left < tol and right < tol:
                logger.debug("invert_in_A: certified with %d terms (residuals %.2e, %.2e)", k, left, right)
                return G
            logger.debug("invert_in_A: residual check failed at %d terms, continuing", k)

        if rising >= 5:
            return NoCertificate(reason="||R^k||_A does not shrink", growth_ratio=ratio, norms=norms)
        S = S + Rk

    return NoCertificate(reason=f"no certificate within {max_terms} terms", growth_ratio=ratio, norms=norms)


def quasi_inverse_check(a: AlgebraElement, b: AlgebraElement, tol: float, grid: int = DEFAULT_GRID) -> bool:
    """True iff ||a + b - ab||_A and ||a + b - ba||_A are both below tol."""
    s = a + b
    return norm_A(s - a * b, grid)[1] < tol and norm_A(s - b * a, grid)[1] < tol


def quasi_inverse(a: AlgebraElement, tol: float, max_terms: int) -> Union[AlgebraElement, NoCertificate]:
    """b = u_0 - (u_0 - a)^(-1), when the inverse is certified."""
    u0 = unit_element(a.theta, a.weight, 0)
    G = invert_in_A(u0 - a, tol=tol / 4, max_terms=max_terms)
    if isinstance(G, NoCertificate):
        return G
    return u0 - G


def spectral_report(
    F: AlgebraElement,
    Ls: Sequence[int],
    z0s: Sequence[float],
    nmax: int = 12,
    element_id: str = "element",
    workers: int = 1,
    grid: int = DEFAULT_GRID,
    progress=None,
) -> SpectralReport:
    """
    Assemble norms, finite sections and the Gelfand sequence of F.

    Section records are computed in parallel and merged sorted by (L, z0).
    """
    self_adjoint = is_self_adjoint(F)
    results = SweepRunner(workers, progress).run(
        lambda L, z0: section_record(F, L, z0, self_adjoint), grid_pairs(Ls, z0s)
    )
    records = [record for _, record in results]
    l1 = norm_l1(F, grid)
    lower = max((r.opnorm_lower for r in records), default=0.0)
    sequence, certified = spectral_radius_A(F, nmax, grid)
    return SpectralReport(
        element_id=element_id,
        norm_A=norm_A(F, grid),
        norm_l1=l1,
        opnorm=(min(lower, l1[1]), l1[1]),
        records=records,
        power_sequence=sequence,
        certified_upper=certified,
    )


def nonspectrality_witness(
    lam: complex,
    N: int,
    L: int,
    sigma: float = DEFAULT_SIGMA,
    theta: Optional[RotationParameter] = None,
    z0: float = 0.0,
    max_diagonal: int = 20,
    grid: int = DEFAULT_GRID,
) -> WitnessReport:
    """
    Evidence that u_1 - lambda (1 < |lambda| < sigma) is invertible in B but not in A.

    (a) smallest singular value of S_L - lambda I is at least |lambda| - 1;
    (b) the inverted truncation has -lambda^(-n-1) on its n-th subdiagonal;
    (c) the partial sums of the B-inverse have A-norm lower bounds growing
        with ratio sigma/|lambda| > 1.

    Raises:
        OutOfRange: If |lambda| <= 1 or |lambda| >= sigma
        PreconditionError: If N < 2 or L < 2
    """
    r = abs(lam)
    if not 1.0 < r < sigma:
        raise OutOfRange(f"|lambda| = {r:g} must lie strictly between 1 and sigma = {sigma:g}")
    if N < 2 or L < 2:
        raise PreconditionError("N and L must be >= 2")
    theta = theta or RotationParameter.golden()
    weight = Weight(sigma)
    u1 = unit_element(theta, weight, 1)
    u0 = unit_element(theta, weight, 0)

    # (a) B-side resolvent bound
    T = represent(u1, L, z0).matrix - lam * np.eye(2 * L + 1)
    smin = float(scipy.linalg.svdvals(T)[-1])
    bound = r - 1.0
    b_invertible = smin >= bound - 1e-10

    # (b) inverse coefficients on the subdiagonals
    Tinv = scipy.linalg.inv(T)
    checked = min(max_diagonal, 2 * L)
    deviation = 0.0
    for n in range(checked + 1):
        diag = np.diagonal(Tinv, offset=-n)
        deviation = max(deviation, float(np.max(np.abs(diag + lam ** (-n - 1)))))
    coefficients_match = deviation < 1e-10

    # (c) A-norm growth of the partial sums
    partial = u0.scale(0.0)
    lower_bounds: List[float] = []
    for n in range(N + 1):
        partial = partial + unit_element(theta, weight, n).scale(-(lam ** (-n - 1)))
        lower_bounds.append(norm_A(partial, grid)[0])
    ratios = [lower_bounds[i] / lower_bounds[i - 1] for i in range(1, len(lower_bounds))]
    a_divergent = all(x > 1.0 for x in ratios) and all(
        b > a for a, b in zip(lower_bounds, lower_bounds[1:])
    )

    attempt = invert_in_A(u1 - u0.scale(lam), tol=1e-10, max_terms=N)
    a_inversion = attempt if isinstance(attempt, NoCertificate) else None

    return WitnessReport(
        lam=complex(lam),
        sigma=sigma,
        N=N,
        L=L,
        min_singular_value=smin,
        singular_bound=bound,
        b_invertible=b_invertible,
        checked_diagonals=checked,
        coefficient_deviation=deviation,
        coefficients_match=coefficients_match,
        partial_sum_lower_bounds=lower_bounds,
        ratios=ratios,
        limit_ratio=sigma / r,
        a_divergent=a_divergent,
        a_inversion=a_inversion,
    )
