"""
The crossed product of Z acting on C(T) by rotation, and its weighted
Banach subalgebra A with norm ||F||_A = sum_n sigma^|n| ||F(n)||_inf.

Elements are finitely supported maps n -> TorusFunction. The product is the
twisted convolution (F*G)(n, z) = sum_m F(m, z) G(n - m, z - m theta).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_GRID, DEFAULT_SIGMA, GOLDEN_THETA
from .errors import MismatchedParameters, PreconditionError
from .torus_function import (
    Interval,
    TorusFunction,
    multiply as multiply_functions,
    reduce_circle,
    sup_norm,
    translate,
)


@dataclass(frozen=True)
class RotationParameter:
    """Rotation number theta with optional continued-fraction convergents."""
    theta: float
    irrational: bool = True                              # Declared, not checked
    convergents: Tuple[Tuple[int, int], ...] = ()       # (p_i, q_i)

    def __post_init__(self):
        if not 0.0 < self.theta < 1.0:
            raise PreconditionError(f"theta must lie in (0, 1), got {self.theta}")
        for p, q in self.convergents:
            if q < 1 or not abs(self.theta - p / q) < 1.0 / (q * q):
                raise PreconditionError(f"{p}/{q} is not a convergent of theta={self.theta!r}")

    @classmethod
    def from_theta(cls, theta: float, depth: int = 12, irrational: bool = True) -> "RotationParameter":
        """
        Compute the continued-fraction convergents of theta.

        Args:
            theta: Rotation number in (0, 1)
            depth: Number of partial quotients to expand
            irrational: Declared irrationality flag

        Returns:
            RotationParameter with convergents p_i/q_i, q_i >= 1
        """
        if not 0.0 < theta < 1.0:
            raise PreconditionError(f"theta must lie in (0, 1), got {theta}")
        convergents = []
        p_prev, p = 1, 0        # p_{-1}, p_0 for a_0 = 0
        q_prev, q = 0, 1
        x = theta
        for _ in range(depth):
            if x < 1e-12:
                break
            x = 1.0 / x
            a = int(math.floor(x))
            x -= a
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            if abs(theta - p / q) < 1.0 / (q * q):
                convergents.append((p, q))
        return cls(theta=theta, irrational=irrational, convergents=tuple(convergents))

    @classmethod
    def golden(cls) -> "RotationParameter":
        return cls.from_theta(GOLDEN_THETA)

    @classmethod
    def from_strings(cls, theta: float, convergents: Optional[List[str]]) -> "RotationParameter":
        """Parse "p/q" convergent strings; compute them when none are given."""
        if not convergents:
            return cls.from_theta(theta)
        pairs = []
        for text in convergents:
            frac = Fraction(text)
            pairs.append((frac.numerator, frac.denominator))
        return cls(theta=theta, convergents=tuple(pairs))

    def denominators(self) -> List[int]:
        """Distinct convergent denominators in increasing order, always including 1."""
        return sorted({1, *(q for _, q in self.convergents)})


@dataclass(frozen=True)
class Weight:
    """Exponential weight omega(n) = sigma^|n|."""
    sigma: float = DEFAULT_SIGMA

    def __post_init__(self):
        if not self.sigma >= 1.0:
            raise PreconditionError(f"weight base must be >= 1, got {self.sigma}")

    def __call__(self, n: int) -> float:
        return self.sigma ** abs(n)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """Finitely supported element n -> F(n) of the crossed product."""
    theta: RotationParameter
    weight: Weight
    terms: Mapping[int, TorusFunction] = field(default_factory=dict)

    @classmethod
    def from_terms(
        cls,
        theta: RotationParameter,
        weight: Weight,
        terms: Mapping[int, TorusFunction],
    ) -> "AlgebraElement":
        """Drop zero terms, sort by n and freeze the mapping."""
        kept = {int(n): f for n, f in sorted(terms.items()) if not f.is_zero}
        return cls(theta=theta, weight=weight, terms=MappingProxyType(kept))

    @property
    def support(self) -> List[int]:
        return sorted(self.terms)

    @property
    def width(self) -> int:
        """max |n| over the support."""
        return max((abs(n) for n in self.terms), default=0)

    @property
    def max_degree(self) -> int:
        return max((f.degree for f in self.terms.values()), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def term(self, n: int) -> TorusFunction:
        return self.terms.get(n, TorusFunction.zero())

    def _check(self, other: "AlgebraElement"):
        if self.theta.theta != other.theta.theta or self.weight.sigma != other.weight.sigma:
            raise MismatchedParameters(
                f"theta/sigma mismatch: ({self.theta.theta}, {self.weight.sigma}) "
                f"vs ({other.theta.theta}, {other.weight.sigma})"
            )

    def with_terms(self, terms: Mapping[int, TorusFunction]) -> "AlgebraElement":
        return AlgebraElement.from_terms(self.theta, self.weight, terms)

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        terms: Dict[int, TorusFunction] = dict(self.terms)
        for n, f in other.terms.items():
            terms[n] = terms[n] + f if n in terms else f
        return self.with_terms(terms)

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1.0)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, a: complex) -> "AlgebraElement":
        return self.with_terms({n: f.scale(a) for n, f in self.terms.items()})

    def __mul__(self, other: Union["AlgebraElement", Number]) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            return multiply(self, other)
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: Number) -> "AlgebraElement":
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{n}: {f!r}" for n, f in self.terms.items())
        return f"AlgebraElement(theta={self.theta.theta}, sigma={self.weight.sigma}, {{{body}}})"


def unit_element(theta: RotationParameter, weight: Weight, n: int) -> AlgebraElement:
    """u_n = delta_n (x) 1; u_0 is the identity."""
    return AlgebraElement.from_terms(theta, weight, {n: TorusFunction.constant(1.0)})


def zero_element(theta: RotationParameter, weight: Weight) -> AlgebraElement:
    return AlgebraElement.from_terms(theta, weight, {})


def embed_torus_function(phi: TorusFunction, theta: RotationParameter, weight: Weight) -> AlgebraElement:
    """The element supported at {0} with F(0) = phi."""
    return AlgebraElement.from_terms(theta, weight, {0: phi})


def multiply(F: AlgebraElement, G: AlgebraElement) -> AlgebraElement:
    """
    Twisted convolution (F*G)(n, z) = sum_m F(m, z) G(n - m, z - m theta).

    Contributions are accumulated per n in increasing m, so the result is
    deterministic.

    Args:
        F: Left factor
        G: Right factor

    Returns:
        F*G, supported in support(F) + support(G)

    Raises:
        MismatchedParameters: If theta or weight differ
    """
    F._check(G)
    theta = F.theta.theta
    pieces: Dict[int, List[TorusFunction]] = {}
    for m in F.support:
        fm = F.terms[m]
        shift = reduce_circle(m * theta)
        for k in G.support:
            prod = multiply_functions(fm, translate(G.terms[k], shift))
            if not prod.is_zero:
                pieces.setdefault(m + k, []).append(prod)

    terms = {}
    for n in sorted(pieces):
        parts = pieces[n]
        if len(parts) == 1:
            terms[n] = parts[0]
            continue
        lo = min(p.offset for p in parts)
        hi = max(p.offset + p.data.size for p in parts)
        acc = np.zeros(hi - lo, dtype=complex)
        for p in parts:
            acc[p.offset - lo:p.offset - lo + p.data.size] += p.data
        terms[n] = TorusFunction.from_dense(lo, acc)
    return F.with_terms(terms)


def power(F: AlgebraElement, k: int) -> AlgebraElement:
    """F^k by repeated multiplication; F^0 = u_0."""
    if k < 0:
        raise PreconditionError("negative powers are not defined here")
    result = unit_element(F.theta, F.weight, 0)
    for _ in range(k):
        result = multiply(result, F)
    return result


def adjoint(F: AlgebraElement) -> AlgebraElement:
    """Involution F*(n, z) = conj(F(-n, z - n theta))."""
    theta = F.theta.theta
    terms = {}
    for n, f in F.terms.items():
        # F*(-n, z) = conj(F(n, z + n theta))
        terms[-n] = translate(f, -n * theta).conjugate()
    return F.with_terms(terms)


def norm_A(F: AlgebraElement, grid: int = DEFAULT_GRID) -> Interval:
    """Interval for sum_n sigma^|n| ||F(n)||_inf, summed in increasing n."""
    lower = upper = 0.0
    for n in F.support:
        lo, hi = sup_norm(F.terms[n], grid)
        w = F.weight(n)
        lower += w * lo
        upper += w * hi
    return (lower, upper)


def norm_l1(F: AlgebraElement, grid: int = DEFAULT_GRID) -> Interval:
    """Interval for sum_n ||F(n)||_inf (the weight collapsed to 1)."""
    lower = upper = 0.0
    for n in F.support:
        lo, hi = sup_norm(F.terms[n], grid)
        lower += lo
        upper += hi
    return (lower, upper)


def project_P(F: AlgebraElement) -> TorusFunction:
    """P(F) = F(0)."""
    return F.term(0)


def truncate_support(F: AlgebraElement, N: int, grid: int = DEFAULT_GRID) -> Tuple[AlgebraElement, float]:
    """
    Keep the terms with |n| <= N.

    Args:
        F: Element
        N: Cutoff, N >= 0
        grid: Sup-norm grid size

    Returns:
        (F1, tail) with tail an upper bound for ||F - F1||_A
    """
    if N < 0:
        raise PreconditionError(f"cutoff must be >= 0, got {N}")
    kept = {n: f for n, f in F.terms.items() if abs(n) <= N}
    dropped = F.with_terms({n: f for n, f in F.terms.items() if abs(n) > N})
    return F.with_terms(kept), norm_A(dropped, grid)[1]


def fourier_coefficient(F: AlgebraElement, n: int) -> TorusFunction:
    """Recover F(n) as P(F * u_{-n})."""
    return project_P(multiply(F, unit_element(F.theta, F.weight, -n)))


def vanishes_under_P(F: AlgebraElement, tol: float = 0.0, grid: int = DEFAULT_GRID) -> bool:
    """
    True iff P(F * u_{-n}) vanishes (sup norm <= tol) for every n in the
    support window; on finitely supported elements this is equivalent to F = 0.
    """
    for n in range(-F.width, F.width + 1):
        if sup_norm(fourier_coefficient(F, n), grid)[1] > tol:
            return False
    return True


def allclose(F: AlgebraElement, G: AlgebraElement, tol: float = 1e-12, grid: int = DEFAULT_GRID) -> bool:
    """Upper bound of ||F - G||_A at most tol."""
    return norm_A(F - G, grid)[1] <= tol
