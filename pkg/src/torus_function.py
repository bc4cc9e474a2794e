"""
Trigonometric polynomials on the circle T = R/Z.

A TorusFunction stores the Fourier coefficients c_k of
phi(z) = sum_k c_k exp(2 pi i k z) as a dense complex array starting at
frequency `offset`. Values are immutable; every operation returns a new object.
"""

import logging
import math
from dataclasses import dataclass
from numbers import Number
from typing import Dict, Tuple, Union

import numpy as np

from .config import (
    DEFAULT_GRID,
    DROP_TOLERANCE,
    MAX_REFINED_GRID,
    POSITIVITY_FLOOR,
    SUP_NORM_MAX_PIECES,
    SUP_NORM_OVERSAMPLING,
    SUP_NORM_POLISH_STEPS,
)
from .errors import NotBoundedAway, ToleranceNotMet

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]


def reduce_circle(z):
    """
    Reduce circle points to [0, 1).

    Uses round-half-even subtraction so the result is deterministic.

    Args:
        z: Real number or array

    Returns:
        Same shape, values in [0, 1)
    """
    z = np.asarray(z, dtype=float)
    r = z - np.round(z)
    r = np.where(r < 0.0, r + 1.0, r)
    # r + 1.0 can round up to exactly 1.0 for tiny negative r
    r = np.where(r >= 1.0, 0.0, r)
    if r.ndim == 0:
        return float(r)
    return r


@dataclass(frozen=True, eq=False)
class TorusFunction:
    """Trigonometric polynomial with finitely many nonzero coefficients."""
    offset: int                        # Frequency of data[0]
    data: np.ndarray                   # Dense complex coefficients, no zero ends

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_dense(cls, offset: int, data, drop_tol: float = DROP_TOLERANCE) -> "TorusFunction":
        """
        Build a normalized function from a dense coefficient block.

        Coefficients below drop_tol * max|c_k| are removed and the block is
        trimmed to its nonzero range.

        Args:
            offset: Frequency of data[0]
            data: Coefficient array
            drop_tol: Relative drop tolerance

        Returns:
            Normalized TorusFunction
        """
        arr = np.array(data, dtype=complex).ravel()
        if arr.size == 0:
            return cls.zero()
        mags = np.abs(arr)
        peak = mags.max()
        if peak == 0.0 or not np.isfinite(peak):
            if not np.isfinite(peak):
                raise ValueError("coefficients must be finite")
            return cls.zero()
        arr[mags < drop_tol * peak] = 0.0
        nz = np.flatnonzero(arr)
        arr = arr[nz[0]:nz[-1] + 1].copy()
        arr.setflags(write=False)
        return cls(offset=int(offset) + int(nz[0]), data=arr)

    @classmethod
    def zero(cls) -> "TorusFunction":
        arr = np.zeros(0, dtype=complex)
        arr.setflags(write=False)
        return cls(offset=0, data=arr)

    @classmethod
    def constant(cls, c: complex) -> "TorusFunction":
        return cls.from_dense(0, [c])

    @classmethod
    def character(cls, k: int, amplitude: complex = 1.0) -> "TorusFunction":
        """exp(2 pi i k z), optionally scaled."""
        return cls.from_dense(k, [amplitude])

    @classmethod
    def from_coeffs(cls, coeffs: Dict[int, complex], drop_tol: float = DROP_TOLERANCE) -> "TorusFunction":
        """
        Build from a {frequency: amplitude} mapping.

        Args:
            coeffs: Mapping k -> c_k
            drop_tol: Relative drop tolerance

        Returns:
            TorusFunction
        """
        if not coeffs:
            return cls.zero()
        lo, hi = min(coeffs), max(coeffs)
        arr = np.zeros(hi - lo + 1, dtype=complex)
        for k, c in coeffs.items():
            arr[k - lo] += c
        return cls.from_dense(lo, arr, drop_tol)

    # ------------------------------------------------------------------
    # Basic properties
    # ------------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.data.size == 0

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.data.size)

    @property
    def degree(self) -> int:
        """K = max |k| over the support (0 for the zero function)."""
        if self.is_zero:
            return 0
        return max(abs(self.offset), abs(self.offset + self.data.size - 1))

    @property
    def coeffs(self) -> Dict[int, complex]:
        """Nonzero coefficients as {k: c_k}, sorted by k."""
        return {int(k): complex(c) for k, c in zip(self.frequencies, self.data) if c != 0}

    def coefficient(self, k: int) -> complex:
        idx = k - self.offset
        if 0 <= idx < self.data.size:
            return complex(self.data[idx])
        return 0j

    def l1_coefficients(self) -> float:
        """Sum of |c_k|, the Wiener-algebra bound for the sup norm."""
        return float(np.sum(np.abs(self.data)))

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def __add__(self, other: Union["TorusFunction", Number]) -> "TorusFunction":
        if isinstance(other, Number):
            other = TorusFunction.constant(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.offset, other.offset)
        hi = max(self.offset + self.data.size, other.offset + other.data.size)
        arr = np.zeros(hi - lo, dtype=complex)
        arr[self.offset - lo:self.offset - lo + self.data.size] += self.data
        arr[other.offset - lo:other.offset - lo + other.data.size] += other.data
        return TorusFunction.from_dense(lo, arr)

    __radd__ = __add__

    def __neg__(self) -> "TorusFunction":
        if self.is_zero:
            return self
        return TorusFunction.from_dense(self.offset, -self.data)

    def __sub__(self, other: Union["TorusFunction", Number]) -> "TorusFunction":
        if isinstance(other, Number):
            other = TorusFunction.constant(other)
        return self + (-other)

    def scale(self, a: complex) -> "TorusFunction":
        if a == 0 or self.is_zero:
            return TorusFunction.zero()
        return TorusFunction.from_dense(self.offset, self.data * a)

    def __mul__(self, other: Union["TorusFunction", Number]) -> "TorusFunction":
        if isinstance(other, TorusFunction):
            return multiply(self, other)
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: Number) -> "TorusFunction":
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def conjugate(self) -> "TorusFunction":
        """Pointwise complex conjugate: coefficients conj(c_{-k})."""
        if self.is_zero:
            return self
        arr = np.conj(self.data[::-1]).copy()
        arr.setflags(write=False)
        return TorusFunction(offset=-(self.offset + self.data.size - 1), data=arr)

    # ------------------------------------------------------------------
    # Comparison
    # ------------------------------------------------------------------

    def equals(self, other: "TorusFunction") -> bool:
        """Exact coefficientwise equality."""
        return (
            self.offset == other.offset
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def max_coefficient_distance(self, other: "TorusFunction") -> float:
        diff = self - other
        return float(np.max(np.abs(diff.data))) if not diff.is_zero else 0.0

    def allclose(self, other: "TorusFunction", tol: float = 1e-12) -> bool:
        return self.max_coefficient_distance(other) <= tol

    def __repr__(self) -> str:
        return f"TorusFunction({self.coeffs})"

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def grid_values(self, G: int) -> np.ndarray:
        """
        Values at z_j = j/G, j = 0..G-1, by an inverse FFT.

        Args:
            G: Grid size, must exceed 2 * degree

        Returns:
            Complex array of length G
        """
        if G <= 2 * self.degree:
            raise ValueError(f"grid of {G} points aliases degree {self.degree}")
        a = np.zeros(G, dtype=complex)
        a[self.frequencies % G] = self.data
        return np.fft.ifft(a, norm="forward")


def evaluate(phi: TorusFunction, z):
    """
    Evaluate phi at circle point(s) z (interpreted mod 1).

    Args:
        phi: Function to evaluate
        z: Real number or array of reals

    Returns:
        complex, or complex array of the shape of z
    """
    zr = np.atleast_1d(reduce_circle(z))
    if phi.is_zero:
        vals = np.zeros(zr.shape, dtype=complex)
    else:
        phases = np.exp(2j * np.pi * np.multiply.outer(zr, phi.frequencies))
        vals = phases @ phi.data
    if np.ndim(z) == 0:
        return complex(vals[0])
    return vals


def translate(phi: TorusFunction, t: float) -> TorusFunction:
    """
    z -> phi(z - t); coefficient rule c_k -> c_k exp(-2 pi i k t).

    Args:
        phi: Function to translate
        t: Real shift

    Returns:
        Translated function
    """
    if phi.is_zero or phi.data.size == 1 and phi.offset == 0:
        return phi
    tr = reduce_circle(t)
    return TorusFunction.from_dense(
        phi.offset, phi.data * np.exp(-2j * np.pi * phi.frequencies * tr)
    )


def multiply(phi: TorusFunction, psi: TorusFunction) -> TorusFunction:
    """Pointwise product: coefficient convolution, degrees add."""
    if phi.is_zero or psi.is_zero:
        return TorusFunction.zero()
    return TorusFunction.from_dense(phi.offset + psi.offset, np.convolve(phi.data, psi.data))


def _grid_size(phi: TorusFunction, grid: int) -> int:
    return max(int(grid), 8 * (phi.degree + 1))


def sup_norm(phi: TorusFunction, grid: int = DEFAULT_GRID, refine: bool = True) -> Interval:
    """
    Interval enclosing the sup norm of phi.

    Without refinement, lower is the grid maximum (G >= 8 (K + 1) points) and
    upper the smaller of sum |c_k| and the grid maximum inflated by the
    Bernstein slack 2 pi K / G. Refinement locates the maximizers of |phi|^2
    to machine precision and bounds |phi|^2 near them by a Taylor model, so
    both ends converge to the true sup and do not depend on where the grid
    falls (translates and conjugates of phi get the same interval).

    Args:
        phi: Function
        grid: Minimum grid size
        refine: Tighten the interval around the maximizers

    Returns:
        (lower, upper)
    """
    if phi.is_zero:
        return (0.0, 0.0)
    if phi.data.size == 1:
        c = float(abs(phi.data[0]))
        return (c, c)
    if refine:
        return _refined_sup_norm(phi, grid)
    G = _grid_size(phi, grid)
    gmax = float(np.max(np.abs(phi.grid_values(G))))
    upper = min(phi.l1_coefficients(), gmax * (1.0 + 2.0 * math.pi * phi.degree / G))
    return (min(gmax, upper), upper)


def _derivative(phi: TorusFunction, order: int) -> TorusFunction:
    return TorusFunction.from_dense(
        phi.offset, phi.data * (2j * np.pi * phi.frequencies) ** order, drop_tol=0.0
    )


def _taylor_cap(fa, da, w, b2):
    """Max of fa + da t + b2 t^2 / 2 over t in [0, w] (convex, so at an end)."""
    return np.maximum(fa, fa + da * w + 0.5 * b2 * w * w)


class _SquaredModulus:
    """f = |phi|^2, a real trigonometric polynomial, with f' and f''."""

    def __init__(self, phi: TorusFunction):
        self.f = multiply(phi, phi.conjugate())
        self.df = _derivative(self.f, 1)
        self.d2f = _derivative(self.f, 2)
        self.width = self.f.degree

    def values(self, z) -> Tuple[np.ndarray, np.ndarray]:
        return evaluate(self.f, z).real, evaluate(self.df, z).real

    def curvature(self, z) -> np.ndarray:
        return evaluate(self.d2f, z).real

    def polish(self, a, b, fa, fb, da, db) -> np.ndarray:
        """
        Maximizer of f on each cell [a, b].

        Cells with f' > 0 at a and f' < 0 at b hold an interior maximum,
        found by Newton's method on f' kept inside a sign-change bracket;
        the others peak at the larger endpoint.
        """
        z = np.where(fa >= fb, a, b)
        inside = (da > 0.0) & (db < 0.0)
        if not inside.any():
            return z
        lo, hi = a[inside].copy(), b[inside].copy()
        x = 0.5 * (lo + hi)
        for _ in range(SUP_NORM_POLISH_STEPS):
            d1 = evaluate(self.df, x).real
            d2 = self.curvature(x)
            lo = np.where(d1 > 0.0, x, lo)
            hi = np.where(d1 < 0.0, x, hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = x - d1 / d2
            newton = (d2 < 0.0) & (step > lo) & (step < hi)
            x_new = np.where(d1 == 0.0, x, np.where(newton, step, 0.5 * (lo + hi)))
            moved = float(np.max(np.abs(x_new - x)))
            x = x_new
            if moved <= 1e-15:
                break
        z[inside] = x
        return z


def _refined_sup_norm(phi: TorusFunction, grid: int) -> Interval:
    sq = _SquaredModulus(phi)
    W = sq.width
    if W == 0:
        v = math.sqrt(max(sq.f.coefficient(0).real, 0.0))
        return (v, v)

    G = max(int(grid), SUP_NORM_OVERSAMPLING * (W + 1))
    fv = sq.f.grid_values(G).real
    dv = sq.df.grid_values(G).real
    gmax = float(fv.max())
    # Bernstein: ||f^(m)|| <= (2 pi W)^m ||f|| and ||f|| <= gmax / (1 - pi W / G)
    fup = gmax / (1.0 - math.pi * W / G)
    b2 = (2.0 * math.pi * W) ** 2 * fup
    c3 = (2.0 * math.pi * W) ** 3 * fup / 6.0

    fr, dr = np.roll(fv, -1), np.roll(dv, -1)
    cell_caps = np.minimum(_taylor_cap(fv, dv, 1.0 / G, b2), _taylor_cap(fr, -dr, 1.0 / G, b2))
    hot = np.flatnonzero(cell_caps > gmax)
    if hot.size == 0:
        v = math.sqrt(max(gmax, 0.0))
        return (v, v)

    a, b = hot / G, (hot + 1) / G
    z = sq.polish(a, b, fv[hot], fr[hot], dv[hot], dr[hot])
    fz, d1 = sq.values(z)
    d2 = sq.curvature(z)
    best = max(gmax, float(fz.max()))
    bound = best

    # f(z + t) <= f(z) + d1 t + d2 t^2 / 4 for |t| <= -d2 / (4 c3) when d2 < 0
    concave = d2 < 0.0
    r = np.where(concave, -d2 / (4.0 * c3), 0.0)
    lo, hi = np.maximum(a, z - r), np.minimum(b, z + r)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(concave, -2.0 * d1 / d2, 0.0)
    t = np.clip(t, lo - z, hi - z)
    if concave.any():
        bound = max(bound, float(np.max((fz + d1 * t + 0.25 * d2 * t * t)[concave])))

    # The rest of each hot cell is split until its Taylor cap drops below best
    p = np.concatenate([a, hi[concave]])
    q = np.concatenate([np.where(concave, lo, b), b[concave]])
    keep = q > p
    p, q = p[keep], q[keep]
    fp, dp = sq.values(p)
    fq, dq = sq.values(q)
    examined = 0
    while p.size:
        caps = np.minimum(_taylor_cap(fp, dp, q - p, b2), _taylor_cap(fq, -dq, q - p, b2))
        pending = caps > best
        examined += p.size
        if not pending.any():
            break
        if examined > SUP_NORM_MAX_PIECES:
            logger.debug("sup_norm: %d pieces still open after %d examined", int(pending.sum()), examined)
            bound = max(bound, float(caps[pending].max()))
            break
        p, q, fp, dp, fq, dq = (v[pending] for v in (p, q, fp, dp, fq, dq))
        m = 0.5 * (p + q)
        fm, dm = sq.values(m)
        p, q = np.concatenate([p, m]), np.concatenate([m, q])
        fp, dp = np.concatenate([fp, fm]), np.concatenate([dp, dm])
        fq, dq = np.concatenate([fm, fq]), np.concatenate([dm, dq])

    upper = min(math.sqrt(max(bound, 0.0)), phi.l1_coefficients())
    return (min(math.sqrt(max(best, 0.0)), upper), upper)


def min_abs(phi: TorusFunction, grid: int = DEFAULT_GRID, floor: float = POSITIVITY_FLOOR) -> Interval:
    """
    Interval enclosing min |phi| over the circle.

    The grid minimum minus the Bernstein slack is a lower bound. When the slack
    swallows the margin the grid is doubled, up to MAX_REFINED_GRID points, or
    until the grid minimum itself drops below floor.

    Args:
        phi: Function
        grid: Starting grid size
        floor: Stop refining once the grid minimum is at most this

    Returns:
        (lower, upper) with lower >= 0
    """
    if phi.is_zero:
        return (0.0, 0.0)
    if phi.degree == 0:
        c = float(abs(phi.data[0]))
        return (c, c)
    G = _grid_size(phi, grid)
    while True:
        mags = np.abs(phi.grid_values(G))
        gmin = float(mags.min())
        gmax = float(mags.max())
        slack = 2.0 * math.pi * phi.degree * gmax * (1.0 + 2.0 * math.pi * phi.degree / G) / G
        lower = gmin - slack
        if lower > 0.0 or gmin <= floor or G >= MAX_REFINED_GRID:
            break
        G *= 2
        logger.debug("min_abs: refining grid to %d points (gmin=%.3e, slack=%.3e)", G, gmin, slack)
    if lower <= 0.0 < gmin - floor:
        logger.warning("min_abs: no positive bound at %d points (gmin=%.3e)", G, gmin)
    return (max(lower, 0.0), gmin)


def reciprocal(
    phi: TorusFunction,
    tol: float,
    maxdeg: int,
    floor: float = POSITIVITY_FLOOR,
    grid: int = DEFAULT_GRID,
) -> TorusFunction:
    """
    Trigonometric polynomial approximation of 1/phi.

    Samples 1/phi on 2*maxdeg+1 equispaced points, inverts with a discrete
    Fourier transform, then verifies |rho*phi - 1| < tol on a 4x finer grid.

    Args:
        phi: Function bounded away from zero
        tol: Residual tolerance
        maxdeg: Degree of the approximation
        floor: Required certified lower bound of |phi|
        grid: Minimum grid size for the positivity check

    Returns:
        rho with deg rho <= maxdeg

    Raises:
        NotBoundedAway: If min |phi| cannot be certified above floor
        ToleranceNotMet: If the residual check fails
    """
    lower, gmin = min_abs(phi, grid=max(grid, 2 * maxdeg + 1), floor=floor)
    if lower <= floor:
        raise NotBoundedAway(
            f"min |phi| not certified above {floor:g} (grid min {gmin:.3e}, certified {lower:.3e})"
        )
    if phi.degree == 0:
        return TorusFunction.constant(1.0 / phi.data[0])

    P = 2 * maxdeg + 1
    samples = 1.0 / evaluate(phi, np.arange(P) / P)
    coeffs = np.fft.fftshift(np.fft.fft(samples, norm="forward"))
    rho = TorusFunction.from_dense(-maxdeg, coeffs)

    residual = sup_norm(multiply(rho, phi) - 1.0, grid=4 * P, refine=False)[1]
    if not residual < tol:
        raise ToleranceNotMet(
            f"reciprocal residual {residual:.3e} >= {tol:.3e} at maxdeg={maxdeg}"
        )
    return rho
