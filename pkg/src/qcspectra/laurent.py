"""Real Laurent polynomials, the interaction symbols b and b1, and their
Riesz-Fejer type factorization.

A Laurent polynomial is stored as its lowest exponent ``lo`` together with
the coefficients of ``t**lo, t**(lo+1), ...``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg
from numpy.polynomial import polynomial as npoly

from .errors import (
    FactorizationDegeneracyError,
    FactorizationError,
    InexactDivisionError,
    MixedSignError,
    PreconditionError,
)


class LaurentPoly:
    __slots__ = ("lo", "coeffs")

    def __init__(self, coeffs, lo: int = 0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        nz = np.flatnonzero(c)
        if nz.size == 0:
            c, lo = np.zeros(1), 0
        else:
            lo = int(lo) + int(nz[0])
            c = c[nz[0]:nz[-1] + 1]
        c.setflags(write=False)
        self.lo = lo
        self.coeffs = c

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> LaurentPoly:
        return cls([c], lo=k)

    @classmethod
    def from_dict(cls, terms: dict) -> LaurentPoly:
        if not terms:
            return cls([0.0])
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(c, lo)

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.size - 1

    @property
    def bandwidth(self) -> int:
        """Largest absolute exponent carried by the polynomial."""
        return max(abs(self.lo), abs(self.hi))

    def is_zero(self) -> bool:
        return self.coeffs.size == 1 and self.coeffs[0] == 0.0

    def coefficient(self, k: int) -> float:
        i = k - self.lo
        return float(self.coeffs[i]) if 0 <= i < self.coeffs.size else 0.0

    def terms(self) -> dict:
        return {self.lo + i: float(c) for i, c in enumerate(self.coeffs) if c != 0.0}

    def __call__(self, t):
        t = np.asarray(t)
        t = t.astype(complex if np.iscomplexobj(t) else float)
        return npoly.polyval(t, self.coeffs) * t**self.lo

    def reflect(self) -> LaurentPoly:
        """The polynomial t -> p(1/t)."""
        return LaurentPoly(self.coeffs[::-1], -self.hi)

    def is_palindromic(self, rtol: float = 1e-12) -> bool:
        if self.lo != -self.hi:
            return self.is_zero()
        scale = max(np.abs(self.coeffs).max(), 1e-300)
        return bool(np.abs(self.coeffs - self.coeffs[::-1]).max() <= rtol * scale)

    def trim(self, atol: float) -> LaurentPoly:
        c = np.where(np.abs(self.coeffs) > atol, self.coeffs, 0.0)
        return LaurentPoly(c, self.lo)

    def max_abs_coeff(self) -> float:
        return float(np.abs(self.coeffs).max())

    def allclose(self, other: LaurentPoly, rtol: float = 1e-12) -> bool:
        diff = (self - other).max_abs_coeff()
        scale = max(self.max_abs_coeff(), other.max_abs_coeff())
        return diff <= rtol * scale

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly([float(other)])
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        c = np.zeros(hi - lo + 1)
        c[self.lo - lo:self.hi - lo + 1] += self.coeffs
        c[other.lo - lo:other.hi - lo + 1] += other.coeffs
        return LaurentPoly(c, lo)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(-self.coeffs, self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return laurent_mul(self, other)
        return LaurentPoly(self.coeffs * float(other), self.lo)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = LaurentPoly([1.0])
        for _ in range(int(k)):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.lo == other.lo and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.lo, self.coeffs.tobytes()))

    def __repr__(self):
        parts = []
        for k, c in sorted(self.terms().items(), reverse=True):
            parts.append(f"{c:+.6g}" + ("" if k == 0 else f"*t^{k}"))
        return "LaurentPoly(" + (" ".join(parts) if parts else "0") + ")"


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return LaurentPoly(np.convolve(a.coeffs, b.coeffs), a.lo + b.lo)


def laurent_div_exact(num: LaurentPoly, den: LaurentPoly, rtol: float = 1e-12) -> LaurentPoly:
    """Quotient ``num / den``, raising if the division leaves a remainder.

    Powers of t are units in the Laurent ring, so exactness reduces to
    ordinary polynomial divisibility of the trimmed coefficient lists.
    """
    if den.is_zero():
        raise ZeroDivisionError("division by the zero Laurent polynomial")
    if num.is_zero():
        return LaurentPoly([0.0])
    q, r = npoly.polydiv(num.coeffs, den.coeffs)
    rem = float(np.abs(r).max()) if r.size else 0.0
    if rem > rtol * num.max_abs_coeff():
        raise InexactDivisionError(
            f"remainder {rem:.3e} exceeds {rtol:g} relative to the numerator", rem
        )
    return LaurentPoly(q, num.lo - den.lo)


# symbols of the periodic difference operators in the translation T
P_D = LaurentPoly([-1.0, 1.0], lo=-1)          # 1 - t^-1
P_L = LaurentPoly([-1.0, 2.0, -1.0], lo=-1)    # -t + 2 - t^-1
T_SYMBOL = LaurentPoly.monomial(1)


def _coefficients(model) -> np.ndarray:
    return np.asarray(getattr(model, "phi2", model), dtype=float)


def build_b(model) -> LaurentPoly:
    """Symbol of ``L^a - L^c`` as a Laurent polynomial in T."""
    phi = _coefficients(model)
    terms = {0: 0.0, 1: 0.0, -1: 0.0}
    for r in range(2, phi.size + 1):
        c = phi[r - 1]
        # (t^r - 1)(t^-r - 1) = 2 - t^r - t^-r
        terms[0] += c * (2.0 - 2.0 * r * r)
        terms[1] += c * r * r
        terms[-1] += c * r * r
        terms[r] = terms.get(r, 0.0) - c
        terms[-r] = terms.get(-r, 0.0) - c
    return LaurentPoly.from_dict(terms)


def build_b1(model) -> LaurentPoly:
    """``b`` divided exactly by the squared Laplacian symbol."""
    b = build_b(model)
    return laurent_div_exact(laurent_div_exact(b, P_L), P_L)


class BetaBounds(NamedTuple):
    beta0: float
    beta1: float
    argmin: float
    argmax: float


def beta_bounds_numeric(b1: LaurentPoly, grid: int = 4096) -> BetaBounds:
    """Extrema of ``|b1(exp(i theta))|`` on a uniform theta grid.

    Returns ``beta0 = sqrt(min)``, ``beta1 = sqrt(max)`` and the theta
    locations (in [0, 2 pi)) where they occur.
    """
    if grid < 256:
        raise PreconditionError(f"grid must have at least 256 points, got {grid}")
    theta = 2.0 * np.pi * np.arange(grid) / grid
    vals = np.abs(b1(np.exp(1j * theta)).real)
    i0, i1 = int(np.argmin(vals)), int(np.argmax(vals))
    return BetaBounds(float(np.sqrt(vals[i0])), float(np.sqrt(vals[i1])), theta[i0], theta[i1])


def _require_nonpositive(model):
    phi = _coefficients(model)
    tail = phi[1:]
    if np.any(tail > 0):
        r = int(np.flatnonzero(tail > 0)[0]) + 2
        raise PreconditionError(f"coefficient for neighbour r={r} is positive ({phi[r - 1]:g})")
    if tail[-1] >= 0:
        raise PreconditionError("outermost coefficient must be strictly negative")
    return phi


def beta_bounds_closed_form(model) -> tuple[float, float]:
    """Exact ``(beta0, beta1)`` for non-positive r >= 2 coefficients.

    The minimum of b1 on the circle sits at t = -1 and the maximum at t = 1.
    """
    phi = _require_nonpositive(model)
    r = np.arange(2, phi.size + 1, dtype=float)
    w = -phi[1:]
    sq0 = np.sum(w * (2 * r**2 + (-1.0) ** r - 1) / 8)
    sq1 = np.sum(w * r**2 * (r**2 - 1) / 12)
    return float(np.sqrt(sq0)), float(np.sqrt(sq1))


def eval_f_r(r: int, beta):
    """``f_r(beta) = (r^2 - sin^2(r beta)/sin^2(beta)) / sin^2(beta)``.

    Evaluated through the Fejer-kernel identity
    ``r^2 - sin^2(r b)/sin^2(b) = 4 sum_{k<r} (r-k) sin^2(k b)``,
    which has no cancellation as beta -> 0.
    """
    if int(r) != r or r < 2:
        raise PreconditionError(f"r must be an integer >= 2, got {r}")
    beta = np.asarray(beta, dtype=float)
    if np.any(beta <= 0) or np.any(beta > np.pi / 2 + 1e-15):
        raise PreconditionError("beta must lie in (0, pi/2]")
    s = np.sin(beta)
    k = np.arange(1, int(r))
    ratio = np.sin(np.multiply.outer(beta, k)) / s[..., None]
    out = 4.0 * np.sum((r - k) * ratio**2, axis=-1)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class GrfFactorization:
    """``b1 = sigma * p1(t) * p1(1/t)`` with ``beta0^2 <= |b1| <= beta1^2`` on the circle."""

    p1: LaurentPoly
    sigma: int
    beta0: float
    beta1: float

    def reconstruct(self) -> LaurentPoly:
        return self.sigma * (self.p1 * self.p1.reflect())

    def y1_symbol(self) -> LaurentPoly:
        """Symbol of ``Y1 = -T p1(T)``."""
        return -(T_SYMBOL * self.p1)


def _companion_roots(coeffs) -> np.ndarray:
    """Roots of the polynomial with ascending ``coeffs`` via its balanced companion matrix."""
    c = np.asarray(coeffs, dtype=float)
    d = c.size - 1
    comp = np.zeros((d, d))
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -c[:-1] / c[-1]
    balanced, _ = scipy.linalg.matrix_balance(comp, permute=False)
    return scipy.linalg.eigvals(balanced, check_finite=False)


def _pair_conjugates(roots: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Make a root set exactly closed under complex conjugation."""
    scale = np.maximum(1.0, np.abs(roots))
    real = roots[np.abs(roots.imag) <= tol * scale].real
    upper = list(roots[roots.imag > tol * scale])
    lower = list(roots[roots.imag < -tol * scale])
    if len(upper) != len(lower):
        raise FactorizationError("roots are not closed under conjugation")
    paired = []
    for z in upper:
        j = int(np.argmin([abs(z - np.conj(w)) for w in lower]))
        w = lower.pop(j)
        avg = 0.5 * (z + np.conj(w))
        paired += [avg, np.conj(avg)]
    return np.concatenate([real.astype(complex), np.array(paired, dtype=complex)])


def grf_factorize(b1: LaurentPoly, grid: int = 4096, unit_tol: float = 1e-8) -> GrfFactorization:
    """Factor a palindromic, sign-definite ``b1`` as ``sigma p1(t) p1(1/t)``.

    ``p1`` is an ordinary polynomial with real coefficients whose roots are
    the roots of ``t^m b1(t)`` strictly inside the unit disk; it is
    normalized to a positive leading coefficient.
    """
    if b1.is_zero():
        raise FactorizationDegeneracyError("b1 vanishes identically")
    if not b1.is_palindromic():
        raise PreconditionError("b1 must satisfy b1(t) = b1(1/t)")
    theta = 2.0 * np.pi * np.arange(grid) / grid
    vals = b1(np.exp(1j * theta)).real
    if vals.max() > 0 > vals.min():
        raise MixedSignError("b1 changes sign on the unit circle")
    bounds = beta_bounds_numeric(b1, grid)
    if bounds.beta0 == 0.0:
        raise FactorizationDegeneracyError("b1 has a root on the unit circle")

    m = b1.hi
    if m == 0:
        c = b1.coeffs[0]
        return GrfFactorization(LaurentPoly([np.sqrt(abs(c))]), int(np.sign(c)),
                                bounds.beta0, bounds.beta1)

    roots = _companion_roots(b1.coeffs)
    if np.any(np.abs(np.abs(roots) - 1.0) < unit_tol):
        raise FactorizationDegeneracyError("b1 has a root on the unit circle")
    inside = roots[np.abs(roots) < 1.0]
    if inside.size != m:
        raise FactorizationDegeneracyError(
            f"expected {m} roots inside the unit disk, found {inside.size}"
        )
    inside = _pair_conjugates(inside)
    q = np.poly(inside).real[::-1]           # ascending, monic
    q1 = npoly.polyval(1.0, q)
    if abs(q1) > 1e-8:
        alpha2 = b1(1.0) / q1**2
    else:
        alpha2 = b1.coeffs[-1] / q[0]
    sigma = 1 if alpha2 > 0 else -1
    p1 = LaurentPoly(np.sqrt(abs(alpha2)) * q)
    return GrfFactorization(p1, sigma, bounds.beta0, bounds.beta1)
