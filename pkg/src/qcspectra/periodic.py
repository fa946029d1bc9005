"""Dense realizations of the elementary periodic operators.

Indices are 0-based and wrap modulo n. The translation acts as
``(T u)_l = u_{l+1}``, so a Laurent polynomial ``sum_k c_k t^k`` becomes the
circulant matrix with ``M[l, l+k] = c_k``.
"""

import numpy as np
import scipy.linalg

from .errors import InvalidSizeError, WrapAmbiguityError
from .laurent import P_D, P_L, LaurentPoly


def _check_size(n):
    if int(n) != n or n < 4:
        raise InvalidSizeError(f"chain size must be an integer >= 4, got {n}")
    return int(n)


def circulant_from_laurent(p: LaurentPoly, n: int) -> np.ndarray:
    """Matrix of ``p(T)`` on the n-periodic chain."""
    n = _check_size(n)
    if 2 * p.bandwidth >= n:
        raise WrapAmbiguityError(
            f"stencil reaches exponent {p.bandwidth}, which wraps on a chain of {n} sites"
        )
    M = np.zeros((n, n))
    idx = np.arange(n)
    for k, c in p.terms().items():
        M[idx, (idx + k) % n] += c
    return M


def assemble_difference(n: int) -> np.ndarray:
    """Backward difference ``(D u)_l = u_l - u_{l-1}``."""
    return circulant_from_laurent(P_D, n)


def assemble_laplacian(n: int) -> np.ndarray:
    """Negative Laplacian ``(L u)_l = -u_{l-1} + 2 u_l - u_{l+1}``."""
    return circulant_from_laurent(P_L, n)


def assemble_translation(n: int) -> np.ndarray:
    return circulant_from_laurent(LaurentPoly.monomial(1), n)


def project_mean_zero(n: int) -> np.ndarray:
    n = _check_size(n)
    return np.eye(n) - np.full((n, n), 1.0 / n)


def modified_laplacian(n: int) -> np.ndarray:
    """``L1 = L + (1/n) e e^T``, so that ``L1 e = e`` and ``L1^{-1} L = P_U``."""
    n = _check_size(n)
    return assemble_laplacian(n) + np.full((n, n), 1.0 / n)


def laplacian_symbol(n: int) -> np.ndarray:
    """Eigenvalues ``4 sin^2(pi k / n)`` of L on the Fourier modes k = 0..n-1."""
    k = np.arange(n)
    return 4.0 * np.sin(np.pi * k / n) ** 2


def modified_laplacian_power(n: int, power: float) -> np.ndarray:
    """``L1**power`` built from the Fourier diagonalization of L1.

    L1 acts as L on the non-constant modes and as the identity on e.
    """
    n = _check_size(n)
    mu = laplacian_symbol(n)
    mu[0] = 1.0
    col = np.fft.ifft(mu**power).real
    return scipy.linalg.circulant(col)


def mask_operator(mask, n=None) -> np.ndarray:
    chi = np.asarray(getattr(mask, "atomistic", mask), dtype=float)
    if n is not None and chi.size != n:
        raise InvalidSizeError(f"mask has length {chi.size}, expected {n}")
    return np.diag(chi)


def mean_zero_basis(n: int) -> np.ndarray:
    """Orthonormal n x (n-1) basis of the mean-zero subspace."""
    n = _check_size(n)
    return scipy.linalg.null_space(np.ones((1, n)))


def is_mean_zero(u, rtol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=float)
    return bool(abs(u.sum()) <= rtol * u.size * max(np.abs(u).max(), 1e-300))
