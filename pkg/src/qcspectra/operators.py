"""Linearized atomistic, continuum and coupled (QCF, QNL) operators."""

import numpy as np

from .errors import InvalidSizeError, PreconditionError, UnsupportedRangeError
from .laurent import GrfFactorization, LaurentPoly, build_b1, grf_factorize
from .model import ChainModel, RegionMask
from .periodic import (
    assemble_laplacian,
    circulant_from_laurent,
    mask_operator,
    project_mean_zero,
)


def lennard_jones_d2(x, a=1.0, b=-2.0):
    """Second derivative of ``a x^-12 + b x^-6``."""
    x = np.asarray(x, dtype=float)
    return 156.0 * a * x**-14 + 42.0 * b * x**-8


def morse_d2(x, alpha=4.0, r0=1.0):
    """Second derivative of ``exp(-2 alpha (x - r0)) - 2 exp(-alpha (x - r0))``."""
    s = np.asarray(x, dtype=float) - r0
    return 4.0 * alpha**2 * np.exp(-2.0 * alpha * s) - 2.0 * alpha**2 * np.exp(-alpha * s)


def lennard_jones(x, a=1.0, b=-2.0):
    x = np.asarray(x, dtype=float)
    return a * x**-12 + b * x**-6


def morse(x, alpha=4.0, r0=1.0):
    s = np.asarray(x, dtype=float) - r0
    return np.exp(-2.0 * alpha * s) - 2.0 * np.exp(-alpha * s)


POTENTIALS = {
    "lennard-jones": (lennard_jones, lennard_jones_d2),
    "morse": (morse, morse_d2),
}


def coefficients_from_potential(kind: str, strain: float, r_cut: int, **params) -> np.ndarray:
    """``phi''(r F)`` for r = 1..R from a named pair potential.

    ``params`` are forwarded to the potential: ``a, b`` for Lennard-Jones,
    ``alpha, r0`` for Morse.
    """
    if strain <= 0:
        raise PreconditionError(f"strain must be positive, got {strain}")
    if r_cut < 2:
        raise PreconditionError(f"cutoff must be >= 2, got {r_cut}")
    try:
        _, d2 = POTENTIALS[kind]
    except KeyError:
        raise PreconditionError(f"unknown potential {kind!r}") from None
    return d2(strain * np.arange(1, r_cut + 1), **params)


def _check_mask(model: ChainModel, mask: RegionMask):
    if mask.n != model.n:
        raise InvalidSizeError(f"mask length {mask.n} does not match chain size {model.n}")


def assemble_atomistic(model: ChainModel) -> np.ndarray:
    terms = {0: 0.0}
    for r, c in enumerate(model.phi2, start=1):
        terms[0] += 2.0 * c
        terms[r] = terms.get(r, 0.0) - c
        terms[-r] = terms.get(-r, 0.0) - c
    return circulant_from_laurent(LaurentPoly.from_dict(terms), model.n)


def assemble_continuum(model: ChainModel) -> np.ndarray:
    return model.w2 * assemble_laplacian(model.n)


def assemble_qcf(model: ChainModel, mask: RegionMask) -> np.ndarray:
    """Atomistic rows on the atomistic sites, continuum rows elsewhere."""
    _check_mask(model, mask)
    return np.where(mask.atomistic[:, None], assemble_atomistic(model), assemble_continuum(model))


def assemble_qcf0(model: ChainModel, mask: RegionMask) -> np.ndarray:
    """Projected QCF operator ``P_U L^qcf``."""
    L = assemble_qcf(model, mask)
    return L - L.mean(axis=0, keepdims=True)


def assemble_qnl(model: ChainModel, mask: RegionMask) -> np.ndarray:
    """Hessian of the quasinonlocal energy, ``W'' L - phi''_2F L X L``."""
    if model.r_cut != 2:
        raise UnsupportedRangeError(
            f"QNL coupling is defined only for R = 2, got R = {model.r_cut}"
        )
    _check_mask(model, mask)
    L = assemble_laplacian(model.n)
    LX = L * mask.atomistic[None, :]
    return model.w2 * L - model.phi_2f * LX @ L


def factorize_model(model: ChainModel) -> GrfFactorization:
    return grf_factorize(build_b1(model))


def assemble_Y1(model: ChainModel, fact: GrfFactorization | None = None) -> np.ndarray:
    """Invertible factor ``Y1 = -T p1(T)`` of the interaction difference."""
    fact = fact or factorize_model(model)
    return circulant_from_laurent(fact.y1_symbol(), model.n)


def assemble_sym(model: ChainModel, mask: RegionMask, fact: GrfFactorization | None = None) -> np.ndarray:
    """Symmetric operator ``L^c + sigma (L Y1) X (L Y1)^T`` similar to the projected QCF operator."""
    _check_mask(model, mask)
    fact = fact or factorize_model(model)
    LY = assemble_laplacian(model.n) @ assemble_Y1(model, fact)
    S = assemble_continuum(model) + fact.sigma * (LY * mask.atomistic[None, :]) @ LY.T
    return 0.5 * (S + S.T)


__all__ = [
    "ChainModel",
    "RegionMask",
    "assemble_Y1",
    "assemble_atomistic",
    "assemble_continuum",
    "assemble_qcf",
    "assemble_qcf0",
    "assemble_qnl",
    "assemble_sym",
    "coefficients_from_potential",
    "factorize_model",
    "lennard_jones",
    "lennard_jones_d2",
    "mask_operator",
    "morse",
    "morse_d2",
    "project_mean_zero",
]
