"""Eigenanalysis of the coupled operators.

Every routine returns a :class:`SpectralReport` whose ``checks`` record each
verified inequality together with the measured value, the bound and the
margin, so that callers can tabulate them without re-deriving anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    AsymmetricInputError,
    EigensolverError,
    InstabilityError,
    PreconditionError,
    UnsupportedRangeError,
)
from .laurent import GrfFactorization
from .model import ChainModel, RegionMask
from .operators import (
    assemble_atomistic,
    assemble_continuum,
    assemble_qcf0,
    assemble_qnl,
    assemble_sym,
    assemble_Y1,
    factorize_model,
)
from .periodic import (
    assemble_laplacian,
    mean_zero_basis,
    modified_laplacian,
    modified_laplacian_power,
)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: float
    bound: float
    margin: float


def check_le(name, measured, bound) -> Check:
    measured, bound = float(measured), float(bound)
    return Check(name, bool(measured <= bound), measured, bound, bound - measured)


def check_ge(name, measured, bound) -> Check:
    measured, bound = float(measured), float(bound)
    return Check(name, bool(measured >= bound), measured, bound, measured - bound)


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    max_imag: float = 0.0
    cond_eigenbasis: float | None = None
    checks: list[Check] = field(default_factory=list)
    metrics: dict = field(default_factory=dict)
    vectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def sort_eigenvalues(ev, vecs=None):
    """Order by real part, then imaginary part."""
    ev = np.asarray(ev)
    order = np.lexsort((ev.imag, ev.real)) if np.iscomplexobj(ev) else np.argsort(ev, kind="stable")
    return (ev[order], None if vecs is None else vecs[:, order])


def spectrum_sym(M, tol: float = 1e-10) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    scale = max(np.abs(M).max(), 1e-12)
    asym = np.abs(M - M.T).max()
    if asym > tol * scale:
        raise AsymmetricInputError(f"symmetry residual {asym:.3e} exceeds {tol:g} relative")
    return scipy.linalg.eigvalsh(0.5 * (M + M.T))


def spectrum_general(M):
    """Eigenvalues (sorted) and right eigenvectors of a general dense matrix."""
    try:
        ev, vecs = scipy.linalg.eig(np.asarray(M, dtype=float))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverError(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise EigensolverError("eigensolver returned non-finite eigenvalues")
    return sort_eigenvalues(ev, vecs)


def cond2(V) -> float:
    s = scipy.linalg.svdvals(V)
    return float("inf") if s[-1] == 0 else float(s[0] / s[-1])


def _norm2(M) -> float:
    return float(scipy.linalg.svdvals(M)[0])


def _real_spectrum(M, name="spectrum"):
    """Eigenvalues of M sorted by real part, plus their largest imaginary part."""
    ev, _ = spectrum_general(M)
    return ev.real, float(np.abs(ev.imag).max())


def epsilon_optimal(alpha_tilde: float) -> float:
    """Weight that balances the two lower-bound competitors in the coercivity estimate."""
    a = float(alpha_tilde)
    if a >= 1:
        raise PreconditionError(f"alpha_tilde must be < 1, got {a}")
    if a <= 0:
        # sqrt(a^2 + a^4/4) - a^2/2, written without cancellation
        return a * a / (np.sqrt(a * a + a**4 / 4) + a * a / 2) if a else 0.0
    return a - a * a + np.sqrt(2 * (a * a - a**3) + a**4)


def coercivity_gamma0(alpha_tilde: float) -> float:
    """``sqrt(1 - eps)``: lower bound on the smallest singular value of
    ``I - alpha P_U X Z^T L Z`` with ``alpha_tilde = 4 alpha ||Z||^2``."""
    a = float(alpha_tilde)
    if a <= 0:
        return float(1.0 / np.sqrt(1.0 + a * a / 2 + np.sqrt(a * a + a**4 / 4)))
    return float(np.sqrt(1.0 - epsilon_optimal(a)))


def gamma0_closed(alpha: float) -> float:
    """Explicit constant for ``alpha = phi''_2F / W''_F <= 0``.

    ``gamma0^2 = 1 + 8 a^2 - 4 sqrt(a^2 + 4 a^4)``, evaluated in the
    equivalent form ``1 / (1 + 8 a^2 + 4 sqrt(a^2 + 4 a^4))``.
    """
    a = float(alpha)
    if a > 0:
        raise PreconditionError(f"closed form requires alpha <= 0, got {a}")
    g2 = 1.0 / (1.0 + 8 * a * a + 4 * np.sqrt(a * a + 4 * a**4))
    if not g2 > 0:
        raise PreconditionError(f"gamma0^2 = {g2} is not positive")
    return float(np.sqrt(g2))


def _fact(model, fact):
    return fact if fact is not None else factorize_model(model)


def _require_w2(model: ChainModel):
    if model.w2 <= 0:
        raise PreconditionError(f"W''_F = {model.w2:g} must be positive")


def _require_stable(model: ChainModel, fact: GrfFactorization):
    _require_w2(model)
    ratio = fact.sigma * fact.beta1**2 / model.w2
    if ratio <= -0.25:
        raise PreconditionError(f"sigma beta1^2 / W''_F = {ratio:g} must exceed -1/4")


def fr_alpha_tilde(model: ChainModel, fact: GrfFactorization) -> float:
    """``4 alpha ||Y1||^2`` bounded via beta1, with ``alpha = -sigma / W''_F``."""
    return -4.0 * fact.sigma * fact.beta1**2 / model.w2


def check_similarity_r2(model: ChainModel, mask: RegionMask,
                        rtol_identity: float = 1e-10, rtol_spectrum: float = 1e-8) -> SpectralReport:
    """Verify that ``L1`` conjugates the projected QCF operator into the QNL operator."""
    if model.r_cut != 2:
        raise UnsupportedRangeError("similarity with QNL requires R = 2")
    Q = assemble_qcf0(model, mask)
    Lqnl = assemble_qnl(model, mask)
    L1 = modified_laplacian(model.n)
    resid = _norm2(L1 @ Q - Lqnl @ L1) / (_norm2(Lqnl) * _norm2(L1))
    lam, max_imag = _real_spectrum(Q)
    lam_qnl = spectrum_sym(Lqnl)
    scale = np.abs(lam_qnl).max()
    dev = np.abs(lam - lam_qnl).max() / scale
    return SpectralReport(
        eigenvalues=lam, max_imag=max_imag,
        checks=[
            check_le("similarity_identity", resid, rtol_identity),
            check_le("spectrum_imag", max_imag / scale, rtol_spectrum),
            check_le("spectrum_match", dev, rtol_spectrum),
        ],
        metrics={"lambda_qnl": lam_qnl},
    )


def _diagonalization_residual(M, V, lam):
    return _norm2(M @ V - V * lam) / (_norm2(M) * _norm2(V))


def build_vqcf_r2(model: ChainModel, mask: RegionMask, rtol: float = 1e-9) -> SpectralReport:
    """Well-scaled eigenbasis ``[W'' I - phi''_2F P_U X L] V^qnl`` for R = 2."""
    if model.r_cut != 2:
        raise UnsupportedRangeError("the second-neighbour eigenbasis requires R = 2")
    _require_w2(model)
    n = model.n
    lam, Vqnl = scipy.linalg.eigh(assemble_qnl(model, mask))
    L = assemble_laplacian(n)
    PXL = L * mask.atomistic[:, None]
    PXL -= PXL.mean(axis=0, keepdims=True)
    V = model.w2 * Vqnl - model.phi_2f * PXL @ Vqnl
    resid = _diagonalization_residual(assemble_qcf0(model, mask), V, lam)
    cond = cond2(V)
    alpha = model.phi_2f / model.w2
    g0 = gamma0_closed(alpha) if alpha <= 0 else coercivity_gamma0(4 * alpha)
    bound = (1 + 4 * abs(alpha)) / g0
    return SpectralReport(
        eigenvalues=lam, cond_eigenbasis=cond, vectors=V,
        checks=[
            check_le("diagonalization_residual", resid, rtol),
            check_le("cond_bound", cond, bound),
        ],
        metrics={"alpha": alpha, "gamma0": g0, "cond_bound": bound},
    )


def vqcf_fr_cond_bound(model: ChainModel, fact: GrfFactorization) -> float:
    """``(W''/beta0 + 4 beta1) * beta1 / (W'' gamma0)`` with gamma0 from the coercivity estimate at Z = Y1."""
    w = model.w2
    g0 = coercivity_gamma0(fr_alpha_tilde(model, fact))
    return (w / fact.beta0 + 4 * fact.beta1) * fact.beta1 / (w * g0)


def build_vqcf_fr(model: ChainModel, mask: RegionMask, fact: GrfFactorization | None = None,
                  rtol: float = 1e-9) -> SpectralReport:
    """Eigenbasis ``[W'' Y1^-1 + sigma P_U X Y1^T L] V^sym`` for any finite range."""
    fact = _fact(model, fact)
    _require_stable(model, fact)
    n = model.n
    lam, Vsym = scipy.linalg.eigh(assemble_sym(model, mask, fact))
    Y1 = assemble_Y1(model, fact)
    L = assemble_laplacian(n)
    PXYL = (Y1.T @ L) * mask.atomistic[:, None]
    PXYL -= PXYL.mean(axis=0, keepdims=True)
    V = model.w2 * np.linalg.solve(Y1, Vsym) + fact.sigma * PXYL @ Vsym
    resid = _diagonalization_residual(assemble_qcf0(model, mask), V, lam)
    cond = cond2(V)
    bound = vqcf_fr_cond_bound(model, fact)
    return SpectralReport(
        eigenvalues=lam, cond_eigenbasis=cond, vectors=V,
        checks=[
            check_le("diagonalization_residual", resid, rtol),
            check_le("cond_bound", cond, bound),
        ],
        metrics={"cond_bound": bound, "sigma": fact.sigma,
                 "beta0": fact.beta0, "beta1": fact.beta1},
    )


def interlacing_check(model: ChainModel, mask: RegionMask, fact: GrfFactorization | None = None,
                      rtol: float = 1e-9, rtol_imag: float = 1e-8) -> SpectralReport:
    """Ordered QCF eigenvalues lie between the continuum and atomistic ones."""
    fact = _fact(model, fact)
    lam, max_imag = _real_spectrum(assemble_qcf0(model, mask))
    lam_a = spectrum_sym(assemble_atomistic(model))
    lam_c = spectrum_sym(assemble_continuum(model))
    lower, upper = (lam_c, lam_a) if fact.sigma > 0 else (lam_a, lam_c)
    scale = np.abs(lam_a).max()
    tol = rtol * scale
    return SpectralReport(
        eigenvalues=lam, max_imag=max_imag,
        checks=[
            check_le("spectrum_imag", max_imag / scale, rtol_imag),
            check_ge("interlace_lower", np.min(lam - lower), -tol),
            check_ge("interlace_upper", np.min(upper - lam), -tol),
        ],
        metrics={"lambda_a": lam_a, "lambda_c": lam_c, "sigma": fact.sigma},
    )


def eigenvalue_window_check(model: ChainModel, mask: RegionMask, rtol: float = 1e-9,
                            rtol_imag: float = 1e-8) -> SpectralReport:
    """``lambda_1 = 0`` and ``4 W'' sin^2(pi/N) <= lambda_j <= 4 phi''_F`` for j >= 2."""
    if not model.is_nonpositive:
        raise PreconditionError("window requires non-positive coefficients for r >= 2")
    _require_w2(model)
    lam, max_imag = _real_spectrum(assemble_qcf0(model, mask))
    scale = np.abs(lam).max()
    tol = rtol * scale
    lo = 4 * model.w2 * np.sin(np.pi / model.n) ** 2
    hi = 4 * model.phi_f
    return SpectralReport(
        eigenvalues=lam, max_imag=max_imag,
        checks=[
            check_le("spectrum_imag", max_imag / scale, rtol_imag),
            check_le("lambda1_zero", abs(lam[0]), tol),
            check_ge("window_lower", lam[1:].min(), lo - tol),
            check_le("window_upper", lam[1:].max(), hi + tol),
        ],
        metrics={"window": (lo, hi)},
    )


def fourier_rayleigh_bounds(model: ChainModel) -> tuple[float, float]:
    """min/max of ``<L^a u, u> / <L u, u>`` over the non-constant Fourier modes."""
    n = model.n
    ell = np.arange(n)[:, None]
    k = np.arange(1, n)[None, :]
    W = np.exp(2j * np.pi * ell * k / n)
    num = np.einsum("ij,ij->j", W.conj(), assemble_atomistic(model) @ W).real
    den = np.einsum("ij,ij->j", W.conj(), assemble_laplacian(n) @ W).real
    q = num / den
    return float(q.min()), float(q.max())


def prec_eigen_analysis(model: ChainModel, mask: RegionMask, fact: GrfFactorization | None = None,
                        rtol: float = 1e-9) -> SpectralReport:
    """Spectrum and eigenbases of the Laplacian-preconditioned QCF operators."""
    fact = _fact(model, fact)
    _require_w2(model)
    n = model.n
    L1_mhalf = modified_laplacian_power(n, -0.5)
    L1_inv = modified_laplacian_power(n, -1.0)
    L1_m3half = modified_laplacian_power(n, -1.5)
    Lsym = assemble_sym(model, mask, fact)
    T = L1_mhalf @ Lsym @ L1_mhalf
    lam, Vt = scipy.linalg.eigh(0.5 * (T + T.T))
    Y1 = assemble_Y1(model, fact)
    Q = assemble_qcf0(model, mask)

    B_lr = np.linalg.solve(Y1, L1_inv @ Vt)
    B_l = np.linalg.solve(Y1, L1_m3half @ Vt)
    res_lr = _diagonalization_residual(L1_mhalf @ Q @ L1_mhalf, B_lr, lam)
    res_l = _diagonalization_residual(L1_inv @ Q, B_l, lam)

    c0, c1 = fourier_rayleigh_bounds(model)
    w = model.w2
    scale = np.abs(lam).max()
    tol = rtol * scale
    checks = [
        check_le("leftright_residual", res_lr, rtol),
        check_le("left_residual", res_l, rtol),
        check_le("lambda1_zero", abs(lam[0]), tol),
        check_ge("window_lower", lam[1:].min(), min(c0, w) - tol),
        check_le("window_upper", lam[1:].max(), max(c1, w) + tol),
    ]
    if model.is_nonpositive:
        # the atomistic stability constant may be taken as c0 = W''
        checks.append(check_ge("c0_admits_w2", c0, w * (1 - rtol)))
    basis = mean_zero_basis(n)
    return SpectralReport(
        eigenvalues=lam, cond_eigenbasis=cond2(B_lr), checks=checks,
        metrics={
            "cond_leftright": cond2(B_lr),
            "cond_left": cond2(B_l),
            "c0": c0, "c1": c1,
            "cond_qcf0_on_U": cond2(basis.T @ Q @ basis),
        },
    )


def u22_bound(model: ChainModel, fact: GrfFactorization | None = None) -> float:
    """Upper bound ``1 / (W'' gamma0)`` on the U^{2,2} stability constant."""
    fact = _fact(model, fact)
    _require_stable(model, fact)
    return 1.0 / (model.w2 * coercivity_gamma0(fr_alpha_tilde(model, fact)))


def u22_stability(model: ChainModel, mask: RegionMask, fact: GrfFactorization | None = None) -> float:
    """Norm of the inverse projected QCF operator from (U, ||.||) to (U, ||L.||).

    Computed as the reciprocal smallest singular value of ``L^qcf_0 L1^-1``
    restricted to the mean-zero subspace.
    """
    fact = _fact(model, fact)
    _require_stable(model, fact)
    n = model.n
    basis = mean_zero_basis(n)
    M = basis.T @ assemble_qcf0(model, mask) @ modified_laplacian_power(n, -1.0) @ basis
    s = scipy.linalg.svdvals(M)
    if s[-1] <= 1e-14 * s[0]:
        raise InstabilityError("projected QCF operator is singular on the mean-zero subspace")
    return float(1.0 / s[-1])
