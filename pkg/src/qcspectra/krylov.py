"""Full (non-restarted) GMRES and the Laplacian-preconditioned QCF solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import FactorizationError, PreconditionError, ProjectionViolationError
from .model import ChainModel, RegionMask
from .operators import assemble_qcf0
from .periodic import is_mean_zero, modified_laplacian_power
from .spectral import build_vqcf_fr, cond2, spectrum_general


@dataclass
class GmresTrace:
    residual_norms: np.ndarray
    iterations: int
    converged: bool
    tol: float
    inner_product: str = "euclidean"
    solution: np.ndarray | None = field(default=None, repr=False)
    extras: dict = field(default_factory=dict, repr=False)

    @property
    def relative_residuals(self) -> np.ndarray:
        return self.residual_norms / self.residual_norms[0]


def _as_apply(A):
    if callable(A):
        return A
    A = np.asarray(A)
    return lambda v: A @ v


def gmres(apply, rhs, tol: float = 1e-10, maxit: int | None = None,
          inner: str = "euclidean", weight=None, mean_zero: bool = False):
    """Minimal-residual Krylov solve of ``A x = rhs`` from ``x0 = 0``.

    ``inner="L1-weighted"`` minimizes the residual in the inner product
    ``<u, v> = (S u) . (S v)`` where ``S = weight`` is a symmetric factor
    (e.g. ``L1^{1/2}``). Orthogonalization is classical Gram-Schmidt with
    one reorthogonalization pass; the Hessenberg least-squares problem is
    updated with Givens rotations.

    Returns ``(x, trace)``.
    """
    A = _as_apply(apply)
    b = np.asarray(rhs, dtype=float)
    n = b.size
    if mean_zero and not is_mean_zero(b):
        raise ProjectionViolationError("right-hand side must have zero mean")
    if inner == "euclidean":
        S = None
    elif inner == "L1-weighted":
        if weight is None:
            raise PreconditionError("L1-weighted inner product needs the factor S")
        S = np.asarray(weight)
    else:
        raise PreconditionError(f"unknown inner product {inner!r}")
    maxit = n if maxit is None else min(int(maxit), n)

    def metric(v):
        return v if S is None else S @ v

    sb = metric(b)
    beta = float(np.linalg.norm(sb))
    trace = GmresTrace(np.array([beta]), 0, beta == 0.0, tol, inner, np.zeros(n))
    if beta == 0.0:
        return trace.solution, trace

    V = np.zeros((n, maxit + 1))
    SV = np.zeros((n, maxit + 1))    # metric images of the basis vectors
    H = np.zeros((maxit + 1, maxit))
    cs = np.zeros(maxit)
    sn = np.zeros(maxit)
    g = np.zeros(maxit + 1)
    V[:, 0] = b / beta
    SV[:, 0] = sb / beta
    g[0] = beta
    residuals = [beta]
    converged = breakdown = False
    j = -1
    for j in range(maxit):
        w = A(V[:, j])
        sw = metric(w)
        w_norm = np.linalg.norm(sw)
        for _ in range(2):
            h = SV[:, :j + 1].T @ sw
            w = w - V[:, :j + 1] @ h
            sw = sw - SV[:, :j + 1] @ h
            H[:j + 1, j] += h
        h_next = float(np.linalg.norm(sw))
        H[j + 1, j] = h_next

        for i in range(j):
            a, c = H[i, j], H[i + 1, j]
            H[i, j] = cs[i] * a + sn[i] * c
            H[i + 1, j] = -sn[i] * a + cs[i] * c
        rho = np.hypot(H[j, j], H[j + 1, j])
        if rho == 0.0:
            break
        cs[j], sn[j] = H[j, j] / rho, H[j + 1, j] / rho
        H[j, j], H[j + 1, j] = rho, 0.0
        g[j + 1] = -sn[j] * g[j]
        g[j] = cs[j] * g[j]
        residuals.append(abs(g[j + 1]))

        breakdown = h_next <= 1e-13 * max(w_norm, 1e-300)
        if residuals[-1] <= tol * beta or breakdown:
            converged = True
            break
        V[:, j + 1] = w / h_next
        SV[:, j + 1] = sw / h_next

    k = j + 1
    y = scipy.linalg.solve_triangular(H[:k, :k], g[:k]) if k else np.zeros(0)
    x = V[:, :k] @ y
    trace.residual_norms = np.array(residuals)
    trace.iterations = len(residuals) - 1
    trace.converged = converged
    trace.solution = x
    trace.extras["breakdown"] = breakdown
    return x, trace


def fit_rate(trace: GmresTrace, skip: int = 0) -> tuple[float, float]:
    """Least-squares fit ``r_m / r_0 ~ C q^m``; returns ``(C, q)``."""
    r = trace.relative_residuals[skip:]
    m = np.arange(skip, skip + r.size)
    keep = r > 0
    slope, intercept = np.polyfit(m[keep], np.log(r[keep]), 1)
    return float(np.exp(intercept)), float(np.exp(slope))


def _check_rhs(rhs):
    rhs = np.asarray(rhs, dtype=float)
    if not is_mean_zero(rhs):
        raise ProjectionViolationError("QCF right-hand sides must lie in the mean-zero subspace")
    return rhs


def gmres_envelope(trace: GmresTrace, cond_v: float, gamma: float) -> np.ndarray:
    """``2 cond(V) ((1 - sqrt g)/(1 + sqrt g))^m ||r0||`` for m = 0..iterations."""
    rate = (1 - np.sqrt(gamma)) / (1 + np.sqrt(gamma))
    m = np.arange(trace.residual_norms.size)
    return 2.0 * cond_v * rate**m * trace.residual_norms[0]


def solve_qcf_plain(model: ChainModel, mask: RegionMask, rhs, tol: float = 1e-10,
                    maxit: int | None = None, envelope: bool = True) -> GmresTrace:
    """Unpreconditioned GMRES on the projected QCF operator.

    With ``envelope=True`` the trace carries ``gamma = lambda_2/lambda_N``,
    the measured ``cond(V^qcf)`` and the theoretical residual envelope.
    """
    rhs = _check_rhs(rhs)
    Q = assemble_qcf0(model, mask)
    _, trace = gmres(Q, rhs, tol=tol, maxit=maxit, mean_zero=True)
    if envelope:
        lam = spectrum_general(Q)[0].real
        if lam[1] <= 0:
            raise PreconditionError("the envelope needs a positive spectrum on U (is W'' > 0?)")
        gamma = lam[1] / lam[-1]
        try:
            cond_v = build_vqcf_fr(model, mask).cond_eigenbasis
        except (FactorizationError, PreconditionError):
            cond_v = cond2(spectrum_general(Q)[1])
        env = gmres_envelope(trace, cond_v, gamma)
        trace.extras.update(
            gamma=float(gamma), cond_vqcf=float(cond_v), envelope=env,
            envelope_margin=float(np.min(env - trace.residual_norms)),
        )
    return trace


def solve_qcf_pgmres_left(model: ChainModel, mask: RegionMask, rhs, tol: float = 1e-10,
                          maxit: int | None = None) -> GmresTrace:
    """GMRES on ``L1^-1 L^qcf_0 u = L1^-1 f``; residuals are ``||L1^-1 r||``."""
    rhs = _check_rhs(rhs)
    L1_inv = modified_laplacian_power(model.n, -1.0)
    _, trace = gmres(L1_inv @ assemble_qcf0(model, mask), L1_inv @ rhs, tol=tol, maxit=maxit)
    return trace


def solve_qcf_pgmres_energy(model: ChainModel, mask: RegionMask, rhs, tol: float = 1e-10,
                            maxit: int | None = None) -> GmresTrace:
    """Left-preconditioned GMRES minimizing the residual in the L1 norm.

    Residuals recorded are ``||L1^-1 r||_{L1} = ||L1^{-1/2} r||``.
    """
    rhs = _check_rhs(rhs)
    n = model.n
    L1_inv = modified_laplacian_power(n, -1.0)
    S = modified_laplacian_power(n, 0.5)
    _, trace = gmres(L1_inv @ assemble_qcf0(model, mask), L1_inv @ rhs, tol=tol, maxit=maxit,
                     inner="L1-weighted", weight=S)
    return trace


def random_mean_zero(n: int, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-random mean-zero right-hand side of unit norm."""
    f = np.random.default_rng(seed).standard_normal(n)
    f -= f.mean()
    return f / np.linalg.norm(f)


def dipole_rhs(mask: RegionMask) -> np.ndarray:
    """Two opposite unit point forces at the ends of the atomistic region."""
    sites = np.flatnonzero(mask.atomistic)
    f = np.zeros(mask.n)
    if sites.size >= 2:
        f[sites[0]], f[sites[-1]] = 1.0, -1.0
    else:
        f[0], f[mask.n // 2] = 1.0, -1.0
    return f
