"""Spectral analysis of linearized force-based quasicontinuum operators on periodic chains."""

from .errors import (
    AsymmetricInputError,
    ConfigError,
    EigensolverError,
    FactorizationDegeneracyError,
    FactorizationError,
    InexactDivisionError,
    InstabilityError,
    InvalidSizeError,
    MixedSignError,
    PreconditionError,
    ProjectionViolationError,
    QCSpectraError,
    UnsupportedRangeError,
    WrapAmbiguityError,
)
from .krylov import (
    GmresTrace,
    dipole_rhs,
    fit_rate,
    gmres,
    random_mean_zero,
    solve_qcf_pgmres_energy,
    solve_qcf_pgmres_left,
    solve_qcf_plain,
)
from .laurent import (
    BetaBounds,
    GrfFactorization,
    LaurentPoly,
    beta_bounds_closed_form,
    beta_bounds_numeric,
    build_b,
    build_b1,
    eval_f_r,
    grf_factorize,
    laurent_div_exact,
    laurent_mul,
)
from .model import ChainModel, RegionMask
from .operators import (
    assemble_atomistic,
    assemble_continuum,
    assemble_qcf,
    assemble_qcf0,
    assemble_qnl,
    assemble_sym,
    assemble_Y1,
    coefficients_from_potential,
    factorize_model,
)
from .periodic import (
    assemble_difference,
    assemble_laplacian,
    assemble_translation,
    circulant_from_laurent,
    mask_operator,
    modified_laplacian,
    modified_laplacian_power,
    project_mean_zero,
)
from .spectral import (
    SpectralReport,
    build_vqcf_fr,
    build_vqcf_r2,
    check_similarity_r2,
    cond2,
    eigenvalue_window_check,
    epsilon_optimal,
    gamma0_closed,
    interlacing_check,
    coercivity_gamma0,
    prec_eigen_analysis,
    spectrum_general,
    spectrum_sym,
    u22_bound,
    u22_stability,
    vqcf_fr_cond_bound,
)

__version__ = "0.1.0"
