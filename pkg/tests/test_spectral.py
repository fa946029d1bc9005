import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcspectra import (
    AsymmetricInputError,
    ChainModel,
    PreconditionError,
    RegionMask,
    UnsupportedRangeError,
    assemble_atomistic,
    assemble_continuum,
    assemble_laplacian,
    assemble_qcf0,
    assemble_Y1,
    build_vqcf_fr,
    build_vqcf_r2,
    check_similarity_r2,
    cond2,
    eigenvalue_window_check,
    epsilon_optimal,
    factorize_model,
    gamma0_closed,
    interlacing_check,
    coercivity_gamma0,
    mask_operator,
    prec_eigen_analysis,
    project_mean_zero,
    spectrum_general,
    spectrum_sym,
    u22_bound,
    u22_stability,
)

from conftest import random_nonpositive


def test_spectrum_sym_examples():
    assert np.allclose(spectrum_sym(assemble_laplacian(4)), [0, 2, 2, 4], atol=1e-14)
    assert np.allclose(spectrum_sym(np.eye(5)), 1.0)
    m = ChainModel(14, (1.0, -0.1))
    expect = np.sort(4 * m.w2 * np.sin(np.pi * np.arange(14) / 14) ** 2)
    assert np.allclose(spectrum_sym(assemble_continuum(m)), expect, atol=1e-13)
    with pytest.raises(AsymmetricInputError):
        spectrum_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_spectrum_general_examples():
    ev, _ = spectrum_general(assemble_laplacian(9))
    assert np.abs(ev.imag).max() <= 1e-10
    ev, _ = spectrum_general(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert np.allclose(ev, [0, 0])
    m = ChainModel(40, (1.0, -0.1, -0.05))
    ev, V = spectrum_general(assemble_qcf0(m, RegionMask.fraction(40, 0.3, 7)))
    assert np.abs(ev.imag).max() <= 1e-8 * np.abs(ev).max()
    key = np.round(ev.real, 12)
    assert np.all(np.diff(key) >= 0)


@pytest.mark.parametrize("mask, phi, n", [
    (RegionMask.from_indices(12, range(3, 9)), (1.0, -0.05), 12),
    (RegionMask.all_atomistic(16), (1.0, -0.1), 16),
    (RegionMask.fraction(64, 0.5, 11), (1.0, -0.2), 64),
])
def test_similarity_examples(mask, phi, n):
    rep = check_similarity_r2(ChainModel(n, phi), mask)
    assert rep.passed, rep.checks


def test_similarity_requires_r2():
    with pytest.raises(UnsupportedRangeError):
        check_similarity_r2(ChainModel(12, (1.0, -0.1, -0.1)), RegionMask.block(12, 4))


@given(st.integers(0, 2**32 - 1))
def test_similarity_property(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 48))
    phi = (rng.uniform(0.5, 2.0), rng.uniform(-0.24, 0.2))
    mask = RegionMask.fraction(n, rng.uniform(), seed)
    rep = check_similarity_r2(ChainModel(n, phi), mask)
    assert rep.check("similarity_identity").passed
    assert rep.check("spectrum_match").passed


@pytest.mark.parametrize("n", [8, 16, 32])
def test_vqcf_r2_random_masks(n):
    for seed in range(3):
        rep = build_vqcf_r2(ChainModel(n, (1.0, -0.2)), RegionMask.fraction(n, 0.5, seed))
        assert rep.passed, rep.checks
        assert rep.cond_eigenbasis >= 1


def test_vqcf_r2_no_coupling():
    rep = build_vqcf_r2(ChainModel(16, (1.0, 0.0)), RegionMask.block(16, 5))
    assert rep.cond_eigenbasis == pytest.approx(1.0, abs=1e-12)


def test_gamma0_examples():
    assert gamma0_closed(0.0) == 1.0
    assert gamma0_closed(-1.0) ** 2 == pytest.approx(9 - 4 * np.sqrt(5), rel=1e-12)
    with pytest.raises(PreconditionError):
        gamma0_closed(0.1)
    for a in (0.0, -0.1, -0.5, -2.0):
        assert coercivity_gamma0(4 * a) == pytest.approx(gamma0_closed(a), rel=1e-12)


def test_epsilon_examples():
    assert epsilon_optimal(0.0) == 0.0
    assert epsilon_optimal(-1.0) == pytest.approx(np.sqrt(1.25) - 0.5, rel=1e-12)
    assert epsilon_optimal(-1e8) == pytest.approx(1.0, abs=1e-7)
    eps = [epsilon_optimal(a) for a in np.linspace(-50, 0.99, 200)]
    assert all(0 <= e < 1 for e in eps)
    with pytest.raises(PreconditionError):
        epsilon_optimal(1.0)


@pytest.mark.parametrize("alpha", [0.0, -0.1, -0.5, -1.0, -2.0])
def test_gamma0_is_singular_value_floor(alpha, rng):
    g0 = gamma0_closed(alpha)
    for n in (16, 64, 128):
        L, P = assemble_laplacian(n), project_mean_zero(n)
        for _ in range(7 if n < 128 else 2):
            X = mask_operator(RegionMask.fraction(n, rng.uniform(), int(rng.integers(1 << 30))))
            s = np.linalg.svd((np.eye(n) - alpha * P @ X @ L).T, compute_uv=False)
            assert s[-1] >= g0 - 1e-10


def test_vqcf_fr_reduces_to_r2():
    m = ChainModel(32, (1.0, -0.15))
    mask = RegionMask.fraction(32, 0.4, 8)
    fr, r2 = build_vqcf_fr(m, mask), build_vqcf_r2(m, mask)
    assert fr.passed and r2.passed
    assert fr.cond_eigenbasis == pytest.approx(r2.cond_eigenbasis, rel=1e-8)


def test_vqcf_fr_uniform_in_n():
    phi = (1.0, -0.05, -0.02, -0.01)
    conds = []
    for n in (32, 64, 128):
        rep = build_vqcf_fr(ChainModel(n, phi), RegionMask.block(n, n // 4))
        assert rep.passed, rep.checks
        conds.append(rep.cond_eigenbasis)
    assert max(conds) / min(conds) <= 1.5


def test_vqcf_fr_all_continuum():
    m = ChainModel(40, (1.0, -0.05, -0.02, -0.01))
    fact = factorize_model(m)
    rep = build_vqcf_fr(m, RegionMask.all_continuum(40), fact)
    cy = cond2(assemble_Y1(m, fact))
    assert rep.cond_eigenbasis == pytest.approx(cy, rel=1e-8)
    assert cy <= fact.beta1 / fact.beta0 * (1 + 1e-10)


def test_vqcf_fr_stability_precondition():
    # positive symbol with sigma beta1^2 / W'' far below -1/4 is rejected
    with pytest.raises(PreconditionError):
        build_vqcf_fr(ChainModel(16, (1.0, 0.0, 0.5)), RegionMask.block(16, 4))


def test_interlacing_limits():
    m = ChainModel(30, (1.0, -0.1, -0.05))
    La = spectrum_sym(assemble_atomistic(m))
    Lc = spectrum_sym(assemble_continuum(m))
    rep = interlacing_check(m, RegionMask.all_atomistic(30))
    assert rep.passed and np.allclose(rep.eigenvalues, La, atol=1e-12)
    rep = interlacing_check(m, RegionMask.all_continuum(30))
    assert rep.passed and np.allclose(rep.eigenvalues, Lc, atol=1e-12)


def test_interlacing_r3_block():
    rep = interlacing_check(ChainModel(48, (1.0, -0.1, -0.05)), RegionMask.block(48, 16))
    assert rep.passed, rep.checks


def test_interlacing_negative_sigma():
    # phi''_2F > 0 flips the ordering
    rep = interlacing_check(ChainModel(32, (1.0, 0.1)), RegionMask.fraction(32, 0.5, 1))
    assert rep.metrics["sigma"] == -1
    assert rep.passed, rep.checks


def test_window_examples():
    m = ChainModel(32, (1.0, -0.1))
    for mask in (RegionMask.block(32, 8), RegionMask.fraction(32, 0.5, 0), RegionMask.all_atomistic(32)):
        rep = eigenvalue_window_check(m, mask)
        assert rep.passed, rep.checks
        lo, hi = rep.metrics["window"]
        assert lo == pytest.approx(4 * 0.6 * np.sin(np.pi / 32) ** 2)
        assert hi == 4.0
    rep = eigenvalue_window_check(m, RegionMask.all_continuum(32))
    assert rep.eigenvalues[-1] == pytest.approx(4 * m.w2 * np.sin(np.pi * 16 / 32) ** 2)
    with pytest.raises(PreconditionError):
        eigenvalue_window_check(ChainModel(32, (1.0, 0.1)), RegionMask.block(32, 8))


def test_prec_eigen_nonpositive():
    m = ChainModel(64, (1.0, -0.05, -0.02, -0.01))
    rep = prec_eigen_analysis(m, RegionMask.block(64, 16))
    assert rep.passed, rep.checks
    lam = rep.eigenvalues[1:]
    tol = 1e-9 * np.abs(rep.eigenvalues).max()
    assert lam.min() >= m.w2 - tol
    assert lam.max() <= rep.metrics["c1"] + tol


def test_u22_examples():
    m = ChainModel(32, (1.0, -0.1, -0.05))
    assert u22_stability(m, RegionMask.all_continuum(32)) == pytest.approx(1 / m.w2, rel=1e-12)
    mask = RegionMask.fraction(32, 0.4, 3)
    val = u22_stability(m, mask)
    assert val <= u22_bound(m)
    for shift in (1, 5, 17):
        assert u22_stability(m, mask.roll(shift)) == pytest.approx(val, rel=1e-9)
