import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcspectra import (
    ChainModel,
    InvalidSizeError,
    PreconditionError,
    RegionMask,
    UnsupportedRangeError,
    assemble_atomistic,
    assemble_continuum,
    assemble_laplacian,
    assemble_qcf,
    assemble_qcf0,
    assemble_qnl,
    assemble_sym,
    assemble_Y1,
    coefficients_from_potential,
    factorize_model,
    mask_operator,
    modified_laplacian,
)
from qcspectra.operators import lennard_jones, lennard_jones_d2, morse, morse_d2

from conftest import random_nonpositive


def fd2(f, x, h=1e-5, **kw):
    return (f(x + h, **kw) - 2 * f(x, **kw) + f(x - h, **kw)) / h**2


def test_model_validation():
    m = ChainModel(10, [1.0, -0.1, -0.05])
    assert m.r_cut == 3
    assert m.w2 == pytest.approx(1 - 0.4 - 0.45, abs=1e-14)
    with pytest.raises(InvalidSizeError):
        ChainModel(6, (1.0, -0.1, -0.05))
    with pytest.raises(PreconditionError):
        ChainModel(10, (1.0,))
    with pytest.raises(PreconditionError):
        ChainModel(10, (1.0, np.nan))


def test_mask_generators():
    m = RegionMask.block(12, 4)
    assert np.flatnonzero(m.atomistic).tolist() == [4, 5, 6, 7]
    f = RegionMask.fraction(40, 0.25, seed=5)
    assert f.n_atomistic == 10
    assert f == RegionMask.fraction(40, 0.25, seed=5)
    assert np.array_equal(f.continuum, ~f.atomistic)
    with pytest.raises(PreconditionError):
        RegionMask.fraction(10, 1.5)


def test_lennard_jones_coefficients():
    phi = coefficients_from_potential("lennard-jones", 1.05, 4, a=1.0, b=-2.0)
    assert np.all(phi[1:] <= 0)
    x = 1.05 * np.arange(1, 5)
    assert np.allclose(phi, fd2(lennard_jones, x, a=1.0, b=-2.0), rtol=1e-6)


def test_morse_coefficients():
    phi = coefficients_from_potential("morse", 1.1, 3, alpha=4.0, r0=1.0)
    assert np.all(phi[1:] <= 0)
    x = 1.1 * np.arange(1, 4)
    assert np.allclose(phi, fd2(morse, x, alpha=4.0, r0=1.0), rtol=1e-6)


@pytest.mark.parametrize("x", [0.9, 1.0, 1.3, 2.2])
def test_potential_second_derivatives(x):
    # h = 1e-4 balances truncation against round-off where phi'' is small
    assert lennard_jones_d2(x) == pytest.approx(fd2(lennard_jones, x, h=1e-4), rel=1e-6)
    assert morse_d2(x, alpha=2.0) == pytest.approx(fd2(morse, x, h=1e-4, alpha=2.0), rel=1e-6)


def test_potential_errors():
    with pytest.raises(PreconditionError):
        coefficients_from_potential("buckingham", 1.0, 2)
    with pytest.raises(PreconditionError):
        coefficients_from_potential("morse", -1.0, 2)


def test_atomistic_examples():
    m = ChainModel(16, (1.0, -0.2))
    La, L = assemble_atomistic(m), assemble_laplacian(16)
    assert np.abs(La @ np.ones(16)).max() <= 1e-14
    assert np.abs(La - (m.w2 * L - m.phi_2f * L @ L)).max() <= 1e-13


def test_atomistic_dominates_continuum_when_b_nonnegative(rng):
    m = ChainModel(24, (1.0, -0.2, -0.1))
    D = assemble_atomistic(m) - assemble_continuum(m)
    u = rng.standard_normal((24, 1000))
    q = np.einsum("ij,ij->j", u, D @ u)
    assert q.min() >= -1e-10 * np.einsum("ij,ij->j", u, u).max()


def test_continuum_examples():
    m = ChainModel(20, (1.0, -0.1))
    Lc = assemble_continuum(m)
    assert np.abs(Lc - m.w2 * assemble_laplacian(20)).max() <= 1e-14
    lam = np.linalg.eigvalsh(Lc)
    expect = np.sort(4 * m.w2 * np.sin(np.pi * np.arange(20) / 20) ** 2)
    assert np.allclose(lam, expect, atol=1e-13)


def test_qcf_limits_and_row_splice():
    m = ChainModel(16, (1.0, -0.15, -0.05))
    La, Lc = assemble_atomistic(m), assemble_continuum(m)
    assert np.array_equal(assemble_qcf(m, RegionMask.all_atomistic(16)), La)
    assert np.array_equal(assemble_qcf(m, RegionMask.all_continuum(16)), Lc)
    mask = RegionMask.fraction(16, 0.5, 2)
    Lq = assemble_qcf(m, mask)
    for ell in range(16):
        assert np.array_equal(Lq[ell], La[ell] if mask.atomistic[ell] else Lc[ell])
    assert np.abs(Lq @ np.ones(16)).max() <= 1e-14


def test_qcf0_properties():
    m = ChainModel(20, (1.0, -0.1))
    mask = RegionMask.block(20, 6)
    Q = assemble_qcf0(m, mask)
    assert np.abs(Q.mean(axis=0)).max() <= 1e-13
    La = assemble_atomistic(m)
    assert np.abs(assemble_qcf0(m, RegionMask.all_atomistic(20)) - La).max() <= 1e-13
    assert np.abs(Q - Q.T).max() > 1e-3


def test_qnl_examples():
    m = ChainModel(18, (1.0, -0.2))
    assert np.abs(assemble_qnl(m, RegionMask.all_atomistic(18)) - assemble_atomistic(m)).max() <= 1e-13
    assert np.abs(assemble_qnl(m, RegionMask.all_continuum(18)) - assemble_continuum(m)).max() <= 1e-14
    Q = assemble_qnl(m, RegionMask.fraction(18, 0.4, 1))
    assert np.abs(Q - Q.T).max() <= 1e-13
    assert np.abs(Q @ np.ones(18)).max() <= 1e-13
    with pytest.raises(UnsupportedRangeError):
        assemble_qnl(ChainModel(18, (1.0, -0.1, -0.1)), RegionMask.block(18, 4))


@given(st.integers(0, 2**32 - 1))
def test_r2_representation_identities(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(6, 40))
    m = ChainModel(n, (rng.uniform(0.5, 2), rng.uniform(-1, 1)))
    mask = RegionMask.fraction(n, rng.uniform(), seed)
    L, X = assemble_laplacian(n), mask_operator(mask)
    assert np.abs(assemble_qcf(m, mask) - (m.w2 * L - m.phi_2f * X @ L @ L)).max() <= 1e-13
    assert np.abs(assemble_qnl(m, mask) - (m.w2 * L - m.phi_2f * L @ X @ L)).max() <= 1e-13


def test_y1_r2_example():
    m = ChainModel(10, (1.0, -1.0))
    Y1 = assemble_Y1(m)
    T = np.roll(np.eye(10), 1, axis=1)
    assert np.abs(Y1 + T).max() <= 1e-14
    assert np.linalg.norm(Y1, 2) == pytest.approx(1.0)


def test_y1_norm_and_reassembly(rng):
    for _ in range(15):
        phi = random_nonpositive(rng)
        m = ChainModel(64, phi)
        fact = factorize_model(m)
        Y1 = assemble_Y1(m, fact)
        assert np.linalg.norm(Y1, 2) <= fact.beta1 + 1e-10
        LY = assemble_laplacian(64) @ Y1
        target = fact.sigma * (assemble_atomistic(m) - assemble_continuum(m))
        assert np.abs(LY @ LY.T - target).max() <= 1e-10 * np.abs(target).max()


def test_sym_examples():
    m = ChainModel(24, (1.0, -0.05, -0.02, -0.01))
    mask = RegionMask.fraction(24, 0.5, 4)
    fact = factorize_model(m)
    S = assemble_sym(m, mask, fact)
    assert np.abs(S - S.T).max() <= 1e-12 * np.abs(S).max()
    L1Y1 = modified_laplacian(24) @ assemble_Y1(m, fact)
    resid = np.linalg.norm(L1Y1 @ assemble_qcf0(m, mask) - S @ L1Y1, 2)
    assert resid <= 1e-10 * np.linalg.norm(S, 2)
    full = assemble_sym(m, RegionMask.all_atomistic(24), fact)
    assert np.abs(full - assemble_atomistic(m)).max() <= 1e-12


def test_mask_size_mismatch():
    with pytest.raises(InvalidSizeError):
        assemble_qcf(ChainModel(10, (1.0, -0.1)), RegionMask.block(12, 4))
