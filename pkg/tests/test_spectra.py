"""Tests for dense diagonalization, phase conventions and the dimer closed form."""

import numpy as np
import pytest

from usctopo.core.basis import build_basis
from usctopo.core.errors import NonHermitianError, SectorNotConservedError
from usctopo.core.hamiltonian import ChainSpec, HermitianOperator, build_chain, build_dimer
from usctopo.core.spectra import diagonalize, diagonalize_sector, dimer_exact, oracle_self_test


def test_dimer_eigenvalues_j_half():
    spectrum = diagonalize(build_dimer(1.0, 0.5, rwa=False))
    root = np.sqrt(1.25)
    np.testing.assert_allclose(spectrum.eigenvalues, [1 - root, 0.5, 1.5, 1 + root], atol=1e-12)


def test_dimer_oracle_random_pairs():
    rng = np.random.default_rng(3)
    for _ in range(50):
        omega0 = rng.uniform(0.5, 2.0)
        j = omega0 * rng.uniform(0.0, 5.0)
        numeric = diagonalize(build_dimer(omega0, j, rwa=False))
        exact = dimer_exact(omega0, j)
        np.testing.assert_allclose(numeric.eigenvalues, exact.eigenvalues, atol=1e-12, rtol=0)
        for k in range(4):
            overlap = abs(np.vdot(exact.eigenvectors[:, k], numeric.eigenvectors[:, k]))
            assert overlap == pytest.approx(1.0, abs=1e-10)


def test_dimer_exact_phase_matches_numeric():
    numeric = diagonalize(build_dimer(1.0, 0.7, rwa=False))
    exact = dimer_exact(1.0, 0.7)
    # both conventions make the largest entry positive
    for k in (0, 3):
        np.testing.assert_allclose(numeric.eigenvectors[:, k], exact.eigenvectors[:, k], atol=1e-10)


def test_dimer_exact_zero_coupling():
    exact = dimer_exact(1.0, 0.0)
    np.testing.assert_array_equal(exact.eigenvalues, [0.0, 1.0, 1.0, 2.0])
    np.testing.assert_array_equal(exact.eigenvectors[:, 3], [0.0, 0.0, 0.0, 1.0])
    np.testing.assert_array_equal(exact.eigenvectors[:, 0], [1.0, 0.0, 0.0, 0.0])


def test_zero_coupling_chain_spectrum():
    spectrum = diagonalize(build_chain(ChainSpec(4, 1.0, 0.0, 0.0)))
    np.testing.assert_array_equal(spectrum.eigenvalues, np.repeat(np.arange(5.0), [1, 4, 6, 4, 1]))
    # degenerate states come out as bare states ordered by mask
    assert np.argmax(np.abs(spectrum.state(2))) == 1
    assert np.argmax(np.abs(spectrum.state(5))) == 8


def test_orthonormal_and_ascending():
    spectrum = diagonalize(build_chain(ChainSpec.from_dimerization(6, 1.0, -0.6, 0.9)))
    assert spectrum.orthonormality_error() < 1e-10
    assert np.all(np.diff(spectrum.eigenvalues) >= 0)


def test_phase_convention():
    spectrum = diagonalize(build_chain(ChainSpec.from_dimerization(4, 1.0, 0.4, 0.5)))
    for k in range(spectrum.n_states):
        column = spectrum.eigenvectors[:, k]
        peak = int(np.flatnonzero(np.abs(column) >= np.abs(column).max() - 1e-12)[0])
        assert column[peak].real > 0
        assert abs(column[peak].imag) < 1e-15


def test_repeatable():
    op = build_chain(ChainSpec.from_dimerization(6, 1.0, 0.1, 0.4))
    first, second = diagonalize(op), diagonalize(op)
    np.testing.assert_array_equal(first.eigenvalues, second.eigenvalues)
    np.testing.assert_array_equal(first.eigenvectors, second.eigenvectors)


def test_non_hermitian_rejected():
    op = HermitianOperator.from_matrix(np.array([[0.0, 1.0], [0.5, 0.0]]))
    with pytest.raises(NonHermitianError):
        diagonalize(op)


def test_sector_matches_full_rwa_spectrum():
    basis = build_basis(6)
    op = build_chain(ChainSpec.from_dimerization(6, 1.0, -0.3, 0.5, rwa=True), basis)
    full = diagonalize(op)
    blocks = np.sort(np.concatenate([diagonalize_sector(op, basis, k).eigenvalues for k in range(7)]))
    np.testing.assert_allclose(blocks, full.eigenvalues, atol=1e-12)


def test_sector_vectors_embedded(basis4):
    op = build_chain(ChainSpec.from_dimerization(4, 1.0, 0.2, 0.5, rwa=True), basis4)
    sector = diagonalize_sector(op, basis4, 2)
    assert sector.n_states == 6 and sector.dim == 16
    outside = np.setdiff1d(np.arange(16), basis4.sector_masks(2))
    assert np.all(sector.eigenvectors[outside, :] == 0)


def test_sector_requires_rwa(basis4):
    op = build_chain(ChainSpec.from_dimerization(4, 1.0, 0.2, 0.5, rwa=False), basis4)
    with pytest.raises(SectorNotConservedError):
        diagonalize_sector(op, basis4, 1)


def test_oracle_self_test_passes():
    deviations = oracle_self_test()
    assert deviations["eigenvalue_error"] < 1e-12
    assert deviations["eigenvector_error"] < 1e-10
