"""Tests for the dimer correlation formulas and the spectral propagator."""

import numpy as np
import pytest

from usctopo.core.basis import build_basis
from usctopo.core.dynamics import (
    TimeGrid,
    TimeUnit,
    default_dimer_grid,
    dimer_mean_correlations,
    evolve,
    expectation_series,
    site_populations,
)
from usctopo.core.errors import DimensionMismatchError, DomainError, NormalizationError
from usctopo.core.hamiltonian import ChainSpec, build_chain, build_dimer, number_operator, site_occupation_operator
from usctopo.core.observables import ground_state_occupancy
from usctopo.core.spectra import diagonalize, diagonalize_sector


def test_default_grid():
    grid = default_dimer_grid()
    assert grid.unit is TimeUnit.INVERSE_COUPLING
    assert grid.times[0] == 0.0 and grid.times[-1] == 7.0
    assert grid.times.size == 1000


@pytest.mark.parametrize("kwargs", [dict(t_start=-1.0, t_end=1.0), dict(t_start=2.0, t_end=1.0)])
def test_invalid_grid(kwargs):
    with pytest.raises(DomainError):
        TimeGrid(n_points=10, unit=TimeUnit.INVERSE_OMEGA0, **kwargs)


@pytest.mark.parametrize("j", [0.1, 0.5, 2.0])
def test_sites_sum_to_envelope(j):
    result = dimer_mean_correlations(1.0, j, default_dimer_grid())
    np.testing.assert_allclose(result.site1 + result.site2, result.envelope, atol=1e-14)
    assert np.all(result.site1 >= 0) and np.all(result.site2 >= 0)


def test_weak_coupling_close_to_rabi_swap():
    result = dimer_mean_correlations(1.0, 0.1, default_dimer_grid())
    assert np.max(np.abs(result.site1 - np.cos(result.times) ** 2)) < 0.02
    assert np.max(np.abs(result.site2 - np.sin(result.times) ** 2)) < 0.02


def test_envelope_starts_at_one():
    result = dimer_mean_correlations(1.0, 2.0, default_dimer_grid())
    assert result.envelope[0] == pytest.approx(1.0)
    assert result.site2[0] == pytest.approx(0.0)


def test_rwa_propagator_swaps_excitation():
    spectrum = diagonalize(build_dimer(1.0, 0.3, rwa=True))
    initial = np.array([0.0, 1.0, 0.0, 0.0])
    grid = TimeGrid(0.0, 7.0, 200, TimeUnit.INVERSE_COUPLING)
    series = evolve(spectrum, initial, grid)
    populations = site_populations(series, build_basis(2))
    np.testing.assert_allclose(populations[:, 0], np.cos(grid.times) ** 2, atol=1e-10)
    np.testing.assert_allclose(populations[:, 1], np.sin(grid.times) ** 2, atol=1e-10)


def test_evolution_preserves_norm():
    spec = ChainSpec.from_dimerization(6, 1.0, -0.5, 0.6, rwa=False)
    spectrum = diagonalize(build_chain(spec))
    initial = np.zeros(64)
    initial[1] = 1.0
    series = evolve(spectrum, initial, TimeGrid(0.0, 20.0, 50, TimeUnit.INVERSE_OMEGA0))
    np.testing.assert_allclose(np.linalg.norm(series.states, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(series.states[0], initial, atol=1e-12)


def test_expectation_matches_site_populations():
    basis = build_basis(4)
    spectrum = diagonalize(build_chain(ChainSpec.from_dimerization(4, 1.0, 0.3, 0.8), basis))
    initial = np.zeros(16)
    initial[1] = 1.0
    series = evolve(spectrum, initial, TimeGrid(0.0, 5.0, 30, TimeUnit.INVERSE_OMEGA0))
    populations = site_populations(series, basis)
    for site in range(1, 5):
        values = expectation_series(series, site_occupation_operator(basis, site))
        np.testing.assert_allclose(values, populations[:, site - 1], atol=1e-12)


def test_evolve_rejects_bad_input():
    spectrum = diagonalize(build_dimer(1.0, 0.3, rwa=True))
    grid = TimeGrid(0.0, 1.0, 5, TimeUnit.INVERSE_COUPLING)
    with pytest.raises(NormalizationError):
        evolve(spectrum, np.array([1.0, 1.0, 0.0, 0.0]), grid)
    with pytest.raises(DimensionMismatchError):
        evolve(spectrum, np.array([1.0, 0.0]), grid)


def test_evolve_needs_full_spectrum():
    basis = build_basis(2)
    sector = diagonalize_sector(build_dimer(1.0, 0.3, rwa=True), basis, 1)
    with pytest.raises(DimensionMismatchError):
        evolve(sector, np.array([0.0, 1.0, 0.0, 0.0]), TimeGrid(0.0, 1.0, 5, TimeUnit.INVERSE_OMEGA0))


def test_uncoupled_dimer_falls_back_to_omega0_time():
    result = dimer_mean_correlations(1.0, 0.0, default_dimer_grid())
    assert result.unit is TimeUnit.INVERSE_OMEGA0
    np.testing.assert_allclose(result.site1, 1.0, atol=1e-15)
    np.testing.assert_allclose(result.site2, 0.0, atol=1e-15)


def test_correlations_repeat_after_pi_over_j():
    j = 0.4
    omega0 = np.sqrt(3.0) * j
    first = dimer_mean_correlations(omega0, j, TimeGrid(0.0, 7.0, 500, TimeUnit.INVERSE_COUPLING))
    shifted = dimer_mean_correlations(omega0, j, TimeGrid(np.pi, 7.0 + np.pi, 500, TimeUnit.INVERSE_COUPLING))
    np.testing.assert_allclose(shifted.site1, first.site1, atol=1e-12)
    np.testing.assert_allclose(shifted.site2, first.site2, atol=1e-12)


def test_unitarity_on_a_long_grid():
    spec = ChainSpec.from_dimerization(6, 1.0, 0.4, 0.8, rwa=False)
    spectrum = diagonalize(build_chain(spec))
    initial = np.zeros(64)
    initial[0b100001] = 1.0
    series = evolve(spectrum, initial, TimeGrid(0.0, 200.0, 10_000, TimeUnit.INVERSE_OMEGA0))
    np.testing.assert_allclose(np.linalg.norm(series.states, axis=1), 1.0, atol=1e-10)


def test_energy_is_conserved():
    spec = ChainSpec.from_dimerization(4, 1.0, -0.6, 0.7, rwa=False)
    hamiltonian = build_chain(spec)
    initial = np.zeros(16)
    initial[0b0011] = np.sqrt(0.5)
    initial[0b1000] = np.sqrt(0.5)
    series = evolve(diagonalize(hamiltonian), initial, TimeGrid(0.0, 30.0, 300, TimeUnit.INVERSE_OMEGA0))
    energy = expectation_series(series, hamiltonian)
    np.testing.assert_allclose(energy, energy[0], atol=1e-10)


def test_eigenstate_is_stationary():
    basis = build_basis(4)
    spectrum = diagonalize(build_chain(ChainSpec.from_dimerization(4, 1.0, 0.2, 0.6, rwa=False), basis))
    initial = spectrum.state(5)
    series = evolve(spectrum, initial, TimeGrid(0.0, 10.0, 100, TimeUnit.INVERSE_OMEGA0))
    overlaps = np.abs(series.states.conj() @ initial)
    np.testing.assert_allclose(overlaps, 1.0, atol=1e-10)
    populations = site_populations(series, basis)
    np.testing.assert_allclose(populations, populations[0], atol=1e-10)


def test_single_excitation_ignores_counter_rotating_terms():
    basis = build_basis(2)
    initial = np.array([0.0, 1.0, 0.0, 0.0])
    grid = TimeGrid(0.0, 7.0, 200, TimeUnit.INVERSE_COUPLING)
    full = site_populations(evolve(diagonalize(build_dimer(1.0, 0.5, rwa=False)), initial, grid), basis)
    rwa = site_populations(evolve(diagonalize(build_dimer(1.0, 0.5, rwa=True)), initial, grid), basis)
    np.testing.assert_allclose(full, rwa, atol=1e-10)


def test_ground_state_occupancy_is_constant():
    basis = build_basis(4)
    spectrum = diagonalize(build_chain(ChainSpec.from_dimerization(4, 1.0, -0.5, 0.9, rwa=False), basis))
    series = evolve(spectrum, spectrum.state(1), TimeGrid(0.0, 10.0, 100, TimeUnit.INVERSE_OMEGA0))
    excitations = expectation_series(series, number_operator(basis))
    expected = ground_state_occupancy(spectrum, basis).mean_excitations
    np.testing.assert_allclose(excitations, expected, atol=1e-10)
