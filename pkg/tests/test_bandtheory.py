"""Tests for the continuum dispersion, the bow tie and the finite-chain comparison."""

import numpy as np
import pytest

from usctopo.core.bandtheory import (
    DispersionSpec,
    Placement,
    bowtie_boundaries,
    discrete_momenta,
    dispersion,
    finite_vs_continuum,
    periodic_one_excitation_values,
)
from usctopo.core.basis import build_basis
from usctopo.core.errors import DomainError
from usctopo.core.hamiltonian import Boundary, ChainSpec, build_chain
from usctopo.core.spectra import diagonalize, diagonalize_sector


def test_dispersion_band_edges():
    bands = dispersion(DispersionSpec(1.0, 0.3, 0.1, n_momentum_points=101))
    centre = np.argmin(np.abs(bands.momenta))
    assert bands.upper[centre] == pytest.approx(1.4)
    assert bands.lower[centre] == pytest.approx(0.6)
    assert bands.upper[0] == pytest.approx(1.2)
    assert bands.lower[-1] == pytest.approx(0.8)


def test_bands_symmetric_about_omega0():
    bands = dispersion(DispersionSpec(1.0, 0.45, 0.05))
    np.testing.assert_allclose(bands.upper + bands.lower, 2.0, atol=1e-15)


@pytest.mark.parametrize("epsilon", [-1.0, -0.5, 0.0, 0.5, 1.0])
def test_bowtie_bounds_dispersion(epsilon):
    spec = ChainSpec.from_dimerization(2, 1.0, epsilon, 0.4)
    bands = dispersion(DispersionSpec.from_chain(spec, 401))
    edges = bowtie_boundaries(epsilon, 0.4, 1.0)
    assert np.max(bands.upper) == pytest.approx(edges.outer_upper)
    assert np.min(bands.upper) == pytest.approx(edges.inner_upper)
    assert np.max(bands.lower) == pytest.approx(edges.inner_lower)
    assert np.min(bands.lower) == pytest.approx(edges.outer_lower)


def test_bowtie_domain():
    with pytest.raises(DomainError):
        bowtie_boundaries(1.2, 0.5, 1.0)


def test_discrete_momenta():
    np.testing.assert_allclose(discrete_momenta(4), [-np.pi / 2, 0.0, np.pi / 2, np.pi])


def test_periodic_chain_matches_dispersion_exactly():
    rng = np.random.default_rng(11)
    basis = build_basis(8)
    for _ in range(20):
        epsilon = rng.uniform(-1.0, 1.0)
        jbar = rng.uniform(0.0, 1.0)
        spec = ChainSpec.from_dimerization(8, 1.0, epsilon, jbar, rwa=True, boundary=Boundary.PERIODIC)
        sector = diagonalize_sector(build_chain(spec, basis), basis, 1)
        np.testing.assert_allclose(sector.eigenvalues, periodic_one_excitation_values(spec), atol=1e-10)


def test_periodic_values_need_periodic_chain():
    with pytest.raises(DomainError):
        periodic_one_excitation_values(ChainSpec.from_dimerization(8, 1.0, 0.1, 0.5, rwa=True))


@pytest.mark.parametrize("jbar", [0.1, 0.3, 0.5])
def test_open_chain_inside_bowtie(jbar):
    basis = build_basis(8)
    for epsilon in np.linspace(-1.0, 1.0, 21):
        spec = ChainSpec.from_dimerization(8, 1.0, float(epsilon), jbar, rwa=True)
        spectrum = diagonalize(build_chain(spec, basis))
        report = finite_vs_continuum(spectrum, basis, spec)
        assert len(report.placements) == 8
        assert report.counts["out_of_range"] == 0
        assert report.counts["in_gap"] <= (2 if epsilon < 0 else 0)


def test_periodic_report_carries_mismatch():
    basis = build_basis(8)
    spec = ChainSpec.from_dimerization(8, 1.0, 0.3, 0.5, rwa=True, boundary=Boundary.PERIODIC)
    report = finite_vs_continuum(diagonalize(build_chain(spec, basis)), basis, spec)
    assert report.momentum_mismatch < 1e-10
    assert all(p.placement is Placement.IN_BAND for p in report.placements)


def test_dispersion_in_units_of_omega0():
    absolute = dispersion(DispersionSpec(2.0, 0.5, 0.5, n_momentum_points=3))
    scaled = dispersion(DispersionSpec(2.0, 0.5, 0.5, n_momentum_points=3).in_units_of_omega0())
    np.testing.assert_allclose(scaled.lower, absolute.lower / 2.0)
    np.testing.assert_allclose(scaled.upper, absolute.upper / 2.0)
    assert scaled.upper[1] == pytest.approx(1.5)


@pytest.mark.parametrize("epsilon", [-0.8, 0.0, 0.5])
def test_open_chain_spectrum_is_chiral(epsilon):
    basis = build_basis(8)
    spec = ChainSpec.from_dimerization(8, 1.0, epsilon, 0.3, rwa=True)
    values = diagonalize_sector(build_chain(spec, basis), basis, 1).eigenvalues
    np.testing.assert_allclose(values + values[::-1], 2.0, atol=1e-12)


def test_topological_chain_has_two_gap_states():
    basis = build_basis(8)
    spec = ChainSpec.from_dimerization(8, 1.0, -0.8, 0.3, rwa=True)
    report = finite_vs_continuum(diagonalize(build_chain(spec, basis)), basis, spec)
    assert report.counts == {"in_band": 6, "in_gap": 2, "out_of_range": 0}
