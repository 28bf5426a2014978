"""Time evolution: the closed-form dimer mean correlations and a spectral propagator for any chain state."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .basis import SectorTable
from .errors import DimensionMismatchError, DomainError, NormalizationError
from .hamiltonian import HermitianOperator
from .spectra import Spectrum

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10


class TimeUnit(str, Enum):
    INVERSE_COUPLING = "inverse_coupling"
    INVERSE_OMEGA0 = "inverse_omega0"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid; values are dimensionless (Jt or omega0 t) according to ``unit``."""

    t_start: float
    t_end: float
    n_points: int
    unit: TimeUnit

    def __post_init__(self):
        object.__setattr__(self, "unit", TimeUnit(self.unit))
        if self.t_start < 0:
            raise DomainError(f"t_start must be >= 0, got {self.t_start}")
        if not self.t_end > self.t_start:
            raise DomainError(f"t_end ({self.t_end}) must exceed t_start ({self.t_start})")
        if self.n_points < 2:
            raise DomainError(f"n_points must be >= 2, got {self.n_points}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)

    def physical_times(self, omega0: float, coupling: float) -> np.ndarray:
        """Convert grid values to times in units of 1/energy (hbar = 1)."""
        if self.unit is TimeUnit.INVERSE_COUPLING:
            if not coupling > 0:
                raise DomainError("a grid in units of 1/J needs a positive coupling")
            return self.times / coupling
        return self.times / omega0


def default_dimer_grid() -> TimeGrid:
    """Jt in [0, 7] with 1000 points."""
    return TimeGrid(0.0, 7.0, 1000, TimeUnit.INVERSE_COUPLING)


@dataclass(frozen=True, eq=False)
class MeanCorrelations:
    """<sigma_n^dagger><sigma_n> of both dimer sites; ``times`` are in the grid's units."""

    times: np.ndarray
    unit: TimeUnit
    site1: np.ndarray
    site2: np.ndarray
    envelope: np.ndarray


@dataclass(frozen=True, eq=False)
class StateSeries:
    """Evolved states, one row per grid point."""

    times: np.ndarray
    unit: TimeUnit
    states: np.ndarray


def dimer_mean_correlations(omega0: float, j: float, grid: TimeGrid) -> MeanCorrelations:
    """Closed-form mean correlations of the ultrastrong dimer.

    site 1: f(w, t) cos^2(Jt), site 2: f(w, t) sin^2(Jt), with
    f(w, t) = cos^2(w t) + (omega0 / w)^2 sin^2(w t) and w = sqrt(omega0^2 + J^2).

    J = 0 has no coupling time scale: a grid in units of 1/J is then read as omega0 t
    and the result carries ``TimeUnit.INVERSE_OMEGA0``.
    """
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0}")
    if j < 0:
        raise DomainError(f"coupling must be non-negative, got {j}")
    if j == 0 and grid.unit is TimeUnit.INVERSE_COUPLING:
        logger.warning("J = 0 gives no 1/J time scale; reading the grid as omega0 t")
        grid = TimeGrid(grid.t_start, grid.t_end, grid.n_points, TimeUnit.INVERSE_OMEGA0)

    t = grid.physical_times(omega0, j)
    renormalized = np.hypot(omega0, j)
    envelope = np.cos(renormalized * t) ** 2 + (omega0 / renormalized) ** 2 * np.sin(renormalized * t) ** 2
    return MeanCorrelations(
        times=grid.times,
        unit=grid.unit,
        site1=envelope * np.cos(j * t) ** 2,
        site2=envelope * np.sin(j * t) ** 2,
        envelope=envelope,
    )


def evolve(spectrum: Spectrum, initial: np.ndarray, grid: TimeGrid) -> StateSeries:
    """Propagate a state with exp(-iHt) = V exp(-i lambda t) V^dagger.

    Raises:
        DimensionMismatchError: If the spectrum is partial or the state has the wrong length
        NormalizationError: If the initial state is not normalized
    """
    initial = np.asarray(initial, dtype=complex)
    if spectrum.n_states != spectrum.dim:
        raise DimensionMismatchError("evolution needs a complete eigenbasis, got a sector spectrum")
    if initial.shape != (spectrum.dim,):
        raise DimensionMismatchError(f"initial state has shape {initial.shape}, expected ({spectrum.dim},)")
    norm = np.vdot(initial, initial).real
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"initial state norm^2 is {norm:.12f}, expected 1")

    spec = spectrum.provenance.spec
    if spec is not None:
        t = grid.physical_times(spec.omega0, spec.jbar)
    elif grid.unit is TimeUnit.INVERSE_OMEGA0:
        t = grid.times
    else:
        raise DomainError("a grid in units of 1/J needs a spectrum built from a chain spec")

    vectors = spectrum.eigenvectors
    amplitudes = vectors.conj().T @ initial
    phases = np.exp(-1j * np.outer(t, spectrum.eigenvalues))
    states = (phases * amplitudes) @ vectors.T
    logger.debug(f"Evolved a {spectrum.dim}-dimensional state over {grid.n_points} points")
    return StateSeries(times=grid.times, unit=grid.unit, states=states)


def expectation_series(states: Union[StateSeries, np.ndarray], operator: HermitianOperator) -> np.ndarray:
    """<psi(t)|O|psi(t)> at every grid point."""
    rows = states.states if isinstance(states, StateSeries) else np.asarray(states)
    if rows.ndim != 2 or rows.shape[1] != operator.dim:
        raise DimensionMismatchError(f"states of shape {rows.shape} do not match operator dimension {operator.dim}")
    values = np.einsum("ti,ij,tj->t", rows.conj(), operator.matrix, rows)
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    imaginary = float(np.max(np.abs(values.imag), initial=0.0))
    if imaginary > NORM_TOL * scale:
        logger.warning(f"Expectation values carry an imaginary part up to {imaginary:.2e}")
    return values.real


def site_populations(series: StateSeries, basis: SectorTable) -> np.ndarray:
    """<sigma_n^dagger sigma_n>(t) for every site; shape (n_points, N), site 1 first."""
    if series.states.shape[1] != basis.dim:
        raise DimensionMismatchError(f"states of dimension {series.states.shape[1]} vs basis {basis.dim}")
    probabilities = np.abs(series.states) ** 2
    masks = np.arange(basis.dim, dtype=np.int64)
    occupied = np.stack([(masks >> bit) & 1 for bit in range(basis.n_sites)], axis=1).astype(float)
    return probabilities @ occupied
