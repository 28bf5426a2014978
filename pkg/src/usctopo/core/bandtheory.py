"""Continuum band theory of the one-excitation RWA sector and comparison with finite chains."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, NamedTuple, Optional

import numpy as np

from .basis import SectorTable
from .errors import DomainError
from .hamiltonian import Boundary, ChainSpec
from .spectra import Spectrum

logger = logging.getLogger(__name__)

CLASSIFICATION_TOL = 1e-9


@dataclass(frozen=True)
class DispersionSpec:
    omega0: float
    j1: float
    j2: float
    lattice_period: float = 1.0
    n_momentum_points: int = 201

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if self.j1 < 0 or self.j2 < 0:
            raise DomainError(f"couplings must be non-negative, got J1={self.j1}, J2={self.j2}")
        if not self.lattice_period > 0:
            raise DomainError(f"lattice period must be positive, got {self.lattice_period}")
        if self.n_momentum_points < 2:
            raise DomainError(f"need at least 2 momentum points, got {self.n_momentum_points}")

    @classmethod
    def from_chain(cls, spec: ChainSpec, n_momentum_points: int = 201) -> "DispersionSpec":
        return cls(spec.omega0, spec.j1, spec.j2, 1.0, n_momentum_points)

    def in_units_of_omega0(self) -> "DispersionSpec":
        """The same bands measured in units of omega0 (omega0 becomes 1)."""
        scale = self.omega0
        return DispersionSpec(1.0, self.j1 / scale, self.j2 / scale, self.lattice_period, self.n_momentum_points)

    def momenta(self) -> np.ndarray:
        """q on a uniform grid covering qd in [-pi, pi]."""
        return np.linspace(-np.pi, np.pi, self.n_momentum_points) / self.lattice_period


class Bands(NamedTuple):
    momenta: np.ndarray
    lower: np.ndarray
    upper: np.ndarray


class BowTie(NamedTuple):
    """Band edges, descending: outer upper, inner upper, inner lower, outer lower."""

    outer_upper: float
    inner_upper: float
    inner_lower: float
    outer_lower: float


class Placement(str, Enum):
    IN_BAND = "in_band"
    IN_GAP = "in_gap"
    OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class EigenvaluePlacement:
    state_index: int
    eigenvalue: float
    placement: Placement
    margin: float


@dataclass(frozen=True)
class ContainmentReport:
    """Where each one-excitation eigenvalue falls relative to the bow tie.

    ``margin`` is the distance to the nearest band edge, positive inside a band and
    negative outside. ``momentum_mismatch`` is only set for periodic chains.
    """

    bowtie: BowTie
    placements: List[EigenvaluePlacement]
    momentum_mismatch: Optional[float] = None

    @property
    def counts(self) -> Dict[str, int]:
        counts = {p.value: 0 for p in Placement}
        for item in self.placements:
            counts[item.placement.value] += 1
        return counts


def band_energy(omega0: float, j1: float, j2: float, qd: np.ndarray) -> np.ndarray:
    """sqrt(J1^2 + J2^2 + 2 J1 J2 cos(qd)), the half-splitting of the two bands."""
    return np.sqrt(np.maximum(j1 ** 2 + j2 ** 2 + 2.0 * j1 * j2 * np.cos(qd), 0.0))


def dispersion(spec: DispersionSpec) -> Bands:
    """omega_+-(q) = omega0 +- sqrt(J1^2 + J2^2 + 2 J1 J2 cos(qd))."""
    q = spec.momenta()
    half = band_energy(spec.omega0, spec.j1, spec.j2, q * spec.lattice_period)
    return Bands(q, spec.omega0 - half, spec.omega0 + half)


def bowtie_boundaries(epsilon: float, jbar: float, omega0: float) -> BowTie:
    """(omega0 + jbar, omega0 + |eps| jbar, omega0 - |eps| jbar, omega0 - jbar)."""
    if not -1.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [-1, 1], got {epsilon}")
    if jbar < 0:
        raise DomainError(f"jbar must be non-negative, got {jbar}")
    inner = abs(epsilon) * jbar
    return BowTie(omega0 + jbar, omega0 + inner, omega0 - inner, omega0 - jbar)


def discrete_momenta(n_cells: int) -> np.ndarray:
    """Allowed qd = 2 pi m / n_cells on a ring of n_cells unit cells, folded into (-pi, pi]."""
    if n_cells < 1:
        raise DomainError(f"need at least one unit cell, got {n_cells}")
    qd = 2.0 * np.pi * np.arange(n_cells) / n_cells
    qd = np.where(qd > np.pi, qd - 2.0 * np.pi, qd)
    return np.sort(qd)


def periodic_one_excitation_values(spec: ChainSpec) -> np.ndarray:
    """Analytic one-excitation RWA eigenvalues of a finite periodic chain, ascending."""
    if spec.boundary is not Boundary.PERIODIC:
        raise DomainError("discrete-momentum values only apply to periodic chains")
    qd = discrete_momenta(spec.n_sites // 2)
    half = band_energy(spec.omega0, spec.j1, spec.j2, qd)
    return np.sort(np.concatenate([spec.omega0 - half, spec.omega0 + half]))


def finite_vs_continuum(
    spectrum: Spectrum,
    basis: SectorTable,
    spec: ChainSpec,
    tol: float = CLASSIFICATION_TOL,
) -> ContainmentReport:
    """Classify the one-excitation eigenvalues of an RWA spectrum against the bow tie.

    Works on a full spectrum (states are picked by their sector-1 weight) or on the
    output of ``diagonalize_sector(..., 1)``.
    """
    if not spec.rwa:
        logger.warning("Band comparison of a spectrum with counter-rotating terms; sector labels are approximate")

    probabilities = np.abs(spectrum.eigenvectors) ** 2
    one_excitation = probabilities[basis.sector_masks(1)].sum(axis=0) > 0.5
    indices = np.flatnonzero(one_excitation)
    values = spectrum.eigenvalues[indices]

    edges = bowtie_boundaries(spec.epsilon, spec.jbar, spec.omega0)
    margin_tol = tol * spec.omega0
    placements = [
        _place(int(k) + 1, float(value), edges, margin_tol) for k, value in zip(indices, values)
    ]
    placements = _pair_edge_doublets(placements, spec.omega0, margin_tol)

    mismatch = None
    if spec.boundary is Boundary.PERIODIC:
        expected = periodic_one_excitation_values(spec)
        if expected.size == values.size:
            mismatch = float(np.max(np.abs(np.sort(values) - expected)))
        else:
            logger.warning(f"Found {values.size} one-excitation states, expected {expected.size}")

    report = ContainmentReport(edges, placements, mismatch)
    logger.debug(f"Bow-tie containment for {spec}: {report.counts}")
    return report


def _place(state_index: int, value: float, edges: BowTie, tol: float) -> EigenvaluePlacement:
    # signed distance into the nearer band interval
    upper = min(value - edges.inner_upper, edges.outer_upper - value)
    lower = min(value - edges.outer_lower, edges.inner_lower - value)
    margin = max(upper, lower)
    if margin >= -tol:
        placement = Placement.IN_BAND
    elif edges.inner_lower < value < edges.inner_upper:
        placement = Placement.IN_GAP
    else:
        placement = Placement.OUT_OF_RANGE
    return EigenvaluePlacement(state_index, value, placement, margin)


def _pair_edge_doublets(
    placements: List[EigenvaluePlacement], omega0: float, tol: float
) -> List[EigenvaluePlacement]:
    """An in-gap state's chiral partner at 2 omega0 - value is in-gap too.

    Exponentially split edge doublets straddle omega0; if one member sits within
    tolerance of an inner edge it must not be counted as a band state.
    """
    gap_values = [p.eigenvalue for p in placements if p.placement is Placement.IN_GAP]
    result = []
    for item in placements:
        if item.placement is Placement.IN_BAND and any(
            abs((2.0 * omega0 - item.eigenvalue) - g) <= tol for g in gap_values
        ):
            item = EigenvaluePlacement(item.state_index, item.eigenvalue, Placement.IN_GAP, item.margin)
        result.append(item)
    return result
