"""Per-eigenstate diagnostics: participation ratio, edge and anti-edge weights, sector content,
fidelity maps, and the occupancy of the ground state."""

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .basis import SectorTable
from .errors import DimensionMismatchError, NormalizationError
from .spectra import Spectrum

logger = logging.getLogger(__name__)

NORM_TOL = 1e-10


@dataclass(frozen=True)
class StateDiagnostics:
    """Localization and sector diagnostics of one eigenstate (state_index is 1-based)."""

    state_index: int
    eigenvalue: float
    participation_ratio: float
    edge_weight: float
    anti_edge_weight: float
    dominant_sector: int
    sector_fraction: float


@dataclass(frozen=True, eq=False)
class FidelityMap:
    """|<bare|eigenstate>|^2 with rows ordered by sector then mask and columns by eigenstate."""

    rows: Tuple[int, ...]
    row_labels: Tuple[str, ...]
    cols: Tuple[int, ...]
    cells: np.ndarray
    eigenvalues: np.ndarray


class GroundStateOccupancy(NamedTuple):
    mean_excitations: float
    vacuum_deficit: float
    n_sites: int

    @property
    def per_site(self) -> float:
        """<N>/N; reads 0.5 for the ultrastrong dimer."""
        return self.mean_excitations / self.n_sites


def participation_ratio(state: np.ndarray) -> float:
    """1 / sum |c_i|^4 for a normalized state."""
    probabilities = _probabilities(state)
    return float(1.0 / np.sum(probabilities ** 2))


def edge_masks(basis: SectorTable, edge_sites: int = 1) -> np.ndarray:
    """Single-excitation masks whose excitation sits within ``edge_sites`` of either end."""
    n = basis.n_sites
    width = max(1, min(edge_sites, n))
    sites = set(range(1, width + 1)) | set(range(n - width + 1, n + 1))
    return np.array(sorted(1 << (site - 1) for site in sites), dtype=np.int64)


def anti_edge_masks(basis: SectorTable, edge_sites: int = 1) -> np.ndarray:
    """Masks with a single hole within ``edge_sites`` of either end."""
    full = basis.dim - 1
    return np.sort(full - edge_masks(basis, edge_sites))


def edge_weight(state: np.ndarray, basis: SectorTable, edge_sites: int = 1) -> float:
    """Probability of a lone excitation on an end site (|1,0,...,0> and |0,...,0,1>)."""
    probabilities = _probabilities(state, basis.dim)
    return float(np.sum(probabilities[edge_masks(basis, edge_sites)]))


def anti_edge_weight(state: np.ndarray, basis: SectorTable, edge_sites: int = 1) -> float:
    """Probability of a lone hole on an end site (|0,1,...,1> and |1,...,1,0>)."""
    probabilities = _probabilities(state, basis.dim)
    return float(np.sum(probabilities[anti_edge_masks(basis, edge_sites)]))


def sector_weights(state: np.ndarray, basis: SectorTable) -> np.ndarray:
    """Probability carried by each excitation sector 0..N."""
    probabilities = _probabilities(state, basis.dim)
    return np.bincount(basis.popcounts(), weights=probabilities, minlength=basis.n_sites + 1)


def dominant_sector(state: np.ndarray, basis: SectorTable) -> Tuple[int, float]:
    """Sector holding the largest probability (ties go to the lower sector) and its fraction."""
    weights = sector_weights(state, basis)
    sector = int(np.argmax(weights))
    return sector, float(weights[sector])


def state_diagnostics(spectrum: Spectrum, basis: SectorTable, edge_sites: int = 1) -> List[StateDiagnostics]:
    """All per-state diagnostics of a spectrum, computed column-wise in one pass."""
    if spectrum.dim != basis.dim:
        raise DimensionMismatchError(f"spectrum dimension {spectrum.dim} != basis dimension {basis.dim}")
    probabilities = np.abs(spectrum.eigenvectors) ** 2
    norms = probabilities.sum(axis=0)
    if np.any(np.abs(norms - 1.0) > NORM_TOL):
        raise NormalizationError(f"eigenvectors not normalized (worst deviation {np.max(np.abs(norms - 1.0)):.2e})")

    ratios = 1.0 / np.sum(probabilities ** 2, axis=0)
    edges = probabilities[edge_masks(basis, edge_sites)].sum(axis=0)
    anti_edges = probabilities[anti_edge_masks(basis, edge_sites)].sum(axis=0)

    indicator = np.zeros((basis.n_sites + 1, basis.dim))
    indicator[basis.popcounts(), np.arange(basis.dim)] = 1.0
    sectors = indicator @ probabilities
    dominant = np.argmax(sectors, axis=0)

    return [
        StateDiagnostics(
            state_index=k + 1,
            eigenvalue=float(spectrum.eigenvalues[k]),
            participation_ratio=float(ratios[k]),
            edge_weight=float(edges[k]),
            anti_edge_weight=float(anti_edges[k]),
            dominant_sector=int(dominant[k]),
            sector_fraction=float(sectors[dominant[k], k]),
        )
        for k in range(spectrum.n_states)
    ]


def ground_state_occupancy(spectrum: Spectrum, basis: SectorTable) -> GroundStateOccupancy:
    """Excitation content of the lowest eigenstate: <N> and 1 - |<0...0|psi_1>|^2."""
    if spectrum.dim != basis.dim:
        raise DimensionMismatchError(f"spectrum dimension {spectrum.dim} != basis dimension {basis.dim}")
    probabilities = np.abs(spectrum.state(1)) ** 2
    mean = float(np.dot(basis.popcounts(), probabilities))
    deficit = float(1.0 - probabilities[0])
    return GroundStateOccupancy(mean, max(deficit, 0.0), basis.n_sites)


def fidelity_map(spectrum: Spectrum, basis: SectorTable) -> FidelityMap:
    """Overlap-squared matrix between bare states and eigenstates."""
    if spectrum.dim != basis.dim:
        raise DimensionMismatchError(f"spectrum dimension {spectrum.dim} != basis dimension {basis.dim}")
    order = basis.sector_order()
    cells = np.abs(spectrum.eigenvectors[order, :]) ** 2
    return FidelityMap(
        rows=tuple(int(m) for m in order),
        row_labels=tuple(basis.state(int(m)).label() for m in order),
        cols=tuple(range(1, spectrum.n_states + 1)),
        cells=cells,
        eigenvalues=np.array(spectrum.eigenvalues, copy=True),
    )


def _probabilities(state: np.ndarray, dim: Optional[int] = None) -> np.ndarray:
    state = np.asarray(state)
    if dim is not None and state.shape != (dim,):
        raise DimensionMismatchError(f"state has shape {state.shape}, expected ({dim},)")
    probabilities = np.abs(state) ** 2
    norm = probabilities.sum()
    if abs(norm - 1.0) > NORM_TOL:
        raise NormalizationError(f"state norm^2 is {norm:.12f}, expected 1")
    return probabilities
