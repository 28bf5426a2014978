"""Dense Hamiltonians of the dimer and of the dimerized chain, with or without counter-rotating terms."""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..config.settings import HARD_MAX_SITES
from .basis import SectorTable, build_basis
from .errors import DimensionMismatchError, DomainError, SiteOutOfRangeError, SizeOutOfRangeError

logger = logging.getLogger(__name__)

Bond = Tuple[int, int, float]


class Boundary(str, Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class ChainSpec:
    """Physical model of a dimerized chain.

    Couplings are stored as (j1, j2); ``epsilon`` and ``jbar`` are derived. J1 acts on the
    bonds (2n-1, 2n), J2 on the bonds (2n, 2n+1). All energies in the units of omega0.
    """

    n_sites: int
    omega0: float
    j1: float
    j2: float
    rwa: bool = False
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if self.n_sites < 1:
            raise SizeOutOfRangeError(f"n_sites must be >= 1, got {self.n_sites}")
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if self.j1 < 0 or self.j2 < 0:
            raise DomainError(f"couplings must be non-negative, got J1={self.j1}, J2={self.j2}")
        if self.boundary is Boundary.PERIODIC and self.n_sites % 2:
            raise DomainError(f"periodic chains need an even number of sites, got N={self.n_sites}")

    @classmethod
    def from_dimerization(
        cls,
        n_sites: int,
        omega0: float,
        epsilon: float,
        jbar: float,
        rwa: bool = False,
        boundary: Boundary = Boundary.OPEN,
    ) -> "ChainSpec":
        """Build a spec from the dimerization parameter and the chain coupling strength."""
        if not -1.0 <= epsilon <= 1.0:
            raise DomainError(f"epsilon must lie in [-1, 1], got {epsilon}")
        if jbar < 0:
            raise DomainError(f"jbar must be non-negative, got {jbar}")
        j1 = (1.0 + epsilon) * jbar / 2.0
        j2 = (1.0 - epsilon) * jbar / 2.0
        return cls(n_sites, omega0, j1, j2, rwa, boundary)

    @classmethod
    def from_couplings(
        cls,
        n_sites: int,
        omega0: float,
        j1: float,
        j2: float,
        rwa: bool = False,
        boundary: Boundary = Boundary.OPEN,
    ) -> "ChainSpec":
        return cls(n_sites, omega0, j1, j2, rwa, boundary)

    @property
    def jbar(self) -> float:
        return self.j1 + self.j2

    @property
    def epsilon(self) -> float:
        # jbar = 0 leaves epsilon undefined; the spectrum is coupling-free so use 0
        if self.jbar == 0:
            return 0.0
        return (self.j1 - self.j2) / self.jbar

    def bonds(self) -> List[Bond]:
        """All (site_a, site_b, coupling) pairs, sites 1-based, closing bond last."""
        bonds: List[Bond] = []
        for n in range(1, self.n_sites // 2 + 1):
            bonds.append((2 * n - 1, 2 * n, self.j1))
        for n in range(1, (self.n_sites - 1) // 2 + 1):
            bonds.append((2 * n, 2 * n + 1, self.j2))
        if self.boundary is Boundary.PERIODIC:
            bonds.append((self.n_sites, 1, self.j2))
        return bonds

    def with_rwa(self, rwa: bool) -> "ChainSpec":
        return ChainSpec(self.n_sites, self.omega0, self.j1, self.j2, rwa, self.boundary)


@dataclass(frozen=True)
class Provenance:
    """Which builder produced an operator, and from what."""

    builder: str
    spec: Optional[ChainSpec] = None

    @property
    def rwa(self) -> Optional[bool]:
        return None if self.spec is None else self.spec.rwa

    def __str__(self) -> str:
        if self.spec is None:
            return self.builder
        s = self.spec
        return (
            f"{self.builder}(N={s.n_sites}, omega0={s.omega0:g}, J1={s.j1:g}, J2={s.j2:g}, "
            f"rwa={s.rwa}, boundary={s.boundary.value})"
        )


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Dense real-symmetric (Hermitian) matrix on the mask-ordered bare basis."""

    matrix: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        matrix = np.array(self.matrix, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got shape {matrix.shape}")
        matrix.flags.writeable = False
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, label: str = "custom") -> "HermitianOperator":
        return cls(np.asarray(matrix), Provenance(label))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self.matrix

    def hermiticity_error(self) -> float:
        """max |H - H^dagger| relative to max |H| (0 for the zero matrix)."""
        scale = np.max(np.abs(self.matrix)) if self.matrix.size else 0.0
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)) / scale)


def build_dimer(omega0: float, j: float, rwa: bool) -> HermitianOperator:
    """4x4 Hamiltonian of two coupled two-level systems in the basis |00>, |10>, |01>, |11>."""
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0}")
    if j < 0:
        raise DomainError(f"coupling must be non-negative, got {j}")
    spec = ChainSpec(2, omega0, j, 0.0, rwa)
    return HermitianOperator(_assemble(spec), Provenance("build_dimer", spec))


def build_chain(spec: ChainSpec, basis: Optional[SectorTable] = None) -> HermitianOperator:
    """Assemble the 2^N x 2^N chain Hamiltonian from bit operations.

    Args:
        spec: The chain model
        basis: Sector table of the same size; built on demand when omitted

    Raises:
        DimensionMismatchError: If basis and spec disagree on N
        SizeOutOfRangeError: If N exceeds the dense guard
    """
    if basis is None:
        basis = build_basis(spec.n_sites)
    if basis.n_sites != spec.n_sites:
        raise DimensionMismatchError(f"basis has N={basis.n_sites} but spec has N={spec.n_sites}")
    _check_dense(spec.n_sites)
    matrix = _assemble(spec)
    logger.debug(f"Assembled {matrix.shape[0]}x{matrix.shape[1]} Hamiltonian for {Provenance('build_chain', spec)}")
    return HermitianOperator(matrix, Provenance("build_chain", spec))


def apply_chain(spec: ChainSpec, vector: np.ndarray) -> np.ndarray:
    """Matrix-free H @ vector using the same bit rules as the dense assembler."""
    dim = 1 << spec.n_sites
    vector = np.asarray(vector)
    if vector.shape[0] != dim:
        raise DimensionMismatchError(f"vector has length {vector.shape[0]}, expected {dim}")
    masks = np.arange(dim, dtype=np.int64)
    result = spec.omega0 * _popcount(masks).astype(float).reshape((dim,) + (1,) * (vector.ndim - 1)) * vector
    for sources, targets, coupling in _bond_transitions(spec, masks):
        np.add.at(result, targets, coupling * vector[sources])
    return result


def number_operator(basis: SectorTable) -> HermitianOperator:
    """Total excitation number, diagonal in the bare basis."""
    _check_dense(basis.n_sites)
    return HermitianOperator(np.diag(basis.popcounts().astype(float)), Provenance("number_operator"))


def parity_operator(basis: SectorTable) -> HermitianOperator:
    """(-1)^N as a diagonal matrix."""
    _check_dense(basis.n_sites)
    signs = np.where(basis.popcounts() % 2 == 0, 1.0, -1.0)
    return HermitianOperator(np.diag(signs), Provenance("parity_operator"))


def site_occupation_operator(basis: SectorTable, site: int) -> HermitianOperator:
    """sigma_site^dagger sigma_site, diagonal in the bare basis."""
    if not 1 <= site <= basis.n_sites:
        raise SiteOutOfRangeError(f"site {site} outside 1..{basis.n_sites}")
    masks = np.arange(basis.dim, dtype=np.int64)
    occupied = ((masks >> (site - 1)) & 1).astype(float)
    return HermitianOperator(np.diag(occupied), Provenance(f"site_occupation_operator[{site}]"))


def _assemble(spec: ChainSpec) -> np.ndarray:
    dim = 1 << spec.n_sites
    masks = np.arange(dim, dtype=np.int64)
    matrix = np.diag(spec.omega0 * _popcount(masks).astype(float))
    for sources, targets, coupling in _bond_transitions(spec, masks):
        # each bond maps masks bijectively, so no index repeats within one update
        matrix[targets, sources] += coupling
    return matrix


def _bond_transitions(spec: ChainSpec, masks: np.ndarray):
    """Yield (source masks, target masks, coupling) for every bond.

    (sigma_a + sigma_a^dagger)(sigma_b + sigma_b^dagger) flips both bits with unit
    amplitude. Under the RWA only flips that move an excitation between a and b survive.
    """
    for site_a, site_b, coupling in spec.bonds():
        if coupling == 0:
            continue
        bit_a, bit_b = site_a - 1, site_b - 1
        flip = (1 << bit_a) | (1 << bit_b)
        sources = masks
        if spec.rwa:
            hopping = ((masks >> bit_a) & 1) != ((masks >> bit_b) & 1)
            sources = masks[hopping]
        yield sources, sources ^ flip, coupling


def _popcount(masks: np.ndarray) -> np.ndarray:
    counts = np.zeros_like(masks)
    remaining = masks.copy()
    while np.any(remaining):
        counts += remaining & 1
        remaining >>= 1
    return counts


def _check_dense(n_sites: int) -> None:
    if not 1 <= n_sites <= HARD_MAX_SITES:
        raise SizeOutOfRangeError(f"dense operators limited to 1..{HARD_MAX_SITES} sites, got {n_sites}")
