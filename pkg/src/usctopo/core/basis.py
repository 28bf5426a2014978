"""Bitmask Fock basis of N two-level systems and its excitation-number sectors.

Site n (1-based, site 1 at the left end of the chain) is stored in bit n-1 of the
mask, so the global basis index of a bare state equals its mask value.
"""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..config.settings import DEFAULT_MAX_SITES, HARD_MAX_SITES
from .errors import SiteOutOfRangeError, SizeOutOfRangeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasisIndex:
    """A bare state |n_1, ..., n_N> encoded as a bitmask."""

    mask: int
    n_sites: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise SizeOutOfRangeError(f"n_sites must be >= 1, got {self.n_sites}")
        if not 0 <= self.mask < (1 << self.n_sites):
            raise ValueError(f"mask {self.mask} outside 0..2^{self.n_sites}-1")

    @property
    def excitations(self) -> int:
        return self.mask.bit_count()

    def occupations(self) -> Tuple[int, ...]:
        """Occupation numbers ordered from site 1 to site N."""
        return tuple((self.mask >> bit) & 1 for bit in range(self.n_sites))

    def label(self) -> str:
        """Ket label in occupation-number notation, e.g. |1,0,0,0>."""
        return "|" + ",".join(str(n) for n in self.occupations()) + "⟩"

    def is_occupied(self, site: int) -> bool:
        _check_site(site, self.n_sites)
        return bool((self.mask >> (site - 1)) & 1)


@dataclass(frozen=True)
class SectorTable:
    """Excitation-number sectors of the 2^N dimensional bare basis.

    Attributes:
        n_sites: Chain size N
        sector_sizes: Binomial coefficients C(N, k) for k = 0..N
        sector_members: Bare states of each sector, ascending by mask
        rank: Map from mask to (sector, position within sector)
    """

    n_sites: int
    sector_sizes: Tuple[int, ...]
    sector_members: Tuple[Tuple[BasisIndex, ...], ...]
    rank: Dict[int, Tuple[int, int]] = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return 1 << self.n_sites

    def state(self, mask: int) -> BasisIndex:
        sector, position = self.rank[mask]
        return self.sector_members[sector][position]

    def sector_masks(self, sector: int) -> np.ndarray:
        """Masks (= global basis indices) of one sector, ascending."""
        if not 0 <= sector <= self.n_sites:
            raise ValueError(f"sector {sector} outside 0..{self.n_sites}")
        return np.array([s.mask for s in self.sector_members[sector]], dtype=np.int64)

    def sector_order(self) -> np.ndarray:
        """Permutation listing basis indices sector by sector, ascending mask within a sector."""
        return np.concatenate([self.sector_masks(k) for k in range(self.n_sites + 1)])

    def popcounts(self) -> np.ndarray:
        """Excitation number of every basis index, in mask order."""
        counts = np.empty(self.dim, dtype=np.int64)
        for sector, members in enumerate(self.sector_members):
            for state in members:
                counts[state.mask] = sector
        return counts


def build_basis(n_sites: int, max_sites: int = DEFAULT_MAX_SITES) -> SectorTable:
    """Enumerate the bare basis of ``n_sites`` two-level systems grouped by excitation number.

    Args:
        n_sites: Chain size N
        max_sites: Dense-work cap, 12 by default; never above the hard limit of 14 sites

    Returns:
        SectorTable with Pascal's-triangle sector sizes

    Raises:
        SizeOutOfRangeError: If n_sites is outside 1..max_sites
    """
    limit = min(max_sites, HARD_MAX_SITES)
    if not 1 <= n_sites <= limit:
        raise SizeOutOfRangeError(
            f"n_sites={n_sites} outside 1..{limit}; reduce N or restrict the work to one sector"
        )

    members: List[List[BasisIndex]] = [[] for _ in range(n_sites + 1)]
    for mask in range(1 << n_sites):
        members[mask.bit_count()].append(BasisIndex(mask, n_sites))

    rank = {
        state.mask: (sector, position)
        for sector, states in enumerate(members)
        for position, state in enumerate(states)
    }
    sizes = tuple(comb(n_sites, k) for k in range(n_sites + 1))
    table = SectorTable(
        n_sites=n_sites,
        sector_sizes=sizes,
        sector_members=tuple(tuple(states) for states in members),
        rank=rank,
    )
    logger.debug(f"Built basis for N={n_sites}: sectors {sizes}")
    return table


def apply_lowering(state: BasisIndex, site: int) -> Optional[Tuple[BasisIndex, float]]:
    """Apply sigma_site to a bare state.

    Returns:
        (lowered state, +1.0), or None when the site is empty and the operator annihilates
    """
    _check_site(site, state.n_sites)
    bit = 1 << (site - 1)
    if not state.mask & bit:
        return None
    return BasisIndex(state.mask & ~bit, state.n_sites), 1.0


def apply_raising(state: BasisIndex, site: int) -> Optional[Tuple[BasisIndex, float]]:
    """Apply sigma_site^dagger to a bare state; None when the site is already excited."""
    _check_site(site, state.n_sites)
    bit = 1 << (site - 1)
    if state.mask & bit:
        return None
    return BasisIndex(state.mask | bit, state.n_sites), 1.0


def parity(state: BasisIndex) -> int:
    """(-1) to the power of the excitation number."""
    return -1 if state.excitations % 2 else 1


def _check_site(site: int, n_sites: int) -> None:
    if not 1 <= site <= n_sites:
        raise SiteOutOfRangeError(f"site {site} outside 1..{n_sites}")
