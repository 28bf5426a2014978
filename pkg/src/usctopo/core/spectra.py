"""Exact diagonalization with deterministic eigenvector presentation, plus the closed-form dimer oracle."""

import logging
from dataclasses import dataclass
from typing import Dict, NamedTuple, Optional

import numpy as np
from scipy import linalg

from .basis import SectorTable
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    DomainError,
    NonHermitianError,
    SectorNotConservedError,
)
from .hamiltonian import HermitianOperator, Provenance, build_dimer

logger = logging.getLogger(__name__)

HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-9
# |entries| within this of the column maximum count as tied for phase fixing
PHASE_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues with phase-fixed orthonormal eigenvectors (column k <-> eigenvalue k)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    provenance: Provenance

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def n_states(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def energy_scale(self) -> float:
        """omega0 when the spectrum came from a chain builder, otherwise max(1, max |lambda|)."""
        if self.provenance.spec is not None:
            return self.provenance.spec.omega0
        if self.n_states == 0:
            return 1.0
        return max(1.0, float(np.max(np.abs(self.eigenvalues))))

    def state(self, n: int) -> np.ndarray:
        """Eigenvector of the n-th state, 1-based in ascending energy."""
        return self.eigenvectors[:, n - 1]

    def orthonormality_error(self) -> float:
        overlap = self.eigenvectors.conj().T @ self.eigenvectors
        return float(np.max(np.abs(overlap - np.eye(self.n_states))))


class DimerEigensystem(NamedTuple):
    """Closed-form dimer eigenpairs; eigenvectors are columns in the basis |00>, |10>, |01>, |11>."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def diagonalize(op: HermitianOperator) -> Spectrum:
    """Diagonalize a dense Hermitian operator.

    Args:
        op: Operator satisfying the Hermiticity invariant

    Returns:
        Spectrum with ascending eigenvalues and phase-fixed eigenvectors

    Raises:
        NonHermitianError: If the operator is not Hermitian within tolerance
        ConvergenceError: If the eigensolver fails
    """
    error = op.hermiticity_error()
    if error > HERMITICITY_TOL:
        raise NonHermitianError(f"operator {op.provenance} is not Hermitian (relative error {error:.3e})")

    eigenvalues, eigenvectors = _eigh(op.matrix, op.provenance)
    spectrum = _present(eigenvalues, eigenvectors, op.provenance)
    logger.debug(f"Diagonalized {op.dim}x{op.dim} operator {op.provenance}")
    return spectrum


def diagonalize_sector(op: HermitianOperator, basis: SectorTable, sector: int) -> Spectrum:
    """Diagonalize one excitation-number block of an RWA operator.

    Eigenvectors are embedded back into the full 2^N space with zeros outside the sector.

    Raises:
        SectorNotConservedError: If the operator keeps counter-rotating terms
    """
    if op.provenance.rwa is not True:
        raise SectorNotConservedError(
            f"sector {sector} is not conserved by {op.provenance}; counter-rotating terms mix sectors"
        )
    if op.dim != basis.dim:
        raise DimensionMismatchError(f"operator dimension {op.dim} != basis dimension {basis.dim}")

    indices = basis.sector_masks(sector)
    block = op.matrix[np.ix_(indices, indices)]
    block_values, block_vectors = _eigh(block, op.provenance)

    embedded = np.zeros((op.dim, indices.size), dtype=block_vectors.dtype)
    embedded[indices, :] = block_vectors
    return _present(block_values, embedded, op.provenance)


def dimer_exact(omega0: float, j: float) -> DimerEigensystem:
    """Closed-form eigenfrequencies and eigenstates of the dimer with counter-rotating terms."""
    if not omega0 > 0:
        raise DomainError(f"omega0 must be positive, got {omega0}")
    if j < 0:
        raise DomainError(f"coupling must be non-negative, got {j}")

    root = np.hypot(omega0, j)
    w1, w2, w3, w4 = omega0 - root, omega0 - j, omega0 + j, omega0 + root

    vectors = np.zeros((4, 4))
    # columns: |00>=0, |10>=1, |01>=2, |11>=3
    vectors[[0, 3], 0] = np.array([w4, -j]) / np.hypot(w4, j)
    vectors[[1, 2], 1] = np.array([1.0, -1.0]) / np.sqrt(2.0)
    vectors[[1, 2], 2] = np.array([1.0, 1.0]) / np.sqrt(2.0)
    if j == 0:
        vectors[3, 3] = 1.0
    else:
        vectors[[0, 3], 3] = np.array([-w1, j]) / np.hypot(w1, j)

    return DimerEigensystem(np.array([w1, w2, w3, w4]), vectors)


def oracle_self_test(n_pairs: int = 50, seed: int = 0, max_ratio: float = 5.0) -> Dict[str, float]:
    """Compare numerical and closed-form dimer eigensystems on random (omega0, J) pairs.

    Returns:
        Worst eigenvalue and eigenvector deviations over all pairs
    """
    rng = np.random.default_rng(seed)
    worst_values = 0.0
    worst_vectors = 0.0
    for _ in range(n_pairs):
        omega0 = rng.uniform(0.5, 2.0)
        j = omega0 * rng.uniform(0.0, max_ratio)
        numeric = diagonalize(build_dimer(omega0, j, rwa=False))
        exact = dimer_exact(omega0, j)
        worst_values = max(worst_values, float(np.max(np.abs(numeric.eigenvalues - exact.eigenvalues))))
        # the omega0 +/- J pair is exactly degenerate at J = 0; only check nondegenerate columns
        for k in range(4):
            if k in (1, 2) and j < DEGENERACY_TOL * omega0:
                continue
            overlap = abs(np.vdot(exact.eigenvectors[:, k], numeric.eigenvectors[:, k]))
            worst_vectors = max(worst_vectors, abs(1.0 - overlap))
    logger.info(f"Dimer oracle over {n_pairs} pairs: eigenvalues {worst_values:.2e}, eigenvectors {worst_vectors:.2e}")
    return {"eigenvalue_error": worst_values, "eigenvector_error": worst_vectors}


def _eigh(matrix: np.ndarray, provenance: Optional[Provenance]):
    try:
        return linalg.eigh(matrix)
    except linalg.LinAlgError as e:
        logger.error(f"Eigensolver failed for {provenance}: {e}")
        raise ConvergenceError(f"eigensolver did not converge: {e}", provenance)


def _present(eigenvalues: np.ndarray, eigenvectors: np.ndarray, provenance: Provenance) -> Spectrum:
    """Fix phases and order degenerate clusters deterministically."""
    vectors = np.array(eigenvectors, copy=True)
    if np.iscomplexobj(vectors) and np.max(np.abs(vectors.imag), initial=0.0) == 0:
        vectors = vectors.real

    magnitudes = np.abs(vectors)
    peaks = np.empty(vectors.shape[1], dtype=np.int64)
    for k in range(vectors.shape[1]):
        column = magnitudes[:, k]
        # lowest basis index among entries tied with the maximum
        peaks[k] = int(np.flatnonzero(column >= column.max() - PHASE_TIE_TOL)[0])
        anchor = vectors[peaks[k], k]
        vectors[:, k] *= np.conj(anchor) / abs(anchor)

    values = np.asarray(eigenvalues, dtype=float)
    scale = provenance.spec.omega0 if provenance.spec is not None else max(1.0, float(np.max(np.abs(values), initial=0.0)))
    order = _cluster_order(values, peaks, DEGENERACY_TOL * scale)
    return Spectrum(values[order], vectors[:, order], provenance)


def _cluster_order(values: np.ndarray, peaks: np.ndarray, gap: float) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    result = []
    start = 0
    for i in range(1, order.size + 1):
        if i == order.size or values[order[i]] - values[order[i - 1]] >= gap:
            cluster = order[start:i]
            result.extend(cluster[np.argsort(peaks[cluster], kind="stable")])
            start = i
    return np.array(result, dtype=np.int64)
