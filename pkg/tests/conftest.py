"""Shared fixtures for the usctopo test suite."""

import sys
from functools import reduce
from pathlib import Path

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from usctopo.core.basis import build_basis  # noqa: E402

LOWERING = np.array([[0.0, 1.0], [0.0, 0.0]])
IDENTITY = np.eye(2)


def site_operator(single: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a 2x2 operator on one site; site 1 is the least significant bit of the mask."""
    factors = [IDENTITY] * n_sites
    factors[site - 1] = single
    # np.kron puts its first factor on the most significant bit, so list sites N..1
    return reduce(np.kron, reversed(factors))


def kronecker_chain(n_sites, omega0, bonds, rwa):
    """Reference Hamiltonian built from tensor products, independent of the bit assembler."""
    sigma = [site_operator(LOWERING, n, n_sites) for n in range(1, n_sites + 1)]
    dim = 2 ** n_sites
    h = np.zeros((dim, dim))
    for s in sigma:
        h += omega0 * s.T @ s
    for a, b, coupling in bonds:
        sa, sb = sigma[a - 1], sigma[b - 1]
        if rwa:
            h += coupling * (sa.T @ sb + sb.T @ sa)
        else:
            h += coupling * (sa + sa.T) @ (sb + sb.T)
    return h


@pytest.fixture
def kron_chain():
    return kronecker_chain


@pytest.fixture(scope="session")
def basis4():
    return build_basis(4)


@pytest.fixture(scope="session")
def basis8():
    return build_basis(8)


@pytest.fixture
def clean_env(monkeypatch, tmp_path):
    """Settings read from an empty environment inside a scratch directory."""
    for name in (
        "USCTOPO_THREADS",
        "USCTOPO_MAX_SITES",
        "USCTOPO_OUTPUT_DIR",
        "USCTOPO_ENERGY_CUT",
        "USCTOPO_LOG_LEVEL",
        "USCTOPO_PLOT_CMAP",
    ):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
