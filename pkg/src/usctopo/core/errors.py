"""Exception hierarchy shared by the physics modules and the command line."""

from typing import Any, List, Optional


class UsctopoError(Exception):
    """Base class for every error raised by usctopo."""
    pass


class DomainError(UsctopoError, ValueError):
    """Physical parameters outside their allowed range."""
    pass


class SizeOutOfRangeError(UsctopoError, ValueError):
    """Chain size violates the dense-diagonalization guard."""
    pass


class SiteOutOfRangeError(UsctopoError, IndexError):
    """Site index outside 1..N."""
    pass


class DimensionMismatchError(UsctopoError, ValueError):
    """Operands whose Hilbert-space dimensions disagree."""
    pass


class NonHermitianError(UsctopoError, ValueError):
    """Operator fails the Hermiticity check."""
    pass


class NormalizationError(UsctopoError, ValueError):
    """State vector is not normalized within tolerance."""
    pass


class SectorNotConservedError(UsctopoError, ValueError):
    """Sector-restricted work requested on an operator that mixes sectors."""
    pass


class ConvergenceError(UsctopoError, RuntimeError):
    """The eigensolver did not converge."""

    def __init__(self, message: str, provenance: Optional[Any] = None):
        super().__init__(f"{message} (operator: {provenance})" if provenance is not None else message)
        self.provenance = provenance


class UnplottableError(UsctopoError, TypeError):
    """Object handed to the SVG emitter has no plot representation."""
    pass


class ValidationError(UsctopoError):
    """Command-line configuration failed validation; carries every message."""

    def __init__(self, messages: List[str]):
        super().__init__("; ".join(messages))
        self.messages = list(messages)


class UsageError(ValidationError):
    """Malformed command line (unknown flag, missing argument, bad literal)."""
    pass
