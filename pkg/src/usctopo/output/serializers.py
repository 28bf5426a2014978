"""CSV, JSON and binary writers for sweep results, series and maps."""

import csv
import json
import logging
import struct
from dataclasses import asdict, is_dataclass
from enum import Enum
from functools import singledispatch
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO, Tuple

import numpy as np

from .. import __version__
from ..core.bandtheory import Bands, ContainmentReport
from ..core.dynamics import MeanCorrelations
from ..core.hamiltonian import Boundary, HermitianOperator
from ..core.observables import FidelityMap
from ..core.spectra import Spectrum
from ..core.sweep import SweepResult

logger = logging.getLogger(__name__)

Table = Tuple[List[str], List[Dict[str, Any]]]

DUMP_MAGIC = b"USCH"
DUMP_HEADER = struct.Struct("<4sIII")
FLAG_RWA = 1
FLAG_PERIODIC = 2


@singledispatch
def tabulate(result) -> Table:
    """Column names and row dicts of a result, in canonical order."""
    raise TypeError(f"cannot tabulate {type(result).__name__}")


@tabulate.register
def _(result: SweepResult) -> Table:
    return list(result.columns), list(result.records)


@tabulate.register
def _(result: Spectrum) -> Table:
    scale = result.energy_scale
    rows = [{"n": k + 1, "eigenvalue": float(value) / scale} for k, value in enumerate(result.eigenvalues)]
    return ["n", "eigenvalue"], rows


@tabulate.register
def _(result: MeanCorrelations) -> Table:
    rows = [
        {"t": float(t), "site1": float(a), "site2": float(b), "envelope": float(f)}
        for t, a, b, f in zip(result.times, result.site1, result.site2, result.envelope)
    ]
    return ["t", "site1", "site2", "envelope"], rows


@tabulate.register
def _(result: Bands) -> Table:
    rows = [
        {"q": float(q), "lower": float(lo), "upper": float(up)}
        for q, lo, up in zip(result.momenta, result.lower, result.upper)
    ]
    return ["q", "lower", "upper"], rows


@tabulate.register
def _(result: FidelityMap) -> Table:
    rows = []
    for col_index, n in enumerate(result.cols):
        for row_index, (mask, label) in enumerate(zip(result.rows, result.row_labels)):
            rows.append({
                "n": n,
                "bare_mask": mask,
                "bare_state": label,
                "probability": float(result.cells[row_index, col_index]),
            })
    return ["n", "bare_mask", "bare_state", "probability"], rows


@tabulate.register
def _(result: ContainmentReport) -> Table:
    rows = [
        {
            "n": p.state_index,
            "eigenvalue": p.eigenvalue,
            "placement": p.placement.value,
            "margin": p.margin,
        }
        for p in result.placements
    ]
    return ["n", "eigenvalue", "placement", "margin"], rows


def format_value(value: Any) -> str:
    """Render one CSV cell; floats keep 17 significant digits so they round-trip exactly."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def write_csv(result, stream: TextIO) -> int:
    """Write the CSV body of a result to an open text stream; returns the row count."""
    columns, rows = tabulate(result)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c, "")) for c in columns])
    return len(rows)


def emit_csv(result, path: Path, config: Optional[Any] = None) -> Path:
    """Write a result as UTF-8 CSV with a ``<path>.meta.json`` sidecar.

    Args:
        result: SweepResult, Spectrum, MeanCorrelations, Bands, FidelityMap or ContainmentReport
        path: Destination file
        config: Run configuration recorded in the sidecar

    Returns:
        The path written

    Raises:
        OSError: With the offending path in the message
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            count = write_csv(result, f)
        sidecar = path.with_name(path.name + ".meta.json")
        sidecar.write_text(json.dumps(_metadata(result, config), indent=2, sort_keys=True, default=_json_default), encoding="utf-8")
    except OSError as e:
        logger.error(f"Could not write CSV to {path}: {e}")
        raise OSError(f"{path}: {e}") from e
    logger.info(f"Wrote {count} rows to {path}")
    return path


def emit_json(result, path: Path, config: Optional[Any] = None) -> Path:
    """Write records as a JSON array of objects plus a metadata object."""
    path = Path(path)
    columns, rows = tabulate(result)
    payload = {
        "metadata": _metadata(result, config),
        "records": [{c: _plain(row.get(c)) for c in columns} for row in rows],
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, default=_json_default), encoding="utf-8")
    except OSError as e:
        logger.error(f"Could not write JSON to {path}: {e}")
        raise OSError(f"{path}: {e}") from e
    logger.info(f"Wrote {len(rows)} records to {path}")
    return path


def dump_matrix(op: HermitianOperator, path: Path) -> Path:
    """Debug dump: 16-byte header (magic, dim, flags, reserved) then row-major little-endian float64."""
    flags = 0
    spec = op.provenance.spec
    if spec is not None and spec.rwa:
        flags |= FLAG_RWA
    if spec is not None and spec.boundary is Boundary.PERIODIC:
        flags |= FLAG_PERIODIC
    path = Path(path)
    with open(path, "wb") as f:
        f.write(DUMP_HEADER.pack(DUMP_MAGIC, op.dim, flags, 0))
        f.write(np.ascontiguousarray(op.matrix.real, dtype="<f8").tobytes())
    return path


def load_matrix(path: Path) -> Tuple[np.ndarray, int]:
    """Read a debug dump back; returns (matrix, flags)."""
    data = Path(path).read_bytes()
    magic, dim, flags, _ = DUMP_HEADER.unpack_from(data)
    if magic != DUMP_MAGIC:
        raise ValueError(f"{path}: not a matrix dump (magic {magic!r})")
    matrix = np.frombuffer(data, dtype="<f8", offset=DUMP_HEADER.size, count=dim * dim)
    return matrix.reshape(dim, dim).copy(), flags


def _metadata(result, config: Optional[Any]) -> Dict[str, Any]:
    metadata: Dict[str, Any] = {"version": __version__}
    if isinstance(result, SweepResult):
        metadata.update(result.metadata)
        if result.failures:
            metadata["failures"] = [{"point": f.point, "error": f.error} for f in result.failures]
    if config is not None:
        metadata["config"] = config
    return metadata


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, Enum):
        return value.value
    return value


def _json_default(value: Any) -> Any:
    if is_dataclass(value) and not isinstance(value, type):
        return {k: _plain(v) for k, v in asdict(value).items()}
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (tuple, set)):
        return list(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    plain = _plain(value)
    if plain is value:
        raise TypeError(f"not JSON serializable: {type(value).__name__}")
    return plain
