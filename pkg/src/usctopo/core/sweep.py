"""Parameter sweeps over (epsilon, jbar, N, rwa) producing long-format records."""

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .. import __version__
from ..config.settings import DEFAULT_MAX_SITES
from .basis import SectorTable, build_basis
from .errors import DomainError
from .hamiltonian import Boundary, ChainSpec, build_chain
from .observables import FidelityMap, fidelity_map, ground_state_occupancy, state_diagnostics
from .spectra import diagonalize

logger = logging.getLogger(__name__)

AXES = ("epsilon", "jbar", "n_sites", "rwa")
DEFAULT_JBAR_VALUES = (0.1, 0.3, 0.5)


class Output(str, Enum):
    EIGENVALUES = "eigenvalues"
    PARTICIPATION_RATIO = "participation_ratio"
    EDGE_WEIGHTS = "edge_weights"
    SECTORS = "sectors"
    OCCUPANCY = "occupancy"
    FIDELITY_MAP = "fidelity_map"


EIGEN_RESOLVED = {Output.EIGENVALUES, Output.PARTICIPATION_RATIO, Output.EDGE_WEIGHTS, Output.SECTORS}


def default_epsilon_grid(n_points: int = 201) -> Tuple[float, ...]:
    """Uniform epsilon values over [-1, 1]."""
    return tuple(float(x) for x in np.linspace(-1.0, 1.0, n_points))


@dataclass(frozen=True)
class SweepPlan:
    """A template model plus at most two swept axes.

    The template is given in (epsilon, jbar) form; swept axes override its values.
    """

    n_sites: int
    omega0: float = 1.0
    epsilon: float = 0.0
    jbar: float = 0.5
    rwa: bool = False
    boundary: Boundary = Boundary.OPEN
    axes: Dict[str, Tuple[Any, ...]] = field(default_factory=dict)
    outputs: Tuple[Output, ...] = (Output.EIGENVALUES,)
    edge_sites: int = 1

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "outputs", tuple(Output(o) for o in self.outputs))
        object.__setattr__(self, "axes", {name: tuple(values) for name, values in self.axes.items()})
        if len(self.axes) > 2:
            raise DomainError(f"at most two swept axes are supported, got {list(self.axes)}")
        for name, values in self.axes.items():
            if name not in AXES:
                raise DomainError(f"unknown sweep axis {name!r}; choose from {AXES}")
            if not values:
                raise DomainError(f"axis {name!r} has no values")
            if name in ("epsilon", "jbar") and not all(np.isfinite(v) for v in values):
                raise DomainError(f"axis {name!r} contains non-finite values")
            if name == "epsilon" and not all(-1.0 <= v <= 1.0 for v in values):
                raise DomainError("epsilon values must lie in [-1, 1]")
        if not self.outputs:
            raise DomainError("a sweep needs at least one requested output")

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "SweepPlan":
        """Read a JSON plan: template keys, ``axes`` (lists, or {"grid": n} for epsilon) and ``outputs``."""
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        axes = {}
        for name, values in data.pop("axes", {}).items():
            if isinstance(values, dict) and "grid" in values:
                values = default_epsilon_grid(int(values["grid"]))
            axes[name] = tuple(values)
        return cls(axes=axes, **data)

    @property
    def eigen_resolved(self) -> bool:
        return any(o in EIGEN_RESOLVED for o in self.outputs)

    def grid(self) -> List[Dict[str, Any]]:
        """Grid points in canonical order, first axis outermost."""
        names = list(self.axes)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axes[n] for n in names))]

    def spec_at(self, point: Dict[str, Any]) -> ChainSpec:
        values = {
            "n_sites": self.n_sites,
            "epsilon": self.epsilon,
            "jbar": self.jbar,
            "rwa": self.rwa,
        }
        values.update(point)
        return ChainSpec.from_dimerization(
            int(values["n_sites"]),
            self.omega0,
            float(values["epsilon"]),
            float(values["jbar"]),
            bool(values["rwa"]),
            self.boundary,
        )

    def largest_n(self) -> int:
        return max([self.n_sites, *self.axes.get("n_sites", ())])

    def columns(self) -> List[str]:
        """CSV column names in emission order."""
        columns = ["epsilon", "jbar"]
        columns += [name for name in ("n_sites", "rwa") if name in self.axes]
        if self.eigen_resolved:
            columns += ["n", "eigenvalue"]
            if Output.PARTICIPATION_RATIO in self.outputs:
                columns.append("participation_ratio")
            if Output.EDGE_WEIGHTS in self.outputs:
                columns += ["edge_weight", "anti_edge_weight"]
            if Output.SECTORS in self.outputs:
                columns += ["dominant_sector", "sector_fraction"]
        if Output.OCCUPANCY in self.outputs:
            columns += ["mean_excitations", "vacuum_deficit", "per_site_occupancy"]
        return columns

    def describe(self) -> Dict[str, Any]:
        data = asdict(self)
        data["boundary"] = self.boundary.value
        data["outputs"] = [o.value for o in self.outputs]
        data["axes"] = {name: list(values) for name, values in self.axes.items()}
        return data


@dataclass(frozen=True)
class SweepFailure:
    point: Dict[str, Any]
    error: str


@dataclass
class SweepResult:
    columns: List[str]
    records: List[Dict[str, Any]]
    metadata: Dict[str, Any]
    failures: List[SweepFailure] = field(default_factory=list)
    fidelity_maps: List[Tuple[Dict[str, Any], FidelityMap]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_sweep(
    plan: SweepPlan,
    workers: int = 1,
    tolerances: Optional[Dict[str, float]] = None,
    max_sites: int = DEFAULT_MAX_SITES,
) -> SweepResult:
    """Evaluate every grid point of a plan.

    Points run on a thread pool when ``workers > 1``; records are always emitted in
    canonical order (axes outer to inner, then state index). A failing point is logged
    and recorded in ``failures`` without stopping the rest of the grid.

    Raises:
        SizeOutOfRangeError: If the largest N in the plan exceeds ``max_sites``
    """
    bases = {n: build_basis(n, max_sites) for n in sorted({plan.n_sites, *plan.axes.get("n_sites", ())})}
    points = plan.grid()
    logger.info(f"Sweep started: {len(points)} grid points, outputs {[o.value for o in plan.outputs]}, workers={workers}")

    def evaluate(point):
        try:
            return _evaluate_point(plan, point, bases)
        except Exception as e:
            logger.warning(f"Sweep point {point} failed: {e}")
            return e

    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(evaluate, points))
    else:
        outcomes = [evaluate(point) for point in points]

    records: List[Dict[str, Any]] = []
    failures: List[SweepFailure] = []
    maps: List[Tuple[Dict[str, Any], FidelityMap]] = []
    for point, outcome in zip(points, outcomes):
        if isinstance(outcome, Exception):
            failures.append(SweepFailure(point, f"{type(outcome).__name__}: {outcome}"))
            continue
        point_records, point_map = outcome
        records.extend(point_records)
        if point_map is not None:
            maps.append((point, point_map))

    if failures:
        logger.warning(f"Sweep finished with {len(failures)}/{len(points)} failed points")
    else:
        logger.info(f"Sweep finished: {len(records)} records")

    metadata = {
        "plan": plan.describe(),
        "timestamp": datetime.now().isoformat(timespec="seconds"),
        "version": __version__,
        "tolerances": dict(tolerances or {}),
    }
    return SweepResult(plan.columns(), records, metadata, failures, maps)


def _evaluate_point(
    plan: SweepPlan, point: Dict[str, Any], bases: Dict[int, SectorTable]
) -> Tuple[List[Dict[str, Any]], Optional[FidelityMap]]:
    spec = plan.spec_at(point)
    basis = bases[spec.n_sites]
    spectrum = diagonalize(build_chain(spec, basis))

    coordinates: Dict[str, Any] = {
        "epsilon": float(point.get("epsilon", plan.epsilon)),
        "jbar": float(point.get("jbar", plan.jbar)) / plan.omega0,
    }
    if "n_sites" in plan.axes:
        coordinates["n_sites"] = spec.n_sites
    if "rwa" in plan.axes:
        coordinates["rwa"] = spec.rwa

    occupancy: Dict[str, Any] = {}
    if Output.OCCUPANCY in plan.outputs:
        ground = ground_state_occupancy(spectrum, basis)
        occupancy = {
            "mean_excitations": ground.mean_excitations,
            "vacuum_deficit": ground.vacuum_deficit,
            "per_site_occupancy": ground.per_site,
        }

    records: List[Dict[str, Any]] = []
    if plan.eigen_resolved:
        for diag in state_diagnostics(spectrum, basis, plan.edge_sites):
            record = dict(coordinates)
            record["n"] = diag.state_index
            record["eigenvalue"] = diag.eigenvalue / spec.omega0
            if Output.PARTICIPATION_RATIO in plan.outputs:
                record["participation_ratio"] = diag.participation_ratio
            if Output.EDGE_WEIGHTS in plan.outputs:
                record["edge_weight"] = diag.edge_weight
                record["anti_edge_weight"] = diag.anti_edge_weight
            if Output.SECTORS in plan.outputs:
                record["dominant_sector"] = diag.dominant_sector
                record["sector_fraction"] = diag.sector_fraction
            record.update(occupancy)
            records.append(record)
    elif occupancy:
        records.append({**coordinates, **occupancy})

    point_map = fidelity_map(spectrum, basis) if Output.FIDELITY_MAP in plan.outputs else None
    return records, point_map


def canonical_sort(records: Sequence[Dict[str, Any]], columns: Sequence[str]) -> List[Dict[str, Any]]:
    """Sort records by their column values (used to compare runs that may differ in order)."""
    return sorted(records, key=lambda r: tuple(r.get(c) for c in columns))
