"""Subcommands of the usctopo command line: flag parsing, validation and the figure runners."""

import argparse
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import Settings
from ..core.bandtheory import Bands, DispersionSpec, dispersion
from ..core.basis import build_basis
from ..core.dynamics import MeanCorrelations, TimeGrid, TimeUnit, dimer_mean_correlations
from ..core.errors import UsageError, ValidationError
from ..core.hamiltonian import Boundary, ChainSpec, build_chain
from ..core.observables import FidelityMap, fidelity_map
from ..core.spectra import diagonalize
from ..core.sweep import Output, SweepPlan, SweepResult, default_epsilon_grid, run_sweep

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "svg")
DEFAULT_EPS_GRID = 201
DIMER_J_VALUES = tuple(float(j) for j in np.linspace(0.0, 5.0, 101))
OCCUPANCY_JBAR_VALUES = (0.1, 0.3, 0.5, 0.7, 0.9)

SUBCOMMANDS: Dict[str, Tuple[str, Dict[str, object]]] = {
    "dimer-spectrum": (
        "Figure: dimer energy ladder versus J in [0, 5 omega0], the outer levels bending away from 0 and 2 omega0.",
        {"n_sites": 2, "jbar": DIMER_J_VALUES},
    ),
    "dimer-dynamics": (
        "Figure: dimer mean correlations of both sites after exciting site 1 versus Jt, "
        "with the wave-packet envelope.",
        {"n_sites": 2, "jbar": (0.1,)},
    ),
    "chain-spectrum": (
        "Figure: chain spectrum versus epsilon coloured by excitation sector, "
        "with participation ratio and edge weights.",
        {"n_sites": 4, "jbar": (0.5,)},
    ),
    "eigenstate-map": (
        "Figure: heatmap of every bare-state probability in every eigenstate (16x16 for N=4), "
        "showing edge and anti-edge states.",
        {"n_sites": 4, "jbar": (0.5,), "epsilon": (-0.8,)},
    ),
    "pr-map": (
        "Figure: participation-ratio coloured spectra versus epsilon with in-gap edge states, "
        "data above the cut removed.",
        {"n_sites": 8, "jbar": (0.1,)},
    ),
    "dispersion": (
        "Figure: infinite-chain one-excitation bands omega0 +- sqrt(J1^2 + J2^2 + 2 J1 J2 cos qd) "
        "in units of omega0.",
        {"n_sites": 2, "jbar": (0.5,), "epsilon": (0.0,)},
    ),
    "occupancy": (
        "Figure: ground-state occupancy versus epsilon, or versus jbar when a single --eps is given, "
        "one curve per value of the other parameter.",
        {"n_sites": 8, "jbar": OCCUPANCY_JBAR_VALUES},
    ),
    "sweep": (
        "Run an arbitrary sweep described by a JSON plan file (--plan).",
        {"n_sites": 4, "jbar": (0.5,)},
    ),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything one command-line invocation asks for."""

    subcommand: str
    n_sites: int
    jbar: Tuple[float, ...]
    omega0: float = 1.0
    epsilon: Optional[Tuple[float, ...]] = None
    eps_grid: Optional[int] = None
    j1: Optional[float] = None
    j2: Optional[float] = None
    rwa: bool = False
    boundary: Boundary = Boundary.OPEN
    out: Optional[Path] = None
    format: str = "csv"
    cut: Optional[float] = None
    seed_check: bool = False
    plan: Optional[Path] = None
    t_end: float = 7.0
    n_points: int = 1000
    momentum_points: int = 201
    edge_sites: int = 1
    verbose: bool = False

    def epsilon_values(self) -> Tuple[float, ...]:
        if self.epsilon is not None:
            return self.epsilon
        return default_epsilon_grid(self.eps_grid or DEFAULT_EPS_GRID)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError([message])


def _float_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_shared_arguments(parser: argparse.ArgumentParser) -> None:
    model = parser.add_argument_group("model")
    model.add_argument("--n", dest="n_sites", type=int, help="Number of sites N")
    model.add_argument("--omega0", type=float, default=1.0, help="Bare frequency (energy unit)")
    model.add_argument("--jbar", type=_float_list, help="Comma-separated chain couplings J1 + J2")
    model.add_argument("--eps", dest="epsilon", type=_float_list, help="Comma-separated dimerization values in [-1, 1]")
    model.add_argument("--eps-grid", type=int, help=f"Uniform epsilon grid size over [-1, 1] (default {DEFAULT_EPS_GRID})")
    model.add_argument("--j1", type=float, help="Intra-cell coupling (use with --j2 instead of --eps/--jbar)")
    model.add_argument("--j2", type=float, help="Inter-cell coupling")
    model.add_argument("--rwa", action=argparse.BooleanOptionalAction, default=False, help="Drop counter-rotating terms")
    model.add_argument("--boundary", choices=[b.value for b in Boundary], default=Boundary.OPEN.value)
    model.add_argument("--edge-sites", type=int, default=1, help="Width of the end region for edge weights")

    run = parser.add_argument_group("run")
    run.add_argument("--t-end", type=float, default=7.0, help="Final time in units of 1/J (dimer-dynamics)")
    run.add_argument("--n-points", type=int, default=1000, help="Number of time points (dimer-dynamics)")
    run.add_argument("--momentum-points", type=int, default=201, help="Momentum grid size (dispersion)")
    run.add_argument("--plan", type=Path, help="JSON sweep plan (sweep)")

    output = parser.add_argument_group("output")
    output.add_argument("--out", type=Path, help="Output file (CSV goes to stdout when omitted)")
    output.add_argument("--format", choices=FORMATS, default="csv")
    output.add_argument("--cut", type=float, help="Plot energy cut in units of omega0 (default USCTOPO_ENERGY_CUT)")
    output.add_argument("--seed-check", action="store_true", help="Run the analytic dimer self-test and exit")
    output.add_argument("--verbose", action="store_true", help="Debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="usctopo", description="Ultrastrong-coupling dimerized chain laboratory.")
    subparsers = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)
    for name, (summary, defaults) in SUBCOMMANDS.items():
        sub = subparsers.add_parser(name, help=summary, description=summary)
        _add_shared_arguments(sub)
        sub.set_defaults(**defaults)
    return parser


def parse_cli(argv: Sequence[str], settings: Optional[Settings] = None) -> RunConfig:
    """Parse and validate a command line.

    Raises:
        UsageError: Unknown flag, missing subcommand or malformed literal
        ValidationError: Every invalid parameter, collected in one error
    """
    args = build_parser().parse_args(list(argv))
    config = RunConfig(
        subcommand=args.subcommand,
        n_sites=args.n_sites,
        jbar=tuple(args.jbar),
        omega0=args.omega0,
        epsilon=None if args.epsilon is None else tuple(args.epsilon),
        eps_grid=args.eps_grid,
        j1=args.j1,
        j2=args.j2,
        rwa=args.rwa,
        boundary=Boundary(args.boundary),
        out=args.out,
        format=args.format,
        cut=args.cut,
        seed_check=args.seed_check,
        plan=args.plan,
        t_end=args.t_end,
        n_points=args.n_points,
        momentum_points=args.momentum_points,
        edge_sites=args.edge_sites,
        verbose=args.verbose,
    )
    errors = validate(config, settings)
    if errors:
        raise ValidationError(errors)
    return config


def validate(config: RunConfig, settings: Optional[Settings] = None) -> List[str]:
    """All problems with a config, one message each; empty when the config is usable.

    With ``settings`` the size cap is ``USCTOPO_MAX_SITES`` and ``--out`` is checked
    where it will actually be written, under ``USCTOPO_OUTPUT_DIR``.
    """
    max_sites = settings.max_sites if settings else None
    errors: List[str] = []
    if config.seed_check:
        return errors

    if config.n_sites < 1 or (max_sites is not None and config.n_sites > max_sites):
        errors.append(f"--n must lie in 1..{max_sites or 'max'}, got {config.n_sites}")
    if not (math.isfinite(config.omega0) and config.omega0 > 0):
        errors.append(f"--omega0 must be positive, got {config.omega0}")
    if not config.jbar:
        errors.append("--jbar needs at least one value")
    for value in config.jbar:
        if not (math.isfinite(value) and value >= 0):
            errors.append(f"--jbar values must be finite and non-negative, got {value}")
    if config.epsilon is not None and not config.epsilon:
        errors.append("--eps needs at least one value")
    for value in config.epsilon or ():
        if not (math.isfinite(value) and -1.0 <= value <= 1.0):
            errors.append(f"--eps values must lie in [-1, 1], got {value}")
    if config.eps_grid is not None:
        if config.eps_grid < 2:
            errors.append(f"--eps-grid must be at least 2, got {config.eps_grid}")
        if config.epsilon is not None and config.subcommand not in ("eigenstate-map", "dispersion"):
            errors.append("--eps and --eps-grid are mutually exclusive")

    if (config.j1 is None) != (config.j2 is None):
        errors.append("--j1 and --j2 must be given together")
    elif config.j1 is not None:
        if config.j1 < 0 or config.j2 < 0:
            errors.append(f"--j1/--j2 must be non-negative, got {config.j1}, {config.j2}")
        if config.subcommand not in ("chain-spectrum", "eigenstate-map", "dispersion"):
            errors.append(f"--j1/--j2 are not accepted by {config.subcommand}")

    if config.boundary is Boundary.PERIODIC and config.n_sites % 2:
        errors.append(f"--boundary periodic needs an even --n, got {config.n_sites}")
    if config.subcommand != "dispersion" and not 1 <= config.edge_sites <= max(1, config.n_sites // 2):
        errors.append(f"--edge-sites must lie in 1..N/2, got {config.edge_sites}")
    if config.cut is not None and not config.cut > 0:
        errors.append(f"--cut must be positive, got {config.cut}")

    if config.subcommand == "dimer-dynamics":
        if len(config.jbar) != 1 or config.jbar[0] <= 0:
            errors.append("dimer-dynamics needs exactly one positive --jbar (the dimer coupling J)")
        if not config.t_end > 0:
            errors.append(f"--t-end must be positive, got {config.t_end}")
        if config.n_points < 2:
            errors.append(f"--n-points must be at least 2, got {config.n_points}")
    if config.subcommand == "eigenstate-map":
        if config.j1 is None and (len(config.jbar) != 1 or len(config.epsilon or ()) != 1):
            errors.append("eigenstate-map needs exactly one --eps and one --jbar value")
        if config.format == "svg" and config.n_sites > 6:
            errors.append("eigenstate-map heatmaps are limited to N <= 6")
    if config.subcommand == "dispersion":
        if config.j1 is None and (len(config.jbar) != 1 or len(config.epsilon or ()) != 1):
            errors.append("dispersion needs exactly one --eps and one --jbar value, or --j1/--j2")
        if config.momentum_points < 2:
            errors.append(f"--momentum-points must be at least 2, got {config.momentum_points}")
    if config.subcommand in ("dimer-spectrum", "dimer-dynamics") and config.n_sites != 2:
        errors.append(f"{config.subcommand} is defined for --n 2 only")
    if config.subcommand == "sweep":
        if config.plan is None:
            errors.append("sweep needs --plan")
        elif not config.plan.is_file():
            errors.append(f"--plan {config.plan} does not exist")

    if config.format != "csv" and config.out is None:
        errors.append(f"--format {config.format} needs --out")
    if config.out is not None:
        target = settings.resolve_output(config.out) if settings else config.out
        parent = _existing_parent(target)
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            errors.append(f"--out {target} is not writable")
    return errors


def render_flags(config: RunConfig) -> List[str]:
    """The argv that parses back to ``config``."""
    # "=" keeps negative lists such as -0.8,0.2 from reading as flags
    argv = [config.subcommand, "--n", str(config.n_sites), f"--omega0={config.omega0!r}"]
    argv.append("--jbar=" + ",".join(repr(v) for v in config.jbar))
    if config.epsilon is not None:
        argv.append("--eps=" + ",".join(repr(v) for v in config.epsilon))
    if config.eps_grid is not None:
        argv += ["--eps-grid", str(config.eps_grid)]
    if config.j1 is not None:
        argv.append(f"--j1={config.j1!r}")
    if config.j2 is not None:
        argv.append(f"--j2={config.j2!r}")
    argv.append("--rwa" if config.rwa else "--no-rwa")
    argv += ["--boundary", config.boundary.value, "--edge-sites", str(config.edge_sites)]
    argv += [f"--t-end={config.t_end!r}", "--n-points", str(config.n_points)]
    argv += ["--momentum-points", str(config.momentum_points)]
    if config.plan is not None:
        argv += ["--plan", str(config.plan)]
    if config.out is not None:
        argv += ["--out", str(config.out)]
    argv += ["--format", config.format]
    if config.cut is not None:
        argv.append(f"--cut={config.cut!r}")
    if config.seed_check:
        argv.append("--seed-check")
    if config.verbose:
        argv.append("--verbose")
    return argv


def run_dimer_spectrum(config: RunConfig, settings: Settings) -> SweepResult:
    plan = SweepPlan(
        n_sites=2,
        omega0=config.omega0,
        epsilon=1.0,
        rwa=config.rwa,
        axes={"jbar": config.jbar},
        outputs=(Output.EIGENVALUES,),
    )
    return run_sweep(plan, settings.threads, settings.tolerances, settings.max_sites)


def run_dimer_dynamics(config: RunConfig, settings: Settings) -> MeanCorrelations:
    grid = TimeGrid(0.0, config.t_end, config.n_points, TimeUnit.INVERSE_COUPLING)
    return dimer_mean_correlations(config.omega0, config.jbar[0], grid)


def run_chain_spectrum(config: RunConfig, settings: Settings) -> SweepResult:
    outputs = (Output.EIGENVALUES, Output.PARTICIPATION_RATIO, Output.EDGE_WEIGHTS, Output.SECTORS)
    return run_sweep(_chain_plan(config, outputs), settings.threads, settings.tolerances, settings.max_sites)


def run_pr_map(config: RunConfig, settings: Settings) -> SweepResult:
    outputs = (Output.EIGENVALUES, Output.PARTICIPATION_RATIO)
    return run_sweep(_chain_plan(config, outputs), settings.threads, settings.tolerances, settings.max_sites)


def run_occupancy(config: RunConfig, settings: Settings) -> SweepResult:
    return run_sweep(_chain_plan(config, (Output.OCCUPANCY,)), settings.threads, settings.tolerances, settings.max_sites)


def run_eigenstate_map(config: RunConfig, settings: Settings) -> FidelityMap:
    spec = _single_spec(config)
    basis = build_basis(spec.n_sites, settings.max_sites)
    return fidelity_map(diagonalize(build_chain(spec, basis)), basis)


def run_dispersion(config: RunConfig, settings: Settings) -> Bands:
    spec = _single_spec(config)
    return dispersion(DispersionSpec.from_chain(spec, config.momentum_points).in_units_of_omega0())


def run_plan(config: RunConfig, settings: Settings) -> SweepResult:
    try:
        plan = SweepPlan.from_file(config.plan)
    except (TypeError, ValueError) as e:
        raise ValidationError([f"--plan {config.plan}: {e}"])
    logger.info(f"Loaded plan {config.plan}: {len(plan.grid())} grid points")
    if plan.largest_n() > settings.max_sites:
        raise ValidationError([f"plan asks for N={plan.largest_n()}, above USCTOPO_MAX_SITES={settings.max_sites}"])
    return run_sweep(plan, settings.threads, settings.tolerances, settings.max_sites)


COMMANDS: Dict[str, Callable[[RunConfig, Settings], object]] = {
    "dimer-spectrum": run_dimer_spectrum,
    "dimer-dynamics": run_dimer_dynamics,
    "chain-spectrum": run_chain_spectrum,
    "eigenstate-map": run_eigenstate_map,
    "pr-map": run_pr_map,
    "dispersion": run_dispersion,
    "occupancy": run_occupancy,
    "sweep": run_plan,
}


def _chain_plan(config: RunConfig, outputs: Tuple[Output, ...]) -> SweepPlan:
    if config.j1 is not None:
        spec = _single_spec(config)
        axes = {"jbar": (spec.jbar,), "epsilon": (spec.epsilon,)}
    else:
        axes = {"jbar": config.jbar, "epsilon": config.epsilon_values()}
    return SweepPlan(
        n_sites=config.n_sites,
        omega0=config.omega0,
        rwa=config.rwa,
        boundary=config.boundary,
        axes=axes,
        outputs=outputs,
        edge_sites=config.edge_sites,
    )


def _single_spec(config: RunConfig) -> ChainSpec:
    if config.j1 is not None:
        return ChainSpec.from_couplings(config.n_sites, config.omega0, config.j1, config.j2, config.rwa, config.boundary)
    return ChainSpec.from_dimerization(
        config.n_sites, config.omega0, config.epsilon[0], config.jbar[0], config.rwa, config.boundary
    )


def _existing_parent(path: Path) -> Path:
    parent = path.expanduser().absolute().parent
    while not parent.exists() and parent != parent.parent:
        parent = parent.parent
    return parent
