"""Command-line entry point: settings, logging, dispatch and exit codes."""

import os

# Dense eigensolves are run one per worker thread; keep BLAS single-threaded unless asked.
if not os.getenv("USCTOPO_PARALLEL_EIGENSOLVER"):
    for _name in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_name, "1")

import json  # noqa: E402
import logging  # noqa: E402
import sys  # noqa: E402
from typing import List, Optional, Sequence  # noqa: E402

from ..config.settings import ConfigurationError, Settings  # noqa: E402
from ..core.errors import UsageError, UsctopoError, ValidationError  # noqa: E402
from ..core.spectra import oracle_self_test  # noqa: E402
from ..core.sweep import SweepResult  # noqa: E402
from ..output.serializers import emit_csv, emit_json, write_csv  # noqa: E402
from ..output.svg import PlotStyle, emit_svg  # noqa: E402
from .commands import COMMANDS, RunConfig, parse_cli  # noqa: E402

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

ENV_HELP = """\
# Worker threads for sweeps (default: logical CPU count)
# USCTOPO_THREADS=4

# Largest chain accepted by the command line (1..14, default 12)
# USCTOPO_MAX_SITES=12

# Directory relative --out paths are written to (default: current directory)
# USCTOPO_OUTPUT_DIR=/path/to/figures

# Plot energy cut in units of omega0 (default 2.0)
# USCTOPO_ENERGY_CUT=2.0

# Logging level (default INFO)
# USCTOPO_LOG_LEVEL=INFO

# Colormap for participation-ratio plots (default jet_r)
# USCTOPO_PLOT_CMAP=jet_r
"""


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one usctopo command; returns the process exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)

    try:
        settings = Settings()
    except ConfigurationError as e:
        _report("configuration", [str(e)])
        sys.stderr.write("\nSupported environment variables (.env is read too):\n" + ENV_HELP)
        return EXIT_USAGE

    logging.basicConfig(
        level=settings.log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        config = parse_cli(argv, settings)
    except UsageError as e:
        _report("usage", e.messages)
        return EXIT_USAGE
    except ValidationError as e:
        _report("validation", e.messages)
        return EXIT_USAGE

    if config.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if config.seed_check:
        return _seed_check(settings)

    logger.info(f"Running {config.subcommand} (N={config.n_sites}, rwa={config.rwa}, boundary={config.boundary.value})")
    try:
        result = COMMANDS[config.subcommand](config, settings)
        _emit(result, config, settings)
    except ValidationError as e:
        _report("validation", e.messages)
        return EXIT_USAGE
    except (UsctopoError, OSError, ValueError) as e:
        logger.error(f"{config.subcommand} failed: {e}")
        _report("runtime", [f"{type(e).__name__}: {e}"])
        return EXIT_RUNTIME

    if isinstance(result, SweepResult) and not result.ok:
        _report("runtime", [f"{len(result.failures)} sweep point(s) failed; see the metadata for details"])
        return EXIT_RUNTIME
    return EXIT_OK


def _emit(result, config: RunConfig, settings: Settings) -> None:
    out = settings.resolve_output(config.out)
    if config.format == "svg":
        emit_svg(result, out, _plot_style(config, settings))
    elif config.format == "json":
        emit_json(result, out, config)
    elif out is None:
        write_csv(result, sys.stdout)
    else:
        emit_csv(result, out, config)


def _plot_style(config: RunConfig, settings: Settings) -> PlotStyle:
    cut = config.cut
    if cut is None and config.subcommand != "dimer-spectrum":
        cut = settings.energy_cut
    show_bowtie = config.rwa and config.subcommand in ("chain-spectrum", "pr-map") and len(config.jbar) == 1
    return PlotStyle(energy_cut=cut, cmap=settings.plot_cmap, show_bowtie=show_bowtie)


def _seed_check(settings: Settings) -> int:
    deviations = oracle_self_test()
    passed = (
        deviations["eigenvalue_error"] <= settings.oracle_tol
        and deviations["eigenvector_error"] <= settings.orthonormality_tol
    )
    print(json.dumps({"seed_check": "passed" if passed else "failed", **deviations}))
    if not passed:
        logger.error(f"Dimer oracle disagrees with the eigensolver: {deviations}")
    return EXIT_OK if passed else EXIT_RUNTIME


def _report(kind: str, messages: List[str]) -> None:
    sys.stderr.write(json.dumps({"error": kind, "messages": messages}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
