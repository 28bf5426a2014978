"""Standalone SVG figures: spectra versus a swept parameter, fidelity heatmaps, time series, bands."""

import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import singledispatch
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..core.bandtheory import Bands, bowtie_boundaries  # noqa: E402
from ..core.dynamics import MeanCorrelations, TimeUnit  # noqa: E402
from ..core.errors import UnplottableError  # noqa: E402
from ..core.observables import FidelityMap  # noqa: E402
from ..core.sweep import SweepResult  # noqa: E402

logger = logging.getLogger(__name__)

AXIS_LABELS = {
    "epsilon": r"$\epsilon$",
    "jbar": r"$\bar{J}/\omega_0$",
    "n_sites": r"$N$",
    "rwa": "RWA",
}


@dataclass(frozen=True)
class PlotStyle:
    energy_cut: Optional[float] = 2.0
    energy_floor: Optional[float] = None
    cmap: str = "jet_r"
    width: float = 6.0
    height: float = 4.5
    show_bowtie: bool = False
    title: Optional[str] = None


def emit_svg(result, path: Path, style: Optional[PlotStyle] = None) -> Path:
    """Render a result to a standalone SVG file.

    Raises:
        UnplottableError: If the result type has no plot representation
        OSError: With the offending path in the message
    """
    style = style or PlotStyle()
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "usctopo", "svg.fonttype": "none"}):
        fig = _render(result, style)
        if style.title:
            fig.suptitle(style.title)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
        except OSError as e:
            logger.error(f"Could not write SVG to {path}: {e}")
            raise OSError(f"{path}: {e}") from e
        finally:
            plt.close(fig)
    logger.info(f"Wrote figure {path}")
    return path


@singledispatch
def _render(result, style: PlotStyle):
    raise UnplottableError(f"no plot available for {type(result).__name__}")


@_render.register
def _(result: SweepResult, style: PlotStyle):
    if "eigenvalue" in result.columns:
        return _render_spectrum_lines(result, style)
    if "mean_excitations" in result.columns:
        return _render_occupancy(result, style)
    raise UnplottableError("sweep result carries neither eigenvalues nor occupancy")


def _render_spectrum_lines(result: SweepResult, style: PlotStyle):
    axis = _swept_axis(result)
    fig, ax = plt.subplots(figsize=(style.width, style.height))

    keep = [r for r in result.records if _within(r["eigenvalue"], style)]
    if "participation_ratio" in result.columns and keep:
        x = np.array([r[axis] for r in keep], dtype=float)
        y = np.array([r["eigenvalue"] for r in keep])
        pr = np.array([r["participation_ratio"] for r in keep])
        points = ax.scatter(x, y, c=pr, s=3, cmap=style.cmap, linewidths=0)
        fig.colorbar(points, ax=ax, label="PR(n)")
    else:
        outer = [a for a in result.metadata.get("plan", {}).get("axes", {}) if a != axis]
        curves = defaultdict(list)
        for r in keep:
            curves[tuple(r[a] for a in outer) + (r["n"],)].append((r[axis], r["eigenvalue"]))
        for key in sorted(curves):
            xs, ys = zip(*curves[key])
            ax.plot(xs, ys, lw=1)

    if style.show_bowtie and axis == "epsilon" and result.records:
        jbar = result.records[0]["jbar"]
        eps = np.linspace(-1.0, 1.0, 201)
        edges = np.array([bowtie_boundaries(e, jbar, 1.0) for e in eps])
        for column in edges.T:
            ax.plot(eps, column, color="grey", ls="--", lw=0.8)

    ax.set_xlabel(AXIS_LABELS.get(axis, axis))
    ax.set_ylabel(r"$\omega/\omega_0$")
    return fig


def _render_occupancy(result: SweepResult, style: PlotStyle):
    axis = _swept_axis(result)
    fig, ax = plt.subplots(figsize=(style.width, style.height))
    other = "jbar" if axis == "epsilon" else "epsilon"
    curves = defaultdict(list)
    for r in result.records:
        curves[r[other]].append((r[axis], r["per_site_occupancy"]))
    for width, key in enumerate(sorted(curves), start=1):
        xs, ys = zip(*curves[key])
        ax.plot(xs, ys, lw=max(0.5, 4.0 / width), label=f"{AXIS_LABELS.get(other, other)} = {key:g}")
    ax.set_xlabel(AXIS_LABELS.get(axis, axis))
    ax.set_ylabel(r"$\langle \hat{N} \rangle / N$")
    ax.legend(fontsize="small")
    return fig


@_render.register
def _(result: FidelityMap, style: PlotStyle):
    n_rows, n_cols = result.cells.shape
    fig, ax = plt.subplots(figsize=(max(style.width, 0.35 * n_cols), max(style.height, 0.3 * n_rows)))
    image = ax.imshow(result.cells, cmap="Greens", vmin=0.0, vmax=1.0, aspect="auto", interpolation="nearest")
    ax.set_yticks(range(n_rows))
    ax.set_yticklabels(result.row_labels, fontsize="x-small")
    ax.set_xticks(range(n_cols))
    ax.set_xticklabels([str(c) for c in result.cols], fontsize="x-small")
    ax.set_xlabel(r"eigenstate $n$")
    ax.set_ylabel("bare state")
    fig.colorbar(image, ax=ax, label=r"$|\langle i|\psi_n\rangle|^2$")
    return fig


@_render.register
def _(result: MeanCorrelations, style: PlotStyle):
    fig, ax = plt.subplots(figsize=(style.width, style.height))
    ax.plot(result.times, result.site1, color="tab:orange", label="site 1")
    ax.plot(result.times, result.site2, color="tab:green", label="site 2")
    ax.set_xlabel("$Jt$" if result.unit is TimeUnit.INVERSE_COUPLING else r"$\omega_0 t$")
    ax.set_ylabel(r"$\langle\sigma_n^\dagger\rangle\langle\sigma_n\rangle$")
    ax.set_ylim(0.0, 1.05)
    ax.legend(fontsize="small")
    return fig


@_render.register
def _(result: Bands, style: PlotStyle):
    fig, ax = plt.subplots(figsize=(style.width, style.height))
    ax.plot(result.momenta, result.lower, color="tab:red")
    ax.plot(result.momenta, result.upper, color="tab:red")
    ax.set_xlabel("$qd$")
    ax.set_ylabel(r"$\omega/\omega_0$")
    return fig


def _swept_axis(result: SweepResult) -> str:
    axes = result.metadata.get("plan", {}).get("axes", {})
    if not axes:
        return "epsilon"
    names = list(axes)
    # the inner swept axis is plotted along x; a single-valued axis only labels the curves
    swept = [a for a in names if a in ("epsilon", "jbar") and len(axes[a]) > 1]
    if swept:
        return swept[-1]
    return names[-1] if names[-1] in ("epsilon", "jbar") else names[0]


def _within(value: float, style: PlotStyle) -> bool:
    if style.energy_cut is not None and value > style.energy_cut:
        return False
    if style.energy_floor is not None and value < style.energy_floor:
        return False
    return True
