"""Tests for sweep plans and the sweep runner."""

import json

import pytest

from usctopo.core.errors import DomainError
from usctopo.core.sweep import (
    Output,
    SweepPlan,
    canonical_sort,
    default_epsilon_grid,
    run_sweep,
)


def _chain_plan(**overrides):
    values = dict(
        n_sites=4,
        axes={"jbar": (0.5,), "epsilon": default_epsilon_grid(11)},
        outputs=(Output.EIGENVALUES, Output.PARTICIPATION_RATIO, Output.EDGE_WEIGHTS, Output.SECTORS),
    )
    values.update(overrides)
    return SweepPlan(**values)


def test_chain_spectrum_columns_and_rows():
    result = run_sweep(_chain_plan())
    assert result.columns == [
        "epsilon", "jbar", "n", "eigenvalue", "participation_ratio",
        "edge_weight", "anti_edge_weight", "dominant_sector", "sector_fraction",
    ]
    assert len(result.records) == 11 * 16
    assert result.ok


def test_full_epsilon_grid_row_count():
    result = run_sweep(_chain_plan(axes={"jbar": (0.5,), "epsilon": default_epsilon_grid()}, outputs=(Output.EIGENVALUES,)))
    assert len(result.records) == 201 * 16


def test_canonical_order():
    result = run_sweep(_chain_plan())
    keys = [(r["epsilon"], r["n"]) for r in result.records]
    assert keys == sorted(keys)


def test_parallel_matches_serial():
    plan = _chain_plan(axes={"jbar": (0.1, 0.5), "epsilon": default_epsilon_grid(9)})
    serial = run_sweep(plan, workers=1)
    parallel = run_sweep(plan, workers=4)
    assert canonical_sort(parallel.records, plan.columns()) == canonical_sort(serial.records, plan.columns())
    assert parallel.records == serial.records


def test_occupancy_one_record_per_point():
    plan = SweepPlan(n_sites=4, axes={"jbar": (0.1, 0.9), "epsilon": (-0.5, 0.5)}, outputs=(Output.OCCUPANCY,))
    result = run_sweep(plan)
    assert result.columns == ["epsilon", "jbar", "mean_excitations", "vacuum_deficit", "per_site_occupancy"]
    assert len(result.records) == 4
    for record in result.records:
        assert record["per_site_occupancy"] == pytest.approx(record["mean_excitations"] / 4)


def test_sweep_over_sites_and_rwa():
    plan = SweepPlan(n_sites=2, epsilon=-0.5, jbar=0.3, axes={"n_sites": (2, 4), "rwa": (False, True)})
    result = run_sweep(plan)
    assert result.columns == ["epsilon", "jbar", "n_sites", "rwa", "n", "eigenvalue"]
    assert len(result.records) == 2 * 4 + 2 * 16


def test_energies_in_units_of_omega0():
    plan = SweepPlan(n_sites=2, omega0=2.0, epsilon=1.0, axes={"jbar": (0.0,)})
    result = run_sweep(plan)
    assert [r["eigenvalue"] for r in result.records] == [0.0, 1.0, 1.0, 2.0]


def test_fidelity_maps_collected():
    plan = SweepPlan(n_sites=4, axes={"epsilon": (-0.8,)}, outputs=(Output.FIDELITY_MAP,))
    result = run_sweep(plan)
    assert len(result.fidelity_maps) == 1
    point, fmap = result.fidelity_maps[0]
    assert point == {"epsilon": -0.8}
    assert fmap.cells.shape == (16, 16)


def test_failed_points_do_not_stop_the_grid():
    plan = SweepPlan(n_sites=2, axes={"n_sites": (2, 3)}, boundary="periodic")
    result = run_sweep(plan)
    assert not result.ok
    assert len(result.failures) == 1
    assert result.failures[0].point == {"n_sites": 3}
    assert "DomainError" in result.failures[0].error
    assert len(result.records) == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(axes={"epsilon": (1.5,)}),
        dict(axes={"temperature": (1.0,)}),
        dict(axes={"epsilon": (0.0,), "jbar": (0.1,), "rwa": (True,)}),
        dict(outputs=()),
    ],
)
def test_invalid_plans(kwargs):
    with pytest.raises(DomainError):
        SweepPlan(n_sites=4, **kwargs)


def test_plan_from_file(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps({
        "n_sites": 4,
        "rwa": True,
        "axes": {"jbar": [0.1, 0.3], "epsilon": {"grid": 5}},
        "outputs": ["eigenvalues", "edge_weights"],
    }))
    plan = SweepPlan.from_file(path)
    assert plan.axes["epsilon"] == (-1.0, -0.5, 0.0, 0.5, 1.0)
    assert plan.outputs == (Output.EIGENVALUES, Output.EDGE_WEIGHTS)
    assert len(plan.grid()) == 10


def test_metadata_records_plan_and_tolerances():
    result = run_sweep(_chain_plan(), tolerances={"degeneracy": 1e-9})
    assert result.metadata["plan"]["n_sites"] == 4
    assert result.metadata["plan"]["axes"]["jbar"] == [0.5]
    assert result.metadata["tolerances"] == {"degeneracy": 1e-9}
