"""Grid container validation and node-wise projection."""

import numpy as np
import pytest

from startorus import FourierField, GriddedFourierField, SpacetimeGrid
from startorus.grids import torus_nodes


def test_torus_nodes_cover_the_period():
    P, Q = torus_nodes(8)
    assert P.shape == (8, 8)
    assert P[0, 0] == 0.0
    assert abs(P[-1, 0] - 2 * np.pi * 7 / 8) < 1e-15
    assert np.all(P[:, 0] == Q[0, :])


def test_grid_axes_and_lookups():
    grid = SpacetimeGrid({"w": [0.0, 0.5, 1.0], "z": [0.0, 0.25, 0.5, 0.75]})
    assert grid.names == ("w", "z")
    assert grid.ndim == 2
    assert grid.shape == (3, 4)
    assert grid.steps == {"w": 0.5, "z": 0.25}
    assert np.array_equal(grid.axis("z"), [0.0, 0.25, 0.5, 0.75])
    assert grid.point((1, 2)) == (0.5, 0.5)
    with pytest.raises(KeyError):
        grid.axis("missing")


def test_grid_rejects_bad_axes():
    with pytest.raises(ValueError):
        SpacetimeGrid({"w": [0.0]})
    with pytest.raises(ValueError):
        SpacetimeGrid({"w": [0.0, 0.1, 0.5]})  # non-uniform


def test_regular_construction():
    grid = SpacetimeGrid.regular({"w": (-1.0, 1.0), "z": (0.0, 0.5)}, 0.25)
    assert grid.shape == (9, 3)
    assert grid.axis("w")[0] == -1.0 and grid.axis("w")[-1] == 1.0
    with pytest.raises(ValueError):
        SpacetimeGrid.regular({"w": (0.0, 1.0)}, 0.3)


def test_refined_halves_the_step():
    grid = SpacetimeGrid.regular({"w": (0.0, 1.0)}, 0.5)
    fine = grid.refined()
    assert fine.shape == (5,)
    assert fine.steps["w"] == 0.25
    assert fine.axis("w")[0] == 0.0 and fine.axis("w")[-1] == 1.0
    assert grid.refined(4).shape == (9,)


def test_gridded_field_shape_and_band_checks():
    grid = SpacetimeGrid({"w": [0.0, 1.0]})
    fields = np.array([FourierField.basis(1, 0), FourierField.basis(0, 2)], dtype=object)
    gf = GriddedFourierField(grid, fields, hbar=0.5)
    assert gf.band_limit == 2
    with pytest.raises(ValueError):
        GriddedFourierField(grid, fields, hbar=0.5, band_limit=1)
    with pytest.raises(ValueError):
        GriddedFourierField(grid, fields[:1], hbar=0.5)
    with pytest.raises(ValueError):
        GriddedFourierField(grid, fields, hbar=-0.1)


def test_sample_projects_each_node():
    grid = SpacetimeGrid({"w": [0.0, 1.0, 2.0]})

    def evaluator(point, P, Q):
        (w,) = point
        return w * np.exp(1j * P) + np.exp(-2j * Q)

    gf = GriddedFourierField.sample(grid, evaluator, band_limit=3, hbar=0.3, torus_n=16)
    assert gf.grid.shape == (3,)
    for i, w in enumerate([0.0, 1.0, 2.0]):
        node = gf.values[i]
        assert abs(node.coeff(1, 0) - w) < 1e-13
        assert abs(node.coeff(0, -2) - 1.0) < 1e-13
        assert node.size <= 2


def test_map_values_recomputes_band():
    grid = SpacetimeGrid({"w": [0.0, 1.0]})
    fields = np.array([FourierField.basis(3, 0), FourierField.basis(1, 1)], dtype=object)
    gf = GriddedFourierField(grid, fields, hbar=0.1)
    cut = gf.map_values(lambda f: f.restrict(1))
    assert cut.band_limit == 1
    assert cut.values[0].size == 0
    assert cut.values[1].coeff(1, 1) == 1.0
