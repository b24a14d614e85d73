import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinflow.errors import GridFormatError
from spinflow.grid import (
    Branch,
    Bus,
    BusKind,
    build_admittance,
    fourbus,
    load_grid,
    make_grid,
    serialize_grid,
)

TWO_BUS_TEXT = json.dumps({
    "base_mva": 100.0,
    "slack_voltage": {"mu": 1.0, "omega": 0.0},
    "buses": [
        {"index": 0, "kind": "slack"},
        {"index": 1, "kind": "load", "p_dem": 0.5, "q_dem": 0.2},
    ],
    "branches": [
        {"from": 0, "to": 1, "series_g": 1.0, "series_b": -5.0},
    ],
})


def test_single_branch_admittance():
    g, b = build_admittance([Branch(0, 1, 1.0, -5.0)], 2)
    assert np.array_equal(g, [[1.0, -1.0], [-1.0, 1.0]])
    assert np.array_equal(b, [[-5.0, 5.0], [5.0, -5.0]])


def test_empty_branch_list_gives_zero_matrices():
    g, b = build_admittance([], 2)
    assert np.array_equal(g, np.zeros((2, 2)))
    assert np.array_equal(b, np.zeros((2, 2)))


def test_parallel_branches_sum():
    # Hand oracle: two parallel branches each y = 1 - j2 add up entrywise,
    # so Y_01 = -(1 - j2) - (1 - j2) = -2 + j4.
    g, b = build_admittance([Branch(0, 1, 1.0, -2.0), Branch(0, 1, 1.0, -2.0)], 2)
    assert g[0, 1] == -2.0
    assert b[0, 1] == 4.0
    assert g[0, 0] == 2.0
    assert b[0, 0] == -4.0


def test_shunt_contributes_to_diagonal_only():
    g, b = build_admittance([Branch(0, 1, 1.0, -5.0, shunt_b_half=0.1)], 2)
    assert b[0, 0] == -5.0 + 0.1
    assert b[1, 1] == -5.0 + 0.1
    assert b[0, 1] == 5.0


def test_branch_index_out_of_range():
    with pytest.raises(GridFormatError, match="out of range"):
        build_admittance([Branch(0, 2, 1.0, -5.0)], 2)


def test_branch_self_loop_rejected():
    with pytest.raises(GridFormatError, match="endpoints must differ"):
        Branch(1, 1, 1.0, -5.0)


def test_bus_requires_finite_injections():
    with pytest.raises(GridFormatError, match="p_dem"):
        Bus(0, BusKind.LOAD, p_dem=float("nan"))


def test_load_minimal_two_bus_file():
    grid = load_grid(TWO_BUS_TEXT)
    assert grid.n == 2
    assert grid.buses[0].kind is BusKind.SLACK
    assert grid.buses[1].p_dem == 0.5
    assert grid.g[0, 1] == -1.0
    assert grid.slack_voltage == (1.0, 0.0)


def test_two_slack_buses_rejected():
    doc = json.loads(TWO_BUS_TEXT)
    doc["buses"][1]["kind"] = "slack"
    with pytest.raises(GridFormatError, match="multiple slack buses"):
        load_grid(json.dumps(doc))


def test_no_slack_bus_rejected():
    doc = json.loads(TWO_BUS_TEXT)
    doc["buses"][0]["kind"] = "load"
    with pytest.raises(GridFormatError, match="no slack bus"):
        load_grid(json.dumps(doc))


def test_duplicate_bus_indices_rejected():
    doc = json.loads(TWO_BUS_TEXT)
    doc["buses"][1]["index"] = 0
    with pytest.raises(GridFormatError, match="duplicate bus index"):
        load_grid(json.dumps(doc))


def test_unknown_kind_names_field():
    doc = json.loads(TWO_BUS_TEXT)
    doc["buses"][1]["kind"] = "generator"
    with pytest.raises(GridFormatError, match=r"buses\[1\].kind"):
        load_grid(json.dumps(doc))


def test_invalid_json_reported():
    with pytest.raises(GridFormatError, match="invalid JSON"):
        load_grid("{not json")


def test_slack_reordered_to_front():
    text = json.dumps({
        "buses": [
            {"index": 0, "kind": "load", "p_dem": 0.1},
            {"index": 1, "kind": "load", "p_dem": 0.2},
            {"index": 2, "kind": "slack"},
        ],
        "branches": [
            {"from": 2, "to": 0, "series_g": 1.0, "series_b": -4.0},
            {"from": 0, "to": 1, "series_g": 2.0, "series_b": -8.0},
        ],
    })
    grid = load_grid(text)
    assert grid.buses[0].kind is BusKind.SLACK
    # old bus 0 (p_dem 0.1) lands at position 1, old bus 1 at position 2
    assert grid.buses[1].p_dem == 0.1
    assert grid.buses[2].p_dem == 0.2
    assert grid.branches[0].from_bus == 0 and grid.branches[0].to_bus == 1
    assert grid.g[0, 1] == -1.0
    assert grid.g[1, 2] == -2.0


def test_bundled_fourbus_fixture():
    grid = fourbus()
    assert grid.n == 4
    assert grid.buses[0].kind is BusKind.SLACK
    assert sum(bus.kind is BusKind.LOAD for bus in grid.buses) == 3
    assert len(grid.branches) == 4


def test_serialize_round_trip_on_fourbus():
    grid = fourbus()
    again = load_grid(serialize_grid(grid))
    assert again.buses == grid.buses
    assert again.branches == grid.branches
    assert np.array_equal(again.g, grid.g)
    assert np.array_equal(again.b, grid.b)
    assert again.slack_voltage == grid.slack_voltage
    assert again.base_mva == grid.base_mva


branch_values = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)


@st.composite
def random_branch_sets(draw):
    n = draw(st.integers(2, 6))
    count = draw(st.integers(0, 8))
    branches = []
    for _ in range(count):
        i = draw(st.integers(0, n - 1))
        k = draw(st.integers(0, n - 1))
        if i == k:
            k = (k + 1) % n
        branches.append(Branch(i, k, draw(branch_values), draw(branch_values)))
    return n, branches


@given(random_branch_sets())
@settings(max_examples=80)
def test_admittance_symmetric_and_rows_sum_to_zero(data):
    n, branches = data
    g, b = build_admittance(branches, n)
    assert np.array_equal(g, g.T)
    assert np.array_equal(b, b.T)
    # no shunts anywhere, so every row of g and b sums to zero
    assert np.allclose(g.sum(axis=1), 0.0, atol=1e-12)
    assert np.allclose(b.sum(axis=1), 0.0, atol=1e-12)


def test_make_grid_admittance_symmetry_with_shunts():
    grid = fourbus()
    assert np.array_equal(grid.g, grid.g.T)
    assert np.array_equal(grid.b, grid.b.T)


def test_grid_matrices_read_only():
    grid = fourbus()
    with pytest.raises(ValueError):
        grid.g[0, 0] = 99.0
