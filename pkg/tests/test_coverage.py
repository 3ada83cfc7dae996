"""Tests for coverage grid evaluation and map exports."""

import math

import numpy as np
import pytest

from indoorpl.coverage import CoverageGrid, coverage_grid, grid_to_csv, grid_to_pgm
from indoorpl.geometry import (
    CONCRETE,
    FloorPlan,
    ObstructionSummary,
    Point3,
    WallSegment,
    count_obstructions,
)
from indoorpl.models import (
    LinkBudget,
    Scenario,
    TIplmModel,
    TIplmParams,
    predicted_rssi,
)

F1 = 2412.0
BUDGET = LinkBudget()


def open_space_model():
    return TIplmModel(TIplmParams(scenario=Scenario.OPEN_SPACE))


def corridor_model():
    return TIplmModel(TIplmParams(scenario=Scenario.CORRIDOR))


def room_plan(half=10.0, extra_walls=(), floors=1):
    walls = (
        WallSegment((-half, -half), (half, -half)),
        WallSegment((half, -half), (half, half)),
        WallSegment((half, half), (-half, half)),
        WallSegment((-half, half), (-half, -half)),
    ) + tuple(extra_walls)
    return FloorPlan(walls=walls, floor_count=floors)


class TestGridGeometry:
    def test_bounds_pad_plan_extents_by_one_cell(self):
        grid = coverage_grid(
            room_plan(5.0), Point3(0, 0), open_space_model(), BUDGET,
            floor=0, resolution_m=1.0, f_mhz=F1,
        )
        assert grid.origin == (-6.0, -6.0)
        assert grid.width == 12
        assert grid.height == 12

    def test_empty_plan_uses_fallback_extent(self):
        grid = coverage_grid(
            FloorPlan(), Point3(0, 0), open_space_model(), BUDGET,
            floor=0, resolution_m=2.0, f_mhz=F1,
        )
        assert grid.origin == (-14.0, -14.0)
        assert grid.width == 14
        assert grid.height == 14

    def test_values_cover_every_cell(self):
        grid = coverage_grid(
            room_plan(4.0), Point3(0, 0), open_space_model(), BUDGET,
            floor=0, resolution_m=0.5, f_mhz=F1,
        )
        assert len(grid.values) == grid.width * grid.height
        assert all(math.isfinite(v) for v in grid.values)

    def test_bad_resolution_rejected(self):
        with pytest.raises(ValueError):
            coverage_grid(
                room_plan(), Point3(0, 0), open_space_model(), BUDGET,
                floor=0, resolution_m=0.0, f_mhz=F1,
            )

    def test_bad_floor_rejected(self):
        with pytest.raises(ValueError):
            coverage_grid(
                room_plan(), Point3(0, 0), open_space_model(), BUDGET,
                floor=1, resolution_m=1.0, f_mhz=F1,
            )


class TestValues:
    def test_radially_non_increasing_without_walls(self):
        ap = Point3(0.25, 0.25)
        grid = coverage_grid(
            FloorPlan(), ap, open_space_model(), BUDGET,
            floor=0, resolution_m=1.0, f_mhz=F1,
        )
        cells = []
        for row in range(grid.height):
            for col in range(grid.width):
                cx, cy = grid.cell_center(col, row)
                cells.append(
                    (math.hypot(cx - ap.x, cy - ap.y), grid.value_at(col, row))
                )
        cells.sort()
        for (d1, v1), (d2, v2) in zip(cells, cells[1:]):
            if d2 > d1:
                assert v2 <= v1 + 1e-12

    def test_cell_at_ap_clamps_to_1m(self):
        ap = Point3(0.0, 0.0)
        model = open_space_model()
        grid = coverage_grid(
            FloorPlan(), ap, model, BUDGET, floor=0, resolution_m=1.0, f_mhz=F1,
        )
        col = int((ap.x - grid.origin[0]) / grid.resolution_m)
        row = int((ap.y - grid.origin[1]) / grid.resolution_m)
        expected = predicted_rssi(
            model.path_loss(F1, 1.0, ObstructionSummary(), 0), BUDGET
        )
        assert grid.value_at(col, row) == expected

    def test_wall_shadow_is_exactly_one_wall_loss(self):
        # Horizontal blocker above the AP; mirror cells below are clear.
        # Corridor scenario keeps N_T independent of the obstacle count.
        blocker = WallSegment((-10, 1), (10, 1), material=CONCRETE)
        plan = room_plan(10.0, extra_walls=(blocker,))
        ap = Point3(0.0, 0.0)
        grid = coverage_grid(
            plan, ap, corridor_model(), BUDGET,
            floor=0, resolution_m=1.0, f_mhz=F1,
        )
        checked = 0
        for row in range(grid.height):
            for col in range(grid.width):
                cx, cy = grid.cell_center(col, row)
                if cy < 1.5:
                    continue
                mirror_row = None
                for r2 in range(grid.height):
                    if grid.cell_center(col, r2)[1] == -cy:
                        mirror_row = r2
                        break
                if mirror_row is None:
                    continue
                shadowed = grid.value_at(col, row)
                clear = grid.value_at(col, mirror_row)
                assert clear - shadowed == pytest.approx(2.73, abs=1e-9)
                checked += 1
        assert checked > 50

    def test_cross_floor_map_includes_floor_attenuation(self):
        plan = room_plan(5.0, floors=3)
        ap = Point3(0, 0, 0)
        same = coverage_grid(
            plan, ap, corridor_model(), BUDGET, floor=0, resolution_m=1.0, f_mhz=F1,
        )
        above = coverage_grid(
            plan, ap, corridor_model(), BUDGET, floor=2, resolution_m=1.0, f_mhz=F1,
        )
        # Every upstairs cell is worse than the same-floor cell by at least
        # the FAF minus the distance-term change.
        assert max(above.values) < max(same.values)

    def test_failed_cells_get_sentinel_and_warning(self):
        plan = FloorPlan(floor_count=6)
        ap = Point3(0, 0, 0)
        grid = coverage_grid(
            plan, ap, corridor_model(), BUDGET, floor=5, resolution_m=4.0, f_mhz=F1,
        )
        # Floor delta +5 has no attenuation entry: every cell fails.
        assert grid.warning_count == grid.width * grid.height
        assert all(math.isnan(v) for v in grid.values)

    def test_deterministic_and_matches_pointwise_evaluation(self):
        plan = room_plan(6.0, extra_walls=(
            WallSegment((2, -6), (2, 6), material=CONCRETE),
        ))
        ap = Point3(-3.0, 0.0)
        model = TIplmModel(TIplmParams())
        a = coverage_grid(plan, ap, model, BUDGET, floor=0, resolution_m=1.5, f_mhz=F1)
        b = coverage_grid(plan, ap, model, BUDGET, floor=0, resolution_m=1.5, f_mhz=F1)
        assert a == b
        rng = np.random.default_rng(61)
        for _ in range(20):
            col = int(rng.integers(0, a.width))
            row = int(rng.integers(0, a.height))
            cx, cy = a.cell_center(col, row)
            cell = Point3(cx, cy, 0)
            obs = count_obstructions(plan, ap, cell)
            d = max(math.hypot(cx - ap.x, cy - ap.y), 1.0)
            expected = predicted_rssi(model.path_loss(F1, d, obs, 0), BUDGET)
            assert a.value_at(col, row) == expected


class TestExports:
    def _small_grid(self):
        return coverage_grid(
            room_plan(2.0), Point3(0, 0), open_space_model(), BUDGET,
            floor=0, resolution_m=1.0, f_mhz=F1,
        )

    def test_csv_shape(self):
        grid = self._small_grid()
        lines = grid_to_csv(grid).strip().splitlines()
        assert len(lines) == grid.height
        assert all(len(line.split(",")) == grid.width for line in lines)
        assert float(lines[0].split(",")[0]) == pytest.approx(
            grid.value_at(0, 0), abs=1e-6
        )

    def test_pgm_header_and_range(self):
        grid = self._small_grid()
        lines = grid_to_pgm(grid).strip().splitlines()
        assert lines[0] == "P2"
        assert lines[1] == f"{grid.width} {grid.height}"
        assert lines[2] == "255"
        levels = [int(v) for line in lines[3:] for v in line.split()]
        assert len(levels) == grid.width * grid.height
        assert all(0 <= v <= 255 for v in levels)

    def test_pgm_linear_mapping(self):
        grid = CoverageGrid(
            origin=(0.0, 0.0), resolution_m=1.0, width=3, height=1, floor=0,
            values=(-100.0, -60.0, -20.0),
        )
        lines = grid_to_pgm(grid).strip().splitlines()
        assert lines[3] == "0 128 255"

    def test_pgm_clamps_and_blanks_nan(self):
        grid = CoverageGrid(
            origin=(0.0, 0.0), resolution_m=1.0, width=4, height=1, floor=0,
            values=(-150.0, -10.0, float("nan"), -100.0),
            warning_count=1,
        )
        lines = grid_to_pgm(grid).strip().splitlines()
        assert lines[3] == "0 255 0 0"

    def test_csv_nan_sentinel(self):
        grid = CoverageGrid(
            origin=(0.0, 0.0), resolution_m=1.0, width=2, height=1, floor=0,
            values=(float("nan"), -50.0),
            warning_count=1,
        )
        assert grid_to_csv(grid) == "nan,-50.000000\n"
