"""Predicted-RSSI coverage maps over a floor plan grid.

Cell values are dBm from a configured model and link budget. Cells closer
than 1 m to the access point evaluate at the clamped 1 m distance, so the
map has no holes; cells whose evaluation fails (e.g. a missing table entry)
get a NaN sentinel and bump the grid's warning count. Evaluation order never
affects values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import PathLossError
from .geometry import (
    FloorPlan,
    ObstructionSummary,
    Point3,
    Vec2,
    bounding_box,
    count_obstructions,
)
from .models import LinkBudget, PathLossModel, predicted_rssi

SENTINEL = float("nan")

PGM_FLOOR_DBM = -100.0
PGM_CEIL_DBM = -20.0


@dataclass(frozen=True)
class CoverageGrid:
    """Row-major grid of predicted RSSI (dBm); row 0 starts at the origin."""

    origin: Vec2
    resolution_m: float
    width: int
    height: int
    floor: int
    values: tuple[float, ...]
    warning_count: int = 0

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        if len(self.values) != self.width * self.height:
            raise ValueError("values length must be width*height")

    def value_at(self, col: int, row: int) -> float:
        return self.values[row * self.width + col]

    def cell_center(self, col: int, row: int) -> Vec2:
        return (
            self.origin[0] + (col + 0.5) * self.resolution_m,
            self.origin[1] + (row + 0.5) * self.resolution_m,
        )


def coverage_grid(
    plan: FloorPlan,
    ap: Point3,
    model: PathLossModel,
    budget: LinkBudget,
    floor: int,
    resolution_m: float,
    f_mhz: float,
) -> CoverageGrid:
    """Evaluate a model over cell centers covering the plan extents.

    Bounds are the plan extents (plus the AP position) padded by one cell.
    Obstructions are counted per cell on the AP's floor; cross-floor cells
    carry only the floor delta.
    """
    if resolution_m <= 0:
        raise ValueError("resolution_m must be positive")
    if not 0 <= floor < plan.floor_count:
        raise ValueError(f"floor {floor} outside [0, {plan.floor_count})")
    xmin, ymin, xmax, ymax = bounding_box(plan, extra_points=(ap.xy,))
    origin = (xmin - resolution_m, ymin - resolution_m)
    width = max(1, math.ceil((xmax + resolution_m - origin[0]) / resolution_m - 1e-9))
    height = max(1, math.ceil((ymax + resolution_m - origin[1]) / resolution_m - 1e-9))
    delta = floor - ap.floor
    values: list[float] = []
    warnings = 0
    for row in range(height):
        cy = origin[1] + (row + 0.5) * resolution_m
        for col in range(width):
            cx = origin[0] + (col + 0.5) * resolution_m
            cell = Point3(cx, cy, floor)
            if delta == 0 and (cx, cy) != ap.xy:
                obs = count_obstructions(plan, ap, cell)
            else:
                obs = ObstructionSummary()
            dz = plan.floor_height * delta
            d = math.sqrt((cx - ap.x) ** 2 + (cy - ap.y) ** 2 + dz * dz)
            try:
                pl = model.path_loss(f_mhz, max(d, 1.0), obs, delta)
                values.append(predicted_rssi(pl, budget))
            except PathLossError:
                values.append(SENTINEL)
                warnings += 1
    return CoverageGrid(
        origin=origin,
        resolution_m=resolution_m,
        width=width,
        height=height,
        floor=floor,
        values=tuple(values),
        warning_count=warnings,
    )


def grid_to_csv(grid: CoverageGrid) -> str:
    """CSV matrix of dBm values, one line per grid row (row 0 first)."""
    lines = []
    for row in range(grid.height):
        start = row * grid.width
        lines.append(
            ",".join(
                "nan" if math.isnan(v) else f"{v:.6f}"
                for v in grid.values[start : start + grid.width]
            )
        )
    return "\n".join(lines) + "\n"


def grid_to_pgm(
    grid: CoverageGrid,
    floor_dbm: float = PGM_FLOOR_DBM,
    ceil_dbm: float = PGM_CEIL_DBM,
) -> str:
    """ASCII portable graymap (P2), [floor_dbm, ceil_dbm] mapped to [0, 255].

    Values are clamped; NaN cells render black. Rows are written north-up
    (highest y first).
    """
    if ceil_dbm <= floor_dbm:
        raise ValueError("ceil_dbm must exceed floor_dbm")
    span = ceil_dbm - floor_dbm
    lines = ["P2", f"{grid.width} {grid.height}", "255"]
    for row in range(grid.height - 1, -1, -1):
        start = row * grid.width
        levels = []
        for v in grid.values[start : start + grid.width]:
            if math.isnan(v):
                levels.append(0)
            else:
                level = round((v - floor_dbm) / span * 255)
                levels.append(min(255, max(0, level)))
        lines.append(" ".join(str(level) for level in levels))
    return "\n".join(lines) + "\n"
