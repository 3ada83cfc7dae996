"""Floor-plan geometry: walls, pillars, distances, and line-of-sight obstructions.

Coordinates are meters in a plan-local frame. Floors are integer indices
(0 = ground); vertical separation is ``floor_height`` meters per floor.
All scene objects are immutable, so a loaded plan is safe for unlimited
concurrent readers.

Tie-break for tangent geometry: a sight line that touches a wall endpoint
or overlaps a wall collinearly counts as one crossing (never undercounts
attenuation). Intersection predicates use a 1e-9 m tolerance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Iterable, Mapping

from .errors import DocumentFormatError, FloorMismatch

EPS_M = 1e-9
"""Tolerance for intersection predicates, meters of perpendicular distance."""

DEFAULT_FLOOR_HEIGHT_M = 3.0

DEFAULT_HALF_EXTENT_M = 12.0
"""Half-extent of the survey box used when a plan has no geometry (24 m
square, roughly a 600 m2 office footprint)."""

Vec2 = tuple[float, float]


@dataclass(frozen=True)
class Material:
    """Wall/obstacle material.

    Built-in materials (``WOOD``, ``CONCRETE``, ``GLASS``, ``PILLAR``) take
    their attenuation from the model parameter tables; custom materials carry
    their own ``loss_db``.
    """

    name: str
    loss_db: float | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("material name must be non-empty")
        if self.loss_db is not None and (
            not math.isfinite(self.loss_db) or self.loss_db <= 0
        ):
            raise ValueError(
                f"custom material {self.name!r} requires a finite loss_db > 0"
            )


WOOD = Material("wood")
CONCRETE = Material("concrete")
GLASS = Material("glass")
PILLAR = Material("pillar")

BUILTIN_MATERIALS: dict[str, Material] = {
    m.name: m for m in (WOOD, CONCRETE, GLASS, PILLAR)
}


def material_from_spec(spec: Any) -> Material:
    """Parse a plan-document material entry.

    Accepts a case-insensitive built-in name ("wood", "concrete", "glass",
    "pillar") or ``{"custom": {"name": ..., "loss_db": ...}}``.
    """
    if isinstance(spec, str):
        m = BUILTIN_MATERIALS.get(spec.strip().lower())
        if m is None:
            raise DocumentFormatError(
                f"unknown material {spec!r}; expected one of "
                f"{sorted(BUILTIN_MATERIALS)} or a custom spec"
            )
        return m
    if isinstance(spec, Mapping) and "custom" in spec:
        custom = spec["custom"]
        try:
            return Material(str(custom["name"]).lower(), float(custom["loss_db"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentFormatError(f"bad custom material spec: {exc}") from exc
    raise DocumentFormatError(f"bad material spec: {spec!r}")


@dataclass(frozen=True)
class Point3:
    """A position: planar coordinates in meters plus an integer floor index."""

    x: float
    y: float
    floor: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("coordinates must be finite")

    @property
    def xy(self) -> Vec2:
        return (self.x, self.y)


@dataclass(frozen=True)
class WallSegment:
    """A wall as a 2D segment on one floor."""

    a: Vec2
    b: Vec2
    floor: int = 0
    material: Material = CONCRETE

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", (float(self.a[0]), float(self.a[1])))
        object.__setattr__(self, "b", (float(self.b[0]), float(self.b[1])))
        if not all(math.isfinite(v) for v in (*self.a, *self.b)):
            raise ValueError("wall endpoints must be finite")
        if self.a == self.b:
            raise ValueError("wall endpoints must differ")


@dataclass(frozen=True)
class PillarRect:
    """An axis-aligned rectangular pillar, counted as one solid obstacle."""

    center: Vec2
    width: float = 0.6
    depth: float = 0.6
    floor: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "center", (float(self.center[0]), float(self.center[1]))
        )
        if self.width <= 0 or self.depth <= 0:
            raise ValueError("pillar width and depth must be positive")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of the rectangle."""
        cx, cy = self.center
        return (
            cx - self.width / 2,
            cy - self.depth / 2,
            cx + self.width / 2,
            cy + self.depth / 2,
        )


@dataclass(frozen=True)
class FloorPlan:
    """An immutable scene: walls, pillars, floor count and floor height."""

    walls: tuple[WallSegment, ...] = ()
    pillars: tuple[PillarRect, ...] = ()
    floor_count: int = 1
    floor_height: float = DEFAULT_FLOOR_HEIGHT_M
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "walls", tuple(self.walls))
        object.__setattr__(self, "pillars", tuple(self.pillars))
        if self.floor_count < 1:
            raise ValueError("floor_count must be >= 1")
        if not (math.isfinite(self.floor_height) and self.floor_height > 0):
            raise ValueError("floor_height must be positive")
        for obj in (*self.walls, *self.pillars):
            if not 0 <= obj.floor < self.floor_count:
                raise ValueError(
                    f"floor index {obj.floor} outside [0, {self.floor_count})"
                )


@dataclass(frozen=True)
class ObstructionSummary:
    """Per-material crossing counts along a sight line.

    Stored as a name-sorted tuple so summaries are hashable and canonical
    (usable as aggregation keys).
    """

    items: tuple[tuple[Material, int], ...] = ()

    @classmethod
    def from_counts(cls, counts: Mapping[Material, int]) -> "ObstructionSummary":
        for m, c in counts.items():
            if c < 0:
                raise ValueError(f"negative count for {m.name!r}")
        return cls(
            tuple(
                sorted(
                    ((m, int(c)) for m, c in counts.items() if c > 0),
                    key=lambda mc: mc[0].name,
                )
            )
        )

    @property
    def counts(self) -> dict[Material, int]:
        return dict(self.items)

    @property
    def total(self) -> int:
        return sum(c for _, c in self.items)

    def get(self, material: Material) -> int:
        return self.counts.get(material, 0)


# ---------------------------------------------------------------------------
# Distance / crossing predicates
# ---------------------------------------------------------------------------


def floor_delta(tx: Point3, rx: Point3) -> int:
    """Signed floor separation: positive when the receiver is above."""
    return rx.floor - tx.floor


def distance(p: Point3, q: Point3, plan: FloorPlan) -> float:
    """Euclidean 3D distance, vertical offset = floor_height * |floor delta|."""
    dz = plan.floor_height * (q.floor - p.floor)
    return math.sqrt((q.x - p.x) ** 2 + (q.y - p.y) ** 2 + dz * dz)


def _side(a: Vec2, b: Vec2, x: Vec2) -> float:
    """Signed perpendicular distance (meters) from x to the line through a, b."""
    ux, uy = b[0] - a[0], b[1] - a[1]
    length = math.hypot(ux, uy)
    return ((x[0] - a[0]) * uy - (x[1] - a[1]) * ux) / length


def _within_bbox(a: Vec2, b: Vec2, x: Vec2) -> bool:
    """x inside the closed bounding box of segment ab (eps-expanded)."""
    return (
        min(a[0], b[0]) - EPS_M <= x[0] <= max(a[0], b[0]) + EPS_M
        and min(a[1], b[1]) - EPS_M <= x[1] <= max(a[1], b[1]) + EPS_M
    )


def segment_crosses(wall: WallSegment, p: Vec2, q: Vec2) -> bool:
    """True iff sight line pq crosses wall ab.

    Proper crossings count; touching an endpoint or collinear overlap also
    counts (conservative tie-break); collinear-but-disjoint does not.
    """
    if p == q:
        raise ValueError("sight line endpoints must differ")
    a, b = wall.a, wall.b
    d1 = _side(a, b, p)
    d2 = _side(a, b, q)
    d3 = _side(p, q, a)
    d4 = _side(p, q, b)
    if ((d1 > EPS_M and d2 < -EPS_M) or (d1 < -EPS_M and d2 > EPS_M)) and (
        (d3 > EPS_M and d4 < -EPS_M) or (d3 < -EPS_M and d4 > EPS_M)
    ):
        return True
    # Degenerate contact: some endpoint lies (within eps) on the other segment.
    if abs(d1) <= EPS_M and _within_bbox(a, b, p):
        return True
    if abs(d2) <= EPS_M and _within_bbox(a, b, q):
        return True
    if abs(d3) <= EPS_M and _within_bbox(p, q, a):
        return True
    if abs(d4) <= EPS_M and _within_bbox(p, q, b):
        return True
    return False


def _segment_hits_rect(p: Vec2, q: Vec2, pillar: PillarRect) -> bool:
    """True iff segment pq intersects the closed pillar rectangle."""
    xmin, ymin, xmax, ymax = pillar.bounds

    def inside(v: Vec2) -> bool:
        return (
            xmin - EPS_M <= v[0] <= xmax + EPS_M
            and ymin - EPS_M <= v[1] <= ymax + EPS_M
        )

    if inside(p) or inside(q):
        return True
    corners = ((xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax))
    edges = (
        (corners[0], corners[1]),
        (corners[1], corners[2]),
        (corners[2], corners[3]),
        (corners[3], corners[0]),
    )
    for a, b in edges:
        edge = WallSegment(a, b, floor=pillar.floor, material=PILLAR)
        if segment_crosses(edge, p, q):
            return True
    return False


def count_obstructions(plan: FloorPlan, tx: Point3, rx: Point3) -> ObstructionSummary:
    """Count walls and pillars crossing the tx-rx sight line, per material.

    Both endpoints must be on the same floor; vertical attenuation is
    modeled separately (floor attenuation factor), never by wall counting.
    """
    if tx.floor != rx.floor:
        raise FloorMismatch(
            f"obstruction counting needs a same-floor pair, got floors "
            f"{tx.floor} and {rx.floor}"
        )
    counts: dict[Material, int] = {}
    for wall in plan.walls:
        if wall.floor != tx.floor:
            continue
        if segment_crosses(wall, tx.xy, rx.xy):
            counts[wall.material] = counts.get(wall.material, 0) + 1
    for pillar in plan.pillars:
        if pillar.floor != tx.floor:
            continue
        if _segment_hits_rect(tx.xy, rx.xy, pillar):
            counts[PILLAR] = counts.get(PILLAR, 0) + 1
    return ObstructionSummary.from_counts(counts)


def bounding_box(
    plan: FloorPlan,
    extra_points: Iterable[Vec2] = (),
    fallback_half_extent: float = DEFAULT_HALF_EXTENT_M,
) -> tuple[float, float, float, float]:
    """(xmin, ymin, xmax, ymax) over plan geometry plus extra anchor points.

    A plan with no geometry yields a ``fallback_half_extent`` box around the
    anchors (coverage maps and synthetic surveys stay well-posed on empty
    plans).
    """
    xs: list[float] = []
    ys: list[float] = []
    for wall in plan.walls:
        xs += [wall.a[0], wall.b[0]]
        ys += [wall.a[1], wall.b[1]]
    for pillar in plan.pillars:
        xmin, ymin, xmax, ymax = pillar.bounds
        xs += [xmin, xmax]
        ys += [ymin, ymax]
    had_geometry = bool(xs)
    anchors = list(extra_points)
    for px, py in anchors:
        xs.append(px)
        ys.append(py)
    if not xs:
        raise ValueError("empty plan and no anchor points")
    box = (min(xs), min(ys), max(xs), max(ys))
    if not had_geometry:
        h = fallback_half_extent
        box = (box[0] - h, box[1] - h, box[2] + h, box[3] + h)
    return box


# ---------------------------------------------------------------------------
# Plan document I/O
# ---------------------------------------------------------------------------


def plan_from_dict(doc: Mapping[str, Any]) -> FloorPlan:
    """Build a FloorPlan from the JSON plan document schema.

    Fields: ``name``, ``floor_count``, ``floor_height_m``,
    ``walls: [{ax, ay, bx, by, floor, material}]``,
    ``pillars: [{cx, cy, w, d, floor}]``.
    """
    if not isinstance(doc, Mapping):
        raise DocumentFormatError("plan document must be a JSON object")
    try:
        walls = tuple(
            WallSegment(
                a=(float(w["ax"]), float(w["ay"])),
                b=(float(w["bx"]), float(w["by"])),
                floor=int(w.get("floor", 0)),
                material=material_from_spec(w.get("material", "concrete")),
            )
            for w in doc.get("walls", ())
        )
        pillars = tuple(
            PillarRect(
                center=(float(p["cx"]), float(p["cy"])),
                width=float(p["w"]),
                depth=float(p["d"]),
                floor=int(p.get("floor", 0)),
            )
            for p in doc.get("pillars", ())
        )
        return FloorPlan(
            walls=walls,
            pillars=pillars,
            floor_count=int(doc.get("floor_count", 1)),
            floor_height=float(doc.get("floor_height_m", DEFAULT_FLOOR_HEIGHT_M)),
            name=str(doc.get("name", "")),
        )
    except DocumentFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentFormatError(f"bad plan document: {exc}") from exc


def plan_to_dict(plan: FloorPlan) -> dict[str, Any]:
    """Inverse of plan_from_dict."""

    def material_spec(m: Material) -> Any:
        if m.loss_db is None:
            return m.name
        return {"custom": {"name": m.name, "loss_db": m.loss_db}}

    return {
        "name": plan.name,
        "floor_count": plan.floor_count,
        "floor_height_m": plan.floor_height,
        "walls": [
            {
                "ax": w.a[0],
                "ay": w.a[1],
                "bx": w.b[0],
                "by": w.b[1],
                "floor": w.floor,
                "material": material_spec(w.material),
            }
            for w in plan.walls
        ],
        "pillars": [
            {
                "cx": p.center[0],
                "cy": p.center[1],
                "w": p.width,
                "d": p.depth,
                "floor": p.floor,
            }
            for p in plan.pillars
        ],
    }


def load_plan(source: str | Path | IO[str]) -> FloorPlan:
    """Load a plan document from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_plan(fh)
    try:
        doc = json.load(source)
    except json.JSONDecodeError as exc:
        raise DocumentFormatError(f"plan is not valid JSON: {exc}") from exc
    return plan_from_dict(doc)
