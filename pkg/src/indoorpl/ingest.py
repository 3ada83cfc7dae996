"""Drive-test measurement ingest: CSV parsing and per-location cleansing.

CSV schema (UTF-8, comma separated, '.' decimal, exact header):

    timestamp,channel,tx_x,tx_y,tx_floor,rx_x,rx_y,rx_floor,rssi_dbm,tag

Lines starting with ``#`` are comments; blank lines are skipped. ``tag`` is
free text and keeps any embedded commas (it is the last column).

Cleansing converts each RSSI to path loss through the set's link budget,
groups records by (distance bin, obstruction summary, floor delta) and emits
min/mean/max path loss per group.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import IO, Iterable

from .errors import EmptyInput, ParseError
from .geometry import (
    FloorPlan,
    ObstructionSummary,
    Point3,
    count_obstructions,
    distance,
    floor_delta,
)
from .models import CHANNEL_FREQ_MHZ, LinkBudget, rssi_to_path_loss

CSV_FIELDS = (
    "timestamp",
    "channel",
    "tx_x",
    "tx_y",
    "tx_floor",
    "rx_x",
    "rx_y",
    "rx_floor",
    "rssi_dbm",
    "tag",
)
CSV_HEADER = ",".join(CSV_FIELDS)

RSSI_MIN_DBM = -120.0
RSSI_MAX_DBM = 0.0


@dataclass(frozen=True)
class Measurement:
    """One drive-test sample."""

    timestamp: float
    channel: int
    tx: Point3
    rx: Point3
    rssi_dbm: float
    tag: str = ""


@dataclass(frozen=True)
class MeasurementSet:
    """A cleansed, immutable collection sharing one link budget."""

    records: tuple[Measurement, ...]
    budget: LinkBudget
    plan_ref: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))


@dataclass(frozen=True)
class AggregatedPoint:
    """Per-location path loss statistics after cleansing."""

    distance_m: float
    obstructions: ObstructionSummary
    floor_delta: int
    pl_min_db: float
    pl_mean_db: float
    pl_max_db: float
    sample_count: int

    def __post_init__(self) -> None:
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if not (self.pl_min_db <= self.pl_mean_db <= self.pl_max_db):
            raise ValueError("need pl_min <= pl_mean <= pl_max")


def _parse_float(raw: str, line_no: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ParseError(line_no, column, f"not a number: {raw!r}") from None
    if not math.isfinite(value):
        raise ParseError(line_no, column, f"not finite: {raw!r}")
    return value


def _parse_int(raw: str, line_no: int, column: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ParseError(line_no, column, f"not an integer: {raw!r}") from None


def parse_measurements(source: IO[str] | str, budget: LinkBudget) -> MeasurementSet:
    """Parse the measurement CSV into a MeasurementSet, preserving row order.

    Raises ParseError naming the offending line and column, or EmptyInput if
    no data rows are present.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    records: list[Measurement] = []
    saw_header = False
    for line_no, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        if not saw_header:
            if text != CSV_HEADER:
                raise ParseError(
                    line_no, None, f"expected header {CSV_HEADER!r}, got {text!r}"
                )
            saw_header = True
            continue
        parts = text.split(",", len(CSV_FIELDS) - 1)
        if len(parts) != len(CSV_FIELDS):
            raise ParseError(
                line_no,
                None,
                f"expected {len(CSV_FIELDS)} columns, got {len(parts)}",
            )
        timestamp = _parse_float(parts[0], line_no, "timestamp")
        channel = _parse_int(parts[1], line_no, "channel")
        if channel not in CHANNEL_FREQ_MHZ:
            raise ParseError(line_no, "channel", f"channel {channel} not in 1..14")
        tx = Point3(
            _parse_float(parts[2], line_no, "tx_x"),
            _parse_float(parts[3], line_no, "tx_y"),
            _parse_int(parts[4], line_no, "tx_floor"),
        )
        rx = Point3(
            _parse_float(parts[5], line_no, "rx_x"),
            _parse_float(parts[6], line_no, "rx_y"),
            _parse_int(parts[7], line_no, "rx_floor"),
        )
        rssi = _parse_float(parts[8], line_no, "rssi_dbm")
        if not RSSI_MIN_DBM <= rssi <= RSSI_MAX_DBM:
            raise ParseError(
                line_no,
                "rssi_dbm",
                f"{rssi} dBm outside trusted range "
                f"[{RSSI_MIN_DBM}, {RSSI_MAX_DBM}]",
            )
        records.append(
            Measurement(
                timestamp=timestamp,
                channel=channel,
                tx=tx,
                rx=rx,
                rssi_dbm=rssi,
                tag=parts[9],
            )
        )
    if not records:
        raise EmptyInput("no measurement rows found")
    return MeasurementSet(records=tuple(records), budget=budget)


def measurements_to_csv(mset: MeasurementSet) -> str:
    """Serialize a MeasurementSet back to the CSV schema (lossless floats)."""
    lines = [CSV_HEADER]
    for m in mset.records:
        lines.append(
            ",".join(
                (
                    repr(m.timestamp),
                    str(m.channel),
                    repr(m.tx.x),
                    repr(m.tx.y),
                    str(m.tx.floor),
                    repr(m.rx.x),
                    repr(m.rx.y),
                    str(m.rx.floor),
                    repr(m.rssi_dbm),
                    m.tag,
                )
            )
        )
    return "\n".join(lines) + "\n"


def aggregate(
    mset: MeasurementSet, plan: FloorPlan, bin_width_m: float = 0.5
) -> list[AggregatedPoint]:
    """Cleanse a measurement set into per-location aggregated points.

    Records are grouped by (distance bin, obstruction summary, floor delta);
    the group's distance is the mean of its members. Cross-floor records get
    an empty obstruction summary (vertical loss is a floor-attenuation
    matter, not a wall count).
    """
    if bin_width_m <= 0:
        raise ValueError("bin_width_m must be positive")
    groups: dict[tuple, list[tuple[float, float]]] = {}
    for m in mset.records:
        d = distance(m.tx, m.rx, plan)
        delta = floor_delta(m.tx, m.rx)
        if delta == 0:
            obs = count_obstructions(plan, m.tx, m.rx)
        else:
            obs = ObstructionSummary()
        pl = rssi_to_path_loss(m.rssi_dbm, mset.budget)
        key = (int(math.floor(d / bin_width_m)), obs, delta)
        groups.setdefault(key, []).append((d, pl))
    points = []
    for (_, obs, delta), members in groups.items():
        # Sort members so the mean is permutation-invariant bit-for-bit.
        members.sort()
        dists = [d for d, _ in members]
        pls = [pl for _, pl in members]
        points.append(
            AggregatedPoint(
                distance_m=sum(dists) / len(dists),
                obstructions=obs,
                floor_delta=delta,
                pl_min_db=min(pls),
                pl_mean_db=sum(pls) / len(pls),
                pl_max_db=max(pls),
                sample_count=len(members),
            )
        )
    points.sort(
        key=lambda p: (
            p.distance_m,
            p.floor_delta,
            tuple((m.name, c) for m, c in p.obstructions.items),
        )
    )
    return points
