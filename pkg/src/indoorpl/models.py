"""Path loss models for the 2.4-2.5 GHz indoor band.

Three models over a common link context (frequency f in MHz, distance d in
meters, results in dB):

* ITU-R indoor:  PL = 20*log10(f) + N*log10(d) + P_f(n) - 28
* Log-distance:  PL = 20*log10(4*pi*d0/lambda) + 10*gamma*log10(d/d0)
* T-IPLM:        PL = 20*log10(f) + N_T*log10(d) + sum(L_w) + FAF - 20

The empirical tables (channel centers, wall attenuation, N_T per channel and
obstacle count, floor attenuation factors) are embedded as defaults and fully
overridable through parameter bundles. Distances below 1 m (or below d0) are
a domain error rather than an extrapolation.

All parameter bundles are immutable; every operation is a pure function.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Protocol

from .errors import DocumentFormatError, DomainError, MissingParameter
from .geometry import BUILTIN_MATERIALS, ObstructionSummary

SPEED_OF_LIGHT_M_S = 299_792_458.0

# IEEE 802.11b/g/n channel center frequencies, MHz.
CHANNEL_FREQ_MHZ: Mapping[int, float] = MappingProxyType(
    {
        1: 2412.0,
        2: 2417.0,
        3: 2422.0,
        4: 2427.0,
        5: 2432.0,
        6: 2437.0,
        7: 2442.0,
        8: 2447.0,
        9: 2452.0,
        10: 2457.0,
        11: 2462.0,
        12: 2467.0,
        13: 2472.0,
        14: 2484.0,
    }
)

# Per-obstacle attenuation, dB, by material name.
DEFAULT_WALL_LOSS_DB: Mapping[str, float] = MappingProxyType(
    {"wood": 2.67, "concrete": 2.73, "pillar": 6.0, "glass": 4.5}
)

# Busy-office N_T by channel and number of obstacles (1..5).
DEFAULT_NT_BUSY: Mapping[int, Mapping[int, float]] = MappingProxyType(
    {
        1: MappingProxyType({1: 31.1, 2: 30.1, 3: 31.8, 4: 31.2, 5: 31.3}),
        7: MappingProxyType({1: 32.9, 2: 28.5, 3: 26.7, 4: 29.1, 5: 27.4}),
        11: MappingProxyType({1: 29.3, 2: 28.4, 3: 27.0, 4: 28.0, 5: 28.4}),
    }
)

# Open-space N_T by channel.
DEFAULT_NT_OPEN: Mapping[int, float] = MappingProxyType(
    {1: 19.2, 7: 18.0, 11: 17.3}
)

# Corridor N_T (narrow corridors funnel multipath; applied to every channel).
DEFAULT_NT_CORRIDOR = 25.8

# Floor attenuation factor, dB, by signed floor delta (positive = receiver
# above the transmitter).
DEFAULT_FAF_DB: Mapping[int, float] = MappingProxyType(
    {0: 0.0, 1: 21.0, 2: 33.0, 3: 40.0, -1: 21.0, -2: 36.0}
)

# ITU-R distance power loss coefficients by environment.
ITU_R_N_OFFICE = 30.0
ITU_R_N_RESIDENTIAL = 28.0
ITU_R_N_COMMERCIAL = 22.0

_MAX_DEFAULT_FLOORS = 15


def default_floor_penetration() -> dict[int, float]:
    """Default ITU-R office floor penetration table P_f(n) = 15 + 4(n-1) dB.

    Not an empirically re-derived table for this band; override via a
    parameter document when site data exists.
    """
    table = {0: 0.0}
    for n in range(1, _MAX_DEFAULT_FLOORS + 1):
        table[n] = 15.0 + 4.0 * (n - 1)
    return table


class Scenario(str, Enum):
    """Propagation scenario selecting which N_T table applies."""

    BUSY_OFFICE = "busy"
    OPEN_SPACE = "open"
    CORRIDOR = "corridor"


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power and antenna gains for RSSI <-> path loss conversion."""

    tx_power_dbm: float = 15.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 0.0

    def __post_init__(self) -> None:
        for v in (self.tx_power_dbm, self.tx_gain_dbi, self.rx_gain_dbi):
            if not math.isfinite(v):
                raise ValueError("link budget values must be finite")

    @property
    def total_dbm(self) -> float:
        return self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi


@dataclass(frozen=True)
class ItuRParams:
    """ITU-R indoor model parameters: N and the floor penetration table."""

    n_coeff: float = ITU_R_N_OFFICE
    floor_penetration: Mapping[int, float] = field(
        default_factory=default_floor_penetration
    )

    def __post_init__(self) -> None:
        if self.n_coeff <= 0:
            raise ValueError("n_coeff must be positive")

    @classmethod
    def office(cls) -> "ItuRParams":
        return cls(n_coeff=ITU_R_N_OFFICE)

    @classmethod
    def residential(cls) -> "ItuRParams":
        return cls(n_coeff=ITU_R_N_RESIDENTIAL)

    @classmethod
    def commercial(cls) -> "ItuRParams":
        return cls(n_coeff=ITU_R_N_COMMERCIAL)


@dataclass(frozen=True)
class LogDistanceParams:
    """Log-distance model parameters: exponent gamma and reference distance."""

    gamma: float = 3.0
    d0_m: float = 1.0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.d0_m <= 0:
            raise ValueError("d0_m must be positive")


@dataclass(frozen=True)
class TIplmParams:
    """T-IPLM parameter bundle: N_T tables, wall losses, floor attenuation."""

    scenario: Scenario = Scenario.BUSY_OFFICE
    nt_table: Mapping[int, Mapping[int, float]] = field(
        default_factory=lambda: DEFAULT_NT_BUSY
    )
    nt_open: Mapping[int, float] = field(default_factory=lambda: DEFAULT_NT_OPEN)
    nt_corridor: float = DEFAULT_NT_CORRIDOR
    wall_loss_db: Mapping[str, float] = field(
        default_factory=lambda: DEFAULT_WALL_LOSS_DB
    )
    faf_db: Mapping[int, float] = field(default_factory=lambda: DEFAULT_FAF_DB)

    def __post_init__(self) -> None:
        if self.nt_corridor <= 0:
            raise ValueError("nt_corridor must be positive")
        for table in self.nt_table.values():
            for v in table.values():
                if v <= 0:
                    raise ValueError("N_T values must be positive")
        for v in self.nt_open.values():
            if v <= 0:
                raise ValueError("N_T values must be positive")
        for v in self.wall_loss_db.values():
            if v <= 0:
                raise ValueError("wall losses must be positive")
        if self.faf_db.get(0, 0.0) != 0.0:
            raise ValueError("FAF at zero floor delta must be 0")


@dataclass(frozen=True)
class LinkContext:
    """One evaluation point: frequency, distance, obstructions, floors."""

    frequency_mhz: float
    distance_m: float
    obstructions: ObstructionSummary = ObstructionSummary()
    floor_delta: int = 0
    scenario: Scenario = Scenario.BUSY_OFFICE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.frequency_mhz) and self.frequency_mhz > 0):
            raise ValueError("frequency_mhz must be positive")
        if not (math.isfinite(self.distance_m) and self.distance_m > 0):
            raise ValueError("distance_m must be positive")


# ---------------------------------------------------------------------------
# Channel table
# ---------------------------------------------------------------------------


def channel_to_frequency(channel: int) -> float:
    """Center frequency in MHz for a 2.4 GHz channel index (1..14)."""
    try:
        return CHANNEL_FREQ_MHZ[channel]
    except KeyError:
        raise DomainError(f"channel must be in 1..14, got {channel}") from None


def frequency_to_channel(f_mhz: float) -> int | None:
    """Channel index whose center is exactly f_mhz, or None."""
    for c, f in CHANNEL_FREQ_MHZ.items():
        if f == f_mhz:
            return c
    return None


# ---------------------------------------------------------------------------
# Model formulas
# ---------------------------------------------------------------------------


def itu_r_path_loss(
    f_mhz: float, d_m: float, params: ItuRParams, n_floors: int = 0
) -> float:
    """ITU-R indoor path loss, dB. Requires d >= 1 m."""
    if f_mhz <= 0:
        raise DomainError("frequency must be positive")
    if d_m < 1.0:
        raise DomainError(f"distance {d_m} m below the 1 m model domain")
    if n_floors < 0:
        raise DomainError("n_floors must be non-negative")
    if n_floors == 0:
        pf = 0.0
    else:
        try:
            pf = params.floor_penetration[n_floors]
        except KeyError:
            raise MissingParameter(
                f"no floor penetration entry for {n_floors} floors"
            ) from None
    return 20.0 * math.log10(f_mhz) + params.n_coeff * math.log10(d_m) + pf - 28.0


def log_distance_path_loss(
    f_mhz: float, d_m: float, params: LogDistanceParams
) -> float:
    """Log-distance path loss, dB: free-space reference at d0 plus slope."""
    if f_mhz <= 0:
        raise DomainError("frequency must be positive")
    if d_m < params.d0_m:
        raise DomainError(
            f"distance {d_m} m below reference distance {params.d0_m} m"
        )
    wavelength = SPEED_OF_LIGHT_M_S / (f_mhz * 1e6)
    reference = 20.0 * math.log10(4.0 * math.pi * params.d0_m / wavelength)
    return reference + 10.0 * params.gamma * math.log10(d_m / params.d0_m)


def lookup_nt(
    params: TIplmParams,
    channel: int | None,
    scenario: Scenario,
    obstacle_count: int = 0,
) -> float:
    """Distance power loss coefficient N_T for a scenario.

    Busy office indexes the per-channel table by obstacle count (clamped to
    the table's top row; zero obstacles fall back to the open-space value).
    Corridor is a channel-independent scalar.
    """
    if obstacle_count < 0:
        raise DomainError("obstacle_count must be non-negative")
    if scenario is Scenario.CORRIDOR:
        return params.nt_corridor
    if channel is None:
        raise MissingParameter(
            "N_T lookup needs a channel; frequency is not a channel center"
        )
    if scenario is Scenario.OPEN_SPACE or obstacle_count == 0:
        try:
            return params.nt_open[channel]
        except KeyError:
            raise MissingParameter(
                f"no open-space N_T for channel {channel}"
            ) from None
    table = params.nt_table.get(channel)
    if not table:
        raise MissingParameter(f"no busy-office N_T table for channel {channel}")
    if obstacle_count in table:
        return table[obstacle_count]
    top = max(table)
    if obstacle_count > top:
        return table[top]
    raise MissingParameter(
        f"no N_T for channel {channel} with {obstacle_count} obstacles"
    )


def lookup_faf(params: TIplmParams, floor_delta: int) -> float:
    """Floor attenuation factor, dB, for a signed floor delta. No extrapolation."""
    try:
        return params.faf_db[floor_delta]
    except KeyError:
        raise MissingParameter(
            f"no floor attenuation entry for delta {floor_delta:+d}"
        ) from None


def wall_loss_sum(params: TIplmParams, obstructions: ObstructionSummary) -> float:
    """Total wall loss sum(count * L_w), dB, over the obstruction summary."""
    total = 0.0
    for material, count in obstructions.items:
        loss = params.wall_loss_db.get(material.name)
        if loss is None:
            loss = material.loss_db
        if loss is None:
            raise MissingParameter(f"no wall loss for material {material.name!r}")
        total += count * loss
    return total


def tiplm_path_loss(ctx: LinkContext, params: TIplmParams) -> float:
    """T-IPLM path loss, dB, for a link context. Requires d >= 1 m.

    The N_T channel is resolved from the context frequency; non-center
    frequencies only evaluate in the corridor scenario (scalar N_T).
    """
    if ctx.distance_m < 1.0:
        raise DomainError(f"distance {ctx.distance_m} m below the 1 m model domain")
    nt = lookup_nt(
        params,
        frequency_to_channel(ctx.frequency_mhz),
        ctx.scenario,
        ctx.obstructions.total,
    )
    return (
        20.0 * math.log10(ctx.frequency_mhz)
        + nt * math.log10(ctx.distance_m)
        + wall_loss_sum(params, ctx.obstructions)
        + lookup_faf(params, ctx.floor_delta)
        - 20.0
    )


def predicted_rssi(path_loss_db: float, budget: LinkBudget) -> float:
    """RSSI in dBm seen by the receiver for a given path loss."""
    return budget.total_dbm - path_loss_db


def rssi_to_path_loss(rssi_dbm: float, budget: LinkBudget) -> float:
    """Path loss in dB implied by a measured RSSI. Inverse of predicted_rssi."""
    return budget.total_dbm - rssi_dbm


# ---------------------------------------------------------------------------
# Configured models (uniform evaluation protocol for comparison and coverage)
# ---------------------------------------------------------------------------


class PathLossModel(Protocol):
    """Anything that predicts path loss from (f, d, obstructions, floors)."""

    name: str

    def path_loss(
        self,
        f_mhz: float,
        d_m: float,
        obstructions: ObstructionSummary,
        floor_delta: int,
    ) -> float: ...


@dataclass(frozen=True)
class TIplmModel:
    params: TIplmParams = field(default_factory=TIplmParams)
    name: str = "T-IPLM"

    def path_loss(
        self,
        f_mhz: float,
        d_m: float,
        obstructions: ObstructionSummary,
        floor_delta: int,
    ) -> float:
        ctx = LinkContext(
            frequency_mhz=f_mhz,
            distance_m=d_m,
            obstructions=obstructions,
            floor_delta=floor_delta,
            scenario=self.params.scenario,
        )
        return tiplm_path_loss(ctx, self.params)


@dataclass(frozen=True)
class ItuRModel:
    params: ItuRParams = field(default_factory=ItuRParams)
    name: str = "ITU-R"

    def path_loss(
        self,
        f_mhz: float,
        d_m: float,
        obstructions: ObstructionSummary,
        floor_delta: int,
    ) -> float:
        return itu_r_path_loss(f_mhz, d_m, self.params, abs(floor_delta))


@dataclass(frozen=True)
class LogDistanceModel:
    params: LogDistanceParams = field(default_factory=LogDistanceParams)
    name: str = "Log-distance"

    def path_loss(
        self,
        f_mhz: float,
        d_m: float,
        obstructions: ObstructionSummary,
        floor_delta: int,
    ) -> float:
        return log_distance_path_loss(f_mhz, d_m, self.params)


MODEL_KEYS = ("tiplm", "itu_r", "log_distance")


# ---------------------------------------------------------------------------
# Parameter override documents
# ---------------------------------------------------------------------------


def _int_keyed(doc: Mapping[str, Any], what: str) -> dict[int, Any]:
    try:
        return {int(k): v for k, v in doc.items()}
    except (TypeError, ValueError) as exc:
        raise DocumentFormatError(f"{what}: keys must be integers: {exc}") from exc


def tiplm_params_from_dict(doc: Mapping[str, Any]) -> TIplmParams:
    """TIplmParams from a (possibly partial) override document."""
    base = TIplmParams()
    try:
        scenario = Scenario(doc.get("scenario", base.scenario.value))
        nt_table = {c: dict(t) for c, t in base.nt_table.items()}
        for c, t in _int_keyed(doc.get("nt_table", {}), "nt_table").items():
            nt_table[c] = {
                n: float(v) for n, v in _int_keyed(t, "nt_table row").items()
            }
        nt_open = dict(base.nt_open)
        nt_open.update(
            {
                c: float(v)
                for c, v in _int_keyed(doc.get("nt_open", {}), "nt_open").items()
            }
        )
        wall_loss = dict(base.wall_loss_db)
        wall_loss.update(
            {
                str(k).lower(): float(v)
                for k, v in doc.get("wall_loss", {}).items()
            }
        )
        faf = dict(base.faf_db)
        faf.update(
            {
                d: float(v)
                for d, v in _int_keyed(doc.get("faf_table", {}), "faf_table").items()
            }
        )
        return TIplmParams(
            scenario=scenario,
            nt_table=nt_table,
            nt_open=nt_open,
            nt_corridor=float(doc.get("nt_corridor", base.nt_corridor)),
            wall_loss_db=wall_loss,
            faf_db=faf,
        )
    except DocumentFormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise DocumentFormatError(f"bad tiplm parameter document: {exc}") from exc


def itu_r_params_from_dict(doc: Mapping[str, Any]) -> ItuRParams:
    """ItuRParams from a (possibly partial) override document."""
    base = ItuRParams()
    try:
        table = dict(base.floor_penetration)
        table.update(
            {
                n: float(v)
                for n, v in _int_keyed(
                    doc.get("floor_penetration", {}), "floor_penetration"
                ).items()
            }
        )
        return ItuRParams(
            n_coeff=float(doc.get("n_coeff", base.n_coeff)),
            floor_penetration=table,
        )
    except (TypeError, ValueError) as exc:
        raise DocumentFormatError(f"bad itu_r parameter document: {exc}") from exc


def log_distance_params_from_dict(doc: Mapping[str, Any]) -> LogDistanceParams:
    """LogDistanceParams from a (possibly partial) override document."""
    base = LogDistanceParams()
    try:
        return LogDistanceParams(
            gamma=float(doc.get("gamma", base.gamma)),
            d0_m=float(doc.get("d0", doc.get("d0_m", base.d0_m))),
        )
    except (TypeError, ValueError) as exc:
        raise DocumentFormatError(
            f"bad log_distance parameter document: {exc}"
        ) from exc


@dataclass(frozen=True)
class ParamsBundle:
    """All three models' parameters resolved from defaults plus overrides."""

    tiplm: TIplmParams = field(default_factory=TIplmParams)
    itu_r: ItuRParams = field(default_factory=ItuRParams)
    log_distance: LogDistanceParams = field(default_factory=LogDistanceParams)


def params_bundle_from_dict(doc: Mapping[str, Any] | None) -> ParamsBundle:
    """Resolve a top-level override document {tiplm, itu_r, log_distance}."""
    if doc is None:
        return ParamsBundle()
    if not isinstance(doc, Mapping):
        raise DocumentFormatError("parameter document must be a JSON object")
    unknown = set(doc) - set(MODEL_KEYS)
    if unknown:
        raise DocumentFormatError(
            f"unknown parameter sections {sorted(unknown)}; expected {MODEL_KEYS}"
        )
    return ParamsBundle(
        tiplm=tiplm_params_from_dict(doc.get("tiplm") or {}),
        itu_r=itu_r_params_from_dict(doc.get("itu_r") or {}),
        log_distance=log_distance_params_from_dict(doc.get("log_distance") or {}),
    )


def load_params(source: str | Path) -> ParamsBundle:
    """Load a parameter override document from a JSON file."""
    with open(source, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DocumentFormatError(
                f"parameter file is not valid JSON: {exc}"
            ) from exc
    return params_bundle_from_dict(doc)
