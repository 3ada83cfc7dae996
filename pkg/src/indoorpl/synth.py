"""Synthetic drive-test generation from a ground-truth model plus noise.

Serves as the verification oracle for fitting and comparison: receiver
locations are drawn uniformly over the plan extents (rejecting d < 1 m),
each sample's path loss is the model value plus one Gaussian noise draw,
and the result round-trips through the measurement CSV schema.

The generator is numpy's default PCG64 (``numpy.random.default_rng``),
seeded from the config; draw order is two uniforms per location followed by
one normal per sample, so output is a pure function of the config.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryExhausted
from .geometry import FloorPlan, Point3, bounding_box, count_obstructions, distance
from .ingest import Measurement, MeasurementSet
from .models import (
    LinkBudget,
    LinkContext,
    Scenario,
    TIplmParams,
    channel_to_frequency,
    predicted_rssi,
    tiplm_path_loss,
)

MAX_ATTEMPTS_PER_LOCATION = 10_000


@dataclass(frozen=True)
class SynthConfig:
    """Ground truth plus sampling plan for one synthetic survey."""

    plan: FloorPlan
    ap: Point3
    channel: int = 1
    scenario: Scenario = Scenario.BUSY_OFFICE
    budget: LinkBudget = LinkBudget()
    noise_mean_db: float = 0.5
    noise_std_db: float = 3.58
    n_locations: int = 100
    samples_per_location: int = 1
    seed: int = 0
    params: TIplmParams | None = None

    def __post_init__(self) -> None:
        if self.noise_std_db < 0:
            raise ValueError("noise_std_db must be >= 0")
        if self.n_locations < 1 or self.samples_per_location < 1:
            raise ValueError("need at least one location and one sample")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


def generate(cfg: SynthConfig) -> MeasurementSet:
    """Generate a reproducible measurement set from the config.

    Receivers stay on the AP's floor. Raises GeometryExhausted when no
    position at d >= 1 m turns up within the per-location attempt budget
    (e.g. a plan whose extent box sits entirely inside the 1 m exclusion).
    """
    params = cfg.params if cfg.params is not None else TIplmParams(
        scenario=cfg.scenario
    )
    f_mhz = channel_to_frequency(cfg.channel)
    xmin, ymin, xmax, ymax = bounding_box(cfg.plan, extra_points=(cfg.ap.xy,))
    rng = np.random.default_rng(cfg.seed)
    records: list[Measurement] = []
    for _ in range(cfg.n_locations):
        for _ in range(MAX_ATTEMPTS_PER_LOCATION):
            rx = Point3(
                float(rng.uniform(xmin, xmax)),
                float(rng.uniform(ymin, ymax)),
                cfg.ap.floor,
            )
            d = distance(cfg.ap, rx, cfg.plan)
            if d >= 1.0:
                break
        else:
            raise GeometryExhausted(
                f"no receiver position at d >= 1 m within "
                f"{MAX_ATTEMPTS_PER_LOCATION} attempts"
            )
        obs = count_obstructions(cfg.plan, cfg.ap, rx)
        ctx = LinkContext(
            frequency_mhz=f_mhz,
            distance_m=d,
            obstructions=obs,
            floor_delta=0,
            scenario=cfg.scenario,
        )
        true_pl = tiplm_path_loss(ctx, params)
        for _ in range(cfg.samples_per_location):
            noise = float(rng.normal(cfg.noise_mean_db, cfg.noise_std_db))
            records.append(
                Measurement(
                    timestamp=float(len(records)),
                    channel=cfg.channel,
                    tx=cfg.ap,
                    rx=rx,
                    rssi_dbm=predicted_rssi(true_pl + noise, cfg.budget),
                    tag="synth",
                )
            )
    return MeasurementSet(
        records=tuple(records),
        budget=cfg.budget,
        plan_ref=cfg.plan.name or None,
    )
