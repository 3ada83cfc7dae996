"""Tests for the synthetic drive-test generator."""

import math

import numpy as np
import pytest

from indoorpl.calibrate import error_stats, fit_nt
from indoorpl.errors import GeometryExhausted
from indoorpl.geometry import (
    FloorPlan,
    Point3,
    WallSegment,
    count_obstructions,
    distance,
)
from indoorpl.ingest import aggregate
from indoorpl.models import (
    LinkBudget,
    LinkContext,
    Scenario,
    TIplmParams,
    channel_to_frequency,
    rssi_to_path_loss,
    tiplm_path_loss,
)
from indoorpl.synth import SynthConfig, generate


def config(**kwargs):
    defaults = dict(
        plan=FloorPlan(name="synthbed"),
        ap=Point3(0.0, 0.0),
        channel=1,
        scenario=Scenario.OPEN_SPACE,
        budget=LinkBudget(),
        n_locations=20,
        samples_per_location=2,
        seed=1234,
    )
    defaults.update(kwargs)
    return SynthConfig(**defaults)


class TestDeterminism:
    def test_same_seed_identical_output(self):
        assert generate(config()) == generate(config())

    def test_different_seed_differs(self):
        assert generate(config()) != generate(config(seed=4321))

    def test_output_is_pure_function_of_config(self):
        cfg = config(noise_mean_db=0.2, noise_std_db=1.0, seed=77)
        first = [m.rssi_dbm for m in generate(cfg).records]
        second = [m.rssi_dbm for m in generate(cfg).records]
        assert first == second


class TestGroundTruth:
    def test_zero_noise_matches_model(self):
        cfg = config(noise_mean_db=0.0, noise_std_db=0.0)
        mset = generate(cfg)
        params = TIplmParams(scenario=cfg.scenario)
        f = channel_to_frequency(cfg.channel)
        for m in mset.records:
            d = distance(m.tx, m.rx, cfg.plan)
            obs = count_obstructions(cfg.plan, m.tx, m.rx)
            expected = tiplm_path_loss(
                LinkContext(f, d, obs, 0, cfg.scenario), params
            )
            assert rssi_to_path_loss(m.rssi_dbm, cfg.budget) == pytest.approx(
                expected, abs=1e-12
            )

    def test_custom_params_define_truth(self):
        custom = TIplmParams(nt_corridor=31.8)
        cfg = config(
            scenario=Scenario.CORRIDOR,
            params=custom,
            noise_mean_db=0.0,
            noise_std_db=0.0,
            n_locations=40,
        )
        mset = generate(cfg)
        points = aggregate(mset, cfg.plan, bin_width_m=1e-3)
        result = fit_nt(points, channel_to_frequency(cfg.channel), custom)
        assert result.estimate == pytest.approx(31.8, abs=1e-9)

    def test_residual_statistics_reproduce_noise(self):
        cfg = config(
            noise_mean_db=0.5,
            noise_std_db=3.58,
            n_locations=1,
            samples_per_location=2000,
            seed=99,
        )
        mset = generate(cfg)
        params = TIplmParams(scenario=cfg.scenario)
        f = channel_to_frequency(cfg.channel)
        rx = mset.records[0].rx
        d = distance(cfg.ap, rx, cfg.plan)
        truth = tiplm_path_loss(
            LinkContext(f, d, scenario=cfg.scenario), params
        )
        residuals = [
            rssi_to_path_loss(m.rssi_dbm, cfg.budget) - truth
            for m in mset.records
        ]
        stats = error_stats(residuals)
        assert stats.mean_db == pytest.approx(0.5, abs=3 * 3.58 / math.sqrt(2000))
        assert stats.std_dev_db == pytest.approx(
            3.58, abs=3 * 3.58 / math.sqrt(2 * 2000)
        )


class TestSampling:
    def test_positions_within_extents_and_beyond_1m(self):
        plan = FloorPlan(
            walls=(
                WallSegment((-8, -8), (8, -8)),
                WallSegment((8, -8), (8, 8)),
                WallSegment((8, 8), (-8, 8)),
                WallSegment((-8, 8), (-8, -8)),
            )
        )
        cfg = config(plan=plan, n_locations=100, samples_per_location=1)
        for m in generate(cfg).records:
            assert -8 <= m.rx.x <= 8
            assert -8 <= m.rx.y <= 8
            assert distance(m.tx, m.rx, plan) >= 1.0
            assert m.rx.floor == cfg.ap.floor

    def test_records_per_location(self):
        cfg = config(n_locations=7, samples_per_location=3)
        mset = generate(cfg)
        assert len(mset.records) == 21
        positions = {m.rx for m in mset.records}
        assert len(positions) == 7

    def test_timestamps_are_deterministic_sequence(self):
        mset = generate(config(n_locations=3, samples_per_location=2))
        assert [m.timestamp for m in mset.records] == [0, 1, 2, 3, 4, 5]

    def test_geometry_exhausted_on_tiny_extents(self):
        plan = FloorPlan(walls=(WallSegment((-0.2, -0.2), (0.2, 0.2)),))
        with pytest.raises(GeometryExhausted):
            generate(config(plan=plan, ap=Point3(0, 0)))

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            config(noise_std_db=-1.0)
        with pytest.raises(ValueError):
            config(n_locations=0)
