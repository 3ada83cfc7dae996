"""Model calibration against aggregated drive-test data.

Both fits are one-parameter linear least squares in log10(distance), solved
in closed form; the frequency constant and the additive wall/floor terms are
fixed, so noise-free synthetic data is recovered exactly. Error statistics
and the mean-square-error comparison mirror the offline analysis workflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .errors import (
    DegenerateDesign,
    DomainError,
    EmptyInput,
    InsufficientData,
    LengthMismatch,
)
from .ingest import AggregatedPoint
from .models import (
    LogDistanceParams,
    PathLossModel,
    TIplmParams,
    log_distance_path_loss,
    lookup_faf,
    wall_loss_sum,
)


@dataclass(frozen=True)
class FitResult:
    """One fitted parameter with the post-fit residual RMS."""

    parameter_name: str
    estimate: float
    residual_rms_db: float
    sample_count: int


@dataclass(frozen=True)
class ErrorStats:
    """Residual statistics: mean, population std dev, and a histogram."""

    mean_db: float
    std_dev_db: float
    histogram: tuple[tuple[float, float, int], ...]
    n: int


@dataclass(frozen=True)
class ModelScore:
    name: str
    mse_db2: float
    bias_db: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-model MSE/bias scores; winner is the minimal-MSE model."""

    scores: tuple[ModelScore, ...]
    winner: str


def _solve_slope(
    xs: Sequence[float], rs: Sequence[float], ws: Sequence[float]
) -> tuple[float, float]:
    """Least-squares slope of r ~ slope*x and the post-fit weighted RMS."""
    sxx = math.fsum(w * x * x for x, w in zip(xs, ws))
    if sxx == 0.0:
        raise DegenerateDesign(
            "all points at the reference distance; no slope information"
        )
    slope = math.fsum(w * r * x for x, r, w in zip(xs, rs, ws)) / sxx
    wsum = math.fsum(ws)
    sse = math.fsum(w * (r - slope * x) ** 2 for x, r, w in zip(xs, rs, ws))
    return slope, math.sqrt(sse / wsum)


def fit_nt(
    points: Sequence[AggregatedPoint],
    f_mhz: float,
    params: TIplmParams,
    weight_by_samples: bool = False,
) -> FitResult:
    """Fit the distance power loss coefficient N_T to aggregated points.

    Minimizes sum((pl_mean - [20*log10(f) + N_T*log10(d) + wall + FAF - 20])^2)
    over N_T; the frequency constant, wall losses, and floor attenuation come
    from ``params`` and stay fixed.
    """
    if len(points) < 2:
        raise InsufficientData(f"need at least 2 points, got {len(points)}")
    fixed0 = 20.0 * math.log10(f_mhz) - 20.0
    xs, rs, ws = [], [], []
    for p in points:
        if p.distance_m < 1.0:
            raise DomainError(f"point at {p.distance_m} m below the 1 m domain")
        xs.append(math.log10(p.distance_m))
        rs.append(
            p.pl_mean_db
            - fixed0
            - wall_loss_sum(params, p.obstructions)
            - lookup_faf(params, p.floor_delta)
        )
        ws.append(float(p.sample_count) if weight_by_samples else 1.0)
    estimate, rms = _solve_slope(xs, rs, ws)
    return FitResult("N_T", estimate, rms, len(points))


def fit_gamma(
    points: Sequence[AggregatedPoint],
    f_mhz: float,
    d0_m: float = 1.0,
    weight_by_samples: bool = False,
) -> FitResult:
    """Fit the log-distance path loss exponent gamma to aggregated points."""
    if len(points) < 2:
        raise InsufficientData(f"need at least 2 points, got {len(points)}")
    reference = log_distance_path_loss(
        f_mhz, d0_m, LogDistanceParams(gamma=1.0, d0_m=d0_m)
    )
    xs, rs, ws = [], [], []
    for p in points:
        if p.distance_m < d0_m:
            raise DomainError(
                f"point at {p.distance_m} m below reference distance {d0_m} m"
            )
        xs.append(10.0 * math.log10(p.distance_m / d0_m))
        rs.append(p.pl_mean_db - reference)
        ws.append(float(p.sample_count) if weight_by_samples else 1.0)
    estimate, rms = _solve_slope(xs, rs, ws)
    return FitResult("gamma", estimate, rms, len(points))


def error_stats(residuals: Sequence[float], bin_width_db: float = 1.0) -> ErrorStats:
    """Mean, population standard deviation, and histogram of residuals.

    Bins span [floor(min), ceil(max)] in bin_width_db steps; every residual
    falls in exactly one bin (the last bin is right-closed).
    """
    if not residuals:
        raise EmptyInput("no residuals")
    if bin_width_db <= 0:
        raise ValueError("bin_width_db must be positive")
    n = len(residuals)
    mean = math.fsum(residuals) / n
    var = math.fsum((r - mean) ** 2 for r in residuals) / n
    lo = math.floor(min(residuals))
    hi = math.ceil(max(residuals))
    n_bins = max(1, math.ceil((hi - lo) / bin_width_db - 1e-12))
    counts = [0] * n_bins
    for r in residuals:
        idx = min(int((r - lo) // bin_width_db), n_bins - 1)
        counts[idx] += 1
    histogram = tuple(
        (lo + i * bin_width_db, lo + (i + 1) * bin_width_db, c)
        for i, c in enumerate(counts)
    )
    return ErrorStats(mean, math.sqrt(var), histogram, n)


def mse(predicted: Sequence[float], observed: Sequence[float]) -> float:
    """Mean squared error between two equal-length series, dB^2."""
    if len(predicted) != len(observed):
        raise LengthMismatch(
            f"length mismatch: {len(predicted)} predicted vs "
            f"{len(observed)} observed"
        )
    if not predicted:
        raise EmptyInput("no values to compare")
    return math.fsum((p - o) ** 2 for p, o in zip(predicted, observed)) / len(
        predicted
    )


def compare_models(
    points: Sequence[AggregatedPoint],
    f_mhz: float,
    models: Sequence[PathLossModel],
) -> ComparisonReport:
    """Score each model's MSE and mean bias against observed mean path loss.

    The winner is the minimal-MSE model; ties go to the earlier listing.
    """
    if not points:
        raise EmptyInput("no aggregated points")
    if not models:
        raise EmptyInput("no models to compare")
    observed = [p.pl_mean_db for p in points]
    scores = []
    for model in models:
        predicted = [
            model.path_loss(f_mhz, p.distance_m, p.obstructions, p.floor_delta)
            for p in points
        ]
        bias = math.fsum(p - o for p, o in zip(predicted, observed)) / len(points)
        scores.append(ModelScore(model.name, mse(predicted, observed), bias))
    winner = min(scores, key=lambda s: s.mse_db2)
    return ComparisonReport(tuple(scores), winner.name)


def comparison_to_text(report: ComparisonReport) -> str:
    """Plain-text table for terminal output."""
    name_w = max(len("model"), max(len(s.name) for s in report.scores))
    lines = [
        f"{'model':<{name_w}}  {'MSE (dB^2)':>12}  {'bias (dB)':>10}",
        "-" * (name_w + 26),
    ]
    for s in report.scores:
        lines.append(f"{s.name:<{name_w}}  {s.mse_db2:>12.4f}  {s.bias_db:>10.4f}")
    lines.append(f"winner: {report.winner}")
    return "\n".join(lines)


def comparison_to_dict(
    report: ComparisonReport, fits: dict[str, FitResult] | None = None
) -> dict[str, Any]:
    """Machine-readable report document."""
    doc: dict[str, Any] = {
        "models": [
            {"name": s.name, "mse_db2": s.mse_db2, "bias_db": s.bias_db}
            for s in report.scores
        ],
        "winner": report.winner,
    }
    if fits:
        doc["fits"] = {
            key: {
                "parameter": fr.parameter_name,
                "estimate": fr.estimate,
                "residual_rms_db": fr.residual_rms_db,
                "sample_count": fr.sample_count,
            }
            for key, fr in fits.items()
        }
    return doc


def histogram_to_csv(stats: ErrorStats) -> str:
    """Error histogram as ``bin_low,bin_high,count`` CSV text."""
    lines = ["bin_low,bin_high,count"]
    for low, high, count in stats.histogram:
        lines.append(f"{low:g},{high:g},{count}")
    return "\n".join(lines) + "\n"
