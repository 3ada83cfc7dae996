"""FastAPI service exposing the modeling pipeline.

Endpoint handlers are plain functions over the pydantic schemas, so the CLI
can call them in-process; domain errors (PathLossError) map to HTTP 400 with
a single-line detail.
"""

from __future__ import annotations

import math
from dataclasses import replace

from fastapi import APIRouter, FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..calibrate import compare_models, fit_gamma, fit_nt
from ..coverage import coverage_grid, grid_to_csv, grid_to_pgm
from ..errors import PathLossError
from ..geometry import BUILTIN_MATERIALS, Material, ObstructionSummary
from ..ingest import aggregate, measurements_to_csv, parse_measurements
from ..models import (
    CHANNEL_FREQ_MHZ,
    DEFAULT_FAF_DB,
    DEFAULT_NT_BUSY,
    DEFAULT_NT_CORRIDOR,
    DEFAULT_NT_OPEN,
    DEFAULT_WALL_LOSS_DB,
    ITU_R_N_COMMERCIAL,
    ITU_R_N_OFFICE,
    ITU_R_N_RESIDENTIAL,
    ItuRModel,
    LogDistanceModel,
    ParamsBundle,
    PathLossModel,
    Scenario,
    TIplmModel,
    default_floor_penetration,
    predicted_rssi,
)
from ..synth import SynthConfig, generate
from .schemas import (
    CompareRequest,
    CompareResponse,
    CoverageRequest,
    CoverageResponse,
    DefaultsResponse,
    FitRequest,
    FitResponse,
    ModelScoreDoc,
    NoiseDoc,
    ParamsDoc,
    PlanDoc,
    PredictRequest,
    PredictResponse,
    ServiceInfo,
    SynthRequest,
    SynthResponse,
)

router = APIRouter()


def _bundle(params: ParamsDoc | None) -> ParamsBundle:
    return (params or ParamsDoc()).to_bundle()


def _build_model(
    key: str, bundle: ParamsBundle, scenario: Scenario
) -> PathLossModel:
    if key == "tiplm":
        return TIplmModel(replace(bundle.tiplm, scenario=scenario))
    if key == "itu_r":
        return ItuRModel(bundle.itu_r)
    if key == "log_distance":
        return LogDistanceModel(bundle.log_distance)
    raise ValueError(f"unknown model key {key!r}")


def _obstructions(obstacles: dict[str, int]) -> ObstructionSummary:
    counts: dict[Material, int] = {}
    for name, count in obstacles.items():
        key = name.strip().lower()
        material = BUILTIN_MATERIALS.get(key, Material(key))
        counts[material] = counts.get(material, 0) + count
    return ObstructionSummary.from_counts(counts)


@router.get("/", response_model=ServiceInfo)
def info() -> ServiceInfo:
    return ServiceInfo()


@router.get("/defaults", response_model=DefaultsResponse)
def defaults() -> DefaultsResponse:
    return DefaultsResponse(
        channels_mhz=dict(CHANNEL_FREQ_MHZ),
        wall_loss_db=dict(DEFAULT_WALL_LOSS_DB),
        nt_busy={c: dict(t) for c, t in DEFAULT_NT_BUSY.items()},
        nt_open=dict(DEFAULT_NT_OPEN),
        nt_corridor=DEFAULT_NT_CORRIDOR,
        faf_db=dict(DEFAULT_FAF_DB),
        itu_r_n={
            "office": ITU_R_N_OFFICE,
            "residential": ITU_R_N_RESIDENTIAL,
            "commercial": ITU_R_N_COMMERCIAL,
        },
        itu_r_floor_penetration_db=default_floor_penetration(),
        synth_noise=NoiseDoc(mean_db=0.5, std_db=3.58),
    )


@router.post("/predict", response_model=PredictResponse)
def predict(req: PredictRequest) -> PredictResponse:
    bundle = _bundle(req.params)
    f_mhz = req.resolved_frequency()
    model = _build_model(req.model, bundle, req.scenario)
    pl = model.path_loss(
        f_mhz, req.distance_m, _obstructions(req.obstacles), req.floor_delta
    )
    return PredictResponse(
        model=model.name,
        frequency_mhz=f_mhz,
        distance_m=req.distance_m,
        path_loss_db=pl,
        rssi_dbm=predicted_rssi(pl, req.budget.to_budget()),
    )


def _aggregated_points(req: FitRequest | CompareRequest):
    plan = (req.plan or PlanDoc()).to_plan()
    mset = parse_measurements(req.data_csv, req.budget.to_budget())
    return aggregate(mset, plan, req.bin_width_m)


@router.post("/fit", response_model=FitResponse)
def fit(req: FitRequest) -> FitResponse:
    bundle = _bundle(req.params)
    points = _aggregated_points(req)
    f_mhz = req.resolved_frequency()
    if req.parameter == "nt":
        result = fit_nt(
            points, f_mhz, bundle.tiplm, weight_by_samples=req.weight_by_samples
        )
    else:
        result = fit_gamma(
            points, f_mhz, req.d0_m, weight_by_samples=req.weight_by_samples
        )
    return FitResponse(
        parameter=result.parameter_name,
        estimate=result.estimate,
        residual_rms_db=result.residual_rms_db,
        sample_count=result.sample_count,
    )


@router.post("/compare", response_model=CompareResponse)
def compare(req: CompareRequest) -> CompareResponse:
    bundle = _bundle(req.params)
    points = _aggregated_points(req)
    f_mhz = req.resolved_frequency()
    models = [
        _build_model("tiplm", bundle, req.scenario),
        _build_model("itu_r", bundle, req.scenario),
        _build_model("log_distance", bundle, req.scenario),
    ]
    report = compare_models(points, f_mhz, models)
    fits: dict[str, FitResponse] | None = None
    if req.include_fits:
        fits = {}
        for key, runner in (
            ("nt", lambda: fit_nt(points, f_mhz, bundle.tiplm)),
            ("gamma", lambda: fit_gamma(points, f_mhz, bundle.log_distance.d0_m)),
        ):
            try:
                result = runner()
            except PathLossError:
                continue
            fits[key] = FitResponse(
                parameter=result.parameter_name,
                estimate=result.estimate,
                residual_rms_db=result.residual_rms_db,
                sample_count=result.sample_count,
            )
        fits = fits or None
    return CompareResponse(
        models=[
            ModelScoreDoc(name=s.name, mse_db2=s.mse_db2, bias_db=s.bias_db)
            for s in report.scores
        ],
        winner=report.winner,
        fits=fits,
    )


@router.post("/coverage", response_model=CoverageResponse)
def coverage(req: CoverageRequest) -> CoverageResponse:
    bundle = _bundle(req.params)
    plan = req.plan.to_plan()
    ap = req.ap.to_point()
    model = _build_model(req.model, bundle, req.scenario)
    floor = req.floor if req.floor is not None else ap.floor
    grid = coverage_grid(
        plan,
        ap,
        model,
        req.budget.to_budget(),
        floor=floor,
        resolution_m=req.resolution_m,
        f_mhz=req.resolved_frequency(),
    )
    return CoverageResponse(
        origin_x=grid.origin[0],
        origin_y=grid.origin[1],
        resolution_m=grid.resolution_m,
        width=grid.width,
        height=grid.height,
        floor=grid.floor,
        warning_count=grid.warning_count,
        values=[None if math.isnan(v) else v for v in grid.values],
        csv=grid_to_csv(grid) if "csv" in req.formats else None,
        pgm=grid_to_pgm(grid) if "pgm" in req.formats else None,
    )


@router.post("/synth", response_model=SynthResponse)
def synth(req: SynthRequest) -> SynthResponse:
    bundle = _bundle(req.params)
    cfg = SynthConfig(
        plan=req.plan.to_plan(),
        ap=req.ap.to_point(),
        channel=req.channel,
        scenario=req.scenario,
        budget=req.budget.to_budget(),
        noise_mean_db=req.noise_mean_db,
        noise_std_db=req.noise_std_db,
        n_locations=req.n_locations,
        samples_per_location=req.samples_per_location,
        seed=req.seed,
        params=(
            replace(bundle.tiplm, scenario=req.scenario)
            if req.params is not None
            else None
        ),
    )
    mset = generate(cfg)
    return SynthResponse(csv=measurements_to_csv(mset), n_records=len(mset.records))


def create_app() -> FastAPI:
    app = FastAPI(
        title="indoorpl",
        version=__version__,
        description=(
            "Indoor 2.4 GHz path loss prediction, drive-test calibration, "
            "model comparison, coverage maps, and synthetic surveys."
        ),
    )
    app.include_router(router)

    @app.exception_handler(PathLossError)
    async def _domain_error(request: Request, exc: PathLossError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    return app
