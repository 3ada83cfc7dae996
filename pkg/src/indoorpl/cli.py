"""Command-line client for the modeling service.

Subcommands: predict, fit, compare, coverage, synth, serve. All commands run
in-process by default; pass --server to target a running service instance.

Exit codes: 0 success, 1 usage error, 2 data/model error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from . import __version__
from .client import HttpClient, LocalClient, ServiceError
from .service.schemas import (
    BudgetDoc,
    CompareRequest,
    CoverageRequest,
    FitRequest,
    ParamsDoc,
    PlanDoc,
    PointDoc,
    PredictRequest,
    SynthRequest,
)

PARAMS_HELP = (
    "JSON parameter overrides for any model table. Note: the ITU-R floor "
    "penetration default P_f(n)=15+4(n-1) dB is the generic office table, "
    "not a value calibrated for this band; override it here if you have "
    "site data."
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse calls this on bad flags
        raise UsageError(message)


def _parse_budget(text: str) -> BudgetDoc:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--budget expects 'txdbm,txgain,rxgain', got {text!r}")
    try:
        tx, txg, rxg = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"--budget values must be numbers, got {text!r}") from None
    return BudgetDoc(tx_power_dbm=tx, tx_gain_dbi=txg, rx_gain_dbi=rxg)


def _parse_obstacles(text: str) -> dict[str, int]:
    counts: dict[str, int] = {}
    if not text:
        return counts
    for item in text.split(","):
        name, sep, count = item.partition(":")
        if not sep or not name.strip():
            raise UsageError(
                f"--obstacles expects 'material:count,...', got {item!r}"
            )
        try:
            counts[name.strip().lower()] = int(count)
        except ValueError:
            raise UsageError(f"obstacle count must be an integer: {item!r}") from None
    return counts


def _parse_ap(text: str) -> PointDoc:
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise UsageError(f"--ap expects 'x,y[,floor]', got {text!r}")
    try:
        x, y = float(parts[0]), float(parts[1])
        floor = int(parts[2]) if len(parts) == 3 else 0
    except ValueError:
        raise UsageError(f"--ap values must be numeric, got {text!r}") from None
    return PointDoc(x=x, y=y, floor=floor)


def _load_json(path: str, what: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ServiceError(f"cannot read {what} file {path!r}: {exc.strerror}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ServiceError(f"{what} file {path!r} is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ServiceError(f"{what} file {path!r} must hold a JSON object")
    return doc


def _load_plan_doc(path: str | None) -> PlanDoc | None:
    if path is None:
        return None
    try:
        return PlanDoc.model_validate(_load_json(path, "plan"))
    except ValidationError as exc:
        raise ServiceError(f"plan file {path!r}: {exc.errors()[0]['msg']}")


def _load_params_doc(path: str | None) -> ParamsDoc | None:
    if path is None:
        return None
    try:
        return ParamsDoc.model_validate(_load_json(path, "params"))
    except ValidationError as exc:
        raise ServiceError(f"params file {path!r}: {exc.errors()[0]['msg']}")


def _read_data(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ServiceError(f"cannot read data file {path!r}: {exc.strerror}")


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ServiceError(f"cannot write {path!r}: {exc.strerror}")


def _add_common(parser: argparse.ArgumentParser, scenario: bool = True) -> None:
    radio = parser.add_mutually_exclusive_group()
    radio.add_argument(
        "--channel", type=int, choices=range(1, 15), metavar="{1..14}",
        help="2.4 GHz channel index (default: 1)",
    )
    radio.add_argument(
        "--frequency-mhz", type=float,
        help="operating frequency in MHz (instead of --channel)",
    )
    if scenario:
        parser.add_argument(
            "--scenario", choices=("busy", "open", "corridor"), default="busy",
            help="propagation scenario selecting the N_T table (default: busy)",
        )
    parser.add_argument(
        "--budget", default="15,0,0", metavar="TXDBM,TXGAIN,RXGAIN",
        help="link budget: tx power dBm, tx gain dBi, rx gain dBi "
        "(default: 15,0,0)",
    )
    parser.add_argument("--params", metavar="FILE", help=PARAMS_HELP)
    parser.add_argument(
        "--server", metavar="URL",
        help="send the request to a running service instead of in-process",
    )


def _radio_kwargs(ns: argparse.Namespace) -> dict:
    if ns.frequency_mhz is not None:
        return {"frequency_mhz": ns.frequency_mhz}
    return {"channel": ns.channel if ns.channel is not None else 1}


def build_parser() -> _Parser:
    parser = _Parser(
        prog="indoorpl",
        description="Indoor 2.4 GHz path loss modeling, calibration, "
        "comparison, coverage maps, and synthetic surveys.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("predict", help="evaluate one model at one link")
    p.add_argument(
        "--model", choices=("tiplm", "itu_r", "log_distance"), default="tiplm",
        help="path loss model (default: tiplm)",
    )
    p.add_argument("--distance", type=float, required=True, metavar="METERS")
    p.add_argument(
        "--obstacles", default="", metavar="MAT:N,...",
        help="obstacles on the sight line, e.g. concrete:2,glass:1",
    )
    p.add_argument(
        "--floor-delta", type=int, default=0,
        help="receiver floor minus transmitter floor (default: 0)",
    )
    _add_common(p)

    f = sub.add_parser("fit", help="fit N_T or gamma to drive-test data")
    f.add_argument("--data", required=True, metavar="CSV")
    f.add_argument("--plan", metavar="FILE", help="floor plan JSON")
    f.add_argument(
        "--parameter", choices=("nt", "gamma"), default="nt",
        help="which coefficient to fit (default: nt)",
    )
    f.add_argument(
        "--d0", type=float, default=1.0,
        help="log-distance reference distance in meters (default: 1)",
    )
    f.add_argument(
        "--bin-width", type=float, default=0.5, metavar="METERS",
        help="distance bin width for aggregation (default: 0.5)",
    )
    f.add_argument(
        "--weight-by-samples", action="store_true",
        help="weight each aggregated point by its sample count",
    )
    f.add_argument("--out", metavar="FILE", help="also write the fit as JSON")
    _add_common(f, scenario=False)

    c = sub.add_parser("compare", help="rank models by MSE on drive-test data")
    c.add_argument("--data", required=True, metavar="CSV")
    c.add_argument("--plan", metavar="FILE", help="floor plan JSON")
    c.add_argument(
        "--bin-width", type=float, default=0.5, metavar="METERS",
        help="distance bin width for aggregation (default: 0.5)",
    )
    c.add_argument("--out", metavar="FILE", help="write the report as JSON")
    _add_common(c)

    g = sub.add_parser("coverage", help="predicted-RSSI map over a floor plan")
    g.add_argument("--plan", metavar="FILE", help="floor plan JSON")
    g.add_argument(
        "--ap", required=True, metavar="X,Y[,FLOOR]",
        help="access point position; use the --ap=-3,4 form for negative "
        "coordinates",
    )
    g.add_argument(
        "--model", choices=("tiplm", "itu_r", "log_distance"), default="tiplm",
        help="path loss model (default: tiplm)",
    )
    g.add_argument(
        "--floor", type=int, default=None,
        help="grid floor (default: the AP's floor)",
    )
    g.add_argument(
        "--resolution", type=float, default=0.5, metavar="METERS",
        help="cell size (default: 0.5)",
    )
    g.add_argument("--out", required=True, metavar="FILE", help="CSV matrix output")
    g.add_argument("--pgm", metavar="FILE", help="also write a PGM graymap")
    _add_common(g)

    s = sub.add_parser("synth", help="generate a synthetic drive test")
    s.add_argument("--plan", metavar="FILE", help="floor plan JSON")
    s.add_argument(
        "--ap", required=True, metavar="X,Y[,FLOOR]",
        help="access point position; use the --ap=-3,4 form for negative "
        "coordinates",
    )
    s.add_argument(
        "--noise-mean", type=float, default=0.5,
        help="Gaussian noise mean in dB (default: 0.5)",
    )
    s.add_argument(
        "--noise-std", type=float, default=3.58,
        help="Gaussian noise standard deviation in dB (default: 3.58)",
    )
    s.add_argument(
        "--locations", type=int, default=100,
        help="number of receiver locations (default: 100)",
    )
    s.add_argument(
        "--samples", type=int, default=1,
        help="samples per location (default: 1)",
    )
    s.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    s.add_argument("--out", required=True, metavar="FILE", help="CSV output")
    _add_common(s)

    v = sub.add_parser("serve", help="run the HTTP service")
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8000)

    return parser


def _client(ns: argparse.Namespace):
    if getattr(ns, "server", None):
        return HttpClient(ns.server)
    return LocalClient()


def _cmd_predict(ns: argparse.Namespace) -> int:
    req = PredictRequest(
        model=ns.model,
        distance_m=ns.distance,
        obstacles=_parse_obstacles(ns.obstacles),
        floor_delta=ns.floor_delta,
        scenario=ns.scenario,
        budget=_parse_budget(ns.budget),
        params=_load_params_doc(ns.params),
        **_radio_kwargs(ns),
    )
    resp = _client(ns).predict(req)
    print(f"model: {resp.model}")
    print(f"frequency: {resp.frequency_mhz:g} MHz")
    print(f"distance: {resp.distance_m:g} m")
    print(f"path loss: {resp.path_loss_db:.4f} dB")
    print(f"predicted RSSI: {resp.rssi_dbm:.4f} dBm")
    return 0


def _cmd_fit(ns: argparse.Namespace) -> int:
    req = FitRequest(
        data_csv=_read_data(ns.data),
        plan=_load_plan_doc(ns.plan),
        parameter=ns.parameter,
        d0_m=ns.d0,
        bin_width_m=ns.bin_width,
        budget=_parse_budget(ns.budget),
        params=_load_params_doc(ns.params),
        weight_by_samples=ns.weight_by_samples,
        **_radio_kwargs(ns),
    )
    resp = _client(ns).fit(req)
    print(
        f"fitted {resp.parameter} = {resp.estimate:.6f} "
        f"(residual RMS {resp.residual_rms_db:.4f} dB, "
        f"{resp.sample_count} points)"
    )
    if ns.out:
        _write_text(ns.out, resp.model_dump_json(indent=2) + "\n")
        print(f"wrote {ns.out}")
    return 0


def _cmd_compare(ns: argparse.Namespace) -> int:
    req = CompareRequest(
        data_csv=_read_data(ns.data),
        plan=_load_plan_doc(ns.plan),
        scenario=ns.scenario,
        bin_width_m=ns.bin_width,
        budget=_parse_budget(ns.budget),
        params=_load_params_doc(ns.params),
        **_radio_kwargs(ns),
    )
    resp = _client(ns).compare(req)
    name_w = max(len("model"), max(len(s.name) for s in resp.models))
    print(f"{'model':<{name_w}}  {'MSE (dB^2)':>12}  {'bias (dB)':>10}")
    print("-" * (name_w + 26))
    for s in resp.models:
        print(f"{s.name:<{name_w}}  {s.mse_db2:>12.4f}  {s.bias_db:>10.4f}")
    print(f"winner: {resp.winner}")
    if resp.fits:
        for key, fit in resp.fits.items():
            print(
                f"fitted {fit.parameter} = {fit.estimate:.4f} "
                f"(residual RMS {fit.residual_rms_db:.4f} dB)"
            )
    if ns.out:
        _write_text(ns.out, resp.model_dump_json(indent=2) + "\n")
        print(f"wrote {ns.out}")
    return 0


def _cmd_coverage(ns: argparse.Namespace) -> int:
    formats = ["csv"] + (["pgm"] if ns.pgm else [])
    req = CoverageRequest(
        plan=_load_plan_doc(ns.plan) or PlanDoc(),
        ap=_parse_ap(ns.ap),
        model=ns.model,
        scenario=ns.scenario,
        floor=ns.floor,
        resolution_m=ns.resolution,
        budget=_parse_budget(ns.budget),
        params=_load_params_doc(ns.params),
        formats=formats,
        **_radio_kwargs(ns),
    )
    resp = _client(ns).coverage(req)
    assert resp.csv is not None
    _write_text(ns.out, resp.csv)
    print(
        f"coverage grid {resp.width}x{resp.height} cells @ "
        f"{resp.resolution_m:g} m, floor {resp.floor}, "
        f"{resp.warning_count} warnings"
    )
    print(f"wrote {ns.out}")
    if ns.pgm:
        assert resp.pgm is not None
        _write_text(ns.pgm, resp.pgm)
        print(f"wrote {ns.pgm}")
    return 0


def _cmd_synth(ns: argparse.Namespace) -> int:
    if ns.frequency_mhz is not None:
        raise UsageError("synth writes a channel column; use --channel")
    req = SynthRequest(
        plan=_load_plan_doc(ns.plan) or PlanDoc(),
        ap=_parse_ap(ns.ap),
        channel=ns.channel if ns.channel is not None else 1,
        scenario=ns.scenario,
        budget=_parse_budget(ns.budget),
        noise_mean_db=ns.noise_mean,
        noise_std_db=ns.noise_std,
        n_locations=ns.locations,
        samples_per_location=ns.samples,
        seed=ns.seed,
        params=_load_params_doc(ns.params),
    )
    resp = _client(ns).synth(req)
    _write_text(ns.out, resp.csv)
    print(f"wrote {resp.n_records} records to {ns.out}")
    return 0


def _cmd_serve(ns: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=ns.host, port=ns.port)
    return 0


_COMMANDS = {
    "predict": _cmd_predict,
    "fit": _cmd_fit,
    "compare": _cmd_compare,
    "coverage": _cmd_coverage,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if ns.command is None:
        parser.print_help()
        return 1
    try:
        return _COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        print(f"usage error: {loc}: {first['msg']}", file=sys.stderr)
        return 1
    except ServiceError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return 2
    except ConnectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
