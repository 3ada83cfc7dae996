"""Service clients used by the CLI.

LocalClient invokes the endpoint handlers in-process (no server needed, byte
deterministic); HttpClient talks to a running instance over HTTP. Both raise
ServiceError with the service's single-line diagnostic on domain failures.
"""

from __future__ import annotations

from typing import TypeVar

import httpx
from pydantic import BaseModel

from .errors import PathLossError
from .service import app as handlers
from .service.schemas import (
    CompareRequest,
    CompareResponse,
    CoverageRequest,
    CoverageResponse,
    DefaultsResponse,
    FitRequest,
    FitResponse,
    PredictRequest,
    PredictResponse,
    SynthRequest,
    SynthResponse,
)

R = TypeVar("R", bound=BaseModel)


class ServiceError(Exception):
    """A domain error reported by the service."""

    def __init__(self, detail: str, status_code: int = 400):
        self.detail = detail
        self.status_code = status_code
        super().__init__(detail)


class LocalClient:
    """In-process client: calls the endpoint handlers directly."""

    def predict(self, req: PredictRequest) -> PredictResponse:
        return self._call(handlers.predict, req)

    def fit(self, req: FitRequest) -> FitResponse:
        return self._call(handlers.fit, req)

    def compare(self, req: CompareRequest) -> CompareResponse:
        return self._call(handlers.compare, req)

    def coverage(self, req: CoverageRequest) -> CoverageResponse:
        return self._call(handlers.coverage, req)

    def synth(self, req: SynthRequest) -> SynthResponse:
        return self._call(handlers.synth, req)

    def defaults(self) -> DefaultsResponse:
        return handlers.defaults()

    @staticmethod
    def _call(handler, req):
        try:
            return handler(req)
        except PathLossError as exc:
            raise ServiceError(str(exc)) from exc


class HttpClient:
    """HTTP client for a running service instance."""

    def __init__(
        self,
        base_url: str,
        timeout: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self._client = client or httpx.Client(base_url=base_url, timeout=timeout)

    def predict(self, req: PredictRequest) -> PredictResponse:
        return self._post("/predict", req, PredictResponse)

    def fit(self, req: FitRequest) -> FitResponse:
        return self._post("/fit", req, FitResponse)

    def compare(self, req: CompareRequest) -> CompareResponse:
        return self._post("/compare", req, CompareResponse)

    def coverage(self, req: CoverageRequest) -> CoverageResponse:
        return self._post("/coverage", req, CoverageResponse)

    def synth(self, req: SynthRequest) -> SynthResponse:
        return self._post("/synth", req, SynthResponse)

    def defaults(self) -> DefaultsResponse:
        response = self._client.get("/defaults")
        self._raise_for_error(response)
        return DefaultsResponse.model_validate(response.json())

    def _post(self, path: str, req: BaseModel, response_model: type[R]) -> R:
        response = self._client.post(path, json=req.model_dump(mode="json"))
        self._raise_for_error(response)
        return response_model.model_validate(response.json())

    @staticmethod
    def _raise_for_error(response: httpx.Response) -> None:
        if response.status_code < 400:
            return
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise ServiceError(str(detail), response.status_code)
