"""HTTP service.

All endpoints exchange JSON. Errors come back as
``{"error": {"code": ..., "message": ...}}`` with status 400 for bad
input, 404 for an unknown population id and 422 when a revenue target
cannot be met by rate scaling.

Populations are held in process memory. POST /api/population stores one
(either a CSV upload or synthesis parameters) and returns an id that the
evaluate/compare/solve endpoints accept. Restarting the service clears
the store.
"""

from __future__ import annotations

import io
import itertools
import threading
from dataclasses import replace
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .errors import InputError, SolverError, UnreachableTargetError
from .household import ADULT, ROLES, Household, Member
from .lab import (
    comparison_to_record,
    compare,
    household_breakdown,
    revenue_neutral_scale,
    solve_to_record,
)
from .metrics import build_report, report_to_record
from .money import from_bgn, to_bgn
from .policy import Policy, policy_from_record, policy_to_record, preset, preset_names
from .population import SynthesisParams, load_population, synthesize
from .reliefs import ReliefClaims, NO_CLAIMS


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse({"error": {"code": code, "message": message}}, status_code=status)


class PopulationStore:
    """Uploaded populations, keyed pop-0001, pop-0002, ..."""

    def __init__(self):
        self._lock = threading.Lock()
        self._serial = itertools.count(1)
        self._populations: dict[str, tuple[Household, ...]] = {}

    def add(self, households: tuple[Household, ...]) -> str:
        with self._lock:
            population_id = f"pop-{next(self._serial):04d}"
            self._populations[population_id] = households
        return population_id

    def get(self, population_id: str) -> tuple[Household, ...]:
        with self._lock:
            try:
                return self._populations[population_id]
            except KeyError:
                raise ApiError(
                    404, "unknown_population", f"no population {population_id!r}"
                ) from None


async def _json_object(request: Request) -> dict[str, Any]:
    try:
        body = await request.json()
    except Exception:
        raise ApiError(400, "bad_json", "request body must be valid JSON") from None
    if not isinstance(body, dict):
        raise ApiError(400, "bad_request", "request body must be a JSON object")
    return body


def _require(body: dict[str, Any], key: str) -> Any:
    if key not in body:
        raise ApiError(400, "missing_field", f"missing field {key!r}")
    return body[key]


def _policy_from(value: Any) -> Policy:
    if isinstance(value, str):
        return preset(value)
    if isinstance(value, dict):
        if "preset" in value:
            return preset(value["preset"])
        return policy_from_record(value)
    raise ApiError(400, "bad_policy", "policy must be a preset name or a policy object")


def _money_field(record: dict[str, Any], key: str, default: int = 0) -> int:
    value = record.get(key)
    if value is None:
        return default
    if isinstance(value, bool):
        raise InputError(f"{key} must be an amount in BGN")
    try:
        if isinstance(value, (int, str)):
            return from_bgn(str(value))
        if isinstance(value, float):
            if value != round(value, 2):
                raise InputError(f"{key} has sub-stotinka precision: {value}")
            return from_bgn(f"{value:.2f}")
    except InputError:
        raise
    except ValueError as err:
        raise InputError(f"{key}: {err}") from None
    raise InputError(f"{key} must be an amount in BGN")


def _int_field(record: dict[str, Any], key: str, default: int = 0) -> int:
    value = record.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{key} must be an integer")
    return value


_CLAIM_MONEY_FIELDS = (
    ("pension_paid_bgn", "voluntary_pension_paid"),
    ("insurance_paid_bgn", "insurance_paid"),
    ("service_purchase_paid_bgn", "service_purchase_paid"),
    ("donations_bgn", "donations"),
    ("mortgage_interest_bgn", "mortgage_interest_paid"),
    ("mortgage_principal_bgn", "mortgage_principal"),
)


def _claims_from(record: Any) -> ReliefClaims:
    if record is None:
        return NO_CLAIMS
    if not isinstance(record, dict):
        raise InputError("claims must be an object")
    claims = NO_CLAIMS
    for key, attr in _CLAIM_MONEY_FIELDS:
        claims = replace(claims, **{attr: _money_field(record, key)})
    claims = replace(
        claims,
        children=_int_field(record, "children"),
        disabled_children=_int_field(record, "disabled_children"),
        reduced_capacity_pct=_int_field(record, "reduced_capacity_pct"),
        young_family_eligible=bool(record.get("young_family", False)),
    )
    return claims


def _household_from(record: Any) -> Household:
    if not isinstance(record, dict):
        raise InputError("household must be an object")
    member_records = record.get("members")
    if not isinstance(member_records, list) or not member_records:
        raise InputError("household needs a non-empty members list")
    household_id = str(record.get("id", "h1"))
    members = []
    for index, entry in enumerate(member_records, start=1):
        if not isinstance(entry, dict):
            raise InputError(f"member {index} must be an object")
        role = entry.get("role", ADULT)
        if role not in ROLES:
            raise InputError(f"member {index}: unknown role {role!r}")
        members.append(
            Member(
                id=str(entry.get("id", f"{household_id}p{index}")),
                role=role,
                monthly_income=_money_field(entry, "monthly_income_bgn"),
                claims=_claims_from(entry.get("claims")),
            )
        )
    return Household(id=household_id, members=tuple(members))


_SYNTH_FIELDS = {
    "household_count", "seed", "median_income_bgn", "income_sigma",
    "income_floor_bgn", "whole_bgn", "claim_child_relief", "reduced_capacity_share",
}


def _synthesis_from(record: Any) -> SynthesisParams:
    if not isinstance(record, dict):
        raise InputError("synthesis must be an object")
    unknown = set(record) - _SYNTH_FIELDS
    if unknown:
        raise InputError(f"unknown synthesis fields: {', '.join(sorted(unknown))}")
    if "household_count" not in record or "seed" not in record:
        raise InputError("synthesis needs household_count and seed")
    try:
        return SynthesisParams(
            household_count=int(record["household_count"]),
            seed=int(record["seed"]),
            median_income_bgn=float(record.get("median_income_bgn", 900.0)),
            income_sigma=float(record.get("income_sigma", 0.75)),
            income_floor=_money_field(record, "income_floor_bgn"),
            whole_bgn=bool(record.get("whole_bgn", True)),
            claim_child_relief=bool(record.get("claim_child_relief", True)),
            reduced_capacity_share=float(record.get("reduced_capacity_share", 0.0)),
        )
    except (TypeError, ValueError) as err:
        raise InputError(f"bad synthesis value: {err}") from None


def _population_summary(population_id: str, households: tuple[Household, ...]) -> dict:
    return {
        "population_id": population_id,
        "households": len(households),
        "persons": sum(h.size for h in households),
        "total_income_bgn": to_bgn(sum(h.monthly_income for h in households)),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="taxlab", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = PopulationStore()

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, err: ApiError) -> JSONResponse:
        return _error_response(err.status, err.code, str(err))

    @app.exception_handler(InputError)
    async def on_input_error(request: Request, err: InputError) -> JSONResponse:
        return _error_response(400, "validation", str(err))

    @app.exception_handler(UnreachableTargetError)
    async def on_unreachable(request: Request, err: UnreachableTargetError) -> JSONResponse:
        return _error_response(422, "unreachable_target", str(err))

    @app.exception_handler(SolverError)
    async def on_solver_error(request: Request, err: SolverError) -> JSONResponse:
        return _error_response(422, "solver_failed", str(err))

    @app.get("/api/presets")
    async def list_presets() -> dict:
        return {"presets": [policy_to_record(preset(name)) for name in preset_names()]}

    @app.post("/api/population")
    async def add_population(request: Request) -> dict:
        body = await _json_object(request)
        has_csv = "csv" in body
        has_synthesis = "synthesis" in body
        if has_csv == has_synthesis:
            raise ApiError(400, "bad_request", "give exactly one of csv or synthesis")
        if has_csv:
            if not isinstance(body["csv"], str):
                raise ApiError(400, "bad_request", "csv must be a string")
            households = load_population(io.StringIO(body["csv"]))
        else:
            households = synthesize(_synthesis_from(body["synthesis"]))
        return _population_summary(store.add(households), households)

    @app.post("/api/evaluate")
    async def evaluate(request: Request) -> dict:
        body = await _json_object(request)
        households = store.get(str(_require(body, "population_id")))
        policy = _policy_from(_require(body, "policy"))
        return report_to_record(build_report(households, policy))

    @app.post("/api/household/whatif")
    async def whatif(request: Request) -> dict:
        body = await _json_object(request)
        household = _household_from(_require(body, "household"))
        policy = _policy_from(_require(body, "policy"))
        return household_breakdown(household, policy)

    @app.post("/api/compare")
    async def compare_policies(request: Request) -> dict:
        body = await _json_object(request)
        households = store.get(str(_require(body, "population_id")))
        policy_records = _require(body, "policies")
        if not isinstance(policy_records, list) or len(policy_records) < 2:
            raise ApiError(400, "bad_request", "policies must list at least two entries")
        policies = [_policy_from(entry) for entry in policy_records]
        return comparison_to_record(compare(households, policies))

    @app.post("/api/solve")
    async def solve(request: Request) -> dict:
        body = await _json_object(request)
        households = store.get(str(_require(body, "population_id")))
        policy = _policy_from(_require(body, "policy"))
        _require(body, "target_bgn")
        target = _money_field(body, "target_bgn")
        if target < 0:
            raise ApiError(400, "bad_request", "target_bgn must not be negative")
        tolerance = _money_field(body, "tolerance_bgn", default=from_bgn("1.00"))
        result = revenue_neutral_scale(policy, households, target, tolerance)
        return solve_to_record(result)

    return app
