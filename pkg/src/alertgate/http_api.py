"""HTTP surface of the gateway, all under /api/v1.

Thin by intent: handlers parse JSON, call into the gateway under its lock,
and translate domain errors to status codes. There is deliberately no snooze,
mute, or defer endpoint anywhere here; timing is decided by the gateway, and
the only levers users get are preferences, rules, feedback, and the
missed-alert report.
"""

from __future__ import annotations

from datetime import timedelta
from typing import Any, Mapping

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import users as usr
from .clock import SystemClock, format_ts, parse_ts
from .engine import RuleAssign, RuleMatch
from .errors import (
    DuplicateFeedback,
    EventValidationError,
    GatewayError,
    UnknownEntity,
)
from .gateway import Gateway
from .model import Channel, SignalKind

API_PREFIX = "/api/v1"


def _bad_request(detail: str) -> HTTPException:
    return HTTPException(status_code=400, detail=detail)


async def _json_body(request: Request) -> Any:
    try:
        return await request.json()
    except Exception:
        raise _bad_request("body must be a JSON document")


def _parse_at(doc: Mapping, key: str, default):
    raw = doc.get(key)
    if raw is None:
        return default
    try:
        return parse_ts(raw)
    except ValueError as exc:
        raise _bad_request(f"bad timestamp in {key!r}: {exc}")


def create_app(gateway: Gateway, clock: SystemClock | None = None) -> FastAPI:
    clock = clock or SystemClock()
    app = FastAPI(title="alertgate", docs_url=None, redoc_url=None)
    # auth is a bearer token, never a cookie, so cross-origin reads leak nothing
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["authorization", "content-type"],
    )

    def require_token(request: Request) -> None:
        token = gateway.config.api_token
        if token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or wrong token")

    guarded = [Depends(require_token)]

    @app.exception_handler(UnknownEntity)
    async def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"error": "not_found", "detail": str(exc)})

    @app.exception_handler(DuplicateFeedback)
    async def _duplicate(request, exc):
        return JSONResponse(status_code=409, content={"error": "duplicate", "detail": str(exc)})

    @app.exception_handler(EventValidationError)
    async def _invalid_event(request, exc):
        return JSONResponse(
            status_code=400,
            content={"error": "validation_failed", "issues": exc.report()},
        )

    @app.exception_handler(GatewayError)
    async def _domain(request, exc):
        return JSONResponse(status_code=409, content={"error": "conflict", "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value(request, exc):
        return JSONResponse(status_code=400, content={"error": "invalid", "detail": str(exc)})

    # ---------------------------------------------------------------- events

    @app.post(f"{API_PREFIX}/events", status_code=202, dependencies=guarded)
    async def post_event(request: Request):
        doc = await _json_body(request)
        if not isinstance(doc, Mapping):
            raise _bad_request("event must be a JSON object")
        event = gateway.submit_event(doc, clock.now())
        return {"event_id": event.event_id, "received_at": format_ts(event.received_at)}

    # ----------------------------------------------------------------- rules

    @app.get(f"{API_PREFIX}/rules", dependencies=guarded)
    async def get_rules(user: str | None = Query(default=None)):
        return {"rules": [r.to_dict() for r in gateway.list_rules(user)]}

    @app.post(f"{API_PREFIX}/rules", status_code=201, dependencies=guarded)
    async def post_rule(request: Request):
        doc = await _json_body(request)
        user_id = doc.get("user_id")
        if not user_id:
            raise _bad_request("user_id is required")
        rule = gateway.add_rule(
            user_id,
            RuleMatch.from_dict(doc.get("match") or {}),
            RuleAssign.from_dict(doc.get("assign") or {}),
            clock.now(),
            enabled=bool(doc.get("enabled", True)),
        )
        return rule.to_dict()

    @app.put(f"{API_PREFIX}/rules/{{rule_id}}", dependencies=guarded)
    async def put_rule(rule_id: str, request: Request):
        doc = await _json_body(request)
        return gateway.update_rule(rule_id, doc, clock.now()).to_dict()

    @app.delete(f"{API_PREFIX}/rules/{{rule_id}}", status_code=204, dependencies=guarded)
    async def delete_rule(rule_id: str):
        gateway.delete_rule(rule_id, clock.now())

    @app.get(f"{API_PREFIX}/recommendations", dependencies=guarded)
    async def get_recommendations(user: str):
        return {"recommendations": [r.to_dict() for r in gateway.recommendations(user)]}

    # --------------------------------------------------------- notifications

    @app.get(f"{API_PREFIX}/notifications", dependencies=guarded)
    async def get_notifications(
        user: str | None = Query(default=None), limit: int = Query(default=100)
    ):
        out = []
        with gateway.lock:
            for n in gateway.list_notifications(user, limit):
                doc = n.to_dict()
                doc["feedback"] = (
                    gateway.feedback[n.notification_id].signal.value
                    if n.notification_id in gateway.feedback
                    else None
                )
                out.append(doc)
        return {"notifications": out}

    @app.post(
        f"{API_PREFIX}/notifications/{{notification_id}}/ack", dependencies=guarded
    )
    async def post_ack(notification_id: str):
        gateway.acknowledge(notification_id, clock.now())
        return {"notification_id": notification_id, "acknowledged": True}

    @app.post(f"{API_PREFIX}/feedback", dependencies=guarded)
    async def post_feedback(request: Request):
        doc = await _json_body(request)
        at = _parse_at(doc, "at", clock.now())
        if "decision_id" in doc:
            # missed-alert report against a suppress decision
            gateway.report_missed_alert(doc["decision_id"], at)
            return {"decision_id": doc["decision_id"], "recorded": True}
        nid = doc.get("notification_id")
        if not nid:
            raise _bad_request("notification_id or decision_id is required")
        try:
            kind = SignalKind(doc.get("signal"))
        except ValueError:
            raise _bad_request(f"unknown signal {doc.get('signal')!r}")
        signal = gateway.submit_feedback(nid, kind, at)
        return {
            "notification_id": nid,
            "signal": signal.signal.value,
            "observed_at": format_ts(signal.observed_at),
        }

    # ----------------------------------------------------------------- users

    def _prefs_doc(user_id: str) -> dict:
        state = gateway.users.get(user_id)
        if state is None:
            raise UnknownEntity(f"user {user_id}")
        doc = state.prefs.to_dict()
        doc["timezone_offset_minutes"] = state.histogram.timezone_offset_minutes
        return doc

    @app.get(f"{API_PREFIX}/users/{{user_id}}/preferences", dependencies=guarded)
    async def get_preferences(user_id: str):
        with gateway.lock:
            return _prefs_doc(user_id)

    @app.put(f"{API_PREFIX}/users/{{user_id}}/preferences", dependencies=guarded)
    async def put_preferences(user_id: str, request: Request):
        doc = await _json_body(request)
        with gateway.lock:
            current = (
                gateway.users[user_id].prefs
                if user_id in gateway.users
                else usr.Preferences(user_id=user_id)
            )
            hours = doc.get(
                "digest_window_hours",
                current.digest_window_length.total_seconds() / 3600.0
                if current.digest_window_length is not None
                else None,
            )
            prefs = usr.Preferences(
                user_id=user_id,
                channel_order=(
                    tuple(Channel.from_dict(c) for c in doc["channel_order"])
                    if "channel_order" in doc
                    else current.channel_order
                ),
                quiet_hours=(
                    frozenset(int(h) for h in doc["quiet_hours"])
                    if "quiet_hours" in doc
                    else current.quiet_hours
                ),
                digest_window_length=(
                    timedelta(hours=float(hours)) if hours is not None else None
                ),
                availability_threshold=float(
                    doc.get("availability_threshold", current.availability_threshold)
                ),
            )
            gateway.set_preferences(
                user_id, prefs, clock.now(), doc.get("timezone_offset_minutes")
            )
            return _prefs_doc(user_id)

    @app.get(f"{API_PREFIX}/users/{{user_id}}/availability", dependencies=guarded)
    async def get_availability(user_id: str):
        with gateway.lock:
            state = gateway.users.get(user_id)
            if state is None:
                raise UnknownEntity(f"user {user_id}")
            return {
                "user_id": user_id,
                "timezone_offset_minutes": state.histogram.timezone_offset_minutes,
                "scores": [round(s, 6) for s in usr.all_scores(state.histogram)],
            }

    # ------------------------------------------------------ decisions/policy

    @app.get(f"{API_PREFIX}/decisions", dependencies=guarded)
    async def get_decisions(
        alert_id: str | None = Query(default=None),
        user: str | None = Query(default=None),
        since: str | None = Query(default=None),
    ):
        since_at = parse_ts(since) if since else None
        return {
            "decisions": [
                d.to_dict() for d in gateway.list_decisions(alert_id, user, since_at)
            ]
        }

    @app.get(f"{API_PREFIX}/policy", dependencies=guarded)
    async def get_policy(user: str):
        with gateway.lock:
            state = gateway.users.get(user)
            if state is None:
                raise UnknownEntity(f"user {user}")
            return state.policy.to_dict()

    # ------------------------------------------------------------------ misc

    @app.get(f"{API_PREFIX}/metrics", dependencies=guarded)
    async def get_metrics():
        return gateway.metrics()

    @app.get(f"{API_PREFIX}/health")
    async def get_health():
        with gateway.lock:
            return {
                "status": "ok",
                "now": format_ts(clock.now()),
                "users": len(gateway.users),
                "store_records": gateway.store.last_seq,
            }

    return app
