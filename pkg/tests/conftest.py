from __future__ import annotations

from datetime import datetime, timezone

import pytest

from alertgate.config import GatewayConfig
from alertgate.gateway import Gateway
from alertgate.model import (
    Alert,
    Criticality,
    DurationKind,
    Event,
    Severity,
)
from alertgate.store import MemoryStore

# 2024-01-01 is a Monday, so hour-of-week bins line up with the calendar
# without any offset arithmetic in the tests.
T0 = datetime(2024, 1, 1, 9, 0, tzinfo=timezone.utc)


def make_event(
    source: str = "node1",
    event_type: str = "disk.full",
    at: datetime = T0,
    tags: tuple[str, ...] = (),
    payload: dict | None = None,
    event_id: str = "ev-00000001",
) -> Event:
    return Event(
        event_id=event_id,
        source_id=source,
        event_type=event_type,
        tags=frozenset(tags),
        payload=payload or {},
        occurred_at=at,
        received_at=at,
    )


def make_alert(
    alert_id: str = "al-00000001",
    user_id: str = "u1",
    severity: Severity | None = Severity.ERROR,
    criticality: Criticality | None = Criticality.NON_CRITICAL,
    urgency: float | None = 0.5,
    duration: DurationKind | None = DurationKind.ONE_SHOT,
    source: str = "node1",
    event_type: str = "disk.full",
    tags: tuple[str, ...] = (),
    body: str = "disk full",
    at: datetime = T0,
) -> Alert:
    return Alert(
        alert_id=alert_id,
        event_id="ev-00000001",
        user_id=user_id,
        severity=severity,
        criticality=criticality,
        urgency=urgency,
        duration=duration,
        cluster_key=f"{source}/{event_type}",
        tags=frozenset(tags),
        body=body,
        created_at=at,
    )


@pytest.fixture
def store() -> MemoryStore:
    return MemoryStore()


@pytest.fixture
def gateway(store: MemoryStore) -> Gateway:
    return Gateway(GatewayConfig(), store)
