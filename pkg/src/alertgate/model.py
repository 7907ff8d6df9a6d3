"""Core domain vocabulary: events, alerts, notifications, decisions, feedback.

Every type here is an immutable value after construction and can be shared
freely between threads. Mutation happens by building a replacement with
``dataclasses.replace``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from enum import Enum
from typing import Any, Mapping
from urllib.parse import urlparse

from .clock import floor_ms, format_ts, parse_ts
from .errors import EventValidationError, ValidationIssue


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"
    NOT_AVAILABLE = "not_available"


_SEVERITY_RANK = {
    Severity.ERROR: 3,
    Severity.WARNING: 2,
    Severity.INFO: 1,
    Severity.NOT_AVAILABLE: 0,
}


def severity_rank(severity: Severity) -> int:
    """Numeric encoding of the severity order: higher means more severe."""
    return _SEVERITY_RANK[severity]


class Criticality(str, Enum):
    CRITICAL = "critical"
    NON_CRITICAL = "non_critical"


class DurationKind(str, Enum):
    REPEATED = "repeated"
    ONE_SHOT = "one_shot"


class ChannelKind(str, Enum):
    CONSOLE = "console"
    WEBHOOK = "webhook"
    EMAIL_FILE = "email_file"


@dataclass(frozen=True)
class Channel:
    """Delivery target. Console feeds the web inbox, webhook posts JSON to a
    URL, email_file appends rendered text to a local file."""

    kind: ChannelKind
    url: str | None = None
    path: str | None = None

    def __post_init__(self) -> None:
        if self.kind is ChannelKind.WEBHOOK:
            parsed = urlparse(self.url or "")
            if not parsed.scheme or not parsed.netloc:
                raise ValueError(f"webhook channel needs an absolute URL, got {self.url!r}")
        if self.kind is ChannelKind.EMAIL_FILE and not self.path:
            raise ValueError("email_file channel needs a non-empty path")

    @classmethod
    def console(cls) -> "Channel":
        return cls(ChannelKind.CONSOLE)

    @classmethod
    def webhook(cls, url: str) -> "Channel":
        return cls(ChannelKind.WEBHOOK, url=url)

    @classmethod
    def email_file(cls, path: str) -> "Channel":
        return cls(ChannelKind.EMAIL_FILE, path=path)

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind.value}
        if self.url is not None:
            doc["url"] = self.url
        if self.path is not None:
            doc["path"] = self.path
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Channel":
        return cls(ChannelKind(doc["kind"]), url=doc.get("url"), path=doc.get("path"))


@dataclass(frozen=True)
class DeliveryCycle:
    """Notification cadence: periodic with an interval, or aperiodic."""

    periodic: bool
    interval: timedelta | None = None

    def __post_init__(self) -> None:
        if self.periodic:
            if self.interval is None or self.interval <= timedelta(0):
                raise ValueError("periodic cycle needs a positive interval")
        elif self.interval is not None:
            raise ValueError("aperiodic cycle carries no interval")

    @classmethod
    def aperiodic(cls) -> "DeliveryCycle":
        return cls(periodic=False)

    @classmethod
    def every(cls, interval: timedelta) -> "DeliveryCycle":
        return cls(periodic=True, interval=interval)

    def to_dict(self) -> dict:
        if self.periodic:
            return {"periodic": True, "interval_s": self.interval.total_seconds()}
        return {"periodic": False}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DeliveryCycle":
        if doc.get("periodic"):
            return cls.every(timedelta(seconds=doc["interval_s"]))
        return cls.aperiodic()


def cluster_key(source_id: str, event_type: str) -> str:
    return f"{source_id}/{event_type}"


@dataclass(frozen=True)
class Event:
    """A timestamped observation emitted by a watched system source."""

    event_id: str
    source_id: str
    event_type: str
    tags: frozenset[str]
    payload: Mapping[str, Any]
    occurred_at: datetime
    received_at: datetime

    def cluster_key(self) -> str:
        return cluster_key(self.source_id, self.event_type)

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "source_id": self.source_id,
            "event_type": self.event_type,
            "tags": sorted(self.tags),
            "payload": dict(self.payload),
            "occurred_at": format_ts(self.occurred_at),
            "received_at": format_ts(self.received_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Event":
        return cls(
            event_id=doc["event_id"],
            source_id=doc["source_id"],
            event_type=doc["event_type"],
            tags=frozenset(doc.get("tags", ())),
            payload=dict(doc.get("payload", {})),
            occurred_at=parse_ts(doc["occurred_at"]),
            received_at=parse_ts(doc["received_at"]),
        )


@dataclass(frozen=True)
class Alert:
    """A classified message generated from an event for one user.

    Dimension fields stay ``None`` until assigned by a rule or filled in by
    the taxonomy classifier; triage refuses alerts that still have gaps.
    """

    alert_id: str
    event_id: str
    user_id: str
    severity: Severity | None
    criticality: Criticality | None
    urgency: float | None
    duration: DurationKind | None
    cluster_key: str
    tags: frozenset[str]
    body: str
    created_at: datetime

    def __post_init__(self) -> None:
        if self.urgency is not None and not 0.0 <= self.urgency <= 1.0:
            raise ValueError(f"urgency must be in [0, 1], got {self.urgency}")

    def is_classified(self) -> bool:
        return (
            self.severity is not None
            and self.criticality is not None
            and self.urgency is not None
            and self.duration is not None
        )

    def to_dict(self) -> dict:
        return {
            "alert_id": self.alert_id,
            "event_id": self.event_id,
            "user_id": self.user_id,
            "severity": self.severity.value if self.severity else None,
            "criticality": self.criticality.value if self.criticality else None,
            "urgency": self.urgency,
            "duration": self.duration.value if self.duration else None,
            "cluster_key": self.cluster_key,
            "tags": sorted(self.tags),
            "body": self.body,
            "created_at": format_ts(self.created_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Alert":
        return cls(
            alert_id=doc["alert_id"],
            event_id=doc["event_id"],
            user_id=doc["user_id"],
            severity=Severity(doc["severity"]) if doc.get("severity") else None,
            criticality=Criticality(doc["criticality"]) if doc.get("criticality") else None,
            urgency=doc.get("urgency"),
            duration=DurationKind(doc["duration"]) if doc.get("duration") else None,
            cluster_key=doc["cluster_key"],
            tags=frozenset(doc.get("tags", ())),
            body=doc["body"],
            created_at=parse_ts(doc["created_at"]),
        )


class ActionKind(str, Enum):
    ISSUE = "issue"
    SUPPRESS = "suppress"
    AGGREGATE = "aggregate"


class PolicyKind(str, Enum):
    BASELINE = "baseline"
    LEARNED = "learned"
    SAFEGUARD = "safeguard"


TraceEntry = tuple[str, float]


def trace_to_doc(trace: tuple[TraceEntry, ...]) -> list:
    return [[name, value] for name, value in trace]


def trace_from_doc(doc: list) -> tuple[TraceEntry, ...]:
    return tuple((name, float(value)) for name, value in doc)


@dataclass(frozen=True)
class TriageDecision:
    """The aggregator's verdict for one alert, with an explainable trace."""

    decision_id: str
    alert_id: str
    action: ActionKind
    window_id: str | None
    policy_kind: PolicyKind
    feature_vector: tuple[float, ...]
    trace: tuple[TraceEntry, ...]
    decided_at: datetime

    def __post_init__(self) -> None:
        if self.action is ActionKind.AGGREGATE and not self.window_id:
            raise ValueError("aggregate decisions must reference a digest window")
        if not self.trace:
            raise ValueError("decision trace must not be empty")

    def layer(self) -> str:
        """Name of the layer that fired, taken from the leading trace entry."""
        return self.trace[0][0].split(".", 1)[0]

    def to_dict(self) -> dict:
        return {
            "decision_id": self.decision_id,
            "alert_id": self.alert_id,
            "action": self.action.value,
            "window_id": self.window_id,
            "policy_kind": self.policy_kind.value,
            "feature_vector": list(self.feature_vector),
            "trace": trace_to_doc(self.trace),
            "decided_at": format_ts(self.decided_at),
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TriageDecision":
        return cls(
            decision_id=doc["decision_id"],
            alert_id=doc["alert_id"],
            action=ActionKind(doc["action"]),
            window_id=doc.get("window_id"),
            policy_kind=PolicyKind(doc["policy_kind"]),
            feature_vector=tuple(doc["feature_vector"]),
            trace=trace_from_doc(doc["trace"]),
            decided_at=parse_ts(doc["decided_at"]),
        )


class NotificationKind(str, Enum):
    SINGLE = "single"
    DIGEST = "digest"


@dataclass(frozen=True)
class Notification:
    """A rendered, channel-targeted message with a scheduled dispatch time."""

    notification_id: str
    user_id: str
    kind: NotificationKind
    alert_ids: tuple[str, ...]
    window_id: str | None
    channel: Channel
    body: str
    scheduled_at: datetime
    dispatched_at: datetime | None = None
    acknowledged_at: datetime | None = None

    def __post_init__(self) -> None:
        if not self.alert_ids:
            raise ValueError("notification must reference at least one alert")
        if self.kind is NotificationKind.SINGLE and len(self.alert_ids) != 1:
            raise ValueError("single notification carries exactly one alert")
        if self.kind is NotificationKind.DIGEST:
            if not self.window_id:
                raise ValueError("digest notification must reference its window")
            if len(set(self.alert_ids)) != len(self.alert_ids):
                raise ValueError("digest alert ids must be distinct")
        if self.dispatched_at is not None and self.dispatched_at < self.scheduled_at:
            raise ValueError("dispatched_at precedes scheduled_at")

    def alert_id(self) -> str:
        return self.alert_ids[0]

    def to_dict(self) -> dict:
        return {
            "notification_id": self.notification_id,
            "user_id": self.user_id,
            "kind": self.kind.value,
            "alert_ids": list(self.alert_ids),
            "window_id": self.window_id,
            "channel": self.channel.to_dict(),
            "body": self.body,
            "scheduled_at": format_ts(self.scheduled_at),
            "dispatched_at": format_ts(self.dispatched_at) if self.dispatched_at else None,
            "acknowledged_at": format_ts(self.acknowledged_at) if self.acknowledged_at else None,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Notification":
        return cls(
            notification_id=doc["notification_id"],
            user_id=doc["user_id"],
            kind=NotificationKind(doc["kind"]),
            alert_ids=tuple(doc["alert_ids"]),
            window_id=doc.get("window_id"),
            channel=Channel.from_dict(doc["channel"]),
            body=doc["body"],
            scheduled_at=parse_ts(doc["scheduled_at"]),
            dispatched_at=parse_ts(doc["dispatched_at"]) if doc.get("dispatched_at") else None,
            acknowledged_at=parse_ts(doc["acknowledged_at"]) if doc.get("acknowledged_at") else None,
        )


class SignalKind(str, Enum):
    OPENED_IMMEDIATELY = "opened_immediately"
    OPENED_LATER = "opened_later"
    ACTED = "acted"
    DISMISSED = "dismissed"
    DELETED_UNOPENED = "deleted_unopened"
    MARKED_IRRELEVANT = "marked_irrelevant"
    IGNORED = "ignored"


TERMINAL_SIGNALS = frozenset(SignalKind)

POSITIVE_SIGNALS = frozenset(
    {SignalKind.OPENED_IMMEDIATELY, SignalKind.OPENED_LATER, SignalKind.ACTED}
)

ENGAGED_SIGNALS = frozenset({SignalKind.OPENED_IMMEDIATELY, SignalKind.ACTED})


@dataclass(frozen=True)
class FeedbackSignal:
    """A user reaction to a notification. Ignored is only ever synthesized by
    TTL expiry, so it always arrives with explicit=False."""

    notification_id: str
    signal: SignalKind
    observed_at: datetime
    explicit: bool = True

    def __post_init__(self) -> None:
        if self.signal is SignalKind.IGNORED and self.explicit:
            raise ValueError("ignored signals are synthesized, never explicit")

    def to_dict(self) -> dict:
        return {
            "notification_id": self.notification_id,
            "signal": self.signal.value,
            "observed_at": format_ts(self.observed_at),
            "explicit": self.explicit,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "FeedbackSignal":
        return cls(
            notification_id=doc["notification_id"],
            signal=SignalKind(doc["signal"]),
            observed_at=parse_ts(doc["observed_at"]),
            explicit=bool(doc["explicit"]),
        )


# Wire schema for inbound event documents. Field names are fixed by the
# external interface and must not drift.
_WIRE_SOURCE = "source"
_WIRE_TYPE = "type"
_WIRE_TAGS = "tags"
_WIRE_PAYLOAD = "payload"
_WIRE_OCCURRED = "occurred_at"


def validate_event(raw: Mapping, event_id: str, received_at: datetime) -> Event:
    """Validate an inbound event document and stamp it with the gateway clock.

    Raises EventValidationError carrying every problem found; a rejected
    document never crashes ingestion. Missing occurred_at defaults to
    received_at.
    """
    issues: list[ValidationIssue] = []
    if not isinstance(raw, Mapping):
        raise EventValidationError([ValidationIssue("malformed_document")])

    source = raw.get(_WIRE_SOURCE)
    if source is None:
        issues.append(ValidationIssue("missing_field", _WIRE_SOURCE))
    elif not isinstance(source, str) or not source.strip():
        issues.append(ValidationIssue("empty_source", _WIRE_SOURCE))

    event_type = raw.get(_WIRE_TYPE)
    if event_type is None or not isinstance(event_type, str) or not event_type.strip():
        issues.append(ValidationIssue("missing_field", _WIRE_TYPE))

    tags_raw = raw.get(_WIRE_TAGS, [])
    if not isinstance(tags_raw, (list, tuple)) or any(not isinstance(t, str) for t in tags_raw):
        issues.append(ValidationIssue("malformed_field", _WIRE_TAGS))
        tags_raw = []

    payload_raw = raw.get(_WIRE_PAYLOAD, {})
    if not isinstance(payload_raw, Mapping):
        issues.append(ValidationIssue("malformed_field", _WIRE_PAYLOAD))
        payload_raw = {}

    received_at = floor_ms(received_at)
    occurred_raw = raw.get(_WIRE_OCCURRED)
    occurred_at = received_at
    if occurred_raw is not None:
        try:
            occurred_at = parse_ts(str(occurred_raw))
        except ValueError:
            issues.append(ValidationIssue("malformed_timestamp", _WIRE_OCCURRED))
        else:
            if occurred_at > received_at:
                issues.append(
                    ValidationIssue(
                        "malformed_timestamp", _WIRE_OCCURRED, "occurred_at is in the future"
                    )
                )

    if issues:
        raise EventValidationError(issues)

    return Event(
        event_id=event_id,
        source_id=source.strip(),
        event_type=event_type.strip(),
        tags=frozenset(tags_raw),
        payload=dict(payload_raw),
        occurred_at=occurred_at,
        received_at=received_at,
    )
