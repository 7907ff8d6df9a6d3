"""Alert generation and grooming.

Turns events into classified alerts through per-user rules and a taxonomy of
default assignments, clusters similar alerts, proposes rule candidates from
unmatched traffic, and extrapolates pending volume ahead of a deadline.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from datetime import datetime
from typing import Any, Iterable, Mapping, Sequence

from .model import Alert, Criticality, DurationKind, Event, Severity

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RuleMatch:
    """Total predicate over events. Unset parts match anything."""

    source: str | None = None
    event_type: str | None = None
    tags_any: frozenset[str] = frozenset()
    payload_eq: Mapping[str, Any] = field(default_factory=dict)

    def matches(self, event: Event) -> bool:
        if self.source is not None and event.source_id != self.source:
            return False
        if self.event_type is not None and event.event_type != self.event_type:
            return False
        if self.tags_any and not (self.tags_any & event.tags):
            return False
        for key, expected in self.payload_eq.items():
            if event.payload.get(key) != expected:
                return False
        return True

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.source is not None:
            doc["source"] = self.source
        if self.event_type is not None:
            doc["type"] = self.event_type
        if self.tags_any:
            doc["tags_any"] = sorted(self.tags_any)
        if self.payload_eq:
            doc["payload_eq"] = dict(self.payload_eq)
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RuleMatch":
        return cls(
            source=doc.get("source"),
            event_type=doc.get("type"),
            tags_any=frozenset(doc.get("tags_any") or ()),
            payload_eq=dict(doc.get("payload_eq") or {}),
        )


@dataclass(frozen=True)
class RuleAssign:
    """Dimension assignments a rule applies; unset parts defer to the taxonomy."""

    severity: Severity | None = None
    criticality: Criticality | None = None
    urgency: float | None = None
    duration: DurationKind | None = None

    def __post_init__(self) -> None:
        if self.urgency is not None and not 0.0 <= self.urgency <= 1.0:
            raise ValueError(f"assigned urgency must be in [0, 1], got {self.urgency}")

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.severity is not None:
            doc["severity"] = self.severity.value
        if self.criticality is not None:
            doc["criticality"] = self.criticality.value
        if self.urgency is not None:
            doc["urgency"] = self.urgency
        if self.duration is not None:
            doc["duration"] = self.duration.value
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "RuleAssign":
        return cls(
            severity=Severity(doc["severity"]) if doc.get("severity") else None,
            criticality=Criticality(doc["criticality"]) if doc.get("criticality") else None,
            urgency=doc.get("urgency"),
            duration=DurationKind(doc["duration"]) if doc.get("duration") else None,
        )


class RuleOrigin:
    USER = "user"
    RECOMMENDATION = "recommendation"


@dataclass(frozen=True)
class AlertRule:
    rule_id: str
    user_id: str
    match: RuleMatch
    assign: RuleAssign
    enabled: bool = True
    created_by: str = RuleOrigin.USER

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "user_id": self.user_id,
            "match": self.match.to_dict(),
            "assign": self.assign.to_dict(),
            "enabled": self.enabled,
            "created_by": self.created_by,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AlertRule":
        return cls(
            rule_id=doc["rule_id"],
            user_id=doc["user_id"],
            match=RuleMatch.from_dict(doc.get("match") or {}),
            assign=RuleAssign.from_dict(doc.get("assign") or {}),
            enabled=bool(doc.get("enabled", True)),
            created_by=doc.get("created_by", RuleOrigin.USER),
        )


def generate_alert(
    event: Event, rules: Sequence[AlertRule], alert_id: str
) -> Alert | None:
    """First enabled matching rule wins; no match means no alert.

    The returned alert may still have unset dimensions when the winning rule
    assigned only some; classify_alert fills the rest.
    """
    for rule in rules:
        if not rule.enabled:
            continue
        if rule.match.matches(event):
            body = _default_body(event)
            return Alert(
                alert_id=alert_id,
                event_id=event.event_id,
                user_id=rule.user_id,
                severity=rule.assign.severity,
                criticality=rule.assign.criticality,
                urgency=rule.assign.urgency,
                duration=rule.assign.duration,
                cluster_key=event.cluster_key(),
                tags=event.tags,
                body=body,
                created_at=event.received_at,
            )
    return None


def _default_body(event: Event) -> str:
    message = event.payload.get("message")
    if isinstance(message, str) and message:
        return message
    return event.event_type


_FALLBACK = RuleAssign(
    severity=Severity.INFO,
    criticality=Criticality.NON_CRITICAL,
    urgency=0.5,
    duration=DurationKind.ONE_SHOT,
)


class Taxonomy:
    """Default dimension assignments keyed by event_type prefix.

    Longest matching prefix wins; anything unmatched falls back to
    (info, non_critical, 0.5, one_shot).
    """

    def __init__(self, table: Mapping[str, RuleAssign] | None = None) -> None:
        self._table = dict(table or {})

    def to_dict(self) -> dict:
        return {prefix: assign.to_dict() for prefix, assign in sorted(self._table.items())}

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Taxonomy":
        return cls({prefix: RuleAssign.from_dict(a) for prefix, a in doc.items()})

    def lookup(self, event_type: str) -> tuple[RuleAssign, bool]:
        """Returns (assignment, known). Unknown types get the fallback."""
        best: str | None = None
        for prefix in self._table:
            if event_type.startswith(prefix):
                if best is None or len(prefix) > len(best):
                    best = prefix
        if best is None:
            return _FALLBACK, False
        return self._table[best], True

    def classify(self, alert: Alert, event_type: str | None = None) -> tuple[Alert, str | None]:
        """Fill unset dimensions from the table.

        Returns the completed alert and an optional trace note when the type
        was unknown to the table. event_type defaults to the part of the
        cluster_key after the source prefix.
        """
        if alert.is_classified():
            return alert, None
        if event_type is None:
            _, _, event_type = alert.cluster_key.partition("/")
        assign, known = self.lookup(event_type)
        note = None if known else f"taxonomy.unknown_type:{event_type}"
        filled = replace(
            alert,
            severity=alert.severity or (assign.severity or _FALLBACK.severity),
            criticality=alert.criticality or (assign.criticality or _FALLBACK.criticality),
            urgency=alert.urgency if alert.urgency is not None else (
                assign.urgency if assign.urgency is not None else _FALLBACK.urgency
            ),
            duration=alert.duration or (assign.duration or _FALLBACK.duration),
        )
        return filled, note


def default_taxonomy() -> Taxonomy:
    """Built-in prefix table for common event type vocabularies."""
    return Taxonomy(
        {
            "error": RuleAssign(Severity.ERROR, Criticality.NON_CRITICAL, 0.7, DurationKind.ONE_SHOT),
            "fail": RuleAssign(Severity.ERROR, Criticality.NON_CRITICAL, 0.7, DurationKind.ONE_SHOT),
            "warn": RuleAssign(Severity.WARNING, Criticality.NON_CRITICAL, 0.5, DurationKind.ONE_SHOT),
            "deadline": RuleAssign(Severity.WARNING, Criticality.NON_CRITICAL, 0.5, DurationKind.ONE_SHOT),
            "heartbeat": RuleAssign(Severity.NOT_AVAILABLE, Criticality.NON_CRITICAL, 0.2, DurationKind.REPEATED),
            "offline": RuleAssign(Severity.NOT_AVAILABLE, Criticality.NON_CRITICAL, 0.2, DurationKind.ONE_SHOT),
        }
    )


def similarity(a: Alert, b: Alert) -> float:
    """1.0 on equal cluster_key, else Jaccard over tags (empty sets give 0)."""
    if a.cluster_key == b.cluster_key:
        return 1.0
    union = a.tags | b.tags
    if not union:
        return 0.0
    return len(a.tags & b.tags) / len(union)


@dataclass(frozen=True)
class AlertCluster:
    cluster_id: str
    member_alert_ids: tuple[str, ...]
    representative: str
    tag_signature: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "cluster_id": self.cluster_id,
            "member_alert_ids": list(self.member_alert_ids),
            "representative": self.representative,
            "tag_signature": sorted(self.tag_signature),
        }


def cluster_alerts(alerts: Sequence[Alert], threshold: float = 0.5) -> list[AlertCluster]:
    """Single-linkage grouping: transitive closure of pairs at or above the
    threshold. Representatives are the earliest members by created_at and the
    output is ordered by representative time."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if not alerts:
        return []

    parent = list(range(len(alerts)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for i in range(len(alerts)):
        for j in range(i + 1, len(alerts)):
            if similarity(alerts[i], alerts[j]) >= threshold:
                union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(len(alerts)):
        groups.setdefault(find(i), []).append(i)

    def sort_key(i: int) -> tuple:
        return (alerts[i].created_at, alerts[i].alert_id)

    keyed = []
    for members in groups.values():
        ordered = sorted(members, key=sort_key)
        rep = alerts[ordered[0]]
        signature: frozenset[str] = frozenset()
        for i in ordered:
            signature = signature | alerts[i].tags
        cluster = AlertCluster(
            cluster_id=f"cl-{rep.alert_id}",
            member_alert_ids=tuple(alerts[i].alert_id for i in ordered),
            representative=rep.alert_id,
            tag_signature=signature,
        )
        keyed.append((sort_key(ordered[0]), cluster))
    keyed.sort(key=lambda pair: pair[0])
    return [cluster for _, cluster in keyed]


def recommend_rules(
    user_id: str,
    unmatched: Iterable[Event],
    taxonomy: Taxonomy,
    min_support: int = 5,
) -> list[AlertRule]:
    """Frequency-based candidates from events that produced no alert.

    Any (source, type) pair seen at least min_support times becomes a disabled
    candidate rule with the taxonomy's default assignment for the type.
    Candidates never auto-enable; the user opts in.
    """
    counts: dict[tuple[str, str], int] = {}
    for event in unmatched:
        pair = (event.source_id, event.event_type)
        counts[pair] = counts.get(pair, 0) + 1

    qualifying = sorted(
        (pair for pair, n in counts.items() if n >= min_support),
        key=lambda pair: (-counts[pair], pair),
    )
    candidates = []
    for source, event_type in qualifying:
        assign, _ = taxonomy.lookup(event_type)
        candidates.append(
            AlertRule(
                rule_id=f"rec-{user_id}-{source}-{event_type}",
                user_id=user_id,
                match=RuleMatch(source=source, event_type=event_type),
                assign=assign,
                enabled=False,
                created_by=RuleOrigin.RECOMMENDATION,
            )
        )
    return candidates


@dataclass(frozen=True)
class PendingEstimate:
    """Expected remaining submissions before a deadline, with a trace note
    when history was empty."""

    count: int
    note: str | None = None


def estimate_pending(
    history: Sequence[int], deadline: datetime, now: datetime
) -> PendingEstimate:
    """Poisson-mean extrapolation: round(mean daily count * days remaining)."""
    if not history:
        return PendingEstimate(0, "pending.empty_history")
    days_left = (deadline - now).total_seconds() / 86400.0
    if days_left <= 0:
        return PendingEstimate(0)
    lam = sum(history) / len(history)
    return PendingEstimate(max(0, round(lam * days_left)))
