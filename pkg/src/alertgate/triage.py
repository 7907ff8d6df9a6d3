"""Issue / suppress / aggregate decisions and digest window bookkeeping.

Three layers in fixed precedence. The safeguard layer issues every critical
alert no matter what. The dedup layer suppresses repeated non-critical noise
that fired again shortly after the same cluster already got through. Only the
residual reaches layer three: a deterministic baseline rule table, or the
learned policy when the gateway runs in learned mode. Learned weights can
never override the first two layers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from typing import Callable, Mapping, Sequence

from .clock import format_ts, parse_ts
from .errors import UnclassifiedAlert
from .learning import PolicyState, select_action
from .model import (
    ActionKind,
    Alert,
    Criticality,
    DurationKind,
    PolicyKind,
    Severity,
    TraceEntry,
    TriageDecision,
    severity_rank,
)

DEFAULT_WINDOW_LENGTH = timedelta(hours=4)
DEFAULT_DEDUP_WINDOW = timedelta(minutes=30)
URGENCY_ISSUE_THRESHOLD = 0.8
FATIGUE_SCALE = 10.0


class WindowState:
    OPEN = "open"
    FLUSHED = "flushed"


@dataclass(frozen=True)
class DigestWindow:
    window_id: str
    user_id: str
    cluster_key: str
    opened_at: datetime
    deadline: datetime
    member_alert_ids: tuple[str, ...] = ()
    state: str = WindowState.OPEN

    def with_member(self, alert_id: str) -> "DigestWindow":
        if self.state != WindowState.OPEN:
            raise ValueError("flushed windows are immutable")
        return replace(self, member_alert_ids=self.member_alert_ids + (alert_id,))

    def flushed(self) -> "DigestWindow":
        return replace(self, state=WindowState.FLUSHED)

    def to_dict(self) -> dict:
        return {
            "window_id": self.window_id,
            "user_id": self.user_id,
            "cluster_key": self.cluster_key,
            "opened_at": format_ts(self.opened_at),
            "deadline": format_ts(self.deadline),
            "member_alert_ids": list(self.member_alert_ids),
            "state": self.state,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DigestWindow":
        return cls(
            window_id=doc["window_id"],
            user_id=doc["user_id"],
            cluster_key=doc["cluster_key"],
            opened_at=parse_ts(doc["opened_at"]),
            deadline=parse_ts(doc["deadline"]),
            member_alert_ids=tuple(doc.get("member_alert_ids", ())),
            state=doc.get("state", WindowState.OPEN),
        )


def window_deadline(opened_at: datetime, length: timedelta, slot: datetime) -> datetime:
    """Full-length deadline, shortened to the user's next available slot when
    that slot lands strictly inside the window. A slot at or before opening
    means the user is reachable now and the window runs its whole course;
    a slot past the window end cannot stretch it."""
    full = opened_at + length
    if opened_at < slot < full:
        return slot
    return full


def extract_features(
    alert: Alert, availability: float, interruptions_last_hour: int
) -> tuple[float, ...]:
    """Fixed 6-feature context: bias, scaled severity, urgency, availability,
    fatigue (interruptions clamped into [0,1]), repeated flag."""
    if not alert.is_classified():
        raise UnclassifiedAlert(alert.alert_id)
    fatigue = min(interruptions_last_hour / FATIGUE_SCALE, 1.0)
    return (
        1.0,
        severity_rank(alert.severity) / 3.0,
        alert.urgency,
        availability,
        fatigue,
        1.0 if alert.duration is DurationKind.REPEATED else 0.0,
    )


def baseline_action(
    alert: Alert, urgency_threshold: float = URGENCY_ISSUE_THRESHOLD
) -> tuple[ActionKind, tuple[TraceEntry, ...]]:
    """Deterministic rule table over the residual mass."""
    if alert.severity is Severity.ERROR:
        return ActionKind.ISSUE, (("baseline.error_severity", 1.0),)
    if alert.urgency >= urgency_threshold:
        return ActionKind.ISSUE, (("baseline.urgency_threshold", alert.urgency),)
    if alert.severity is Severity.NOT_AVAILABLE:
        return ActionKind.SUPPRESS, (("baseline.not_available", 1.0),)
    return ActionKind.AGGREGATE, (("baseline.residual", 1.0),)


def decide(
    alert: Alert,
    mode: PolicyKind,
    now: datetime,
    *,
    decision_id: str,
    features: Sequence[float],
    last_cluster_activity: datetime | None,
    policy: PolicyState,
    allocate_window: Callable[[], str],
    dedup_window: timedelta = DEFAULT_DEDUP_WINDOW,
    urgency_threshold: float = URGENCY_ISSUE_THRESHOLD,
) -> tuple[TriageDecision, PolicyState]:
    """Run the three layers for one classified alert.

    last_cluster_activity is the most recent time this (user, cluster_key)
    produced an issue or aggregate decision. allocate_window is called only
    when the outcome is aggregate and returns the open window's id, creating
    one as a side effect if none is open. Returns the decision and the policy
    state (draw counter advanced only when the learned layer actually ran).
    """
    if not alert.is_classified():
        raise UnclassifiedAlert(alert.alert_id)
    if mode not in (PolicyKind.BASELINE, PolicyKind.LEARNED):
        raise ValueError(f"mode must be baseline or learned, got {mode}")

    feature_vector = tuple(features)

    if alert.criticality is Criticality.CRITICAL:
        return (
            TriageDecision(
                decision_id=decision_id,
                alert_id=alert.alert_id,
                action=ActionKind.ISSUE,
                window_id=None,
                policy_kind=PolicyKind.SAFEGUARD,
                feature_vector=feature_vector,
                trace=(("safeguard.critical", 1.0),),
                decided_at=now,
            ),
            policy,
        )

    if (
        alert.duration is DurationKind.REPEATED
        and last_cluster_activity is not None
        and timedelta(0) <= now - last_cluster_activity <= dedup_window
    ):
        age_minutes = (now - last_cluster_activity).total_seconds() / 60.0
        return (
            TriageDecision(
                decision_id=decision_id,
                alert_id=alert.alert_id,
                action=ActionKind.SUPPRESS,
                window_id=None,
                policy_kind=PolicyKind.BASELINE,
                feature_vector=feature_vector,
                trace=(("dedup.recent_cluster_activity_minutes", age_minutes),),
                decided_at=now,
            ),
            policy,
        )

    if mode is PolicyKind.BASELINE:
        action, trace = baseline_action(alert, urgency_threshold)
        policy_kind = PolicyKind.BASELINE
    else:
        action, trace, policy = select_action(policy, feature_vector)
        policy_kind = PolicyKind.LEARNED

    window_id = allocate_window() if action is ActionKind.AGGREGATE else None
    return (
        TriageDecision(
            decision_id=decision_id,
            alert_id=alert.alert_id,
            action=action,
            window_id=window_id,
            policy_kind=policy_kind,
            feature_vector=feature_vector,
            trace=trace,
            decided_at=now,
        ),
        policy,
    )


def due_windows(windows: Sequence[DigestWindow], now: datetime) -> list[DigestWindow]:
    """Open windows whose deadline has arrived, in deadline order."""
    due = [w for w in windows if w.state == WindowState.OPEN and w.deadline <= now]
    due.sort(key=lambda w: (w.deadline, w.window_id))
    return due
