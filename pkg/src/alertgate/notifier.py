"""Rendering, dispatch scheduling, and channel delivery.

Rendering is a fixed template, so the same notification always produces the
same bytes. Channel adapters are deliberately small: a console outbox list,
an append-to-file mail stub, and a generic outbound webhook. Real transports
would plug in behind the same deliver() contract.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Callable, Mapping, Sequence

from .clock import format_ts, parse_ts
from .model import (
    Alert,
    Channel,
    ChannelKind,
    Notification,
    NotificationKind,
    PolicyKind,
    Severity,
    severity_rank,
)

log = logging.getLogger(__name__)

DEFAULT_ACK_TIMEOUT = timedelta(minutes=15)
MAX_ATTEMPTS = 3


class Outcome:
    SENT = "sent"
    CHANNEL_ERROR = "channel_error"


@dataclass(frozen=True)
class DispatchRecord:
    notification_id: str
    attempt: int
    channel: Channel
    sent_at: datetime
    outcome: str
    detail: str | None = None

    def __post_init__(self) -> None:
        if self.attempt < 1:
            raise ValueError("attempts are numbered from 1")

    def to_dict(self) -> dict:
        return {
            "notification_id": self.notification_id,
            "attempt": self.attempt,
            "channel": self.channel.to_dict(),
            "sent_at": format_ts(self.sent_at),
            "outcome": self.outcome,
            "detail": self.detail,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "DispatchRecord":
        return cls(
            notification_id=doc["notification_id"],
            attempt=int(doc["attempt"]),
            channel=Channel.from_dict(doc["channel"]),
            sent_at=parse_ts(doc["sent_at"]),
            outcome=doc["outcome"],
            detail=doc.get("detail"),
        )


def _split_key(cluster_key: str) -> tuple[str, str]:
    source, _, event_type = cluster_key.partition("/")
    return source, event_type


def render_single_body(alert: Alert) -> str:
    source, event_type = _split_key(alert.cluster_key)
    return f"[{alert.severity.value.upper()}] {event_type}: {alert.body} ({source})"


def render_digest_body(alerts: Sequence[Alert]) -> str:
    """Header with the total, then one line per event type with its count.

    Types are ordered by descending count, ties alphabetically, and each line
    quotes the earliest member's body.
    """
    groups: dict[str, list[Alert]] = {}
    for alert in alerts:
        _, event_type = _split_key(alert.cluster_key)
        groups.setdefault(event_type, []).append(alert)
    lines = [f"{len(alerts)} alerts"]
    for event_type in sorted(groups, key=lambda t: (-len(groups[t]), t)):
        members = groups[event_type]
        lines.append(f"- {event_type} ({len(members)}): {members[0].body}")
    return "\n".join(lines)


def render(notification: Notification, channel: Channel) -> str:
    """Final text for a channel. The webhook payload is built separately by
    webhook_document; its body field carries this same text."""
    return notification.body


def digest_severity(alerts: Sequence[Alert]) -> Severity:
    return max((a.severity for a in alerts), key=severity_rank)


def webhook_document(
    notification: Notification, severity: Severity, sent_at: datetime
) -> dict:
    # Field names are part of the outbound wire contract; do not rename.
    return {
        "notification_id": notification.notification_id,
        "user": notification.user_id,
        "kind": notification.kind.value,
        "severity": severity.value,
        "body": notification.body,
        "alerts": list(notification.alert_ids),
        "sent_at": format_ts(sent_at),
    }


def schedule_dispatch(
    kind: NotificationKind,
    policy_kind: PolicyKind,
    now: datetime,
    slot: datetime,
    window_deadline: datetime | None = None,
) -> datetime:
    """When to send: safeguard-issued goes out immediately, singles wait for
    the user's next available slot, digests aim for the slot but never blow
    past their window deadline. Nothing schedules into the past."""
    if policy_kind is PolicyKind.SAFEGUARD:
        return now
    if kind is NotificationKind.DIGEST:
        deadline = window_deadline if window_deadline is not None else slot
        return max(now, min(deadline, slot))
    return max(now, slot)


class ChannelError(Exception):
    def __init__(self, detail: str) -> None:
        super().__init__(detail)
        self.detail = detail


class ConsoleAdapter:
    """Accumulates rendered lines in memory; the inbox surface reads the
    notification store directly, this exists for inspection and tests."""

    def __init__(self) -> None:
        self.outbox: list[str] = []

    def deliver(self, notification: Notification, severity: Severity, sent_at: datetime) -> None:
        self.outbox.append(f"{format_ts(sent_at)} {notification.user_id} {notification.body}")


class EmailFileAdapter:
    def deliver(
        self,
        notification: Notification,
        severity: Severity,
        sent_at: datetime,
        path: str,
    ) -> None:
        try:
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(
                    f"To: {notification.user_id}\n"
                    f"Date: {format_ts(sent_at)}\n"
                    f"Subject: [{severity.value}] {notification.kind.value} notification\n\n"
                    f"{notification.body}\n---\n"
                )
        except OSError as exc:
            raise ChannelError(f"file: {exc}") from exc


class WebhookAdapter:
    """POSTs the outbound JSON document. The poster is injectable so tests
    never need a live endpoint."""

    def __init__(self, post_fn: Callable[[str, dict], None] | None = None) -> None:
        self._post = post_fn or self._default_post

    @staticmethod
    def _default_post(url: str, document: dict) -> None:
        import requests

        response = requests.post(url, json=document, timeout=10.0)
        response.raise_for_status()

    def deliver(
        self,
        notification: Notification,
        severity: Severity,
        sent_at: datetime,
        url: str,
    ) -> None:
        document = webhook_document(notification, severity, sent_at)
        try:
            self._post(url, document)
        except Exception as exc:
            raise ChannelError(f"connect: {exc}") from exc


class AdapterSet:
    """One instance of each adapter, routed by channel kind."""

    def __init__(self, webhook_post_fn: Callable[[str, dict], None] | None = None) -> None:
        self.console = ConsoleAdapter()
        self.email = EmailFileAdapter()
        self.webhook = WebhookAdapter(webhook_post_fn)

    def deliver(
        self,
        notification: Notification,
        channel: Channel,
        severity: Severity,
        sent_at: datetime,
    ) -> None:
        if channel.kind is ChannelKind.CONSOLE:
            self.console.deliver(notification, severity, sent_at)
        elif channel.kind is ChannelKind.EMAIL_FILE:
            self.email.deliver(notification, severity, sent_at, channel.path)
        elif channel.kind is ChannelKind.WEBHOOK:
            self.webhook.deliver(notification, severity, sent_at, channel.url)
        else:
            raise ChannelError(f"unknown channel kind {channel.kind}")
