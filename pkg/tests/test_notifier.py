from __future__ import annotations

from datetime import timedelta

import pytest

from alertgate.model import Channel, Notification, NotificationKind, PolicyKind, Severity
from alertgate.notifier import (
    AdapterSet,
    ChannelError,
    ConsoleAdapter,
    DispatchRecord,
    EmailFileAdapter,
    WebhookAdapter,
    digest_severity,
    render_digest_body,
    render_single_body,
    schedule_dispatch,
    webhook_document,
)
from tests.conftest import T0, make_alert


def make_notification(kind=NotificationKind.SINGLE, **overrides):
    doc = dict(
        notification_id="nt-00000001",
        user_id="u1",
        kind=kind,
        alert_ids=("al-00000001",),
        window_id=None,
        channel=Channel.console(),
        body="[ERROR] disk.full: disk full (node1)",
        scheduled_at=T0,
    )
    if kind is NotificationKind.DIGEST:
        doc.update(alert_ids=("al-00000001", "al-00000002"), window_id="wd-00000001")
    doc.update(overrides)
    return Notification(**doc)


# -------------------------------------------------------------- rendering


def test_single_body_template():
    alert = make_alert()
    assert render_single_body(alert) == "[ERROR] disk.full: disk full (node1)"


def test_single_body_upcases_severity():
    alert = make_alert(severity=Severity.WARNING, event_type="net.slow", body="latency up")
    assert render_single_body(alert) == "[WARNING] net.slow: latency up (node1)"


def test_digest_body_groups_and_orders():
    alerts = [
        make_alert(alert_id="al-1", event_type="disk.full", body="disk full", at=T0),
        make_alert(
            alert_id="al-2",
            event_type="net.down",
            body="link lost",
            at=T0 + timedelta(minutes=1),
        ),
        make_alert(
            alert_id="al-3",
            event_type="disk.full",
            body="disk still full",
            at=T0 + timedelta(minutes=2),
        ),
        make_alert(
            alert_id="al-4",
            event_type="disk.full",
            body="disk yet fuller",
            at=T0 + timedelta(minutes=3),
        ),
        make_alert(
            alert_id="al-5",
            event_type="net.down",
            body="link lost again",
            at=T0 + timedelta(minutes=4),
        ),
    ]
    body = render_digest_body(alerts)
    assert body.splitlines() == [
        "5 alerts",
        "- disk.full (3): disk full",
        "- net.down (2): link lost",
    ]


def test_digest_body_breaks_count_ties_alphabetically():
    alerts = [
        make_alert(alert_id="al-1", event_type="zed.err", body="z"),
        make_alert(alert_id="al-2", event_type="abc.err", body="a"),
    ]
    assert render_digest_body(alerts).splitlines() == [
        "2 alerts",
        "- abc.err (1): a",
        "- zed.err (1): z",
    ]


def test_rendering_is_pure():
    alert = make_alert()
    assert render_single_body(alert) == render_single_body(alert)
    alerts = [make_alert(alert_id=f"al-{i}") for i in range(3)]
    assert render_digest_body(alerts) == render_digest_body(alerts)


def test_digest_severity_takes_maximum():
    alerts = [
        make_alert(alert_id="al-1", severity=Severity.INFO),
        make_alert(alert_id="al-2", severity=Severity.WARNING),
    ]
    assert digest_severity(alerts) is Severity.WARNING


# ------------------------------------------------------------- scheduling


def test_safeguard_dispatches_immediately():
    slot = T0 + timedelta(hours=3)
    at = schedule_dispatch(NotificationKind.SINGLE, PolicyKind.SAFEGUARD, T0, slot)
    assert at == T0


def test_single_waits_for_slot():
    slot = T0 + timedelta(hours=3)
    at = schedule_dispatch(NotificationKind.SINGLE, PolicyKind.BASELINE, T0, slot)
    assert at == slot


def test_single_never_schedules_into_past():
    slot = T0 - timedelta(hours=1)
    at = schedule_dispatch(NotificationKind.SINGLE, PolicyKind.LEARNED, T0, slot)
    assert at == T0


def test_digest_capped_by_window_deadline():
    slot = T0 + timedelta(hours=9)
    deadline = T0 + timedelta(hours=4)
    at = schedule_dispatch(
        NotificationKind.DIGEST, PolicyKind.BASELINE, T0, slot, window_deadline=deadline
    )
    assert at == deadline


def test_digest_prefers_earlier_slot():
    slot = T0 + timedelta(hours=1)
    deadline = T0 + timedelta(hours=4)
    at = schedule_dispatch(
        NotificationKind.DIGEST, PolicyKind.BASELINE, T0, slot, window_deadline=deadline
    )
    assert at == slot


# --------------------------------------------------------------- adapters


def test_console_outbox_line_format():
    adapter = ConsoleAdapter()
    adapter.deliver(make_notification(), Severity.ERROR, T0)
    assert adapter.outbox == [
        "2024-01-01T09:00:00.000Z u1 [ERROR] disk.full: disk full (node1)"
    ]


def test_webhook_document_wire_keys():
    doc = webhook_document(make_notification(), Severity.ERROR, T0)
    assert doc == {
        "notification_id": "nt-00000001",
        "user": "u1",
        "kind": "single",
        "severity": "error",
        "body": "[ERROR] disk.full: disk full (node1)",
        "alerts": ["al-00000001"],
        "sent_at": "2024-01-01T09:00:00.000Z",
    }


def test_webhook_adapter_posts_document():
    posted = []
    adapter = WebhookAdapter(lambda url, doc: posted.append((url, doc)))
    adapter.deliver(make_notification(), Severity.ERROR, T0, "http://hub.local/sink")
    assert posted == [
        ("http://hub.local/sink", webhook_document(make_notification(), Severity.ERROR, T0))
    ]


def test_webhook_failure_wraps_in_channel_error():
    def boom(url, doc):
        raise ConnectionError("refused")

    adapter = WebhookAdapter(boom)
    with pytest.raises(ChannelError) as err:
        adapter.deliver(make_notification(), Severity.ERROR, T0, "http://hub.local/sink")
    assert err.value.detail.startswith("connect:")


def test_email_file_appends(tmp_path):
    path = tmp_path / "mail.txt"
    adapter = EmailFileAdapter()
    adapter.deliver(make_notification(), Severity.ERROR, T0, str(path))
    adapter.deliver(make_notification(), Severity.ERROR, T0 + timedelta(minutes=1), str(path))
    text = path.read_text(encoding="utf-8")
    assert text.count("To: u1") == 2
    assert "Subject: [error] single notification" in text
    assert "[ERROR] disk.full: disk full (node1)" in text


def test_email_file_failure_wraps_in_channel_error(tmp_path):
    adapter = EmailFileAdapter()
    with pytest.raises(ChannelError) as err:
        adapter.deliver(
            make_notification(), Severity.ERROR, T0, str(tmp_path / "no" / "dir" / "mail")
        )
    assert err.value.detail.startswith("file:")


def test_adapter_set_routes_by_channel_kind(tmp_path):
    posted = []
    adapters = AdapterSet(webhook_post_fn=lambda url, doc: posted.append(url))
    adapters.deliver(make_notification(), Channel.console(), Severity.ERROR, T0)
    assert len(adapters.console.outbox) == 1

    adapters.deliver(
        make_notification(), Channel.webhook("http://hub.local/x"), Severity.ERROR, T0
    )
    assert posted == ["http://hub.local/x"]

    path = tmp_path / "mail.txt"
    adapters.deliver(make_notification(), Channel.email_file(str(path)), Severity.ERROR, T0)
    assert path.exists()


# --------------------------------------------------------- dispatch record


def test_dispatch_record_round_trip():
    record = DispatchRecord(
        "nt-00000001", 2, Channel.webhook("http://hub.local/x"), T0, "sent"
    )
    assert DispatchRecord.from_dict(record.to_dict()) == record


def test_dispatch_attempts_start_at_one():
    with pytest.raises(ValueError):
        DispatchRecord("nt-00000001", 0, Channel.console(), T0, "sent")
