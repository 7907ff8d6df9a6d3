"""The gateway core: one object owning all state, fed by typed records.

Every externally visible mutation is first appended to the store and then
applied in memory; apply() is a pure function of (state, record), so loading
a snapshot and replaying the log suffix reconstructs the exact state, and a
crash between any two appends loses nothing that was acknowledged. External
side effects (webhook posts, mail files) happen only on the live path, never
during replay.

recover() additionally finishes interrupted cascades: an event whose per-user
processing never completed, an alert with no decision, an issue decision with
no notification, a flushed window with no digest. Completion uses the logical
timestamps of the originating records, so a crash-and-recover run emits the
same records an uninterrupted run would have.
"""

from __future__ import annotations

import heapq
import logging
import threading
from dataclasses import replace
from datetime import datetime, timedelta
from typing import Any, Mapping

from . import engine as eng
from . import learning as lrn
from . import notifier as ntf
from . import triage as trg
from . import users as usr
from .clock import format_ts, parse_ts
from .config import GatewayConfig
from .errors import (
    DisabledWatcher,
    DuplicateFeedback,
    EventValidationError,
    UnknownEntity,
    UnknownWatcher,
)
from .ingestion import RateEstimate, WatcherConfig, WatcherKind, update_rate
from .model import (
    ActionKind,
    Alert,
    Criticality,
    Event,
    FeedbackSignal,
    Notification,
    NotificationKind,
    PolicyKind,
    SignalKind,
    TriageDecision,
    validate_event,
)
from .rng import prf_u64
from .store import FileStore, MemoryStore

log = logging.getLogger(__name__)

DEFAULT_WATCHER = "api"

_ID_PREFIX = {
    "event": "ev",
    "alert": "al",
    "decision": "dc",
    "notification": "nt",
    "window": "wd",
    "rule": "ru",
}


def _id_index(identifier: str) -> int:
    return int(identifier.rsplit("-", 1)[1])


class UserState:
    __slots__ = ("histogram", "prefs", "policy")

    def __init__(
        self,
        histogram: usr.AvailabilityHistogram,
        prefs: usr.Preferences,
        policy: lrn.PolicyState,
    ) -> None:
        self.histogram = histogram
        self.prefs = prefs
        self.policy = policy


class Gateway:
    def __init__(
        self,
        config: GatewayConfig | None = None,
        store: MemoryStore | FileStore | None = None,
        webhook_post_fn=None,
    ) -> None:
        self.config = config or GatewayConfig()
        self.store = store if store is not None else MemoryStore()
        self.adapters = ntf.AdapterSet(webhook_post_fn)
        self.lock = threading.RLock()
        self.taxonomy = eng.default_taxonomy()
        self.policy_mode = "baseline"
        self._replaying = False
        self._reset_state()

    # ------------------------------------------------------------------ state

    def _reset_state(self) -> None:
        self.counters: dict[str, int] = {k: 0 for k in _ID_PREFIX}
        self.watchers: dict[str, WatcherConfig] = {}
        self.rates: dict[str, RateEstimate] = {}
        self.rate_pending: dict[str, int] = {}
        self.users: dict[str, UserState] = {}
        self.processed_upto: dict[str, int] = {}
        self.rules: dict[str, list[eng.AlertRule]] = {}
        self.rule_owner: dict[str, str] = {}
        self.unmatched_pool: dict[str, list[str]] = {}
        self.events: dict[str, Event] = {}
        self.alerts: dict[str, Alert] = {}
        self.decisions: dict[str, TriageDecision] = {}
        self.decision_by_alert: dict[str, str] = {}
        self.windows: dict[str, trg.DigestWindow] = {}
        self.open_windows: dict[tuple[str, str], str] = {}
        self.window_flushed_at: dict[str, datetime] = {}
        self.dedup_marks: dict[tuple[str, str], datetime] = {}
        self.notifications: dict[str, Notification] = {}
        self.dispatches: dict[str, list[ntf.DispatchRecord]] = {}
        self.dispatch_sequence: list[tuple[str, int, datetime]] = []
        self.user_dispatch_times: dict[str, list[datetime]] = {}
        self.feedback: dict[str, FeedbackSignal] = {}
        self.complaints: set[str] = set()
        self.settled: set[str] = set()
        self.metric: dict[str, int] = {}
        self.events_rejected = 0
        self._last_tick: datetime | None = None
        self._snapshot_seq = 0
        self._dispatch_heap: list[tuple[datetime, str]] = []
        self._ignored_heap: list[tuple[datetime, str]] = []
        self._suppress_heap: list[tuple[datetime, str]] = []
        self._escalation_heap: list[tuple[datetime, str, int]] = []
        self._window_heap: list[tuple[datetime, str]] = []

    def _bump(self, counter: str, identifier: str) -> None:
        self.counters[counter] = max(self.counters[counter], _id_index(identifier))

    def _alloc(self, counter: str) -> str:
        self.counters[counter] += 1
        return f"{_ID_PREFIX[counter]}-{self.counters[counter]:08d}"

    def _count(self, key: str, n: int = 1) -> None:
        self.metric[key] = self.metric.get(key, 0) + n

    # -------------------------------------------------------------- durations

    @property
    def _ignored_ttl(self) -> timedelta:
        return timedelta(hours=self.config.ignored_ttl_hours)

    @property
    def _suppress_ttl(self) -> timedelta:
        return timedelta(hours=self.config.suppress_ttl_hours)

    @property
    def _ack_timeout(self) -> timedelta:
        return timedelta(minutes=self.config.ack_timeout_minutes)

    @property
    def _max_defer(self) -> timedelta:
        return timedelta(hours=self.config.max_defer_hours)

    def _window_length(self, prefs: usr.Preferences) -> timedelta:
        if prefs.digest_window_length is not None:
            return prefs.digest_window_length
        return timedelta(hours=self.config.digest_window_hours)

    # ------------------------------------------------------------- log + apply

    def _log(self, kind: str, at: datetime, data: dict) -> None:
        self.store.append(kind, at, data)
        self._apply(kind, at, data)

    def _apply(self, kind: str, at: datetime, data: Mapping[str, Any]) -> None:
        handler = getattr(self, f"_apply_{kind}")
        handler(at, data)

    def _apply_watcher_set(self, at: datetime, data: Mapping) -> None:
        cfg = WatcherConfig.from_dict(data["config"])
        self.watchers[cfg.watcher_id] = cfg

    def _apply_user_registered(self, at: datetime, data: Mapping) -> None:
        prefs = usr.Preferences.from_dict(data["prefs"])
        hist = usr.AvailabilityHistogram.from_dict(data["histogram"])
        policy = lrn.PolicyState.from_dict(data["policy"])
        self.users[prefs.user_id] = UserState(hist, prefs, policy)
        self.processed_upto[prefs.user_id] = data["processed_upto"]
        self.rules.setdefault(prefs.user_id, [])
        self.unmatched_pool.setdefault(prefs.user_id, [])

    def _apply_pref_change(self, at: datetime, data: Mapping) -> None:
        prefs = usr.Preferences.from_dict(data["prefs"])
        state = self.users[prefs.user_id]
        state.prefs = prefs
        offset = data.get("timezone_offset_minutes")
        if offset is not None and offset != state.histogram.timezone_offset_minutes:
            state.histogram = replace(state.histogram, timezone_offset_minutes=offset)

    def _apply_rule_add(self, at: datetime, data: Mapping) -> None:
        rule = eng.AlertRule.from_dict(data["rule"])
        self.rules.setdefault(rule.user_id, []).append(rule)
        self.rule_owner[rule.rule_id] = rule.user_id
        if rule.rule_id.startswith("ru-"):
            self._bump("rule", rule.rule_id)

    def _apply_rule_update(self, at: datetime, data: Mapping) -> None:
        rule = eng.AlertRule.from_dict(data["rule"])
        owner_rules = self.rules[rule.user_id]
        for i, existing in enumerate(owner_rules):
            if existing.rule_id == rule.rule_id:
                owner_rules[i] = rule
                return
        raise UnknownEntity(f"rule {rule.rule_id}")

    def _apply_rule_delete(self, at: datetime, data: Mapping) -> None:
        user_id = data["user_id"]
        rule_id = data["rule_id"]
        self.rules[user_id] = [r for r in self.rules[user_id] if r.rule_id != rule_id]
        self.rule_owner.pop(rule_id, None)

    def _apply_event(self, at: datetime, data: Mapping) -> None:
        event = Event.from_dict(data["event"])
        self.events[event.event_id] = event
        self._bump("event", event.event_id)
        self._count("events_received")
        src = event.source_id
        estimate = self.rates.get(src)
        if estimate is None:
            self.rates[src] = RateEstimate(
                src, 0.0, event.received_at, beta=self.config.ewma_beta
            )
            self.rate_pending[src] = 1
            return
        elapsed = event.received_at - estimate.last_updated
        pending = self.rate_pending.get(src, 0)
        if elapsed > timedelta(0):
            self.rates[src] = update_rate(
                estimate, pending + 1, elapsed, event.received_at
            )
            self.rate_pending[src] = 0
        else:
            self.rate_pending[src] = pending + 1

    def _apply_unmatched(self, at: datetime, data: Mapping) -> None:
        user_id = data["user_id"]
        pool = self.unmatched_pool.setdefault(user_id, [])
        pool.append(data["event_id"])
        if len(pool) > self.config.unmatched_pool_size:
            del pool[0]
        self.processed_upto[user_id] = max(
            self.processed_upto.get(user_id, 0), _id_index(data["event_id"])
        )

    def _apply_alert(self, at: datetime, data: Mapping) -> None:
        alert = Alert.from_dict(data["alert"])
        self.alerts[alert.alert_id] = alert
        self._bump("alert", alert.alert_id)
        self._count("alerts_classified")
        if alert.criticality is Criticality.CRITICAL:
            self._count("critical_alerts")
        self.processed_upto[alert.user_id] = max(
            self.processed_upto.get(alert.user_id, 0), _id_index(alert.event_id)
        )

    def _apply_window_open(self, at: datetime, data: Mapping) -> None:
        window = trg.DigestWindow.from_dict(data["window"])
        self.windows[window.window_id] = window
        self.open_windows[(window.user_id, window.cluster_key)] = window.window_id
        self._bump("window", window.window_id)
        heapq.heappush(self._window_heap, (window.deadline, window.window_id))

    def _apply_decision(self, at: datetime, data: Mapping) -> None:
        decision = TriageDecision.from_dict(data["decision"])
        self.decisions[decision.decision_id] = decision
        self.decision_by_alert[decision.alert_id] = decision.decision_id
        self._bump("decision", decision.decision_id)
        alert = self.alerts[decision.alert_id]
        key = (alert.user_id, alert.cluster_key)
        self._count(f"decisions_{decision.action.value}")
        if decision.action in (ActionKind.ISSUE, ActionKind.AGGREGATE):
            self.dedup_marks[key] = decision.decided_at
        if decision.action is ActionKind.AGGREGATE:
            window = self.windows[decision.window_id]
            self.windows[decision.window_id] = window.with_member(decision.alert_id)
        if decision.action is ActionKind.SUPPRESS:
            heapq.heappush(
                self._suppress_heap,
                (decision.decided_at + self._suppress_ttl, decision.decision_id),
            )
        draw_count = data.get("draw_count")
        if draw_count is not None:
            state = self.users[alert.user_id]
            state.policy = replace(state.policy, draw_count=draw_count)

    def _apply_window_flush(self, at: datetime, data: Mapping) -> None:
        window = self.windows[data["window_id"]]
        self.windows[window.window_id] = window.flushed()
        self.open_windows.pop((window.user_id, window.cluster_key), None)
        self.window_flushed_at[window.window_id] = at
        self._count("windows_flushed")
        if not window.member_alert_ids:
            self._count("windows_flushed_empty")

    def _apply_notification(self, at: datetime, data: Mapping) -> None:
        notification = Notification.from_dict(data["notification"])
        self.notifications[notification.notification_id] = notification
        self._bump("notification", notification.notification_id)
        self._count("notifications_created")
        heapq.heappush(
            self._dispatch_heap,
            (notification.scheduled_at, notification.notification_id),
        )

    def _apply_dispatch(self, at: datetime, data: Mapping) -> None:
        record = ntf.DispatchRecord.from_dict(data["record"])
        nid = record.notification_id
        self.dispatches.setdefault(nid, []).append(record)
        self.dispatch_sequence.append((nid, record.attempt, record.sent_at))
        notification = self.notifications[nid]
        self.user_dispatch_times.setdefault(notification.user_id, []).append(
            record.sent_at
        )
        self._count("dispatch_attempts")
        if record.attempt == 1:
            self.notifications[nid] = replace(notification, dispatched_at=record.sent_at)
            heapq.heappush(self._ignored_heap, (record.sent_at + self._ignored_ttl, nid))
            if notification.kind is NotificationKind.DIGEST:
                self._count("digests_dispatched")
                self._count("digest_members_dispatched", len(notification.alert_ids))
            else:
                self._count("singles_dispatched")
                decision = self.decisions[self.decision_by_alert[notification.alert_id()]]
                if decision.policy_kind is PolicyKind.SAFEGUARD:
                    self._count("critical_notifications")
                    if record.sent_at == decision.decided_at:
                        self._count("critical_dispatched_at_decision")
        else:
            self._count("escalations")
        if self._notification_critical(nid) and record.attempt < self.config.max_attempts:
            heapq.heappush(
                self._escalation_heap,
                (record.sent_at + self._ack_timeout, nid, record.attempt),
            )
        if record.channel.kind.value == "console":
            self.adapters.console.deliver(
                self.notifications[nid], self._notification_severity(nid), record.sent_at
            )

    def _apply_ack(self, at: datetime, data: Mapping) -> None:
        nid = data["notification_id"]
        notification = self.notifications[nid]
        if notification.acknowledged_at is None:
            self.notifications[nid] = replace(notification, acknowledged_at=at)
            self._count("acks")

    def _apply_feedback(self, at: datetime, data: Mapping) -> None:
        signal = FeedbackSignal.from_dict(data["signal"])
        self.feedback[signal.notification_id] = signal
        self._count(f"feedback_{signal.signal.value}")
        notification = self.notifications[signal.notification_id]
        state = self.users[notification.user_id]
        bin_at = parse_ts(data["bin_at"])
        state.histogram = usr.record_engagement(state.histogram, signal.signal, bin_at)

    def _apply_complaint(self, at: datetime, data: Mapping) -> None:
        self.complaints.add(data["decision_id"])
        self._count("complaints")

    def _apply_reward(self, at: datetime, data: Mapping) -> None:
        record = lrn.RewardRecord.from_dict(data["record"])
        state = self.users[data["user_id"]]
        state.policy = lrn.update_policy(state.policy, record)
        self.settled.add(record.decision_id)
        self._count("rewards_applied")

    # ------------------------------------------------------------ helper views

    @staticmethod
    def _peek(heap: list, valid) -> tuple | None:
        """Head of the heap after discarding stale entries. Every queue's
        staleness condition is permanent once true, so dropped entries can
        never become due again."""
        while heap:
            entry = heap[0]
            if valid(entry):
                return entry
            heapq.heappop(heap)
        return None

    def _valid_dispatch(self, entry: tuple) -> bool:
        notification = self.notifications.get(entry[1])
        return notification is not None and notification.dispatched_at is None

    def _valid_ignored(self, entry: tuple) -> bool:
        return entry[1] not in self.feedback

    def _valid_suppress(self, entry: tuple) -> bool:
        return entry[1] not in self.settled and entry[1] not in self.complaints

    def _valid_escalation(self, entry: tuple) -> bool:
        _, nid, prior = entry
        attempts = self.dispatches.get(nid, ())
        return (
            bool(attempts)
            and attempts[-1].attempt == prior
            and prior < self.config.max_attempts
            and self.notifications[nid].acknowledged_at is None
            and nid not in self.feedback
        )

    def _valid_window(self, entry: tuple) -> bool:
        window = self.windows.get(entry[1])
        return window is not None and window.state == trg.WindowState.OPEN

    def _notification_severity(self, nid: str):
        notification = self.notifications[nid]
        members = [self.alerts[a] for a in notification.alert_ids]
        return ntf.digest_severity(members)

    def _notification_critical(self, nid: str) -> bool:
        notification = self.notifications[nid]
        if notification.kind is NotificationKind.DIGEST:
            return False
        return self.alerts[notification.alert_id()].criticality is Criticality.CRITICAL

    def _linked_decisions(self, nid: str) -> list[str]:
        notification = self.notifications[nid]
        ids = [
            self.decision_by_alert[a]
            for a in notification.alert_ids
            if a in self.decision_by_alert
        ]
        return sorted(ids)

    def interruptions_last_hour(self, user_id: str, at: datetime) -> int:
        times = self.user_dispatch_times.get(user_id, ())
        cutoff = at - timedelta(hours=1)
        # appended chronologically; linear scan from the tail stays cheap
        n = 0
        for t in reversed(times):
            if t >= at:
                continue
            if t < cutoff:
                break
            n += 1
        return n

    # ----------------------------------------------------------- registration

    def ensure_watcher(self, config: WatcherConfig, now: datetime) -> None:
        with self.lock:
            existing = self.watchers.get(config.watcher_id)
            if existing == config:
                return
            self._log("watcher_set", now, {"config": config.to_dict()})

    def set_watcher_enabled(self, watcher_id: str, enabled: bool, now: datetime) -> None:
        with self.lock:
            cfg = self.watchers.get(watcher_id)
            if cfg is None:
                raise UnknownWatcher(watcher_id)
            if cfg.enabled != enabled:
                updated = replace(cfg, enabled=enabled)
                self._log("watcher_set", now, {"config": updated.to_dict()})

    def register_user(
        self,
        user_id: str,
        now: datetime,
        prefs: usr.Preferences | None = None,
        timezone_offset_minutes: int = 0,
        policy_seed: int | None = None,
    ) -> None:
        with self.lock:
            if user_id in self.users:
                return
            prefs = prefs or usr.Preferences(user_id=user_id)
            if policy_seed is None:
                policy_seed = prf_u64("policy-seed", user_id)
            policy = lrn.PolicyState(
                user_id=user_id,
                epsilon=self.config.epsilon_start,
                epsilon_decay=self.config.epsilon_decay,
                epsilon_floor=self.config.epsilon_floor,
                learning_rate=self.config.learning_rate,
                rng_seed=policy_seed,
            )
            hist = usr.AvailabilityHistogram(
                user_id=user_id, timezone_offset_minutes=timezone_offset_minutes
            )
            self._log(
                "user_registered",
                now,
                {
                    "prefs": prefs.to_dict(),
                    "histogram": hist.to_dict(),
                    "policy": policy.to_dict(),
                    "processed_upto": self.counters["event"],
                },
            )

    def set_preferences(
        self,
        user_id: str,
        prefs: usr.Preferences,
        now: datetime,
        timezone_offset_minutes: int | None = None,
    ) -> None:
        with self.lock:
            if user_id not in self.users:
                self.register_user(
                    user_id, now, timezone_offset_minutes=timezone_offset_minutes or 0
                )
            data: dict = {"prefs": prefs.to_dict()}
            if timezone_offset_minutes is not None:
                data["timezone_offset_minutes"] = timezone_offset_minutes
            self._log("pref_change", now, data)

    # ------------------------------------------------------------------- rules

    def add_rule(
        self,
        user_id: str,
        match: eng.RuleMatch,
        assign: eng.RuleAssign,
        now: datetime,
        enabled: bool = True,
        created_by: str = eng.RuleOrigin.USER,
    ) -> eng.AlertRule:
        with self.lock:
            if user_id not in self.users:
                self.register_user(user_id, now)
            rule = eng.AlertRule(
                rule_id=self._alloc("rule"),
                user_id=user_id,
                match=match,
                assign=assign,
                enabled=enabled,
                created_by=created_by,
            )
            self._log("rule_add", now, {"rule": rule.to_dict()})
            return rule

    def update_rule(self, rule_id: str, doc: Mapping, now: datetime) -> eng.AlertRule:
        with self.lock:
            user_id = self.rule_owner.get(rule_id)
            if user_id is None:
                raise UnknownEntity(f"rule {rule_id}")
            current = next(r for r in self.rules[user_id] if r.rule_id == rule_id)
            updated = eng.AlertRule(
                rule_id=rule_id,
                user_id=user_id,
                match=eng.RuleMatch.from_dict(doc.get("match", current.match.to_dict())),
                assign=eng.RuleAssign.from_dict(doc.get("assign", current.assign.to_dict())),
                enabled=bool(doc.get("enabled", current.enabled)),
                created_by=current.created_by,
            )
            self._log("rule_update", now, {"rule": updated.to_dict()})
            return updated

    def delete_rule(self, rule_id: str, now: datetime) -> None:
        with self.lock:
            user_id = self.rule_owner.get(rule_id)
            if user_id is None:
                raise UnknownEntity(f"rule {rule_id}")
            self._log("rule_delete", now, {"user_id": user_id, "rule_id": rule_id})

    def list_rules(self, user_id: str | None = None) -> list[eng.AlertRule]:
        with self.lock:
            if user_id is not None:
                return list(self.rules.get(user_id, ()))
            merged: list[eng.AlertRule] = []
            for uid in sorted(self.rules):
                merged.extend(self.rules[uid])
            return merged

    def recommendations(self, user_id: str) -> list[eng.AlertRule]:
        with self.lock:
            pool = [
                self.events[eid]
                for eid in self.unmatched_pool.get(user_id, ())
                if eid in self.events
            ]
            return eng.recommend_rules(
                user_id, pool, self.taxonomy, self.config.recommendation_min_support
            )

    # --------------------------------------------------------------- ingestion

    def submit_event(
        self, raw: Mapping, now: datetime, watcher_id: str = DEFAULT_WATCHER
    ) -> Event:
        """Validate, store, and fully cascade one inbound event document."""
        with self.lock:
            watcher = self.watchers.get(watcher_id)
            if watcher is None:
                if watcher_id != DEFAULT_WATCHER:
                    raise UnknownWatcher(watcher_id)
                watcher = WatcherConfig(DEFAULT_WATCHER, WatcherKind.WEBHOOK)
                self.ensure_watcher(watcher, now)
            if not watcher.enabled:
                raise DisabledWatcher(watcher_id)
            try:
                event = validate_event(raw, self._alloc("event"), now)
            except EventValidationError:
                self.counters["event"] -= 1
                self.events_rejected += 1
                raise
            self._log("event", now, {"event": event.to_dict(), "watcher_id": watcher_id})
            for user_id in sorted(self.users):
                self._process_event_for_user(event, user_id)
            self._dispatch_due(now)
            return event

    def _process_event_for_user(self, event: Event, user_id: str) -> None:
        rules = self.rules.get(user_id, ())
        alert = eng.generate_alert(event, rules, f"al-{self.counters['alert'] + 1:08d}")
        if alert is None:
            self._log(
                "unmatched",
                event.received_at,
                {"user_id": user_id, "event_id": event.event_id},
            )
            return
        alert, note = self.taxonomy.classify(alert, event.event_type)
        self._log(
            "alert", event.received_at, {"alert": alert.to_dict(), "note": note}
        )
        self._decide_alert(alert)

    def _decide_alert(self, alert: Alert) -> None:
        """Triage one classified alert at its own creation time and create the
        notification for an issue outcome."""
        state = self.users[alert.user_id]
        now = alert.created_at
        features = trg.extract_features(
            alert,
            usr.availability_score(state.histogram, now),
            self.interruptions_last_hour(alert.user_id, now),
        )
        key = (alert.user_id, alert.cluster_key)

        def allocate_window() -> str:
            existing = self.open_windows.get(key)
            if existing is not None:
                return existing
            window_id = self._alloc("window")
            slot = usr.next_available_slot(
                state.histogram, state.prefs, now, self._max_defer
            )
            deadline = trg.window_deadline(now, self._window_length(state.prefs), slot)
            window = trg.DigestWindow(
                window_id=window_id,
                user_id=alert.user_id,
                cluster_key=alert.cluster_key,
                opened_at=now,
                deadline=deadline,
            )
            self._log("window_open", now, {"window": window.to_dict()})
            return window_id

        mode = PolicyKind.LEARNED if self.policy_mode == "learned" else PolicyKind.BASELINE
        decision, policy_after = trg.decide(
            alert,
            mode,
            now,
            decision_id=self._alloc("decision"),
            features=features,
            last_cluster_activity=self.dedup_marks.get(key),
            policy=state.policy,
            allocate_window=allocate_window,
            dedup_window=timedelta(minutes=self.config.dedup_window_minutes),
            urgency_threshold=self.config.urgency_issue_threshold,
        )
        draw_count = (
            policy_after.draw_count
            if policy_after.draw_count != state.policy.draw_count
            else None
        )
        self._log(
            "decision",
            now,
            {"decision": decision.to_dict(), "draw_count": draw_count},
        )
        if decision.action is ActionKind.ISSUE:
            self._create_single_notification(alert, decision)

    def _create_single_notification(self, alert: Alert, decision: TriageDecision) -> None:
        state = self.users[alert.user_id]
        now = decision.decided_at
        slot = usr.next_available_slot(state.histogram, state.prefs, now, self._max_defer)
        scheduled = ntf.schedule_dispatch(
            NotificationKind.SINGLE, decision.policy_kind, now, slot
        )
        notification = Notification(
            notification_id=self._alloc("notification"),
            user_id=alert.user_id,
            kind=NotificationKind.SINGLE,
            alert_ids=(alert.alert_id,),
            window_id=None,
            channel=usr.preferred_channel(state.prefs, 0),
            body=ntf.render_single_body(alert),
            scheduled_at=scheduled,
        )
        self._log("notification", now, {"notification": notification.to_dict()})

    # -------------------------------------------------------------------- tick

    def tick(self, now: datetime) -> dict:
        """Advance all time-driven work up to now. Safe to call repeatedly
        with the same now; later calls must not go backwards."""
        with self.lock:
            if self._last_tick is not None and now < self._last_tick:
                raise ValueError(
                    f"tick time went backwards: {now} < {self._last_tick}"
                )
            self._last_tick = now
            summary = {
                "windows_flushed": self._flush_windows(now),
                "dispatched": self._dispatch_due(now),
                "escalations": self._escalate(now),
                "ignored_settled": self._settle_ignored(now),
                "suppress_settled": self._settle_suppressed(now),
            }
            self._maybe_snapshot(now)
            return summary

    def _flush_windows(self, now: datetime) -> int:
        flushed = 0
        while True:
            entry = self._peek(self._window_heap, self._valid_window)
            if entry is None or entry[0] > now:
                break
            heapq.heappop(self._window_heap)
            self._flush_window(self.windows[entry[1]])
            flushed += 1
        return flushed

    def _flush_window(self, window: trg.DigestWindow) -> None:
        # logged at the deadline, not the tick time, so a late tick and a
        # crash-recovered run produce the same record
        self._log("window_flush", window.deadline, {"window_id": window.window_id})
        if not window.member_alert_ids:
            return
        self._create_digest_notification(self.windows[window.window_id], window.deadline)

    def _create_digest_notification(
        self, window: trg.DigestWindow, now: datetime
    ) -> None:
        state = self.users[window.user_id]
        members = [self.alerts[a] for a in window.member_alert_ids]
        slot = usr.next_available_slot(state.histogram, state.prefs, now, self._max_defer)
        scheduled = ntf.schedule_dispatch(
            NotificationKind.DIGEST,
            PolicyKind.BASELINE,
            now,
            slot,
            window_deadline=window.deadline,
        )
        notification = Notification(
            notification_id=self._alloc("notification"),
            user_id=window.user_id,
            kind=NotificationKind.DIGEST,
            alert_ids=window.member_alert_ids,
            window_id=window.window_id,
            channel=usr.preferred_channel(state.prefs, 0),
            body=ntf.render_digest_body(members),
            scheduled_at=scheduled,
        )
        self._log("notification", now, {"notification": notification.to_dict()})

    def _dispatch_due(self, now: datetime) -> int:
        sent = 0
        while self._dispatch_heap and self._dispatch_heap[0][0] <= now:
            _, nid = heapq.heappop(self._dispatch_heap)
            notification = self.notifications.get(nid)
            if notification is None or notification.dispatched_at is not None:
                continue
            self._send(nid, attempt=1, at=max(notification.scheduled_at, now))
            sent += 1
        return sent

    def _send(self, nid: str, attempt: int, at: datetime) -> None:
        notification = self.notifications[nid]
        state = self.users[notification.user_id]
        channel = usr.preferred_channel(state.prefs, attempt - 1)
        severity = self._notification_severity(nid)
        outcome, detail = ntf.Outcome.SENT, None
        if channel.kind.value != "console" and not self._replaying:
            try:
                self.adapters.deliver(notification, channel, severity, at)
            except ntf.ChannelError as exc:
                outcome, detail = ntf.Outcome.CHANNEL_ERROR, exc.detail
        record = ntf.DispatchRecord(
            notification_id=nid,
            attempt=attempt,
            channel=channel,
            sent_at=at,
            outcome=outcome,
            detail=detail,
        )
        self._log("dispatch", at, {"record": record.to_dict()})

    def _escalate(self, now: datetime) -> int:
        escalated = 0
        while self._escalation_heap and self._escalation_heap[0][0] <= now:
            due, nid, prior_attempt = heapq.heappop(self._escalation_heap)
            notification = self.notifications[nid]
            attempts = self.dispatches.get(nid, ())
            if not attempts or attempts[-1].attempt != prior_attempt:
                continue
            if notification.acknowledged_at is not None or nid in self.feedback:
                continue
            if prior_attempt >= self.config.max_attempts:
                continue
            self._send(nid, attempt=prior_attempt + 1, at=due)
            escalated += 1
        return escalated

    def _settle_ignored(self, now: datetime) -> int:
        settled = 0
        while self._ignored_heap and self._ignored_heap[0][0] <= now:
            due, nid = heapq.heappop(self._ignored_heap)
            if nid in self.feedback:
                continue
            notification = self.notifications[nid]
            signal = FeedbackSignal(
                notification_id=nid,
                signal=SignalKind.IGNORED,
                observed_at=due,
                explicit=False,
            )
            self._log(
                "feedback",
                due,
                {
                    "signal": signal.to_dict(),
                    "bin_at": format_ts(notification.dispatched_at),
                },
            )
            self._settle_rewards(nid, signal, due)
            settled += 1
        return settled

    def _settle_rewards(self, nid: str, signal: FeedbackSignal, at: datetime) -> None:
        reward = lrn.reward_of(signal.signal, self.config.rewards)
        user_id = self.notifications[nid].user_id
        for decision_id in self._linked_decisions(nid):
            if decision_id in self.settled:
                continue
            decision = self.decisions[decision_id]
            record = lrn.RewardRecord(
                decision_id=decision_id,
                action=decision.action,
                features=decision.feature_vector,
                reward=reward,
                settled_at=at,
            )
            self._log("reward", at, {"user_id": user_id, "record": record.to_dict()})

    def _settle_suppressed(self, now: datetime) -> int:
        settled = 0
        while self._suppress_heap and self._suppress_heap[0][0] <= now:
            due, decision_id = heapq.heappop(self._suppress_heap)
            if decision_id in self.settled or decision_id in self.complaints:
                continue
            decision = self.decisions[decision_id]
            user_id = self.alerts[decision.alert_id].user_id
            record = lrn.RewardRecord(
                decision_id=decision_id,
                action=decision.action,
                features=decision.feature_vector,
                reward=lrn.suppress_reward(False, self.config.rewards),
                settled_at=due,
            )
            self._log("reward", due, {"user_id": user_id, "record": record.to_dict()})
            settled += 1
        return settled

    # ---------------------------------------------------------------- feedback

    def submit_feedback(
        self, notification_id: str, signal_kind: SignalKind, at: datetime
    ) -> FeedbackSignal:
        with self.lock:
            notification = self.notifications.get(notification_id)
            if notification is None:
                raise UnknownEntity(f"notification {notification_id}")
            if notification.dispatched_at is None:
                raise ValueError("cannot react to an undelivered notification")
            if notification_id in self.feedback:
                raise DuplicateFeedback(notification_id)
            if signal_kind is SignalKind.IGNORED:
                raise ValueError("ignored is synthesized by TTL expiry, not submitted")
            signal = FeedbackSignal(
                notification_id=notification_id,
                signal=signal_kind,
                observed_at=at,
                explicit=True,
            )
            self._log(
                "feedback", at, {"signal": signal.to_dict(), "bin_at": format_ts(at)}
            )
            self._settle_rewards(notification_id, signal, at)
            return signal

    def report_missed_alert(self, decision_id: str, at: datetime) -> None:
        """Complaint that a suppressed alert should have been delivered."""
        with self.lock:
            decision = self.decisions.get(decision_id)
            if decision is None:
                raise UnknownEntity(f"decision {decision_id}")
            if decision.action is not ActionKind.SUPPRESS:
                raise ValueError("missed-alert reports only apply to suppress decisions")
            if decision_id in self.settled or decision_id in self.complaints:
                raise DuplicateFeedback(decision_id)
            self._log("complaint", at, {"decision_id": decision_id})
            user_id = self.alerts[decision.alert_id].user_id
            record = lrn.RewardRecord(
                decision_id=decision_id,
                action=decision.action,
                features=decision.feature_vector,
                reward=lrn.suppress_reward(True, self.config.rewards),
                settled_at=at,
            )
            self._log("reward", at, {"user_id": user_id, "record": record.to_dict()})

    def acknowledge(self, notification_id: str, at: datetime) -> None:
        with self.lock:
            if notification_id not in self.notifications:
                raise UnknownEntity(f"notification {notification_id}")
            self._log("ack", at, {"notification_id": notification_id})

    # ----------------------------------------------------------------- queries

    def next_due(self) -> datetime | None:
        """Earliest instant at which tick(now) would have work to do."""
        with self.lock:
            queues = (
                (self._window_heap, self._valid_window),
                (self._dispatch_heap, self._valid_dispatch),
                (self._escalation_heap, self._valid_escalation),
                (self._ignored_heap, self._valid_ignored),
                (self._suppress_heap, self._valid_suppress),
            )
            candidates: list[datetime] = []
            for heap, valid in queues:
                entry = self._peek(heap, valid)
                if entry is not None:
                    candidates.append(entry[0])
            return min(candidates) if candidates else None

    def list_notifications(
        self, user_id: str | None = None, limit: int = 100
    ) -> list[Notification]:
        with self.lock:
            items = [
                n
                for n in self.notifications.values()
                if user_id is None or n.user_id == user_id
            ]
            items.sort(key=lambda n: _id_index(n.notification_id), reverse=True)
            return items[:limit]

    def list_decisions(
        self,
        alert_id: str | None = None,
        user_id: str | None = None,
        since: datetime | None = None,
    ) -> list[TriageDecision]:
        with self.lock:
            out = []
            for did in sorted(self.decisions):
                decision = self.decisions[did]
                if alert_id is not None and decision.alert_id != alert_id:
                    continue
                if user_id is not None:
                    if self.alerts[decision.alert_id].user_id != user_id:
                        continue
                if since is not None and decision.decided_at < since:
                    continue
                out.append(decision)
            return out

    def metrics(self) -> dict:
        with self.lock:
            doc = dict(sorted(self.metric.items()))
            doc["events_rejected_since_start"] = self.events_rejected
            doc["users"] = len(self.users)
            doc["open_windows"] = sum(
                1 for w in self.windows.values() if w.state == trg.WindowState.OPEN
            )
            return doc

    # ------------------------------------------------------- snapshot + replay

    def _maybe_snapshot(self, now: datetime) -> None:
        every = self.config.snapshot_every_records
        if every <= 0:
            return
        last_seq = self.store.last_seq
        if last_seq - getattr(self, "_snapshot_seq", 0) >= every:
            self.store.write_snapshot(self.state_dict(), last_seq, now)
            self._snapshot_seq = last_seq

    def state_dict(self) -> dict:
        return {
            "counters": dict(self.counters),
            "watchers": {k: v.to_dict() for k, v in self.watchers.items()},
            "rates": {k: v.to_dict() for k, v in self.rates.items()},
            "rate_pending": dict(self.rate_pending),
            "users": {
                uid: {
                    "prefs": s.prefs.to_dict(),
                    "histogram": s.histogram.to_dict(),
                    "policy": s.policy.to_dict(),
                }
                for uid, s in self.users.items()
            },
            "processed_upto": dict(self.processed_upto),
            "rules": {uid: [r.to_dict() for r in rs] for uid, rs in self.rules.items()},
            "unmatched_pool": {k: list(v) for k, v in self.unmatched_pool.items()},
            "events": {k: v.to_dict() for k, v in self.events.items()},
            "alerts": {k: v.to_dict() for k, v in self.alerts.items()},
            "decisions": {k: v.to_dict() for k, v in self.decisions.items()},
            "windows": {k: v.to_dict() for k, v in self.windows.items()},
            "window_flushed_at": {
                k: format_ts(v) for k, v in self.window_flushed_at.items()
            },
            "dedup_marks": [
                [u, ck, format_ts(ts)] for (u, ck), ts in sorted(self.dedup_marks.items())
            ],
            "notifications": {k: v.to_dict() for k, v in self.notifications.items()},
            "dispatches": {
                k: [r.to_dict() for r in v] for k, v in self.dispatches.items()
            },
            "feedback": {k: v.to_dict() for k, v in self.feedback.items()},
            "complaints": sorted(self.complaints),
            "settled": sorted(self.settled),
            "metric": dict(self.metric),
        }

    def load_state(self, doc: Mapping) -> None:
        self._reset_state()
        self.counters.update(doc["counters"])
        self.watchers = {
            k: WatcherConfig.from_dict(v) for k, v in doc["watchers"].items()
        }
        self.rates = {k: RateEstimate.from_dict(v) for k, v in doc["rates"].items()}
        self.rate_pending = dict(doc["rate_pending"])
        for uid, s in doc["users"].items():
            self.users[uid] = UserState(
                usr.AvailabilityHistogram.from_dict(s["histogram"]),
                usr.Preferences.from_dict(s["prefs"]),
                lrn.PolicyState.from_dict(s["policy"]),
            )
        self.processed_upto = dict(doc["processed_upto"])
        self.rules = {
            uid: [eng.AlertRule.from_dict(r) for r in rs]
            for uid, rs in doc["rules"].items()
        }
        self.rule_owner = {
            r.rule_id: uid for uid, rs in self.rules.items() for r in rs
        }
        self.unmatched_pool = {k: list(v) for k, v in doc["unmatched_pool"].items()}
        self.events = {k: Event.from_dict(v) for k, v in doc["events"].items()}
        self.alerts = {k: Alert.from_dict(v) for k, v in doc["alerts"].items()}
        self.decisions = {
            k: TriageDecision.from_dict(v) for k, v in doc["decisions"].items()
        }
        self.decision_by_alert = {
            d.alert_id: d.decision_id for d in self.decisions.values()
        }
        self.windows = {
            k: trg.DigestWindow.from_dict(v) for k, v in doc["windows"].items()
        }
        self.open_windows = {
            (w.user_id, w.cluster_key): w.window_id
            for w in self.windows.values()
            if w.state == trg.WindowState.OPEN
        }
        self.window_flushed_at = {
            k: parse_ts(v) for k, v in doc["window_flushed_at"].items()
        }
        self.dedup_marks = {
            (u, ck): parse_ts(ts) for u, ck, ts in doc["dedup_marks"]
        }
        self.notifications = {
            k: Notification.from_dict(v) for k, v in doc["notifications"].items()
        }
        self.dispatches = {
            k: [ntf.DispatchRecord.from_dict(r) for r in v]
            for k, v in doc["dispatches"].items()
        }
        for nid in sorted(self.dispatches):
            user_id = self.notifications[nid].user_id
            for record in self.dispatches[nid]:
                self.user_dispatch_times.setdefault(user_id, []).append(record.sent_at)
                self.dispatch_sequence.append((nid, record.attempt, record.sent_at))
        for times in self.user_dispatch_times.values():
            times.sort()
        self.dispatch_sequence.sort(key=lambda item: (item[2], item[0], item[1]))
        self.feedback = {
            k: FeedbackSignal.from_dict(v) for k, v in doc["feedback"].items()
        }
        self.complaints = set(doc["complaints"])
        self.settled = set(doc["settled"])
        self.metric = dict(doc["metric"])
        self._rebuild_queues()

    def _rebuild_queues(self) -> None:
        self._dispatch_heap = [
            (n.scheduled_at, nid)
            for nid, n in self.notifications.items()
            if n.dispatched_at is None
        ]
        heapq.heapify(self._dispatch_heap)
        self._ignored_heap = [
            (n.dispatched_at + self._ignored_ttl, nid)
            for nid, n in self.notifications.items()
            if n.dispatched_at is not None and nid not in self.feedback
        ]
        heapq.heapify(self._ignored_heap)
        self._suppress_heap = [
            (d.decided_at + self._suppress_ttl, did)
            for did, d in self.decisions.items()
            if d.action is ActionKind.SUPPRESS
            and did not in self.settled
            and did not in self.complaints
        ]
        heapq.heapify(self._suppress_heap)
        self._window_heap = [
            (w.deadline, wid)
            for wid, w in self.windows.items()
            if w.state == trg.WindowState.OPEN
        ]
        heapq.heapify(self._window_heap)
        self._escalation_heap = []
        for nid in sorted(self.dispatches):
            if not self._notification_critical(nid):
                continue
            notification = self.notifications[nid]
            if notification.acknowledged_at is not None or nid in self.feedback:
                continue
            last = self.dispatches[nid][-1]
            if last.attempt < self.config.max_attempts:
                heapq.heappush(
                    self._escalation_heap,
                    (last.sent_at + self._ack_timeout, nid, last.attempt),
                )

    def recover(self) -> dict:
        """Rebuild state from snapshot + log, then finish any cascades a crash
        interrupted, using the logical timestamps already in the log."""
        with self.lock:
            self._replaying = True
            try:
                self._reset_state()
                snap = self.store.read_snapshot()
                after = 0
                if snap is not None:
                    after, state = snap
                    self.load_state(state)
                    self._snapshot_seq = after
                replayed = 0
                for record in self.store.records(after):
                    self._apply(record.kind, record.at, record.data)
                    replayed += 1
                completed = self._complete_cascades()
            finally:
                self._replaying = False
            log.debug("recovered: %d replayed, %d cascades completed", replayed, completed)
            return {"replayed": replayed, "completed": completed}

    def _complete_cascades(self) -> int:
        """A crash is a prefix cut, so at most one cascade is dangling. Resume
        each event's per-user cascade at the exact step it stopped, in the
        order live processing would have emitted records, so allocated ids
        come out identical to an uninterrupted run."""
        completed = 0
        alert_by_event_user = {}
        for alert_id in sorted(self.alerts):
            alert = self.alerts[alert_id]
            alert_by_event_user[(alert.event_id, alert.user_id)] = alert
        notified_alerts = {
            a for n in self.notifications.values() for a in n.alert_ids
        }
        notified_windows = {
            n.window_id for n in self.notifications.values() if n.window_id
        }
        users_sorted = sorted(self.users)
        for index in range(1, self.counters["event"] + 1):
            event_id = f"ev-{index:08d}"
            event = self.events.get(event_id)
            if event is None:
                continue
            for user_id in users_sorted:
                alert = alert_by_event_user.get((event_id, user_id))
                if alert is None:
                    if self.processed_upto.get(user_id, 0) >= index:
                        continue
                    self._process_event_for_user(event, user_id)
                    completed += 1
                    continue
                decision_id = self.decision_by_alert.get(alert.alert_id)
                if decision_id is None:
                    self._decide_alert(alert)
                    completed += 1
                    continue
                decision = self.decisions[decision_id]
                if (
                    decision.action is ActionKind.ISSUE
                    and alert.alert_id not in notified_alerts
                ):
                    self._create_single_notification(alert, decision)
                    completed += 1
        # flushed non-empty windows whose digest was never created
        for wid in sorted(self.window_flushed_at):
            window = self.windows[wid]
            if window.member_alert_ids and wid not in notified_windows:
                self._create_digest_notification(window, self.window_flushed_at[wid])
                completed += 1
        # feedback whose reward fan-out was cut short
        for nid in sorted(self.feedback):
            signal = self.feedback[nid]
            pending = [
                d for d in self._linked_decisions(nid) if d not in self.settled
            ]
            if pending:
                self._settle_rewards(nid, signal, signal.observed_at)
                completed += 1
        return completed
