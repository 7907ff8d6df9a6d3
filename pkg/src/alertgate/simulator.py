"""Deterministic discrete-event harness driving the whole gateway.

Synthetic Poisson workloads feed the real ingestion, triage, notification,
and learning stack on virtual time, with synthetic fatigue-prone users
reacting to what gets dispatched. Every random draw is a counter-keyed PRF of
the run seed, so a run is a pure function of its inputs: same workload, same
users, same seed, byte-identical report. A crash-and-recover run replays the
store, re-derives its pending user responses from gateway state, and lands on
the same bytes.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

from .clock import floor_ms, format_ts, parse_ts
from .config import GatewayConfig
from .engine import RuleAssign, RuleMatch
from .errors import DuplicateFeedback, ScenarioAssertionFailed
from .gateway import Gateway
from .ingestion import WatcherConfig, WatcherKind
from .model import (
    Channel,
    Criticality,
    DurationKind,
    NotificationKind,
    Severity,
    SignalKind,
)
from .rng import prf_exponential, prf_float
from .store import MemoryStore
from .users import BINS, Preferences, hour_of_week

# Monday, so hour-of-week bin 0 lines up with the histogram convention.
SIM_EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

SIM_WATCHER = "sim"
OPEN_IMMEDIATE_DELAY = timedelta(seconds=30)
OPEN_LATER_DELAY = timedelta(minutes=5)
P_OPEN_IMMEDIATELY = 0.8

SEVERITY_ORDER = (
    Severity.ERROR,
    Severity.WARNING,
    Severity.INFO,
    Severity.NOT_AVAILABLE,
)
DEFAULT_URGENCY = {
    Severity.ERROR: 0.7,
    Severity.WARNING: 0.5,
    Severity.INFO: 0.3,
    Severity.NOT_AVAILABLE: 0.1,
}
CRITICAL_URGENCY = 0.95


@dataclass(frozen=True)
class SyntheticUser:
    user_id: str
    active_bins: frozenset[int] = frozenset(range(BINS))
    base_engage: float = 0.9
    fatigue_kappa: float = 0.3
    rng_seed: int = 1
    timezone_offset_minutes: int = 0
    availability_threshold: float = 0.6
    digest_window_hours: float | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.base_engage <= 1.0:
            raise ValueError("base_engage must be in (0, 1]")
        if self.fatigue_kappa < 0:
            raise ValueError("fatigue_kappa cannot be negative")

    def in_active(self, at: datetime) -> bool:
        return hour_of_week(at, self.timezone_offset_minutes) in self.active_bins

    def preferences(self) -> Preferences:
        length = (
            timedelta(hours=self.digest_window_hours)
            if self.digest_window_hours is not None
            else None
        )
        return Preferences(
            user_id=self.user_id,
            channel_order=(Channel.console(),),
            availability_threshold=self.availability_threshold,
            digest_window_length=length,
        )

    @classmethod
    def from_dict(cls, doc: Mapping) -> "SyntheticUser":
        return cls(
            user_id=doc["user_id"],
            active_bins=parse_active_bins(doc.get("active_bins")),
            base_engage=float(doc.get("base_engage", 0.9)),
            fatigue_kappa=float(doc.get("fatigue_kappa", 0.3)),
            rng_seed=int(doc.get("rng_seed", 1)),
            timezone_offset_minutes=int(doc.get("timezone_offset_minutes", 0)),
            availability_threshold=float(doc.get("availability_threshold", 0.6)),
            digest_window_hours=(
                float(doc["digest_window_hours"])
                if doc.get("digest_window_hours") is not None
                else None
            ),
        )


def parse_active_bins(spec: Any) -> frozenset[int]:
    """Either an explicit bin list or {"days": [...], "start_hour": h,
    "end_hour": h} with end exclusive; absent means always active."""
    if spec is None:
        return frozenset(range(BINS))
    if isinstance(spec, Mapping):
        days = spec.get("days", [0, 1, 2, 3, 4])
        start = int(spec.get("start_hour", 9))
        end = int(spec.get("end_hour", 18))
        return frozenset(
            d * 24 + h for d in days for h in range(start, end)
        )
    return frozenset(int(b) for b in spec)


@dataclass(frozen=True)
class WorkloadSource:
    source_id: str
    event_type: str
    poisson_rate_per_hour: float
    severity_mix: Mapping[Severity, float] = field(
        default_factory=lambda: {Severity.ERROR: 1.0}
    )
    critical_prob: float = 0.0
    duration_kind: DurationKind = DurationKind.ONE_SHOT

    def __post_init__(self) -> None:
        if self.poisson_rate_per_hour < 0:
            raise ValueError("rates cannot be negative")
        total = sum(self.severity_mix.values())
        if self.severity_mix and abs(total - 1.0) > 1e-9:
            raise ValueError(f"severity mix must sum to 1, got {total}")
        if not 0.0 <= self.critical_prob <= 1.0:
            raise ValueError("critical_prob must be a probability")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "WorkloadSource":
        mix = {
            Severity(k): float(v) for k, v in doc.get("severity_mix", {"error": 1.0}).items()
        }
        return cls(
            source_id=doc["source_id"],
            event_type=doc["event_type"],
            poisson_rate_per_hour=float(doc["poisson_rate_per_hour"]),
            severity_mix=mix,
            critical_prob=float(doc.get("critical_prob", 0.0)),
            duration_kind=DurationKind(doc.get("duration", "one_shot")),
        )


@dataclass(frozen=True)
class Workload:
    sources: tuple[WorkloadSource, ...]
    duration_days: float
    seed: int

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Workload":
        return cls(
            sources=tuple(WorkloadSource.from_dict(s) for s in doc["sources"]),
            duration_days=float(doc["duration_days"]),
            seed=int(doc["seed"]),
        )


def generate_workload(workload: Workload, start: datetime = SIM_EPOCH) -> list[dict]:
    """Seeded Poisson arrivals per source, merged and sorted by occurred_at.

    Severity and criticality are sampled into the payload; the simulation's
    installed rules turn them into alert dimensions.
    """
    horizon = timedelta(days=workload.duration_days)
    stream: list[tuple[datetime, str, int, dict]] = []
    for source in workload.sources:
        if source.poisson_rate_per_hour <= 0:
            continue
        rate_per_second = source.poisson_rate_per_hour / 3600.0
        t = 0.0
        i = 0
        while True:
            t += prf_exponential(
                rate_per_second, workload.seed, source.source_id, "gap", i
            )
            occurred = start + timedelta(seconds=t)
            if occurred - start >= horizon:
                break
            occurred = floor_ms(occurred)
            severity = _sample_severity(source, workload.seed, i)
            critical = (
                prf_float(workload.seed, source.source_id, "crit", i)
                < source.critical_prob
            )
            stream.append(
                (
                    occurred,
                    source.source_id,
                    i,
                    {
                        "source": source.source_id,
                        "type": source.event_type,
                        "tags": [],
                        "payload": {
                            "severity": severity.value,
                            "critical": critical,
                            "message": f"{source.event_type} #{i}",
                        },
                        "occurred_at": format_ts(occurred),
                    },
                )
            )
            i += 1
    stream.sort(key=lambda item: (item[0], item[1], item[2]))
    return [doc for _, _, _, doc in stream]


def _sample_severity(source: WorkloadSource, seed: int, i: int) -> Severity:
    u = prf_float(seed, source.source_id, "sev", i)
    acc = 0.0
    for severity in SEVERITY_ORDER:
        acc += source.severity_mix.get(severity, 0.0)
        if u < acc:
            return severity
    return SEVERITY_ORDER[0]


def install_workload_rules(
    gateway: Gateway, user: SyntheticUser, sources: Sequence[WorkloadSource], now: datetime
) -> None:
    """Per user and source: a critical rule first, then one rule per severity,
    keyed off the sampled payload fields."""
    for source in sources:
        base = {"source": source.source_id, "event_type": source.event_type}
        gateway.add_rule(
            user.user_id,
            RuleMatch(**base, payload_eq={"critical": True}),
            RuleAssign(
                Severity.ERROR, Criticality.CRITICAL, CRITICAL_URGENCY, source.duration_kind
            ),
            now,
        )
        for severity in SEVERITY_ORDER:
            if source.severity_mix.get(severity, 0.0) <= 0.0:
                continue
            gateway.add_rule(
                user.user_id,
                RuleMatch(**base, payload_eq={"severity": severity.value}),
                RuleAssign(
                    severity,
                    Criticality.NON_CRITICAL,
                    DEFAULT_URGENCY[severity],
                    source.duration_kind,
                ),
                now,
            )


def simulate_user_response(
    user: SyntheticUser,
    notification_id: str,
    attempt: int,
    interruptions_last_hour: int,
    at: datetime,
) -> SignalKind:
    """One engagement draw for one dispatch attempt.

    Engagement probability decays exponentially with recent interruptions
    (alert fatigue) and is zero outside the user's active bins. The outcome
    is a pure function of the user seed and the attempt identity, so it can
    be recomputed after a crash.
    """
    p_engage = (
        user.base_engage
        * (1.0 if user.in_active(at) else 0.0)
        * math.exp(-user.fatigue_kappa * interruptions_last_hour)
    )
    if prf_float(user.rng_seed, notification_id, attempt, "engage") >= p_engage:
        return SignalKind.IGNORED
    if prf_float(user.rng_seed, notification_id, attempt, "which") < P_OPEN_IMMEDIATELY:
        return SignalKind.OPENED_IMMEDIATELY
    return SignalKind.OPENED_LATER


def response_delay(signal: SignalKind) -> timedelta:
    if signal is SignalKind.OPENED_IMMEDIATELY:
        return OPEN_IMMEDIATE_DELAY
    return OPEN_LATER_DELAY


@dataclass
class SimulationSpec:
    users: tuple[SyntheticUser, ...]
    mode: str = "baseline"
    seed: int = 0
    duration_days: float = 1.0
    workload: Workload | None = None
    explicit_events: tuple[dict, ...] = ()
    assertions: tuple[Mapping, ...] = ()
    config: GatewayConfig = field(default_factory=GatewayConfig)
    install_rules: bool = True
    explicit_rules: tuple[Mapping, ...] = ()
    name: str = "simulation"


@dataclass
class CrashPlan:
    """Kill the run after `after_events` ingested events, then drop the last
    `drop_records` appended records to model unflushed work, rebuild the
    gateway from the store, and continue."""

    after_events: int
    drop_records: int = 0


# heap item priorities; ties at one timestamp resolve gateway work first,
# then new events, then user feedback
_PRIO_TICK = 0
_PRIO_EVENT = 1
_PRIO_FEEDBACK = 2


class _SimLoop:
    def __init__(self, spec: SimulationSpec, store: MemoryStore, events: list[dict]):
        self.spec = spec
        self.store = store
        self.events = events
        self.users_by_id = {u.user_id: u for u in spec.users}
        self.gateway = self._build_gateway()
        self.feedback_heap: list[tuple[datetime, int, str, int, str]] = []
        self.dispatch_cursor = 0
        self.event_cursor = 0
        self.scheduled_feedback: set[str] = set()

    def _build_gateway(self) -> Gateway:
        gateway = Gateway(self.spec.config, self.store)
        gateway.policy_mode = self.spec.mode
        now = SIM_EPOCH
        gateway.ensure_watcher(WatcherConfig(SIM_WATCHER, WatcherKind.WEBHOOK), now)
        for user in self.spec.users:
            gateway.register_user(
                user.user_id,
                now,
                prefs=user.preferences(),
                timezone_offset_minutes=user.timezone_offset_minutes,
                policy_seed=user.rng_seed,
            )
        if self.spec.install_rules and self.spec.workload is not None:
            for user in self.spec.users:
                install_workload_rules(gateway, user, self.spec.workload.sources, now)
        for doc in self.spec.explicit_rules:
            gateway.add_rule(
                doc["user_id"],
                RuleMatch.from_dict(doc.get("match", {})),
                RuleAssign.from_dict(doc.get("assign", {})),
                now,
                enabled=bool(doc.get("enabled", True)),
            )
        return gateway

    def _rebuild_after_crash(self) -> None:
        """Fresh gateway over the surviving store; sim-side queues re-derived
        from recovered state."""
        self.gateway = Gateway(self.spec.config, self.store)
        self.gateway.policy_mode = self.spec.mode
        self.gateway.recover()
        self.event_cursor = self.gateway.counters["event"]
        self.feedback_heap = []
        self.scheduled_feedback = set()
        self.dispatch_cursor = len(self.gateway.dispatch_sequence)
        for nid in sorted(self.gateway.notifications):
            notification = self.gateway.notifications[nid]
            if notification.dispatched_at is None or nid in self.gateway.feedback:
                continue
            for record in self.gateway.dispatches.get(nid, ()):
                if self._consider_dispatch(nid, record.attempt, record.sent_at):
                    break

    def _consider_dispatch(self, nid: str, attempt: int, sent_at: datetime) -> bool:
        """Compute the user's reaction to one dispatch attempt; schedule the
        explicit feedback when it engages. Returns True when it engaged."""
        notification = self.gateway.notifications[nid]
        user = self.users_by_id[notification.user_id]
        interruptions = self.gateway.interruptions_last_hour(
            notification.user_id, sent_at
        )
        signal = simulate_user_response(user, nid, attempt, interruptions, sent_at)
        if signal is SignalKind.IGNORED:
            return False
        if nid in self.scheduled_feedback:
            return True
        self.scheduled_feedback.add(nid)
        due = sent_at + response_delay(signal)
        heapq.heappush(
            self.feedback_heap, (due, _PRIO_FEEDBACK, nid, attempt, signal.value)
        )
        return True

    def _drain_new_dispatches(self) -> None:
        sequence = self.gateway.dispatch_sequence
        while self.dispatch_cursor < len(sequence):
            nid, attempt, sent_at = sequence[self.dispatch_cursor]
            self.dispatch_cursor += 1
            if nid in self.gateway.feedback:
                continue
            self._consider_dispatch(nid, attempt, sent_at)

    def run(self, crash: CrashPlan | None = None) -> Gateway:
        while True:
            next_event = (
                parse_ts(self.events[self.event_cursor]["occurred_at"])
                if self.event_cursor < len(self.events)
                else None
            )
            next_feedback = self.feedback_heap[0][0] if self.feedback_heap else None
            next_tick = self.gateway.next_due()

            candidates: list[tuple[datetime, int]] = []
            if next_tick is not None:
                candidates.append((next_tick, _PRIO_TICK))
            if next_event is not None:
                candidates.append((next_event, _PRIO_EVENT))
            if next_feedback is not None:
                candidates.append((next_feedback, _PRIO_FEEDBACK))
            if not candidates:
                return self.gateway
            at, prio = min(candidates)

            if prio == _PRIO_TICK:
                self.gateway.tick(at)
            elif prio == _PRIO_EVENT:
                doc = self.events[self.event_cursor]
                self.event_cursor += 1
                self.gateway.submit_event(doc, at, SIM_WATCHER)
                if crash is not None and self.event_cursor == crash.after_events:
                    self.store.truncate_to(
                        max(0, self.store.last_seq - crash.drop_records)
                    )
                    self._rebuild_after_crash()
                    crash = None
            else:
                _, _, nid, attempt, signal_value = heapq.heappop(self.feedback_heap)
                try:
                    self.gateway.submit_feedback(nid, SignalKind(signal_value), at)
                except DuplicateFeedback:
                    pass
            self._drain_new_dispatches()


def run_simulation(
    spec: SimulationSpec,
    store: MemoryStore | None = None,
    crash: CrashPlan | None = None,
) -> tuple[dict, Gateway]:
    """Drive the full pipeline on virtual time and build the canonical report.

    The run continues past the workload horizon until every window has
    flushed and every pending TTL has settled, so conservation holds exactly
    at the end.
    """
    store = store if store is not None else MemoryStore()
    events = list(spec.explicit_events)
    if spec.workload is not None:
        events.extend(generate_workload(spec.workload, SIM_EPOCH))
    events.sort(key=lambda d: (d["occurred_at"], d["source"]))
    loop = _SimLoop(spec, store, events)
    gateway = loop.run(crash)
    report = build_report(spec, gateway)
    return report, gateway


# --------------------------------------------------------------- report


def _round(value: float) -> float:
    return round(value, 6)


def _ratio(num: float, den: float) -> float:
    return _round(num / den) if den else 0.0


def build_report(spec: SimulationSpec, gateway: Gateway) -> dict:
    m = gateway.metric
    classified = m.get("alerts_classified", 0)
    criticals = m.get("critical_alerts", 0)
    critical_ok = m.get("critical_dispatched_at_decision", 0)
    digest_members = sum(
        len(w.member_alert_ids) for w in gateway.windows.values()
    )
    delivered_digest = m.get("digest_members_dispatched", 0)
    delivered_single = m.get("singles_dispatched", 0)

    feedback_total = 0
    feedback_negative = 0
    delays = []
    negative_kinds = {
        SignalKind.DISMISSED,
        SignalKind.DELETED_UNOPENED,
        SignalKind.MARKED_IRRELEVANT,
        SignalKind.IGNORED,
    }
    for nid in sorted(gateway.feedback):
        signal = gateway.feedback[nid]
        feedback_total += 1
        if signal.signal in negative_kinds:
            feedback_negative += 1
        else:
            dispatched = gateway.notifications[nid].dispatched_at
            delays.append((signal.observed_at - dispatched).total_seconds() / 60.0)

    user_days = len(spec.users) * spec.duration_days
    report = {
        "name": spec.name,
        "mode": spec.mode,
        "seed": spec.seed,
        "metrics": {
            "missed_critical_rate": _ratio(criticals - critical_ok, criticals),
            "interruptions_per_user_day": _ratio(
                m.get("dispatch_attempts", 0), user_days
            ),
            "mean_response_delay_minutes": (
                _round(sum(delays) / len(delays)) if delays else 0.0
            ),
            "suppressed_fraction": _ratio(m.get("decisions_suppress", 0), classified),
            "digest_ratio": _ratio(
                delivered_digest, delivered_digest + delivered_single
            ),
            "negative_feedback_rate": _ratio(feedback_negative, feedback_total),
        },
        "conservation": {
            "classified_alerts": classified,
            "issued": m.get("decisions_issue", 0),
            "digest_members": digest_members,
            "suppressed": m.get("decisions_suppress", 0),
            "balanced": (
                m.get("decisions_issue", 0) + digest_members + m.get("decisions_suppress", 0)
            )
            == classified,
        },
        "counts": {
            "events": m.get("events_received", 0),
            "alerts": classified,
            "critical_alerts": criticals,
            "decisions_issue": m.get("decisions_issue", 0),
            "decisions_aggregate": m.get("decisions_aggregate", 0),
            "decisions_suppress": m.get("decisions_suppress", 0),
            "notifications": m.get("notifications_created", 0),
            "dispatch_attempts": m.get("dispatch_attempts", 0),
            "digests_dispatched": m.get("digests_dispatched", 0),
            "escalations": m.get("escalations", 0),
            "feedback": feedback_total,
            "rewards": m.get("rewards_applied", 0),
        },
        "assertions": evaluate_assertions(spec, gateway),
    }
    return report


def report_to_bytes(report: Mapping) -> bytes:
    """Canonical serialization: sorted keys, fixed separators, floats already
    rounded to 6 places when the report was built."""
    return json.dumps(report, sort_keys=True, separators=(",", ":")).encode("utf-8")


def assertions_passed(report: Mapping) -> bool:
    return all(a["passed"] for a in report["assertions"])


# ------------------------------------------------------------- assertions


def evaluate_assertions(spec: SimulationSpec, gateway: Gateway) -> list[dict]:
    results = []
    for doc in spec.assertions:
        kind = doc["kind"]
        handler = _ASSERTIONS.get(kind)
        if handler is None:
            results.append(
                {"kind": kind, "passed": False, "detail": "unknown assertion kind"}
            )
            continue
        passed, detail = handler(spec, gateway, doc)
        results.append({"kind": kind, "passed": passed, "detail": detail})
    return results


def _digests_for(gateway: Gateway, user: str, cluster_key: str):
    out = []
    for nid in sorted(gateway.notifications):
        n = gateway.notifications[nid]
        if n.user_id != user or n.kind is not NotificationKind.DIGEST:
            continue
        window = gateway.windows[n.window_id]
        if window.cluster_key == cluster_key:
            out.append(n)
    return out


def _assert_exactly_one_digest(spec, gateway, doc):
    digests = _digests_for(gateway, doc["user"], doc["cluster_key"])
    before = parse_ts(doc["before"])
    want = int(doc["member_count"])
    if len(digests) != 1:
        return False, f"expected 1 digest, found {len(digests)}"
    digest = digests[0]
    if len(digest.alert_ids) != want:
        return False, f"expected {want} members, found {len(digest.alert_ids)}"
    if digest.dispatched_at is None or digest.dispatched_at >= before:
        return False, f"not dispatched before {doc['before']}"
    return True, f"one digest of {want} at {format_ts(digest.dispatched_at)}"


def _assert_no_dispatch_before(spec, gateway, doc):
    before = parse_ts(doc["before"])
    user = doc["user"]
    cluster_key = doc["cluster_key"]
    for nid in sorted(gateway.notifications):
        n = gateway.notifications[nid]
        if n.user_id != user or n.dispatched_at is None:
            continue
        keys = {gateway.alerts[a].cluster_key for a in n.alert_ids}
        if cluster_key in keys and n.dispatched_at < before:
            return False, f"{nid} dispatched at {format_ts(n.dispatched_at)}"
    return True, "nothing dispatched early"


def _assert_active_fraction_after(spec, gateway, doc):
    user = doc["user"]
    sim_user = next(u for u in spec.users if u.user_id == user)
    after = SIM_EPOCH + timedelta(days=float(doc["after_day"]))
    inside = 0
    total = 0
    for nid in sorted(gateway.notifications):
        n = gateway.notifications[nid]
        if n.user_id != user or n.dispatched_at is None or n.dispatched_at < after:
            continue
        if any(
            gateway.alerts[a].criticality is Criticality.CRITICAL for a in n.alert_ids
        ):
            continue
        total += 1
        if sim_user.in_active(n.dispatched_at):
            inside += 1
    fraction = inside / total if total else 0.0
    passed = total > 0 and fraction >= float(doc["min_fraction"])
    return passed, f"{inside}/{total} inside active window ({_round(fraction)})"


def _assert_missed_critical_zero(spec, gateway, doc):
    criticals = gateway.metric.get("critical_alerts", 0)
    ok = gateway.metric.get("critical_dispatched_at_decision", 0)
    return criticals == ok, f"{ok}/{criticals} dispatched at decision time"


def _assert_count_equals(spec, gateway, doc):
    key = doc["counter"]
    want = int(doc["value"])
    got = gateway.metric.get(key, 0)
    return got == want, f"{key}={got}, want {want}"


_ASSERTIONS = {
    "exactly_one_digest": _assert_exactly_one_digest,
    "no_dispatch_before": _assert_no_dispatch_before,
    "active_fraction_after": _assert_active_fraction_after,
    "missed_critical_zero": _assert_missed_critical_zero,
    "count_equals": _assert_count_equals,
}


# ---------------------------------------------------------------- loading


def load_users_file(path: str | Path) -> tuple[SyntheticUser, ...]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return tuple(SyntheticUser.from_dict(u) for u in doc["users"])


def load_workload_file(path: str | Path) -> Workload:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return Workload.from_dict(doc)


def load_scenario(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def spec_from_files(
    workload_path: str | Path | None,
    users_path: str | Path | None,
    mode: str,
    seed: int,
    scenario_path: str | Path | None = None,
) -> SimulationSpec:
    """Assemble a run spec from CLI inputs. A scenario file can carry its own
    users, rules, events, and assertions; explicit --workload/--users compose
    with or replace the scenario's."""
    scenario = load_scenario(scenario_path) if scenario_path else {}
    users: tuple[SyntheticUser, ...] = ()
    if users_path:
        users = load_users_file(users_path)
    elif scenario.get("users"):
        users = tuple(SyntheticUser.from_dict(u) for u in scenario["users"])
    if not users:
        raise ValueError("no users given: pass --users or a scenario with users")

    workload = None
    if workload_path:
        workload = load_workload_file(workload_path)
    elif scenario.get("workload"):
        workload = Workload.from_dict(scenario["workload"])

    config = GatewayConfig.from_dict(scenario.get("config", {}))
    duration = float(
        scenario.get(
            "duration_days", workload.duration_days if workload else 1.0
        )
    )
    return SimulationSpec(
        users=users,
        mode=scenario.get("mode", mode),
        seed=seed,
        duration_days=duration,
        workload=workload,
        explicit_events=tuple(scenario.get("events", ())),
        assertions=tuple(scenario.get("assertions", ())),
        config=config,
        explicit_rules=tuple(scenario.get("rules", ())),
        name=scenario.get("name", "simulation"),
    )
