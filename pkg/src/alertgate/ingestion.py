"""Event intake: watcher registry, adaptive rate estimation, file replay.

Watchers are the gateway's eyes on external systems. The webhook watcher is
push-driven, the poll watcher pulls a generic HTTP endpoint at an interval
tuned from the EWMA rate estimate, and the replay watcher feeds a recorded
event file back through the pipeline.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from pathlib import Path

from .clock import format_ts, parse_ts
from .errors import NonPositiveWindow, UnsortedInput

log = logging.getLogger(__name__)

DEFAULT_BETA = 0.2
TARGET_EVENTS_PER_POLL = 1.0
RATE_FLOOR = 1e-6
MIN_POLL_SECONDS = 1.0
MAX_POLL_SECONDS = 3600.0


class WatcherKind:
    WEBHOOK = "webhook"
    POLL = "poll"
    REPLAY = "replay"


@dataclass(frozen=True)
class WatcherConfig:
    watcher_id: str
    kind: str
    endpoint: str | None = None
    path: str | None = None
    base_interval: timedelta | None = None
    enabled: bool = True

    def __post_init__(self) -> None:
        if self.kind not in (WatcherKind.WEBHOOK, WatcherKind.POLL, WatcherKind.REPLAY):
            raise ValueError(f"unknown watcher kind {self.kind!r}")
        if self.kind == WatcherKind.POLL:
            if not self.endpoint:
                raise ValueError("poll watcher needs an endpoint")
            if self.base_interval is None or self.base_interval <= timedelta(0):
                raise ValueError("poll watcher needs a positive base_interval")
        if self.kind == WatcherKind.REPLAY and not self.path:
            raise ValueError("replay watcher needs a file path")

    def to_dict(self) -> dict:
        doc: dict = {"watcher_id": self.watcher_id, "kind": self.kind, "enabled": self.enabled}
        if self.endpoint is not None:
            doc["endpoint"] = self.endpoint
        if self.path is not None:
            doc["path"] = self.path
        if self.base_interval is not None:
            doc["base_interval_s"] = self.base_interval.total_seconds()
        return doc

    @classmethod
    def from_dict(cls, doc) -> "WatcherConfig":
        interval = doc.get("base_interval_s")
        return cls(
            watcher_id=doc["watcher_id"],
            kind=doc["kind"],
            endpoint=doc.get("endpoint"),
            path=doc.get("path"),
            base_interval=timedelta(seconds=interval) if interval else None,
            enabled=bool(doc.get("enabled", True)),
        )


@dataclass(frozen=True)
class RateEstimate:
    """EWMA of a source's event rate, in events per second."""

    source_id: str
    ewma_rate: float
    last_updated: datetime
    beta: float = DEFAULT_BETA

    def __post_init__(self) -> None:
        if self.ewma_rate < 0:
            raise ValueError("rate cannot be negative")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError("beta must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "source_id": self.source_id,
            "ewma_rate": self.ewma_rate,
            "last_updated": format_ts(self.last_updated),
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, doc) -> "RateEstimate":
        return cls(
            source_id=doc["source_id"],
            ewma_rate=float(doc["ewma_rate"]),
            last_updated=parse_ts(doc["last_updated"]),
            beta=float(doc.get("beta", DEFAULT_BETA)),
        )


def update_rate(
    estimate: RateEstimate, observed_count: int, window: timedelta, now: datetime
) -> RateEstimate:
    """Blend the observed rate over the window into the running EWMA."""
    seconds = window.total_seconds()
    if seconds <= 0:
        raise NonPositiveWindow(f"window must be positive, got {window}")
    if observed_count < 0:
        raise ValueError("observed_count cannot be negative")
    observed_rate = observed_count / seconds
    blended = (1.0 - estimate.beta) * estimate.ewma_rate + estimate.beta * observed_rate
    return replace(estimate, ewma_rate=blended, last_updated=now)


def poll_interval(
    estimate: RateEstimate,
    target: float = TARGET_EVENTS_PER_POLL,
    rate_floor: float = RATE_FLOOR,
    min_seconds: float = MIN_POLL_SECONDS,
    max_seconds: float = MAX_POLL_SECONDS,
) -> timedelta:
    """Interval aiming for roughly `target` events per poll, clamped."""
    raw = target / max(estimate.ewma_rate, rate_floor)
    return timedelta(seconds=min(max(raw, min_seconds), max_seconds))


@dataclass(frozen=True)
class ReplayReport:
    """Outcome of feeding a recorded file through ingestion."""

    accepted: int
    rejected: int
    errors: tuple[str, ...] = ()


def read_replay_file(path: str | Path):
    """Yield (line_no, parsed document or None, raw line) for each non-blank
    line, enforcing the occurred_at sort order across parseable lines.

    Raises FileNotFoundError if the path is missing and UnsortedInput naming
    the first out-of-order line. Lines that fail to parse come back with a
    None document; the caller counts them as rejected.
    """
    text = Path(path).read_text(encoding="utf-8")
    previous: datetime | None = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            yield line_no, None, line
            continue
        occurred = doc.get("occurred_at") if isinstance(doc, dict) else None
        if occurred is not None:
            try:
                ts = parse_ts(str(occurred))
            except ValueError:
                yield line_no, doc, line
                continue
            if previous is not None and ts < previous:
                raise UnsortedInput(line_no)
            previous = ts
        yield line_no, doc, line


def fetch_poll_endpoint(endpoint: str, timeout: float = 10.0) -> list:
    """Pull the generic poll endpoint: expects a JSON array of event documents."""
    import requests

    response = requests.get(endpoint, timeout=timeout)
    response.raise_for_status()
    body = response.json()
    if not isinstance(body, list):
        raise ValueError("poll endpoint must return a JSON array")
    return body
