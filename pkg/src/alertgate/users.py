"""Per-user state: learned availability, explicit preferences, scheduling.

Availability is a 168-bin hour-of-week histogram of engagement counts with
Laplace smoothing, so a fresh user scores 0.5 everywhere and no amount of
evidence ever pins a bin to exactly 0 or 1. Explicit quiet hours are a hard
constraint layered over the learned scores.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timedelta
from typing import Mapping

from .clock import floor_ms
from .model import ENGAGED_SIGNALS, Channel, SignalKind

BINS = 168
DEFAULT_THRESHOLD = 0.6
DEFAULT_MAX_DEFER = timedelta(hours=24)


def hour_of_week(at: datetime, offset_minutes: int) -> int:
    """Bin index with Monday 00:00 local time as bin 0."""
    local = at + timedelta(minutes=offset_minutes)
    return local.weekday() * 24 + local.hour


@dataclass(frozen=True)
class AvailabilityHistogram:
    user_id: str
    engaged: tuple[int, ...] = (0,) * BINS
    seen: tuple[int, ...] = (0,) * BINS
    timezone_offset_minutes: int = 0

    def __post_init__(self) -> None:
        if len(self.engaged) != BINS or len(self.seen) != BINS:
            raise ValueError(f"histogram needs exactly {BINS} bins")
        for h in range(BINS):
            if self.engaged[h] > self.seen[h]:
                raise ValueError(f"engaged exceeds seen in bin {h}")

    def to_dict(self) -> dict:
        return {
            "user_id": self.user_id,
            "engaged": list(self.engaged),
            "seen": list(self.seen),
            "timezone_offset_minutes": self.timezone_offset_minutes,
        }

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AvailabilityHistogram":
        return cls(
            user_id=doc["user_id"],
            engaged=tuple(doc["engaged"]),
            seen=tuple(doc["seen"]),
            timezone_offset_minutes=int(doc.get("timezone_offset_minutes", 0)),
        )


def record_engagement(
    hist: AvailabilityHistogram, signal: SignalKind, at: datetime
) -> AvailabilityHistogram:
    """Count the observation in its hour-of-week bin.

    seen always increments; engaged increments only for signals showing the
    user actually interacted promptly.
    """
    h = hour_of_week(at, hist.timezone_offset_minutes)
    seen = list(hist.seen)
    seen[h] += 1
    engaged = list(hist.engaged)
    if signal in ENGAGED_SIGNALS:
        engaged[h] += 1
    return replace(hist, engaged=tuple(engaged), seen=tuple(seen))


def availability_score(hist: AvailabilityHistogram, at: datetime) -> float:
    h = hour_of_week(at, hist.timezone_offset_minutes)
    return score_of_bin(hist, h)


def score_of_bin(hist: AvailabilityHistogram, h: int) -> float:
    return (hist.engaged[h] + 1) / (hist.seen[h] + 2)


def all_scores(hist: AvailabilityHistogram) -> list[float]:
    return [score_of_bin(hist, h) for h in range(BINS)]


@dataclass(frozen=True)
class Preferences:
    user_id: str
    channel_order: tuple[Channel, ...] = (Channel.console(),)
    quiet_hours: frozenset[int] = frozenset()
    digest_window_length: timedelta | None = None
    availability_threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self) -> None:
        if not self.channel_order:
            raise ValueError("channel_order must not be empty")
        if not 0.0 < self.availability_threshold < 1.0:
            raise ValueError("availability threshold must be strictly inside (0, 1)")
        for h in self.quiet_hours:
            if not 0 <= h < BINS:
                raise ValueError(f"quiet hour bin {h} out of range")

    def to_dict(self) -> dict:
        doc: dict = {
            "user_id": self.user_id,
            "channel_order": [c.to_dict() for c in self.channel_order],
            "quiet_hours": sorted(self.quiet_hours),
            "availability_threshold": self.availability_threshold,
        }
        if self.digest_window_length is not None:
            doc["digest_window_hours"] = self.digest_window_length.total_seconds() / 3600.0
        return doc

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Preferences":
        hours = doc.get("digest_window_hours")
        return cls(
            user_id=doc["user_id"],
            channel_order=tuple(Channel.from_dict(c) for c in doc["channel_order"]),
            quiet_hours=frozenset(doc.get("quiet_hours", ())),
            digest_window_length=timedelta(hours=hours) if hours else None,
            availability_threshold=float(doc.get("availability_threshold", DEFAULT_THRESHOLD)),
        )


def next_available_slot(
    hist: AvailabilityHistogram,
    prefs: Preferences,
    now: datetime,
    max_defer: timedelta = DEFAULT_MAX_DEFER,
) -> datetime:
    """Earliest acceptable delivery time at or after now.

    The current bin qualifying means deliver immediately; otherwise scan
    forward bin by bin through one full week, landing on bin-start times in
    the user's local clock. Nothing qualifying falls back to now + max_defer.
    """
    now = floor_ms(now)
    offset = timedelta(minutes=hist.timezone_offset_minutes)
    local_now = now + offset
    local_hour_start = local_now.replace(minute=0, second=0, microsecond=0)
    for step in range(BINS):
        candidate_local = local_hour_start + timedelta(hours=step)
        candidate = candidate_local - offset if step else now
        h = hour_of_week(candidate, hist.timezone_offset_minutes)
        if h in prefs.quiet_hours:
            continue
        if score_of_bin(hist, h) >= prefs.availability_threshold:
            return candidate
    return now + max_defer


def preferred_channel(prefs: Preferences, attempt_index: int) -> Channel:
    """Escalation walks down the channel list and saturates at its end."""
    if attempt_index < 0:
        raise ValueError("attempt_index cannot be negative")
    return prefs.channel_order[min(attempt_index, len(prefs.channel_order) - 1)]
