"""Injectable clocks: wall time for the live service, virtual time for tests
and the simulator. All timestamps are UTC and truncated to milliseconds."""

from __future__ import annotations

import time
from datetime import datetime, timedelta, timezone


def floor_ms(at: datetime) -> datetime:
    """Normalize to UTC and truncate sub-millisecond precision."""
    if at.tzinfo is None:
        at = at.replace(tzinfo=timezone.utc)
    at = at.astimezone(timezone.utc)
    return at.replace(microsecond=at.microsecond - at.microsecond % 1000)


def utcnow_ms() -> datetime:
    return floor_ms(datetime.now(timezone.utc))


def format_ts(at: datetime) -> str:
    """RFC3339 with fixed millisecond precision, e.g. 2026-01-05T09:30:00.000Z."""
    if at.tzinfo is not timezone.utc:
        at = floor_ms(at)
    return (
        f"{at.year:04d}-{at.month:02d}-{at.day:02d}"
        f"T{at.hour:02d}:{at.minute:02d}:{at.second:02d}"
        f".{at.microsecond // 1000:03d}Z"
    )


def parse_ts(raw: str) -> datetime:
    """Parse an RFC3339 timestamp. Naive inputs are taken as UTC."""
    text = raw.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    return floor_ms(parsed)


class SystemClock:
    """Wall-clock time source used by the service binary."""

    def now(self) -> datetime:
        return utcnow_ms()

    def sleep(self, seconds: float) -> None:
        time.sleep(seconds)


class VirtualClock:
    """Manually advanced time source. Never moves backwards."""

    def __init__(self, start: datetime):
        self._now = floor_ms(start)

    def now(self) -> datetime:
        return self._now

    def advance(self, delta: timedelta) -> datetime:
        if delta < timedelta(0):
            raise ValueError("cannot advance a clock by a negative delta")
        self._now = floor_ms(self._now + delta)
        return self._now

    def advance_to(self, at: datetime) -> datetime:
        at = floor_ms(at)
        if at < self._now:
            raise ValueError(f"cannot move clock backwards from {self._now} to {at}")
        self._now = at
        return self._now

    def sleep(self, seconds: float) -> None:
        self.advance(timedelta(seconds=seconds))
